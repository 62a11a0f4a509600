//! The J1..J6 rewriting of the Abelian second moment, checked exactly.
//!
//! `cargo run --example second_moment_decomposition`

use abeliand::dist::{j_decomposition, Params};
use abeliand::rational::{fmt_fraction, ratio, to_f64};

fn main() -> abeliand::Result<()> {
    let d = j_decomposition(&Params::with_alpha(2, ratio(1, 2))?)?;
    println!("N = 2, alpha = 1/2");
    for (name, v) in [
        ("C", &d.c),
        ("J1", &d.j1),
        ("J2", &d.j2),
        ("J3", &d.j3),
        ("J4", &d.j4),
    ] {
        println!("  {name} = {}", fmt_fraction(v));
    }
    println!(
        "  E[Z^2] = C (J1 - J2) = {}",
        fmt_fraction(&d.second_moment)
    );

    for n in [10, 20] {
        let d = j_decomposition(&Params::with_alpha(n, ratio(1, 3))?)?;
        println!(
            "N = {n}, alpha = 1/3: split k = {}, J5 = {:.6e}, J6 = {:.6e}, identities hold: {}",
            d.split,
            to_f64(&d.j5),
            to_f64(&d.j6),
            d.holds()
        );
    }
    Ok(())
}
