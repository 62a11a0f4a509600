//! Exact and float probability tables for all three families.
//!
//! `cargo run --example pmf_tables`

use abeliand::dist::float::pmf_table_float;
use abeliand::dist::{pmf_table, Family, FloatParams, Params};
use abeliand::rational::{fmt_fraction, ratio};

fn main() -> abeliand::Result<()> {
    let params = Params::with_alpha(4, ratio(1, 2))?;
    for family in [Family::Abelian, Family::Avalanche, Family::ShiftedAvalanche] {
        let table = pmf_table(family, &params);
        println!("{family}, N = 4, alpha = 1/2");
        for (b, q) in table
            .support
            .iter()
            .zip(table.probs_exact.as_ref().unwrap())
        {
            println!("  P({b}) = {}", fmt_fraction(q));
        }
    }

    // Large N goes through log space; the table still sums to one.
    let big = FloatParams::with_alpha(100_000, 0.9)?;
    let table = pmf_table_float(Family::Abelian, &big);
    let probs = table.probs_float.as_ref().unwrap();
    println!("abelian, N = 100000, alpha = 0.9");
    for b in [1usize, 2, 10, 100, 1000] {
        println!("  P({b}) = {:.6e}", probs[b - 1]);
    }
    println!("  total = {:.15}", table.total_float().unwrap());
    Ok(())
}
