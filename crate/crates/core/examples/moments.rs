//! Closed-form means, second moments and variances against direct summation.
//!
//! `cargo run --example moments`

use abeliand::dist::float::moments_f64;
use abeliand::dist::{brute_force_moment, moments, Family, FloatParams, Params};
use abeliand::rational::{fmt_fraction, ratio};

fn main() -> abeliand::Result<()> {
    for (n, alpha) in [(2, ratio(1, 2)), (10, ratio(1, 3)), (25, ratio(9, 10))] {
        let params = Params::with_alpha(n, alpha.clone())?;
        let m = moments(Family::Abelian, &params)?;
        let direct = brute_force_moment(Family::Abelian, &params, 2)?;
        println!("abelian N = {n}, alpha = {}", fmt_fraction(&alpha));
        println!("  mean          = {}", fmt_fraction(&m.mean));
        println!("  second moment = {}", fmt_fraction(&m.second_moment));
        println!("  variance      = {}", fmt_fraction(&m.variance));
        println!("  matches direct sum: {}", direct == m.second_moment);
    }

    let params = Params::new(5, ratio(1, 10))?;
    let m = moments(Family::Avalanche, &params)?;
    println!(
        "avalanche N = 5, p = 1/10: mean = {}",
        fmt_fraction(&m.mean)
    );

    let fp = FloatParams::with_alpha(10_000, 0.5)?;
    let m = moments_f64(Family::Abelian, &fp);
    println!(
        "abelian N = 10000, alpha = 0.5 (float): variance = {:.6}",
        m.variance
    );
    Ok(())
}
