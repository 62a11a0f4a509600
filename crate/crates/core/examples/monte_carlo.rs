//! Seeded avalanche sampling compared with the exact table.
//!
//! `cargo run --release --example monte_carlo`

use abeliand::dist::{avalanche_mean, pmf_table, Family, FloatParams, Params};
use abeliand::rational::{ratio, to_f64};
use abeliand::sampler::{epsilon_sequence, monte_carlo, DEFAULT_SEED};

fn main() -> abeliand::Result<()> {
    // One draw traced by hand: each step counts the uniforms in the next interval.
    let fp = FloatParams::new(4, 0.2)?;
    let trace = epsilon_sequence(&fp, &[0.95, 0.85, 0.3, 0.7])?;
    println!(
        "uniforms {:?} -> epsilons {:?}, size {}",
        trace.uniforms, trace.epsilons, trace.total
    );

    let exact = Params::new(10, ratio(2, 25))?;
    let expected: Vec<f64> = pmf_table(Family::Avalanche, &exact)
        .probs_exact
        .unwrap()
        .iter()
        .map(to_f64)
        .collect();
    let stats = monte_carlo(&FloatParams::new(10, 0.08)?, 1_000_000, DEFAULT_SEED)?;
    let fit = stats.chi_square(&expected);
    println!("N = 10, p = 0.08, 10^6 draws, seed {DEFAULT_SEED}");
    println!(
        "  mean {:.5} +- {:.5} (exact {:.5})",
        stats.empirical_mean,
        stats.stderr_mean,
        to_f64(&avalanche_mean(&exact))
    );
    println!("  total variation {:.2e}", stats.total_variation(&expected));
    println!(
        "  chi-square {:.2} on {} df, p = {:.3}",
        fit.statistic, fit.degrees_of_freedom, fit.p_value
    );
    Ok(())
}
