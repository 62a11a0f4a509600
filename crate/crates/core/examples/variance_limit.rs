//! Convergence of the Abelian variance to alpha / (1 - alpha)^3 as N grows.
//!
//! `cargo run --example variance_limit`

use abeliand::dist::convergence_table;

fn main() -> abeliand::Result<()> {
    for alpha in [0.3, 0.5, 0.7, 0.9] {
        println!("alpha = {alpha}");
        for row in convergence_table(alpha, &[100, 1_000, 10_000, 100_000])? {
            println!(
                "  N = {:>6}: variance {:>14.6}, limit {:>10.4}, |error| {:.3e}",
                row.n, row.variance, row.limit, row.abs_error
            );
        }
    }
    Ok(())
}
