//! Rows of s(i,j;1), the coefficients of (x-1)(x-2)...(x-i).
//!
//! `cargo run --example stirling_table`

use abeliand::rational::int;
use abeliand::stirling::{falling_factorial, stirling_row, unsigned_stirling_subset_oracle};

fn main() {
    for i in 0..=8 {
        let row = stirling_row(i);
        let coeffs: Vec<String> = row.coeffs().iter().map(|c| c.to_string()).collect();
        println!("i = {i}: [{}]", coeffs.join(", "));
    }

    let row = stirling_row(6);
    let x = int(9);
    println!(
        "row 6 at x = 9: {} = (8)_6 = {}",
        row.eval(&x),
        falling_factorial(&int(8), 6)
    );
    println!(
        "|s(6,3;1)| = {} (subset sums: {})",
        row.unsigned(3),
        unsigned_stirling_subset_oracle(6, 3).unwrap()
    );
    println!("s(60,59;1) = {}", stirling_row(60).get(59));
}
