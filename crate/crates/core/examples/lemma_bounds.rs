//! Exact certificates for the polynomial, coefficient and product bounds.
//!
//! `cargo run --example lemma_bounds`

use abeliand::rational::to_f64;
use abeliand::stirling::{check_bound_f, check_lemma_p, check_product_bound, poly_h, poly_p};

fn main() -> abeliand::Result<()> {
    println!("P_2(x) = {}", poly_p(2));
    println!("h_2(x) = {}", poly_h(2));

    for (i, n) in [(1, 4), (3, 10), (10, 30)] {
        let c = check_lemma_p(i, n)?;
        print!(
            "P_{i}({n}) = {}, (N-1)_(i+2) + h_i(N) equal: {}",
            c.p_value, c.equality
        );
        match &c.bounds {
            Some(b) => println!(", bounds {} (upper 2N^(i+3) = {})", c.holds(), b.upper),
            None => println!(", bounds not required below sqrt(2N)"),
        }
    }

    for (i, j) in [(4, 2), (10, 5), (40, 1)] {
        let c = check_bound_f(i, j)?;
        println!(
            "|s({},{j};1)| = {} <= f({i}) |s({i},{j};1)| = {}: {}",
            i + 2,
            c.lhs,
            c.rhs,
            c.holds
        );
    }

    for (i, n) in [(14, 100), (19, 200)] {
        let c = check_product_bound(i, n)?;
        println!(
            "prod_(j<={i}) (1 + j/{n}) = {:.6} <= {:.6}: {}",
            to_f64(&c.product),
            to_f64(&c.bound),
            c.holds
        );
    }
    Ok(())
}
