//! Exact and numerically stable evaluation of the Abelian distribution
//!
//! ```text
//! P(Z = b) = C binom(N-1, b-1) p^(b-1) (1 - b p)^(N-b-1) b^(b-2),   b = 1..N,
//! C = (1 - N p) / (1 - (N - 1) p)
//! ```
//!
//! and of the Avalanche distribution
//!
//! ```text
//! P(X = b) = binom(N, b) p^b (1 - (b+1) p)^(N-b) (b+1)^(b-1),   b = 0..N,
//! ```
//!
//! for `0 < p < 1/N`: probability tables, means, second moments and
//! variances, the non-centered Stirling numbers of the first kind behind the
//! closed-form second moment, the large-`N` variance limit
//! `alpha / (1 - alpha)^3` for `p = alpha/N`, and a seeded Monte Carlo
//! sampler for the Avalanche distribution.
//!
//! ```
//! use abeliand::dist::{abelian_variance, Params};
//! use abeliand::rational::ratio;
//!
//! let params = Params::with_alpha(2, ratio(1, 2)).unwrap();
//! let m = abelian_variance(&params).unwrap();
//! assert_eq!(m.mean, ratio(4, 3));
//! assert_eq!(m.variance, ratio(2, 9));
//! ```

pub mod cli;
pub mod dist;
pub mod error;
pub mod rational;
pub mod sampler;
pub mod stirling;
pub mod verify;

pub use error::{Error, Result};
pub use num_bigint::BigInt;
pub use num_rational::BigRational;
