//! Non-centered Stirling numbers of the first kind with `r = 1`.
//!
//! `s(i, j; 1)` is the coefficient of `x^j` in `(x - 1)(x - 2)...(x - i)`,
//! with `s(0, 0; 1) = 1`. Rows are produced by repeated multiplication by
//! `(x - k)` and memoized process-wide; the subset-sum representation of the
//! unsigned numbers is kept as a small-`i` oracle only.
//!
//! The module also carries the auxiliary polynomials `P_i` and `h_i` and the
//! exact checkers for the three bounds used when studying the variance of the
//! Abelian distribution for large `N`.

use std::fmt;
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{from_big, int, ratio};

/// Largest `i` accepted by [`unsigned_stirling_subset_oracle`].
pub const SUBSET_ORACLE_MAX_I: usize = 14;

/// Rational lower approximation of `e^2 = 7.38905609893065...`, truncated
/// after ten decimals. A product below this value is below `e^2`.
pub fn e_squared_lower() -> BigRational {
    BigRational::new(
        BigInt::from(73_890_560_989u64),
        BigInt::from(10_000_000_000u64),
    )
}

/// `x (x - 1) ... (x - (n - 1))`; the empty product for `n = 0` is one.
pub fn falling_factorial(x: &BigRational, n: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut k = BigRational::zero();
    for _ in 0..n {
        acc *= x - &k;
        if acc.is_zero() {
            break;
        }
        k += BigRational::one();
    }
    acc
}

/// Integer specialisation of [`falling_factorial`].
pub fn falling_factorial_int(x: i64, n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for k in 0..n as i64 {
        let f = x - k;
        if f == 0 {
            return BigInt::zero();
        }
        acc *= f;
    }
    acc
}

/// Coefficients `s(i, j; 1)` for `j = 0..=i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StirlingRow {
    i: usize,
    coeffs: Vec<BigInt>,
}

impl StirlingRow {
    /// Wraps raw coefficients. Used by tests and the verification suite to
    /// examine rows that did not come from the memo.
    pub fn from_coeffs(coeffs: Vec<BigInt>) -> Self {
        assert!(!coeffs.is_empty(), "a Stirling row has at least one entry");
        StirlingRow {
            i: coeffs.len() - 1,
            coeffs,
        }
    }

    pub fn i(&self) -> usize {
        self.i
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [BigInt] {
        &mut self.coeffs
    }

    /// `s(i, j; 1)`, zero for `j > i`.
    pub fn get(&self, j: usize) -> BigInt {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn unsigned(&self, j: usize) -> BigInt {
        self.get(j).abs()
    }

    /// `Σ_j s(i, j; 1) x^j`, which equals `(x - 1)_i`.
    pub fn eval(&self, x: &BigRational) -> BigRational {
        horner(self.coeffs.iter().map(|c| from_big(c.clone())), x)
    }

    /// `Σ_j |s(i, j; 1)| x^j`, which equals `(x + i)_i`.
    pub fn eval_unsigned(&self, x: &BigRational) -> BigRational {
        horner(self.coeffs.iter().map(|c| from_big(c.abs())), x)
    }

    /// Every nonzero entry has sign `(-1)^(i - j)`.
    pub fn has_alternating_signs(&self) -> bool {
        self.coeffs
            .iter()
            .enumerate()
            .all(|(j, c)| c.is_zero() || ((self.i - j).is_multiple_of(2) == c.is_positive()))
    }
}

fn horner<I>(coeffs: I, x: &BigRational) -> BigRational
where
    I: DoubleEndedIterator<Item = BigRational>,
{
    coeffs.rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn memo() -> &'static RwLock<Vec<Vec<BigInt>>> {
    static MEMO: OnceLock<RwLock<Vec<Vec<BigInt>>>> = OnceLock::new();
    MEMO.get_or_init(|| RwLock::new(vec![vec![BigInt::one()]]))
}

/// Row `i` of the table. Rows are appended to a shared memo on first use and
/// never modified afterwards.
pub fn stirling_row(i: usize) -> StirlingRow {
    {
        let rows = memo().read().unwrap_or_else(|e| e.into_inner());
        if let Some(row) = rows.get(i) {
            return StirlingRow {
                i,
                coeffs: row.clone(),
            };
        }
    }
    let mut rows = memo().write().unwrap_or_else(|e| e.into_inner());
    while rows.len() <= i {
        let next = multiply_by_shifted_root(rows.last().expect("memo starts with row 0"));
        rows.push(next);
    }
    StirlingRow {
        i,
        coeffs: rows[i].clone(),
    }
}

// Row k -> row k+1: multiply the polynomial by (x - (k + 1)).
fn multiply_by_shifted_root(prev: &[BigInt]) -> Vec<BigInt> {
    let root = BigInt::from(prev.len());
    let mut next = vec![BigInt::zero(); prev.len() + 1];
    for (j, c) in prev.iter().enumerate() {
        next[j + 1] += c;
        next[j] -= c * &root;
    }
    next
}

/// `s(i, j; 1)` with the sign convention kept.
pub fn stirling(i: usize, j: usize) -> Result<BigInt> {
    if j > i {
        return Err(Error::IndexOrder { i, j });
    }
    Ok(stirling_row(i).get(j))
}

/// `|s(i, j; 1)| = (-1)^(i - j) s(i, j; 1)`.
pub fn unsigned_stirling(i: usize, j: usize) -> Result<BigInt> {
    let s = stirling(i, j)?;
    Ok(if (i - j).is_multiple_of(2) { s } else { -s })
}

/// `|s(i, j; 1)|` as `i!` times the sum of `1 / (r_1 ... r_j)` over every
/// `j`-subset of `{1, ..., i}`. Exponential in `i`; intended as an oracle.
pub fn unsigned_stirling_subset_oracle(i: usize, j: usize) -> Result<BigInt> {
    if i > SUBSET_ORACLE_MAX_I {
        return Err(Error::Precondition(format!(
            "subset oracle limited to i <= {SUBSET_ORACLE_MAX_I}, got {i}"
        )));
    }
    if j == 0 || j > i {
        return Err(Error::Precondition(format!(
            "subset oracle needs i >= j > 0, got i = {i}, j = {j}"
        )));
    }
    let mut sum = BigRational::zero();
    for mask in 0u32..(1 << i) {
        if mask.count_ones() as usize != j {
            continue;
        }
        let product: i64 = (0..i)
            .filter(|bit| mask & (1 << bit) != 0)
            .map(|bit| bit as i64 + 1)
            .product();
        sum += ratio(1, product);
    }
    let total = sum * from_big(falling_factorial_int(i as i64, i as u64));
    debug_assert!(total.is_integer());
    Ok(total.to_integer())
}

/// Dense polynomial with exact rational coefficients in ascending degree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = BigInt>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(from_big).collect())
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs
            .get(k)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn leading_coefficient(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        horner(self.coeffs.iter().cloned(), x)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let len = self.coeffs.len().max(other.coeffs.len());
        Polynomial::new((0..len).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        if self.is_zero() || other.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            for (b, cb) in other.coeffs.iter().enumerate() {
                out[a + b] += ca * cb;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})x")?,
                _ => write!(f, "({c})x^{k}")?,
            }
        }
        Ok(())
    }
}

/// `P_i(x) = Σ_{j=0}^{i} s(i + 2, j; 1) x^j`.
pub fn poly_p(i: usize) -> Polynomial {
    let row = stirling_row(i + 2);
    Polynomial::from_integers(row.coeffs()[..=i].iter().cloned())
}

/// `h_i(x) = x^(i+1) ((i + 2)(i + 3) / 2 - x)`.
pub fn poly_h(i: usize) -> Polynomial {
    let mut coeffs = vec![BigRational::zero(); i + 3];
    coeffs[i + 1] = int(((i + 2) * (i + 3) / 2) as i64);
    coeffs[i + 2] = int(-1);
    Polynomial::new(coeffs)
}

/// The degree-4 polynomial bounding `|s(i + 2, j; 1)| / |s(i, j; 1)|`:
/// `(x+1)(x+2) + 2(x+1)(x+2)x + (x+1)(x+2)x(x-1) + 4`, evaluated at `i`.
pub fn bound_f(i: u64) -> BigInt {
    let x = BigInt::from(i);
    let base = (&x + 1u32) * (&x + 2u32);
    &base + &base * &x * 2u32 + &base * &x * (&x - 1u32) + 4u32
}

/// `i^2 >= 2N`, the integer form of `i >= sqrt(2N)`.
pub fn at_or_above_sqrt_2n(i: u64, n: u64) -> bool {
    (i as u128) * (i as u128) >= 2 * n as u128
}

/// Exact record of `P_i(N) = (N - 1)_{i+2} + h_i(N)` and, when
/// `i >= sqrt(2N)`, of `h_i(N) > 0` and `2 N^(i+3) > P_i(N) > (N - 1)_{i+2} >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaPCertificate {
    pub i: u64,
    pub n: u64,
    pub p_value: BigInt,
    pub falling: BigInt,
    pub h_value: BigInt,
    pub equality: bool,
    /// `None` when the `i >= sqrt(2N)` gate is closed.
    pub bounds: Option<LemmaPBounds>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LemmaPBounds {
    pub upper: BigInt,
    pub h_positive: bool,
    pub below_upper: bool,
    pub above_falling: bool,
    pub falling_nonnegative: bool,
}

impl LemmaPBounds {
    pub fn holds(&self) -> bool {
        self.h_positive && self.below_upper && self.above_falling && self.falling_nonnegative
    }
}

impl LemmaPCertificate {
    pub fn holds(&self) -> bool {
        self.equality && self.bounds.as_ref().is_none_or(LemmaPBounds::holds)
    }
}

pub fn check_lemma_p(i: u64, n: u64) -> Result<LemmaPCertificate> {
    if i == 0 || n < 3 || n - 3 < i {
        return Err(Error::Precondition(format!(
            "lemma on P_i needs N - 3 >= i >= 1, got i = {i}, N = {n}"
        )));
    }
    let x = int(n as i64);
    let integer = |r: BigRational| {
        debug_assert!(r.is_integer());
        r.to_integer()
    };
    let p_value = integer(poly_p(i as usize).eval(&x));
    let h_value = integer(poly_h(i as usize).eval(&x));
    let falling = falling_factorial_int(n as i64 - 1, i + 2);
    let equality = p_value == &falling + &h_value;

    let bounds = at_or_above_sqrt_2n(i, n).then(|| {
        let upper = BigInt::from(2) * num_traits::pow(BigInt::from(n), (i + 3) as usize);
        LemmaPBounds {
            h_positive: h_value.is_positive(),
            below_upper: upper > p_value,
            above_falling: p_value > falling,
            falling_nonnegative: !falling.is_negative(),
            upper,
        }
    });
    Ok(LemmaPCertificate {
        i,
        n,
        p_value,
        falling,
        h_value,
        equality,
        bounds,
    })
}

/// Exact record of `|s(i + 2, j; 1)| <= |s(i, j; 1)| f(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundFCertificate {
    pub i: usize,
    pub j: usize,
    pub lhs: BigInt,
    pub unsigned_ij: BigInt,
    pub f_i: BigInt,
    pub rhs: BigInt,
    pub holds: bool,
}

pub fn check_bound_f(i: usize, j: usize) -> Result<BoundFCertificate> {
    if j > i {
        return Err(Error::IndexOrder { i, j });
    }
    let lhs = unsigned_stirling(i + 2, j)?;
    let unsigned_ij = unsigned_stirling(i, j)?;
    let f_i = bound_f(i as u64);
    let rhs = &unsigned_ij * &f_i;
    Ok(BoundFCertificate {
        holds: lhs <= rhs,
        i,
        j,
        lhs,
        unsigned_ij,
        f_i,
        rhs,
    })
}

/// Exact record of `Π_{j=1}^{i} (1 + j/N) <= e^2`, checked against
/// [`e_squared_lower`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductBoundCertificate {
    pub i: u64,
    pub n: u64,
    pub product: BigRational,
    pub bound: BigRational,
    pub holds: bool,
}

pub fn check_product_bound(i: u64, n: u64) -> Result<ProductBoundCertificate> {
    if n == 0 {
        return Err(Error::InvalidN(n));
    }
    if at_or_above_sqrt_2n(i, n) {
        return Err(Error::Precondition(format!(
            "product bound needs i < sqrt(2N), got i = {i}, N = {n}"
        )));
    }
    let nn = n as i64;
    let product = (1..=i as i64).fold(BigRational::one(), |acc, j| acc * ratio(nn + j, nn));
    let bound = e_squared_lower();
    Ok(ProductBoundCertificate {
        holds: product <= bound,
        i,
        n,
        product,
        bound,
    })
}
