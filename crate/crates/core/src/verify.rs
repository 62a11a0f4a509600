//! Self-check suites run by `abeliand verify`.
//!
//! Every identity and bound the library relies on is re-established here over
//! a fixed parameter grid: exactly where the quantity is rational, to a pinned
//! tolerance where it is a float. Output is a deterministic list of
//! `PASS`/`FAIL` lines; nothing time-dependent is printed.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::dist::float::{abelian_variance_f64, pmf_table_float};
use crate::dist::{
    abelian_mean, abelian_second_moment, abelian_variance, avalanche_mean, brute_force_moment,
    convergence_table, j_decomposition, pmf_table, shifted_mean_via_abelian, Family, FloatParams,
    Params,
};
use crate::rational::{from_big, int, ratio, to_f64};
use crate::sampler::{monte_carlo, SampleStats};
use crate::stirling::{
    at_or_above_sqrt_2n, check_bound_f, check_lemma_p, check_product_bound, falling_factorial,
    stirling_row, unsigned_stirling_subset_oracle, StirlingRow,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Stirling,
    Lemmas,
    Pmf,
    Moments,
    Decomposition,
    Limit,
    Sampler,
}

impl Suite {
    pub const ALL: [Suite; 7] = [
        Suite::Stirling,
        Suite::Lemmas,
        Suite::Pmf,
        Suite::Moments,
        Suite::Decomposition,
        Suite::Limit,
        Suite::Sampler,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Stirling => "stirling",
            Suite::Lemmas => "lemmas",
            Suite::Pmf => "pmf",
            Suite::Moments => "moments",
            Suite::Decomposition => "decomposition",
            Suite::Limit => "limit",
            Suite::Sampler => "sampler",
        }
    }
}

/// Deliberate corruption used to confirm the suites notice a broken table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Negates `s(5, 2; 1)` in the rows examined by the Stirling suite.
    StirlingSign,
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Largest `N` for the exact sweeps.
    pub max_n: u64,
    /// Largest `N` for the float suites.
    pub float_max_n: u64,
    pub samples: u64,
    pub seed: u64,
    /// Empty means every suite.
    pub suites: Vec<Suite>,
    pub fault: Option<Fault>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            max_n: 25,
            float_max_n: 10_000,
            samples: 1_000_000,
            seed: crate::sampler::DEFAULT_SEED,
            suites: Vec::new(),
            fault: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub suite: Suite,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{status} [{}] {}: {}",
                c.suite.name(),
                c.name,
                c.detail
            );
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(out, "verify: {passed}/{} checks passed", self.checks.len());
        out
    }
}

struct Recorder<'a> {
    suite: Suite,
    report: &'a mut Report,
}

impl Recorder<'_> {
    fn record(&mut self, name: &str, passed: bool, detail: String) {
        self.report.checks.push(Check {
            suite: self.suite,
            name: name.to_string(),
            passed,
            detail,
        });
    }
}

/// The alpha grid 1/10, ..., 9/10.
pub fn alpha_grid() -> Vec<BigRational> {
    (1..=9).map(|k| ratio(k, 10)).collect()
}

pub fn run(config: &VerifyConfig) -> Report {
    let mut report = Report::default();
    let suites: Vec<Suite> = if config.suites.is_empty() {
        Suite::ALL.to_vec()
    } else {
        let mut s = config.suites.clone();
        s.sort();
        s.dedup();
        s
    };
    for suite in suites {
        let mut rec = Recorder {
            suite,
            report: &mut report,
        };
        match suite {
            Suite::Stirling => stirling_suite(config, &mut rec),
            Suite::Lemmas => lemma_suite(&mut rec),
            Suite::Pmf => pmf_suite(config, &mut rec),
            Suite::Moments => moment_suite(config, &mut rec),
            Suite::Decomposition => decomposition_suite(config, &mut rec),
            Suite::Limit => limit_suite(config, &mut rec),
            Suite::Sampler => sampler_suite(config, &mut rec),
        }
    }
    report
}

fn row_for_checks(i: usize, fault: Option<Fault>) -> StirlingRow {
    let mut row = stirling_row(i);
    if fault == Some(Fault::StirlingSign) && i == 5 {
        let flipped = -row.get(2);
        row.coeffs_mut()[2] = flipped;
    }
    row
}

// (-1)^(i-j) s(i, j; 1), read from a possibly corrupted row.
fn unsigned_from_row(row: &StirlingRow, j: usize) -> BigInt {
    let s = row.get(j);
    if (row.i() - j).is_multiple_of(2) {
        s
    } else {
        -s
    }
}

const STIRLING_MAX_I: usize = 60;
const SUBSET_MAX_I: usize = 12;

fn stirling_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    let rows: Vec<StirlingRow> = (0..=STIRLING_MAX_I)
        .map(|i| row_for_checks(i, config.fault))
        .collect();

    let mut bad = Vec::new();
    let mut pairs = 0;
    for i in 1..=SUBSET_MAX_I {
        for j in 1..=i {
            pairs += 1;
            let oracle = unsigned_stirling_subset_oracle(i, j).expect("within oracle range");
            if oracle != unsigned_from_row(&rows[i], j) {
                bad.push((i, j));
            }
        }
    }
    rec.record(
        "subset-sum oracle equals recurrence",
        bad.is_empty(),
        mismatch_detail(pairs, "pairs with 1 <= j <= i <= 12", &bad),
    );

    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| {
            let i = r.i();
            r.get(i) != BigInt::one()
                || (i >= 1 && r.get(i - 1) != BigInt::from(-((i * (i + 1) / 2) as i64)))
        })
        .map(StirlingRow::i)
        .collect();
    rec.record(
        "s(i,i;1) = 1 and s(i,i-1;1) = -i(i+1)/2",
        bad.is_empty(),
        mismatch_detail(STIRLING_MAX_I + 1, "rows with i <= 60", &bad),
    );

    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| !r.has_alternating_signs())
        .map(StirlingRow::i)
        .collect();
    rec.record(
        "sign of s(i,j;1) is (-1)^(i-j)",
        bad.is_empty(),
        mismatch_detail(STIRLING_MAX_I + 1, "rows with i <= 60", &bad),
    );

    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| {
            (0..=r.i() as i64 + 1)
                .any(|x| r.eval(&int(x)) != falling_factorial(&int(x - 1), r.i() as u64))
        })
        .map(StirlingRow::i)
        .collect();
    rec.record(
        "row polynomial equals (x-1)_i at x = 0..i+1",
        bad.is_empty(),
        mismatch_detail(STIRLING_MAX_I + 1, "rows with i <= 60", &bad),
    );

    let bad: Vec<usize> = rows
        .iter()
        .filter(|r| {
            (1..=10i64).any(|x| {
                let unsigned = (0..=r.i()).rev().fold(BigRational::zero(), |acc, j| {
                    acc * int(x) + from_big(unsigned_from_row(r, j))
                });
                unsigned != falling_factorial(&int(x + r.i() as i64), r.i() as u64)
            })
        })
        .map(StirlingRow::i)
        .collect();
    rec.record(
        "unsigned row equals (x+i)_i at x = 1..10",
        bad.is_empty(),
        mismatch_detail(STIRLING_MAX_I + 1, "rows with i <= 60", &bad),
    );
}

fn mismatch_detail<T: std::fmt::Debug>(total: usize, what: &str, bad: &[T]) -> String {
    if bad.is_empty() {
        format!("{total} {what}")
    } else {
        let shown: Vec<&T> = bad.iter().take(5).collect();
        format!("{} of {total} {what} fail, first {:?}", bad.len(), shown)
    }
}

fn lemma_suite(rec: &mut Recorder<'_>) {
    let mut total = 0;
    let mut bad = Vec::new();
    for i in 0..=40 {
        for j in 0..=i {
            total += 1;
            if !check_bound_f(i, j).map(|c| c.holds).unwrap_or(false) {
                bad.push((i, j));
            }
        }
    }
    rec.record(
        "|s(i+2,j;1)| <= |s(i,j;1)| f(i)",
        bad.is_empty(),
        mismatch_detail(total, "pairs with 0 <= j <= i <= 40", &bad),
    );

    let (mut total, mut gated) = (0, 0);
    let (mut bad_eq, mut bad_bounds) = (Vec::new(), Vec::new());
    for n in 4..=40u64 {
        for i in 1..=n - 3 {
            total += 1;
            match check_lemma_p(i, n) {
                Ok(c) => {
                    if !c.equality {
                        bad_eq.push((i, n));
                    }
                    if let Some(b) = &c.bounds {
                        gated += 1;
                        if !b.holds() {
                            bad_bounds.push((i, n));
                        }
                    }
                }
                Err(_) => bad_eq.push((i, n)),
            }
        }
    }
    rec.record(
        "P_i(N) = (N-1)_{i+2} + h_i(N)",
        bad_eq.is_empty(),
        mismatch_detail(total, "pairs with 1 <= i <= N-3, N <= 40", &bad_eq),
    );
    rec.record(
        "2N^(i+3) > P_i(N) > (N-1)_{i+2} >= 0 and h_i(N) > 0 for i >= sqrt(2N)",
        bad_bounds.is_empty(),
        mismatch_detail(gated, "gated pairs with N <= 40", &bad_bounds),
    );

    let mut total = 0;
    let mut bad = Vec::new();
    for n in 1..=200u64 {
        let mut i = 0;
        while !at_or_above_sqrt_2n(i, n) {
            total += 1;
            if !check_product_bound(i, n).map(|c| c.holds).unwrap_or(false) {
                bad.push((i, n));
            }
            i += 1;
        }
    }
    rec.record(
        "prod_{j<=i} (1 + j/N) <= e^2 for i < sqrt(2N)",
        bad.is_empty(),
        mismatch_detail(total, "pairs with N <= 200", &bad),
    );
}

fn exact_sweep(max_n: u64, min_n: u64) -> impl Iterator<Item = Params> {
    (min_n..=max_n).flat_map(|n| {
        alpha_grid()
            .into_iter()
            .map(move |a| Params::with_alpha(n, a).expect("grid values are valid"))
    })
}

fn pmf_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    for family in [Family::Abelian, Family::Avalanche, Family::ShiftedAvalanche] {
        let mut total = 0;
        let mut bad = Vec::new();
        for params in exact_sweep(config.max_n, 1) {
            total += 1;
            if pmf_table(family, &params).total_exact() != Some(BigRational::one()) {
                bad.push((params.n(), params.alpha().cloned().map(|a| a.to_string())));
            }
        }
        rec.record(
            &format!("{family} probabilities sum to exactly 1"),
            bad.is_empty(),
            mismatch_detail(
                total,
                &format!("instances with N <= {}", config.max_n),
                &bad,
            ),
        );
    }

    for (n, tol) in [(1_000u64, 1e-10), (config.float_max_n, 1e-8)] {
        let params = FloatParams::with_alpha(n, 0.5).expect("valid");
        let worst = [Family::Abelian, Family::Avalanche, Family::ShiftedAvalanche]
            .iter()
            .map(|&f| {
                (pmf_table_float(f, &params)
                    .total_float()
                    .unwrap_or(f64::NAN)
                    - 1.0)
                    .abs()
            })
            .fold(0.0, f64::max);
        rec.record(
            &format!("float tables sum to 1 within {tol:e} at N = {n}"),
            worst <= tol,
            format!("largest deviation {worst:.3e}"),
        );
    }

    let mut worst: f64 = 0.0;
    for n in [10u64, 100, 1_000] {
        let params = Params::with_alpha(n, ratio(1, 2)).expect("valid");
        let fp = params.to_float();
        for family in [Family::Abelian, Family::Avalanche] {
            let exact = pmf_table(family, &params).probs_exact.unwrap_or_default();
            let float = pmf_table_float(family, &fp).probs_float.unwrap_or_default();
            for (e, f) in exact.iter().zip(&float) {
                let e = to_f64(e);
                if e > 0.0 {
                    worst = worst.max(((f - e) / e).abs());
                }
            }
        }
        let ev = abelian_variance(&params).expect("alpha given").variance;
        let fv = abelian_variance_f64(&fp).variance;
        worst = worst.max(((fv - to_f64(&ev)) / to_f64(&ev)).abs());
    }
    rec.record(
        "float PMFs and variance agree with exact within 1e-9 relative",
        worst <= 1e-9,
        format!("N in {{10, 100, 1000}}, alpha = 1/2, largest relative error {worst:.3e}"),
    );
}

fn moment_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    let (mut total, mut bad_second, mut bad_mean) = (0, Vec::new(), Vec::new());
    for params in exact_sweep(config.max_n, 1) {
        total += 1;
        let tag = (params.n(), params.alpha().map(|a| a.to_string()));
        let brute2 = brute_force_moment(Family::Abelian, &params, 2);
        if brute2.as_ref().ok() != Some(&abelian_second_moment(&params)) {
            bad_second.push(tag.clone());
        }
        let brute1 = brute_force_moment(Family::Abelian, &params, 1);
        if brute1.ok() != abelian_mean(&params).ok() {
            bad_mean.push(tag);
        }
    }
    let what = format!("instances with N <= {}", config.max_n);
    rec.record(
        "closed-form E(Z^2) equals direct sum",
        bad_second.is_empty(),
        mismatch_detail(total, &what, &bad_second),
    );
    rec.record(
        "E(Z) = N/(N-(N-1)alpha) equals direct sum",
        bad_mean.is_empty(),
        mismatch_detail(total, &what, &bad_mean),
    );

    let max_small = config.max_n.min(20);
    let (mut total, mut bad) = (0, Vec::new());
    for params in exact_sweep(max_small, 1) {
        total += 1;
        if brute_force_moment(Family::Avalanche, &params, 1).ok() != Some(avalanche_mean(&params)) {
            bad.push(params.n());
        }
    }
    rec.record(
        "E(X) = sum (N)_i p^i equals direct sum",
        bad.is_empty(),
        mismatch_detail(total, &format!("instances with N <= {max_small}"), &bad),
    );

    // p = alpha/(N+1) keeps Z_{N+1,p} a valid instance.
    let (mut total, mut bad) = (0, Vec::new());
    for n in 1..=max_small {
        for a in alpha_grid() {
            total += 1;
            let params = Params::new(n, a / int(n as i64 + 1)).expect("valid");
            let ex = brute_force_moment(Family::Avalanche, &params, 1);
            let ey = brute_force_moment(Family::ShiftedAvalanche, &params, 1);
            let via = shifted_mean_via_abelian(&params);
            let ok = match (ex, ey, via) {
                (Ok(x), Ok(y), Ok(v)) => y == x + BigRational::one() && v == y,
                _ => false,
            };
            if !ok {
                bad.push(n);
            }
        }
    }
    rec.record(
        "E(Y) = E(X) + 1 = (E(Z') - p E(Z'^2)) / C' with Z' = Z_{N+1,p}",
        bad.is_empty(),
        mismatch_detail(total, &format!("instances with N <= {max_small}"), &bad),
    );

    let (mut total, mut bad) = (0, Vec::new());
    for params in exact_sweep(config.max_n, 1) {
        total += 1;
        let ok = abelian_variance(&params)
            .map(|m| m.variance >= BigRational::zero())
            .unwrap_or(false);
        if !ok {
            bad.push(params.n());
        }
    }
    rec.record(
        "Var(Z) >= 0",
        bad.is_empty(),
        mismatch_detail(
            total,
            &format!("instances with N <= {}", config.max_n),
            &bad,
        ),
    );
}

fn decomposition_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    let max_n = config.max_n.min(20);
    let (mut total, mut bad) = (0, Vec::new());
    for params in exact_sweep(max_n, 2) {
        total += 1;
        let ok = j_decomposition(&params).map(|d| d.holds()).unwrap_or(false);
        if !ok {
            bad.push((params.n(), params.alpha().map(|a| a.to_string())));
        }
    }
    rec.record(
        "C(J1 - J2) = E(Z^2), J2 = J3 + J4, J4 = J5 + J6",
        bad.is_empty(),
        mismatch_detail(total, &format!("instances with 2 <= N <= {max_n}"), &bad),
    );
}

fn limit_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    let ns = [100u64, 1_000, config.float_max_n.max(1_001)];
    for alpha in [0.3, 0.5, 0.7] {
        let detail_and_ok = convergence_table(alpha, &ns).map(|rows| {
            let ok = rows.iter().all(|r| r.error.is_none())
                && rows.windows(2).all(|w| w[1].abs_error < w[0].abs_error);
            let errs: Vec<String> = rows
                .iter()
                .map(|r| format!("N={}: {:.3e}", r.n, r.abs_error))
                .collect();
            (ok, errs.join(", "))
        });
        let (ok, detail) = detail_and_ok.unwrap_or_else(|e| (false, e.to_string()));
        rec.record(
            &format!("|Var - alpha/(1-alpha)^3| decreases in N for alpha = {alpha}"),
            ok,
            detail,
        );
    }

    let n = config.float_max_n;
    let row = convergence_table(0.5, &[n])
        .ok()
        .and_then(|r| r.into_iter().next());
    let (ok, detail) = match row {
        Some(r) if r.error.is_none() => (
            r.abs_error < 0.05,
            format!(
                "variance {:.6} vs limit 4, error {:.3e}",
                r.variance, r.abs_error
            ),
        ),
        Some(r) => (false, r.error.unwrap_or_default()),
        None => (false, "no row".into()),
    };
    rec.record(
        &format!("alpha = 0.5, N = {n}: within 0.05 of 4"),
        ok,
        detail,
    );

    let v = FloatParams::with_alpha(1_000, 0.9).map(|p| abelian_variance_f64(&p).variance);
    let ok = matches!(v, Ok(x) if x.is_finite() && x > 0.0);
    rec.record(
        "alpha = 0.9, N = 1000: finite positive variance",
        ok,
        format!("{v:?}"),
    );
}

fn sampler_suite(config: &VerifyConfig, rec: &mut Recorder<'_>) {
    for n in [3u64, 5, 10] {
        let exact = Params::new(n, ratio(4, 5 * n as i64)).expect("valid");
        let fp = FloatParams::new(n, 0.8 / n as f64).expect("valid");
        let probs: Vec<f64> = pmf_table(Family::Avalanche, &exact)
            .probs_exact
            .unwrap_or_default()
            .iter()
            .map(to_f64)
            .collect();
        let stats: SampleStats = match monte_carlo(&fp, config.samples, config.seed) {
            Ok(s) => s,
            Err(e) => {
                rec.record(&format!("N = {n}, p = 0.8/N"), false, e.to_string());
                continue;
            }
        };
        let fit = stats.chi_square(&probs);
        rec.record(
            &format!("chi-square fit at N = {n}, p = 0.8/N not rejected at 1e-4"),
            fit.p_value > 1e-4,
            format!(
                "M = {}, seed = {}, statistic {:.3} on {} dof, p-value {:.4}",
                stats.samples, stats.seed, fit.statistic, fit.degrees_of_freedom, fit.p_value
            ),
        );
        let mean = to_f64(&avalanche_mean(&exact));
        let z = (stats.empirical_mean - mean) / stats.stderr_mean;
        rec.record(
            &format!("empirical mean at N = {n}, p = 0.8/N within 4 standard errors"),
            z.abs() < 4.0,
            format!(
                "mean {:.6} vs {:.6}, z = {z:.3}",
                stats.empirical_mean, mean
            ),
        );
        if n == 10 {
            let tv = stats.total_variation(&probs);
            rec.record(
                "total variation at N = 10, p = 0.08 below 0.005",
                tv < 0.005,
                format!("{tv:.3e}"),
            );
        }
    }
}
