//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//! Each criterion is checked through direct library calls, independent of the
//! `verify` suites, except the determinism criterion which drives the binary.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use abeliand::dist::float::{pmf_table_float, FloatParams};
use abeliand::dist::{
    abelian_mean, abelian_second_moment, avalanche_mean, brute_force_moment, convergence_table,
    j_decomposition, pmf_table, Family, Params,
};
use abeliand::rational::{int, ratio, to_f64};
use abeliand::sampler::{monte_carlo, DEFAULT_SEED};
use abeliand::stirling::{
    at_or_above_sqrt_2n, check_bound_f, check_lemma_p, check_product_bound, falling_factorial,
    stirling_row, unsigned_stirling, unsigned_stirling_subset_oracle,
};
use abeliand::{BigInt, BigRational};
use num_traits::One;

type Outcome = Result<String, String>;

fn alpha_grid() -> Vec<BigRational> {
    (1..=9).map(|k| ratio(k, 10)).collect()
}

fn sweep(lo: u64, hi: u64) -> impl Iterator<Item = Params> {
    (lo..=hi).flat_map(|n| {
        alpha_grid()
            .into_iter()
            .map(move |a| Params::with_alpha(n, a).unwrap())
    })
}

fn within(started: Instant, limit: Duration, detail: String) -> Outcome {
    let took = started.elapsed();
    if took < limit {
        Ok(format!("{detail}; {:.2}s", took.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}; took {:.2}s, limit {}s",
            took.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn second_moment_identity() -> Outcome {
    let started = Instant::now();
    let mut cases = 0;
    for params in sweep(2, 25) {
        let closed = abelian_second_moment(&params);
        let direct = brute_force_moment(Family::Abelian, &params, 2).map_err(|e| e.to_string())?;
        if closed != direct {
            return Err(format!(
                "N={} alpha={} differs",
                params.n(),
                params.effective_alpha()
            ));
        }
        cases += 1;
    }
    within(
        started,
        Duration::from_secs(10),
        format!("{cases} cases equal exactly"),
    )
}

fn normalization() -> Outcome {
    let families = [Family::Abelian, Family::Avalanche, Family::ShiftedAvalanche];
    let mut cases = 0;
    for params in sweep(2, 25) {
        for family in families {
            if pmf_table(family, &params).total_exact() != Some(BigRational::one()) {
                return Err(format!("{family} N={} does not sum to 1", params.n()));
            }
            cases += 1;
        }
    }
    let mut worst = [0.0f64; 2];
    for (slot, (n, tol)) in [(1_000u64, 1e-10), (100_000, 1e-8)].into_iter().enumerate() {
        for alpha in [0.1, 0.5, 0.9] {
            let params = FloatParams::with_alpha(n, alpha).unwrap();
            for family in families {
                let total = pmf_table_float(family, &params).total_float().unwrap();
                let err = (total - 1.0).abs();
                if !(err < tol) {
                    return Err(format!("{family} N={n} alpha={alpha}: |sum-1| = {err:e}"));
                }
                worst[slot] = worst[slot].max(err);
            }
        }
    }
    Ok(format!(
        "{cases} exact tables; float |sum-1| <= {:.1e} at N=1e3, {:.1e} at N=1e5",
        worst[0], worst[1]
    ))
}

fn mean_formulas() -> Outcome {
    let mut cases = 0;
    for params in sweep(2, 25) {
        let abelian = abelian_mean(&params).map_err(|e| e.to_string())?;
        if abelian != brute_force_moment(Family::Abelian, &params, 1).unwrap() {
            return Err(format!("abelian mean N={}", params.n()));
        }
        if avalanche_mean(&params) != brute_force_moment(Family::Avalanche, &params, 1).unwrap() {
            return Err(format!("avalanche mean N={}", params.n()));
        }
        cases += 1;
    }
    Ok(format!("{cases} cases, both means exact"))
}

fn decomposition() -> Outcome {
    let mut cases = 0;
    for params in sweep(2, 20) {
        let d = j_decomposition(&params).map_err(|e| e.to_string())?;
        let second = abelian_second_moment(&params);
        let ok = &d.c * (&d.j1 - &d.j2) == second && d.j2 == &d.j3 + &d.j4 && d.j4 == &d.j5 + &d.j6;
        if !ok {
            return Err(format!(
                "N={} alpha={}",
                params.n(),
                params.effective_alpha()
            ));
        }
        cases += 1;
    }
    Ok(format!("{cases} cases, three identities exact"))
}

fn variance_limit() -> Outcome {
    let started = Instant::now();
    let ns = [100, 1_000, 10_000];
    let mut notes = Vec::new();
    for alpha in [0.3, 0.5, 0.7] {
        let rows = convergence_table(alpha, &ns).map_err(|e| e.to_string())?;
        let errs: Vec<f64> = rows.iter().map(|r| r.abs_error).collect();
        if !errs.windows(2).all(|w| w[1] < w[0]) {
            return Err(format!(
                "alpha={alpha}: errors {errs:?} not strictly decreasing"
            ));
        }
        if alpha == 0.5 && !(errs[2] < 0.05) {
            return Err(format!("alpha=0.5 N=1e4 error {}", errs[2]));
        }
        notes.push(format!("alpha={alpha} err(1e4)={:.2e}", errs[2]));
    }
    within(started, Duration::from_secs(5), notes.join(", "))
}

fn stirling_suites() -> Outcome {
    let mut pairs = 0;
    for i in 1..=12 {
        for j in 1..=i {
            if unsigned_stirling_subset_oracle(i, j).unwrap() != unsigned_stirling(i, j).unwrap() {
                return Err(format!("subset oracle differs at ({i},{j})"));
            }
            pairs += 1;
        }
    }
    for i in 0..=60usize {
        let row = stirling_row(i);
        if row.get(i) != BigInt::one() {
            return Err(format!("s({i},{i};1) != 1"));
        }
        if i >= 1 && row.get(i - 1) != BigInt::from(-((i * (i + 1) / 2) as i64)) {
            return Err(format!("s({i},{};1) != -i(i+1)/2", i - 1));
        }
        for x in 1..=10i64 {
            if row.eval_unsigned(&int(x)) != falling_factorial(&int(x + i as i64), i as u64) {
                return Err(format!("unsigned identity fails at i={i} x={x}"));
            }
        }
    }
    Ok(format!(
        "{pairs} oracle pairs; diagonal, subdiagonal and unsigned identities for i <= 60"
    ))
}

fn lemma_bounds() -> Outcome {
    let mut count = [0usize; 4];
    for i in 0..=40 {
        for j in 0..=i {
            if !check_bound_f(i, j).map_err(|e| e.to_string())?.holds {
                return Err(format!("f bound fails at ({i},{j})"));
            }
            count[0] += 1;
        }
    }
    for n in 4..=40u64 {
        for i in 1..=n - 3 {
            let c = check_lemma_p(i, n).map_err(|e| e.to_string())?;
            if !c.equality {
                return Err(format!("P equality fails at i={i} N={n}"));
            }
            count[1] += 1;
            if at_or_above_sqrt_2n(i, n) {
                if !c.holds() {
                    return Err(format!("P bounds fail at i={i} N={n}"));
                }
                count[2] += 1;
            }
        }
    }
    for n in 1..=200u64 {
        let mut i = 0;
        while !at_or_above_sqrt_2n(i + 1, n) {
            i += 1;
        }
        for k in 0..=i {
            if !check_product_bound(k, n).map_err(|e| e.to_string())?.holds {
                return Err(format!("product bound fails at i={k} N={n}"));
            }
            count[3] += 1;
        }
    }
    Ok(format!(
        "{} f-bounds, {} P equalities, {} gated P bounds, {} product bounds",
        count[0], count[1], count[2], count[3]
    ))
}

fn sampler_fidelity() -> Outcome {
    let started = Instant::now();
    let exact = Params::new(10, ratio(2, 25)).unwrap();
    let expected: Vec<f64> = pmf_table(Family::Avalanche, &exact)
        .probs_exact
        .unwrap()
        .iter()
        .map(to_f64)
        .collect();
    let lemma_mean = to_f64(&avalanche_mean(&exact));
    let stats = monte_carlo(
        &FloatParams::new(10, 0.08).unwrap(),
        1_000_000,
        DEFAULT_SEED,
    )
    .map_err(|e| e.to_string())?;
    let tv = stats.total_variation(&expected);
    let z = (stats.empirical_mean - lemma_mean) / stats.stderr_mean;
    let detail = format!("seed {DEFAULT_SEED}, TV {tv:.2e}, mean z-score {z:.2}");
    if !(tv < 0.005) || !(z.abs() < 4.0) {
        return Err(detail);
    }
    within(started, Duration::from_secs(30), detail)
}

fn run_bin(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_abeliand"))
        .args(args)
        .env_remove("ABELIAND_SEED")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!("{args:?} exited with {:?}", out.status.code()));
    }
    Ok(out.stdout)
}

fn determinism() -> Outcome {
    let runs: [&[&str]; 2] = [
        &["verify"],
        &[
            "sample",
            "--N",
            "10",
            "--p",
            "0.08",
            "--samples",
            "1000000",
            "--seed",
            "20140301",
        ],
    ];
    for args in runs {
        let a = run_bin(args)?;
        let b = run_bin(args)?;
        if a != b {
            return Err(format!("{} output differs between runs", args[0]));
        }
    }
    Ok("verify and sample outputs byte-identical across runs".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        (
            "exact second moment equals direct sum",
            second_moment_identity,
        ),
        ("pmf normalization", normalization),
        ("mean formulas", mean_formulas),
        ("second-moment decomposition", decomposition),
        ("variance limit convergence", variance_limit),
        ("stirling identities", stirling_suites),
        ("lemma bounds", lemma_bounds),
        ("sampler fidelity", sampler_fidelity),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {} {name}: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
