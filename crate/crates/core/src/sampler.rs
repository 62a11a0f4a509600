//! Monte Carlo sampling of the Avalanche distribution through the recursive
//! uniform construction.
//!
//! Draw `U_1, ..., U_N` uniform on `[0, 1)` and set `ε_0 = 1`. With
//! `T_k = ε_0 + ... + ε_k`, `ε_k` counts the uniforms in
//! `[1 - p T_{k-1}, 1 - p T_{k-2})` (with `T_{-1} = 0`), and
//! `S = ε_1 + ... + ε_N` has the Avalanche distribution `X_{N,p}`. The
//! intervals are consecutive and half-open, so no uniform is counted twice,
//! and once some `ε_k` is zero every later interval is empty.
//!
//! # Streams
//!
//! [`monte_carlo`] splits the `M` draws into chunks of [`CHUNK_DRAWS`]. Chunk
//! `c` (counting from zero) draws from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)` and switched to stream `c` via
//! `set_stream(c)`. Chunks run in parallel and their histograms are added, so
//! the result depends only on `(N, p, M, seed)`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::dist::FloatParams;
use crate::error::{Error, Result};

/// Draws per substream in [`monte_carlo`].
pub const CHUNK_DRAWS: u64 = 1 << 16;

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 20_140_301;

/// One run of the construction with the uniforms that drove it.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsilonTrace {
    pub n: u64,
    pub p: f64,
    pub uniforms: Vec<f64>,
    /// `ε_1, ..., ε_N`.
    pub epsilons: Vec<u64>,
    pub total: u64,
}

impl EpsilonTrace {
    /// `[lo, hi)` counted by `ε_k`, for `k = 1..=N`.
    pub fn intervals(&self) -> Vec<(f64, f64)> {
        let mut cumulative = 1u64;
        let mut hi = 1.0;
        self.epsilons
            .iter()
            .map(|&eps| {
                let lo = lower_edge(self.p, cumulative);
                let out = (lo, hi);
                hi = lo;
                cumulative += eps;
                out
            })
            .collect()
    }

    /// Once an `ε_k` vanishes every later one does too.
    pub fn zero_is_absorbing(&self) -> bool {
        self.epsilons
            .iter()
            .skip_while(|&&e| e != 0)
            .all(|&e| e == 0)
    }
}

fn lower_edge(p: f64, cumulative: u64) -> f64 {
    1.0 - p * cumulative as f64
}

fn check_uniforms(n: u64, uniforms: &[f64]) -> Result<()> {
    if uniforms.len() as u64 != n {
        return Err(Error::UniformCount {
            expected: n as usize,
            got: uniforms.len(),
        });
    }
    if let Some((index, &value)) = uniforms
        .iter()
        .enumerate()
        .find(|(_, u)| !(0.0..1.0).contains(*u))
    {
        return Err(Error::UniformRange { index, value });
    }
    Ok(())
}

/// Runs the construction literally on the given uniforms.
pub fn epsilon_sequence(params: &FloatParams, uniforms: &[f64]) -> Result<EpsilonTrace> {
    let n = params.n();
    let p = params.p();
    check_uniforms(n, uniforms)?;

    let mut epsilons = vec![0u64; n as usize];
    let mut cumulative = 1u64;
    let mut hi = 1.0;
    for slot in epsilons.iter_mut() {
        let lo = lower_edge(p, cumulative);
        let count = uniforms.iter().filter(|&&u| u >= lo && u < hi).count() as u64;
        if count == 0 {
            break;
        }
        *slot = count;
        cumulative += count;
        hi = lo;
    }
    let total = epsilons.iter().sum();
    Ok(EpsilonTrace {
        n,
        p,
        uniforms: uniforms.to_vec(),
        epsilons,
        total,
    })
}

/// `S` for uniforms already sorted in descending order. Each step consumes
/// the uniforms at or above the current lower edge; those above the upper
/// edge were consumed by earlier steps.
fn total_from_sorted(p: f64, sorted_desc: &[f64]) -> u64 {
    let mut cumulative = 1u64;
    let mut taken = 0usize;
    loop {
        let lo = lower_edge(p, cumulative);
        let count = sorted_desc[taken..]
            .iter()
            .take_while(|&&u| u >= lo)
            .count();
        if count == 0 {
            return cumulative - 1;
        }
        taken += count;
        cumulative += count as u64;
    }
}

/// Reusable single-threaded sampler; holds the uniform buffer.
#[derive(Clone, Debug)]
pub struct AvalancheSampler {
    params: FloatParams,
    buffer: Vec<f64>,
}

impl AvalancheSampler {
    pub fn new(params: FloatParams) -> Self {
        AvalancheSampler {
            params,
            buffer: Vec::with_capacity(params.n() as usize),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> u64 {
        self.buffer.clear();
        self.buffer
            .extend((0..self.params.n()).map(|_| rng.random::<f64>()));
        self.buffer.sort_unstable_by(|a, b| b.total_cmp(a));
        total_from_sorted(self.params.p(), &self.buffer)
    }
}

/// One draw of `S`, in `{0, ..., N}`.
pub fn sample_avalanche<R: Rng + ?Sized>(params: &FloatParams, rng: &mut R) -> u64 {
    AvalancheSampler::new(*params).sample(rng)
}

/// Generator for chunk `stream` under `seed`; see the module docs.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: u64,
    pub p: f64,
    pub samples: u64,
    pub seed: u64,
    pub empirical_mean: f64,
    pub empirical_variance: f64,
    pub stderr_mean: f64,
    /// Draw counts keyed by value; absent keys were never drawn.
    pub empirical_pmf: BTreeMap<u64, u64>,
}

impl SampleStats {
    /// Statistics from a histogram of draws.
    pub fn from_counts(params: &FloatParams, seed: u64, counts: BTreeMap<u64, u64>) -> Self {
        let samples: u64 = counts.values().sum();
        let m = samples as f64;
        let mean = counts
            .iter()
            .map(|(&b, &c)| b as f64 * c as f64)
            .sum::<f64>()
            / m;
        let variance = if samples > 1 {
            counts
                .iter()
                .map(|(&b, &c)| c as f64 * (b as f64 - mean).powi(2))
                .sum::<f64>()
                / (m - 1.0)
        } else {
            0.0
        };
        SampleStats {
            n: params.n(),
            p: params.p(),
            samples,
            seed,
            empirical_mean: mean,
            empirical_variance: variance,
            stderr_mean: (variance / m).sqrt(),
            empirical_pmf: counts,
        }
    }

    /// Pools two runs over the same parameters. Only the counts matter, so
    /// merging is associative and commutative; the seed of `self` is kept.
    pub fn merge(&self, other: &SampleStats) -> SampleStats {
        let mut counts = self.empirical_pmf.clone();
        for (&b, &c) in &other.empirical_pmf {
            *counts.entry(b).or_default() += c;
        }
        let params = FloatParams::new(self.n, self.p).expect("stats carry validated params");
        SampleStats::from_counts(&params, self.seed, counts)
    }

    /// Empirical probabilities over `{0, ..., N}`.
    pub fn frequencies(&self) -> Vec<f64> {
        let m = self.samples as f64;
        (0..=self.n)
            .map(|b| *self.empirical_pmf.get(&b).unwrap_or(&0) as f64 / m)
            .collect()
    }

    /// `1/2 Σ |f_b - q_b|` against `expected` indexed by `b = 0..=N`.
    pub fn total_variation(&self, expected: &[f64]) -> f64 {
        0.5 * self
            .frequencies()
            .iter()
            .zip(expected)
            .map(|(f, q)| (f - q).abs())
            .sum::<f64>()
    }

    /// Pearson goodness of fit against `expected` indexed by `b = 0..=N`.
    pub fn chi_square(&self, expected: &[f64]) -> ChiSquareFit {
        let observed: Vec<u64> = (0..=self.n)
            .map(|b| *self.empirical_pmf.get(&b).unwrap_or(&0))
            .collect();
        chi_square_fit(&observed, expected)
    }
}

/// `M` draws of `S` spread over [`CHUNK_DRAWS`]-sized substreams.
pub fn monte_carlo(params: &FloatParams, samples: u64, seed: u64) -> Result<SampleStats> {
    if samples == 0 {
        return Err(Error::Precondition(
            "at least one sample is required".into(),
        ));
    }
    let width = params.n() as usize + 1;
    let chunks = samples.div_ceil(CHUNK_DRAWS);
    let histogram = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let draws = CHUNK_DRAWS.min(samples - chunk * CHUNK_DRAWS);
            let mut rng = substream(seed, chunk);
            let mut sampler = AvalancheSampler::new(*params);
            let mut hist = vec![0u64; width];
            for _ in 0..draws {
                hist[sampler.sample(&mut rng) as usize] += 1;
            }
            hist
        })
        .reduce(
            || vec![0u64; width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let counts = histogram
        .into_iter()
        .enumerate()
        .filter(|(_, c)| *c > 0)
        .map(|(b, c)| (b as u64, c))
        .collect();
    Ok(SampleStats::from_counts(params, seed, counts))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareFit {
    pub statistic: f64,
    pub degrees_of_freedom: u64,
    pub p_value: f64,
}

/// Minimum expected count per bin; sparser neighbouring bins are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson statistic with adjacent bins pooled until each expects at least
/// [`MIN_EXPECTED`] draws.
pub fn chi_square_fit(observed: &[u64], expected_probs: &[f64]) -> ChiSquareFit {
    let total: u64 = observed.iter().sum();
    let m = total as f64;
    let mut groups: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for (&o, &q) in observed.iter().zip(expected_probs) {
        obs += o as f64;
        exp += q * m;
        if exp >= MIN_EXPECTED {
            groups.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    if exp > 0.0 || obs > 0.0 {
        match groups.last_mut() {
            Some(last) => {
                last.0 += obs;
                last.1 += exp;
            }
            None => groups.push((obs, exp)),
        }
    }
    let statistic: f64 = groups.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = groups.len().saturating_sub(1) as u64;
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64)
            .map(|d| d.sf(statistic))
            .unwrap_or(f64::NAN)
    };
    ChiSquareFit {
        statistic,
        degrees_of_freedom: dof,
        p_value,
    }
}
