use abeliand::dist::float::{abelian_variance_f64, pmf_f64};
use abeliand::dist::{
    abelian_mean, abelian_second_moment, avalanche_mean, brute_force_moment, j_decomposition,
    pmf_table, Family, Params,
};
use abeliand::rational::{int, ratio, to_f64};
use abeliand::sampler::{epsilon_sequence, AvalancheSampler};
use abeliand::stirling::{
    at_or_above_sqrt_2n, check_bound_f, check_lemma_p, check_product_bound, falling_factorial,
    stirling_row, unsigned_stirling, unsigned_stirling_subset_oracle,
};
use abeliand::BigRational;
use num_traits::One;
use proptest::prelude::*;
use rand::rand_core::{impls, RngCore};

// Exact rational p strictly inside (0, 1/N).
fn params_strategy(max_n: u64) -> impl Strategy<Value = Params> {
    (1..=max_n, 1i64..1000).prop_map(|(n, k)| Params::new(n, ratio(k, 1000 * n as i64)).unwrap())
}

fn alpha_params_strategy(min_n: u64, max_n: u64) -> impl Strategy<Value = Params> {
    (min_n..=max_n, 1i64..100).prop_map(|(n, k)| Params::with_alpha(n, ratio(k, 100)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn row_evaluates_to_shifted_falling_factorial(i in 0usize..=60, x in -30i64..=90) {
        let row = stirling_row(i);
        prop_assert_eq!(row.eval(&int(x)), falling_factorial(&int(x - 1), i as u64));
    }

    #[test]
    fn unsigned_row_evaluates_to_rising_product(i in 0usize..=60, x in 1i64..=10) {
        let row = stirling_row(i);
        prop_assert_eq!(row.eval_unsigned(&int(x)), falling_factorial(&int(x + i as i64), i as u64));
    }

    #[test]
    fn subset_oracle_agrees((i, j) in (1usize..=12).prop_flat_map(|i| (Just(i), 1..=i))) {
        prop_assert_eq!(unsigned_stirling_subset_oracle(i, j).unwrap(), unsigned_stirling(i, j).unwrap());
    }

    #[test]
    fn bound_f_holds((i, j) in (0usize..=40).prop_flat_map(|i| (Just(i), 0..=i))) {
        prop_assert!(check_bound_f(i, j).unwrap().holds);
    }

    #[test]
    fn lemma_p_holds((n, i) in (4u64..=40).prop_flat_map(|n| (Just(n), 1..=n - 3))) {
        let c = check_lemma_p(i, n).unwrap();
        prop_assert!(c.equality);
        prop_assert_eq!(c.bounds.is_some(), at_or_above_sqrt_2n(i, n));
        prop_assert!(c.holds());
    }

    #[test]
    fn product_bound_holds(n in 1u64..=200, frac in 0.0f64..1.0) {
        let mut top = 0;
        while !at_or_above_sqrt_2n(top + 1, n) {
            top += 1;
        }
        let i = ((top as f64 + 1.0) * frac) as u64;
        prop_assert!(check_product_bound(i.min(top), n).unwrap().holds);
    }

    #[test]
    fn tables_normalize_exactly(params in params_strategy(15)) {
        for family in [Family::Abelian, Family::Avalanche, Family::ShiftedAvalanche] {
            let table = pmf_table(family, &params);
            prop_assert_eq!(table.total_exact(), Some(BigRational::one()));
            prop_assert!(table.probs_exact.unwrap().iter().all(|q| *q >= int(0)));
        }
    }

    #[test]
    fn closed_forms_match_direct_sums(params in params_strategy(15)) {
        prop_assert_eq!(
            abelian_second_moment(&params),
            brute_force_moment(Family::Abelian, &params, 2).unwrap()
        );
        prop_assert_eq!(
            avalanche_mean(&params),
            brute_force_moment(Family::Avalanche, &params, 1).unwrap()
        );
        let with_alpha = Params::with_alpha(params.n(), params.effective_alpha()).unwrap();
        prop_assert_eq!(
            abelian_mean(&with_alpha).unwrap(),
            brute_force_moment(Family::Abelian, &params, 1).unwrap()
        );
    }

    #[test]
    fn decomposition_identities(params in alpha_params_strategy(2, 14)) {
        let d = j_decomposition(&params).unwrap();
        prop_assert!(d.j2_splits());
        prop_assert!(d.j4_splits());
        prop_assert!(d.reproduces_second_moment());
    }

    #[test]
    fn float_agrees_with_exact(params in alpha_params_strategy(1, 60)) {
        let fp = params.to_float();
        for family in [Family::Abelian, Family::Avalanche] {
            let table = pmf_table(family, &params);
            for (b, q) in table.support.iter().zip(table.probs_exact.unwrap()) {
                let exact = to_f64(&q);
                let float = pmf_f64(family, &fp, *b as i64).unwrap();
                prop_assert!(((float - exact) / exact).abs() < 1e-10, "{} b={} {} {}", family, b, float, exact);
            }
        }
        let exact = to_f64(&abelian_second_moment(&params));
        let float = abelian_variance_f64(&fp).second_moment;
        prop_assert!(((float - exact) / exact).abs() < 1e-12);
    }
}

/// Feeds a fixed list of 53-bit uniforms through `Rng::random::<f64>()`.
struct Replay {
    words: Vec<u64>,
    next: usize,
}

impl RngCore for Replay {
    fn next_u32(&mut self) -> u32 {
        self.next_u64() as u32
    }

    fn next_u64(&mut self) -> u64 {
        let w = self.words[self.next];
        self.next += 1;
        w << 11
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        impls::fill_bytes_via_next(self, dst)
    }
}

fn trace_strategy() -> impl Strategy<Value = (u64, f64, Vec<u64>)> {
    (1u64..=12, 0.01f64..0.999).prop_flat_map(|(n, frac)| {
        (
            Just(n),
            Just(frac / n as f64),
            prop::collection::vec(0u64..(1 << 53), n as usize),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn epsilon_trace_invariants((n, p, words) in trace_strategy()) {
        let params = abeliand::dist::FloatParams::new(n, p).unwrap();
        let uniforms: Vec<f64> = words.iter().map(|&k| k as f64 / (1u64 << 53) as f64).collect();
        let trace = epsilon_sequence(&params, &uniforms).unwrap();

        prop_assert!(trace.total <= n);
        prop_assert_eq!(trace.total, trace.epsilons.iter().sum::<u64>());
        prop_assert!(trace.zero_is_absorbing());

        // Consecutive half-open intervals: each uniform lies in at most one,
        // and the ones inside their union are exactly the counted ones.
        let intervals = trace.intervals();
        for w in intervals.windows(2) {
            prop_assert!(w[1].1 == w[0].0 && w[1].0 <= w[1].1);
        }
        let mut inside = 0u64;
        for u in &uniforms {
            let hits = intervals.iter().filter(|(lo, hi)| u >= lo && u < hi).count();
            prop_assert!(hits <= 1);
            inside += hits as u64;
        }
        prop_assert_eq!(inside, trace.total);
        let length: f64 = intervals.iter().map(|(lo, hi)| hi - lo).sum();
        prop_assert!(length <= p * (1 + trace.total) as f64 + 1e-12);
        prop_assert!(length < 1.0 + p);

        // The sorted sweep used for sampling gives the same total.
        let mut rng = Replay { words: words.clone(), next: 0 };
        let mut sampler = AvalancheSampler::new(params);
        prop_assert_eq!(sampler.sample(&mut rng), trace.total);
    }
}
