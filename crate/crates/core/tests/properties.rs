use std::sync::Arc;

use ctx_core::classical::{self, DEFAULT_ENUMERATION_CAP as CAP};
use ctx_core::paradox::{self, PrBoxForm};
use ctx_core::quantum::{self, OddCycleParams};
use ctx_core::rational::{self, int, ratio};
use ctx_core::{inequality, io, sampling, Scenario};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn cycle(n: usize, l: usize) -> Arc<Scenario> {
    Arc::new(Scenario::n_cycle(n, l).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn cycle_detector_agrees_with_enumeration(n in 3usize..=7, l in 2usize..=3, seed: u64) {
        let s = cycle(n, l);
        let pb = sampling::random_nd_possibilistic(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let oracle = classical::is_logically_contextual(&pb, CAP).unwrap();
        let cert = paradox::detect_cycle_paradox(&pb).unwrap();
        prop_assert_eq!(cert.is_some(), oracle.contextual);
        if let Some(c) = cert {
            prop_assert!(c.validate(&pb).is_ok());
            // The witness really is off every loop.
            let (covered, _) = classical::covered_entries(&pb, CAP).unwrap();
            let ctx = c.view.contexts[c.base];
            let (a, b) = c.witness;
            let o = if c.view.reversed[c.base] { [b, a] } else { [a, b] };
            prop_assert!(!covered[ctx][s.encode(ctx, &o)]);
        }
    }

    #[test]
    fn bell_detector_agrees_with_enumeration(seed: u64) {
        let s = Arc::new(Scenario::bipartite_bell(3, 2).unwrap());
        let pb = sampling::random_nd_possibilistic(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let oracle = classical::is_logically_contextual(&pb, CAP).unwrap().contextual;
        prop_assert_eq!(paradox::detect_bell22_paradox(&pb).unwrap().is_some(), oracle);
    }

    #[test]
    fn noncontextual_collapses_are_not_lc(n in 3usize..=6, l in 2usize..=3, k in 1usize..=5, seed: u64) {
        let s = cycle(n, l);
        let (b, _) = sampling::deterministic_mixture(&s, &mut ChaCha8Rng::seed_from_u64(seed), k);
        prop_assert!(classical::is_noncontextual(&b, CAP).unwrap().is_some());
        prop_assert!(!classical::is_logically_contextual(&b.collapse(), CAP).unwrap().contextual);
    }

    #[test]
    fn contextual_fraction_is_zero_exactly_for_nc(n in 3usize..=5, seed: u64) {
        let s = cycle(n, 2);
        let b = sampling::random_nd_behavior(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let cf = classical::contextual_fraction(&b, CAP).unwrap();
        prop_assert!(cf >= int(0) && cf <= int(1));
        prop_assert_eq!(cf == int(0), classical::is_noncontextual(&b, CAP).unwrap().is_some());
        if classical::is_strongly_contextual(&b.collapse(), CAP).unwrap() {
            prop_assert_eq!(cf, int(1));
        }
    }

    #[test]
    fn parity_trick_matches_brute_force(n in 3usize..=8, seed: u64) {
        let s = cycle(n, 2);
        let b = sampling::random_nd_behavior(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let report = inequality::evaluate_all(&b).unwrap();
        prop_assert_eq!(report.max_value, inequality::brute_force_max(&b).unwrap());
    }

    #[test]
    fn pr_forms_round_trip(n in 3usize..=9, k in 0usize..9, bits in proptest::collection::vec(0usize..2, 9)) {
        let k = k % n;
        let mut a = bits[..n].to_vec();
        a[0] = 0;
        let form = PrBoxForm::new(k, a).unwrap();
        let pb = form.possibilistic();
        prop_assert!(classical::is_strongly_contextual(&pb, CAP).unwrap());
        let back = paradox::classify_strong_contextuality(&pb).unwrap().unwrap();
        prop_assert_eq!(back.possibilistic(), pb);
    }

    #[test]
    fn behavior_json_round_trips(n in 3usize..=6, l in 2usize..=3, seed: u64) {
        let s = cycle(n, l);
        let b = sampling::random_nd_behavior(&s, &mut ChaCha8Rng::seed_from_u64(seed));
        let text = io::behavior_to_value(&b, None).to_string();
        let back = io::behavior_from_value(serde_json::from_str(&text).unwrap(), "p", None).unwrap();
        prop_assert_eq!(back.data, io::BehaviorData::Probabilistic(b));
    }

    #[test]
    fn rationals_print_and_parse(num in -10_000i64..10_000, den in 1i64..10_000) {
        let r = ratio(num, den);
        prop_assert_eq!(rational::parse(&rational::format(&r)).unwrap(), r);
    }

    #[test]
    fn odd_constructions_are_exactly_nondisturbing(
        phi in 0.05f64..3.09,
        thetas in proptest::collection::vec(0.05f64..3.09, 3),
        n in prop::sample::select(vec![5usize, 7, 9]),
    ) {
        let params = OddCycleParams::from_angles(n, phi, thetas[..(n - 3) / 2].to_vec()).unwrap();
        if let Ok(c) = quantum::build_odd_cycle(&params) {
            prop_assert!(c.behavior.is_nondisturbing());
            let report = inequality::evaluate_all(&c.behavior).unwrap();
            prop_assert!(report.max_value_f64 <= report.quantum_bound + 1e-9);
        }
    }
}

#[test]
fn trees_admit_only_noncontextual_behaviors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for n in 2..=7 {
        let s = sampling::random_tree(n, 2, &mut rng);
        for _ in 0..10 {
            let b = sampling::random_nd_behavior(&s, &mut rng);
            assert!(classical::is_noncontextual(&b, CAP).unwrap().is_some());
        }
    }
}
