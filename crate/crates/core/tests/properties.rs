//! Property tests for structural invariants.

use hogwild_gibbs::coupling::{greedy_couple, hamming, FiniteDistribution};
use hogwild_gibbs::hogwild::{run_hogwild_simulated, DelayModel};
use hogwild_gibbs::model::{Configuration, Graph, IsingModel};
use hogwild_gibbs::rng::RngStream;
use hogwild_gibbs::sampler::run_sequential;
use hogwild_gibbs::stats::{expand, MultilinearFunction};
use proptest::prelude::*;

fn arb_graph_model() -> impl Strategy<Value = IsingModel> {
    // Random simple graph on up to 8 nodes with random weights in [-1, 1].
    (2usize..=8)
        .prop_flat_map(|n| {
            let all_pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let m = all_pairs.len();
            (
                Just(n),
                Just(all_pairs),
                prop::collection::vec(prop::bool::ANY, m),
                prop::collection::vec(-1.0f64..1.0, m),
            )
        })
        .prop_map(|(n, pairs, keep, weights)| {
            let edges: Vec<(usize, usize)> = pairs
                .iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(e, _)| *e)
                .collect();
            let w: Vec<f64> = weights
                .iter()
                .zip(&keep)
                .filter(|(_, k)| **k)
                .map(|(w, _)| *w)
                .collect();
            IsingModel::zero_field(Graph::new(n, edges).unwrap(), w).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_weight_flip_symmetry(model in arb_graph_model(), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0).rng();
        let x = Configuration::random(model.n(), &mut rng);
        let a = model.log_weight(&x).unwrap();
        let b = model.log_weight(&x.negated()).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn bilinear_identity(n in 2usize..40, seed in any::<u64>()) {
        let f = MultilinearFunction::complete_bilinear(n).unwrap();
        let mut rng = RngStream::new(seed, 1).rng();
        let x = Configuration::random(n, &mut rng);
        let s: f64 = x.spins().iter().map(|v| f64::from(*v)).sum();
        prop_assert!((f.eval(&x).unwrap() - (s * s - n as f64)).abs() < 1e-9);
    }

    #[test]
    fn hamming_is_a_bounded_metric(n in 1usize..30, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 2).rng();
        let x = Configuration::random(n, &mut rng);
        let y = Configuration::random(n, &mut rng);
        let z = Configuration::random(n, &mut rng);
        let dxy = hamming(&x, &y).unwrap();
        prop_assert!(dxy <= n);
        prop_assert_eq!(dxy, hamming(&y, &x).unwrap());
        prop_assert_eq!(hamming(&x, &x).unwrap(), 0);
        prop_assert!(dxy <= hamming(&x, &z).unwrap() + hamming(&z, &y).unwrap());
    }

    #[test]
    fn canonicalize_expand_round_trip(
        subsets in prop::collection::btree_map(
            prop::collection::btree_set(0usize..6, 0..4),
            -3.0f64..3.0,
            1..5,
        )
    ) {
        let terms: Vec<(Vec<usize>, f64)> = subsets
            .iter()
            .map(|(s, c)| (s.iter().copied().collect(), *c))
            .collect();
        let f = MultilinearFunction::new(terms).unwrap();
        let back = expand(&f).unwrap().canonicalize().unwrap();
        prop_assert_eq!(back.num_terms(), f.num_terms());
        for (subset, coeff) in f.terms() {
            let got = back.coefficient(subset);
            prop_assert!((got - coeff).abs() < 1e-12 * coeff.abs().max(1.0));
        }
    }

    #[test]
    fn greedy_couple_states_in_range(
        raw_p in prop::collection::vec(0.01f64..1.0, 2..6),
        raw_q in prop::collection::vec(0.01f64..1.0, 2..6),
        u in 0.0f64..1.0,
    ) {
        let k = raw_p.len().min(raw_q.len());
        let norm = |v: &[f64]| {
            let total: f64 = v[..k].iter().sum();
            FiniteDistribution::new(v[..k].iter().map(|x| x / total).collect()).unwrap()
        };
        let p = norm(&raw_p);
        let q = norm(&raw_q);
        let (a, b) = greedy_couple(&p, &q, u).unwrap();
        prop_assert!(a < k && b < k);
        // Same u against the same distribution always agrees.
        let (c, d) = greedy_couple(&p, &p, u).unwrap();
        prop_assert_eq!(c, d);
    }

    #[test]
    fn zero_delay_equivalence_generalizes(seed in any::<u64>(), k in 3usize..5) {
        let model = IsingModel::torus_grid(k, 0.5).unwrap();
        let stream = RngStream::new(seed, 9);
        let seq = run_sequential(&model, 2_000, None, stream);
        let (hog, _) =
            run_hogwild_simulated(&model, 2_000, &DelayModel::constant(0), None, stream);
        prop_assert_eq!(seq.config(), &hog);
    }
}
