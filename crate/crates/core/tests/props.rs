//! Property-based invariants over randomly generated states, channels and
//! distributions.

use num_complex::Complex64;
use proptest::prelude::*;

use q2pc::attack::ConditionalDistribution;
use q2pc::game::build_simplex_net;
use q2pc::proto::{input_state, JointDistribution};
use q2pc::qcore::linalg::CVector;
use q2pc::qcore::metrics::{fidelity, purified_distance};
use q2pc::qcore::selftest::RandomStates;
use q2pc::qcore::{PureState, RegisterSystem};
use std::collections::BTreeMap;

fn amplitude_vec(dim: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim)
}

fn to_state(label: &str, raw: &[(f64, f64)]) -> Option<PureState> {
    let mut v = CVector::from_iterator(raw.len(), raw.iter().map(|&(a, b)| Complex64::new(a, b)));
    let norm = v.norm();
    if norm < 1e-6 {
        return None;
    }
    v /= Complex64::new(norm, 0.0);
    PureState::new(RegisterSystem::single(label, raw.len()), v).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tensor_then_trace_recovers_factors(a in amplitude_vec(3), b in amplitude_vec(4)) {
        let (Some(sa), Some(sb)) = (to_state("A", &a), to_state("B", &b)) else {
            return Ok(());
        };
        let joint = sa.tensor(&sb).unwrap();
        let ra = joint.partial_trace(&["A"]).unwrap();
        let f = fidelity(&ra, &sa.to_density()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-9);
        let rb = joint.partial_trace(&["B"]).unwrap();
        let f = fidelity(&rb, &sb.to_density()).unwrap();
        prop_assert!((f - 1.0).abs() < 1e-9);
    }

    #[test]
    fn purified_distance_is_a_metric_sample(seed in 0u64..5000) {
        let mut rnd = RandomStates::new(seed);
        let sys = RegisterSystem::single("A", 4);
        let x = rnd.density(sys.clone());
        let y = rnd.density(sys.clone());
        let z = rnd.density(sys);
        let (xy, yz, xz) = (
            purified_distance(&x, &y).unwrap(),
            purified_distance(&y, &z).unwrap(),
            purified_distance(&x, &z).unwrap(),
        );
        prop_assert!(xz <= xy + yz + 1e-8);
        let yx = purified_distance(&y, &x).unwrap();
        prop_assert!((xy - yx).abs() < 1e-9);
        prop_assert!(purified_distance(&x, &x).unwrap() == 0.0);
    }

    #[test]
    fn random_channels_preserve_trace_and_positivity(seed in 0u64..5000, kraus in 1usize..4) {
        let mut rnd = RandomStates::new(seed);
        let sys = RegisterSystem::single("A", 4);
        let ch = rnd.channel(sys.clone(), kraus);
        let rho = rnd.density(sys);
        let out = ch.apply(&rho).unwrap();
        prop_assert!((out.trace().re - 1.0).abs() < 1e-9);
        prop_assert!(out.validate().is_ok());
    }

    #[test]
    fn input_state_marginal_matches_distribution(
        raw in prop::collection::vec(0.0f64..1.0, 6)
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(total > 1e-6);
        let p = JointDistribution::from_flat(2, 3, &raw).unwrap();
        let psi = input_state(&p).unwrap();
        let uv = psi.partial_trace(&["U", "V"]).unwrap();
        for u in 0..2 {
            for v in 0..3 {
                let idx = uv.system().index_of(&[u, v]);
                prop_assert!((uv.matrix()[(idx, idx)].re - p.prob(u, v)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn net_covers_random_distributions(
        w in 2usize..5,
        eps in 0.15f64..0.6,
        raw in prop::collection::vec(0.001f64..1.0, 8)
    ) {
        let net = build_simplex_net(w, eps, 1_000_000).unwrap();
        let total: f64 = raw[..w].iter().sum();
        let p: Vec<f64> = raw[..w].iter().map(|x| x / total).collect();
        prop_assert!(net.covering_distance(&p) <= eps + 1e-12);
    }

    #[test]
    fn conditional_mix_stays_normalized(w0 in 0.0f64..1.0) {
        let rows = |bias: f64| {
            let mut table = BTreeMap::new();
            table.insert(
                vec![0usize],
                BTreeMap::from([(0usize, bias), (1usize, 1.0 - bias)]),
            );
            ConditionalDistribution::new(table).unwrap()
        };
        let a = rows(0.25);
        let b = rows(0.75);
        let mixed = ConditionalDistribution::mix(&[(w0, &a), (1.0 - w0, &b)]).unwrap();
        let row = mixed.row(&[0]).unwrap();
        let total: f64 = row.values().sum();
        prop_assert!((total - 1.0).abs() < 1e-9);
        let expect = w0 * 0.25 + (1.0 - w0) * 0.75;
        prop_assert!((mixed.prob(&[0], 0) - expect).abs() < 1e-9);
    }
}
