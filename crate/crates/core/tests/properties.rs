use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use slocc::canonical::FourQubitFamily;
use slocc::critical::orbit_dimension;
use slocc::flow::{flow_operators, flow_step, flow_to_critical, one_param_limit, slocc_distance, stratum_label};
use slocc::linalg::{c, random_sl, random_unitary};
use slocc::momentum::{momentum, mu_norm_sq, psi};
use slocc::morse::{fd_morse_index, morse_index, CRITICAL_TOL};
use slocc::statespace::{apply_local, boson_pair, max_entangled, normalize, w_state, LocalOperator, StateDocument};
use slocc::{FlowConfig, PureState, Sector};

fn sector(pick: usize) -> Sector {
    match pick % 6 {
        0 => Sector::qubits(3),
        1 => Sector::qubits(4),
        2 => Sector::distinguishable(2, 3).unwrap(),
        3 => Sector::bosonic(3, 3).unwrap(),
        4 => Sector::fermionic(2, 5).unwrap(),
        _ => Sector::bosonic(5, 2).unwrap(),
    }
}

fn random_slocc(v: &PureState, rng: &mut ChaCha8Rng) -> PureState {
    let s = v.sector();
    let ops = LocalOperator::per_party((0..s.momentum_blocks()).map(|_| random_sl(s.local_dim, rng)));
    normalize(&apply_local(&ops, v).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_step_is_a_group_element(seed in any::<u64>(), pick in 0usize..6, step in 0.001f64..0.1) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = PureState::random(sector(pick), &mut rng);
        let ops = flow_operators(&momentum(&v).unwrap(), step);
        for op in &ops {
            prop_assert!((op.matrix.determinant() - c(1.0, 0.0)).norm() < 1e-10);
        }
        let direct = normalize(&apply_local(&ops, &v).unwrap()).unwrap();
        let stepped = flow_step(&v, step).unwrap();
        prop_assert!(stepped.ray_distance(&direct) < 1e-10);
        prop_assert!(mu_norm_sq(&stepped).unwrap() <= mu_norm_sq(&v).unwrap() + 1e-12);
    }

    #[test]
    fn w_distance_is_slocc_invariant(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = random_slocc(&w_state(3), &mut rng);
        let d = slocc_distance(&v, &FlowConfig::default()).unwrap();
        prop_assert!((d - (1.0f64 / 6.0).sqrt()).abs() < 1e-5);
        let label = stratum_label(&v, &FlowConfig::default()).unwrap();
        for s in &label.spectra {
            prop_assert!((s[0] - 1.0 / 6.0).abs() < 1e-5);
        }
    }

    #[test]
    fn terminal_lambda_is_mu_norm_sq(seed in any::<u64>(), pick in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = PureState::random(sector(pick), &mut rng);
        let cfg = FlowConfig { step_size: 0.1, max_iterations: 20_000, ..FlowConfig::default() };
        if let Ok(trace) = flow_to_critical(&v, &cfg) {
            let t = &trace.terminal;
            let (lambda, _) = slocc::flow::lambda_and_gradient(t).unwrap();
            prop_assert!((lambda - mu_norm_sq(t).unwrap()).abs() < 1e-8);
            prop_assert!(trace.max_increase() <= 1e-12);
        }
    }

    #[test]
    fn orbit_dimension_and_spectra_are_unitarily_invariant(seed in any::<u64>(), pick in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s = sector(pick);
        let v = PureState::random(s, &mut rng);
        let us = LocalOperator::per_party((0..s.momentum_blocks()).map(|_| random_unitary(s.local_dim, &mut rng)));
        let u = apply_local(&us, &v).unwrap();
        prop_assert_eq!(orbit_dimension(&u).unwrap(), orbit_dimension(&v).unwrap());
        prop_assert!(psi(&u).unwrap().max_abs_diff(&psi(&v).unwrap()) < 1e-10);
    }

    #[test]
    fn morse_index_is_unitarily_invariant_and_matches_oracle(seed in any::<u64>(), n in 2usize..5, k in 1usize..5) {
        prop_assume!(k <= n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in [max_entangled(n, k).unwrap(), boson_pair(n, k).unwrap()] {
            let s = v.sector();
            let us = LocalOperator::per_party((0..s.momentum_blocks()).map(|_| random_unitary(n, &mut rng)));
            let u = apply_local(&us, &v).unwrap();
            let idx = morse_index(&u, CRITICAL_TOL).unwrap();
            prop_assert_eq!(idx, morse_index(&v, CRITICAL_TOL).unwrap());
            prop_assert_eq!(idx % 2, 0);
            prop_assert_eq!(idx, fd_morse_index(&u, 1e-4).unwrap());
        }
    }

    #[test]
    fn limit_subgroups_fix_the_span_part(params in proptest::collection::vec(0.2f64..2.0, 3)) {
        // The L_a2b2 subgroup weights |0011⟩ and |1100⟩ by e^{±2t}; it fixes no span part.
        for fam in FourQubitFamily::ALL.into_iter().filter(|&f| f != FourQubitFamily::La2b2) {
            let (v, _) = fam.parts(&params[..fam.param_count()]).unwrap();
            let v = PureState::new(Sector::qubits(4), v).unwrap();
            let lim = one_param_limit(&v, &fam.limit_exponents(), 20.0, 9).unwrap();
            prop_assert!(lim.limit.ray_distance(&v) < 1e-10);
            prop_assert!(lim.residuals.iter().all(|r| r.1 < 1e-10));
            prop_assert!(mu_norm_sq(&lim.limit).unwrap() < 1e-12);
        }
    }

    #[test]
    fn state_documents_roundtrip(seed in any::<u64>(), pick in 0usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = PureState::random(sector(pick), &mut rng);
        let back = StateDocument::from_json(&StateDocument::to_json(&v)).unwrap();
        prop_assert_eq!(back.sector(), v.sector());
        prop_assert!((back.amplitudes() - v.amplitudes()).norm() < 1e-15);
    }
}
