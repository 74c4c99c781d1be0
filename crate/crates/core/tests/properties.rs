mod common;

use std::f64::consts::TAU;

use noisy_vqe::ansatz::AnsatzKind;
use noisy_vqe::noise::{amplitude_damping_channel, depolarizing_channel, phase_damping_channel};
use noisy_vqe::sim::{DensityMatrix, GateOp, QuantumState, Statevector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::N;

fn circuit(max_len: usize) -> impl Strategy<Value = Vec<GateOp>> {
    (any::<u64>(), 1..max_len).prop_map(|(seed, len)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..len).map(|_| common::random_gate(&mut rng)).collect()
    })
}

fn ansatz() -> impl Strategy<Value = AnsatzKind> {
    prop_oneof![Just(AnsatzKind::Rxyz), Just(AnsatzKind::Ry), Just(AnsatzKind::Uccsd)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn kraus_completeness(p in 0.0..=1.0f64, eps in 0.0..=1.0f64) {
        common::kraus_completeness(p, eps).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn channels_keep_states_physical(gates in circuit(12), p in 0.0..=1.0f64) {
        let mut rho = DensityMatrix::zero(N);
        rho.apply_gates(&gates).unwrap();
        rho.apply_channel(&depolarizing_channel(2, p).unwrap(), &[0, 2]).unwrap();
        rho.apply_channel(&amplitude_damping_channel(p, 0.3).unwrap(), &[1]).unwrap();
        rho.apply_channel(&phase_damping_channel(p).unwrap(), &[3]).unwrap();
        prop_assert!((rho.trace() - 1.0).abs() < 1e-10);
        prop_assert!(rho.is_hermitian(1e-10));
        prop_assert!(rho.min_eigenvalue() > -1e-10);
    }

    #[test]
    fn statevector_density_equivalence(gates in circuit(30)) {
        common::statevector_density_equivalence(&gates).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn decomposition_preserves_action(gates in circuit(10)) {
        let mut direct = Statevector::zero(N);
        direct.apply_gates(&gates).unwrap();
        let expanded: Vec<GateOp> = gates.iter().flat_map(GateOp::decompose).collect();
        let mut staged = Statevector::zero(N);
        staged.apply_gates(&expanded).unwrap();
        prop_assert!((direct.inner(&staged).norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn parameter_shift_matches_finite_difference(kind in ansatz(), seed in any::<u64>()) {
        common::gradient_agreement(kind, seed).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn nft_one_step_minimizes_sinusoid(a in 0.1..3.0f64, b in -TAU..TAU, c in -2.0..2.0f64, x0 in -TAU..TAU) {
        common::nft_one_step(a, b, c, x0).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn sampled_estimates_are_unbiased(seed in any::<u64>(), p in 0.0..0.2f64) {
        common::sampled_unbiased(seed, p, 200).map_err(TestCaseError::fail)?;
    }
}
