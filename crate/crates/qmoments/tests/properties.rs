//! Property tests over randomly seeded states: structural invariants that
//! must hold for every input, not just the reference states.

use proptest::prelude::*;

use qmoments::bloch::{bloch_decomposition, pauli_coefficients, sector_lengths};
use qmoments::linalg::{
    eigvals_hermitian, fidelity, partial_trace, partial_transpose, SubsystemShape,
};
use qmoments::protocol::stream_rng;
use qmoments::states::{ghzw_mix, random_density_matrix};
use qmoments::tomography::{records_from_csv, records_to_csv, simulate_tomography_counts};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partial_trace_chain_matches_direct(seed in 0u64..1u64 << 48) {
        let mut rng = stream_rng(seed, 90, 0);
        let shape = SubsystemShape::new(vec![2, 2, 3]).unwrap();
        let rho = random_density_matrix(&shape, 5, &mut rng);
        let two_step = partial_trace(&partial_trace(&rho, &[0, 2]).unwrap(), &[1]).unwrap();
        let direct = partial_trace(&rho, &[2]).unwrap();
        prop_assert!(two_step.matrix().max_abs_diff(direct.matrix()) < 1e-12);
    }

    #[test]
    fn partial_transpose_preserves_trace_and_hermiticity(seed in 0u64..1u64 << 48) {
        let mut rng = stream_rng(seed, 91, 0);
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        let rho = random_density_matrix(&shape, 4, &mut rng);
        let pt = partial_transpose(&rho, 1).unwrap();
        prop_assert!((pt.trace().re - 1.0).abs() < 1e-12);
        prop_assert!(pt.trace().im.abs() < 1e-12);
        prop_assert!(pt.is_hermitian(1e-12));
        // Eigenvalues still sum to the trace.
        let evs = eigvals_hermitian(&pt).unwrap();
        prop_assert!((evs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fidelity_symmetric_on_random_pairs(seed in 0u64..1u64 << 48) {
        let mut rng = stream_rng(seed, 92, 0);
        let shape = SubsystemShape::qubits(2);
        let a = random_density_matrix(&shape, 3, &mut rng);
        let b = random_density_matrix(&shape, 4, &mut rng);
        let f_ab = fidelity(&a, &b).unwrap();
        let f_ba = fidelity(&b, &a).unwrap();
        prop_assert!((f_ab - f_ba).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&f_ab));
    }

    #[test]
    fn purity_identity_three_qubits(seed in 0u64..1u64 << 48) {
        let mut rng = stream_rng(seed, 93, 0);
        let rho = random_density_matrix(&SubsystemShape::qubits(3), 6, &mut rng);
        let (a1, a2, a3) = sector_lengths(&pauli_coefficients(&rho).unwrap());
        prop_assert!((1.0 + a1 + a2 + a3 - 8.0 * rho.purity()).abs() < 1e-9);
    }

    #[test]
    fn purity_identity_two_qutrits(seed in 0u64..1u64 << 48) {
        let mut rng = stream_rng(seed, 94, 0);
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        let rho = random_density_matrix(&shape, 5, &mut rng);
        let b = bloch_decomposition(&rho).unwrap();
        let lhs = 1.0 + b.alpha_norm_sq() + b.beta_norm_sq() + b.t.gram_trace();
        prop_assert!((lhs - 9.0 * rho.purity()).abs() < 1e-9);
    }

    #[test]
    fn ghzw_mixture_is_symmetric_subspace(g in 0.0f64..=1.0) {
        let rho = ghzw_mix(g).unwrap();
        let shape = SubsystemShape::qubits(3);
        for (a, b) in [(0usize, 1usize), (1, 2), (0, 2)] {
            let f = qmoments::states::flip_operator(a, b, &shape).unwrap();
            prop_assert!(f.mul(rho.matrix()).max_abs_diff(rho.matrix()) < 1e-12);
        }
    }

    #[test]
    fn count_records_csv_round_trip(seed in 0u64..1u64 << 48, shots in 1u64..500) {
        let rho = qmoments::states::chessboard_state();
        let records = simulate_tomography_counts(&rho, shots, 0.04, seed).unwrap();
        let parsed = records_from_csv(&records_to_csv(&records)).unwrap();
        prop_assert_eq!(records, parsed);
    }
}
