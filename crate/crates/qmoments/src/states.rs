//! Constructors for the states and unitaries used by the experiments:
//! GHZ, W and their mixtures, the chessboard family with white noise, and
//! the two-qutrit source state with its preparation unitaries.

use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{kron, C64, ComplexMatrix, DensityMatrix, PureState, SubsystemShape};
use crate::{Error, Result};

fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// Three-qubit GHZ state `(|000⟩ + |111⟩)/√2`.
pub fn ghz3() -> PureState {
    let mut amp = vec![re(0.0); 8];
    amp[0] = re(1.0 / 2.0_f64.sqrt());
    amp[7] = re(1.0 / 2.0_f64.sqrt());
    PureState::new(amp, SubsystemShape::qubits(3)).expect("ghz is normalized")
}

/// Three-qubit W state `(|001⟩ + |010⟩ + |100⟩)/√3`.
pub fn w3() -> PureState {
    let c = re(1.0 / 3.0_f64.sqrt());
    let mut amp = vec![re(0.0); 8];
    amp[0b001] = c;
    amp[0b010] = c;
    amp[0b100] = c;
    PureState::new(amp, SubsystemShape::qubits(3)).expect("w is normalized")
}

/// Mixture `g·|GHZ⟩⟨GHZ| + (1-g)·|W⟩⟨W|`.
pub fn ghzw_mix(g: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::InvalidParameter(format!("mixing weight g={g} outside [0,1]")));
    }
    ghz3().to_density().mix(&w3().to_density(), g)
}

/// Swap operator exchanging two parties of equal local dimension.
pub fn flip_operator(a: usize, b: usize, shape: &SubsystemShape) -> Result<ComplexMatrix> {
    shape.check_party(a)?;
    shape.check_party(b)?;
    if a == b {
        return Err(Error::InvalidParameter("flip needs two distinct parties".into()));
    }
    if shape.dims()[a] != shape.dims()[b] {
        return Err(Error::ShapeMismatch(format!(
            "cannot swap parties of dimension {} and {}",
            shape.dims()[a],
            shape.dims()[b]
        )));
    }
    let d = shape.total_dim();
    let mut f = ComplexMatrix::zeros(d, d);
    for col in 0..d {
        let mut multi = shape.multi(col);
        multi.swap(a, b);
        f[(shape.flat(&multi), col)] = re(1.0);
    }
    Ok(f)
}

/// The four two-qutrit kets spanning the chessboard state, in order.
pub fn chessboard_vectors() -> [PureState; 4] {
    let shape = SubsystemShape::new(vec![3, 3]).unwrap();
    let s = 1.0 / 6.0_f64.sqrt();
    let build = |entries: &[(usize, usize, f64)]| {
        let mut amp = vec![re(0.0); 9];
        for &(l, r, v) in entries {
            amp[l * 3 + r] = re(v * s);
        }
        PureState::new(amp, shape.clone()).expect("chessboard kets are normalized")
    };
    [
        build(&[(0, 0, 1.0), (2, 0, 2.0), (1, 1, 1.0)]),
        build(&[(0, 1, -1.0), (2, 1, 2.0), (1, 0, 1.0)]),
        build(&[(0, 0, -1.0), (0, 2, 2.0), (1, 1, 1.0)]),
        build(&[(1, 0, 1.0), (1, 2, 2.0), (0, 1, 1.0)]),
    ]
}

/// Rank-4 two-qutrit chessboard state, `(1/4) Σ |Vᵢ⟩⟨Vᵢ|`.
pub fn chessboard_state() -> DensityMatrix {
    let vs = chessboard_vectors();
    let shape = vs[0].shape().clone();
    let mut mat = ComplexMatrix::zeros(9, 9);
    for v in &vs {
        mat = mat.add(&v.to_density().matrix().scale(re(0.25)));
    }
    DensityMatrix::trusted(mat, shape)
}

/// Chessboard state mixed with white noise, `(1-p)·ρ_ch + p·I/9`.
///
/// The noise term is the maximally mixed state of the 9-dimensional
/// two-qutrit space, which keeps the result unit trace.
pub fn noisy_chessboard(p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParameter(format!("noise level p={p} outside [0,1]")));
    }
    let mixed = DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
    chessboard_state().mix(&mixed, 1.0 - p)
}

/// Hyper-entangled source state `√(5/6)|00⟩ + √(1/6)|11⟩` on two qutrits.
pub fn source_state() -> PureState {
    let mut amp = vec![re(0.0); 9];
    amp[0] = re((5.0 / 6.0_f64).sqrt());
    amp[4] = re((1.0 / 6.0_f64).sqrt());
    PureState::new(amp, SubsystemShape::new(vec![3, 3]).unwrap()).expect("source is normalized")
}

/// The three local unitaries that map the source state onto the chessboard
/// kets.
pub fn prep_unitaries() -> (ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let a = (1.0 / 5.0_f64).sqrt();
    let b = (4.0 / 5.0_f64).sqrt();
    let u1 = ComplexMatrix::from_real_rows(&[
        &[0.0, 1.0, 0.0],
        &[1.0, 0.0, 0.0],
        &[0.0, 0.0, 1.0],
    ]);
    let u2 = ComplexMatrix::from_real_rows(&[&[a, 0.0, b], &[0.0, 1.0, 0.0], &[b, 0.0, -a]]);
    let u3 = ComplexMatrix::from_real_rows(&[&[-a, 0.0, b], &[0.0, 1.0, 0.0], &[b, 0.0, a]]);
    (u1, u2, u3)
}

/// Chessboard ket `Vᵢ` (1-based) obtained by local operations on the source
/// state. Agrees with [`chessboard_vectors`] up to a global phase.
pub fn chessboard_vector_from_source(i: usize) -> Result<PureState> {
    let (u1, u2, u3) = prep_unitaries();
    let id = ComplexMatrix::identity(3);
    let op = match i {
        1 => kron(&u2, &id),
        2 => kron(&u3, &u1),
        3 => kron(&id, &u3),
        4 => kron(&u1, &u2),
        _ => return Err(Error::InvalidParameter(format!("ket index {i} outside 1..=4"))),
    };
    source_state().apply(&op)
}

/// Complex Ginibre matrix with i.i.d. standard normal entries.
pub fn random_ginibre(rows: usize, cols: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-random pure state on the given shape.
pub fn random_pure_state(shape: &SubsystemShape, rng: &mut impl Rng) -> PureState {
    let d = shape.total_dim();
    let g = random_ginibre(d, 1, rng);
    let amp: Vec<C64> = (0..d).map(|i| g[(i, 0)]).collect();
    PureState::normalized(amp, shape.clone()).expect("ginibre vector is nonzero a.s.")
}

/// Random density matrix of the given rank, `G G† / tr(G G†)` for a Ginibre
/// `G`.
pub fn random_density_matrix(
    shape: &SubsystemShape,
    rank: usize,
    rng: &mut impl Rng,
) -> DensityMatrix {
    let d = shape.total_dim();
    let g = random_ginibre(d, rank.clamp(1, d), rng);
    let m = g.mul(&g.adjoint());
    let tr = m.trace().re;
    DensityMatrix::trusted(m.scale(re(1.0 / tr)), shape.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{eigvals_hermitian, partial_trace, partial_transpose};
    use approx::assert_abs_diff_eq;

    #[test]
    fn ghz_and_w_are_normalized_and_orthogonal() {
        let ghz = ghz3();
        let w = w3();
        assert_abs_diff_eq!(ghz.inner(&ghz).re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(ghz.inner(&w).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ghz_single_party_reduction_is_maximally_mixed() {
        let red = partial_trace(&ghz3().to_density(), &[1]).unwrap();
        assert_abs_diff_eq!(red.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(red.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn ghzw_mix_endpoints() {
        let g1 = ghzw_mix(1.0).unwrap();
        assert!(g1.matrix().max_abs_diff(ghz3().to_density().matrix()) < 1e-15);
        let g0 = ghzw_mix(0.0).unwrap();
        assert!(g0.matrix().max_abs_diff(w3().to_density().matrix()) < 1e-15);
        assert!(ghzw_mix(-0.1).is_err());
        assert!(ghzw_mix(1.1).is_err());
    }

    #[test]
    fn ghzw_mix_half_has_two_equal_eigenvalues() {
        let rho = ghzw_mix(0.5).unwrap();
        let evs = eigvals_hermitian(rho.matrix()).unwrap();
        assert_abs_diff_eq!(evs[7], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(evs[6], 0.5, epsilon = 1e-12);
        for v in &evs[..6] {
            assert_abs_diff_eq!(*v, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn flip_swaps_basis_states() {
        let shape = SubsystemShape::qubits(2);
        let f = flip_operator(0, 1, &shape).unwrap();
        // F|01⟩ = |10⟩.
        let v01 = vec![re(0.0), re(1.0), re(0.0), re(0.0)];
        let out = f.mul_vec(&v01);
        assert_abs_diff_eq!(out[2].re, 1.0, epsilon = 1e-15);
        // F² = I.
        assert!(f.mul(&f).max_abs_diff(&ComplexMatrix::identity(4)) < 1e-15);
        // Symmetric input unchanged.
        let sym = vec![re(1.0), re(0.0), re(0.0), re(0.0)];
        assert_abs_diff_eq!(f.mul_vec(&sym)[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn flip_rejects_bad_parties() {
        let shape = SubsystemShape::new(vec![2, 3]).unwrap();
        assert!(flip_operator(0, 0, &SubsystemShape::qubits(2)).is_err());
        assert!(flip_operator(0, 2, &SubsystemShape::qubits(2)).is_err());
        assert!(flip_operator(0, 1, &shape).is_err());
    }

    #[test]
    fn ghzw_family_lives_in_symmetric_subspace() {
        let shape = SubsystemShape::qubits(3);
        for &g in &[0.0, 0.25, 0.5, 0.75, 1.0] {
            let rho = ghzw_mix(g).unwrap();
            for &(a, b) in &[(0usize, 1usize), (1, 2), (0, 2)] {
                let f = flip_operator(a, b, &shape).unwrap();
                let left = f.mul(rho.matrix());
                let right = rho.matrix().mul(&f);
                assert!(left.max_abs_diff(rho.matrix()) < 1e-12);
                assert!(right.max_abs_diff(rho.matrix()) < 1e-12);
            }
        }
    }

    #[test]
    fn chessboard_kets_are_orthonormal() {
        let vs = chessboard_vectors();
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(vs[i].inner(&vs[j]).norm(), expect, epsilon = 1e-14);
            }
        }
        // Component of V4 on |12⟩ is 2/√6.
        assert_abs_diff_eq!(
            vs[3].amplitudes()[1 * 3 + 2].re,
            2.0 / 6.0_f64.sqrt(),
            epsilon = 1e-15
        );
        // Component check for V1: (1+4+1)/6 = 1 split as written.
        assert_abs_diff_eq!(vs[0].amplitudes()[0].re, 1.0 / 6.0_f64.sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn chessboard_state_is_rank_four_and_ppt() {
        let rho = chessboard_state();
        assert_abs_diff_eq!(rho.matrix().trace().re, 1.0, epsilon = 1e-14);
        let evs = eigvals_hermitian(rho.matrix()).unwrap();
        let rank = evs.iter().filter(|&&v| v > 1e-10).count();
        assert_eq!(rank, 4);
        let pt = partial_transpose(&rho, 0).unwrap();
        let pt_evs = eigvals_hermitian(&pt).unwrap();
        assert!(pt_evs[0] >= -1e-10, "chessboard state must be PPT, got {}", pt_evs[0]);
    }

    #[test]
    fn noisy_chessboard_endpoints_and_ppt() {
        let p0 = noisy_chessboard(0.0).unwrap();
        assert!(p0.matrix().max_abs_diff(chessboard_state().matrix()) < 1e-15);
        let p1 = noisy_chessboard(1.0).unwrap();
        for i in 0..9 {
            assert_abs_diff_eq!(p1.matrix()[(i, i)].re, 1.0 / 9.0, epsilon = 1e-15);
        }
        assert!(noisy_chessboard(1.5).is_err());
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let rho = noisy_chessboard(p).unwrap();
            let pt = partial_transpose(&rho, 0).unwrap();
            let evs = eigvals_hermitian(&pt).unwrap();
            assert!(evs[0] >= -1e-10, "PPT broken at p={p}: {}", evs[0]);
        }
    }

    #[test]
    fn prep_unitaries_are_unitary() {
        let (u1, u2, u3) = prep_unitaries();
        let id = ComplexMatrix::identity(3);
        for u in [&u1, &u2, &u3] {
            assert!(u.mul(&u.adjoint()).max_abs_diff(&id) < 1e-12);
        }
    }

    #[test]
    fn source_state_maps_onto_chessboard_kets() {
        let vs = chessboard_vectors();
        for i in 1..=4 {
            let from_source = chessboard_vector_from_source(i).unwrap();
            let overlap = from_source.inner(&vs[i - 1]).norm();
            assert_abs_diff_eq!(overlap, 1.0, epsilon = 1e-10);
        }
        assert!(chessboard_vector_from_source(0).is_err());
        assert!(chessboard_vector_from_source(5).is_err());
    }

    #[test]
    fn chessboard_state_rebuilt_from_source_kets() {
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        let mut mat = ComplexMatrix::zeros(9, 9);
        for i in 1..=4 {
            let v = chessboard_vector_from_source(i).unwrap();
            mat = mat.add(&v.to_density().matrix().scale(re(0.25)));
        }
        let rebuilt = DensityMatrix::new(mat, shape).unwrap();
        assert!(rebuilt.matrix().max_abs_diff(chessboard_state().matrix()) < 1e-10);
    }
}
