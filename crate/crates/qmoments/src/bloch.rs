//! Operator-basis decompositions: the local Pauli expansion of three-qubit
//! states and the generalized Bloch decomposition of two-qudit states.
//!
//! The qudit basis is the Gell-Mann construction rescaled so that
//! `tr(λᵢλⱼ) = d·δᵢⱼ`; all correlation-moment formulas in this crate assume
//! that convention. Basis ordering: symmetric off-diagonal pairs first
//! (lexicographic), then antisymmetric pairs, then diagonal elements.

use num_complex::Complex;

use crate::linalg::{kron, singular_values, C64, ComplexMatrix, DensityMatrix, SubsystemShape};
use crate::{Error, Result};

fn re(x: f64) -> C64 {
    Complex::new(x, 0.0)
}

/// The single-qubit Pauli basis `[I, σx, σy, σz]`.
pub fn pauli_matrices() -> [ComplexMatrix; 4] {
    let id = ComplexMatrix::identity(2);
    let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let y = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => re(0.0),
    });
    let z = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
    [id, x, y, z]
}

/// The 64 real coefficients of a three-qubit state in the local Pauli basis,
/// `α_ijk = tr(ρ · σᵢ⊗σⱼ⊗σₖ)`.
#[derive(Clone, Debug)]
pub struct PauliCoefficients {
    alpha: Vec<f64>,
}

impl PauliCoefficients {
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.alpha[(i * 4 + j) * 4 + k]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.alpha
    }

    /// Number of non-identity factors of the `(i,j,k)` label.
    fn weight(i: usize, j: usize, k: usize) -> usize {
        [i, j, k].iter().filter(|&&x| x != 0).count()
    }
}

/// Pauli coefficients of a three-qubit state.
pub fn pauli_coefficients(rho: &DensityMatrix) -> Result<PauliCoefficients> {
    if rho.shape().dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(format!(
            "expected a three-qubit state, got shape {:?}",
            rho.shape().dims()
        )));
    }
    let paulis = pauli_matrices();
    let mut alpha = Vec::with_capacity(64);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let op = kron(&kron(&paulis[i], &paulis[j]), &paulis[k]);
                let val = rho.matrix().mul(&op).trace();
                debug_assert!(val.im.abs() < 1e-10);
                alpha.push(val.re);
            }
        }
    }
    Ok(PauliCoefficients { alpha })
}

/// Rebuilds the state from its Pauli coefficients, `(1/8) Σ α_ijk σᵢ⊗σⱼ⊗σₖ`.
pub fn density_from_pauli(coeffs: &PauliCoefficients) -> Result<DensityMatrix> {
    let paulis = pauli_matrices();
    let mut mat = ComplexMatrix::zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let c = coeffs.get(i, j, k);
                if c == 0.0 {
                    continue;
                }
                let op = kron(&kron(&paulis[i], &paulis[j]), &paulis[k]);
                mat = mat.add(&op.scale(re(c / 8.0)));
            }
        }
    }
    DensityMatrix::new(mat, SubsystemShape::qubits(3))
}

/// Sector lengths `(A₁, A₂, A₃)`: summed squared Pauli coefficients of
/// weight 1, 2 and 3.
pub fn sector_lengths(coeffs: &PauliCoefficients) -> (f64, f64, f64) {
    let mut a = [0.0f64; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let w = PauliCoefficients::weight(i, j, k);
                if w > 0 {
                    let c = coeffs.get(i, j, k);
                    a[w] += c * c;
                }
            }
        }
    }
    (a[1], a[2], a[3])
}

/// Hermitian traceless operator basis normalized to `tr(λᵢλⱼ) = d·δᵢⱼ`.
#[derive(Clone, Debug)]
pub struct GellMannBasis {
    d: usize,
    lambdas: Vec<ComplexMatrix>,
}

impl GellMannBasis {
    pub fn dimension(&self) -> usize {
        self.d
    }

    /// The `d²-1` basis operators.
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.lambdas
    }
}

/// Gell-Mann basis of dimension `d`, rescaled from the textbook
/// `tr(λᵢλⱼ) = 2δᵢⱼ` normalization by `√(d/2)`.
pub fn gell_mann_basis(d: usize) -> Result<GellMannBasis> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("basis dimension {d} must be >= 2")));
    }
    let scale = (d as f64 / 2.0).sqrt();
    let mut lambdas = Vec::with_capacity(d * d - 1);
    // Symmetric off-diagonal pairs.
    for x in 0..d {
        for y in (x + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(x, y)] = re(scale);
            m[(y, x)] = re(scale);
            lambdas.push(m);
        }
    }
    // Antisymmetric pairs.
    for x in 0..d {
        for y in (x + 1)..d {
            let mut m = ComplexMatrix::zeros(d, d);
            m[(x, y)] = C64::new(0.0, -scale);
            m[(y, x)] = C64::new(0.0, scale);
            lambdas.push(m);
        }
    }
    // Diagonal elements.
    for l in 1..d {
        let norm = (2.0 / (l as f64 * (l + 1) as f64)).sqrt() * scale;
        let mut m = ComplexMatrix::zeros(d, d);
        for j in 0..l {
            m[(j, j)] = re(norm);
        }
        m[(l, l)] = re(-(l as f64) * norm);
        lambdas.push(m);
    }
    Ok(GellMannBasis { d, lambdas })
}

/// Real correlation matrix `T_ij = tr(ρ · λᵢ⊗λⱼ)` of a two-qudit state.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrelationMatrix {
    n: usize,
    data: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::ShapeMismatch(format!(
                "correlation matrix needs {} entries, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(Self { n, data })
    }

    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    /// `tr(T Tᵀ)`, the squared Frobenius norm.
    pub fn gram_trace(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// `tr((T Tᵀ)²)`.
    pub fn gram_trace_sq(&self) -> f64 {
        let n = self.n;
        let mut g = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.get(i, k) * self.get(j, k);
                }
                g[i * n + j] = acc;
            }
        }
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                total += g[i * n + j] * g[j * n + i];
            }
        }
        total
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let m = ComplexMatrix::from_fn(self.n, self.n, |i, j| re(self.get(i, j)));
        singular_values(&m)
    }

    /// Sum of singular values.
    pub fn trace_norm(&self) -> f64 {
        self.singular_values().iter().sum()
    }
}

/// Generalized Bloch decomposition of a two-qudit state with equal local
/// dimensions: local Bloch vectors `α`, `β` and correlation matrix `T`.
#[derive(Clone, Debug)]
pub struct BlochDecomposition {
    pub d: usize,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub t: CorrelationMatrix,
}

impl BlochDecomposition {
    pub fn alpha_norm_sq(&self) -> f64 {
        self.alpha.iter().map(|v| v * v).sum()
    }

    pub fn beta_norm_sq(&self) -> f64 {
        self.beta.iter().map(|v| v * v).sum()
    }
}

/// Bloch decomposition `αᵢ = tr(ρ λᵢ⊗I)`, `βᵢ = tr(ρ I⊗λᵢ)`,
/// `T_ij = tr(ρ λᵢ⊗λⱼ)`.
pub fn bloch_decomposition(rho: &DensityMatrix) -> Result<BlochDecomposition> {
    let dims = rho.shape().dims();
    if dims.len() != 2 || dims[0] != dims[1] {
        return Err(Error::ShapeMismatch(format!(
            "expected a bipartite state with equal local dimensions, got {dims:?}"
        )));
    }
    let d = dims[0];
    let basis = gell_mann_basis(d)?;
    let n = d * d - 1;
    let id = ComplexMatrix::identity(d);

    let expect = |op: &ComplexMatrix| -> f64 {
        let v = rho.matrix().mul(op).trace();
        debug_assert!(v.im.abs() < 1e-9);
        v.re
    };

    let alpha: Vec<f64> =
        basis.operators().iter().map(|l| expect(&kron(l, &id))).collect();
    let beta: Vec<f64> = basis.operators().iter().map(|l| expect(&kron(&id, l))).collect();
    let mut t = CorrelationMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            t.set(i, j, expect(&kron(&basis.operators()[i], &basis.operators()[j])));
        }
    }
    Ok(BlochDecomposition { d, alpha, beta, t })
}

/// Rebuilds the state from a Bloch decomposition; inverse of
/// [`bloch_decomposition`].
pub fn density_from_bloch(b: &BlochDecomposition) -> Result<DensityMatrix> {
    let d = b.d;
    let basis = gell_mann_basis(d)?;
    let n = d * d - 1;
    let id = ComplexMatrix::identity(d);
    let mut mat = kron(&id, &id);
    for i in 0..n {
        mat = mat.add(&kron(&basis.operators()[i], &id).scale(re(b.alpha[i])));
        mat = mat.add(&kron(&id, &basis.operators()[i]).scale(re(b.beta[i])));
    }
    for i in 0..n {
        for j in 0..n {
            let c = b.t.get(i, j);
            if c != 0.0 {
                mat = mat
                    .add(&kron(&basis.operators()[i], &basis.operators()[j]).scale(re(c)));
            }
        }
    }
    let dd = (d * d) as f64;
    DensityMatrix::new(
        mat.scale(re(1.0 / dd)),
        SubsystemShape::new(vec![d, d])?,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DensityMatrix;
    use crate::states;
    use approx::assert_abs_diff_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn pauli_coeffs_of_maximally_mixed() {
        let rho = DensityMatrix::maximally_mixed(SubsystemShape::qubits(3));
        let c = pauli_coefficients(&rho).unwrap();
        assert_abs_diff_eq!(c.get(0, 0, 0), 1.0, epsilon = 1e-14);
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    if (i, j, k) != (0, 0, 0) {
                        assert_abs_diff_eq!(c.get(i, j, k), 0.0, epsilon = 1e-14);
                    }
                }
            }
        }
        let (a1, a2, a3) = sector_lengths(&c);
        assert_abs_diff_eq!(a1 + a2 + a3, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn pauli_coeffs_of_ghz() {
        let c = pauli_coefficients(&states::ghz3().to_density()).unwrap();
        assert_abs_diff_eq!(c.get(3, 3, 0), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.get(3, 0, 3), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.get(0, 3, 3), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.get(1, 1, 1), 1.0, epsilon = 1e-12);
        let (a1, a2, a3) = sector_lengths(&c);
        assert_abs_diff_eq!(a1, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a2, 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a3, 4.0, epsilon = 1e-12);
    }

    #[test]
    fn pauli_coeffs_round_trip() {
        let mut rng = ChaCha12Rng::seed_from_u64(31);
        for _ in 0..3 {
            let rho = states::random_density_matrix(&SubsystemShape::qubits(3), 8, &mut rng);
            let c = pauli_coefficients(&rho).unwrap();
            assert_abs_diff_eq!(c.get(0, 0, 0), 1.0, epsilon = 1e-12);
            let back = density_from_pauli(&c).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
        }
    }

    #[test]
    fn pauli_coeffs_reject_wrong_shape() {
        let rho = states::chessboard_state();
        assert!(pauli_coefficients(&rho).is_err());
    }

    #[test]
    fn three_qubit_purity_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(32);
        for _ in 0..5 {
            let rho = states::random_density_matrix(&SubsystemShape::qubits(3), 4, &mut rng);
            let c = pauli_coefficients(&rho).unwrap();
            let (a1, a2, a3) = sector_lengths(&c);
            assert_abs_diff_eq!(1.0 + a1 + a2 + a3, 8.0 * rho.purity(), epsilon = 1e-9);
        }
    }

    #[test]
    fn ghzw_sector_lengths_match_polynomials() {
        for k in 0..=100 {
            let g = k as f64 / 100.0;
            let rho = states::ghzw_mix(g).unwrap();
            let (a1, a2, a3) = sector_lengths(&pauli_coefficients(&rho).unwrap());
            let e1 = (1.0 - g) * (1.0 - g) / 3.0;
            let e2 = 8.0 * g * g - 8.0 * g + 3.0;
            let e3 = 4.0 * g * g + 11.0 * (1.0 - g) * (1.0 - g) / 3.0;
            assert_abs_diff_eq!(a1, e1, epsilon = 1e-10);
            assert_abs_diff_eq!(a2, e2, epsilon = 1e-10);
            assert_abs_diff_eq!(a3, e3, epsilon = 1e-10);
        }
    }

    #[test]
    fn gell_mann_qubit_case_is_pauli() {
        let basis = gell_mann_basis(2).unwrap();
        let [_, x, y, z] = pauli_matrices();
        assert!(basis.operators()[0].max_abs_diff(&x) < 1e-15);
        assert!(basis.operators()[1].max_abs_diff(&y) < 1e-15);
        assert!(basis.operators()[2].max_abs_diff(&z) < 1e-15);
    }

    #[test]
    fn gell_mann_orthogonality() {
        for d in [2usize, 3, 4] {
            let basis = gell_mann_basis(d).unwrap();
            let ops = basis.operators();
            assert_eq!(ops.len(), d * d - 1);
            for (i, a) in ops.iter().enumerate() {
                assert!(a.trace().norm() < 1e-13, "traceless");
                assert!(a.is_hermitian(1e-13));
                for (j, b) in ops.iter().enumerate() {
                    let expect = if i == j { d as f64 } else { 0.0 };
                    assert_abs_diff_eq!(a.mul(b).trace().re, expect, epsilon = 1e-12);
                }
            }
        }
        assert!(gell_mann_basis(1).is_err());
    }

    #[test]
    fn bloch_decomposition_of_maximally_mixed() {
        let rho =
            DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
        let b = bloch_decomposition(&rho).unwrap();
        assert_abs_diff_eq!(b.alpha_norm_sq(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(b.beta_norm_sq(), 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(b.t.gram_trace(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn bloch_decomposition_of_pure_product() {
        // |00⟩ on two qutrits: T = α βᵀ, rank one, trace norm d-1 = 2.
        let mut amp = vec![C64::new(0.0, 0.0); 9];
        amp[0] = C64::new(1.0, 0.0);
        let psi = crate::linalg::PureState::new(
            amp,
            SubsystemShape::new(vec![3, 3]).unwrap(),
        )
        .unwrap();
        let b = bloch_decomposition(&psi.to_density()).unwrap();
        assert_abs_diff_eq!(b.alpha_norm_sq(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.beta_norm_sq(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(b.t.trace_norm(), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn bloch_round_trip_and_purity_identity() {
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        for _ in 0..3 {
            let rho = states::random_density_matrix(&shape, 4, &mut rng);
            let b = bloch_decomposition(&rho).unwrap();
            let back = density_from_bloch(&b).unwrap();
            assert!(back.matrix().max_abs_diff(rho.matrix()) < 1e-10);
            let lhs = 1.0 + b.alpha_norm_sq() + b.beta_norm_sq() + b.t.gram_trace();
            assert_abs_diff_eq!(lhs, 9.0 * rho.purity(), epsilon = 1e-9);
        }
    }

    #[test]
    fn bloch_rejects_unequal_dimensions() {
        let mut rng = ChaCha12Rng::seed_from_u64(34);
        let rho =
            states::random_density_matrix(&SubsystemShape::new(vec![2, 3]).unwrap(), 2, &mut rng);
        assert!(bloch_decomposition(&rho).is_err());
    }

    #[test]
    fn sector_lengths_invariant_under_local_unitaries() {
        let mut rng = ChaCha12Rng::seed_from_u64(35);
        let rho = states::random_density_matrix(&SubsystemShape::qubits(3), 3, &mut rng);
        let (a1, a2, a3) = sector_lengths(&pauli_coefficients(&rho).unwrap());
        let us: Vec<_> = (0..3).map(|_| crate::protocol::haar_unitary(2, &mut rng)).collect();
        let u = crate::linalg::kron_all(&us);
        let rotated = DensityMatrix::new(
            u.mul(rho.matrix()).mul(&u.adjoint()).hermitized(),
            SubsystemShape::qubits(3),
        )
        .unwrap();
        let (b1, b2, b3) = sector_lengths(&pauli_coefficients(&rotated).unwrap());
        assert_abs_diff_eq!(a1, b1, epsilon = 1e-9);
        assert_abs_diff_eq!(a2, b2, epsilon = 1e-9);
        assert_abs_diff_eq!(a3, b3, epsilon = 1e-9);
    }

    #[test]
    fn t_singular_values_invariant_under_local_unitaries() {
        let mut rng = ChaCha12Rng::seed_from_u64(36);
        let shape = SubsystemShape::new(vec![3, 3]).unwrap();
        let rho = states::random_density_matrix(&shape, 3, &mut rng);
        let sv = bloch_decomposition(&rho).unwrap().t.singular_values();
        let u = kron(
            &crate::protocol::haar_unitary(3, &mut rng),
            &crate::protocol::haar_unitary(3, &mut rng),
        );
        let rotated = DensityMatrix::new(
            u.mul(rho.matrix()).mul(&u.adjoint()).hermitized(),
            shape,
        )
        .unwrap();
        let sv2 = bloch_decomposition(&rotated).unwrap().t.singular_values();
        for (a, b) in sv.iter().zip(&sv2) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }
}
