//! Dense complex linear algebra for multi-qudit operators.
//!
//! Index convention used throughout the crate: party 0 is the leftmost
//! tensor factor, and the basis index of the composite system is the
//! mixed-radix number over the subsystem dimensions (most significant
//! digit first).

use nalgebra::DMatrix;
use num_complex::Complex;

use crate::{Error, Result};

/// Complex scalar used everywhere in the crate.
pub type C64 = Complex<f64>;

/// Hermiticity tolerance required of density matrices.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Tolerance on `trace = 1` for density matrices.
pub const TRACE_TOL: f64 = 1e-10;
/// Smallest admissible eigenvalue of a density matrix.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Dense complex matrix with row-major storage.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl std::fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Builds a matrix from rows of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn conjugate(&self) -> Self {
        Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)].conj())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * s).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions must agree");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == C64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `self * v` for a column vector.
    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// Largest entrywise absolute difference to `other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest deviation from Hermiticity, `max |m - m†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// `(m + m†)/2`; used before every Hermitian eigensolve.
    pub fn hermitized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self[(i, j)] + self[(j, i)].conj()) * 0.5
        })
    }

    pub fn all_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub(crate) fn to_na(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for ia in 0..a.rows() {
        for ja in 0..a.cols() {
            let f = a[(ia, ja)];
            if f == C64::new(0.0, 0.0) {
                continue;
            }
            for ib in 0..b.rows() {
                for jb in 0..b.cols() {
                    out[(ia * b.rows() + ib, ja * b.cols() + jb)] = f * b[(ib, jb)];
                }
            }
        }
    }
    out
}

/// Kronecker product of a list of factors, leftmost first.
pub fn kron_all(factors: &[ComplexMatrix]) -> ComplexMatrix {
    assert!(!factors.is_empty());
    let mut out = factors[0].clone();
    for f in &factors[1..] {
        out = kron(&out, f);
    }
    out
}

/// Ordered list of local dimensions of a multi-party system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsystemShape {
    dims: Vec<usize>,
}

impl SubsystemShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidParameter("shape needs at least one party".into()));
        }
        if dims.iter().any(|&d| d < 2) {
            return Err(Error::InvalidParameter(format!(
                "every local dimension must be >= 2, got {dims:?}"
            )));
        }
        Ok(Self { dims })
    }

    pub fn qubits(n: usize) -> Self {
        Self { dims: vec![2; n] }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_parties(&self) -> usize {
        self.dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Mixed-radix strides, party 0 most significant.
    pub fn strides(&self) -> Vec<usize> {
        let n = self.dims.len();
        let mut s = vec![1usize; n];
        for i in (0..n.saturating_sub(1)).rev() {
            s[i] = s[i + 1] * self.dims[i + 1];
        }
        s
    }

    /// Flat index of a multi-index.
    pub fn flat(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        self.strides().iter().zip(multi).map(|(s, m)| s * m).sum()
    }

    /// Multi-index of a flat index.
    pub fn multi(&self, mut flat: usize) -> Vec<usize> {
        let strides = self.strides();
        strides
            .iter()
            .map(|&s| {
                let q = flat / s;
                flat %= s;
                q
            })
            .collect()
    }

    pub fn check_party(&self, party: usize) -> Result<()> {
        if party < self.dims.len() {
            Ok(())
        } else {
            Err(Error::InvalidParty { party, parties: self.dims.len() })
        }
    }
}

/// Hermitian, positive semidefinite, unit-trace operator over a declared
/// subsystem shape — the universal state carrier.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    shape: SubsystemShape,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix, shape: SubsystemShape) -> Result<Self> {
        if !mat.is_square() || mat.rows() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "matrix is {}x{} but shape {:?} has total dimension {}",
                mat.rows(),
                mat.cols(),
                shape.dims(),
                shape.total_dim()
            )));
        }
        if !mat.all_finite() {
            return Err(Error::InvalidState("matrix contains non-finite entries".into()));
        }
        let defect = mat.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let evs = eigvals_hermitian(&mat)?;
        if evs[0] < EIGENVALUE_FLOOR {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {} below tolerance",
                evs[0]
            )));
        }
        Ok(Self { mat, shape })
    }

    /// Maximally mixed state on the given shape.
    pub fn maximally_mixed(shape: SubsystemShape) -> Self {
        let d = shape.total_dim();
        let mat = ComplexMatrix::identity(d).scale(C64::new(1.0 / d as f64, 0.0));
        Self { mat, shape }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn purity(&self) -> f64 {
        self.mat.mul(&self.mat).trace().re
    }

    /// Convex mixture `w·self + (1-w)·other` of states on the same shape.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.shape != other.shape {
            return Err(Error::ShapeMismatch("mixture of unequal shapes".into()));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w} outside [0,1]")));
        }
        let mat = self
            .mat
            .scale(C64::new(w, 0.0))
            .add(&other.mat.scale(C64::new(1.0 - w, 0.0)));
        Ok(Self { mat, shape: self.shape.clone() })
    }

    /// Constructor for internal code paths that already guarantee validity.
    pub(crate) fn trusted(mat: ComplexMatrix, shape: SubsystemShape) -> Self {
        debug_assert_eq!(mat.rows(), shape.total_dim());
        Self { mat, shape }
    }
}

/// Normalized state vector over a declared subsystem shape.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: Vec<C64>,
    shape: SubsystemShape,
}

impl PureState {
    pub fn new(amplitudes: Vec<C64>, shape: SubsystemShape) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return Err(Error::ShapeMismatch(format!(
                "vector has {} amplitudes but shape {:?} has total dimension {}",
                amplitudes.len(),
                shape.dims(),
                shape.total_dim()
            )));
        }
        let norm_sq: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState(format!("squared norm is {norm_sq}, expected 1")));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Builds a state from unnormalized amplitudes.
    pub fn normalized(mut amplitudes: Vec<C64>, shape: SubsystemShape) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidState("cannot normalize the zero vector".into()));
        }
        for z in &mut amplitudes {
            *z /= norm;
        }
        Self::new(amplitudes, shape)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn shape(&self) -> &SubsystemShape {
        &self.shape
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Projector `|ψ⟩⟨ψ|` as a density matrix.
    pub fn to_density(&self) -> DensityMatrix {
        let n = self.amplitudes.len();
        let mat = ComplexMatrix::from_fn(n, n, |i, j| {
            self.amplitudes[i] * self.amplitudes[j].conj()
        });
        DensityMatrix::trusted(mat, self.shape.clone())
    }

    /// Applies an operator, renormalizing only if the operator is unitary
    /// to machine precision is the caller's concern; the result must still
    /// be normalized.
    pub fn apply(&self, op: &ComplexMatrix) -> Result<Self> {
        if op.cols() != self.amplitudes.len() {
            return Err(Error::ShapeMismatch("operator does not match state dimension".into()));
        }
        Self::new(op.mul_vec(&self.amplitudes), self.shape.clone())
    }
}

/// Reduced state on the kept parties (in their original order).
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let shape = rho.shape();
    if keep.is_empty() {
        return Err(Error::InvalidParameter("keep set must be non-empty".into()));
    }
    for &p in keep {
        shape.check_party(p)?;
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();

    let traced: Vec<usize> =
        (0..shape.num_parties()).filter(|p| !keep_sorted.contains(p)).collect();
    let keep_dims: Vec<usize> = keep_sorted.iter().map(|&p| shape.dims()[p]).collect();
    let out_shape = SubsystemShape::new(keep_dims)?;
    let env_dims: Vec<usize> = traced.iter().map(|&p| shape.dims()[p]).collect();
    let env_total: usize = env_dims.iter().product();

    let mut out = ComplexMatrix::zeros(out_shape.total_dim(), out_shape.total_dim());
    let mut full_row = vec![0usize; shape.num_parties()];
    let mut full_col = vec![0usize; shape.num_parties()];
    for a in 0..out_shape.total_dim() {
        let am = out_shape.multi(a);
        for b in 0..out_shape.total_dim() {
            let bm = out_shape.multi(b);
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..env_total {
                // Decode the environment assignment into the traced slots.
                let mut rem = e;
                for (slot, &p) in traced.iter().enumerate().rev() {
                    let d = env_dims[slot];
                    full_row[p] = rem % d;
                    full_col[p] = rem % d;
                    rem /= d;
                }
                for (slot, &p) in keep_sorted.iter().enumerate() {
                    full_row[p] = am[slot];
                    full_col[p] = bm[slot];
                }
                acc += rho.matrix()[(shape.flat(&full_row), shape.flat(&full_col))];
            }
            out[(a, b)] = acc;
        }
    }
    Ok(DensityMatrix::trusted(out, out_shape))
}

/// Transpose of the chosen party's indices. The output is Hermitian with the
/// same trace but need not be positive semidefinite.
pub fn partial_transpose(rho: &DensityMatrix, party: usize) -> Result<ComplexMatrix> {
    let shape = rho.shape();
    shape.check_party(party)?;
    let d = shape.total_dim();
    let mut out = ComplexMatrix::zeros(d, d);
    for r in 0..d {
        let mut rm = shape.multi(r);
        for c in 0..d {
            let mut cm = shape.multi(c);
            std::mem::swap(&mut rm[party], &mut cm[party]);
            let v = rho.matrix()[(shape.flat(&rm), shape.flat(&cm))];
            std::mem::swap(&mut rm[party], &mut cm[party]);
            out[(r, c)] = v;
        }
    }
    Ok(out)
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is symmetrized
/// as `(h+h†)/2` before solving; inputs further than `1e-8` from Hermitian
/// are rejected.
pub fn eigvals_hermitian(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let defect = h.hermiticity_defect();
    if defect > 1e-8 {
        return Err(Error::NotHermitian(defect));
    }
    let m = h.hermitized().to_na();
    let mut evs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(evs)
}

/// Eigendecomposition of a Hermitian matrix: ascending eigenvalues and the
/// matrix whose columns are the matching eigenvectors.
pub fn eigh(h: &ComplexMatrix) -> Result<(Vec<f64>, ComplexMatrix)> {
    let defect = h.hermiticity_defect();
    if defect > 1e-8 {
        return Err(Error::NotHermitian(defect));
    }
    let se = nalgebra::SymmetricEigen::new(h.hermitized().to_na());
    let mut order: Vec<usize> = (0..se.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].partial_cmp(&se.eigenvalues[b]).unwrap());
    let values: Vec<f64> = order.iter().map(|&k| se.eigenvalues[k]).collect();
    let n = se.eigenvectors.nrows();
    let vectors = ComplexMatrix::from_fn(n, n, |i, j| se.eigenvectors[(i, order[j])]);
    Ok((values, vectors))
}

/// Singular values, descending.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m.to_na().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// Positive square root of a Hermitian matrix. Eigenvalues below a relative
/// rounding floor are clipped to zero: square-rooting amplifies the
/// eigensolver's ±1e-17 noise on true zeros to ~1e-9 otherwise, and it keeps
/// states with tiny negative numerical eigenvalues inside the domain.
pub fn matrix_sqrt_psd(h: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (values, vectors) = eigh(h)?;
    let n = values.len();
    let floor = values.iter().fold(0.0f64, |m, &v| m.max(v)) * 1e-13;
    let vdag = vectors.adjoint();
    let mut diag = ComplexMatrix::zeros(n, n);
    for (i, &v) in values.iter().enumerate() {
        diag[(i, i)] = C64::new(if v > floor { v.sqrt() } else { 0.0 }, 0.0);
    }
    Ok(vectors.mul(&diag).mul(&vdag))
}

/// Root fidelity `tr √(√ρ σ √ρ)`, symmetric in its arguments.
///
/// Evaluated as the trace norm of `√ρ·√σ`, which is the same quantity
/// (`√ρ σ √ρ = (√ρ√σ)(√ρ√σ)†`) but symmetric by construction and better
/// conditioned than eigensolving the triple product.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.shape() != sigma.shape() {
        return Err(Error::ShapeMismatch("fidelity of states with unequal shapes".into()));
    }
    let a = matrix_sqrt_psd(rho.matrix())?;
    let b = matrix_sqrt_psd(sigma.matrix())?;
    Ok(trace_norm(&a.mul(&b)).min(1.0))
}
