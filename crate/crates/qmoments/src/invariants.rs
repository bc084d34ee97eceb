//! Analytic moment and entanglement-measure computations: correlation
//! moments from the correlation matrix, sector lengths from subset moments,
//! Wootters concurrence, and the pure-state three-tangle.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::bloch::CorrelationMatrix;
use crate::linalg::{
    eigvals_hermitian, kron, matrix_sqrt_psd, partial_trace, C64, ComplexMatrix, DensityMatrix,
    PureState,
};
use crate::{Error, Result};

/// Second and fourth correlation moments of a two-qudit state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MomentPair {
    pub r2: f64,
    pub r4: f64,
}

/// Moments from the correlation matrix:
///
/// `R⁽²⁾ = tr(TTᵀ)/(d-1)²`,
/// `R⁽⁴⁾ = [⅓·tr(TTᵀ)² + ⅔·tr((TTᵀ)²)]/(d-1)⁴`.
///
/// Both expressions are exactly reproduced by the Haar Monte Carlo oracle in
/// [`crate::protocol::haar_pair_moments`]; the pairing is validated by
/// [`crate::protocol::check_moment_consistency`] and any disagreement is
/// surfaced as an error rather than corrected.
pub fn correlation_moments(t: &CorrelationMatrix, d: usize) -> Result<MomentPair> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("dimension {d} must be >= 2")));
    }
    if t.size() != d * d - 1 {
        return Err(Error::ShapeMismatch(format!(
            "correlation matrix of size {} does not match dimension {d}",
            t.size()
        )));
    }
    let g1 = t.gram_trace();
    let g2 = t.gram_trace_sq();
    let dm1 = (d - 1) as f64;
    let r2 = g1 / dm1.powi(2);
    let r4 = (g1 * g1 / 3.0 + 2.0 * g2 / 3.0) / dm1.powi(4);
    Ok(MomentPair { r2, r4 })
}

/// Sector lengths of a three-qubit state from the second moments of all
/// seven non-empty subsets:
/// `A₁ = 3(R_A+R_B+R_C)`, `A₂ = 9(R_AB+R_AC+R_BC)`, `A₃ = 27·R_ABC`.
pub fn sector_lengths_from_moments(
    r2_by_subset: &BTreeMap<Vec<usize>, f64>,
) -> Result<(f64, f64, f64)> {
    let lookup = |subset: &[usize]| -> Result<f64> {
        r2_by_subset
            .get(subset)
            .copied()
            .ok_or_else(|| Error::InvalidParameter(format!("missing subset {subset:?}")))
    };
    let a1 = 3.0 * (lookup(&[0])? + lookup(&[1])? + lookup(&[2])?);
    let a2 = 9.0 * (lookup(&[0, 1])? + lookup(&[0, 2])? + lookup(&[1, 2])?);
    let a3 = 27.0 * lookup(&[0, 1, 2])?;
    Ok((a1, a2, a3))
}

/// Wootters concurrence of a two-qubit state,
/// `max(0, λ₁-λ₂-λ₃-λ₄)` over the decreasing square roots of the spectrum
/// of `√ρ ρ̃ √ρ` with `ρ̃ = (σy⊗σy) ρ* (σy⊗σy)`.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.shape().dims() != [2, 2] {
        return Err(Error::ShapeMismatch("concurrence requires a two-qubit state".into()));
    }
    let sy = ComplexMatrix::from_fn(2, 2, |i, j| match (i, j) {
        (0, 1) => C64::new(0.0, -1.0),
        (1, 0) => C64::new(0.0, 1.0),
        _ => Complex::new(0.0, 0.0),
    });
    let yy = kron(&sy, &sy);
    let spin_flipped = yy.mul(&rho.matrix().conjugate()).mul(&yy);
    let sqrt_rho = matrix_sqrt_psd(rho.matrix())?;
    let m = sqrt_rho.mul(&spin_flipped).mul(&sqrt_rho);
    let evs = eigvals_hermitian(&m.hermitized())?;
    // Relative floor keeps eigensolver noise on true zeros out of the
    // square roots.
    let floor = evs.iter().fold(0.0f64, |acc, &v| acc.max(v)) * 1e-13;
    let mut lambdas: Vec<f64> =
        evs.into_iter().map(|v| if v > floor { v.sqrt() } else { 0.0 }).collect();
    lambdas.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok((lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).max(0.0))
}

/// Sum of squared concurrences of the first party with each of the other
/// two, `C²(tr_C ρ) + C²(tr_B ρ)`.
pub fn squared_concurrence_sum(rho: &DensityMatrix) -> Result<f64> {
    if rho.shape().dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch(
            "squared concurrence sum requires a three-qubit state".into(),
        ));
    }
    let c_ab = concurrence(&partial_trace(rho, &[0, 1])?)?;
    let c_ac = concurrence(&partial_trace(rho, &[0, 2])?)?;
    Ok(c_ab * c_ab + c_ac * c_ac)
}

/// Three-tangle of a pure three-qubit state, `4·|hyperdeterminant|` of the
/// amplitude tensor.
pub fn three_tangle(psi: &PureState) -> Result<f64> {
    if psi.shape().dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch("the three-tangle requires three qubits".into()));
    }
    let a = |i: usize, j: usize, k: usize| psi.amplitudes()[(i << 2) | (j << 1) | k];
    let d1 = a(0, 0, 0).powi(2) * a(1, 1, 1).powi(2)
        + a(0, 0, 1).powi(2) * a(1, 1, 0).powi(2)
        + a(0, 1, 0).powi(2) * a(1, 0, 1).powi(2)
        + a(1, 0, 0).powi(2) * a(0, 1, 1).powi(2);
    let d2 = a(0, 0, 0) * a(1, 1, 1) * a(0, 1, 1) * a(1, 0, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 0, 0) * a(1, 1, 1) * a(1, 1, 0) * a(0, 0, 1)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 0, 1) * a(0, 1, 0)
        + a(0, 1, 1) * a(1, 0, 0) * a(1, 1, 0) * a(0, 0, 1)
        + a(1, 0, 1) * a(0, 1, 0) * a(1, 1, 0) * a(0, 0, 1);
    let d3 = a(0, 0, 0) * a(1, 1, 0) * a(1, 0, 1) * a(0, 1, 1)
        + a(1, 1, 1) * a(0, 0, 1) * a(0, 1, 0) * a(1, 0, 0);
    let hyperdet = d1 - 2.0 * d2 + 4.0 * d3;
    Ok((4.0 * hyperdet.norm()).clamp(0.0, 1.0))
}
