//! Entanglement verdicts: sector-length criteria for three qubits, the
//! trace-norm value of the correlation matrix, the constrained
//! fourth-moment minimization, and the combined bound-entanglement
//! detector for two qutrits.

use rayon::prelude::*;

use crate::bloch::{bloch_decomposition, CorrelationMatrix};
use crate::invariants::{correlation_moments, MomentPair};
use crate::linalg::{eigvals_hermitian, partial_transpose, DensityMatrix};
use crate::protocol::stream_rng;
use crate::{Error, Result};

use rand::Rng;

const DOMAIN_SOLVER: u64 = 5;

/// Which side of the threshold counts as a violation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Violated when `value > threshold` (GME-type criteria).
    Above,
    /// Violated when `value < threshold` (moment-bound criteria).
    Below,
}

/// A named criterion evaluation. Ties at the exact threshold are not
/// violations (strict inequality).
#[derive(Clone, Debug)]
pub struct CriterionResult {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub direction: Direction,
    pub violated: bool,
    pub std_error: f64,
}

impl CriterionResult {
    pub fn new(name: impl Into<String>, value: f64, threshold: f64, direction: Direction, std_error: f64) -> Self {
        let violated = match direction {
            Direction::Above => value > threshold,
            Direction::Below => value < threshold,
        };
        Self { name: name.into(), value, threshold, direction, violated, std_error }
    }

    /// Signed distance from the threshold in standard errors; infinite for
    /// exact inputs.
    pub fn z_score(&self) -> f64 {
        let signed = match self.direction {
            Direction::Above => self.value - self.threshold,
            Direction::Below => self.threshold - self.value,
        };
        if self.std_error == 0.0 {
            if signed > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            }
        } else {
            signed / self.std_error
        }
    }

    /// Statistical verdict at the given significance.
    pub fn significant(&self, z_min: f64) -> bool {
        self.violated && self.z_score() >= z_min
    }
}

/// `A₃ > 3` certifies genuine multipartite entanglement.
pub fn criterion_a3(a3: f64, std_error: f64) -> CriterionResult {
    CriterionResult::new("sector-a3", a3, 3.0, Direction::Above, std_error)
}

/// `A₂ + A₃ > 3(1 + A₁)` rules out biseparability with respect to any fixed
/// partition. The verdict label stays at "no fixed-partition biseparability
/// (GME conjectured)": numerical evidence suggests the criterion implies
/// GME, but no proof exists.
pub fn criterion_strong_bisep(
    a1: f64,
    a2: f64,
    a3: f64,
    errs: (f64, f64, f64),
) -> CriterionResult {
    let value = a2 + a3 - 3.0 * (1.0 + a1);
    let std_error = (9.0 * errs.0 * errs.0 + errs.1 * errs.1 + errs.2 * errs.2).sqrt();
    CriterionResult::new("strong-bisep", value, 0.0, Direction::Above, std_error)
}

/// Human-readable verdict for a criterion result.
pub fn verdict_label(c: &CriterionResult) -> String {
    match (c.name.as_str(), c.violated) {
        ("strong-bisep", true) => "no fixed-partition biseparability (GME conjectured)".into(),
        ("strong-bisep", false) => "not detected".into(),
        ("sector-a3", true) => "genuine multipartite entanglement".into(),
        ("sector-a3", false) => "not detected".into(),
        (_, true) => "violated".into(),
        (_, false) => "not violated".into(),
    }
}

/// Trace norm of the correlation matrix; separable two-qudit states satisfy
/// `tr|T| <= d-1`.
pub fn de_vicente_value(t: &CorrelationMatrix) -> f64 {
    t.trace_norm()
}

/// Solution of the constrained fourth-moment minimization: the smallest
/// `R⁽⁴⁾` compatible with a measured `R⁽²⁾` and the separability constraint
/// `tr|T| <= d-1`.
#[derive(Clone, Debug)]
pub struct FourthMomentBound {
    pub r2_input: f64,
    pub bound: f64,
    /// Singular-value vector attaining the bound, descending, padded with
    /// zeros to length d²-1.
    pub optimal_singular_values: Vec<f64>,
}

struct Problem {
    /// Fixed value of Σσ², namely r2·(d-1)².
    c: f64,
    /// Trace-norm cap Σσ ≤ s, namely d-1.
    s: f64,
    /// Number of singular values, d²-1.
    n: usize,
    /// (d-1)⁴ normalization of the fourth moment.
    dm4: f64,
}

impl Problem {
    fn new(r2: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("dimension {d} must be >= 2")));
        }
        if !r2.is_finite() || r2 < 0.0 {
            return Err(Error::InvalidParameter(format!("second moment {r2} must be >= 0")));
        }
        let s = (d - 1) as f64;
        let c = r2 * s * s;
        // Largest Σσ² under Σσ ≤ s is s² (all weight on one value), so the
        // constraint set is empty beyond r2 = 1.
        if c > s * s + 1e-12 {
            return Err(Error::InfeasibleMoment(r2));
        }
        Ok(Self { c, s, n: d * d - 1, dm4: s.powi(4) })
    }

    fn objective(&self, sigma: &[f64]) -> f64 {
        sigma.iter().map(|v| v.powi(4)).sum()
    }

    fn bound_from(&self, sigma: &[f64]) -> f64 {
        let g1: f64 = sigma.iter().map(|v| v * v).sum();
        let g2: f64 = self.objective(sigma);
        (g1 * g1 / 3.0 + 2.0 * g2 / 3.0) / self.dm4
    }

    fn feasible(&self, sigma: &[f64], tol: f64) -> bool {
        sigma.iter().all(|&v| v >= -tol)
            && (sigma.iter().map(|v| v * v).sum::<f64>() - self.c).abs() <= tol
            && sigma.iter().sum::<f64>() <= self.s + tol
    }

    fn finish(&self, r2: f64, mut sigma: Vec<f64>) -> FourthMomentBound {
        sigma.iter_mut().for_each(|v| *v = v.max(0.0));
        sigma.sort_by(|a, b| b.partial_cmp(a).unwrap());
        sigma.resize(self.n, 0.0);
        FourthMomentBound { r2_input: r2, bound: self.bound_from(&sigma), optimal_singular_values: sigma }
    }
}

/// Minimal fourth moment compatible with the given second moment under the
/// separability constraint, computed by closed-form enumeration.
///
/// Stationarity gives `4σ³ - 2μσ + ν = 0` on the support, a cubic with at
/// most two distinct positive roots, so the optimum has at most two distinct
/// nonzero levels: enumerate (k values at `a`, m values at `b`) for all
/// `k+m <= d²-1`, solve each closed-form subproblem, take the minimum.
pub fn min_r4_given_r2(r2: f64, d: usize) -> Result<FourthMomentBound> {
    let prob = Problem::new(r2, d)?;
    if prob.c <= f64::EPSILON {
        return Ok(prob.finish(r2, vec![0.0; prob.n]));
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_f = f64::INFINITY;
    let mut consider = |sigma: Vec<f64>, f: f64| {
        if f < best_f {
            best_f = f;
            best = Some(sigma);
        }
    };

    // Equal spread on k values with the trace-norm cap slack.
    for k in 1..=prob.n {
        let a = (prob.c / k as f64).sqrt();
        if k as f64 * a <= prob.s + 1e-12 {
            let sigma = vec![a; k];
            let f = prob.objective(&sigma);
            consider(sigma, f);
        }
    }

    // Two levels with the trace-norm cap active: k·a + m·b = s and
    // k·a² + m·b² = c reduce to a quadratic in a.
    for k in 1..prob.n {
        for m in 1..=(prob.n - k) {
            let (kf, mf) = (k as f64, m as f64);
            let qa = kf * (mf + kf);
            let qb = -2.0 * prob.s * kf;
            let qc = prob.s * prob.s - mf * prob.c;
            let disc = qb * qb - 4.0 * qa * qc;
            if disc < 0.0 {
                continue;
            }
            for sign in [-1.0, 1.0] {
                let a = (-qb + sign * disc.sqrt()) / (2.0 * qa);
                if a < -1e-12 {
                    continue;
                }
                let a = a.max(0.0);
                let b = (prob.s - kf * a) / mf;
                if b < -1e-12 {
                    continue;
                }
                let b = b.max(0.0);
                let mut sigma = vec![a; k];
                sigma.extend(std::iter::repeat(b).take(m));
                if prob.feasible(&sigma, 1e-8) {
                    let f = prob.objective(&sigma);
                    consider(sigma, f);
                }
            }
        }
    }

    let sigma = best.ok_or(Error::InfeasibleMoment(r2))?;
    Ok(prob.finish(r2, sigma))
}

/// Numeric cross-check of [`min_r4_given_r2`]: projected gradient descent on
/// the singular-value vector with exact projections onto the sphere slice,
/// followed by a Newton polish of the stationarity system on the detected
/// support. Independent of the two-level enumeration.
pub fn min_r4_projected_gradient(
    r2: f64,
    d: usize,
    restarts: usize,
    seed: u64,
) -> Result<FourthMomentBound> {
    let prob = Problem::new(r2, d)?;
    if prob.c <= f64::EPSILON {
        return Ok(prob.finish(r2, vec![0.0; prob.n]));
    }
    let runs: Vec<Vec<f64>> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = stream_rng(seed, DOMAIN_SOLVER, r as u64);
            let mut sigma: Vec<f64> = (0..prob.n).map(|_| rng.gen_range(0.01..1.0)).collect();
            project(&mut sigma, &prob);
            let mut eta = 0.05 * prob.c.sqrt().max(1e-3);
            let mut f_prev = prob.objective(&sigma);
            for _iter in 0..4000 {
                let grad: Vec<f64> = sigma.iter().map(|&v| 4.0 * v * v * v).collect();
                let mut trial: Vec<f64> =
                    sigma.iter().zip(&grad).map(|(&v, &g)| v - eta * g).collect();
                project(&mut trial, &prob);
                let f_trial = prob.objective(&trial);
                if f_trial <= f_prev {
                    sigma = trial;
                    f_prev = f_trial;
                } else {
                    eta *= 0.5;
                    if eta < 1e-12 {
                        break;
                    }
                }
            }
            newton_polish(&mut sigma, &prob);
            sigma
        })
        .collect();

    let mut best = None;
    let mut best_f = f64::INFINITY;
    for sigma in runs {
        if prob.feasible(&sigma, 1e-7) {
            let f = prob.objective(&sigma);
            if f < best_f {
                best_f = f;
                best = Some(sigma);
            }
        }
    }
    let sigma = best.ok_or_else(|| {
        Error::NumericalConsistency("projected gradient produced no feasible point".into())
    })?;
    Ok(prob.finish(r2, sigma))
}

/// Alternating exact projections: nonnegative orthant, the trace-norm cap
/// (capped-simplex projection), and the Σσ² sphere.
fn project(sigma: &mut [f64], prob: &Problem) {
    for _round in 0..200 {
        for v in sigma.iter_mut() {
            *v = v.max(0.0);
        }
        let l1: f64 = sigma.iter().sum();
        if l1 > prob.s {
            project_simplex_cap(sigma, prob.s);
        }
        let norm_sq: f64 = sigma.iter().map(|v| v * v).sum();
        if norm_sq > 0.0 {
            let scale = (prob.c / norm_sq).sqrt();
            for v in sigma.iter_mut() {
                *v *= scale;
            }
        } else {
            sigma[0] = prob.c.sqrt();
        }
        let l1: f64 = sigma.iter().sum();
        let norm_sq: f64 = sigma.iter().map(|v| v * v).sum();
        if l1 <= prob.s + 1e-13 && (norm_sq - prob.c).abs() < 1e-13 {
            break;
        }
    }
}

/// Euclidean projection onto `{x >= 0, Σx = s}`.
fn project_simplex_cap(x: &mut [f64], s: f64) {
    let mut sorted: Vec<f64> = x.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        cumsum += v;
        let t = (cumsum - s) / (i + 1) as f64;
        if v - t > 0.0 {
            theta = t;
        }
    }
    for v in x.iter_mut() {
        *v = (*v - theta).max(0.0);
    }
}

/// Newton iteration on the KKT stationarity system restricted to the
/// support found by the gradient phase.
fn newton_polish(sigma: &mut Vec<f64>, prob: &Problem) {
    let support: Vec<usize> =
        (0..sigma.len()).filter(|&i| sigma[i] > 1e-7).collect();
    let p = support.len();
    if p == 0 {
        return;
    }
    let l1: f64 = sigma.iter().sum();
    let l1_active = (l1 - prob.s).abs() < 1e-5;
    let unknowns = p + 1 + usize::from(l1_active);

    let mut vars: Vec<f64> = support.iter().map(|&i| sigma[i]).collect();
    // Least-squares initial multipliers from stationarity 4σ³ = 2μσ - ν.
    let mut mu = if p > 0 {
        2.0 * vars.iter().map(|v| v * v).sum::<f64>() / vars.iter().map(|v| v.powi(0)).sum::<f64>()
    } else {
        0.0
    };
    let mut nu = 0.0;

    for _ in 0..60 {
        let mut residual = nalgebra::DVector::<f64>::zeros(unknowns);
        let mut jac = nalgebra::DMatrix::<f64>::zeros(unknowns, unknowns);
        for (row, v) in vars.iter().enumerate() {
            residual[row] = 4.0 * v.powi(3) - 2.0 * mu * v + if l1_active { nu } else { 0.0 };
            jac[(row, row)] = 12.0 * v * v - 2.0 * mu;
            jac[(row, p)] = -2.0 * v;
            if l1_active {
                jac[(row, p + 1)] = 1.0;
            }
        }
        residual[p] = vars.iter().map(|v| v * v).sum::<f64>() - prob.c;
        for (col, v) in vars.iter().enumerate() {
            jac[(p, col)] = 2.0 * v;
        }
        if l1_active {
            residual[p + 1] = vars.iter().sum::<f64>() - prob.s;
            for col in 0..p {
                jac[(p + 1, col)] = 1.0;
            }
        }
        let norm = residual.norm();
        if norm < 1e-13 {
            break;
        }
        let Some(delta) = jac.lu().solve(&residual) else { break };
        let mut step = 1.0;
        // Keep the iterate positive.
        for (i, v) in vars.iter().enumerate() {
            if delta[i] > 0.0 && v - step * delta[i] < 0.0 {
                step = step.min(0.9 * v / delta[i]);
            }
        }
        for (i, v) in vars.iter_mut().enumerate() {
            *v -= step * delta[i];
        }
        mu -= step * delta[p];
        if l1_active {
            nu -= step * delta[p + 1];
        }
    }

    let candidate = {
        let mut out = vec![0.0; sigma.len()];
        for (slot, &i) in support.iter().enumerate() {
            out[i] = vars[slot].max(0.0);
        }
        out
    };
    if prob.feasible(&candidate, 1e-7)
        && prob.objective(&candidate) <= prob.objective(sigma) + 1e-12
    {
        *sigma = candidate;
    }
}

/// Dense two-level grid search; every candidate is exactly feasible, so the
/// closed-form and gradient solvers must match or beat its minimum.
pub fn min_r4_grid_search(r2: f64, d: usize, resolution: f64) -> Result<FourthMomentBound> {
    let prob = Problem::new(r2, d)?;
    if prob.c <= f64::EPSILON {
        return Ok(prob.finish(r2, vec![0.0; prob.n]));
    }
    let mut best: Option<Vec<f64>> = None;
    let mut best_f = f64::INFINITY;
    for k in 1..=prob.n {
        let kf = k as f64;
        // Single level.
        let a = (prob.c / kf).sqrt();
        if kf * a <= prob.s + 1e-12 {
            let sigma = vec![a; k];
            let f = prob.objective(&sigma);
            if f < best_f {
                best_f = f;
                best = Some(sigma);
            }
        }
        for m in 1..=(prob.n - k) {
            let mf = m as f64;
            let steps = (prob.s / kf / resolution).ceil() as usize;
            for step in 0..=steps {
                let a = step as f64 * resolution;
                let rem = prob.c - kf * a * a;
                if rem < 0.0 {
                    break;
                }
                let b = (rem / mf).sqrt();
                if kf * a + mf * b > prob.s + 1e-9 {
                    continue;
                }
                let mut sigma = vec![a; k];
                sigma.extend(std::iter::repeat(b).take(m));
                let f = prob.objective(&sigma);
                if f < best_f {
                    best_f = f;
                    best = Some(sigma);
                }
            }
        }
    }
    let sigma = best.ok_or(Error::InfeasibleMoment(r2))?;
    Ok(prob.finish(r2, sigma))
}

/// Combined bound-entanglement verdict for a two-qutrit state.
#[derive(Clone, Debug)]
pub struct BoundEntanglementReport {
    pub moments: MomentPair,
    /// Minimal fourth moment compatible with separability at the measured
    /// second moment; `None` when the second moment alone is already
    /// incompatible with separability (r2 > 1).
    pub bound: Option<f64>,
    pub min_pt_eigenvalue: f64,
    /// Positive partial transpose within tolerance 1e-10.
    pub ppt: bool,
    /// Fourth moment strictly below the separable bound.
    pub moment_violating: bool,
    /// PPT and moment-violating at once.
    pub bound_entangled_evidence: bool,
    pub de_vicente_value: f64,
}

/// Computes the correlation matrix, its moments, the separable fourth-moment
/// bound, and the minimal partial-transpose eigenvalue of a two-qutrit
/// state.
pub fn detect_bound_entanglement(rho: &DensityMatrix) -> Result<BoundEntanglementReport> {
    if rho.shape().dims() != [3, 3] {
        return Err(Error::ShapeMismatch("bound-entanglement detection needs two qutrits".into()));
    }
    let bloch = bloch_decomposition(rho)?;
    let moments = correlation_moments(&bloch.t, 3)?;
    let (bound, moment_violating) = match min_r4_given_r2(moments.r2, 3) {
        Ok(b) => {
            let violating = moments.r4 < b.bound;
            (Some(b.bound), violating)
        }
        Err(Error::InfeasibleMoment(_)) => (None, true),
        Err(e) => return Err(e),
    };
    let pt = partial_transpose(rho, 0)?;
    let min_pt_eigenvalue = eigvals_hermitian(&pt)?[0];
    let ppt = min_pt_eigenvalue >= -1e-10;
    Ok(BoundEntanglementReport {
        moments,
        bound,
        min_pt_eigenvalue,
        ppt,
        moment_violating,
        bound_entangled_evidence: ppt && moment_violating,
        de_vicente_value: de_vicente_value(&bloch.t),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{C64, PureState, SubsystemShape};
    use crate::states;
    use approx::assert_abs_diff_eq;

    #[test]
    fn a3_criterion_cases() {
        let ghz = criterion_a3(4.0, 0.0);
        assert!(ghz.violated);
        assert_eq!(ghz.z_score(), f64::INFINITY);
        let mixed = criterion_a3(0.0, 0.0);
        assert!(!mixed.violated);
        // Strict inequality at the threshold.
        let tie = criterion_a3(3.0, 0.1);
        assert!(!tie.violated);
    }

    #[test]
    fn strong_bisep_criterion_cases() {
        let ghz = criterion_strong_bisep(0.0, 3.0, 4.0, (0.0, 0.0, 0.0));
        assert_abs_diff_eq!(ghz.value, 4.0, epsilon = 1e-14);
        assert!(ghz.violated);
        assert_eq!(verdict_label(&ghz), "no fixed-partition biseparability (GME conjectured)");
        let mixed = criterion_strong_bisep(0.0, 0.0, 0.0, (0.0, 0.0, 0.0));
        assert_abs_diff_eq!(mixed.value, -3.0, epsilon = 1e-14);
        assert!(!mixed.violated);
    }

    #[test]
    fn strong_bisep_sign_pattern_on_ideal_family() {
        let value = |g: f64| {
            let rho = states::ghzw_mix(g).unwrap();
            let (a1, a2, a3) =
                crate::bloch::sector_lengths(&crate::bloch::pauli_coefficients(&rho).unwrap());
            criterion_strong_bisep(a1, a2, a3, (0.0, 0.0, 0.0)).value
        };
        // Sign changes exactly twice on a fine grid.
        let mut changes = 0;
        let mut prev = value(0.0);
        for k in 1..=100 {
            let v = value(k as f64 / 100.0);
            if v.signum() != prev.signum() {
                changes += 1;
            }
            prev = v;
        }
        assert_eq!(changes, 2);
        // Roots near the published boundaries.
        let root = |mut lo: f64, mut hi: f64| {
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if value(lo).signum() == value(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert!((root(0.1, 0.5) - 0.297).abs() < 1e-3);
        assert!((root(0.5, 0.9) - 0.612).abs() < 1e-3);
    }

    #[test]
    fn a3_criterion_window_on_ideal_family() {
        // Violated exactly where 4g² + 11(1-g)²/3 > 3.
        for k in 0..=20 {
            let g = k as f64 / 20.0;
            let rho = states::ghzw_mix(g).unwrap();
            let (_, _, a3) =
                crate::bloch::sector_lengths(&crate::bloch::pauli_coefficients(&rho).unwrap());
            let expect = 4.0 * g * g + 11.0 * (1.0 - g) * (1.0 - g) / 3.0 > 3.0;
            assert_eq!(criterion_a3(a3, 0.0).violated, expect, "g={g}");
        }
    }

    #[test]
    fn de_vicente_zero_and_product_cases() {
        assert_abs_diff_eq!(
            de_vicente_value(&CorrelationMatrix::zeros(8)),
            0.0,
            epsilon = 1e-14
        );
        let mut amp = vec![C64::new(0.0, 0.0); 9];
        amp[0] = C64::new(1.0, 0.0);
        let product = PureState::new(amp, SubsystemShape::new(vec![3, 3]).unwrap())
            .unwrap()
            .to_density();
        let b = bloch_decomposition(&product).unwrap();
        assert_abs_diff_eq!(de_vicente_value(&b.t), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn min_r4_trivial_and_infeasible_inputs() {
        let zero = min_r4_given_r2(0.0, 3).unwrap();
        assert_abs_diff_eq!(zero.bound, 0.0, epsilon = 1e-15);
        assert!(zero.optimal_singular_values.iter().all(|&v| v == 0.0));
        assert!(matches!(min_r4_given_r2(1.2, 3), Err(Error::InfeasibleMoment(_))));
        assert!(min_r4_given_r2(-0.1, 3).is_err());
    }

    #[test]
    fn min_r4_published_anchor() {
        let b = min_r4_given_r2(0.2355, 3).unwrap();
        assert!(
            (b.bound - 0.0277).abs() < 5e-4,
            "bound {} should sit at the published 0.0277",
            b.bound
        );
        // Feasibility of the optimizer output.
        let sum_sq: f64 = b.optimal_singular_values.iter().map(|v| v * v).sum();
        assert_abs_diff_eq!(sum_sq, 0.2355 * 4.0, epsilon = 1e-8);
        assert!(b.optimal_singular_values.iter().sum::<f64>() <= 2.0 + 1e-8);
    }

    #[test]
    fn min_r4_equal_spread_region() {
        // Small r2 where the trace-norm constraint is slack: the optimum is
        // the fully equal spread and the grid search agrees.
        let r2 = 0.1;
        let enumerated = min_r4_given_r2(r2, 3).unwrap();
        let c = 4.0 * r2;
        let expected_f: f64 = c * c / 8.0;
        let expected_bound = (c * c / 3.0 + 2.0 * expected_f / 3.0) / 16.0;
        assert_abs_diff_eq!(enumerated.bound, expected_bound, epsilon = 1e-12);
        let grid = min_r4_grid_search(r2, 3, 1e-3).unwrap();
        assert!(enumerated.bound <= grid.bound + 1e-9);
        assert!((enumerated.bound - grid.bound).abs() < 1e-6);
    }

    #[test]
    fn min_r4_monotone_in_r2() {
        let mut prev = -1.0;
        for k in 0..=100 {
            let r2 = k as f64 / 100.0;
            let b = min_r4_given_r2(r2, 3).unwrap();
            assert!(
                b.bound >= prev - 1e-12,
                "bound decreased at r2={r2}: {} < {prev}",
                b.bound
            );
            prev = b.bound;
        }
    }

    #[test]
    fn min_r4_optimum_is_feasible_and_achieves_bound() {
        for &r2 in &[0.05, 0.2355, 0.5, 0.9, 1.0] {
            let b = min_r4_given_r2(r2, 3).unwrap();
            let sum_sq: f64 = b.optimal_singular_values.iter().map(|v| v * v).sum();
            assert!((sum_sq - 4.0 * r2).abs() < 1e-8, "r2={r2}");
            assert!(b.optimal_singular_values.iter().sum::<f64>() <= 2.0 + 1e-8);
            assert!(b.optimal_singular_values.iter().all(|&v| v >= 0.0));
            let g2: f64 = b.optimal_singular_values.iter().map(|v| v.powi(4)).sum();
            let direct = (sum_sq * sum_sq / 3.0 + 2.0 * g2 / 3.0) / 16.0;
            assert_abs_diff_eq!(b.bound, direct, epsilon = 1e-9);
        }
    }

    #[test]
    fn solvers_agree_on_random_inputs() {
        let mut rng = stream_rng(99, 50, 0);
        for case in 0..20 {
            let r2: f64 = rng.gen_range(0.001..1.0);
            let a = min_r4_given_r2(r2, 3).unwrap();
            let b = min_r4_projected_gradient(r2, 3, 12, 1000 + case).unwrap();
            assert!(
                (a.bound - b.bound).abs() < 1e-6,
                "case {case} r2={r2}: {} vs {}",
                a.bound,
                b.bound
            );
            let g = min_r4_grid_search(r2, 3, 1e-3).unwrap();
            assert!(a.bound <= g.bound + 1e-9, "enumeration beats grid");
            assert!(b.bound <= g.bound + 1e-6, "gradient beats grid");
        }
    }

    #[test]
    fn detect_ideal_noisy_chessboard() {
        let rho = states::noisy_chessboard(0.1291).unwrap();
        let report = detect_bound_entanglement(&rho).unwrap();
        assert!(report.ppt, "min PT eigenvalue {}", report.min_pt_eigenvalue);
        assert!(report.moment_violating, "moments {:?} bound {:?}", report.moments, report.bound);
        assert!(report.bound_entangled_evidence);
    }

    #[test]
    fn detect_maximally_mixed_is_clean() {
        let rho = DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
        let report = detect_bound_entanglement(&rho).unwrap();
        assert!(report.ppt);
        // r2 = 0 means bound = 0 and no strict violation.
        assert!(!report.moment_violating);
        assert!(!report.bound_entangled_evidence);
    }

    #[test]
    fn detect_maximally_entangled_is_npt() {
        let c = C64::new(1.0 / 3.0_f64.sqrt(), 0.0);
        let mut amp = vec![C64::new(0.0, 0.0); 9];
        amp[0] = c;
        amp[4] = c;
        amp[8] = c;
        let psi = PureState::new(amp, SubsystemShape::new(vec![3, 3]).unwrap()).unwrap();
        let report = detect_bound_entanglement(&psi.to_density()).unwrap();
        assert!(!report.ppt);
        assert!(report.min_pt_eigenvalue < -0.3);
    }
}
