//! The randomized-measurement engine: Haar-random local unitaries,
//! finite-shot outcome sampling, and unbiased second-moment estimators,
//! plus an exact-expectation Monte Carlo oracle for the two-qutrit
//! correlation moments.
//!
//! Per-unitary work is keyed by `(seed, unitary index)` through independent
//! ChaCha streams, so results are bit-identical regardless of how the work
//! is scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;

use crate::bloch::bloch_decomposition;
use crate::invariants::correlation_moments;
use crate::linalg::{kron, kron_all, C64, ComplexMatrix, DensityMatrix, SubsystemShape};
use crate::states::random_ginibre;
use crate::{Error, Result};

const DOMAIN_UNITARY: u64 = 1;
const DOMAIN_ORACLE: u64 = 2;

/// Independent reproducible stream for task `index` of the given domain.
pub fn stream_rng(seed: u64, domain: u64, index: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) | index);
    rng
}

/// Diagonal observable measured on each party of a subset.
///
/// Qubits use `σ_z`; qutrits use `diag(√(3/2), 0, -√(3/2))`, the rescaled
/// diagonal Gell-Mann element whose moments connect to the correlation
/// matrix.
pub fn default_observable(d: usize) -> Result<Vec<f64>> {
    match d {
        2 => Ok(vec![1.0, -1.0]),
        3 => {
            let t = (1.5f64).sqrt();
            Ok(vec![t, 0.0, -t])
        }
        _ => Err(Error::InvalidParameter(format!(
            "no default local observable for dimension {d}; supply one explicitly"
        ))),
    }
}

/// Configuration of a randomized-measurement run.
#[derive(Clone, Debug)]
pub struct ProtocolConfig {
    /// Number of random local measurement settings (M).
    pub num_unitaries: usize,
    /// State copies measured per setting (N). The unbiased estimator divides
    /// by N-1, so N >= 2.
    pub shots_per_unitary: u64,
    /// Party subsets whose moments are extracted from the run.
    pub subsets: Vec<Vec<usize>>,
    pub seed: u64,
    /// Optional override of the per-party diagonal observable; must match the
    /// local dimension of every party it is applied to.
    pub observable: Option<Vec<f64>>,
}

impl ProtocolConfig {
    pub fn new(num_unitaries: usize, shots_per_unitary: u64, subsets: Vec<Vec<usize>>, seed: u64) -> Self {
        Self { num_unitaries, shots_per_unitary, subsets, seed, observable: None }
    }

    /// All seven non-empty subsets of a three-party system, singles first.
    pub fn all_three_party_subsets() -> Vec<Vec<usize>> {
        vec![
            vec![0],
            vec![1],
            vec![2],
            vec![0, 1],
            vec![0, 2],
            vec![1, 2],
            vec![0, 1, 2],
        ]
    }

    pub fn validate(&self, shape: &SubsystemShape) -> Result<()> {
        if self.num_unitaries == 0 {
            return Err(Error::InvalidParameter("need at least one unitary".into()));
        }
        if self.shots_per_unitary < 2 {
            return Err(Error::InvalidParameter(
                "need at least two shots per unitary (the estimator divides by N-1)".into(),
            ));
        }
        if self.subsets.is_empty() {
            return Err(Error::InvalidParameter("need at least one subset".into()));
        }
        for s in &self.subsets {
            if s.is_empty() {
                return Err(Error::InvalidParameter("subsets must be non-empty".into()));
            }
            for &p in s {
                shape.check_party(p)?;
            }
        }
        for &d in shape.dims() {
            match &self.observable {
                Some(tau) => {
                    if tau.len() != d {
                        return Err(Error::ShapeMismatch(format!(
                            "observable has {} eigenvalues but a party has dimension {d}",
                            tau.len()
                        )));
                    }
                }
                None => {
                    default_observable(d)?;
                }
            }
        }
        Ok(())
    }

    fn observable_for(&self, d: usize) -> Vec<f64> {
        match &self.observable {
            Some(tau) => tau.clone(),
            None => default_observable(d).expect("validated"),
        }
    }
}

/// Haar-random unitary of dimension `d`.
///
/// Ginibre matrix followed by Gram-Schmidt with real positive normalization,
/// which is QR with the R-diagonal phases absorbed into Q — the distribution
/// is exactly Haar, not merely approximately.
pub fn haar_unitary(d: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = random_ginibre(d, d, rng);
    // Columns of g, orthonormalized with a second pass for stability.
    let mut cols: Vec<Vec<C64>> = (0..d)
        .map(|j| (0..d).map(|i| g[(i, j)]).collect())
        .collect();
    for j in 0..d {
        for _pass in 0..2 {
            for k in 0..j {
                let proj: C64 = (0..d).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..d {
                    let delta = proj * cols[k][i];
                    cols[j][i] -= delta;
                }
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut cols[j] {
            *z /= norm;
        }
    }
    ComplexMatrix::from_fn(d, d, |i, j| cols[j][i])
}

/// Measurement outcome probabilities of `rho` after rotating each party by
/// its local unitary: `p_x = ⟨x| (U₁⊗…⊗Uₙ) ρ (U₁⊗…⊗Uₙ)† |x⟩`.
pub fn outcome_probabilities(
    rho: &DensityMatrix,
    unitaries: &[ComplexMatrix],
) -> Result<Vec<f64>> {
    let dims = rho.shape().dims();
    if unitaries.len() != dims.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} unitaries supplied for {} parties",
            unitaries.len(),
            dims.len()
        )));
    }
    for (u, &d) in unitaries.iter().zip(dims) {
        if u.rows() != d || u.cols() != d {
            return Err(Error::ShapeMismatch(format!(
                "unitary is {}x{} but the party has dimension {d}",
                u.rows(),
                u.cols()
            )));
        }
    }
    let u = kron_all(unitaries);
    let rotated = u.mul(rho.matrix()).mul(&u.adjoint());
    Ok((0..rotated.rows()).map(|i| rotated[(i, i)].re.max(0.0)).collect())
}

/// Event counts per outcome of a fixed measurement setting.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotCounts {
    counts: Vec<u64>,
    total: u64,
}

impl ShotCounts {
    pub fn new(counts: Vec<u64>) -> Self {
        let total = counts.iter().sum();
        Self { counts, total }
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    /// Sums counts into categories; `category[i]` is the category of
    /// outcome `i`.
    pub fn grouped(&self, category: &[usize], num_categories: usize) -> ShotCounts {
        let mut out = vec![0u64; num_categories];
        for (i, &c) in self.counts.iter().enumerate() {
            out[category[i]] += c;
        }
        ShotCounts::new(out)
    }
}

/// Multinomial draw of `n` events from `probs`, via a chain of binomials.
pub fn sample_counts(probs: &[f64], n: u64, rng: &mut impl Rng) -> Result<ShotCounts> {
    if probs.iter().any(|&p| !(0.0..=1.0 + 1e-9).contains(&p)) {
        return Err(Error::InvalidProbabilities("entries outside [0,1]".into()));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-8 {
        return Err(Error::InvalidProbabilities(format!("sum is {sum}, expected 1")));
    }
    let mut counts = vec![0u64; probs.len()];
    let mut remaining = n;
    let mut mass_left = 1.0f64;
    for (i, &p) in probs.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        if i + 1 == probs.len() || mass_left <= 0.0 {
            counts[i] = remaining;
            remaining = 0;
            break;
        }
        let q = (p / mass_left).clamp(0.0, 1.0);
        let draw = if q >= 1.0 {
            remaining
        } else {
            Binomial::new(remaining, q)
                .expect("q in [0,1]")
                .sample(rng)
        };
        counts[i] = draw;
        remaining -= draw;
        mass_left -= p;
    }
    if remaining > 0 {
        let last = counts.len() - 1;
        counts[last] += remaining;
    }
    Ok(ShotCounts::new(counts))
}

/// Unbiased estimator of the squared expectation `(Σ Xᵢ pᵢ)²` from a single
/// setting's counts:
///
/// `Ẽ² = Σᵢ Xᵢ² p̃ᵢ² + 2 Σ_{i<j} XᵢXⱼ p̃ᵢpⱼ`, with
/// `p̃ᵢ² = (N p̃ᵢ² - p̃ᵢ)/(N-1)` and `p̃ᵢpⱼ = N/(N-1) · p̃ᵢ p̃ⱼ`.
///
/// The estimate may legitimately be negative for small `N`.
pub fn unbiased_e2(counts: &ShotCounts, outcome_values: &[f64]) -> Result<f64> {
    if counts.counts().len() != outcome_values.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} counts vs {} outcome values",
            counts.counts().len(),
            outcome_values.len()
        )));
    }
    let n = counts.total();
    if n < 2 {
        return Err(Error::InvalidParameter("the unbiased estimator needs N >= 2".into()));
    }
    let nf = n as f64;
    let p_hat: Vec<f64> = counts.counts().iter().map(|&c| c as f64 / nf).collect();
    let mut e2 = 0.0;
    for (i, (&x, &p)) in outcome_values.iter().zip(&p_hat).enumerate() {
        e2 += x * x * (nf * p * p - p) / (nf - 1.0);
        for (j, (&y, &q)) in outcome_values.iter().zip(&p_hat).enumerate() {
            if j > i {
                e2 += 2.0 * x * y * (nf / (nf - 1.0)) * p * q;
            }
        }
    }
    Ok(e2)
}

/// Estimated moment with its standard error and run provenance.
#[derive(Clone, Debug)]
pub struct MomentEstimate {
    pub value: f64,
    /// Empirical standard deviation of the per-unitary estimates over √M.
    pub std_error: f64,
    pub num_unitaries: usize,
    pub shots_per_unitary: u64,
    pub seed: u64,
}

/// Outcome-to-category table for one subset: parties outside the subset are
/// marginalized by summing counts that share the same product of observable
/// eigenvalues.
struct SubsetGrouping {
    category_of_outcome: Vec<usize>,
    category_values: Vec<f64>,
}

fn build_grouping(shape: &SubsystemShape, subset: &[usize], cfg: &ProtocolConfig) -> SubsetGrouping {
    let total = shape.total_dim();
    let taus: Vec<Vec<f64>> = shape.dims().iter().map(|&d| cfg.observable_for(d)).collect();
    let mut category_values: Vec<f64> = Vec::new();
    let mut category_of_outcome = Vec::with_capacity(total);
    for x in 0..total {
        let multi = shape.multi(x);
        let mut value = 1.0f64;
        for &p in subset {
            value *= taus[p][multi[p]];
        }
        if value == 0.0 {
            value = 0.0; // canonicalize -0.0
        }
        let cat = match category_values.iter().position(|&v| v == value) {
            Some(c) => c,
            None => {
                category_values.push(value);
                category_values.len() - 1
            }
        };
        category_of_outcome.push(cat);
    }
    SubsetGrouping { category_of_outcome, category_values }
}

/// Runs the protocol once and extracts one moment estimate per configured
/// subset, all from the same measurement data.
pub fn estimate_moments(rho: &DensityMatrix, cfg: &ProtocolConfig) -> Result<Vec<MomentEstimate>> {
    cfg.validate(rho.shape())?;
    let shape = rho.shape();
    let groupings: Vec<SubsetGrouping> =
        cfg.subsets.iter().map(|s| build_grouping(shape, s, cfg)).collect();
    let dims: Vec<usize> = shape.dims().to_vec();

    let per_unitary: Vec<Vec<f64>> = (0..cfg.num_unitaries)
        .into_par_iter()
        .map(|m| {
            let mut rng = stream_rng(cfg.seed, DOMAIN_UNITARY, m as u64);
            let us: Vec<ComplexMatrix> =
                dims.iter().map(|&d| haar_unitary(d, &mut rng)).collect();
            let probs = outcome_probabilities(rho, &us).expect("validated dimensions");
            let counts =
                sample_counts(&probs, cfg.shots_per_unitary, &mut rng).expect("valid probs");
            groupings
                .iter()
                .map(|g| {
                    let grouped = counts.grouped(&g.category_of_outcome, g.category_values.len());
                    unbiased_e2(&grouped, &g.category_values).expect("N >= 2")
                })
                .collect()
        })
        .collect();

    // Deterministic reduction in unitary order.
    let m = cfg.num_unitaries as f64;
    Ok((0..cfg.subsets.len())
        .map(|s| {
            let mean = per_unitary.iter().map(|row| row[s]).sum::<f64>() / m;
            let std_error = if cfg.num_unitaries > 1 {
                let var = per_unitary
                    .iter()
                    .map(|row| (row[s] - mean) * (row[s] - mean))
                    .sum::<f64>()
                    / (m - 1.0);
                (var / m).sqrt()
            } else {
                0.0
            };
            MomentEstimate {
                value: mean,
                std_error,
                num_unitaries: cfg.num_unitaries,
                shots_per_unitary: cfg.shots_per_unitary,
                seed: cfg.seed,
            }
        })
        .collect())
}

/// Second-moment estimate for a single subset.
pub fn estimate_r2(
    rho: &DensityMatrix,
    subset: &[usize],
    cfg: &ProtocolConfig,
) -> Result<MomentEstimate> {
    let mut cfg = cfg.clone();
    cfg.subsets = vec![subset.to_vec()];
    Ok(estimate_moments(rho, &cfg)?.remove(0))
}

/// Exact second moment of a three-qubit state for one subset:
/// `R_S = 3^{-|S|} · Σ α²` over Pauli coefficients supported exactly on `S`.
pub fn analytic_r2(rho: &DensityMatrix, subset: &[usize]) -> Result<f64> {
    if rho.shape().dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch("analytic moments require a three-qubit state".into()));
    }
    if subset.is_empty() {
        return Err(Error::InvalidParameter("subset must be non-empty".into()));
    }
    for &p in subset {
        rho.shape().check_party(p)?;
    }
    let coeffs = crate::bloch::pauli_coefficients(rho)?;
    let in_subset = |p: usize| subset.contains(&p);
    let mut sum = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                let support = [i != 0, j != 0, k != 0];
                let matches =
                    (0..3).all(|p| support[p] == in_subset(p));
                if matches && (i, j, k) != (0, 0, 0) {
                    let c = coeffs.get(i, j, k);
                    sum += c * c;
                }
            }
        }
    }
    Ok(sum / 3f64.powi(subset.len() as i32))
}

/// A value with a propagated standard error.
#[derive(Clone, Copy, Debug)]
pub struct ValueWithError {
    pub value: f64,
    pub std_error: f64,
}

/// Estimated sector lengths of a three-qubit state.
#[derive(Clone, Debug)]
pub struct SectorLengthEstimate {
    pub a1: ValueWithError,
    pub a2: ValueWithError,
    pub a3: ValueWithError,
    pub num_unitaries: usize,
    pub shots_per_unitary: u64,
    pub seed: u64,
}

/// Estimates all three sector lengths from a single randomized run:
/// `A₁ = 3(R_A+R_B+R_C)`, `A₂ = 9(R_AB+R_AC+R_BC)`, `A₃ = 27·R_ABC`,
/// errors propagated in quadrature.
pub fn estimate_sector_lengths(
    rho: &DensityMatrix,
    cfg: &ProtocolConfig,
) -> Result<SectorLengthEstimate> {
    if rho.shape().dims() != [2, 2, 2] {
        return Err(Error::ShapeMismatch("sector lengths require a three-qubit state".into()));
    }
    let mut cfg = cfg.clone();
    cfg.subsets = ProtocolConfig::all_three_party_subsets();
    let moments = estimate_moments(rho, &cfg)?;
    let combine = |idx: &[usize], w: f64| -> ValueWithError {
        let value = w * idx.iter().map(|&i| moments[i].value).sum::<f64>();
        let var = idx.iter().map(|&i| moments[i].std_error.powi(2)).sum::<f64>();
        ValueWithError { value, std_error: w * var.sqrt() }
    };
    Ok(SectorLengthEstimate {
        a1: combine(&[0, 1, 2], 3.0),
        a2: combine(&[3, 4, 5], 9.0),
        a3: combine(&[6], 27.0),
        num_unitaries: cfg.num_unitaries,
        shots_per_unitary: cfg.shots_per_unitary,
        seed: cfg.seed,
    })
}

/// Monte Carlo estimate of the two-qutrit correlation moments, with the raw
/// Haar averages it was derived from.
#[derive(Clone, Debug)]
pub struct PairMomentEstimate {
    pub r2: ValueWithError,
    pub r4: ValueWithError,
    /// Raw Haar averages of E² and E⁴ before rescaling.
    pub raw_m2: f64,
    pub raw_m4: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Scale factors connecting raw Haar averages of the two-qutrit correlation
/// `E = ⟨U₁τU₁† ⊗ U₂τU₂†⟩` (with `τ = diag(√(3/2), 0, -√(3/2))`) to the
/// normalized moments:
/// `R⁽²⁾ = 16·E[E²]` and `R⁽⁴⁾ = (400/9)·E[E⁴]`.
///
/// Both identities are exact. Writing `E = aᵀT b` with `a`, `b` the unit
/// Bloch vectors of the rotated observables, invariance of the adjoint
/// action gives `E[a aᵀ] = I/8`; for dimension 3 the symmetric invariant
/// 4-tensors form a one-dimensional space, so `E[aᵢaⱼaₖaₗ]` is the
/// symmetrized delta over 80, which evaluates the fourth moment to
/// `(3·tr(TTᵀ)² + 6·tr((TTᵀ)²))/6400`.
pub const QUTRIT_R2_SCALE: f64 = 16.0;
pub const QUTRIT_R4_SCALE: f64 = 400.0 / 9.0;

/// Exact-expectation Haar Monte Carlo oracle for the two-qutrit moments:
/// samples random settings, evaluates `E` exactly on the state (no shot
/// noise), and rescales the E²/E⁴ averages to the normalized moments.
pub fn haar_pair_moments(
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
) -> Result<PairMomentEstimate> {
    if rho.shape().dims() != [3, 3] {
        return Err(Error::ShapeMismatch("the moment oracle requires a two-qutrit state".into()));
    }
    if samples < 2 {
        return Err(Error::InvalidParameter("need at least two oracle samples".into()));
    }
    let tau_vals = default_observable(3)?;
    let tau = {
        let mut m = ComplexMatrix::zeros(3, 3);
        for (i, &v) in tau_vals.iter().enumerate() {
            m[(i, i)] = C64::new(v, 0.0);
        }
        m
    };

    let moments: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = stream_rng(seed, DOMAIN_ORACLE, i as u64);
            let u1 = haar_unitary(3, &mut rng);
            let u2 = haar_unitary(3, &mut rng);
            let a = u1.mul(&tau).mul(&u1.adjoint());
            let b = u2.mul(&tau).mul(&u2.adjoint());
            let ab = kron(&a, &b);
            let mut e = 0.0f64;
            for x in 0..9 {
                for y in 0..9 {
                    let z = rho.matrix()[(x, y)] * ab[(y, x)];
                    e += z.re;
                }
            }
            (e * e, e * e * e * e)
        })
        .collect();

    let m = samples as f64;
    let m2 = moments.iter().map(|p| p.0).sum::<f64>() / m;
    let m4 = moments.iter().map(|p| p.1).sum::<f64>() / m;
    let var2 = moments.iter().map(|p| (p.0 - m2) * (p.0 - m2)).sum::<f64>() / (m - 1.0);
    let var4 = moments.iter().map(|p| (p.1 - m4) * (p.1 - m4)).sum::<f64>() / (m - 1.0);
    Ok(PairMomentEstimate {
        r2: ValueWithError { value: QUTRIT_R2_SCALE * m2, std_error: QUTRIT_R2_SCALE * (var2 / m).sqrt() },
        r4: ValueWithError { value: QUTRIT_R4_SCALE * m4, std_error: QUTRIT_R4_SCALE * (var4 / m).sqrt() },
        raw_m2: m2,
        raw_m4: m4,
        samples,
        seed,
    })
}

/// Result of checking the analytic moment formulas against the Haar oracle.
#[derive(Clone, Debug)]
pub struct MomentConsistency {
    pub analytic_r2: f64,
    pub analytic_r4: f64,
    pub oracle: PairMomentEstimate,
    pub z2: f64,
    pub z4: f64,
}

/// Compares the correlation-matrix moments of a two-qutrit state with the
/// Haar Monte Carlo oracle. Disagreement beyond `z_threshold` standard
/// errors is surfaced as an error, never silently corrected.
pub fn check_moment_consistency(
    rho: &DensityMatrix,
    samples: usize,
    seed: u64,
    z_threshold: f64,
) -> Result<MomentConsistency> {
    let bloch = bloch_decomposition(rho)?;
    let analytic = correlation_moments(&bloch.t, bloch.d)?;
    let oracle = haar_pair_moments(rho, samples, seed)?;
    let z2 = (analytic.r2 - oracle.r2.value).abs() / oracle.r2.std_error.max(f64::MIN_POSITIVE);
    let z4 = (analytic.r4 - oracle.r4.value).abs() / oracle.r4.std_error.max(f64::MIN_POSITIVE);
    let report = MomentConsistency {
        analytic_r2: analytic.r2,
        analytic_r4: analytic.r4,
        oracle,
        z2,
        z4,
    };
    if z2 > z_threshold || z4 > z_threshold {
        return Err(Error::NumericalConsistency(format!(
            "moment formulas disagree with the Haar oracle: z2={z2:.2}, z4={z4:.2} (threshold {z_threshold})"
        )));
    }
    Ok(report)
}
