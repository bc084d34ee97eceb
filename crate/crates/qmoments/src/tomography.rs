//! Simulated two-qutrit state tomography: the 81 product settings, count
//! simulation with white noise, linear inversion, iterative
//! maximum-likelihood reconstruction, noise-level estimation, and bootstrap
//! error bars.
//!
//! Counts follow a Poisson model per setting (photon counting with a fixed
//! collection time). White noise enters as state mixing; because noise
//! photons add events on top of the signal, the effective exposure grows as
//! `1/(1-p)` while the signal rate stays fixed. That keeps the total-count
//! ratio estimator of the noise level consistent.

use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;

use crate::bloch::gell_mann_basis;
use crate::linalg::{
    eigh, kron, C64, ComplexMatrix, DensityMatrix, PureState, SubsystemShape,
};
use crate::{Error, Result};

const DOMAIN_SIMULATE: u64 = 3;
const DOMAIN_BOOTSTRAP: u64 = 4;

/// One of the 81 product measurement settings, indexing the basis kets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TomographySetting {
    pub left: usize,
    pub right: usize,
}

/// Recorded coincidences for one setting. `exposure` is the expected number
/// of events the setting would record at unit outcome probability.
#[derive(Clone, Debug, PartialEq)]
pub struct CountRecord {
    pub setting: TomographySetting,
    pub count: u64,
    pub exposure: f64,
}

/// The nine single-qutrit tomography kets.
pub fn tomography_bases() -> [PureState; 9] {
    let shape = SubsystemShape::new(vec![3]).unwrap();
    let z = |re: f64, im: f64| C64::new(re, im);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let build = |entries: [(usize, C64); 2]| {
        let mut amp = vec![z(0.0, 0.0); 3];
        for (i, v) in entries {
            amp[i] = v;
        }
        PureState::new(amp, shape.clone()).unwrap()
    };
    [
        build([(0, z(1.0, 0.0)), (0, z(1.0, 0.0))]),
        build([(1, z(1.0, 0.0)), (1, z(1.0, 0.0))]),
        build([(2, z(1.0, 0.0)), (2, z(1.0, 0.0))]),
        build([(0, z(s, 0.0)), (1, z(s, 0.0))]),
        build([(0, z(s, 0.0)), (1, z(0.0, s))]),
        build([(1, z(s, 0.0)), (2, z(s, 0.0))]),
        build([(1, z(s, 0.0)), (2, z(0.0, s))]),
        build([(0, z(s, 0.0)), (2, z(s, 0.0))]),
        build([(0, z(s, 0.0)), (2, z(0.0, s))]),
    ]
}

/// All 81 settings in row-major order.
pub fn all_settings() -> Vec<TomographySetting> {
    let mut out = Vec::with_capacity(81);
    for left in 0..9 {
        for right in 0..9 {
            out.push(TomographySetting { left, right });
        }
    }
    out
}

/// Product kets `|u_left⟩ ⊗ |u_right⟩` of every setting, in setting order.
fn setting_kets() -> Vec<Vec<C64>> {
    let bases = tomography_bases();
    let mut out = Vec::with_capacity(81);
    for s in all_settings() {
        let l = bases[s.left].amplitudes();
        let r = bases[s.right].amplitudes();
        let mut amp = Vec::with_capacity(9);
        for a in l {
            for b in r {
                amp.push(a * b);
            }
        }
        out.push(amp);
    }
    out
}

fn ket_expectation(rho: &ComplexMatrix, ket: &[C64]) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for (i, a) in ket.iter().enumerate() {
        for (j, b) in ket.iter().enumerate() {
            acc += a.conj() * rho[(i, j)] * b;
        }
    }
    acc.re.max(0.0)
}

fn check_two_qutrits(rho: &DensityMatrix) -> Result<()> {
    if rho.shape().dims() != [3, 3] {
        return Err(Error::ShapeMismatch("tomography is defined for two qutrits".into()));
    }
    Ok(())
}

/// Expected counts per setting for a state measured at the given noise
/// level: `exposure(p)·⟨u_i u_j| ρ(p) |u_i u_j⟩` with
/// `ρ(p) = (1-p)ρ + p·I/9` and `exposure(p) = shots/(1-p)`.
pub fn expected_counts(
    rho: &DensityMatrix,
    shots_per_setting: u64,
    noise_p: f64,
) -> Result<Vec<(TomographySetting, f64)>> {
    check_two_qutrits(rho)?;
    if !(0.0..1.0).contains(&noise_p) {
        return Err(Error::InvalidParameter(format!(
            "noise level p={noise_p} outside [0,1) (the fixed-time count model diverges at p=1)"
        )));
    }
    let mixed = DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
    let noisy = rho.mix(&mixed, 1.0 - noise_p)?;
    let exposure = shots_per_setting as f64 / (1.0 - noise_p);
    Ok(all_settings()
        .into_iter()
        .zip(setting_kets())
        .map(|(s, ket)| (s, exposure * ket_expectation(noisy.matrix(), &ket)))
        .collect())
}

/// Simulates one tomography run: an independent Poisson draw per setting.
pub fn simulate_tomography_counts(
    rho: &DensityMatrix,
    shots_per_setting: u64,
    noise_p: f64,
    seed: u64,
) -> Result<Vec<CountRecord>> {
    let expected = expected_counts(rho, shots_per_setting, noise_p)?;
    let exposure = shots_per_setting as f64 / (1.0 - noise_p);
    Ok(expected
        .into_iter()
        .enumerate()
        .map(|(i, (setting, mu))| {
            let mut rng = crate::protocol::stream_rng(seed, DOMAIN_SIMULATE, i as u64);
            let count = draw_poisson(mu, &mut rng);
            CountRecord { setting, count, exposure }
        })
        .collect())
}

fn draw_poisson(mu: f64, rng: &mut ChaCha12Rng) -> u64 {
    if mu <= 0.0 {
        return 0;
    }
    Poisson::new(mu).expect("positive mean").sample(rng) as u64
}

/// Accumulates possibly repeated records into per-setting frequencies.
fn frequencies(records: &[CountRecord]) -> Result<Vec<(TomographySetting, f64, f64)>> {
    if records.is_empty() {
        return Err(Error::RankDeficient("no measurement records".into()));
    }
    let mut acc: Vec<(f64, f64)> = vec![(0.0, 0.0); 81];
    for r in records {
        if r.setting.left >= 9 || r.setting.right >= 9 {
            return Err(Error::InvalidParameter(format!(
                "setting ({}, {}) out of range",
                r.setting.left, r.setting.right
            )));
        }
        let slot = r.setting.left * 9 + r.setting.right;
        acc[slot].0 += r.count as f64;
        acc[slot].1 += r.exposure;
    }
    Ok(all_settings()
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, acc[i].0, acc[i].1))
        .collect())
}

/// Least-squares estimate of the state from the projector-expectation
/// system. The output is Hermitian with unit trace but not necessarily
/// positive semidefinite.
pub fn linear_inversion(records: &[CountRecord]) -> Result<ComplexMatrix> {
    let freq = frequencies(records)?;
    let covered = freq.iter().filter(|(_, _, e)| *e > 0.0).count();
    if covered < 81 {
        return Err(Error::RankDeficient(format!(
            "only {covered} of 81 settings have exposure"
        )));
    }

    // Hermitian product basis: (μ_a ⊗ μ_b) with μ_0 = I and the rescaled
    // Gell-Mann operators, tr(B_k B_l) = 9 δ_kl.
    let gm = gell_mann_basis(3)?;
    let mut ops: Vec<ComplexMatrix> = Vec::with_capacity(9);
    ops.push(ComplexMatrix::identity(3));
    ops.extend(gm.operators().iter().cloned());

    let kets = setting_kets();
    let mut design = nalgebra::DMatrix::<f64>::zeros(81, 80);
    let mut target = nalgebra::DVector::<f64>::zeros(81);
    for (row, (s, counts, exposure)) in freq.iter().enumerate() {
        let p_hat = counts / exposure;
        let ket = &kets[s.left * 9 + s.right];
        let mut col = 0;
        for a in 0..9 {
            for b in 0..9 {
                if (a, b) == (0, 0) {
                    continue;
                }
                let op = kron(&ops[a], &ops[b]);
                let mut val = C64::new(0.0, 0.0);
                for (i, x) in ket.iter().enumerate() {
                    for (j, y) in ket.iter().enumerate() {
                        val += x.conj() * op[(i, j)] * y;
                    }
                }
                design[(row, col)] = val.re / 9.0;
                col += 1;
            }
        }
        target[row] = p_hat - 1.0 / 9.0;
    }

    let svd = nalgebra::SVD::new(design.clone(), true, true);
    let rank = svd.singular_values.iter().filter(|&&v| v > 1e-9).count();
    if rank < 80 {
        return Err(Error::RankDeficient(format!(
            "projector system has rank {rank} < 80"
        )));
    }
    let coeffs = svd
        .solve(&target, 1e-12)
        .map_err(|e| Error::RankDeficient(e.to_string()))?;

    let mut mat = kron(&ops[0], &ops[0]);
    let mut col = 0;
    for a in 0..9 {
        for b in 0..9 {
            if (a, b) == (0, 0) {
                continue;
            }
            mat = mat.add(&kron(&ops[a], &ops[b]).scale(C64::new(coeffs[col], 0.0)));
            col += 1;
        }
    }
    Ok(mat.scale(C64::new(1.0 / 9.0, 0.0)))
}

/// Output of the iterative maximum-likelihood reconstruction.
#[derive(Clone, Debug)]
pub struct ReconstructionResult {
    pub rho_hat: DensityMatrix,
    /// Multinomial log-likelihood over the normalized setting frequencies.
    pub log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Diluted iterative RρR ascent of the multinomial likelihood.
///
/// The 81 projectors do not sum to the identity, so the iteration runs in
/// the frame `σ = G^{1/2} ρ G^{1/2}/tr(Gρ)` with `G = Σ P_s`, where the
/// transformed elements form a proper POVM and the true state is the fixed
/// point. On stagnation the update is damped by mixing R with the identity
/// (factor 0.5), which keeps the likelihood non-decreasing.
pub fn mle_reconstruct(
    records: &[CountRecord],
    max_iter: usize,
    tol: f64,
) -> Result<ReconstructionResult> {
    let freq = frequencies(records)?;
    let total: f64 = freq.iter().map(|(_, c, _)| *c).sum();
    if total <= 0.0 {
        return Err(Error::RankDeficient("all counts are zero".into()));
    }
    let fractions: Vec<f64> = freq.iter().map(|(_, c, _)| c / total).collect();

    // G = Σ_s P_s and its inverse square root.
    let kets = setting_kets();
    let mut g = ComplexMatrix::zeros(9, 9);
    for ket in &kets {
        for i in 0..9 {
            for j in 0..9 {
                g[(i, j)] += ket[i] * ket[j].conj();
            }
        }
    }
    let (g_evals, g_evecs) = eigh(&g)?;
    if g_evals[0] <= 1e-12 {
        return Err(Error::RankDeficient("setting sum operator is singular".into()));
    }
    let g_pow = |power: f64| -> ComplexMatrix {
        let mut diag = ComplexMatrix::zeros(9, 9);
        for (i, &v) in g_evals.iter().enumerate() {
            diag[(i, i)] = C64::new(v.powf(power), 0.0);
        }
        g_evecs.mul(&diag).mul(&g_evecs.adjoint())
    };
    let g_inv_sqrt = g_pow(-0.5);

    // POVM kets w_s = G^{-1/2} v_s; Σ_s |w_s⟩⟨w_s| = I.
    let povm_kets: Vec<Vec<C64>> = kets.iter().map(|k| g_inv_sqrt.mul_vec(k)).collect();

    // Start from the maximally mixed state mapped into the POVM frame.
    let mut sigma = g.scale(C64::new(1.0 / g.trace().re, 0.0));

    let likelihood = |sigma: &ComplexMatrix| -> (f64, Vec<f64>) {
        let q: Vec<f64> = povm_kets.iter().map(|w| ket_expectation(sigma, w).max(1e-300)).collect();
        let ll = fractions
            .iter()
            .zip(&q)
            .filter(|(f, _)| **f > 0.0)
            .map(|(f, qs)| total * f * qs.ln())
            .sum();
        (ll, q)
    };

    let (mut ll, mut q) = likelihood(&sigma);
    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        // R = Σ_s (f_s/q_s) |w_s⟩⟨w_s|.
        let mut r = ComplexMatrix::zeros(9, 9);
        for (s, w) in povm_kets.iter().enumerate() {
            let weight = fractions[s] / q[s];
            if weight == 0.0 {
                continue;
            }
            for i in 0..9 {
                for j in 0..9 {
                    r[(i, j)] += w[i] * w[j].conj() * C64::new(weight, 0.0);
                }
            }
        }
        let mut accepted = false;
        let mut r_step = r;
        for _damp in 0..60 {
            let candidate = r_step.mul(&sigma).mul(&r_step);
            let tr = candidate.trace().re;
            let candidate = candidate.scale(C64::new(1.0 / tr, 0.0)).hermitized();
            let (ll_new, q_new) = likelihood(&candidate);
            if ll_new >= ll - 1e-12 {
                let gain = ll_new - ll;
                sigma = candidate;
                ll = ll_new;
                q = q_new;
                accepted = true;
                if gain.abs() < tol {
                    converged = true;
                }
                break;
            }
            // Dilute towards the identity on stagnation.
            let id = ComplexMatrix::identity(9);
            r_step = r_step.scale(C64::new(0.5, 0.0)).add(&id.scale(C64::new(0.5, 0.0)));
        }
        if !accepted || converged {
            converged = converged || !accepted;
            break;
        }
    }

    // Back to the physical frame.
    let rho = g_inv_sqrt.mul(&sigma).mul(&g_inv_sqrt);
    let tr = rho.trace().re;
    let rho = rho.scale(C64::new(1.0 / tr, 0.0)).hermitized();
    let rho_hat = DensityMatrix::new(rho, SubsystemShape::new(vec![3, 3])?)?;
    Ok(ReconstructionResult { rho_hat, log_likelihood: ll, iterations, converged })
}

/// Noise level from total coincidence counts with and without the noise
/// source: `p = 1 - N₀/N_p`.
pub fn noise_level_estimate(n_with_noise: f64, n_without: f64) -> Result<f64> {
    if n_with_noise <= 0.0 || n_without <= 0.0 {
        return Err(Error::InvalidParameter("counts must be positive".into()));
    }
    if n_without > n_with_noise {
        return Err(Error::InvalidParameter(
            "noise adds counts: expected n_without <= n_with_noise".into(),
        ));
    }
    Ok(1.0 - n_without / n_with_noise)
}

/// Total counts over a record set.
pub fn total_counts(records: &[CountRecord]) -> f64 {
    records.iter().map(|r| r.count as f64).sum()
}

/// Parametric bootstrap: resamples every record from a Poisson distribution
/// centered at the observed count, recomputes the statistic per replica, and
/// returns the (mean, standard deviation) over replicas.
pub fn bootstrap_errorbars<F>(
    records: &[CountRecord],
    replicas: usize,
    seed: u64,
    statistic: F,
) -> Result<(f64, f64)>
where
    F: Fn(&[CountRecord]) -> Result<f64> + Sync,
{
    if replicas < 2 {
        return Err(Error::InvalidParameter("need at least two bootstrap replicas".into()));
    }
    let values: Vec<f64> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut
                rng = crate::protocol::stream_rng(seed, DOMAIN_BOOTSTRAP, r as u64);
            let resampled: Vec<CountRecord> = records
                .iter()
                .map(|rec| CountRecord {
                    setting: rec.setting,
                    count: draw_poisson(rec.count as f64, &mut rng),
                    exposure: rec.exposure,
                })
                .collect();
            statistic(&resampled)
        })
        .collect::<Result<Vec<f64>>>()?;
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    Ok((mean, var.sqrt()))
}

/// Serializes records as CSV with columns
/// `setting_left,setting_right,count,exposure`.
pub fn records_to_csv(records: &[CountRecord]) -> String {
    let mut out = String::from("setting_left,setting_right,count,exposure\n");
    for r in records {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.setting.left, r.setting.right, r.count, r.exposure
        ));
    }
    out
}

/// Parses the CSV format written by [`records_to_csv`].
pub fn records_from_csv(text: &str) -> Result<Vec<CountRecord>> {
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| Error::Parse("empty record file".into()))?;
    if header.trim() != "setting_left,setting_right,count,exposure" {
        return Err(Error::Parse(format!("unexpected header: {header}")));
    }
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::Parse(format!("line {}: expected 4 fields", lineno + 2)));
        }
        let parse_usize = |s: &str| {
            s.trim().parse::<usize>().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))
        };
        let left = parse_usize(fields[0])?;
        let right = parse_usize(fields[1])?;
        let count = fields[2]
            .trim()
            .parse::<u64>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        let exposure = fields[3]
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
        records.push(CountRecord { setting: TomographySetting { left, right }, count, exposure });
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fidelity;
    use crate::states;
    use approx::assert_abs_diff_eq;

    fn exact_records(rho: &DensityMatrix, scale: f64) -> Vec<CountRecord> {
        expected_counts(rho, 1, 0.0)
            .unwrap()
            .into_iter()
            .map(|(setting, mu)| CountRecord {
                setting,
                count: (mu * scale).round() as u64,
                exposure: scale,
            })
            .collect()
    }

    #[test]
    fn bases_match_published_kets() {
        let bases = tomography_bases();
        assert_abs_diff_eq!(bases[0].amplitudes()[0].re, 1.0, epsilon = 1e-15);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(bases[4].amplitudes()[0].re, s, epsilon = 1e-15);
        assert_abs_diff_eq!(bases[4].amplitudes()[1].im, s, epsilon = 1e-15);
        for b in &bases {
            assert_abs_diff_eq!(b.inner(b).re, 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn settings_are_informationally_complete() {
        // Gram matrix of the 81 rank-1 projectors is nonsingular.
        let kets = setting_kets();
        let mut gram = nalgebra::DMatrix::<f64>::zeros(81, 81);
        for (i, a) in kets.iter().enumerate() {
            for (j, b) in kets.iter().enumerate() {
                let overlap: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                gram[(i, j)] = overlap.norm_sqr();
            }
        }
        let svd = nalgebra::SVD::new(gram, false, false);
        let min_sv = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!(min_sv > 1e-6, "Gram matrix nearly singular: {min_sv}");
    }

    #[test]
    fn expected_counts_identity_cases() {
        let mut amp = vec![C64::new(0.0, 0.0); 9];
        amp[0] = C64::new(1.0, 0.0);
        let zero = PureState::new(amp, SubsystemShape::new(vec![3, 3]).unwrap())
            .unwrap()
            .to_density();
        let expected = expected_counts(&zero, 1000, 0.0).unwrap();
        // Setting (0,0) projects onto |00⟩.
        assert_abs_diff_eq!(expected[0].1, 1000.0, epsilon = 1e-9);

        let mixed = DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
        let expected = expected_counts(&mixed, 900, 0.0).unwrap();
        for (_, mu) in expected {
            assert_abs_diff_eq!(mu, 100.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn simulation_is_seed_deterministic() {
        let rho = states::chessboard_state();
        let a = simulate_tomography_counts(&rho, 500, 0.05, 9).unwrap();
        let b = simulate_tomography_counts(&rho, 500, 0.05, 9).unwrap();
        assert_eq!(a, b);
        let c = simulate_tomography_counts(&rho, 500, 0.05, 10).unwrap();
        assert_ne!(a, c);
        assert!(simulate_tomography_counts(&rho, 500, 1.0, 9).is_err());
        assert!(simulate_tomography_counts(&rho, 500, -0.1, 9).is_err());
    }

    #[test]
    fn linear_inversion_recovers_exact_probabilities() {
        let rho = states::noisy_chessboard(0.07).unwrap();
        let records = exact_records(&rho, 1e12);
        let est = linear_inversion(&records).unwrap();
        assert!(est.max_abs_diff(rho.matrix()) < 1e-9);
        assert!((est.trace().re - 1.0).abs() < 1e-12);
        assert!(est.is_hermitian(1e-12));
    }

    #[test]
    fn linear_inversion_of_uniform_counts() {
        let mixed = DensityMatrix::maximally_mixed(SubsystemShape::new(vec![3, 3]).unwrap());
        let records = exact_records(&mixed, 9e6);
        let est = linear_inversion(&records).unwrap();
        assert!(est.max_abs_diff(mixed.matrix()) < 1e-9);
    }

    #[test]
    fn linear_inversion_needs_all_settings() {
        let rho = states::chessboard_state();
        let mut records = exact_records(&rho, 1e9);
        records.truncate(60);
        assert!(matches!(linear_inversion(&records), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn linear_inversion_finite_counts_is_hermitian_unit_trace() {
        let rho = states::noisy_chessboard(0.1).unwrap();
        let records = simulate_tomography_counts(&rho, 200, 0.0, 3).unwrap();
        let est = linear_inversion(&records).unwrap();
        assert!(est.is_hermitian(1e-10));
        assert!((est.trace().re - 1.0).abs() < 1e-10);
    }

    #[test]
    fn mle_fixed_point_at_exact_probabilities() {
        let rho = states::noisy_chessboard(0.1).unwrap();
        let records = exact_records(&rho, 1e12);
        let result = mle_reconstruct(&records, 6000, 1e-14).unwrap();
        let f = fidelity(&result.rho_hat, &rho).unwrap();
        assert!(f >= 1.0 - 1e-8, "fidelity {f} after {} iterations", result.iterations);
    }

    #[test]
    fn mle_likelihood_is_monotone() {
        let rho = states::noisy_chessboard(0.12).unwrap();
        let records = simulate_tomography_counts(&rho, 2000, 0.0, 17).unwrap();
        let mut last = f64::NEG_INFINITY;
        for iters in [1usize, 2, 5, 10, 30, 100] {
            let res = mle_reconstruct(&records, iters, 0.0).unwrap();
            assert!(
                res.log_likelihood >= last - 1e-9,
                "likelihood decreased at {iters}: {} < {last}",
                res.log_likelihood
            );
            last = res.log_likelihood;
        }
    }

    #[test]
    fn mle_output_is_valid_state_for_rough_counts() {
        let rho = states::chessboard_state();
        let records = simulate_tomography_counts(&rho, 50, 0.0, 23).unwrap();
        let res = mle_reconstruct(&records, 500, 1e-10).unwrap();
        // DensityMatrix::new inside already validated; spot-check trace.
        assert_abs_diff_eq!(res.rho_hat.matrix().trace().re, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn noise_level_formula() {
        assert_abs_diff_eq!(noise_level_estimate(10000.0, 9000.0).unwrap(), 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(noise_level_estimate(5000.0, 5000.0).unwrap(), 0.0, epsilon = 1e-12);
        assert!(noise_level_estimate(0.0, 1.0).is_err());
        assert!(noise_level_estimate(100.0, 200.0).is_err());
    }

    #[test]
    fn noise_level_round_trip() {
        // About 1.3e5 total counts per run.
        let rho = states::chessboard_state();
        let p = 0.1291;
        let with_noise = simulate_tomography_counts(&rho, 12_000, p, 41).unwrap();
        let without = simulate_tomography_counts(&rho, 12_000, 0.0, 42).unwrap();
        let p_hat = noise_level_estimate(total_counts(&with_noise), total_counts(&without)).unwrap();
        assert!((p_hat - p).abs() < 0.01, "estimated {p_hat}");
    }

    #[test]
    fn bootstrap_of_trace_statistic_is_exact() {
        let rho = states::chessboard_state();
        let records = simulate_tomography_counts(&rho, 300, 0.0, 5).unwrap();
        let (mean, std) = bootstrap_errorbars(&records, 20, 6, |recs| {
            Ok(mle_reconstruct(recs, 200, 1e-9)?.rho_hat.matrix().trace().re)
        })
        .unwrap();
        assert_abs_diff_eq!(mean, 1.0, epsilon = 1e-9);
        assert!(std < 1e-9);
        assert!(bootstrap_errorbars(&records, 1, 6, |_| Ok(0.0)).is_err());
    }

    #[test]
    fn records_csv_round_trip() {
        let rho = states::chessboard_state();
        let records = simulate_tomography_counts(&rho, 120, 0.03, 8).unwrap();
        let text = records_to_csv(&records);
        let parsed = records_from_csv(&text).unwrap();
        assert_eq!(records, parsed);
        assert!(records_from_csv("bad header\n1,2,3,4\n").is_err());
    }
}
