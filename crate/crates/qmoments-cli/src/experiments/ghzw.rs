//! GHZ-W mixture sweep: exact and estimated sector-length criteria over a
//! grid of mixing weights, with the squared-concurrence comparison curve.

use rayon::prelude::*;

use qmoments::bloch::{pauli_coefficients, sector_lengths};
use qmoments::criteria::{criterion_a3, criterion_strong_bisep};
use qmoments::invariants::squared_concurrence_sum;
use qmoments::protocol::{estimate_sector_lengths, ProtocolConfig, ValueWithError};
use qmoments::states::ghzw_mix;

use crate::config::{derive_seed, ExperimentConfig};
use crate::error::CliError;
use crate::output::RunArtifacts;
use crate::svg::{LinePlot, Series, SeriesKind};
use crate::table::Table;

pub struct GhzwSweep;

/// Published comparison thresholds: the squared concurrence vanishes above
/// g_C, the three-tangle below g_tau.
pub const G_CONCURRENCE: f64 = 0.292;
pub const G_TANGLE: f64 = 0.627;

const COLUMNS: [&str; 17] = [
    "g",
    "a1_exact",
    "a2_exact",
    "a3_exact",
    "csq_exact",
    "a1_est",
    "a1_err",
    "a2_est",
    "a2_err",
    "a3_est",
    "a3_err",
    "crit1_exact",
    "crit1_est",
    "crit1_err",
    "crit2_exact",
    "crit2_est",
    "crit2_err",
];

/// Sector lengths of one point, estimated with optional whole-protocol
/// repetitions.
fn estimate_point(
    g: f64,
    cfg: &ExperimentConfig,
    point_salt: u64,
) -> Result<(ValueWithError, ValueWithError, ValueWithError), CliError> {
    let rho = ghzw_mix(g)?;
    let repeats = cfg.protocol.repeats;
    if repeats <= 1 {
        let pcfg = ProtocolConfig::new(
            cfg.protocol.unitaries,
            cfg.protocol.shots,
            ProtocolConfig::all_three_party_subsets(),
            derive_seed(cfg.seed, point_salt),
        );
        let est = estimate_sector_lengths(&rho, &pcfg)?;
        return Ok((est.a1, est.a2, est.a3));
    }
    // Error bars from repeating the whole protocol.
    let mut runs = Vec::with_capacity(repeats);
    for rep in 0..repeats {
        let pcfg = ProtocolConfig::new(
            cfg.protocol.unitaries,
            cfg.protocol.shots,
            ProtocolConfig::all_three_party_subsets(),
            derive_seed(cfg.seed, point_salt.wrapping_mul(1009).wrapping_add(rep as u64)),
        );
        runs.push(estimate_sector_lengths(&rho, &pcfg)?);
    }
    let collect = |f: &dyn Fn(&qmoments::protocol::SectorLengthEstimate) -> f64| {
        let vals: Vec<f64> = runs.iter().map(f).collect();
        let n = vals.len() as f64;
        let mean = vals.iter().sum::<f64>() / n;
        let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
        ValueWithError { value: mean, std_error: (var / n).sqrt() }
    };
    Ok((
        collect(&|r| r.a1.value),
        collect(&|r| r.a2.value),
        collect(&|r| r.a3.value),
    ))
}

fn exact_criterion1(g: f64) -> f64 {
    let rho = ghzw_mix(g).expect("grid stays in [0,1]");
    let (a1, a2, a3) = sector_lengths(&pauli_coefficients(&rho).expect("three qubits"));
    a2 + a3 - 3.0 * (1.0 + a1)
}

/// Bisection for a sign change of `f` on [lo, hi].
fn bisect_root(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if (f_lo > 0.0) == (f_mid > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

impl super::Experiment for GhzwSweep {
    fn name(&self) -> &'static str {
        "ghzw-sweep"
    }

    fn about(&self) -> &'static str {
        "Sweep GHZ-W mixtures: exact vs randomized-measurement sector-length criteria"
    }

    fn run(&self, cfg: &ExperimentConfig) -> Result<RunArtifacts, CliError> {
        let grid = cfg.grid.resolve(0.0, 1.0, 0.05)?;

        let rows: Vec<Vec<f64>> = grid
            .par_iter()
            .enumerate()
            .map(|(idx, &g)| -> Result<Vec<f64>, CliError> {
                let rho = ghzw_mix(g)?;
                let (a1, a2, a3) = sector_lengths(&pauli_coefficients(&rho)?);
                let csq = squared_concurrence_sum(&rho)?;
                let (e1, e2, e3) = estimate_point(g, cfg, idx as u64)?;
                let crit1_exact = criterion_strong_bisep(a1, a2, a3, (0.0, 0.0, 0.0));
                let crit1_est = criterion_strong_bisep(
                    e1.value,
                    e2.value,
                    e3.value,
                    (e1.std_error, e2.std_error, e3.std_error),
                );
                let crit2_exact = criterion_a3(a3, 0.0);
                let crit2_est = criterion_a3(e3.value, e3.std_error);
                Ok(vec![
                    g,
                    a1,
                    a2,
                    a3,
                    csq,
                    e1.value,
                    e1.std_error,
                    e2.value,
                    e2.std_error,
                    e3.value,
                    e3.std_error,
                    crit1_exact.value,
                    crit1_est.value,
                    crit1_est.std_error,
                    crit2_exact.value - crit2_exact.threshold,
                    crit2_est.value - crit2_est.threshold,
                    crit2_est.std_error,
                ])
            })
            .collect::<Result<_, _>>()?;

        let mut table = Table::new(&COLUMNS);
        for row in rows {
            table.push_row(row);
        }

        // Exact criterion boundaries for the summary.
        let root_low = bisect_root(&exact_criterion1, 0.1, 0.5, 1e-9);
        let root_high = bisect_root(&exact_criterion1, 0.5, 0.9, 1e-9);
        let csq_root = bisect_root(
            &|g: f64| {
                let s = squared_concurrence_sum(&ghzw_mix(g).unwrap()).unwrap();
                if s > 1e-14 {
                    1.0
                } else {
                    -1.0
                }
            },
            0.0,
            0.5,
            1e-9,
        );

        let summary = serde_json::json!({
            "grid_points": grid.len(),
            "criterion1_roots": [root_low, root_high],
            "squared_concurrence_root": csq_root,
            "reference_thresholds": { "g_concurrence": G_CONCURRENCE, "g_tangle": G_TANGLE },
        });

        let line = |label: &str, col: &str| Series {
            label: label.into(),
            points: grid.iter().cloned().zip(table.column(col).unwrap()).collect(),
            kind: SeriesKind::Line,
        };
        let points = |label: &str, col: &str, err: &str| Series {
            label: label.into(),
            points: grid.iter().cloned().zip(table.column(col).unwrap()).collect(),
            kind: SeriesKind::Points { errors: Some(table.column(err).unwrap()) },
        };
        let criteria_plot = LinePlot {
            title: "Sector-length criteria over the GHZ-W family".into(),
            x_label: "GHZ weight g".into(),
            y_label: "criterion value".into(),
            series: vec![
                line("criterion I exact", "crit1_exact"),
                line("criterion II exact", "crit2_exact"),
                points("criterion I estimated", "crit1_est", "crit1_err"),
                points("criterion II estimated", "crit2_est", "crit2_err"),
            ],
        };
        let sector_plot = LinePlot {
            title: "Sector lengths over the GHZ-W family".into(),
            x_label: "GHZ weight g".into(),
            y_label: "sector length".into(),
            series: vec![
                line("A1 exact", "a1_exact"),
                line("A2 exact", "a2_exact"),
                line("A3 exact", "a3_exact"),
                points("A3 estimated", "a3_est", "a3_err"),
            ],
        };

        Ok(RunArtifacts {
            table,
            summary,
            plots: vec![("criteria".into(), criteria_plot), ("sectors".into(), sector_plot)],
            extra_files: Vec::new(),
        })
    }
}
