//! Writes experiment artifacts: CSV table, JSON summary with the config
//! echo and seed, SVG plots, and any extra files an experiment produces.

use std::path::{Path, PathBuf};

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::svg::LinePlot;
use crate::table::Table;

pub struct RunArtifacts {
    pub table: Table,
    /// Experiment-specific summary entries merged into the JSON output.
    pub summary: serde_json::Value,
    /// (suffix, plot) pairs; written as `<experiment>-<suffix>.svg`.
    pub plots: Vec<(String, LinePlot)>,
    /// (file name, contents) pairs written verbatim.
    pub extra_files: Vec<(String, String)>,
}

/// Writes every requested format and returns the paths produced.
pub fn emit_outputs(
    experiment: &str,
    artifacts: &RunArtifacts,
    cfg: &ExperimentConfig,
) -> Result<Vec<PathBuf>, CliError> {
    let dir = Path::new(&cfg.output.dir);
    std::fs::create_dir_all(dir)?;
    let mut written = Vec::new();

    for format in &cfg.output.formats {
        match format.as_str() {
            "csv" => {
                let path = dir.join(format!("{experiment}.csv"));
                std::fs::write(&path, artifacts.table.to_csv())?;
                written.push(path);
            }
            "json" => {
                let summary = serde_json::json!({
                    "experiment": experiment,
                    "seed": cfg.seed,
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": cfg,
                    "results": artifacts.summary,
                });
                let path = dir.join(format!("{experiment}.json"));
                std::fs::write(&path, serde_json::to_string_pretty(&summary)? + "\n")?;
                written.push(path);
            }
            "svg" => {
                for (suffix, plot) in &artifacts.plots {
                    let path = dir.join(format!("{experiment}-{suffix}.svg"));
                    std::fs::write(&path, plot.render())?;
                    written.push(path);
                }
            }
            other => return Err(CliError::Config(format!("unknown output format {other:?}"))),
        }
    }
    for (name, contents) in &artifacts.extra_files {
        let path = dir.join(name);
        std::fs::write(&path, contents)?;
        written.push(path);
    }
    Ok(written)
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}
