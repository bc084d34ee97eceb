//! Experiment registry: every batch experiment implements [`Experiment`]
//! and registers itself by name; the CLI builds its subcommands from the
//! registry and dispatches by name at runtime.

use crate::config::ExperimentConfig;
use crate::error::CliError;
use crate::output::RunArtifacts;

mod bound;
mod chessboard;
mod ghzw;
mod moments;
mod tomography;

/// A named, config-driven batch experiment.
pub trait Experiment: Sync {
    /// Registry key, also the CLI subcommand.
    fn name(&self) -> &'static str;
    /// One-line description for `--help`.
    fn about(&self) -> &'static str;
    fn run(&self, cfg: &ExperimentConfig) -> Result<RunArtifacts, CliError>;
}

/// All registered experiments, in presentation order.
pub fn registry() -> &'static [&'static dyn Experiment] {
    static REGISTRY: [&dyn Experiment; 5] = [
        &ghzw::GhzwSweep,
        &chessboard::ChessboardSweep,
        &moments::EstimateMoments,
        &tomography::TomographyRoundtrip,
        &bound::Bound,
    ];
    &REGISTRY
}

/// Looks an experiment up by its registered name.
pub fn find(name: &str) -> Option<&'static dyn Experiment> {
    registry().iter().copied().find(|e| e.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_complete() {
        let names: Vec<&str> = registry().iter().map(|e| e.name()).collect();
        assert_eq!(
            names,
            vec![
                "ghzw-sweep",
                "chessboard-sweep",
                "estimate-moments",
                "tomography-roundtrip",
                "bound"
            ]
        );
        for name in names {
            assert!(find(name).is_some());
        }
        assert!(find("nope").is_none());
    }
}
