//! Experiment orchestration: seeded parallel ensembles, the model
//! comparison study, discretization sweeps, cost benchmarks, CSV reports
//! and static SVG figures.
//!
//! Everything here is driven by a [`crate::model::Scenario`] plus a handful
//! of settings structs from the configuration file. Realizations never share
//! mutable state and are aggregated in realization order, so every emitted
//! number is a pure function of (config, master seed) regardless of worker
//! count.

pub mod bench;
pub mod compare;
pub mod ensemble;
pub mod plot;
pub mod report;
pub mod sweep;

pub use bench::{cost_benchmark, BenchRow};
pub use compare::{adoption_taus, compare_case, compare_models, CompareRow, CompareSettings};
pub use ensemble::{resolve_workers, run_ensemble};
pub use plot::{render_reports, Figure, Series};
pub use report::{fmt_f64, parse_csv, CsvTable, ReportWriter};
pub use sweep::{consistency_sweep, noise_scaling, NoiseScalingOutcome, SweepDiff, SweepOutcome, SweepRow};

/// Which simulator a measurement belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    Abm,
    Spde,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Abm => "abm",
            ModelKind::Spde => "spde",
        }
    }
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Model selection on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSelect {
    Abm,
    Spde,
    Both,
}

impl ModelSelect {
    pub fn kinds(self) -> Vec<ModelKind> {
        match self {
            ModelSelect::Abm => vec![ModelKind::Abm],
            ModelSelect::Spde => vec![ModelKind::Spde],
            ModelSelect::Both => vec![ModelKind::Abm, ModelKind::Spde],
        }
    }
}

impl std::str::FromStr for ModelSelect {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "abm" => Ok(ModelSelect::Abm),
            "spde" => Ok(ModelSelect::Spde),
            "both" => Ok(ModelSelect::Both),
            other => Err(crate::error::Error::Input(format!(
                "unknown model '{other}', expected abm, spde or both"
            ))),
        }
    }
}
