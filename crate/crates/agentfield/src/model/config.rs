//! Scenario configuration: TOML schema, validation, resolution and hashing.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::model::{
    Domain1D, InteractionRule, ModelParams, SeedPolicy, SuitabilityLandscape,
};

/// How agent positions of one type are distributed at t = 0. The same spec
/// doubles as the analytic initial density of the field model, truncated to
/// the domain and scaled to the type's mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PositionSpec {
    Normal { mean: f64, std: f64 },
    Uniform,
}

/// Initial condition of one agent type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TypeInitial {
    pub count: usize,
    pub position: PositionSpec,
}

/// Which quadrature path assembles the drift part of the transport operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DriftAssembly {
    /// Weak form with the advective wall flux dropped (reflecting walls carry
    /// none); conserves mass exactly and needs only the gradient.
    #[default]
    IntegratedByParts,
    /// Divergence form; needs the second derivative of the potential. Kept as
    /// a cross-validation path for the default assembly.
    Direct,
}

/// Discretization settings of the field model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    /// Number of mesh cells (nodes = cells + 1).
    pub cells: usize,
    /// Number of retained noise modes.
    pub noise_modes: usize,
    /// Drop all noise terms; evolves the mean-field part only.
    pub deterministic: bool,
    pub drift_assembly: DriftAssembly,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            cells: 128,
            noise_modes: 128,
            deterministic: false,
            drift_assembly: DriftAssembly::default(),
        }
    }
}

/// Fully resolved scenario: everything a single realization of either model
/// needs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub domain: Domain1D,
    pub landscape: SuitabilityLandscape,
    pub params: ModelParams,
    /// Per-type initial conditions; index = type.
    pub initial: Vec<TypeInitial>,
    pub grid: GridSettings,
    pub seeds: SeedPolicy,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.initial.len() != self.params.n_types {
            return Err(Error::Config(format!(
                "{} initial conditions for {} types",
                self.initial.len(),
                self.params.n_types
            )));
        }
        let total: usize = self.initial.iter().map(|t| t.count).sum();
        if total != self.params.n_agents {
            return Err(Error::Config(format!(
                "per-type counts sum to {total} but n_agents = {}",
                self.params.n_agents
            )));
        }
        if self.params.n_agents == 0 {
            return Err(Error::Config("n_agents must be positive".into()));
        }
        for (s, init) in self.initial.iter().enumerate() {
            if let PositionSpec::Normal { mean, std } = init.position {
                if !(std > 0.0 && std.is_finite()) {
                    return Err(Error::Config(format!(
                        "type {s}: normal std must be positive, got {std}"
                    )));
                }
                // rejection sampling must terminate: demand non-negligible
                // mass inside the domain
                if mean < self.domain.lower - 8.0 * std || mean > self.domain.upper + 8.0 * std {
                    return Err(Error::Config(format!(
                        "type {s}: normal at mean={mean}, std={std} has essentially no \
                         mass inside the domain"
                    )));
                }
            }
        }
        if self.grid.cells == 0 || self.grid.noise_modes == 0 {
            return Err(Error::Config("grid needs at least one cell and one mode".into()));
        }
        self.landscape.check_gradient(&self.domain, 64, 1e-6)?;
        Ok(())
    }

    /// Same scenario rescaled to `n` agents, keeping the per-type proportions
    /// (largest-remainder rounding so counts sum exactly to `n`).
    pub fn with_n_agents(&self, n: usize) -> Scenario {
        let old_total = self.params.n_agents.max(1);
        let shares: Vec<f64> = self
            .initial
            .iter()
            .map(|t| t.count as f64 * n as f64 / old_total as f64)
            .collect();
        let mut counts: Vec<usize> = shares.iter().map(|&s| s.floor() as usize).collect();
        let mut rest: Vec<(usize, f64)> = shares
            .iter()
            .enumerate()
            .map(|(i, &s)| (i, s - s.floor()))
            .collect();
        rest.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        let assigned: usize = counts.iter().sum();
        for (i, _) in rest.iter().take(n.saturating_sub(assigned)) {
            counts[*i] += 1;
        }
        let mut out = self.clone();
        out.params.n_agents = n;
        for (init, c) in out.initial.iter_mut().zip(counts) {
            init.count = c;
        }
        out
    }

    pub fn with_t_end(&self, t_end: f64) -> Scenario {
        let mut out = self.clone();
        out.params.t_end = t_end;
        out
    }

    pub fn with_dt(&self, dt: f64) -> Scenario {
        let mut out = self.clone();
        out.params.dt = dt;
        out
    }

    pub fn with_grid(&self, grid: GridSettings) -> Scenario {
        let mut out = self.clone();
        out.grid = grid;
        out
    }

    pub fn with_deterministic(&self, deterministic: bool) -> Scenario {
        let mut out = self.clone();
        out.grid.deterministic = deterministic;
        out
    }

    pub fn with_seed(&self, master_seed: u64) -> Scenario {
        let mut out = self.clone();
        out.seeds = SeedPolicy::new(master_seed);
        out
    }
}

/// Identity stamp written into every output file header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunStamp {
    pub config_hash: String,
    pub master_seed: u64,
}

impl RunStamp {
    pub fn header_line(&self) -> String {
        format!("# config={} seed={}", self.config_hash, self.master_seed)
    }
}

// ---------------------------------------------------------------------------
// TOML schema
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum PotentialSection {
    Flat,
    DoubleWell { scale: f64, stiffness: f64, depth: f64, center: f64 },
    Polynomial { coeffs: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DynamicsSection {
    sigma: f64,
    d_int: f64,
    dt: f64,
    t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleSection {
    subject: usize,
    catalyst: usize,
    product: usize,
    rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AgentsSection {
    total: usize,
    types: Vec<TypeInitial>,
}

/// Ensemble-level knobs shared by the harness experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub realizations: usize,
    /// Adoption fraction defining the first-passage observable.
    pub threshold: f64,
    /// Which type counts as "adopter" for fraction observables.
    pub observed_type: usize,
    /// Steps between trajectory/density snapshots written by `run`.
    pub snapshot_stride: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        Self { realizations: 200, threshold: 0.75, observed_type: 1, snapshot_stride: 10 }
    }
}

/// One agent-count case of the model-comparison study. Small ensembles adopt
/// slowly, so each case carries its own time horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareCase {
    pub n_agents: usize,
    pub t_end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CompareSection {
    cases: Vec<CompareCase>,
    realizations: Option<usize>,
}

/// Per-step cost measurement plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchSettings {
    pub n_agents: Vec<usize>,
    pub warmup_steps: usize,
    pub timed_steps: usize,
}

impl Default for BenchSettings {
    fn default() -> Self {
        Self { n_agents: vec![50, 250, 1000, 3000], warmup_steps: 10, timed_steps: 200 }
    }
}

/// Discretization-refinement sweep plan (field model only).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub dt: Vec<f64>,
    pub cells: Vec<usize>,
    pub noise_modes: Vec<usize>,
    /// Time at which ensemble-mean densities are compared.
    pub t_measure: f64,
    pub realizations: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        Self {
            dt: vec![0.02, 0.01, 0.005],
            cells: vec![64, 128, 256],
            noise_modes: vec![64, 128, 256],
            t_measure: 1.5,
            realizations: 200,
        }
    }
}

/// On-disk configuration. `scenario()` resolves and validates it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub master_seed: u64,
    domain: Domain1D,
    potential: PotentialSection,
    dynamics: DynamicsSection,
    #[serde(default)]
    rules: Vec<RuleSection>,
    agents: AgentsSection,
    #[serde(default)]
    grid: GridSettings,
    #[serde(default)]
    pub ensemble: EnsembleSettings,
    #[serde(default)]
    compare: Option<CompareSection>,
    #[serde(default)]
    pub bench: BenchSettings,
    #[serde(default)]
    pub sweep: SweepSettings,
}

impl ConfigFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())?;
        Self::from_str(&text)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn from_str(text: &str) -> Result<Self> {
        let cfg: ConfigFile = toml::from_str(text)?;
        Ok(cfg)
    }

    /// Resolve into a validated scenario.
    pub fn scenario(&self) -> Result<Scenario> {
        let domain = Domain1D::new(self.domain.lower, self.domain.upper)?;
        let landscape = match &self.potential {
            PotentialSection::Flat => SuitabilityLandscape::flat(),
            PotentialSection::DoubleWell { scale, stiffness, depth, center } => {
                SuitabilityLandscape::double_well(*scale, *stiffness, *depth, *center)
            }
            PotentialSection::Polynomial { coeffs } => {
                SuitabilityLandscape::polynomial(coeffs.clone())
            }
        };
        let n_types = self.agents.types.len();
        let rules = self
            .rules
            .iter()
            .map(|r| super::build_rule(r.subject, r.catalyst, r.product, r.rate, n_types))
            .collect::<Result<Vec<InteractionRule>>>()?;
        let params = ModelParams {
            n_types,
            n_agents: self.agents.total,
            sigma: self.dynamics.sigma,
            d_int: self.dynamics.d_int,
            rules,
            t_end: self.dynamics.t_end,
            dt: self.dynamics.dt,
        };
        let scenario = Scenario {
            domain,
            landscape,
            params,
            initial: self.agents.types.clone(),
            grid: self.grid,
            seeds: SeedPolicy::new(self.master_seed),
        };
        scenario.validate()?;
        if self.ensemble.observed_type >= n_types {
            return Err(Error::Config(format!(
                "observed_type {} out of range for {} types",
                self.ensemble.observed_type, n_types
            )));
        }
        if !(self.ensemble.threshold > 0.0 && self.ensemble.threshold < 1.0) {
            return Err(Error::Config(format!(
                "threshold must lie in (0, 1), got {}",
                self.ensemble.threshold
            )));
        }
        Ok(scenario)
    }

    /// Comparison cases; defaults to a single case at the scenario's own size
    /// and horizon when the config has no `[compare]` section.
    pub fn compare_cases(&self) -> Vec<CompareCase> {
        match &self.compare {
            Some(c) => c.cases.clone(),
            None => vec![CompareCase {
                n_agents: self.agents.total,
                t_end: self.dynamics.t_end,
            }],
        }
    }

    pub fn compare_realizations(&self) -> usize {
        self.compare
            .as_ref()
            .and_then(|c| c.realizations)
            .unwrap_or(self.ensemble.realizations)
    }

    /// Short content hash of the effective configuration. Recomputed after CLI
    /// overrides, so output headers identify what actually ran.
    pub fn hash(&self) -> String {
        let canonical = toml::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(16);
        for byte in digest.iter().take(8) {
            hex.push_str(&format!("{byte:02x}"));
        }
        hex
    }

    pub fn stamp(&self) -> RunStamp {
        RunStamp { config_hash: self.hash(), master_seed: self.master_seed }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        master_seed = 7

        [domain]
        lower = 0.0
        upper = 1.0

        [potential]
        kind = "double_well"
        scale = 0.01
        stiffness = 3.6
        depth = 0.1
        center = 0.5

        [dynamics]
        sigma = 0.15
        d_int = 0.002
        dt = 0.01
        t_end = 5.5

        [[rules]]
        subject = 0
        catalyst = 1
        product = 1
        rate = 0.1

        [agents]
        total = 1000

        [[agents.types]]
        count = 800
        position = { kind = "normal", mean = 0.5, std = 0.2 }

        [[agents.types]]
        count = 200
        position = { kind = "normal", mean = 0.7, std = 0.1 }
    "#;

    #[test]
    fn minimal_config_resolves() {
        let cfg = ConfigFile::from_str(MINIMAL).unwrap();
        let s = cfg.scenario().unwrap();
        assert_eq!(s.params.n_types, 2);
        assert_eq!(s.params.n_agents, 1000);
        assert_eq!(s.params.rules[0].nu, vec![-1, 1]);
        assert_eq!(s.grid.cells, 128);
        assert_eq!(s.grid.noise_modes, 128);
        assert!(!s.grid.deterministic);
        assert_eq!(s.params.n_steps().unwrap(), 550);
        // defaults for the experiment sections
        assert_eq!(cfg.ensemble.realizations, 200);
        assert_eq!(cfg.compare_cases().len(), 1);
        assert_eq!(cfg.bench.n_agents, vec![50, 250, 1000, 3000]);
    }

    #[test]
    fn count_mismatch_is_rejected() {
        let text = MINIMAL.replace("total = 1000", "total = 999");
        let cfg = ConfigFile::from_str(&text).unwrap();
        assert!(cfg.scenario().is_err());
    }

    #[test]
    fn bad_rule_index_is_rejected() {
        let text = MINIMAL.replace("catalyst = 1", "catalyst = 2");
        let cfg = ConfigFile::from_str(&text).unwrap();
        assert!(cfg.scenario().is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = format!("{MINIMAL}\n[grid]\ncels = 64\n");
        assert!(ConfigFile::from_str(&text).is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ConfigFile::from_str(MINIMAL).unwrap();
        let b = ConfigFile::from_str(MINIMAL).unwrap();
        assert_eq!(a.hash(), b.hash());
        let mut c = ConfigFile::from_str(MINIMAL).unwrap();
        c.master_seed = 8;
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 16);
        let stamp = a.stamp();
        assert!(stamp.header_line().contains("seed=7"));
        assert!(stamp.header_line().contains(&a.hash()));
    }

    #[test]
    fn rescaling_preserves_proportions() {
        let cfg = ConfigFile::from_str(MINIMAL).unwrap();
        let s = cfg.scenario().unwrap();
        let small = s.with_n_agents(50);
        assert_eq!(small.params.n_agents, 50);
        assert_eq!(small.initial[0].count, 40);
        assert_eq!(small.initial[1].count, 10);
        small.validate().unwrap();
        // odd target still sums exactly
        let odd = s.with_n_agents(251);
        assert_eq!(odd.initial.iter().map(|t| t.count).sum::<usize>(), 251);
        odd.validate().unwrap();
    }

    #[test]
    fn flat_and_polynomial_potentials_parse() {
        let text = MINIMAL.replace(
            "kind = \"double_well\"\n        scale = 0.01\n        stiffness = 3.6\n        depth = 0.1\n        center = 0.5",
            "kind = \"polynomial\"\n        coeffs = [0.0, 0.0, 0.5]",
        );
        let cfg = ConfigFile::from_str(&text).unwrap();
        let s = cfg.scenario().unwrap();
        assert!((s.landscape.gradient(1.0) - 1.0).abs() < 1e-12);
    }
}
