//! Two-scale stochastic simulation toolkit for contact processes on an interval.
//!
//! The crate implements two models of the same phenomenon and the machinery to
//! compare them:
//!
//! * [`abm`] — a microscopic agent-based model: `N` agents perform drifted
//!   Brownian motion in a potential landscape with reflecting walls and switch
//!   their discrete type when they come within interaction distance of a
//!   catalysing neighbour.
//! * [`spde`] — the mesoscopic reduction: one stochastic PDE per agent type for
//!   the number densities, with multiplicative square-root transport and
//!   reaction noise, discretized by linear finite elements in space and a
//!   semi-implicit Euler–Maruyama scheme in time.
//! * [`observables`] — empirical densities, first-passage times, ensemble
//!   statistics and equilibrium references shared by both models.
//! * [`harness`] — seeded ensemble runs, the model-comparison study, per-step
//!   cost benchmarks, discretization-consistency sweeps and SVG report plots.
//! * [`model`] — the common scenario description: domain, potential landscape,
//!   interaction rules, parameters, seed policy and the TOML config format.
//!
//! The usual entry point is a [`model::Scenario`] loaded from a config file
//! (see `presets/`), then either a direct simulation call or one of the
//! harness experiments:
//!
//! ```no_run
//! use agentfield::harness::{compare_models, CompareSettings};
//! use agentfield::model::{CompareCase, ConfigFile};
//!
//! let cfg = ConfigFile::load("presets/innovation.toml")?;
//! let scenario = cfg.scenario()?;
//! let cases = [CompareCase { n_agents: 1000, t_end: 12.0 }];
//! let settings = CompareSettings {
//!     realizations: 50,
//!     threshold: 0.75,
//!     observed_type: 1,
//!     workers: 1,
//! };
//! for row in compare_models(&scenario, &cases, &settings)? {
//!     println!(
//!         "N = {}: mean adoption time {:.2} (agents) vs {:.2} (fields)",
//!         row.n_agents, row.tau_abm.mean, row.tau_spde.mean
//!     );
//! }
//! # Ok::<(), agentfield::Error>(())
//! ```
//!
//! Every random draw is derived from a master seed plus (realization index,
//! purpose) stream labels, so ensembles are bit-reproducible for any worker
//! count.

pub mod abm;
pub mod error;
pub mod harness;
pub mod model;
pub mod observables;
pub mod spde;

pub use error::{Error, Result};
