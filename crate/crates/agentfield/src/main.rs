//! Thin command-line front end over the library.
//!
//! Subcommands: `run` (seeded ensemble of one or both models with trajectory,
//! adoption and first-passage outputs), `compare` (model-comparison study
//! over agent counts), `bench` (per-step cost table), `sweep`
//! (discretization-consistency study) and `plot` (render SVG figures from
//! previously written reports). Every output file carries a header line with
//! the effective config hash and master seed. `--workers` falls back to the
//! `AGENTFIELD_WORKERS` environment variable, then to the machine's
//! parallelism.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use agentfield::abm::simulate_abm;
use agentfield::error::Result;
use agentfield::harness::{
    adoption_taus, compare_models, consistency_sweep, cost_benchmark, fmt_f64, render_reports,
    resolve_workers, CompareSettings, ModelKind, ModelSelect, ReportWriter,
};
use agentfield::model::{ConfigFile, Scenario};
use agentfield::observables::tau_statistics;
use agentfield::spde::{simulate_spde, FemMesh};

#[derive(Parser)]
#[command(
    name = "agentfield",
    about = "Interacting Brownian agents and their density-field reduction",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate an ensemble and write trajectories, adoption series and
    /// first-passage tables.
    Run(ExperimentArgs),
    /// Run both models over the configured agent counts and report
    /// first-passage statistics and density-error measures.
    Compare(ExperimentArgs),
    /// Measure median per-step wall time of both models across agent counts.
    Bench(ExperimentArgs),
    /// Refine dt, mesh and noise truncation one at a time and report how the
    /// mean density responds.
    Sweep(ExperimentArgs),
    /// Render SVG figures from the report files in an output directory.
    Plot(PlotArgs),
}

#[derive(Args)]
struct ExperimentArgs {
    /// Scenario configuration file (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Override the master seed from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the realization count of the selected experiment.
    #[arg(long)]
    realizations: Option<usize>,
    /// Output directory for report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Which model(s) to run where a choice applies: abm, spde or both.
    #[arg(long, default_value = "both")]
    model: String,
    /// Worker threads for ensemble execution.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Args)]
struct PlotArgs {
    /// Directory holding previously written report files.
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

/// Load the config, apply CLI overrides, and resolve the scenario.
fn prepare(args: &ExperimentArgs) -> Result<(ConfigFile, Scenario, ReportWriter, usize)> {
    let mut cfg = ConfigFile::load(&args.config)?;
    if let Some(seed) = args.seed {
        cfg.master_seed = seed;
    }
    if let Some(r) = args.realizations {
        cfg.ensemble.realizations = r;
        cfg.sweep.realizations = r;
    }
    let scenario = cfg.scenario()?;
    let writer = ReportWriter::new(&args.out, cfg.stamp())?;
    let workers = resolve_workers(args.workers);
    Ok((cfg, scenario, writer, workers))
}

fn announce(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn cmd_run(args: ExperimentArgs) -> Result<()> {
    let models = ModelSelect::from_str(&args.model)?.kinds();
    let (cfg, scenario, writer, workers) = prepare(&args)?;
    let settings = CompareSettings {
        realizations: cfg.ensemble.realizations,
        threshold: cfg.ensemble.threshold,
        observed_type: cfg.ensemble.observed_type,
        workers,
    };
    let stride = cfg.ensemble.snapshot_stride.max(1);
    let n_steps = scenario.params.n_steps()?;
    let due = |step: usize| step % stride == 0 || step == n_steps;
    let observed = cfg.ensemble.observed_type;
    let mut written = Vec::new();

    // ensemble first-passage tables per model
    let mut passage_rows = Vec::new();
    let mut summary_rows = Vec::new();
    for &model in &models {
        let taus = adoption_taus(&scenario, model, &settings)?;
        for (i, tau) in taus.iter().enumerate() {
            passage_rows.push(vec![
                model.name().to_string(),
                i.to_string(),
                fmt_f64(tau.unwrap_or(f64::NAN)),
            ]);
        }
        let stats = tau_statistics(&taus);
        summary_rows.push(vec![
            scenario.params.n_agents.to_string(),
            model.name().to_string(),
            fmt_f64(stats.mean),
            fmt_f64(stats.std),
            stats.n_reached.to_string(),
            stats.n_total.to_string(),
        ]);
    }
    written.push(writer.write_csv(
        "first_passage.csv",
        &["model", "realization", "tau"],
        passage_rows,
    )?);
    written.push(writer.write_csv(
        "tau_summary.csv",
        &["n_agents", "model", "mean_tau", "std_tau", "n_reached", "realizations"],
        summary_rows,
    )?);

    // trajectory snapshots and adoption series of realization 0
    let mut adoption_rows = Vec::new();
    for &model in &models {
        match model {
            ModelKind::Abm => {
                let mut rows = Vec::new();
                simulate_abm(&scenario, 0, |step, t, state| {
                    if due(step) {
                        adoption_rows.push(vec![
                            fmt_f64(t),
                            model.name().to_string(),
                            fmt_f64(state.fraction_of(observed)),
                        ]);
                        for (id, (&x, &ty)) in
                            state.positions.iter().zip(&state.types).enumerate()
                        {
                            rows.push(vec![
                                fmt_f64(t),
                                id.to_string(),
                                fmt_f64(x),
                                ty.to_string(),
                            ]);
                        }
                    }
                    true
                })?;
                written.push(writer.write_csv(
                    "abm_trajectory.csv",
                    &["time", "agent_id", "position", "type"],
                    rows,
                )?);
            }
            ModelKind::Spde => {
                let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
                let mut rows = Vec::new();
                simulate_spde(&scenario, 0, |step, t, state| {
                    if due(step) {
                        adoption_rows.push(vec![
                            fmt_f64(t),
                            model.name().to_string(),
                            fmt_f64(state.fraction_of(&mesh, observed)),
                        ]);
                        for (ty, field) in state.fields.iter().enumerate() {
                            for (&x, &beta) in mesh.nodes().iter().zip(field) {
                                rows.push(vec![
                                    fmt_f64(t),
                                    fmt_f64(x),
                                    ty.to_string(),
                                    fmt_f64(beta),
                                ]);
                            }
                        }
                    }
                    true
                })?;
                written.push(writer.write_csv(
                    "spde_snapshot.csv",
                    &["time", "node_x", "type", "beta"],
                    rows,
                )?);
            }
        }
    }
    written.push(writer.write_csv(
        "adoption_series.csv",
        &["time", "model", "fraction"],
        adoption_rows,
    )?);

    announce(&written);
    Ok(())
}

fn cmd_compare(args: ExperimentArgs) -> Result<()> {
    let (cfg, scenario, writer, workers) = prepare(&args)?;
    let settings = CompareSettings {
        realizations: args.realizations.unwrap_or_else(|| cfg.compare_realizations()),
        threshold: cfg.ensemble.threshold,
        observed_type: cfg.ensemble.observed_type,
        workers,
    };
    let cases = cfg.compare_cases();
    let rows = compare_models(&scenario, &cases, &settings)?;
    let mut written = Vec::new();

    let n_types = scenario.params.n_types;
    let mut columns = vec![
        "n_agents".to_string(),
        "mean_tau_abm".to_string(),
        "std_tau_abm".to_string(),
        "mean_tau_spde".to_string(),
        "std_tau_spde".to_string(),
        "snapshot_time".to_string(),
        "flagged".to_string(),
    ];
    for s in 0..n_types {
        columns.push(format!("e_mean_type{s}"));
    }
    for s in 0..n_types {
        columns.push(format!("e_std_type{s}"));
    }
    let column_refs: Vec<&str> = columns.iter().map(|c| c.as_str()).collect();
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut fields = vec![
                row.n_agents.to_string(),
                fmt_f64(row.tau_abm.mean),
                fmt_f64(row.tau_abm.std),
                fmt_f64(row.tau_spde.mean),
                fmt_f64(row.tau_spde.std),
                fmt_f64(row.snapshot_time),
                (row.flagged as u8).to_string(),
            ];
            for s in 0..n_types {
                fields.push(fmt_f64(row.e_mean.get(s).copied().unwrap_or(f64::NAN)));
            }
            for s in 0..n_types {
                fields.push(fmt_f64(row.e_std.get(s).copied().unwrap_or(f64::NAN)));
            }
            fields
        })
        .collect();
    written.push(writer.write_csv("compare.csv", &column_refs, csv_rows)?);

    let mut summary_rows = Vec::new();
    for row in &rows {
        for (model, stats) in [("abm", &row.tau_abm), ("spde", &row.tau_spde)] {
            summary_rows.push(vec![
                row.n_agents.to_string(),
                model.to_string(),
                fmt_f64(stats.mean),
                fmt_f64(stats.std),
                stats.n_reached.to_string(),
                stats.n_total.to_string(),
            ]);
        }
    }
    written.push(writer.write_csv(
        "tau_summary.csv",
        &["n_agents", "model", "mean_tau", "std_tau", "n_reached", "realizations"],
        summary_rows,
    )?);

    // per-node ensemble statistics at the snapshot time
    let mesh = FemMesh::new(scenario.domain, scenario.grid.cells)?;
    for row in rows.iter().filter(|r| !r.flagged) {
        for (model, stats) in [("abm", &row.density_abm), ("spde", &row.density_spde)] {
            for (s, stat) in stats.iter().enumerate() {
                let name = format!("density_n{}_{model}_type{s}.csv", row.n_agents);
                let table: Vec<Vec<String>> = mesh
                    .nodes()
                    .iter()
                    .zip(stat.mean.iter().zip(&stat.std))
                    .map(|(&x, (&m, &sd))| vec![fmt_f64(x), fmt_f64(m), fmt_f64(sd)])
                    .collect();
                written.push(writer.write_csv(&name, &["x", "mean", "std"], table)?);
            }
        }
    }

    announce(&written);
    Ok(())
}

fn cmd_bench(args: ExperimentArgs) -> Result<()> {
    let models = ModelSelect::from_str(&args.model)?.kinds();
    let (cfg, scenario, writer, _workers) = prepare(&args)?;
    let rows = cost_benchmark(&scenario, &cfg.bench)?;
    let csv_rows: Vec<Vec<String>> = rows
        .iter()
        .filter(|r| models.contains(&r.model))
        .map(|r| {
            vec![
                r.n_agents.to_string(),
                r.model.name().to_string(),
                fmt_f64(r.seconds_per_step),
            ]
        })
        .collect();
    let path =
        writer.write_csv("bench.csv", &["n_agents", "model", "seconds_per_step"], csv_rows)?;
    announce(&[path]);
    Ok(())
}

fn cmd_sweep(args: ExperimentArgs) -> Result<()> {
    let (cfg, scenario, writer, workers) = prepare(&args)?;
    let outcome = consistency_sweep(&scenario, &cfg.sweep, workers)?;
    let mut written = Vec::new();

    let mean_rows: Vec<Vec<String>> = outcome
        .rows
        .iter()
        .flat_map(|row| {
            row.nodes.iter().zip(&row.mean).map(move |(&x, &m)| {
                vec![row.axis.to_string(), row.level.clone(), fmt_f64(x), fmt_f64(m)]
            })
        })
        .collect();
    written.push(writer.write_csv(
        "sweep_means.csv",
        &["axis", "level", "x", "mean"],
        mean_rows,
    )?);

    let diff_rows: Vec<Vec<String>> = outcome
        .diffs
        .iter()
        .map(|d| {
            vec![
                d.axis.to_string(),
                d.coarse.clone(),
                d.fine.clone(),
                fmt_f64(d.rel_l2),
            ]
        })
        .collect();
    written.push(writer.write_csv(
        "sweep_diffs.csv",
        &["axis", "coarse", "fine", "rel_l2"],
        diff_rows,
    )?);

    println!(
        "consistency sweep at t = {} over {} realizations",
        outcome.t_measure, outcome.realizations
    );
    announce(&written);
    Ok(())
}

fn cmd_plot(args: PlotArgs) -> Result<()> {
    let figures = render_reports(&args.out)?;
    if figures.is_empty() {
        println!("no report files found in {}", args.out.display());
    }
    announce(&figures);
    Ok(())
}
