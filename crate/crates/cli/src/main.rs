mod config;
mod error;
mod experiments;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde_json::json;

use config::Config;
use error::{nearest, CliError};
use experiments::{Context, Plan};

#[derive(Parser)]
#[command(name = "helipoly", version, about = "Run helical-polygon experiments and write their data as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run experiments by id (or those named in the config file).
    Run {
        ids: Vec<String>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
        /// Output root; each experiment writes to <DIR>/<id>/.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
        /// Full-scale resolutions. Expect hours of wall-clock time.
        #[arg(long)]
        full: bool,
        /// Experiments run in parallel, one per worker.
        #[arg(long, value_name = "N")]
        jobs: Option<usize>,
    },
    /// Print the experiment catalog.
    List,
    /// Check a config file without running anything.
    ValidateConfig {
        #[arg(value_name = "PATH", required_unless_present = "config")]
        path: Option<PathBuf>,
        #[arg(long, value_name = "PATH")]
        config: Option<PathBuf>,
    },
}

fn lookup(id: &str) -> Result<&'static experiments::Experiment, CliError> {
    experiments::find(id).ok_or_else(|| {
        CliError::new("unknown-experiment", format!("no experiment named {id:?}"))
            .with_nearest(nearest(id, &experiments::ids()))
    })
}

fn plan_all(ids: &[String], ctx: &Context) -> Result<Vec<(&'static str, Plan)>, CliError> {
    let found = ids.iter().map(|id| lookup(id)).collect::<Result<Vec<_>, _>>()?;
    found.into_iter().map(|e| Ok((e.id, e.plan(ctx)?))).collect()
}

fn manifest(id: &str, plan: &Plan, dir: &Path, ctx: &Context) -> serde_json::Value {
    let summary = experiments::find(id).map(|e| e.summary).unwrap_or_default();
    json!({
        "experiment": id,
        "description": summary,
        "version": env!("CARGO_PKG_VERSION"),
        "deterministic": true,
        "full": ctx.full,
        "output_dir": dir.display().to_string(),
        "polygons": plan.polygons,
        "solver": plan.solver,
        "rational_times": plan.times.iter().map(|(p, q)| format!("{p}/{q}")).collect::<Vec<_>>(),
        "analysis": plan.analysis,
        "outputs": plan.outputs,
    })
}

fn execute(id: &str, plan: Plan, root: &Path, ctx: &Context) -> Result<PathBuf, CliError> {
    let dir = root.join(id);
    std::fs::create_dir_all(&dir)?;
    output::write_json(&manifest(id, &plan, &dir, ctx), &dir.join("manifest.json"))?;
    let declared = plan.outputs.clone();
    let tables = (plan.work)()?;
    let produced: Vec<&str> = tables.iter().map(|t| t.name.as_str()).collect();
    if produced != declared {
        return Err(CliError::new(
            "internal",
            format!("{id} produced {produced:?} but its manifest declares {declared:?}"),
        ));
    }
    for t in &tables {
        t.write_csv(&dir.join(&t.name))?;
    }
    Ok(dir)
}

fn run(ids: Vec<String>, config: Option<PathBuf>, out: Option<PathBuf>, full: bool, jobs: Option<usize>) -> Result<(), CliError> {
    let cfg = match &config {
        Some(p) => config::load(p)?,
        None => Config::default(),
    };
    let ids = if ids.is_empty() { cfg.experiments.clone() } else { ids };
    if ids.is_empty() {
        return Err(CliError::new("usage", "no experiment ids given; see `helipoly list`"));
    }
    let ctx = Context { full: full || cfg.full.unwrap_or(false), overrides: cfg.overrides.clone() };
    let root = out.or(cfg.out.clone()).unwrap_or_else(|| PathBuf::from("results"));
    let jobs = jobs.or(cfg.jobs).unwrap_or(1);
    if jobs == 0 {
        return Err(CliError::new("usage", "--jobs must be at least 1"));
    }
    let plans = plan_all(&ids, &ctx)?;
    if ctx.full {
        eprintln!("warning: full-scale resolutions; runs can take hours");
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| CliError::new("internal", e.to_string()))?;
    let results: Vec<Result<PathBuf, CliError>> =
        pool.install(|| plans.into_par_iter().map(|(id, plan)| execute(id, plan, &root, &ctx)).collect());
    let mut first_error = None;
    for r in results {
        match r {
            Ok(dir) => println!("{}", dir.display()),
            Err(e) => {
                eprintln!("{}", e.to_json());
                first_error.get_or_insert(e);
            }
        }
    }
    match first_error {
        // already reported
        Some(e) => Err(CliError { kind: "reported", ..e }),
        None => Ok(()),
    }
}

fn validate(path: &Path) -> Result<(), CliError> {
    let cfg = config::load(path)?;
    let ctx = Context { full: cfg.full.unwrap_or(false), overrides: cfg.overrides.clone() };
    let plans = plan_all(&cfg.experiments, &ctx)?;
    let report = json!({
        "valid": true,
        "experiments": plans.iter().map(|(id, p)| json!({ "id": id, "outputs": p.outputs })).collect::<Vec<_>>(),
    });
    println!("{report}");
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::List => {
            for e in experiments::CATALOG {
                println!("{:<18} {}", e.id, e.summary);
            }
            Ok(())
        }
        Command::Run { ids, config, out, full, jobs } => run(ids, config, out, full, jobs),
        Command::ValidateConfig { path, config } => validate(&path.or(config).expect("clap enforces a path")),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.kind != "reported" {
                eprintln!("{}", e.to_json());
            }
            ExitCode::from(if matches!(e.kind, "config" | "usage" | "unknown-experiment") { 2 } else { 1 })
        }
    }
}
