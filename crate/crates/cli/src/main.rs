use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::Parser;
use latticeborell::harness::{emit_report, run_experiment, Experiment, ExperimentConfig, ReportFormat};

/// Run a lattice-moment experiment described by a JSON config file.
///
/// Exit status: 0 if every asserted check passes, 1 if a check fails,
/// 2 on configuration or I/O errors.
#[derive(Debug, Parser)]
#[command(name = "latticeborell", version)]
struct Args {
    /// One of: enumerate, borell, cq, brunn-minkowski, meanwidth,
    /// convergence, counterexample, shell-bound.
    experiment: Experiment,

    #[arg(long)]
    config: PathBuf,

    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Report path; defaults to the config's `output`, else stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long)]
    threads: Option<usize>,

    /// json-lines or csv; overrides the config.
    #[arg(long)]
    format: Option<ReportFormat>,
}

fn run(args: Args) -> anyhow::Result<bool> {
    let mut cfg = ExperimentConfig::load(&args.config).with_context(|| format!("reading {}", args.config.display()))?;
    if cfg.experiment != args.experiment {
        bail!(
            "config describes experiment {:?} but {:?} was requested",
            cfg.experiment.name(),
            args.experiment.name()
        );
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(format) = args.format {
        cfg.format = format;
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = args.threads {
        if t == 0 {
            bail!("--threads must be positive");
        }
        pool = pool.num_threads(t);
    }
    let pool = pool.build()?;
    let report = pool.install(|| run_experiment(&cfg))?;
    match args.out.or_else(|| cfg.output.as_ref().map(PathBuf::from)) {
        Some(path) => {
            emit_report(&report.rows, cfg.format, &path).with_context(|| format!("writing {}", path.display()))?
        }
        None => print!("{}", report.render(cfg.format)?),
    }
    eprint!("{}", report.check_summary());
    Ok(report.pass())
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprint!("{e}");
            return ExitCode::from(2);
        }
    };
    match run(args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
