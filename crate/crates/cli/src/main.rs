use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use sdaug::harness::{self, RunConfig};
use sdaug::steepest::SolveMode;
use sdaug::Tolerances;

#[derive(Parser, Debug)]
#[command(
    name = "sdaug",
    version,
    about = "Steepest-descent circuit augmentation for general-form LPs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Phase I, then steepest-descent augmentation to optimality.
    Solve(Opts),
    /// Steepest descent against primal simplex Phase II from the same start.
    Compare(Opts),
    /// Run the exact circuit oracle checks on small instances.
    Verify {
        #[command(flatten)]
        opts: Opts,
        /// Also check this many random polytopes (seeds seed..seed+N).
        #[arg(long, default_value_t = 0)]
        random: usize,
    },
}

#[derive(Args, Debug)]
struct Opts {
    /// MPS input files.
    problems: Vec<PathBuf>,
    /// dual-warm, dual-cold or primal-warm.
    #[arg(long, default_value = "dual-warm")]
    mode: SolveMode,
    #[arg(long, default_value_t = 1e-7)]
    tol_feas: f64,
    #[arg(long, default_value_t = 1e-9)]
    tol_term: f64,
    /// Augmentation cap; defaults to 50 (n + m_B).
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long)]
    reduce_parallel_facets: bool,
    /// Directory for CSV output (created if missing).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Negate the objective after reading.
    #[arg(long)]
    maximize: bool,
}

impl Opts {
    fn config(self) -> RunConfig {
        let defaults = Tolerances::default();
        RunConfig {
            problems: self.problems,
            mode: self.mode,
            // the activity threshold may not be tighter than feasibility
            tol: Tolerances {
                feas: self.tol_feas,
                act: defaults.act.max(self.tol_feas),
                term: self.tol_term,
                ..defaults
            },
            max_iters: self.max_iters,
            reduce_parallel_facets: self.reduce_parallel_facets,
            out_dir: self.out,
            seed: self.seed,
            maximize: self.maximize,
            ..RunConfig::default()
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<i32> {
    let (cfg, cmd): (RunConfig, fn(&RunConfig) -> sdaug::Result<harness::CommandReport>) = match cli.command {
        Command::Solve(o) => (o.config(), harness::cmd_solve),
        Command::Compare(o) => (o.config(), harness::cmd_compare),
        Command::Verify { opts, random } => (
            RunConfig {
                random_instances: random,
                ..opts.config()
            },
            harness::cmd_verify,
        ),
    };
    if cfg.problems.is_empty() && cfg.random_instances == 0 {
        anyhow::bail!("no input problems given");
    }
    if let Some(dir) = &cfg.out_dir {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let report = match cmd(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(harness::exit_code_for_error(&e));
        }
    };
    for line in &report.lines {
        println!("{line}");
    }
    Ok(report.exit_code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits 2 on usage errors, which would read as "infeasible"
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
