use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tarlab::config::ExperimentConfig;
use tarlab::harness::{
    cmd_eval, cmd_index, cmd_report, cmd_report_from_csv, cmd_run, cmd_sweep, cmd_ttest, LabError,
};

/// Retrieval experiment harness: schema indexing, BM25 runs and sweeps,
/// TREC evaluation, significance testing, and comparison tables.
#[derive(Parser)]
#[command(name = "tarlab", version, arg_required_else_help = true)]
struct Cli {
    /// Experiment configuration file (flat key = value lines).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Overwrite existing indexes.
    #[arg(long, global = true)]
    force: bool,

    /// Worker threads (default: one per core).
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one inverted index per configured schema.
    Index,
    /// Write one run file per (schema, variant) cell.
    Run,
    /// Write run files along the configured parameter sweep.
    Sweep,
    /// Evaluate run files against the qrels (all discovered runs by default).
    Eval {
        /// Specific run files; defaults to every run in the output directory.
        runs: Vec<PathBuf>,
    },
    /// Paired t-test on per-topic average precision of two runs.
    Ttest {
        run_a: PathBuf,
        run_b: PathBuf,
    },
    /// Emit comparison matrices (csv, markdown, plotdata).
    Report {
        /// Re-render an externally supplied MAP matrix instead of
        /// reconstructing one from run files.
        #[arg(long, value_name = "PATH")]
        from_csv: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(jobs) = cli.jobs {
        // A later duplicate initialization (tests, multiple calls) is harmless.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }
    let Some(config_path) = cli.config.as_deref() else {
        eprintln!("error: --config <PATH> is required");
        return ExitCode::from(1);
    };
    let config = match ExperimentConfig::load(config_path) {
        Ok(config) => config,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match dispatch(&cli, &config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn dispatch(cli: &Cli, config: &ExperimentConfig) -> Result<(), LabError> {
    match &cli.command {
        Command::Index => {
            for s in cmd_index(config, cli.force)? {
                println!(
                    "indexed {}: {} docs, avgdl {:.2} -> {}",
                    s.schema,
                    s.docs,
                    s.avgdl,
                    s.path.display()
                );
            }
        }
        Command::Run => {
            for outcome in cmd_run(config)? {
                println!("wrote {} ({} entries)", outcome.path.display(), outcome.entries);
            }
        }
        Command::Sweep => {
            for outcome in cmd_sweep(config)? {
                println!("wrote {} ({} entries)", outcome.path.display(), outcome.entries);
            }
        }
        Command::Eval { runs } => {
            for outcome in cmd_eval(config, runs)? {
                println!(
                    "map {:.4}  num_q {}  {}",
                    outcome.report.aggregate.ap,
                    outcome.report.evaluated_topic_count,
                    outcome.run_path.display()
                );
            }
        }
        Command::Ttest { run_a, run_b } => {
            let outcome = cmd_ttest(config, run_a, run_b)?;
            let r = &outcome.result;
            println!("a: {}", outcome.label_a);
            println!("b: {}", outcome.label_b);
            println!(
                "n={} mean_diff={:.6} t={:.6} df={} p={:.6} marker={:?}",
                r.n, r.mean_diff, r.t_statistic, r.degrees_freedom, r.p_value, r.marker
            );
        }
        Command::Report { from_csv } => {
            let written = match from_csv {
                Some(csv) => cmd_report_from_csv(config, csv)?,
                None => cmd_report(config)?,
            };
            for path in written {
                println!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
