use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rainbow_cli::table::emit_csv;
use rainbow_cli::{run_experiment, CliError, ExperimentConfig, Output, Task, EXIT_VERIFICATION_FAILED};

#[derive(Parser, Debug)]
#[command(name = "rainbow", version, about = "Thresholds, spread and rainbow lifts of small set families")]
struct Cli {
    /// JSON experiment config; replaces the subcommand.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config's).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug, Default)]
struct Source {
    /// Hypergraph text file.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Generator spec KIND:ARGS, e.g. hamilton:5.
    #[arg(long = "gen")]
    generator: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// p_c(F), or p_c^k(F) with --k.
    Threshold {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Expectation threshold q(F).
    Q {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Fractional expectation threshold q_f(F).
    Qf {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Optimal spread, with optional spread and Spiro checks.
    Spread {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        kappa: Option<f64>,
        /// q,r1,...,rλ
        #[arg(long)]
        spiro: Option<String>,
        /// Largest set size examined by the Spiro check.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Rainbow lift onto X×[k] with optional verification.
    Lift {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        r: Option<usize>,
        /// Spread constant of the source; defaults to its optimum.
        #[arg(long)]
        kappa: Option<f64>,
        #[arg(long, value_name = "DEPTH")]
        verify_spread: Option<usize>,
        /// q,r1,...,rλ with q = 1/κ.
        #[arg(long, value_name = "PROFILE")]
        verify_spiro: Option<String>,
    },
    /// Hybrid chain between the transversal and colored models.
    Couple {
        #[command(flatten)]
        source: Source,
        #[arg(long, value_delimiter = ',')]
        p: Vec<f64>,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        samples: Option<u64>,
        #[arg(long)]
        exact: bool,
    },
    /// Write a generated hypergraph in text format.
    Generate {
        /// KIND:ARGS
        spec: String,
    },
    /// q ≤ q_f ≤ p_c ≤ p_c^k on a random corpus or one family.
    ChainCheck {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        count: Option<usize>,
        /// Largest k tried.
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn with_source(task: Task, source: Source) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(task);
    cfg.input = source.input;
    cfg.generator = source.generator;
    cfg
}

fn to_config(cmd: Command) -> ExperimentConfig {
    match cmd {
        Command::Threshold { source, k, tol } => ExperimentConfig { k, tol, ..with_source(Task::Threshold, source) },
        Command::Q { source, tol } => ExperimentConfig { tol, ..with_source(Task::Q, source) },
        Command::Qf { source, tol } => ExperimentConfig { tol, ..with_source(Task::Qf, source) },
        Command::Spread { source, kappa, spiro, depth } => ExperimentConfig {
            kappa,
            spiro,
            depth,
            ..with_source(Task::Spread, source)
        },
        Command::Lift { source, k, r, kappa, verify_spread, verify_spiro } => ExperimentConfig {
            k: Some(k),
            r,
            kappa,
            depth: verify_spread,
            spiro: verify_spiro,
            ..with_source(Task::Lift, source)
        },
        Command::Couple { source, p, k, samples, exact } => ExperimentConfig {
            p,
            k: Some(k),
            samples,
            exact,
            ..with_source(Task::Couple, source)
        },
        Command::Generate { spec } => ExperimentConfig {
            generator: Some(spec),
            ..ExperimentConfig::new(Task::Generate)
        },
        Command::ChainCheck { source, count, k, tol } => ExperimentConfig {
            count,
            k,
            tol,
            ..with_source(Task::ChainCheck, source)
        },
    }
}

fn build(cli: Cli) -> Result<(ExperimentConfig, Option<PathBuf>), CliError> {
    let mut cfg = match (cli.config, cli.command) {
        (Some(path), None) => {
            let text = fs::read_to_string(&path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(cmd)) => to_config(cmd),
        (Some(_), Some(_)) => return Err(CliError::Input("give either --config or a subcommand".into())),
        (None, None) => return Err(CliError::Input("nothing to do; see --help".into())),
    };
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    Ok((cfg, cli.out))
}

fn write_output(output: &Output, out: Option<&PathBuf>) -> Result<(), CliError> {
    let io_err = |e: &dyn std::fmt::Display| CliError::Io(e.to_string());
    let mut sink: Box<dyn Write> = match out {
        Some(path) => Box::new(fs::File::create(path).map_err(|e| io_err(&e))?),
        None => Box::new(io::stdout().lock()),
    };
    match output {
        Output::Csv(table) => emit_csv(table, &mut sink).map_err(|e| io_err(&e)),
        Output::Text(text) => sink.write_all(text.as_bytes()).map_err(|e| io_err(&e)),
    }?;
    sink.flush().map_err(|e| io_err(&e))
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
    let result = build(cli).and_then(|(cfg, out)| {
        let report = run_experiment(&cfg)?;
        write_output(&report.output, out.as_ref())?;
        Ok(report)
    });
    match result {
        Ok(report) => {
            for note in &report.notes {
                eprintln!("{note}");
            }
            if report.verified {
                ExitCode::SUCCESS
            } else {
                eprintln!("verification failed");
                ExitCode::from(EXIT_VERIFICATION_FAILED)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
