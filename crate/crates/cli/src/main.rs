use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cmono_cli::{
    cmd_alpha0, cmd_alpha0_sweep, cmd_asymcheck, cmd_certify, cmd_classify, cmd_test, parse_config, CliError, Format, Outcome, RunConfig,
    EXIT_ERROR, SWEEP_A, SWEEP_OFFSETS,
};
use cmono_core::testers::Mode;

/// Certify, test and classify completely monotone functions.
///
/// Exit codes: 0 certified / PASS / CM or LCM; 2 FAIL with a re-confirmed
/// witness (or NOT); 3 INCONCLUSIVE, UNKNOWN or no rule; 1 errors.
#[derive(Parser)]
#[command(name = "cmono", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct GlobalArgs {
    /// key = value file; flags override it
    #[arg(long, global = true)]
    config: Option<String>,
    /// Working precision in bits
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// Highest derivative order N
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Number of grid points
    #[arg(long, global = true)]
    grid: Option<usize>,
    /// Absolute tolerance floor for sign tests
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// json, csv or text
    #[arg(long, global = true)]
    format: Option<Format>,
    /// Write the report here instead of stdout
    #[arg(long, global = true)]
    out: Option<String>,
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for randomized sampling
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Omit the generation time from reports
    #[arg(long, global = true)]
    no_timestamp: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Derive a complete-monotonicity certificate, e.g. "exp(-sqrt(x)) on (0,inf)"
    Certify {
        expr: String,
        #[arg(long)]
        interval: Option<String>,
    },
    /// Grid sign test of an expression or family
    Test {
        input: Option<String>,
        #[arg(long)]
        json: Option<String>,
        #[arg(long)]
        interval: Option<String>,
        /// CM, AM, LCM or BERN
        #[arg(long, default_value = "CM")]
        mode: Mode,
    },
    /// Exact classification of a family, e.g. "psi-gap a=0 b=0.5 alpha=1 beta=0.5"
    Classify {
        input: Option<String>,
        #[arg(long)]
        json: Option<String>,
    },
    /// Empirical bracket for alpha_0
    Alpha0 {
        #[command(subcommand)]
        cmd: Alpha0Cmd,
    },
    /// Fit error exponents of the asymptotic expansions on [1e2, 1e5]
    Asymcheck {
        /// Shift of the single-psi expansions and lower gap parameter
        #[arg(long, default_value = "0.3")]
        a: String,
        #[arg(long, default_value = "0.9")]
        b: String,
    },
}

#[derive(Subcommand)]
enum Alpha0Cmd {
    /// One (a, b) pair
    Estimate {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        bisect_tol: Option<String>,
    },
    /// Grid over a and b - a
    Sweep {
        #[arg(long, default_value = SWEEP_A)]
        a_values: String,
        #[arg(long, default_value = SWEEP_OFFSETS)]
        b_offsets: String,
        #[arg(long)]
        bisect_tol: Option<String>,
    },
}

fn run_config(g: &GlobalArgs) -> Result<RunConfig, CliError> {
    let file = match &g.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|err| CliError::Io { path: path.clone(), err })?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    let flags = RunConfig {
        precision: g.precision,
        order: g.order,
        grid: g.grid,
        tol: g.tol,
        format: g.format,
        out: g.out.clone(),
        threads: g.threads,
        seed: g.seed,
        no_timestamp: g.no_timestamp,
    };
    Ok(file.merged(&flags))
}

fn run(cli: Cli) -> Result<(Outcome, RunConfig), CliError> {
    let cfg = run_config(&cli.global)?;
    if let Some(n) = cfg.threads {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let out = match &cli.cmd {
        Cmd::Certify { expr, interval } => cmd_certify(expr, interval.as_deref(), &cfg)?,
        Cmd::Test { input, json, interval, mode } => cmd_test(input.as_deref(), json.as_deref(), interval.as_deref(), *mode, &cfg)?,
        Cmd::Classify { input, json } => cmd_classify(input.as_deref(), json.as_deref(), &cfg)?,
        Cmd::Alpha0 { cmd: Alpha0Cmd::Estimate { a, b, bisect_tol } } => cmd_alpha0(a, b, bisect_tol.as_deref(), &cfg)?,
        Cmd::Alpha0 { cmd: Alpha0Cmd::Sweep { a_values, b_offsets, bisect_tol } } => {
            cmd_alpha0_sweep(a_values, b_offsets, bisect_tol.as_deref(), &cfg)?
        }
        Cmd::Asymcheck { a, b } => cmd_asymcheck(a, b, &cfg)?,
    };
    Ok((out, cfg))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((out, cfg)) => {
            let written = match &cfg.out {
                Some(path) => std::fs::write(path, &out.body).map_err(|err| CliError::Io { path: path.clone(), err }),
                None => std::io::stdout().write_all(out.body.as_bytes()).map_err(|err| CliError::Io { path: "stdout".into(), err }),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ERROR as u8);
            }
            ExitCode::from(out.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR as u8)
        }
    }
}
