use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use transverse_blowup::symexpr::{DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_TOL};
use transverse_blowup::uniqueness::Construction;
use transverse_blowup::ZeroTestConfig;

mod commands;
mod report;

use commands::{CliError, Outcome};
use report::{ReportDocument, SCHEMA_VERSION};

/// Builds the transverse-loop blow-up models and certifies them by sampling.
#[derive(Parser, Debug)]
#[command(name = "transverse-blowup", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalOpts {
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES, value_parser = at_least::<1>)]
    samples: usize,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Include wall time in the report (makes it non-reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

fn at_least<const MIN: usize>(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v >= MIN => Ok(v),
        _ => Err(format!("expected an integer ≥ {MIN}, got {s}")),
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {s}"))
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Standard tube model.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Surgery blow-up of the core circle.
    #[command(subcommand)]
    Blowup(BlowupCmd),
    /// Circle quotient of a product of unit bundles.
    #[command(subcommand)]
    Bw(BwCmd),
    /// Contact cut for the weight-(a, b) circle action.
    Cut {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, default_value_t = 2.0, value_parser = positive)]
        radius: f64,
        #[arg(long, default_value_t = 2, value_parser = fiber)]
        n: usize,
    },
    /// Comparison of the blow-up constructions.
    #[command(subcommand)]
    Uniq(UniqCmd),
    /// Runs every certificate.
    VerifyAll,
}

fn fiber(s: &str) -> Result<usize, String> {
    match s {
        "1" => Ok(1),
        "2" => Ok(2),
        _ => Err(format!("fiber dimension must be 1 or 2, got {s}")),
    }
}

#[derive(Subcommand, Debug)]
enum ModelCmd {
    Dump {
        #[arg(long, default_value_t = 2, value_parser = fiber)]
        n: usize,
        #[arg(long, default_value_t = 0.1, value_parser = positive)]
        r_min: f64,
        #[arg(long, default_value_t = 1.9, value_parser = positive)]
        r_max: f64,
    },
}

#[derive(Subcommand, Debug)]
enum BlowupCmd {
    Surgery {
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        #[arg(long, default_value_t = 2, value_parser = fiber)]
        n: usize,
        /// CSV of r, H, dH.
        #[arg(long)]
        emit_profile: Option<PathBuf>,
        #[arg(long, default_value_t = 201, value_parser = at_least::<2>)]
        rows: usize,
    },
}

#[derive(Subcommand, Debug)]
enum BwCmd {
    Product {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    Surgery,
    Gromov,
    Cut,
}

impl From<Which> for Construction {
    fn from(w: Which) -> Self {
        match w {
            Which::Surgery => Construction::Surgery,
            Which::Gromov => Construction::Gromov,
            Which::Cut => Construction::Cut,
        }
    }
}

#[derive(Subcommand, Debug)]
enum UniqCmd {
    Compare {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, default_value_t = 2, value_parser = fiber)]
        n: usize,
    },
    Path {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        #[arg(long, value_enum, default_value = "gromov")]
        from: Which,
        #[arg(long, value_enum, default_value = "cut")]
        to: Which,
        #[arg(long, default_value_t = 2, value_parser = fiber)]
        n: usize,
        /// CSV of t, margin, contact margin.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
}

fn dispatch(cmd: &Command, cfg: &ZeroTestConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Model(ModelCmd::Dump { n, r_min, r_max }) => {
            commands::model_dump(*n, *r_min, *r_max, cfg)
        }
        Command::Blowup(BlowupCmd::Surgery {
            l,
            n,
            emit_profile,
            rows,
        }) => commands::blowup_surgery(*l, *n, emit_profile.as_deref(), *rows, cfg),
        Command::Bw(BwCmd::Product { a, b }) => commands::bw_product(*a, *b),
        Command::Cut { a, b, radius, n } => commands::cut(*a, *b, *radius, *n, cfg),
        Command::Uniq(UniqCmd::Compare { a, b, n }) => commands::uniq_compare(*a, *b, *n, cfg),
        Command::Uniq(UniqCmd::Path {
            a,
            b,
            from,
            to,
            n,
            emit,
        }) => commands::uniq_path(
            *a,
            *b,
            (*from).into(),
            (*to).into(),
            *n,
            emit.as_deref(),
            cfg,
        ),
        Command::VerifyAll => commands::verify_all(cfg),
    }
}

fn run(cli: &Cli, argv: Vec<String>) -> Result<bool, CliError> {
    let g = &cli.global;
    let cfg = ZeroTestConfig {
        samples: g.samples,
        tol: g.tol,
        seed: g.seed,
    };
    let start = Instant::now();
    let outcome = dispatch(&cli.command, &cfg)?;
    let passed = !outcome.checks.iter().any(|c| c.failed());
    for c in outcome.checks.iter().filter(|c| c.failed()) {
        eprintln!("{c}");
    }
    let doc = ReportDocument {
        schema_version: SCHEMA_VERSION,
        command: argv,
        seed: g.seed,
        samples: g.samples,
        tolerance: g.tol,
        passed,
        checks: outcome.checks,
        data: outcome.data,
        wall_time_s: g.timing.then(|| start.elapsed().as_secs_f64()),
    };
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    match &g.report {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?,
        None => print!("{text}"),
    }
    let failed = doc.checks.iter().filter(|c| c.failed()).count();
    eprintln!(
        "{} of {} checks passed",
        doc.checks.len() - failed,
        doc.checks.len()
    );
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let argv = std::env::args().skip(1).collect();
    match run(&cli, argv) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e @ CliError::Usage(_)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
