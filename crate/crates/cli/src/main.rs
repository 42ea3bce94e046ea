//! `foxwright`: batch evaluation, identity verification and bound checks
//! over a grid, reported as JSON lines or CSV.

mod commands;
mod grid;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use foxwright::{Format, ParameterSet, Row, RowStatus};

const PARAMS_SCHEMA: &str = r#"parameter file schema (JSON):
  {"upper": [[alpha_1, A_1], ...], "lower": [[beta_1, B_1], ...]}
  scales A_i, B_j must be positive; no other keys are allowed"#;

#[derive(Parser)]
#[command(
    name = "foxwright",
    version,
    about = "Fox–Wright functions and their H-function densities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Parameter set (JSON file)
    #[arg(long)]
    params: PathBuf,
    /// Verification tolerance on abs_err / (1 + |reference|)
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    output: OutputFormat,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Auto,
    Residue,
    Contour,
}

#[derive(Subcommand)]
enum Command {
    /// Series value Psi(z)
    Eval {
        #[command(flatten)]
        common: Common,
        /// Grid: start:stop:count, a..b or a comma list
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        z: String,
    },
    /// H-function density H(t) on (0, R)
    Hfun {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, value_enum, default_value_t = Method::Auto)]
        method: Method,
    },
    /// Moment identity residuals for orders k
    Moments {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value = "0..8", allow_hyphen_values = true)]
        k: String,
    },
    /// Integral representation against the series
    VerifyRepresentation {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
    },
    /// Stieltjes form against the lifted series (requires mu = 0)
    VerifyStieltjes {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
    },
    /// Laplace transform t^{lambda-1} e^{-t} against the lifted series
    VerifyLaplace {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Two-sided bounds at -z (requires mu = 0)
    Bounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        /// Also check the lifted bound with this lambda
        #[arg(long)]
        lambda: Option<f64>,
        /// Also check the sigma lower bound with this sigma
        #[arg(long)]
        sigma: Option<f64>,
    },
    /// Finite-difference complete-monotonicity check of the density transform
    CmCheck {
        #[command(flatten)]
        common: Common,
        /// Grid points in (0, inf)
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 0.05)]
        h: f64,
        #[arg(long, default_value_t = 6)]
        max_order: usize,
    },
    /// Monotonicity of the shifted-over-unshifted Stieltjes ratio
    RatioScan {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Eval { common, .. }
            | Command::Hfun { common, .. }
            | Command::Moments { common, .. }
            | Command::VerifyRepresentation { common, .. }
            | Command::VerifyStieltjes { common, .. }
            | Command::VerifyLaplace { common, .. }
            | Command::Bounds { common, .. }
            | Command::CmCheck { common, .. }
            | Command::RatioScan { common, .. } => common,
        }
    }
}

/// Failure before any row could be produced; exit status 1.
struct UsageError(String);

fn load_params(path: &Path) -> Result<ParameterSet, UsageError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        UsageError(format!(
            "cannot read parameter file {}: {e}",
            path.display()
        ))
    })?;
    ParameterSet::from_json(&text)
        .map_err(|e| UsageError(format!("{}: {e}\n{PARAMS_SCHEMA}", path.display())))
}

fn grid(name: &str, spec: &str) -> Result<Vec<f64>, UsageError> {
    grid::parse_grid(spec).map_err(|e| UsageError(format!("--{name}: {e}")))
}

fn run(cli: Cli) -> Result<Vec<Row>, UsageError> {
    use commands::*;
    let common = cli.command.common();
    // written negated so that NaN is rejected too
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(common.tol > 0.0) {
        return Err(UsageError(format!(
            "--tol must be positive, got {}",
            common.tol
        )));
    }
    let params = load_params(&common.params)?;
    let ctx = Context::new(params, common.tol);
    let rows = match &cli.command {
        Command::Eval { z, .. } => eval(&ctx, &grid("z", z)?),
        Command::Hfun { t, method, .. } => {
            let method = match method {
                Method::Auto => foxwright::HfunMethod::Auto,
                Method::Residue => foxwright::HfunMethod::ResidueSeries,
                Method::Contour => foxwright::HfunMethod::RegularizedContour,
            };
            hfun(&ctx, &grid("t", t)?, method)
        }
        Command::Moments { k, .. } => moments(&ctx, &grid("k", k)?),
        Command::VerifyRepresentation { z, .. } => verify_representation(&ctx, &grid("z", z)?),
        Command::VerifyStieltjes { z, sigma, .. } => verify_stieltjes(&ctx, &grid("z", z)?, *sigma),
        Command::VerifyLaplace { z, lambda, .. } => verify_laplace(&ctx, &grid("z", z)?, *lambda),
        Command::Bounds {
            z, lambda, sigma, ..
        } => bounds(&ctx, &grid("z", z)?, *lambda, *sigma),
        Command::CmCheck {
            z, h, max_order, ..
        } => cm(&ctx, &grid("z", z)?, *h, *max_order),
        Command::RatioScan {
            z, sigma, delta, ..
        } => ratio_scan(&ctx, &grid("z", z)?, *sigma, *delta),
    };
    Ok(rows)
}

fn emit(rows: &[Row], format: Format, out: Option<&Path>) -> Result<(), UsageError> {
    match out {
        Some(path) => {
            let io_err = |e: io::Error| UsageError(format!("cannot write {}: {e}", path.display()));
            let file = File::create(path).map_err(io_err)?;
            let mut w = BufWriter::new(file);
            foxwright::report::write_rows(&mut w, rows, format).map_err(io_err)?;
            w.flush().map_err(io_err)
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            foxwright::report::write_rows(&mut w, rows, format)
                .map_err(|e| UsageError(format!("cannot write to stdout: {e}")))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let (format, out) = {
        let c = cli.command.common();
        let format = match c.output {
            OutputFormat::Json => Format::Json,
            OutputFormat::Csv => Format::Csv,
        };
        (format, c.out.clone())
    };
    let result = run(cli).and_then(|rows| emit(&rows, format, out.as_deref()).map(|_| rows));
    match result {
        Ok(rows) if rows.iter().all(|r| r.status == RowStatus::Ok) => ExitCode::SUCCESS,
        Ok(_) => ExitCode::from(2),
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
