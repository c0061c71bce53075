//! `msq`: closed forms for mean squares of Dirichlet L-values, sine power
//! sums, and numeric verification sweeps.
//!
//! Exit codes: 0 success, 1 verification or internal failure, 2 usage error.

mod commands;
mod config;
mod ranges;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use msq_core::symbolic::Format;

use commands::{CliError, Identity, IdentityParams, Output};
use config::Config;

#[derive(Parser, Debug)]
#[command(name = "msq", version, about = "Mean squares of Dirichlet L-values in closed form")]
struct Cli {
    /// TOML file with defaults for any long flag (flags win).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Report deviations from the printed formulas on stderr.
    #[arg(long, global = true)]
    pedantic: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the closed form of the parity-restricted mean square at r.
    ClosedForm {
        #[arg(long)]
        r: Option<u64>,
        /// latex, json or text
        #[arg(long)]
        format: Option<String>,
    },
    /// Print the Jordan-totient expansion of sum sin(pi m/k)^-n.
    SinSum {
        #[arg(long)]
        n: Option<u64>,
        /// Also print the exact value at this modulus.
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        format: Option<String>,
    },
    /// Compare closed forms against the numeric oracle; JSON report on stdout.
    Verify {
        /// List such as "3,5" or "3..7".
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        k: Option<String>,
        /// Working precision in bits.
        #[arg(long)]
        prec: Option<usize>,
        /// Relative tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run one of the identity suites; JSON report on stdout.
    IdentityCheck {
        #[arg(value_enum)]
        which: Identity,
        #[arg(long)]
        p_max: Option<u64>,
        #[arg(long)]
        q_max: Option<u64>,
        #[arg(long)]
        k_min: Option<u64>,
        #[arg(long)]
        k_max: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        #[arg(long)]
        h_min: Option<u64>,
        #[arg(long)]
        h_max: Option<u64>,
        #[arg(long)]
        prec: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

fn usage(e: String) -> CliError {
    CliError::Usage(e)
}

fn pick<T>(flag: Option<T>, from_config: Result<Option<T>, String>, default: T) -> Result<T, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => Ok(from_config.map_err(usage)?.unwrap_or(default)),
    }
}

fn format_of(flag: Option<String>, cfg: &Config) -> Result<Format, CliError> {
    let name = pick(flag, cfg.string("format"), "text".to_string())?;
    name.parse().map_err(|e: msq_core::Error| usage(e.to_string()))
}

fn required(flag: Option<u64>, cfg: &Config, key: &str) -> Result<u64, CliError> {
    match flag {
        Some(v) => Ok(v),
        None => cfg
            .int(key)
            .map_err(usage)?
            .ok_or_else(|| usage(format!("missing --{key}"))),
    }
}

fn required_list(flag: Option<String>, cfg: &Config, key: &str) -> Result<Vec<u64>, CliError> {
    match flag {
        Some(s) => ranges::parse_list(&s).map_err(usage),
        None => cfg
            .list(key)
            .map_err(usage)?
            .ok_or_else(|| usage(format!("missing --{key}"))),
    }
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let cfg = match &cli.config {
        Some(path) => Config::load(path).map_err(usage)?,
        None => Config::default(),
    };
    let pedantic = cli.pedantic || cfg.bool("pedantic").map_err(usage)?.unwrap_or(false);
    match cli.command {
        Command::ClosedForm { r, format } => {
            let r = required(r, &cfg, "r")?;
            commands::closed_form(r, format_of(format, &cfg)?, pedantic)
        }
        Command::SinSum { n, k, format } => {
            let n = required(n, &cfg, "n")?;
            let k = match k {
                Some(k) => Some(k),
                None => cfg.int("k").map_err(usage)?,
            };
            commands::sin_sum(n, k, format_of(format, &cfg)?)
        }
        Command::Verify { r, k, prec, tol } => {
            let rs = required_list(r, &cfg, "r")?;
            let ks = required_list(k, &cfg, "k")?;
            let prec = pick(prec, cfg.int("prec").map(|v| v.map(|v| v as usize)), 128)?;
            let tol = pick(tol, cfg.float("tol"), 1e-10)?;
            commands::verify(&rs, &ks, prec, tol, pedantic)
        }
        Command::IdentityCheck {
            which,
            p_max,
            q_max,
            k_min,
            k_max,
            n_max,
            h_min,
            h_max,
            prec,
            tol,
        } => {
            let params = IdentityParams {
                p_max: pick(p_max, cfg.int("p-max"), 4)?,
                q_max: pick(q_max, cfg.int("q-max"), 4)?,
                k_min: pick(k_min, cfg.int("k-min"), 3)?,
                k_max: pick(k_max, cfg.int("k-max"), 10)?,
                n_max: pick(n_max, cfg.int("n-max"), 6)?,
                h_min: pick(h_min, cfg.int("h-min"), if which == Identity::Sigma0 { 0 } else { 1 })?,
                h_max: pick(h_max, cfg.int("h-max"), 4)?,
                prec: pick(prec, cfg.int("prec").map(|v| v.map(|v| v as usize)), 128)?,
                tol: pick(tol, cfg.float("tol"), 1e-9)?,
            };
            commands::identity_check(which, &params, pedantic)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("note: {note}");
            }
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.stdout.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if out.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: one or more checks failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
