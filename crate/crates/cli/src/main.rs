mod config;
mod report;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use xitaylor::dd::{format_f64, DoubleDouble};
use xitaylor::error::Error;
use xitaylor::oracle::{a0_closed_form, oracle_coefficients, OracleCoefficient};
use xitaylor::pipelines::{coefficient, wallis, wallis_sequence_ok, CoefficientRecord};
use xitaylor::scan::{scan, ScanKind, ScanResult};
use xitaylor::verify::{run_verification, Claim, Fault, Status, VerifyOptions};

use config::{resolve, Command, FileConfig, Format, Overrides, RunConfig};
use report::{coefficients_csv, summarize, timestamp, to_json, Envelope, VERSION};

const EXIT_USAGE: u8 = 1;
const EXIT_NOT_CONVERGED: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser)]
#[command(name = "xitaylor", version, about = "Taylor coefficients of the completed zeta function at the central point")]
struct Cli {
    /// TOML file with defaults for any of the flags below.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Largest coefficient index.
    #[arg(long, global = true)]
    k_max: Option<u32>,
    /// Comma-separated routes: theta, L, p:N.
    #[arg(long, global = true)]
    routes: Option<String>,
    /// Absolute quadrature tolerance (oracle: relative conditioning threshold).
    #[arg(long, global = true, allow_hyphen_values = true)]
    tol: Option<f64>,
    /// Scan range as lo:hi.
    #[arg(long, global = true)]
    grid: Option<String>,
    #[arg(long, global = true)]
    step: Option<f64>,
    /// Restrict verify to one group or claim id.
    #[arg(long, global = true)]
    only: Option<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, hide = true)]
    inject_fault: Option<String>,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Compute a_k on the requested routes.
    Coeffs,
    /// Run the claim suite; exits 3 if any claim fails.
    Verify,
    /// Grid minimum of L, B, U, UV or p2.
    Scan {
        function: String,
        #[arg(long)]
        k: Option<u32>,
    },
    /// Coefficients from the Euler-Maclaurin zeta oracle.
    Oracle,
    /// Exact Wallis partial product.
    Wallis { n: u64 },
}

enum Failure {
    Usage(String),
    Numeric(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Domain { .. } => Failure::Usage(e.to_string()),
            e => Failure::Numeric(e),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numeric(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::NotConverged { .. } | Error::SeriesCap { .. } | Error::IllConditioned { .. } => EXIT_NOT_CONVERGED,
                _ => EXIT_FAILED,
            })
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut k = None;
    let command = match cli.command {
        Sub::Coeffs => Command::Coeffs,
        Sub::Verify => Command::Verify,
        Sub::Scan { function, k: kk } => {
            k = kk;
            Command::Scan(function.parse::<ScanKind>().map_err(Failure::Usage)?)
        }
        Sub::Oracle => Command::Oracle,
        Sub::Wallis { n } => Command::Wallis(n),
    };
    let fault = cli
        .inject_fault
        .as_deref()
        .map(str::parse::<Fault>)
        .transpose()
        .map_err(Failure::Usage)?;
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(Failure::Usage)?,
        None => FileConfig::default(),
    };
    let overrides = Overrides {
        k_max: cli.k_max,
        routes: cli.routes,
        tol: cli.tol,
        grid: cli.grid,
        step: cli.step,
        k,
        only: cli.only,
        format: cli.format,
        out: cli.out,
    };
    let cfg = resolve(command, overrides, file, fault).map_err(Failure::Usage)?;

    let (text, code) = match cfg.command {
        Command::Coeffs => cmd_coeffs(&cfg)?,
        Command::Verify => cmd_verify(&cfg)?,
        Command::Scan(kind) => cmd_scan(&cfg, kind)?,
        Command::Oracle => cmd_oracle(&cfg)?,
        Command::Wallis(n) => cmd_wallis(&cfg, n)?,
    };
    match &cfg.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))?,
        None => print!("{text}"),
    }
    Ok(code)
}

fn envelope<R: Serialize>(cfg: &RunConfig, claims: Vec<Claim>, coefficients: Vec<CoefficientRecord>, results: Option<R>) -> (String, u8) {
    let summary = summarize(&claims);
    let code = if summary.failed > 0 { EXIT_FAILED } else { 0 };
    let env = Envelope {
        version: VERSION,
        config: cfg.echo(),
        claims,
        coefficients,
        summary,
        results,
        timestamp: timestamp(),
    };
    (to_json(&env), code)
}

fn claim(id: &str, group: &str, anchor: &str, residual: f64, bound: f64, details: &[(&str, String)]) -> Claim {
    Claim {
        id: id.into(),
        group: group.into(),
        anchor: anchor.into(),
        status: if residual <= bound { Status::Pass } else { Status::Fail },
        residual,
        bound,
        details: details.iter().map(|(k, v)| (k.to_string(), v.clone())).collect::<BTreeMap<_, _>>(),
    }
}

fn cmd_coeffs(cfg: &RunConfig) -> Result<(String, u8), Failure> {
    let mut jobs = Vec::new();
    for k in 1..=cfg.k_max {
        for &r in &cfg.routes {
            jobs.push((k, r));
        }
    }
    let a0 = coefficient(0, cfg.routes[0], cfg.tol)?;
    let rest: Vec<CoefficientRecord> = jobs
        .par_iter()
        .map(|&(k, r)| coefficient(k, r, cfg.tol))
        .collect::<Result<_, _>>()?;
    let mut rows: Vec<CoefficientRecord> = cfg
        .routes
        .iter()
        .map(|&r| CoefficientRecord { route: r, ..a0.clone() })
        .collect();
    rows.extend(rest);
    if cfg.format == Format::Csv {
        let text = coefficients_csv(&rows).map_err(|e| Failure::Usage(e.to_string()))?;
        return Ok((text, 0));
    }
    Ok(envelope::<()>(cfg, Vec::new(), rows, None))
}

fn cmd_verify(cfg: &RunConfig) -> Result<(String, u8), Failure> {
    let opts = VerifyOptions {
        tol: cfg.tol,
        k_max: cfg.k_max,
        only: cfg.only.clone(),
        fault: cfg.fault,
    };
    let rep = run_verification(&opts)?;
    Ok(envelope::<()>(cfg, rep.claims, rep.coefficients, None))
}

fn cmd_scan(cfg: &RunConfig, kind: ScanKind) -> Result<(String, u8), Failure> {
    let r: ScanResult = scan(kind, cfg.k, cfg.grid.0, cfg.grid.1, cfg.step)?;
    let c = claim(
        "scan-nonnegative",
        "core-functions",
        &format!("min of {kind} over [{}, {}] >= 0", cfg.grid.0, cfg.grid.1),
        if r.min.is_nan() { f64::INFINITY } else { (-r.min).max(0.0) },
        0.0,
        &[("min", format_f64(r.min)), ("argmin", format_f64(r.argmin))],
    );
    Ok(envelope(cfg, vec![c], Vec::new(), Some(r)))
}

#[derive(Serialize)]
struct OracleResults {
    coefficients: Vec<OracleCoefficient>,
    a0_closed_form: String,
}

fn cmd_oracle(cfg: &RunConfig) -> Result<(String, u8), Failure> {
    let co = oracle_coefficients(cfg.k_max, cfg.tol)?;
    let closed = a0_closed_form()?;
    let c = claim(
        "a0-closed-form",
        "zeta-oracle",
        "fitted a_0 = -(1/4) pi^{-1/4} Gamma(1/4) zeta(1/2)",
        (co[0].value - closed).abs(),
        co[0].est_error,
        &[],
    );
    Ok(envelope(
        cfg,
        vec![c],
        Vec::new(),
        Some(OracleResults {
            coefficients: co,
            a0_closed_form: format_f64(closed),
        }),
    ))
}

#[derive(Serialize)]
struct WallisResults {
    n: u64,
    rational: String,
    value: String,
    half_pi_minus_value: String,
}

fn cmd_wallis(cfg: &RunConfig, n: u64) -> Result<(String, u8), Failure> {
    if n > 100_000 {
        return Err(Failure::Usage(format!("wallis N is capped at 100000, got {n}")));
    }
    let w = wallis(n);
    let v = w.to_dd();
    let gap = DoubleDouble::PI.ldexp(-1) - v;
    let ok = wallis_sequence_ok(n);
    let c = claim(
        "wallis-monotone",
        "coefficient-pipelines",
        "Wallis(j) strictly increasing and < pi/2 for j <= N",
        if ok { 0.0 } else { 1.0 },
        0.0,
        &[],
    );
    Ok(envelope(
        cfg,
        vec![c],
        Vec::new(),
        Some(WallisResults {
            n,
            rational: w.value.to_string(),
            value: v.to_sci_string(32),
            half_pi_minus_value: gap.to_sci_string(17),
        }),
    ))
}
