//! Flag/file/default resolution into a `RunConfig`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xitaylor::dd::format_f64;
use xitaylor::pipelines::Route;
use xitaylor::scan::ScanKind;
use xitaylor::verify::Fault;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Coeffs,
    Verify,
    Scan(ScanKind),
    Oracle,
    Wallis(u64),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Coeffs => "coeffs",
            Command::Verify => "verify",
            Command::Scan(_) => "scan",
            Command::Oracle => "oracle",
            Command::Wallis(_) => "wallis",
        }
    }
}

/// Keys accepted in a `--config` TOML file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub k_max: Option<u32>,
    pub routes: Option<String>,
    pub tol: Option<f64>,
    pub grid: Option<String>,
    pub step: Option<f64>,
    pub k: Option<u32>,
    pub only: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("invalid config {}: {e}", path.display()))
    }
}

/// Values given on the command line; `None` falls through to the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub k_max: Option<u32>,
    pub routes: Option<String>,
    pub tol: Option<f64>,
    pub grid: Option<String>,
    pub step: Option<f64>,
    pub k: Option<u32>,
    pub only: Option<String>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub k_max: u32,
    pub routes: Vec<Route>,
    pub tol: f64,
    pub grid: (f64, f64),
    pub step: f64,
    pub k: u32,
    pub only: Option<String>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub fault: Option<Fault>,
}

/// Echo of the resolved configuration; numbers as strings.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub command: String,
    pub k_max: u32,
    pub routes: Vec<String>,
    pub shifts: Vec<u32>,
    pub tol: String,
    pub grid: [String; 2],
    pub step: String,
    pub k: u32,
    pub only: Option<String>,
    pub format: Format,
    pub fault: Option<String>,
}

fn default_tol(cmd: &Command) -> f64 {
    match cmd {
        // relative conditioning threshold for the fitted coefficients
        Command::Oracle => 1e-3,
        _ => 1e-12,
    }
}

fn default_k_max(cmd: &Command) -> u32 {
    match cmd {
        Command::Oracle => 4,
        _ => 6,
    }
}

fn default_grid(kind: ScanKind) -> ((f64, f64), f64) {
    match kind {
        ScanKind::L => ((1.0, 8.0), 1e-3),
        ScanKind::B => ((1.0, 50.0), 1e-2),
        ScanKind::U => ((1.0, 9.0), 1e-3),
        ScanKind::UV => ((1.0, 10.0), 1e-2),
        ScanKind::P2 => ((1.0, 20.0), 1e-3),
    }
}

pub fn parse_routes(s: &str) -> Result<Vec<Route>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let r: Route = part.parse().map_err(|e| format!("--routes: {e}"))?;
        if !out.contains(&r) {
            out.push(r);
        }
    }
    if out.is_empty() {
        return Err("--routes must name at least one route".into());
    }
    Ok(out)
}

pub fn parse_grid(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("--grid expects lo:hi, got '{s}'"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad grid bound '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad grid bound '{b}'"))?;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(format!("--grid needs finite lo <= hi, got '{s}'"));
    }
    Ok((lo, hi))
}

pub fn resolve(command: Command, cli: Overrides, file: FileConfig, fault: Option<Fault>) -> Result<RunConfig, String> {
    let k_max = cli.k_max.or(file.k_max).unwrap_or_else(|| default_k_max(&command));
    let tol = cli.tol.or(file.tol).unwrap_or_else(|| default_tol(&command));
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(format!("--tol must be positive, got {tol}"));
    }
    let routes = match cli.routes.or(file.routes) {
        Some(s) => parse_routes(&s)?,
        None => vec![Route::Theta, Route::L, Route::PShifted(2)],
    };
    let (dgrid, dstep) = match &command {
        Command::Scan(kind) => default_grid(*kind),
        _ => ((1.0, 8.0), 1e-3),
    };
    let grid = match cli.grid.or(file.grid) {
        Some(g) => parse_grid(&g)?,
        None => dgrid,
    };
    let step = cli.step.or(file.step).unwrap_or(dstep);
    if !(step > 0.0 && step.is_finite()) {
        return Err(format!("--step must be positive, got {step}"));
    }
    let format = cli.format.or(file.format).unwrap_or(Format::Json);
    if format == Format::Csv && command != Command::Coeffs {
        return Err("csv output is available for coefficient tables (coeffs) only".into());
    }
    if let Command::Oracle = command {
        if k_max > 8 {
            return Err(format!("oracle supports --k-max up to 8, got {k_max}"));
        }
    }
    Ok(RunConfig {
        command,
        k_max,
        routes,
        tol,
        grid,
        step,
        k: cli.k.or(file.k).unwrap_or(1),
        only: cli.only.or(file.only),
        format,
        out: cli.out.or(file.out),
        fault,
    })
}

impl RunConfig {
    pub fn echo(&self) -> ConfigEcho {
        ConfigEcho {
            command: match &self.command {
                Command::Scan(k) => format!("scan {k}"),
                Command::Wallis(n) => format!("wallis {n}"),
                c => c.name().to_string(),
            },
            k_max: self.k_max,
            routes: self.routes.iter().map(|r| r.to_string()).collect(),
            shifts: self
                .routes
                .iter()
                .filter_map(|r| match r {
                    Route::PShifted(n) => Some(*n),
                    _ => None,
                })
                .collect(),
            tol: format_f64(self.tol),
            grid: [format_f64(self.grid.0), format_f64(self.grid.1)],
            step: format_f64(self.step),
            k: self.k,
            only: self.only.clone(),
            format: self.format,
            fault: self.fault.map(|_| "p-coefficient".to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence() {
        let file = FileConfig {
            k_max: Some(3),
            tol: Some(1e-8),
            ..Default::default()
        };
        let cli = Overrides {
            tol: Some(1e-9),
            ..Default::default()
        };
        let c = resolve(Command::Coeffs, cli, file, None).unwrap();
        assert_eq!(c.k_max, 3);
        assert_eq!(c.tol, 1e-9);
        assert_eq!(c.format, Format::Json);
    }

    #[test]
    fn rejects_bad_values() {
        let neg = Overrides {
            tol: Some(-1.0),
            ..Default::default()
        };
        assert!(resolve(Command::Coeffs, neg, FileConfig::default(), None).is_err());
        assert!(parse_grid("3:1").is_err());
        assert!(parse_grid("1-3").is_err());
        assert!(parse_routes("theta,q").is_err());
        assert_eq!(parse_routes("L, p:2,L").unwrap(), vec![Route::L, Route::PShifted(2)]);
        let csv = Overrides {
            format: Some(Format::Csv),
            ..Default::default()
        };
        assert!(resolve(Command::Verify, csv, FileConfig::default(), None).is_err());
    }

    #[test]
    fn file_keys_are_checked() {
        assert!(toml::from_str::<FileConfig>("tol = 1e-9\nroutes = \"L\"").is_ok());
        assert!(toml::from_str::<FileConfig>("tolerance = 1e-9").is_err());
    }
}
