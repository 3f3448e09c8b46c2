//! JSON envelope and CSV table writers.

use serde::Serialize;
use xitaylor::pipelines::CoefficientRecord;
use xitaylor::verify::{Claim, Summary};

use crate::config::ConfigEcho;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shape shared by every JSON report. `results` holds command-specific data
/// (scan minima, oracle fits, Wallis values) and is omitted when empty.
#[derive(Serialize)]
pub struct Envelope<R: Serialize> {
    pub version: &'static str,
    pub config: ConfigEcho,
    pub claims: Vec<Claim>,
    pub coefficients: Vec<CoefficientRecord>,
    pub summary: Summary,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub results: Option<R>,
    pub timestamp: String,
}

pub fn summarize(claims: &[Claim]) -> Summary {
    let passed = claims
        .iter()
        .filter(|c| c.status == xitaylor::verify::Status::Pass)
        .count();
    Summary {
        total: claims.len(),
        passed,
        failed: claims.len() - passed,
    }
}

pub fn timestamp() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true)
}

pub fn to_json<R: Serialize>(env: &Envelope<R>) -> String {
    let mut s = serde_json::to_string_pretty(env).expect("report serializes");
    s.push('\n');
    s
}

pub const CSV_HEADER: [&str; 4] = ["k", "route", "value", "abs_error_bound"];

pub fn coefficients_csv(rows: &[CoefficientRecord]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.k.to_string(),
            r.route.to_string(),
            r.value.to_sci_string(32),
            xitaylor::dd::format_f64(r.abs_error_bound),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}
