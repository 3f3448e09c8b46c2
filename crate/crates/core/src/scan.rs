//! Grid minima of the functions whose positivity the theory asserts.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::dd::ser_f64_str;
use crate::error::{domain, Result};
use crate::functions::{eval_b, eval_l, eval_u, eval_v, LParam};
use crate::ppoly::p2_margin;

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum ScanKind {
    /// `L(x; k)`
    L,
    /// `B(x)`
    B,
    /// `U(x; floor(x), k)`
    U,
    /// `min_{1 <= n < floor(x)} U(x;n,k) + V(x;n,k)`
    UV,
    /// `p(-pi x^2; 2)/4 - 1`
    P2,
}

impl FromStr for ScanKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "L" | "l" => Ok(ScanKind::L),
            "B" | "b" => Ok(ScanKind::B),
            "U" | "u" => Ok(ScanKind::U),
            "UV" | "uv" => Ok(ScanKind::UV),
            "p2" | "P2" | "p2_margin" => Ok(ScanKind::P2),
            other => Err(format!("unknown scan function '{other}' (expected L, B, U, UV or p2)")),
        }
    }
}

impl fmt::Display for ScanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ScanKind::L => "L",
            ScanKind::B => "B",
            ScanKind::U => "U",
            ScanKind::UV => "UV",
            ScanKind::P2 => "p2",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanResult {
    pub function: String,
    pub k: Option<u32>,
    #[serde(serialize_with = "ser_f64_str")]
    pub lo: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub hi: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub step: f64,
    pub points: usize,
    #[serde(serialize_with = "ser_f64_str")]
    pub min: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub argmin: f64,
    pub nonnegative: bool,
}

/// `lo, lo + step, ...` up to `hi` inclusive (within rounding).
pub fn grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !step.is_finite() {
        return Err(domain("grid step must be positive", step));
    }
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(domain("grid needs finite lo <= hi", hi));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    if n > 50_000_000 {
        return Err(domain("grid too large", n as f64));
    }
    Ok((0..=n).map(|i| lo + i as f64 * step).collect())
}

/// Value of the scanned function at `x`; `None` where it has no terms (UV below 2).
pub fn scan_value(kind: ScanKind, k: u32, x: f64) -> Result<Option<f64>> {
    let p = LParam::from_k(k);
    Ok(match kind {
        ScanKind::L => Some(eval_l(x, p)?),
        ScanKind::B => Some(eval_b(x)?),
        ScanKind::U => {
            if !(x >= 1.0) {
                return Err(domain("U scan requires x >= 1", x));
            }
            Some(eval_u(x, x.floor() as u64, p)?)
        }
        ScanKind::UV => {
            if !(x >= 1.0) {
                return Err(domain("UV scan requires x >= 1", x));
            }
            let m = x.floor() as u64;
            let mut best: Option<f64> = None;
            for n in 1..m {
                let v = eval_u(x, n, p)? + eval_v(x, n, p)?;
                best = Some(best.map_or(v, |b: f64| b.min(v)));
            }
            best
        }
        ScanKind::P2 => Some(p2_margin(x)),
    })
}

pub fn scan(kind: ScanKind, k: u32, lo: f64, hi: f64, step: f64) -> Result<ScanResult> {
    let xs = grid(lo, hi, step)?;
    let mut min = f64::INFINITY;
    let mut argmin = f64::NAN;
    let mut points = 0;
    for &x in &xs {
        if let Some(v) = scan_value(kind, k, x)? {
            points += 1;
            if v < min || v.is_nan() {
                min = v;
                argmin = x;
            }
        }
    }
    let uses_k = matches!(kind, ScanKind::L | ScanKind::U | ScanKind::UV);
    Ok(ScanResult {
        function: kind.to_string(),
        k: uses_k.then_some(k),
        lo,
        hi,
        step,
        points,
        min,
        argmin,
        nonnegative: min >= 0.0,
    })
}
