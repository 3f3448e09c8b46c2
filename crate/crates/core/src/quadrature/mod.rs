//! Window-aligned adaptive Gauss–Kronrod integration on `[c, inf)`.
//!
//! The integration range is split at every integer, so no panel ever straddles
//! a point where the piecewise integrands lose smoothness. Each unit window is
//! refined independently (and in parallel) by bisecting its worst panel; the
//! per-window results are then reduced in ascending order into a
//! double-double accumulator, so the output does not depend on scheduling.
//!
//! The error bound of a panel is `|K15 - G7| + 16 eps sum |w f|`; the first
//! term dominates the true error of the Kronrod value for integrands that are
//! analytic on the panel, the second covers rounding in the node sums. The
//! tail beyond the cutoff is bounded by closed-form majorants (see [`tail`]).

mod rule;
pub mod tail;
pub mod theta;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::dd::{ser_f64_str, DoubleDouble, RealScalar};
use crate::error::{domain, Result};
use crate::functions::{eval_b, eval_l, inv_factorial, ipow, LParam};
use crate::ppoly::{p_by_recurrence, PPolynomial};

pub use tail::{choose_cutoff, tail_bound_l, tail_sum, Decay, Majorant};
pub use theta::{theta_sum, ThetaSum};

use tail::{cutoff_for, l_route_majorant, MAX_CUTOFF};

const MAX_PANELS_PER_WINDOW: usize = 256;

pub type IntegrandFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A caller-supplied integrand on `[lower, upper]` (`upper = None` for infinity,
/// in which case `majorants` must dominate `|f|` beyond any cutoff `>= 3`).
#[derive(Clone)]
pub struct CustomIntegrand {
    pub label: String,
    pub f: IntegrandFn,
    pub lower: f64,
    pub upper: Option<f64>,
    pub majorants: Vec<Majorant>,
}

impl CustomIntegrand {
    pub fn finite<F>(label: impl Into<String>, f: F, lower: f64, upper: f64) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CustomIntegrand {
            label: label.into(),
            f: Arc::new(f),
            lower,
            upper: Some(upper),
            majorants: Vec::new(),
        }
    }

    pub fn semi_infinite<F>(
        label: impl Into<String>,
        f: F,
        lower: f64,
        majorants: Vec<Majorant>,
    ) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        CustomIntegrand {
            label: label.into(),
            f: Arc::new(f),
            lower,
            upper: None,
            majorants,
        }
    }
}

impl fmt::Debug for CustomIntegrand {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomIntegrand")
            .field("label", &self.label)
            .field("lower", &self.lower)
            .field("upper", &self.upper)
            .field("majorants", &self.majorants)
            .finish()
    }
}

#[derive(Clone, Debug)]
pub enum IntegrandSpec {
    /// `x^{-3/4} [ (log x/2)^{2k-2}/(2k-2)! - (log x/2)^{2k}/(4 (2k)!) ] theta(x)` on `[1, inf)`;
    /// for `k = 0` just `x^{-3/4} theta(x)`.
    ThetaDirect { k: u32 },
    /// `e^{-pi x^2} x^{-1/2} L(x; p)` on `[1, inf)`.
    LRoute { param: LParam },
    /// `e^{-pi x^2} x^{-1/2} p(-pi x^2; n) 2^{-n} L(x; p + n/2)` on `[1, inf)`.
    PShifted { param: LParam, shift: u32 },
    /// `e^{-pi x^2} x^{-1/2} B(x)` on `[1, inf)`.
    BRoute,
    Custom(CustomIntegrand),
}

impl IntegrandSpec {
    pub fn label(&self) -> String {
        match self {
            IntegrandSpec::ThetaDirect { k } => format!("theta_direct(k={k})"),
            IntegrandSpec::LRoute { param } => format!("L_route(2k={})", param.two_kappa()),
            IntegrandSpec::PShifted { param, shift } => {
                format!("p_shifted(2k={}, n={shift})", param.two_kappa())
            }
            IntegrandSpec::BRoute => "B_route".to_string(),
            IntegrandSpec::Custom(c) => c.label.clone(),
        }
    }

    fn lower(&self) -> f64 {
        match self {
            IntegrandSpec::Custom(c) => c.lower,
            _ => 1.0,
        }
    }

    fn upper(&self) -> Option<f64> {
        match self {
            IntegrandSpec::Custom(c) => c.upper,
            _ => None,
        }
    }

    fn max_panels(&self) -> usize {
        match self {
            // not sign-definite: give the bisection more room
            IntegrandSpec::PShifted { shift, .. } if shift % 2 == 1 => 2 * MAX_PANELS_PER_WINDOW,
            _ => MAX_PANELS_PER_WINDOW,
        }
    }

    /// Majorants of `|f|` valid for `x >= 3`.
    pub fn majorants(&self) -> Vec<Majorant> {
        match self {
            IntegrandSpec::ThetaDirect { k } => {
                let c = theta::theta_envelope_scale(1.0);
                if *k == 0 {
                    return vec![Majorant::exponential(c, -0.75, 0, PI)];
                }
                let j = 2 * k - 2;
                vec![
                    Majorant::exponential(c * inv_factorial(j) * 0.5f64.powi(j as i32), -0.75, j, PI),
                    Majorant::exponential(
                        c * 0.25 * inv_factorial(j + 2) * 0.5f64.powi(j as i32 + 2),
                        -0.75,
                        j + 2,
                        PI,
                    ),
                ]
            }
            IntegrandSpec::LRoute { param } => vec![l_route_majorant(*param, 1.0)],
            IntegrandSpec::PShifted { param, shift } => {
                let s = p_by_recurrence(*shift).abs_eval(PI) * 0.5f64.powi(*shift as i32);
                let mut m = l_route_majorant(param.shifted(*shift), s);
                m.power += 2.0 * *shift as f64;
                vec![m]
            }
            IntegrandSpec::BRoute => vec![Majorant::gaussian(2.0, 0.0, 0)],
            IntegrandSpec::Custom(c) => c.majorants.clone(),
        }
    }

    fn integrand(&self) -> IntegrandFn {
        match self {
            IntegrandSpec::ThetaDirect { k } => {
                let k = *k;
                Arc::new(move |x| theta_direct_integrand(x, k))
            }
            IntegrandSpec::LRoute { param } => {
                let p = *param;
                Arc::new(move |x| {
                    (-PI * x * x).exp() / x.sqrt() * eval_l(x, p).unwrap_or(f64::NAN)
                })
            }
            IntegrandSpec::PShifted { param, shift } => {
                let poly = p_by_recurrence(*shift);
                let n = *shift;
                let p = param.shifted(n);
                Arc::new(move |x| {
                    (-PI * x * x).exp() / x.sqrt()
                        * p_weight(&poly, n, x)
                        * eval_l(x, p).unwrap_or(f64::NAN)
                })
            }
            IntegrandSpec::BRoute => {
                Arc::new(|x| (-PI * x * x).exp() / x.sqrt() * eval_b(x).unwrap_or(f64::NAN))
            }
            IntegrandSpec::Custom(c) => c.f.clone(),
        }
    }
}

/// `p(-pi x^2; n) / 2^n`, evaluated in double-double to survive the
/// alternating-sign cancellation.
pub(crate) fn p_weight(poly: &PPolynomial, n: u32, x: f64) -> f64 {
    let y = -(DoubleDouble::PI * DoubleDouble::from_prod(x, x));
    poly.eval_dd(y).ldexp(-(n as i32)).to_f64()
}

fn theta_direct_integrand(x: f64, k: u32) -> f64 {
    // relative truncation far below double rounding
    let th = theta_sum(x, 1e-25 * (-PI * x).exp()).map(|t| t.value).unwrap_or(f64::NAN);
    let w = x.powf(-0.75) * th;
    if k == 0 {
        return w;
    }
    let j = 2 * k - 2;
    let h = 0.5 * x.ln();
    let pj = ipow(h, j);
    w * (pj * inv_factorial(j) - 0.25 * pj * h * h * inv_factorial(j + 2))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadratureResult {
    pub value: DoubleDouble,
    #[serde(serialize_with = "ser_f64_str")]
    pub abs_error_bound: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub cutoff: f64,
    pub intervals: usize,
    #[serde(serialize_with = "ser_f64_str")]
    pub tail_bound: f64,
    pub converged: bool,
}

impl QuadratureResult {
    pub fn scalar(&self) -> RealScalar {
        RealScalar::new(self.value, self.abs_error_bound)
    }
}

struct WindowResult {
    value: DoubleDouble,
    err: f64,
    panels: Vec<(f64, f64)>,
    converged: bool,
}

#[derive(Copy, Clone)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    err: f64,
}

fn panel(f: &(dyn Fn(f64) -> f64 + Send + Sync), a: f64, b: f64) -> Panel {
    let est = rule::gk15(f, a, b);
    Panel {
        a,
        b,
        value: est.kronrod,
        err: (est.kronrod - est.gauss).abs() + 16.0 * f64::EPSILON * est.abs_mass,
    }
}

fn integrate_window(
    f: &(dyn Fn(f64) -> f64 + Send + Sync),
    a: f64,
    b: f64,
    budget: f64,
    max_panels: usize,
) -> WindowResult {
    let mut panels = vec![panel(f, a, b)];
    loop {
        let total: f64 = panels.iter().map(|p| p.err).sum();
        let finite = panels.iter().all(|p| p.value.is_finite() && p.err.is_finite());
        if !finite || total <= budget || panels.len() >= max_panels {
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum::<DoubleDouble>();
            return WindowResult {
                value,
                err: if finite { total } else { f64::INFINITY },
                panels: panels.iter().map(|p| (p.a, p.b)).collect(),
                converged: finite && total <= budget,
            };
        }
        let worst = (0..panels.len())
            .max_by(|&i, &j| panels[i].err.total_cmp(&panels[j].err))
            .unwrap_or(0);
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        panels.push(panel(f, p.a, mid));
        panels.push(panel(f, mid, p.b));
    }
}

/// Integer-aligned windows covering `[lo, hi]`.
fn windows(lo: f64, hi: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    let mut a = lo;
    while a < hi {
        let b = (a.floor() + 1.0).min(hi);
        out.push((a, b));
        a = b;
    }
    out
}

pub fn integrate_piecewise(spec: &IntegrandSpec, tol: f64) -> Result<QuadratureResult> {
    integrate_piecewise_audited(spec, tol).map(|(r, _)| r)
}

/// As [`integrate_piecewise`], also returning every final panel `(a, b)` in
/// ascending order.
pub fn integrate_piecewise_audited(
    spec: &IntegrandSpec,
    tol: f64,
) -> Result<(QuadratureResult, Vec<(f64, f64)>)> {
    if !(tol > 0.0) || !tol.is_finite() {
        return Err(domain("tolerance must be positive", tol));
    }
    let lower = spec.lower();
    if !lower.is_finite() {
        return Err(domain("lower limit must be finite", lower));
    }
    let (cutoff, tail_bound, tail_ok) = match spec.upper() {
        Some(u) => {
            if !(u >= lower) {
                return Err(domain("upper limit below lower limit", u));
            }
            (u, 0.0, true)
        }
        None => {
            let majorants = spec.majorants();
            if majorants.is_empty() {
                return Err(domain("semi-infinite integrand needs a tail majorant", lower));
            }
            let start = (lower.floor() + 1.0).max(3.0);
            let x = cutoff_for(&majorants, start, tol / 10.0);
            let t = tail_sum(&majorants, x);
            (x, t, t <= tol / 10.0 && x < MAX_CUTOFF)
        }
    };

    let f = spec.integrand();
    let ws = windows(lower, cutoff);
    let span = cutoff - lower;
    let interval_budget = if spec.upper().is_some() { tol } else { 0.9 * tol };
    let max_panels = spec.max_panels();
    let results: Vec<WindowResult> = ws
        .par_iter()
        .map(|&(a, b)| {
            let budget = interval_budget * (b - a) / span;
            integrate_window(f.as_ref(), a, b, budget, max_panels)
        })
        .collect();

    let mut value = DoubleDouble::ZERO;
    let mut err = 0.0;
    let mut converged = tail_ok;
    let mut panels = Vec::new();
    for w in results {
        value += w.value;
        err += w.err;
        converged &= w.converged;
        panels.extend(w.panels);
    }
    // rounding of the double-double reduction itself
    err += 4.0 * f64::EPSILON * f64::EPSILON * value.abs().to_f64() * panels.len() as f64;
    let abs_error_bound = err + tail_bound;
    Ok((
        QuadratureResult {
            value,
            abs_error_bound,
            cutoff,
            intervals: panels.len(),
            tail_bound,
            converged: converged && abs_error_bound <= tol && abs_error_bound.is_finite(),
        },
        panels,
    ))
}
