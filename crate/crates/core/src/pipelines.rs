//! The coefficients `a_k` by three integral routes, plus the identities and
//! inequalities that connect them.

use std::f64::consts::PI;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::dd::{ser_f64_str, DoubleDouble, RealScalar};
use crate::error::{domain, Error, Result};
use crate::functions::{eval_b, inv_factorial, ipow, LParam};
use crate::ppoly::{p_by_recurrence, PPolynomial};
use crate::quadrature::{
    integrate_piecewise, p_weight, CustomIntegrand, IntegrandSpec, Majorant, QuadratureResult,
};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Route {
    Theta,
    L,
    PShifted(u32),
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Route::Theta => write!(f, "theta"),
            Route::L => write!(f, "L"),
            Route::PShifted(n) => write!(f, "p:{n}"),
        }
    }
}

impl std::str::FromStr for Route {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "theta" => Ok(Route::Theta),
            "L" | "l" => Ok(Route::L),
            other => match other.strip_prefix("p:") {
                Some(n) => n
                    .parse()
                    .map(Route::PShifted)
                    .map_err(|_| format!("bad shift in route '{other}'")),
                None => Err(format!("unknown route '{other}' (expected theta, L or p:<n>)")),
            },
        }
    }
}

impl Serialize for Route {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoefficientRecord {
    pub k: u32,
    pub route: Route,
    pub value: DoubleDouble,
    #[serde(serialize_with = "ser_f64_str")]
    pub abs_error_bound: f64,
}

impl CoefficientRecord {
    pub fn scalar(&self) -> RealScalar {
        RealScalar::new(self.value, self.abs_error_bound)
    }
}

fn certified(spec: &IntegrandSpec, tol: f64) -> Result<QuadratureResult> {
    let r = integrate_piecewise(spec, tol)?;
    if !r.converged {
        return Err(Error::NotConverged {
            integrand: spec.label(),
            achieved: r.abs_error_bound,
            target: tol,
        });
    }
    Ok(r)
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(domain("tolerance must be positive", tol))
    }
}

/// The two internal evaluations of `a_0`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct A0Forms {
    /// `int_{-1}^{1} e^{-pi x^2} + int_1^inf e^{-pi x^2} x^{-1/2} B(x)`
    pub b_route: RealScalar,
    /// `1 - (1/2) int_1^inf x^{-3/4} theta(x)`
    pub theta_form: RealScalar,
}

pub fn a0_forms(tol: f64) -> Result<A0Forms> {
    check_tol(tol)?;
    let gauss = IntegrandSpec::Custom(CustomIntegrand::finite(
        "gaussian on [-1, 1]",
        |x| (-PI * x * x).exp(),
        -1.0,
        1.0,
    ));
    let g = certified(&gauss, tol / 2.0)?.scalar();
    let b = certified(&IntegrandSpec::BRoute, tol / 2.0)?.scalar();
    let t = certified(&IntegrandSpec::ThetaDirect { k: 0 }, 2.0 * tol)?.scalar();
    Ok(A0Forms {
        b_route: g + b,
        theta_form: RealScalar::exact(1.0) - t.scale(0.5),
    })
}

/// `a_0` from the manifestly positive B-route form, cross-checked against
/// `1 - (1/2) int x^{-3/4} theta`.
pub fn a0_via_theta(tol: f64) -> Result<CoefficientRecord> {
    let forms = a0_forms(tol)?;
    if !forms.b_route.agrees_with(&forms.theta_form) {
        return Err(Error::RouteMismatch {
            what: "a_0 (B-route vs theta form)".into(),
            a: forms.b_route.to_f64(),
            b: forms.theta_form.to_f64(),
            bound: forms.b_route.bound + forms.theta_form.bound,
        });
    }
    Ok(CoefficientRecord {
        k: 0,
        route: Route::Theta,
        value: forms.b_route.value,
        abs_error_bound: forms.b_route.bound,
    })
}

fn need_k(k: u32) -> Result<()> {
    if k >= 1 {
        Ok(())
    } else {
        Err(domain("k must be >= 1 for this route", k as f64))
    }
}

pub fn ak_via_theta(k: u32, tol: f64) -> Result<CoefficientRecord> {
    need_k(k)?;
    check_tol(tol)?;
    let r = certified(&IntegrandSpec::ThetaDirect { k }, tol / 2.0)?;
    Ok(record(k, Route::Theta, r.scalar().scale(2.0)))
}

pub fn ak_via_l(k: u32, tol: f64) -> Result<CoefficientRecord> {
    need_k(k)?;
    check_tol(tol)?;
    let spec = IntegrandSpec::LRoute {
        param: LParam::from_k(k - 1),
    };
    let r = certified(&spec, tol / 4.0)?;
    Ok(record(k, Route::L, r.scalar().scale(4.0)))
}

/// `a_k = 4 int_1^inf e^{-pi x^2} x^{-1/2} p(-pi x^2; n) 2^{-n} L(x; k-1+n/2) dx`.
///
/// With `L` built from `log(n/x)` the sign factor `(-1)^n` of the
/// integration-by-parts identity is absorbed by the odd log powers, so no
/// explicit sign appears here.
pub fn ak_via_p(k: u32, n: u32, tol: f64) -> Result<CoefficientRecord> {
    need_k(k)?;
    check_tol(tol)?;
    let param = LParam::from_k(k - 1);
    let spec = if n == 0 {
        IntegrandSpec::LRoute { param }
    } else {
        IntegrandSpec::PShifted { param, shift: n }
    };
    let r = certified(&spec, tol / 4.0)?;
    Ok(record(k, Route::PShifted(n), r.scalar().scale(4.0)))
}

/// Dispatch on a route; `k = 0` always goes through the a_0 pipeline.
pub fn coefficient(k: u32, route: Route, tol: f64) -> Result<CoefficientRecord> {
    if k == 0 {
        let mut r = a0_via_theta(tol)?;
        r.route = route;
        return Ok(r);
    }
    match route {
        Route::Theta => ak_via_theta(k, tol),
        Route::L => ak_via_l(k, tol),
        Route::PShifted(n) => ak_via_p(k, n, tol),
    }
}

fn record(k: u32, route: Route, s: RealScalar) -> CoefficientRecord {
    CoefficientRecord {
        k,
        route,
        value: s.value,
        abs_error_bound: s.bound,
    }
}

/// Two numerically evaluated sides of an identity.
#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub lhs: RealScalar,
    pub rhs: RealScalar,
    #[serde(serialize_with = "ser_f64_str")]
    pub residual: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub bound: f64,
}

impl IdentityCheck {
    fn new(lhs: RealScalar, rhs: RealScalar) -> Self {
        IdentityCheck {
            lhs,
            rhs,
            residual: (lhs.value - rhs.value).abs().to_f64(),
            bound: lhs.bound + rhs.bound,
        }
    }

    pub fn passes(&self) -> bool {
        self.residual <= self.bound
    }
}

/// `int_1^inf x^{-3/4} (log x / 2)^{2k} e^{-pi n^2 x} dx`
/// against `2 int_n^inf log(n/x)^{2k} n^{-1/2} e^{-pi x^2} x^{-1/2} dx`.
pub fn verify_each_n(n: u64, two_kappa: u32, tol: f64) -> Result<IdentityCheck> {
    if n == 0 {
        return Err(domain("n must be >= 1", 0.0));
    }
    if two_kappa % 2 != 0 {
        return Err(domain("two_kappa must be even", two_kappa as f64));
    }
    check_tol(tol)?;
    let j = two_kappa;
    let nf = n as f64;
    let rate = PI * nf * nf;
    let lhs = IntegrandSpec::Custom(CustomIntegrand::semi_infinite(
        format!("each-n lhs (n={n}, 2k={j})"),
        move |x: f64| x.powf(-0.75) * ipow(0.5 * x.ln(), j) * (-rate * x).exp(),
        1.0,
        vec![Majorant::exponential(0.5f64.powi(j as i32), -0.75, j, rate)],
    ));
    let c = 2.0 / nf.sqrt();
    let rhs = IntegrandSpec::Custom(CustomIntegrand::semi_infinite(
        format!("each-n rhs (n={n}, 2k={j})"),
        move |x: f64| c * ipow((nf / x).ln(), j) * (-PI * x * x).exp() / x.sqrt(),
        nf,
        vec![Majorant::gaussian(c, -0.5, j).with_log_base(nf)],
    ));
    let l = certified(&lhs, tol / 2.0)?.scalar();
    let r = certified(&rhs, tol / 2.0)?.scalar();
    Ok(IdentityCheck::new(l, r))
}

/// Both sides of
/// `int_c^inf w log(x/c)^m/m! = int_c^inf w (-1)^n p(-pi x^2;n) 2^{-n} log(x/c)^{m+n}/(m+n)!`
/// with `w = e^{-pi x^2} x^{-1/2}`.
pub fn verify_int_by_parts(c: f64, m: u32, n: u32, tol: f64) -> Result<IdentityCheck> {
    let poly = p_by_recurrence(n);
    int_by_parts_with(c, m, &poly, tol)
}

/// As [`verify_int_by_parts`] with a caller-supplied polynomial in place of
/// `p(x;n)`; used by the verification harness self-test.
pub fn int_by_parts_with(c: f64, m: u32, poly: &PPolynomial, tol: f64) -> Result<IdentityCheck> {
    if !(c > 0.0) || !c.is_finite() {
        return Err(domain("c must be positive", c));
    }
    check_tol(tol)?;
    let n = poly.n();
    let im = inv_factorial(m);
    let lhs = IntegrandSpec::Custom(CustomIntegrand::semi_infinite(
        format!("int-by-parts lhs (c={c}, m={m})"),
        move |x: f64| (-PI * x * x).exp() / x.sqrt() * ipow((x / c).ln(), m) * im,
        c,
        vec![Majorant::gaussian(im, -0.5, m).with_log_base(c)],
    ));
    let imn = inv_factorial(m + n);
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    let scale = poly.abs_eval(PI) * 0.5f64.powi(n as i32);
    let p = poly.clone();
    let rhs = IntegrandSpec::Custom(CustomIntegrand::semi_infinite(
        format!("int-by-parts rhs (c={c}, m={m}, n={n})"),
        move |x: f64| {
            (-PI * x * x).exp() / x.sqrt()
                * sign
                * p_weight(&p, n, x)
                * ipow((x / c).ln(), m + n)
                * imn
        },
        c,
        vec![Majorant::gaussian(scale * imn, -0.5 + 2.0 * n as f64, m + n).with_log_base(c)],
    ));
    let l = certified(&lhs, tol / 2.0)?.scalar();
    let r = certified(&rhs, tol / 2.0)?.scalar();
    Ok(IdentityCheck::new(l, r))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct AntiderivativeCheck {
    pub first: IdentityCheck,
    pub second: IdentityCheck,
}

impl AntiderivativeCheck {
    pub fn residual(&self) -> f64 {
        self.first.residual.max(self.second.residual)
    }

    pub fn passes(&self) -> bool {
        self.first.passes() && self.second.passes()
    }
}

const ANTIDERIVATIVE_TOL: f64 = 1e-13;

/// `2 sqrt z sum_{h=0}^{2k} (-1)^h 2^h l^{2k-h}/(2k-h)!`, `l = log(z/x)`.
pub fn antiderivative_first(z: f64, x: f64, k: u32) -> f64 {
    let l = (z / x).ln();
    let j = 2 * k;
    let mut s = 0.0;
    for h in 0..=j {
        let sign = if h % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * ipow(2.0, h) * ipow(l, j - h) * inv_factorial(j - h);
    }
    2.0 * z.sqrt() * s
}

/// `-(sqrt z / 2) (l^{2k+2}/(2k+2)! - 2 l^{2k+1}/(2k+1)!)`, `l = log(z/x)`.
pub fn antiderivative_second(z: f64, x: f64, k: u32) -> f64 {
    let l = (z / x).ln();
    let j = 2 * k;
    -0.5 * z.sqrt() * (ipow(l, j + 2) * inv_factorial(j + 2) - 2.0 * ipow(l, j + 1) * inv_factorial(j + 1))
}

/// Fundamental-theorem check of both antiderivatives on `[a, b]`.
pub fn verify_antiderivative(x: f64, k: u32, a: f64, b: f64) -> Result<AntiderivativeCheck> {
    if !(x > 0.0) {
        return Err(domain("x must be positive", x));
    }
    if !(a > 0.0) || !(b >= a) {
        return Err(domain("need 0 < a <= b", a));
    }
    let j = 2 * k;
    let side = |f: fn(f64, f64, u32) -> f64| RealScalar::new(DoubleDouble::from(f(b, x, k)) - f(a, x, k), 0.0);
    if a == b {
        let zero = IdentityCheck::new(RealScalar::exact(0.0), side(antiderivative_first));
        return Ok(AntiderivativeCheck { first: zero, second: zero });
    }
    let ij = inv_factorial(j);
    let ij2 = inv_factorial(j + 2);
    let first = IntegrandSpec::Custom(CustomIntegrand::finite(
        "antiderivative 1",
        move |z: f64| ipow((z / x).ln(), j) * ij / z.sqrt(),
        a,
        b,
    ));
    let second = IntegrandSpec::Custom(CustomIntegrand::finite(
        "antiderivative 2",
        move |z: f64| {
            let l = (z / x).ln();
            let lj = ipow(l, j);
            (lj * ij - 0.25 * lj * l * l * ij2) / z.sqrt()
        },
        a,
        b,
    ));
    let q1 = certified(&first, ANTIDERIVATIVE_TOL)?.scalar();
    let q2 = certified(&second, ANTIDERIVATIVE_TOL)?.scalar();
    // closed forms are evaluated in double precision
    let fudge = |s: RealScalar| {
        let mag = antiderivative_first(b, x, k).abs() + antiderivative_first(a, x, k).abs();
        RealScalar::new(s.value, 64.0 * f64::EPSILON * mag.max(1.0))
    };
    Ok(AntiderivativeCheck {
        first: IdentityCheck::new(q1, fudge(side(antiderivative_first))),
        second: IdentityCheck::new(q2, fudge(side(antiderivative_second))),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct WallisValue {
    pub n: u64,
    pub value: BigRational,
}

impl WallisValue {
    pub fn to_dd(&self) -> DoubleDouble {
        rational_to_dd(&self.value)
    }
}

/// `prod_{j=1}^{N} (2j)^2 / ((2j-1)(2j+1))`, exactly.
pub fn wallis(n: u64) -> WallisValue {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for j in 1..=n {
        let j = BigInt::from(j);
        let two_j: BigInt = &j * 2;
        num *= &two_j * &two_j;
        den *= (&two_j - 1) * (&two_j + 1);
    }
    WallisValue {
        n,
        value: BigRational::new(num, den),
    }
}

/// Nearest double-double to a positive rational of moderate size.
pub fn rational_to_dd(r: &BigRational) -> DoubleDouble {
    let negative = r.is_negative();
    let r = r.abs();
    let num = r.numer();
    let den = r.denom();
    // scale so the integer quotient carries ~120 significant bits
    let shift = 120i64 - (num.bits() as i64 - den.bits() as i64);
    let q = if shift >= 0 {
        (num << shift as usize) / den
    } else {
        num / (den << (-shift) as usize)
    };
    let v = DoubleDouble::from_bigint(&q).ldexp(-shift as i32);
    if negative {
        -v
    } else {
        v
    }
}

/// `1 + 2 W + 2 W^2` with `W = Wallis(1)`, the constant in the `a_0 > a_1` step.
pub fn wallis_proof_constant() -> BigRational {
    let w = wallis(1).value;
    let two = BigRational::from_integer(BigInt::from(2));
    BigRational::one() + &two * &w + &two * &w * &w
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityRow {
    pub k: u32,
    #[serde(serialize_with = "ser_f64_str")]
    pub difference: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub combined_bound: f64,
    /// `difference - combined_bound`; positive means the inequality is certified.
    #[serde(serialize_with = "ser_f64_str")]
    pub margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonotonicityReport {
    pub coefficients: Vec<CoefficientRecord>,
    pub rows: Vec<MonotonicityRow>,
    /// `min (e^{2 pi x - pi} - 5)` over `x` in `[1, 10]`, step `1e-3`.
    #[serde(serialize_with = "ser_f64_str")]
    pub exp_margin_min: f64,
    /// `1 + 2 Wallis(1) + 2 Wallis(1)^2` as `"num/den"`.
    pub proof_constant: String,
    pub printed_constant: String,
    pub proof_constant_minus_5_positive: bool,
    /// `int_1^inf w ((e^{2 pi x - pi} - 5) 2 sqrt x + 5 B(x))`, the lower bound for `a_0 - a_1`.
    pub a0_minus_a1_lower: RealScalar,
}

impl MonotonicityReport {
    pub fn violations(&self) -> Vec<u32> {
        self.rows.iter().filter(|r| !(r.margin > 0.0)).map(|r| r.k).collect()
    }
}

/// `a_k - a_{k+1}` for `k = 0..kmax` with certified bounds, plus the
/// auxiliary quantities of the `a_0 > a_1` argument.
pub fn monotonicity_report(kmax: u32, tol: f64) -> Result<MonotonicityReport> {
    if kmax < 1 {
        return Err(domain("kmax must be >= 1", kmax as f64));
    }
    check_tol(tol)?;
    use rayon::prelude::*;
    let coefficients = (0..=kmax + 1)
        .into_par_iter()
        .map(|k| if k == 0 { a0_via_theta(tol) } else { ak_via_l(k, tol) })
        .collect::<Result<Vec<_>>>()?;
    let rows = coefficients
        .windows(2)
        .map(|w| {
            let d = (w[0].value - w[1].value).to_f64();
            let b = w[0].abs_error_bound + w[1].abs_error_bound;
            MonotonicityRow {
                k: w[0].k,
                difference: d,
                combined_bound: b,
                margin: d - b,
            }
        })
        .collect();
    let exp_margin_min = (0..=9000)
        .map(|i| (2.0 * PI * (1.0 + 1e-3 * i as f64) - PI).exp() - 5.0)
        .fold(f64::INFINITY, f64::min);
    let c = wallis_proof_constant();
    let five = BigRational::from_integer(BigInt::from(5));
    let lower = IntegrandSpec::Custom(CustomIntegrand::semi_infinite(
        "a0 - a1 lower bound",
        |x: f64| {
            let w = (-PI * x * x).exp() / x.sqrt();
            let e = (-PI * (x - 1.0) * (x - 1.0)).exp() / x.sqrt();
            2.0 * x.sqrt() * (e - 5.0 * w) + 5.0 * w * eval_b(x).unwrap_or(f64::NAN)
        },
        1.0,
        vec![
            Majorant {
                rate: PI / 4.0,
                ..Majorant::gaussian(2.0, 0.0, 0)
            },
            Majorant::gaussian(20.0, 0.0, 0),
        ],
    ));
    let a0_minus_a1_lower = certified(&lower, tol)?.scalar();
    Ok(MonotonicityReport {
        coefficients,
        rows,
        exp_margin_min,
        proof_constant: c.to_string(),
        printed_constant: "55/9".into(),
        proof_constant_minus_5_positive: c > five,
        a0_minus_a1_lower,
    })
}

/// `true` when every exact Wallis value up to `n` is strictly increasing and
/// below `pi/2` (compared in double-double).
pub fn wallis_sequence_ok(n: u64) -> bool {
    let half_pi = DoubleDouble::PI.ldexp(-1);
    let mut prev: Option<BigRational> = None;
    let mut w = BigRational::one();
    for j in 0..=n {
        if j > 0 {
            let jj = BigInt::from(j) * 2;
            w *= BigRational::new(&jj * &jj, (&jj - 1) * (&jj + 1));
        }
        if let Some(p) = &prev {
            if *p >= w {
                return false;
            }
        }
        if !(rational_to_dd(&w) < half_pi) {
            return false;
        }
        prev = Some(w.clone());
    }
    true
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}
