//! Pointwise evaluation of the log-power families `L`, `B`, `U` and `V`.
//!
//! All of them are finite sums of terms `log(n/x)^j / j!` weighted by powers
//! of `n`. Log powers are formed by repeated multiplication so odd exponents
//! keep their sign, and `1/j!` comes from a table built from exact integers.

use std::sync::OnceLock;

use num::bigint::BigUint;
use num::{One, ToPrimitive};

use crate::error::{domain, Result};

const FACTORIAL_TABLE_LEN: usize = 171;

fn inv_factorial_table() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut f = BigUint::one();
        let mut out = Vec::with_capacity(FACTORIAL_TABLE_LEN);
        out.push(1.0);
        for i in 1..FACTORIAL_TABLE_LEN {
            f *= i as u32;
            out.push(1.0 / f.to_f64().unwrap_or(f64::INFINITY));
        }
        out
    })
}

/// `1/j!` rounded to double precision; zero beyond `170!`.
pub fn inv_factorial(j: u32) -> f64 {
    inv_factorial_table()
        .get(j as usize)
        .copied()
        .unwrap_or(0.0)
}

/// `x^e` by repeated squaring; `ipow(0, 0) == 1`.
pub fn ipow(x: f64, mut e: u32) -> f64 {
    let mut base = x;
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// The order parameter of `L(x;k)`, stored as `2k`.
///
/// Keeping the doubled value as an integer lets the half-integer orders
/// `k + n/2` that appear after shifting by `p(x;n)` be represented exactly.
/// Positivity statements only apply when `two_kappa` is even.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LParam {
    two_kappa: u32,
}

impl LParam {
    pub const fn new(two_kappa: u32) -> Self {
        LParam { two_kappa }
    }

    /// Integer order `k`, i.e. `two_kappa = 2k`.
    pub const fn from_k(k: u32) -> Self {
        LParam { two_kappa: 2 * k }
    }

    pub const fn two_kappa(self) -> u32 {
        self.two_kappa
    }

    pub const fn is_integer_order(self) -> bool {
        self.two_kappa % 2 == 0
    }

    /// Order raised by `n/2`, the parameter paired with `p(x;n)`.
    pub const fn shifted(self, n: u32) -> Self {
        LParam {
            two_kappa: self.two_kappa + n,
        }
    }
}

/// The unit window `[M, M+1)` containing a point `x >= 1`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WindowIndex(u64);

impl WindowIndex {
    pub fn containing(x: f64) -> Result<Self> {
        if !(x >= 1.0) || !x.is_finite() {
            return Err(domain("window index needs finite x >= 1", x));
        }
        Ok(WindowIndex(x.floor() as u64))
    }

    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(domain("window index must be >= 1", 0.0));
        }
        Ok(WindowIndex(m))
    }

    pub const fn get(self) -> u64 {
        self.0
    }

    pub fn lower(self) -> f64 {
        self.0 as f64
    }

    pub fn upper(self) -> f64 {
        (self.0 + 1) as f64
    }
}

// log^j/j! - log^{j+2}/((j+2)! 4), the shared bracket of every L summand
#[inline]
fn l_bracket(log: f64, j: u32) -> f64 {
    let pj = ipow(log, j);
    let pj2 = pj * log * log;
    pj * inv_factorial(j) - 0.25 * pj2 * inv_factorial(j + 2)
}

/// `L(x;k) = sum_{n <= floor(x)} [log(n/x)^{2k}/((2k)! sqrt n) - log(n/x)^{2k+2}/((2k+2)! 4 sqrt n)]`.
pub fn eval_l(x: f64, p: LParam) -> Result<f64> {
    let m = WindowIndex::containing(x)
        .map_err(|_| domain("L(x;k) requires x >= 1", x))?
        .get();
    let j = p.two_kappa();
    let mut acc = 0.0;
    for n in 1..=m {
        let nf = n as f64;
        acc += l_bracket((nf / x).ln(), j) / nf.sqrt();
    }
    Ok(acc)
}

/// `B(x) = 2 sqrt(x) - sum_{n <= floor(x)} n^{-1/2}`.
pub fn eval_b(x: f64) -> Result<f64> {
    let m = WindowIndex::containing(x)
        .map_err(|_| domain("B(x) requires x >= 1", x))?
        .get();
    let partial: f64 = (1..=m).map(|n| 1.0 / (n as f64).sqrt()).sum();
    Ok(2.0 * x.sqrt() - partial)
}

/// `U(x;n,k)`, written with `log(x/n)`.
pub fn eval_u(x: f64, n: u64, p: LParam) -> Result<f64> {
    if n == 0 {
        return Err(domain("U(x;n,k) requires n >= 1", 0.0));
    }
    if !(x > 0.0) {
        return Err(domain("U(x;n,k) requires x > 0", x));
    }
    let j = p.two_kappa();
    let nf = n as f64;
    let lg = (x / nf).ln();
    let pj = ipow(lg, j);
    let pj1 = pj * lg;
    let pj2 = pj1 * lg;
    let sn = nf.sqrt();
    Ok(pj * inv_factorial(j) / sn
        - 0.5 * sn * (pj2 * inv_factorial(j + 2) + 2.0 * pj1 * inv_factorial(j + 1)))
}

/// `V(x;n,k)`, written with `log(x/(n+1))`.
pub fn eval_v(x: f64, n: u64, p: LParam) -> Result<f64> {
    if !(x > 0.0) {
        return Err(domain("V(x;n,k) requires x > 0", x));
    }
    let j = p.two_kappa();
    let n1 = (n + 1) as f64;
    let lg = (x / n1).ln();
    let pj1 = ipow(lg, j + 1);
    let pj2 = pj1 * lg;
    let sn = n1.sqrt();
    Ok(0.5 * sn * (pj2 * inv_factorial(j + 2) + 2.0 * pj1 * inv_factorial(j + 1))
        - 0.25 * pj2 * inv_factorial(j + 2) / sn)
}

/// `L(x;k)` reassembled from the telescoping pieces:
/// `V(x;0,k) + U(x;M,k) + sum_{n=1}^{M-1} [V(x;n,k) + U(x;n,k)]` with `M = floor(x)`.
pub fn eval_l_decomposed(x: f64, p: LParam) -> Result<f64> {
    if !p.is_integer_order() {
        return Err(domain(
            "decomposition needs an even two_kappa",
            p.two_kappa() as f64,
        ));
    }
    let m = WindowIndex::containing(x)
        .map_err(|_| domain("L(x;k) requires x >= 1", x))?
        .get();
    let mut acc = eval_v(x, 0, p)? + eval_u(x, m, p)?;
    for n in 1..m {
        acc += eval_v(x, n, p)? + eval_u(x, n, p)?;
    }
    Ok(acc)
}

/// Growth majorant `2 x log(x)^{2k}` for `|L(x;k)|`, valid for `x >= e`.
pub fn bound_l(x: f64, k: u32) -> Result<f64> {
    if !(x >= std::f64::consts::E) {
        return Err(domain("growth bound requires x >= e", x));
    }
    Ok(2.0 * x * ipow(x.ln(), 2 * k))
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn check_probe_args(m: u64, k: u32, order: u32, h: f64) -> Result<()> {
    if m < 2 {
        return Err(domain("smoothness probe needs M >= 2", m as f64));
    }
    if k < 1 {
        return Err(domain("smoothness probe needs k >= 1", k as f64));
    }
    if order < 1 || order > 2 * k {
        return Err(domain("derivative order must lie in 1..=2k", order as f64));
    }
    if !(h > 0.0 && h < 0.25) {
        return Err(domain("step must lie in (0, 1/4)", h));
    }
    Ok(())
}

// forward estimate minus backward estimate of the `order`-th derivative at x = M
fn one_sided_mismatch(m: u64, k: u32, order: u32, h: f64) -> Result<f64> {
    let p = LParam::from_k(k);
    let x0 = m as f64;
    let mut fwd = 0.0;
    let mut bwd = 0.0;
    for i in 0..=order {
        let c = binomial_f64(order, i);
        let sign_f = if (order - i) % 2 == 0 { 1.0 } else { -1.0 };
        let sign_b = if i % 2 == 0 { 1.0 } else { -1.0 };
        let step = i as f64 * h;
        fwd += sign_f * c * eval_l(x0 + step, p)?;
        bwd += sign_b * c * eval_l(x0 - step, p)?;
    }
    Ok((fwd - bwd) / ipow(h, order))
}

/// `|D+ - D-|`: the gap between the forward and backward finite-difference
/// estimates of the `order`-th derivative of `L(.;k)` at the integer `M`.
///
/// Derivatives of order below `2k` are continuous there, so the gap decays
/// like `O(h)`; at order `2k` it tends to [`analytic_jump`].
pub fn smoothness_probe(m: u64, k: u32, order: u32, h: f64) -> Result<f64> {
    check_probe_args(m, k, order, h)?;
    Ok(one_sided_mismatch(m, k, order, h)?.abs())
}

/// One Richardson step on the signed mismatch, removing the `O(h)` term.
pub fn smoothness_extrapolated(m: u64, k: u32, order: u32, h: f64) -> Result<f64> {
    check_probe_args(m, k, order, h)?;
    let coarse = one_sided_mismatch(m, k, order, h)?;
    let fine = one_sided_mismatch(m, k, order, h / 2.0)?;
    Ok(2.0 * fine - coarse)
}

/// Jump of the `order`-th derivative of `L(.;k)` across the integer `M`.
///
/// The jump is the derivative of the newly switched-on summand
/// `log(M/x)^{2k}/((2k)! sqrt M) - log(M/x)^{2k+2}/((2k+2)! 4 sqrt M)` at `x = M`,
/// which vanishes below order `2k` and equals `M^{-2k-1/2}` at order `2k`.
pub fn analytic_jump(m: u64, k: u32, order: u32) -> f64 {
    if order < 2 * k {
        0.0
    } else if order == 2 * k {
        let mf = m as f64;
        1.0 / (ipow(mf, 2 * k) * mf.sqrt())
    } else {
        f64::NAN
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn l_at_one() {
        assert_eq!(eval_l(1.0, LParam::new(0)).unwrap(), 1.0);
        assert_eq!(eval_l(1.0, LParam::new(2)).unwrap(), 0.0);
    }

    #[test]
    fn l_at_two_direct_sum() {
        let ln2 = 2f64.ln();
        let expected = 1.0 - ln2 * ln2 / 8.0 + 1.0 / 2f64.sqrt();
        assert!(close(eval_l(2.0, LParam::new(0)).unwrap(), expected, 1e-15));
        assert!((expected - 1.647050).abs() < 1e-6);
    }

    #[test]
    fn l_and_b_reject_below_one() {
        assert!(eval_l(0.99, LParam::new(0)).is_err());
        assert!(eval_b(0.5).is_err());
        assert!(eval_l_decomposed(0.0, LParam::new(2)).is_err());
    }

    #[test]
    fn b_values() {
        assert_eq!(eval_b(1.0).unwrap(), 1.0);
        let b2 = 2.0 * 2f64.sqrt() - (1.0 + 1.0 / 2f64.sqrt());
        assert!(close(eval_b(2.0).unwrap(), b2, 1e-15));
        assert!((b2 - 1.121320).abs() < 5e-7);
        let b4 = 4.0 - (1.0 + 1.0 / 2f64.sqrt() + 1.0 / 3f64.sqrt() + 0.5);
        assert!(close(eval_b(4.0).unwrap(), b4, 1e-15));
        assert!((b4 - 1.215543).abs() < 1e-6);
    }

    #[test]
    fn u_at_window_start() {
        for m in 1..6u64 {
            let u0 = eval_u(m as f64, m, LParam::new(0)).unwrap();
            assert!(close(u0, 1.0 / (m as f64).sqrt(), 1e-15));
            assert_eq!(eval_u(m as f64, m, LParam::new(2)).unwrap(), 0.0);
        }
        assert!(eval_u(1.5, 0, LParam::new(0)).is_err());
        assert!(eval_u(-1.0, 1, LParam::new(0)).is_err());
    }

    #[test]
    fn u_matches_window_form() {
        // the window form written with log(M/x), evaluated independently
        let window_form = |x: f64, m: f64, two_k: i32| {
            let l = (m / x).ln();
            let f = |j: i32| (1..=j).fold(1.0, |a, i| a * i as f64);
            l.powi(two_k) / (f(two_k) * m.sqrt())
                - m.sqrt() / 2.0
                    * (l.powi(two_k + 2) / f(two_k + 2) - 2.0 * l.powi(two_k + 1) / f(two_k + 1))
        };
        for &(x, m, tk) in &[(1.5, 1u64, 0u32), (2.7, 2, 2), (5.99, 5, 4), (3.2, 3, 6)] {
            let u = eval_u(x, m, LParam::new(tk)).unwrap();
            let w = window_form(x, m as f64, tk as i32);
            assert!(close(u, w, 1e-14), "x={x} m={m}: {u} vs {w}");
        }
    }

    #[test]
    fn v_values() {
        for tk in [0, 2, 5, 8] {
            assert_eq!(eval_v(1.0, 0, LParam::new(tk)).unwrap(), 0.0);
        }
        assert!(close(eval_v(E, 0, LParam::new(0)).unwrap(), 1.125, 1e-15));
        assert_eq!(eval_v(2.0, 1, LParam::new(0)).unwrap(), 0.0);
    }

    #[test]
    fn v0_reduced_form() {
        for tk in [0u32, 2, 4, 6] {
            for &x in &[1.3, 2.0, 4.7, 9.9] {
                let lg: f64 = f64::ln(x);
                let reduced = ipow(lg, tk + 2) * inv_factorial(tk + 2) / 4.0
                    + ipow(lg, tk + 1) * inv_factorial(tk + 1);
                let v = eval_v(x, 0, LParam::new(tk)).unwrap();
                assert!(close(v, reduced, 1e-14), "{v} vs {reduced}");
            }
        }
    }

    #[test]
    fn decomposition_spot_checks() {
        assert!(close(
            eval_l_decomposed(1.0, LParam::new(0)).unwrap(),
            1.0,
            1e-15
        ));
        for &(x, tk) in &[(2.5, 2u32), (7.25, 4)] {
            let a = eval_l(x, LParam::new(tk)).unwrap();
            let b = eval_l_decomposed(x, LParam::new(tk)).unwrap();
            assert!(close(a, b, 1e-13), "{a} vs {b}");
        }
        assert!(eval_l_decomposed(3.0, LParam::new(3)).is_err());
    }

    #[test]
    fn growth_bound() {
        assert!(close(bound_l(E, 0).unwrap(), 2.0 * E, 1e-15));
        assert!(close(bound_l(E * E, 1).unwrap(), 8.0 * E * E, 1e-14));
        assert!(eval_l(5.0, LParam::new(6)).unwrap().abs() <= bound_l(5.0, 3).unwrap());
        assert!(bound_l(2.0, 1).is_err());
    }

    #[test]
    fn ipow_keeps_sign() {
        assert_eq!(ipow(-2.0, 3), -8.0);
        assert_eq!(ipow(-2.0, 4), 16.0);
        assert_eq!(ipow(0.0, 0), 1.0);
        assert_eq!(inv_factorial(5), 1.0 / 120.0);
    }

    #[test]
    fn probe_rejects_bad_arguments() {
        assert!(smoothness_probe(1, 1, 1, 0.1).is_err());
        assert!(smoothness_probe(2, 0, 1, 0.1).is_err());
        assert!(smoothness_probe(2, 1, 3, 0.1).is_err());
        assert!(smoothness_probe(2, 1, 1, 0.3).is_err());
    }

    #[test]
    fn probe_first_derivative_decays() {
        let a = smoothness_probe(2, 1, 1, 1.0 / 16.0).unwrap();
        let b = smoothness_probe(2, 1, 1, 1.0 / 32.0).unwrap();
        let c = smoothness_probe(2, 1, 1, 1.0 / 64.0).unwrap();
        assert!(b < 0.6 * a && c < 0.6 * b, "{a} {b} {c}");
    }

    #[test]
    fn probe_sees_jump_at_order_two_k() {
        let j = analytic_jump(2, 1, 2);
        assert!(close(j, 2f64.powf(-2.5), 1e-15));
        let est = smoothness_extrapolated(2, 1, 2, 1.0 / 64.0).unwrap();
        assert!((est - j).abs() < 0.05 * j, "{est} vs {j}");
    }
}
