//! Closed-form tail majorants for `integral_X^inf |f|`.
//!
//! Every integrand handled by the engine is dominated for `x >= X` by a sum of
//! terms `scale * x^power * log(x/base)^j * exp(-rate * x^q)` with `q` equal to
//! 1 (theta-type decay) or 2 (Gaussian decay). For `x >= X` the log factor obeys
//! `log(x/base) <= log(X/base) * (x/X)^{1/log(X/base)}`, which turns each term
//! into a pure power times the exponential, and that integral is an upper
//! incomplete gamma function bounded by
//! `Gamma(s, z) <= z^{s-1} e^{-z} / (1 - (s-1)/z)` for `s > 1, z > s - 1`
//! and by `z^{s-1} e^{-z}` for `s <= 1`.

use crate::error::{domain, Result};
use crate::functions::LParam;

/// Decay profile of a majorant.
#[derive(Copy, Clone, Debug, PartialEq)]
pub enum Decay {
    /// `exp(-rate x)`
    Exponential,
    /// `exp(-rate x^2)`
    Gaussian,
}

impl Decay {
    fn exponent(self) -> f64 {
        match self {
            Decay::Exponential => 1.0,
            Decay::Gaussian => 2.0,
        }
    }
}

/// `scale * x^power * log(x/log_base)^log_power * exp(-rate * x^q)`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Majorant {
    pub scale: f64,
    pub power: f64,
    pub log_power: u32,
    pub log_base: f64,
    pub rate: f64,
    pub decay: Decay,
}

impl Majorant {
    pub fn gaussian(scale: f64, power: f64, log_power: u32) -> Self {
        Majorant {
            scale,
            power,
            log_power,
            log_base: 1.0,
            rate: std::f64::consts::PI,
            decay: Decay::Gaussian,
        }
    }

    pub fn exponential(scale: f64, power: f64, log_power: u32, rate: f64) -> Self {
        Majorant {
            scale,
            power,
            log_power,
            log_base: 1.0,
            rate,
            decay: Decay::Exponential,
        }
    }

    pub fn with_log_base(mut self, base: f64) -> Self {
        self.log_base = base;
        self
    }

    /// Pointwise value, for checking that the majorant dominates.
    pub fn at(&self, x: f64) -> f64 {
        let l = (x / self.log_base).ln();
        self.scale
            * x.powf(self.power)
            * l.powi(self.log_power as i32)
            * (-self.rate * x.powf(self.decay.exponent())).exp()
    }

    /// Upper bound on `integral_{x0}^inf` of the majorant; `+inf` when the
    /// closed form does not apply at this `x0`.
    pub fn tail(&self, x0: f64) -> f64 {
        if self.scale == 0.0 {
            return 0.0;
        }
        let q = self.decay.exponent();
        let (ln_log_factor, c) = if self.log_power == 0 {
            (0.0, 0.0)
        } else {
            let l0 = (x0 / self.log_base).ln();
            if !(l0 > 0.0) {
                return f64::INFINITY;
            }
            let c = self.log_power as f64 / l0;
            (self.log_power as f64 * l0.ln() - c * x0.ln(), c)
        };
        let a = self.power + c;
        let s = (a + 1.0) / q;
        let z = self.rate * x0.powf(q);
        let ln_gamma = match upper_gamma_majorant_ln(s, z) {
            Some(v) => v,
            None => return f64::INFINITY,
        };
        let ln_total =
            self.scale.ln() + ln_log_factor - q.ln() - s * self.rate.ln() + ln_gamma;
        ln_total.exp()
    }
}

/// `ln` of an upper bound on `Gamma(s, z)`.
fn upper_gamma_majorant_ln(s: f64, z: f64) -> Option<f64> {
    if !(z > 0.0) {
        return None;
    }
    let base = (s - 1.0) * z.ln() - z;
    if s <= 1.0 {
        Some(base)
    } else if z > s - 1.0 {
        Some(base - (1.0 - (s - 1.0) / z).ln())
    } else {
        None
    }
}

/// Sum of majorant tails.
pub fn tail_sum(majorants: &[Majorant], x0: f64) -> f64 {
    majorants.iter().map(|m| m.tail(x0)).sum()
}

/// Bound on `|integral_X^inf e^{-pi x^2} x^{-1/2} L(x;k) dx|` from the growth
/// estimate `|L(x;k)| <= 2 x log(x)^{2k}`.
pub fn tail_bound_l(x: f64, two_kappa: u32) -> Result<f64> {
    if !(x >= std::f64::consts::E) {
        return Err(domain("tail bound requires X >= e", x));
    }
    Ok(l_route_majorant(LParam::new(two_kappa), 1.0).tail(x))
}

pub(crate) fn l_route_majorant(p: LParam, extra_scale: f64) -> Majorant {
    Majorant::gaussian(2.0 * extra_scale, 0.5, p.two_kappa())
}

/// Smallest integer `X >= 3` with `tail_bound_l(X, two_kappa) <= tol / 10`.
pub fn choose_cutoff(two_kappa: u32, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive", tol));
    }
    let m = [l_route_majorant(LParam::new(two_kappa), 1.0)];
    Ok(cutoff_for(&m, 3.0, tol / 10.0))
}

pub(crate) const MAX_CUTOFF: f64 = 4096.0;

/// Smallest integer `X >= start` whose tail sum is within `budget`.
pub(crate) fn cutoff_for(majorants: &[Majorant], start: f64, budget: f64) -> f64 {
    let mut x = start.ceil();
    while x < MAX_CUTOFF {
        if tail_sum(majorants, x) <= budget {
            return x;
        }
        x += 1.0;
    }
    MAX_CUTOFF
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::eval_l;
    use std::f64::consts::PI;

    // plain composite Simpson, fine enough for a smooth decaying integrand
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn l_tail_dominates_brute_force() {
        for tk in [0u32, 2, 4] {
            let p = LParam::new(tk);
            // |integrand| integrated on [4, 12] windows; beyond 12 it is below 1e-190
            let brute: f64 = (4..12)
                .map(|m| {
                    simpson(
                        |x| (-PI * x * x).exp() / x.sqrt() * eval_l(x.min(m as f64 + 1.0 - 1e-12), p).unwrap().abs(),
                        m as f64,
                        m as f64 + 1.0,
                        2000,
                    )
                })
                .sum();
            let bound = tail_bound_l(4.0, tk).unwrap();
            assert!(bound >= brute, "tk={tk}: {bound} < {brute}");
            assert!(bound < 1e4 * brute, "bound uselessly loose");
        }
    }

    #[test]
    fn l_tail_decreasing_and_tiny() {
        for tk in [0u32, 3, 8, 12] {
            let mut prev = f64::INFINITY;
            for i in 0..40 {
                let x = 3.0 + 0.25 * i as f64;
                let t = tail_bound_l(x, tk).unwrap();
                assert!(t < prev, "tk={tk} x={x}");
                prev = t;
            }
        }
        assert!(tail_bound_l(6.0, 4).unwrap() < 1e-40);
        assert!(tail_bound_l(2.0, 0).is_err());
    }

    #[test]
    fn cutoffs() {
        let x0 = choose_cutoff(0, 1e-10).unwrap();
        assert!(x0 <= 6.0 && x0 >= 3.0);
        assert!(tail_bound_l(x0, 0).unwrap() <= 1e-11);
        assert!(choose_cutoff(12, 1e-10).unwrap() >= x0);
        for &(tk, tol) in &[(0u32, 1e-6), (5, 1e-12), (12, 1e-16), (20, 1e-14)] {
            let x = choose_cutoff(tk, tol).unwrap();
            assert!(tail_bound_l(x, tk).unwrap() <= tol / 10.0);
            if x > 3.0 {
                assert!(tail_bound_l(x - 1.0, tk).unwrap() > tol / 10.0);
            }
        }
    }

    #[test]
    fn exponential_tail_against_closed_form() {
        // integral_X^inf e^{-pi x} dx = e^{-pi X}/pi ; the bound is exact for s = 1
        let m = Majorant::exponential(1.0, 0.0, 0, PI);
        let exact = (-PI * 3.0).exp() / PI;
        assert!((m.tail(3.0) - exact).abs() < 1e-15 * exact.max(1e-300) + 1e-20);
        // with a log factor the bound must dominate a quadrature of the tail
        let m = Majorant::exponential(1.0, -0.75, 3, PI);
        let brute = simpson(|x| m.at(x), 4.0, 30.0, 20_000);
        assert!(m.tail(4.0) >= brute);
    }
}
