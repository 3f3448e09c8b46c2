//! Truncated theta series `sum_{n>=1} exp(-pi n^2 x)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{domain, Result};

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct ThetaSum {
    pub value: f64,
    pub remainder_bound: f64,
    pub terms: u32,
}

/// Sum the first `N` terms, `N` the smallest count whose tail bound
/// `exp(-pi (N+1)^2 x) / (1 - exp(-pi (2N+3) x))` is at most `tol`.
pub fn theta_sum(x: f64, tol: f64) -> Result<ThetaSum> {
    if !(x >= 1.0) {
        return Err(domain("theta_sum requires x >= 1", x));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive", tol));
    }
    let mut value = 0.0;
    let mut n = 0u32;
    loop {
        let rem = remainder(x, n);
        if rem <= tol || n >= 64 {
            // terms are added largest last-to-first so small ones are not lost
            for j in (1..=n).rev() {
                let j = j as f64;
                value += (-PI * j * j * x).exp();
            }
            return Ok(ThetaSum {
                value,
                remainder_bound: rem,
                terms: n,
            });
        }
        n += 1;
    }
}

fn remainder(x: f64, n: u32) -> f64 {
    let next = (n + 1) as f64;
    let ratio = (-PI * (2.0 * next + 1.0) * x).exp();
    (-PI * next * next * x).exp() / (1.0 - ratio)
}

/// `theta(x) <= scale * exp(-pi x)` for `x >= x0`.
pub(crate) fn theta_envelope_scale(x0: f64) -> f64 {
    1.0 / (1.0 - (-3.0 * PI * x0).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        let t = theta_sum(1.0, 1e-16).unwrap();
        assert!((t.value - 0.043_217_405_606_65).abs() < 1e-14);
        assert!(t.terms <= 3);
        // the example's 0.0432139 is e^{-pi} alone; e^{-4 pi} and e^{-9 pi} still count
        let three = (-PI).exp() + (-4.0 * PI).exp() + (-9.0 * PI).exp();
        assert!((t.value - three).abs() < 1e-17);

        let t4 = theta_sum(4.0, 1e-16).unwrap();
        assert!((t4.value / (-4.0 * PI).exp() - 1.0).abs() < 1e-10);
        assert!((t4.value - 3.487_342_356_2e-6).abs() < 1e-15);
    }

    #[test]
    fn remainder_bound_is_honest_and_monotone() {
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let x = 1.0 + 0.2 * i as f64;
            let t = theta_sum(x, 1e-6).unwrap();
            let full = theta_sum(x, 1e-300).unwrap();
            assert!(full.value - t.value <= t.remainder_bound + 4.0 * f64::EPSILON * t.value);
            assert!(t.remainder_bound <= 1e-6);
            let fixed = remainder(x, 1);
            assert!(fixed < prev);
            prev = fixed;
        }
        assert!(theta_sum(0.5, 1e-10).is_err());
    }

    #[test]
    fn envelope() {
        for i in 0..40 {
            let x = 1.0 + 0.37 * i as f64;
            let t = theta_sum(x, 1e-300).unwrap().value;
            assert!(t <= theta_envelope_scale(1.0) * (-PI * x).exp());
        }
    }
}
