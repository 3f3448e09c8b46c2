//! The polynomial family `p(x;n)`.
//!
//! `p(x;0) = 1` and `p(-pi x^2; n+1) = 2 sqrt(x) e^{pi x^2} d/dx [p(-pi x^2; n) sqrt(x) e^{-pi x^2}]`.
//! Coefficients are exact integers, built two independent ways (a two-term
//! recurrence and a finite-difference sum), and the family can also be
//! evaluated through its exponential series.

use num::bigint::BigInt;
use num::{Integer, One, Signed, ToPrimitive, Zero};

use crate::dd::DoubleDouble;
use crate::error::{Error, Result};

/// `p(x;n)` in the monomial basis; `coeffs[m]` multiplies `x^m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PPolynomial {
    n: u32,
    coeffs: Vec<BigInt>,
}

impl PPolynomial {
    /// Wraps raw coefficients without checking them against the family.
    pub fn from_parts(n: u32, coeffs: Vec<BigInt>) -> Self {
        PPolynomial { n, coeffs }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    /// Coefficients as `i64` when they all fit.
    pub fn coeffs_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }

    /// `sum |c_m| y^m`, a majorant of `|p(-y;n)|` for `y >= 0`.
    pub fn abs_eval(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * y + c.abs().to_f64().unwrap_or(f64::INFINITY))
    }

    /// Horner evaluation in double-double.
    pub fn eval_dd(&self, x: DoubleDouble) -> DoubleDouble {
        self.coeffs.iter().rev().fold(DoubleDouble::ZERO, |acc, c| {
            acc * x + DoubleDouble::from_bigint(c)
        })
    }

    /// Horner evaluation of the derivative in double-double.
    pub fn eval_derivative_dd(&self, x: DoubleDouble) -> DoubleDouble {
        self.coeffs
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(DoubleDouble::ZERO, |acc, (m, c)| {
                acc * x + DoubleDouble::from_bigint(c).mul_f64(m as f64)
            })
    }
}

/// Coefficients from `c_{m,n+1} = (4m+1) c_{m,n} + 4 c_{m-1,n}` with `c_{0,0} = 1`.
pub fn p_by_recurrence(n: u32) -> PPolynomial {
    let mut c: Vec<BigInt> = vec![BigInt::one()];
    for _ in 0..n {
        let mut next = vec![BigInt::zero(); c.len() + 1];
        for (m, cm) in c.iter().enumerate() {
            next[m] += cm * BigInt::from(4 * m as u64 + 1);
            next[m + 1] += cm * BigInt::from(4u32);
        }
        c = next;
    }
    PPolynomial { n, coeffs: c }
}

/// Coefficients from `c_{m,n} = (1/m!) sum_{j=0}^m (-1)^{j-m} C(m,j) (4j+1)^n`.
///
/// The division by `m!` must be exact; a remainder is reported as an error.
pub fn p_by_binomial(n: u32) -> Result<PPolynomial> {
    let mut coeffs = Vec::with_capacity(n as usize + 1);
    let mut m_fact = BigInt::one();
    for m in 0..=n as usize {
        if m > 0 {
            m_fact *= BigInt::from(m);
        }
        let mut sum = BigInt::zero();
        let mut binom = BigInt::one();
        for j in 0..=m {
            if j > 0 {
                binom = binom * BigInt::from(m - j + 1) / BigInt::from(j);
            }
            let term = &binom * BigInt::from(4 * j as u64 + 1).pow(n);
            if (m - j) % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
        }
        let (q, r) = sum.div_rem(&m_fact);
        if !r.is_zero() {
            return Err(Error::InexactDivision {
                index: m,
                divisor: m_fact.to_string(),
            });
        }
        coeffs.push(q);
    }
    // higher m vanish: the n-th power is annihilated by differences of order > n
    Ok(PPolynomial { n, coeffs })
}

/// `sum coeffs[m] x^m`; for negative `x` the alternating sum is formed in
/// double-double before rounding.
pub fn p_eval(p: &PPolynomial, x: f64) -> f64 {
    if x >= 0.0 {
        p.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::INFINITY))
    } else {
        p.eval_dd(x.into()).to_f64()
    }
}

/// `p(x;n) = e^{-x} sum_j (4j+1)^n x^j / j!`, truncated once the remainder
/// is certified below `tol`.
pub fn p_eval_exponential(n: u32, x: f64, tol: f64) -> Result<f64> {
    Ok(p_eval_exponential_dd(n, x, tol)?.to_f64())
}

pub fn p_eval_exponential_dd(n: u32, x: f64, tol: f64) -> Result<DoubleDouble> {
    const MAX_TERMS: usize = 20_000;
    if !(tol > 0.0) {
        return Err(Error::Domain {
            what: "tolerance must be positive",
            value: tol,
        });
    }
    let scale = DoubleDouble::from(-x).exp();
    let ax = x.abs();
    let mut weight = DoubleDouble::ONE; // x^j / j!
    let mut sum = DoubleDouble::ZERO;
    for j in 0..MAX_TERMS {
        if j > 0 {
            weight = weight.mul_f64(x).div_f64(j as f64);
        }
        let base = (4 * j + 1) as f64;
        let term = weight * DoubleDouble::from(base).powi(n);
        sum += term;

        // ratio of consecutive term magnitudes, decreasing in j
        let ratio = ((base + 4.0) / base).powi(n as i32) * ax / (j as f64 + 1.0);
        if ratio < 1.0 {
            let rest = term.abs().to_f64() * ratio / (1.0 - ratio) * scale.to_f64();
            if rest <= tol {
                return Ok(sum * scale);
            }
        }
    }
    Err(Error::SeriesCap {
        tol,
        iterations: MAX_TERMS,
    })
}

/// Relative residual of the defining derivative relation at `x`:
/// `p(-pi x^2; n+1)` against `(1 - 4 pi x^2) p(-pi x^2; n) - 4 pi x^2 p'(-pi x^2; n)`.
pub fn defining_relation_residual(p_n: &PPolynomial, p_next: &PPolynomial, x: f64) -> f64 {
    let pi_x2 = DoubleDouble::PI * DoubleDouble::from_prod(x, x);
    let y = -pi_x2;
    let lhs = p_next.eval_dd(y);
    let q = p_n.eval_dd(y);
    let dq = p_n.eval_derivative_dd(y);
    let four_pi_x2 = pi_x2.mul_f64(4.0);
    let rhs = q * (DoubleDouble::ONE - four_pi_x2) - four_pi_x2 * dq;
    let diff = (lhs - rhs).abs().to_f64();
    diff / lhs.abs().to_f64().max(1.0)
}

/// `p(-pi x^2; 2)/4 - 1`, evaluated directly.
pub fn p2_margin(x: f64) -> f64 {
    let pi = std::f64::consts::PI;
    let y = pi * x * x;
    (1.0 - 24.0 * y + 16.0 * y * y) / 4.0 - 1.0
}

/// The same quantity expanded in powers of `u = x^2 - 1`:
/// `c0 + c1 u + c2 u^2` with `c0 = -3/4 - 6 pi + 4 pi^2`, `c1 = -6 pi + 8 pi^2`, `c2 = 4 pi^2`.
pub fn p2_expansion() -> [f64; 3] {
    let pi = std::f64::consts::PI;
    let pi2 = pi * pi;
    [-0.75 - 6.0 * pi + 4.0 * pi2, -6.0 * pi + 8.0 * pi2, 4.0 * pi2]
}

pub fn p2_margin_expanded(x: f64) -> f64 {
    let [c0, c1, c2] = p2_expansion();
    let u = x * x - 1.0;
    c0 + u * (c1 + u * c2)
}

/// `4m C(m-1,k) - (4m+1) C(m,k) == -(4k+1) C(m,k)` in exact arithmetic.
pub fn check_binomial_identity(m: u64, k: u64) -> bool {
    let binom = |a: u64, b: u64| -> BigInt {
        if b > a {
            return BigInt::zero();
        }
        let mut r = BigInt::one();
        for i in 0..b {
            r = r * BigInt::from(a - i) / BigInt::from(i + 1);
        }
        r
    };
    let m_big = BigInt::from(m);
    let lhs = BigInt::from(4u32) * &m_big * binom(m.saturating_sub(1), k)
        - (BigInt::from(4u32) * &m_big + 1) * binom(m, k);
    let rhs = -(BigInt::from(4 * k + 1)) * binom(m, k);
    lhs == rhs
}
