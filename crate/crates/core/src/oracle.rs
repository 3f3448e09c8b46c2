//! Route-independent ground truth: ξ(½+it) assembled from an Euler–Maclaurin
//! zeta and a Stirling gamma, and Taylor coefficients read off a least-squares
//! even-polynomial fit.

use std::f64::consts::PI;
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use num::complex::Complex64;
use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::dd::ser_f64_str;
use crate::error::{domain, Error, Result};

const BERNOULLI_PAIRS: usize = 60;

/// `B_{2j}` for `j = 0..BERNOULLI_PAIRS`, from the exact recurrence.
fn bernoulli_even() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let m_max = 2 * BERNOULLI_PAIRS;
        let mut b: Vec<BigRational> = Vec::with_capacity(m_max + 1);
        b.push(BigRational::one());
        for m in 1..=m_max {
            // sum_{j<m} C(m+1, j) B_j = -(m+1) B_m
            let mut s = BigRational::zero();
            let mut binom = BigInt::one();
            for (j, bj) in b.iter().enumerate() {
                s += BigRational::from_integer(binom.clone()) * bj;
                binom = binom * BigInt::from(m + 1 - j) / BigInt::from(j + 1);
            }
            b.push(-s / BigRational::from_integer(BigInt::from(m + 1)));
        }
        (0..=BERNOULLI_PAIRS)
            .map(|j| b[2 * j].to_f64().unwrap_or(f64::NAN))
            .collect()
    })
}

fn inv_fact(n: usize) -> f64 {
    crate::functions::inv_factorial(n as u32)
}

#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ZetaValue {
    pub value: Complex64,
    /// Size of the first omitted Euler–Maclaurin term.
    pub est_error: f64,
    /// `sum |terms|`, the scale for rounding error.
    pub abs_mass: f64,
}

/// ζ(σ + it) by Euler–Maclaurin summation with `N = 20 + |t|` explicit terms.
pub fn zeta_em(sigma: f64, t: f64, tol: f64) -> Result<ZetaValue> {
    let n = 20 + t.abs().ceil() as usize;
    zeta_em_with(Complex64::new(sigma, t), n, tol)
}

pub fn zeta_em_with(s: Complex64, n: usize, tol: f64) -> Result<ZetaValue> {
    if s == Complex64::new(1.0, 0.0) {
        return Err(Error::Pole("zeta at s = 1".into()));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive", tol));
    }
    if n < 2 {
        return Err(domain("Euler-Maclaurin needs N >= 2", n as f64));
    }
    let nf = n as f64;
    let ln_n = nf.ln();
    let mut sum = Complex64::zero();
    let mut mass = 0.0;
    for j in (1..n).rev() {
        let term = (-s * (j as f64).ln()).exp();
        mass += term.norm();
        sum += term;
    }
    let n_pow = (-s * ln_n).exp();
    let integral = n_pow * nf / (s - 1.0);
    let half = n_pow * 0.5;
    sum += integral + half;
    mass += integral.norm() + half.norm();

    let bern = bernoulli_even();
    // rising factorial s (s+1) ... (s+2j-2), times N^{-s-2j+1}
    let mut rising = s;
    let mut npow = n_pow / nf;
    let mut prev = f64::INFINITY;
    let mut est_error = 0.0;
    for j in 1..BERNOULLI_PAIRS {
        let term = rising * npow * (bern[j] * inv_fact(2 * j));
        let size = term.norm();
        if size <= tol || size > prev {
            est_error = size;
            break;
        }
        sum += term;
        mass += size;
        prev = size;
        if j + 1 == BERNOULLI_PAIRS {
            return Err(Error::SeriesCap {
                tol,
                iterations: BERNOULLI_PAIRS,
            });
        }
        let a = 2 * j as u32;
        rising = rising * (s + (a - 1) as f64) * (s + a as f64);
        npow /= nf * nf;
    }
    Ok(ZetaValue {
        value: sum,
        est_error,
        abs_mass: mass,
    })
}

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re == z.re.round()
}

/// Γ(z) via Stirling's series after shifting `Re z` above 15; relative
/// accuracy about `tol` (floored at double rounding).
pub fn gamma_half(s_over_2: Complex64, tol: f64) -> Result<Complex64> {
    let z = s_over_2;
    if is_nonpositive_integer(z) {
        return Err(Error::Pole(format!("gamma at {}", z.re)));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive", tol));
    }
    let mut w = z;
    let mut prod = Complex64::one();
    while w.re < 15.0 {
        prod *= w;
        w += 1.0;
    }
    let bern = bernoulli_even();
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = Complex64::zero();
    let mut p = inv;
    for j in 1..BERNOULLI_PAIRS {
        let c = bern[j] / ((2 * j) as f64 * (2 * j - 1) as f64);
        let term = p * c;
        series += term;
        if term.norm() <= tol * 1e-3 {
            break;
        }
        p *= inv2;
    }
    let ln_gamma = (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series;
    Ok(ln_gamma.exp() / prod)
}

/// π^{-s/2} Γ(s/2) ζ(s) together with an absolute error estimate.
pub fn completed_zeta(s: Complex64, tol: f64) -> Result<(Complex64, f64)> {
    let z = zeta_em_with(s, 20 + s.im.abs().ceil() as usize, tol)?;
    let g = gamma_half(s * 0.5, tol)?;
    let pi_pow = (-s * 0.5 * PI.ln()).exp();
    let pref = pi_pow * g;
    let value = pref * z.value;
    let err = pref.norm() * (z.est_error + 64.0 * f64::EPSILON * z.abs_mass)
        + value.norm() * (tol + 64.0 * f64::EPSILON);
    Ok((value, err))
}

/// `|Λ(s) - Λ(1-s)|` and the combined estimate, `Λ = π^{-s/2} Γ(s/2) ζ(s)`.
pub fn functional_equation_residual(s: Complex64, tol: f64) -> Result<(f64, f64)> {
    let (a, ea) = completed_zeta(s, tol)?;
    let (b, eb) = completed_zeta(Complex64::new(1.0, 0.0) - s, tol)?;
    Ok(((a - b).norm(), ea + eb))
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct XiValue {
    #[serde(serialize_with = "ser_f64_str")]
    pub t: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub value: f64,
    /// Imaginary residue of the complex assembly (zero in exact arithmetic).
    #[serde(serialize_with = "ser_f64_str")]
    pub imag: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub est_error: f64,
}

/// ξ(½+it) = −s(1−s) π^{−s/2} Γ(s/2) ζ(s), with no factor ½ in front.
pub fn xi_paper(t: f64, tol: f64) -> Result<XiValue> {
    let s = Complex64::new(0.5, t);
    let (lambda, err) = completed_zeta(s, tol)?;
    // -s(1-s) = -(1/4 + t^2) on the critical line
    let c = -(0.25 + t * t);
    let v = lambda * c;
    Ok(XiValue {
        t,
        value: v.re,
        imag: v.im,
        est_error: err * c.abs(),
    })
}

/// `-(1/4) π^{-1/4} Γ(1/4) ζ(1/2)`, the value of ξ at the central point.
pub fn a0_closed_form() -> Result<f64> {
    let g = gamma_half(Complex64::new(0.25, 0.0), 1e-16)?;
    let z = zeta_em(0.5, 0.0, 1e-17)?;
    Ok(-0.25 * PI.powf(-0.25) * g.re * z.value.re)
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize)]
pub struct OracleCoefficient {
    pub k: u32,
    #[serde(serialize_with = "ser_f64_str")]
    pub value: f64,
    #[serde(serialize_with = "ser_f64_str")]
    pub est_error: f64,
}

/// Half-width of the fit interval.
pub const FIT_HALF_WIDTH: f64 = 2.5;
const FIT_HALF_WIDTH_ALT: f64 = 3.0;
/// Extra even terms beyond `kmax` in the fitted polynomial.
pub const FIT_EXTRA_TERMS: usize = 5;

// monomial coefficients of T_{2j}(u) in powers of u^2: row j, column i
fn even_chebyshev_to_monomial(d: usize) -> Vec<Vec<f64>> {
    let deg = 2 * d;
    let mut t: Vec<Vec<f64>> = vec![vec![1.0], vec![0.0, 1.0]];
    for n in 2..=deg {
        let mut next = vec![0.0; n + 1];
        for (i, &c) in t[n - 1].iter().enumerate() {
            next[i + 1] += 2.0 * c;
        }
        for (i, &c) in t[n - 2].iter().enumerate() {
            next[i] -= c;
        }
        t.push(next);
    }
    (0..=d)
        .map(|j| (0..=d).map(|i| t[2 * j].get(2 * i).copied().unwrap_or(0.0)).collect())
        .collect()
}

struct Fit {
    coeffs: Vec<f64>,
    noise: Vec<f64>,
}

/// Nodes per fitted coefficient; oversampling averages down the ~1e-15
/// relative rounding noise of the ξ evaluations.
const NODES_PER_TERM: usize = 40;

fn fit(d: usize, h: f64, tol: f64) -> Result<Fit> {
    let nodes = NODES_PER_TERM * (d + 1);
    let ts: Vec<f64> = (0..nodes)
        .map(|i| h * (PI * (i as f64 + 0.5) / nodes as f64).cos())
        .collect();
    let xs = ts
        .par_iter()
        .map(|&t| xi_paper(t, tol))
        .collect::<Result<Vec<_>>>()?;
    let conv = even_chebyshev_to_monomial(d);
    let a = DMatrix::from_fn(nodes, d + 1, |r, j| {
        let u = ts[r] / h;
        (2.0 * j as f64 * u.acos()).cos()
    });
    let b = DVector::from_iterator(nodes, xs.iter().map(|x| x.value));
    let pinv = a
        .clone()
        .svd(true, true)
        .pseudo_inverse(1e-14)
        .map_err(|_| Error::IllConditioned {
            k: 0,
            sensitivity: f64::INFINITY,
            tol,
        })?;
    let gamma = &pinv * &b;
    let resid = &a * &gamma - &b;
    let sigma = (resid.norm_squared() / (nodes - d - 1) as f64).sqrt();
    let mut coeffs = vec![0.0; d + 1];
    let mut noise = vec![0.0; d + 1];
    for i in 0..=d {
        let scale = h.powi(2 * i as i32);
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut c = 0.0;
        for j in 0..=d {
            c += conv[j][i] * gamma[j];
        }
        coeffs[i] = sign * c / scale;
        // data noise through the linear extraction map, at three standard deviations
        let mut row_sq = 0.0;
        for r in 0..nodes {
            let mut row = 0.0;
            for j in 0..=d {
                row += conv[j][i] * pinv[(j, r)];
            }
            row_sq += row * row;
        }
        let conv_mass: f64 = (0..=d).map(|j| (conv[j][i] * gamma[j]).abs()).sum();
        noise[i] = (3.0 * sigma * row_sq.sqrt() + 4.0 * (d + 1) as f64 * f64::EPSILON * conv_mass) / scale;
    }
    Ok(Fit { coeffs, noise })
}

/// `a_k` for `k <= kmax` from a least-squares fit of an even polynomial of
/// degree `2 (kmax + 5)` to ξ(½+it) on Chebyshev nodes in `[-2.5, 2.5]`.
///
/// The error estimate is twice the change against a second fit (one more
/// term, wider interval) plus the data noise of both fits. Fails with
/// `IllConditioned` when that estimate exceeds `tol` relative to `|a_k|`.
pub fn oracle_coefficients(kmax: u32, tol: f64) -> Result<Vec<OracleCoefficient>> {
    if kmax > 8 {
        return Err(domain("oracle supports kmax <= 8", kmax as f64));
    }
    if !(tol > 0.0) {
        return Err(domain("tolerance must be positive", tol));
    }
    let d = kmax as usize + FIT_EXTRA_TERMS;
    let xi_tol = 1e-17;
    let main = fit(d, FIT_HALF_WIDTH, xi_tol)?;
    let alt = fit(d + 1, FIT_HALF_WIDTH_ALT, xi_tol)?;
    let mut out = Vec::with_capacity(kmax as usize + 1);
    for k in 0..=kmax as usize {
        let est = 2.0 * (main.coeffs[k] - alt.coeffs[k]).abs() + main.noise[k] + alt.noise[k];
        let rel = est / main.coeffs[k].abs();
        if !(rel <= tol) {
            return Err(Error::IllConditioned {
                k,
                sensitivity: rel,
                tol,
            });
        }
        out.push(OracleCoefficient {
            k: k as u32,
            value: main.coeffs[k],
            est_error: est,
        });
    }
    Ok(out)
}
