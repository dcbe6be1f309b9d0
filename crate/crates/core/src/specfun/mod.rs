//! Scalar special functions of the relativistic functional.
//!
//! All functions take the dimensionless Fermi momentum `t = p / c`. The
//! `eval_*` entry points validate their argument; the bare functions
//! (`f_sq`, `ttf`, ...) are the unchecked kernels used inside integrands.
//!
//! `T^TF` and `X` lose every significant digit to cancellation in their
//! closed forms as `t -> 0`. Below [`SERIES_CROSSOVER`] both are evaluated
//! from their Maclaurin series instead.

mod antiderivative;
mod extremal;

pub use antiderivative::{antiderivative_table, big_f, big_f_inverse, eval_big_f, AntiderivativeTable};
pub use extremal::{compute_mu, compute_trig_max, compute_xi, trig_ratio, ExtremalConstant};

use crate::error::{Error, Result};
use crate::numerics::require_finite_nonneg;
use std::f64::consts::PI;

/// Below this `t` the series branches of `T^TF`, `X` and `g` are used.
pub const SERIES_CROSSOVER: f64 = 0.1;

/// Above this `t` the quartic-normalized forms are used to avoid overflow.
const LARGE_T: f64 = 1e6;

/// Maclaurin coefficients of `T^TF(t) / t^5` in powers of `t^2`.
const TTF_SERIES: [f64; 9] = [
    4.0 / 5.0,
    -1.0 / 7.0,
    1.0 / 18.0,
    -5.0 / 176.0,
    7.0 / 416.0,
    -7.0 / 640.0,
    33.0 / 4352.0,
    -429.0 / 77824.0,
    715.0 / 172032.0,
];

/// Maclaurin coefficients of `g(t) / t^3` in powers of `t^2`, where
/// `g(t) = t sqrt(t^2 + 1) - arsinh(t)`.
const G_SERIES: [f64; 10] = [
    2.0 / 3.0,
    -1.0 / 5.0,
    3.0 / 28.0,
    -5.0 / 72.0,
    35.0 / 704.0,
    -63.0 / 1664.0,
    77.0 / 2560.0,
    -429.0 / 17408.0,
    6435.0 / 311296.0,
    -12155.0 / 688128.0,
];

/// Maclaurin coefficients of `X(t) / t^4` in powers of `t^2`.
const X_SERIES: [f64; 10] = [
    2.0,
    -4.0 / 3.0,
    4.0 / 5.0,
    -96.0 / 175.0,
    128.0 / 315.0,
    -512.0 / 1617.0,
    256.0 / 1001.0,
    -4096.0 / 19305.0,
    32768.0 / 182325.0,
    -393216.0 / 2540395.0,
];

fn even_poly(coeffs: &[f64], t2: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t2 + c)
}

/// `f(t)^2 = t / sqrt(t^2+1) + 2 t^2 arsinh(t) / (t^2+1)`.
#[inline]
pub fn f_sq(t: f64) -> f64 {
    let s2 = t * t + 1.0;
    t / s2.sqrt() + 2.0 * t * t * t.asinh() / s2
}

/// `f(t)`, the integrand of the antiderivative `F`.
#[inline]
pub fn f(t: f64) -> f64 {
    f_sq(t).sqrt()
}

/// `f(t)^2 / t`, smooth at the origin with value 1.
#[inline]
pub fn f_sq_over_t(t: f64) -> f64 {
    if t == 0.0 {
        return 1.0;
    }
    let s2 = t * t + 1.0;
    1.0 / s2.sqrt() + 2.0 * t * t.asinh() / s2
}

/// Relativistic Thomas-Fermi kinetic function `T^TF(t)`.
pub fn ttf(t: f64) -> f64 {
    if t <= SERIES_CROSSOVER {
        ttf_series(t)
    } else if t <= LARGE_T {
        ttf_direct(t)
    } else {
        let t2 = t * t;
        t2 * t2 * ttf_over_t4_large(t)
    }
}

pub(crate) fn ttf_series(t: f64) -> f64 {
    let t2 = t * t;
    t2 * t2 * t * even_poly(&TTF_SERIES, t2)
}

pub(crate) fn ttf_direct(t: f64) -> f64 {
    let s2 = t * t + 1.0;
    let s = s2.sqrt();
    t * s2 * s + t * t * t * s - t.asinh() - 8.0 / 3.0 * t * t * t
}

fn ttf_over_t4_large(t: f64) -> f64 {
    let u = 1.0 / (t * t);
    let s = (1.0 + u).sqrt();
    (1.0 + u) * s + s - t.asinh() * u * u - 8.0 / (3.0 * t)
}

/// `T^TF(t) / t^4`, finite for every `t >= 0` (0 at the origin, 2 at infinity).
pub fn ttf_over_t4(t: f64) -> f64 {
    if t == 0.0 {
        0.0
    } else if t <= SERIES_CROSSOVER {
        t * even_poly(&TTF_SERIES, t * t)
    } else if t <= LARGE_T {
        let t2 = t * t;
        ttf_direct(t) / (t2 * t2)
    } else {
        ttf_over_t4_large(t)
    }
}

/// `T^TF(t) / t^5` (4/5 at the origin).
pub fn ttf_over_t5(t: f64) -> f64 {
    if t <= SERIES_CROSSOVER {
        even_poly(&TTF_SERIES, t * t)
    } else {
        ttf_over_t4(t) / t
    }
}

/// `T^TF(t)/t^4` as a function of `sigma = arsinh(t)`, valid for arbitrarily
/// large `sigma` (where `t` itself overflows).
pub fn ttf_over_t4_from_asinh(sigma: f64) -> f64 {
    if sigma < 700.0 {
        ttf_over_t4(sigma.sinh())
    } else {
        // 1/t = 2 exp(-sigma) underflows long before this matters.
        2.0 - 16.0 / 3.0 * (-sigma).exp()
    }
}

/// Derivative `T^TF'(t) = 8 t^4 / (1 + sqrt(1 + t^2))`.
pub fn ttf_prime(t: f64) -> f64 {
    let t2 = t * t;
    8.0 * t2 * t2 / (1.0 + (1.0 + t2).sqrt())
}

/// `g(t) = t sqrt(t^2+1) - arsinh(t)`, the bracket appearing in `X` and `a`.
pub fn g(t: f64) -> f64 {
    if t <= SERIES_CROSSOVER {
        let t2 = t * t;
        t2 * t * even_poly(&G_SERIES, t2)
    } else {
        t * (t * t + 1.0).sqrt() - t.asinh()
    }
}

/// `g'(t) = 2 t^2 / sqrt(t^2 + 1)`.
pub fn g_prime(t: f64) -> f64 {
    2.0 * t * t / (t * t + 1.0).sqrt()
}

/// Relativistic exchange function `X(t) = 2 t^4 - 3 g(t)^2`.
pub fn x(t: f64) -> f64 {
    if t <= SERIES_CROSSOVER {
        x_series(t)
    } else if t <= LARGE_T {
        x_direct(t)
    } else {
        let t2 = t * t;
        let q = (1.0 + 1.0 / t2).sqrt() - t.asinh() / t2;
        t2 * t2 * (2.0 - 3.0 * q * q)
    }
}

pub(crate) fn x_series(t: f64) -> f64 {
    let t2 = t * t;
    t2 * t2 * even_poly(&X_SERIES, t2)
}

pub(crate) fn x_direct(t: f64) -> f64 {
    let gt = t * (t * t + 1.0).sqrt() - t.asinh();
    let t2 = t * t;
    2.0 * t2 * t2 - 3.0 * gt * gt
}

/// `X'(t) = 8 t^3 - 6 g(t) g'(t)`.
pub fn x_prime(t: f64) -> f64 {
    8.0 * t * t * t - 6.0 * g(t) * g_prime(t)
}

/// `a(t) = c^5/(8 pi^2) T^TF(t) + c^4/(8 pi^3) 3 g(t)^2`.
pub fn a_fn(t: f64, c: f64) -> f64 {
    let gt = g(t);
    c.powi(5) / (8.0 * PI * PI) * ttf(t) + c.powi(4) / (8.0 * PI.powi(3)) * 3.0 * gt * gt
}

/// `b(t) = c^4/(8 pi^3) 2 t^4`.
pub fn b_fn(t: f64, c: f64) -> f64 {
    c.powi(4) / (8.0 * PI.powi(3)) * 2.0 * t.powi(4)
}

pub fn eval_f_sq(t: f64) -> Result<f64> {
    require_finite_nonneg("eval_f_sq", t)?;
    Ok(f_sq(t))
}

pub fn eval_ttf(t: f64) -> Result<f64> {
    require_finite_nonneg("eval_ttf", t)?;
    Ok(ttf(t))
}

pub fn eval_x(t: f64) -> Result<f64> {
    require_finite_nonneg("eval_x", t)?;
    Ok(x(t))
}

fn check_ac(op: &'static str, t: f64, c: f64) -> Result<()> {
    require_finite_nonneg(op, t)?;
    if !c.is_finite() || c <= 0.0 {
        return Err(Error::domain(op, format!("c must be finite and > 0, got {c}")));
    }
    Ok(())
}

pub fn eval_a(t: f64, c: f64) -> Result<f64> {
    check_ac("eval_a", t, c)?;
    Ok(a_fn(t, c))
}

pub fn eval_b(t: f64, c: f64) -> Result<f64> {
    check_ac("eval_b", t, c)?;
    Ok(b_fn(t, c))
}
