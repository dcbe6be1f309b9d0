//! The antiderivative `F(t) = int_0^t f(s) ds`, which has no closed form.
//!
//! Node placement:
//! * `t <= 0.01`: Maclaurin series `F = t^{3/2} (2/3 + 3/14 t^2 - 11/48 t^4 + ...)`.
//! * `0.01 < t <= 1e8`: piecewise Chebyshev interpolation of `ln F` in the
//!   variable `w = ln t`, on panels of width 1/4 with 18 first-kind nodes.
//!   Node values come from adaptive Gauss-Legendre quadrature accumulated
//!   panel by panel.
//! * `t > 1e8`: `F(1e8)` plus direct adaptive quadrature.
//!
//! The table is built once, on first use, and is immutable afterwards.

use super::f;
use crate::error::Result;
use crate::numerics::{adaptive_integrate, require_finite_nonneg, ChebyshevPanel};
use std::sync::OnceLock;

const SERIES_LIMIT: f64 = 0.01;
const TABLE_LIMIT: f64 = 1e8;
const PANEL_WIDTH: f64 = 0.25;
const PANEL_NODES: usize = 18;

const F_SERIES: [f64; 4] = [2.0 / 3.0, 3.0 / 14.0, -11.0 / 48.0, 3899.0 / 14400.0];

fn f_series(t: f64) -> f64 {
    let t2 = t * t;
    let poly = F_SERIES.iter().rev().fold(0.0, |acc, c| acc * t2 + c);
    t * t.sqrt() * poly
}

/// Integral of `f` over `[e^w0, e^w1]`, computed in the log variable.
fn integrate_log(w0: f64, w1: f64) -> f64 {
    adaptive_integrate(&|w: f64| {
        let t = w.exp();
        f(t) * t
    }, w0, w1, 1e-15, 0.0)
}

/// Cached piecewise interpolant for `F`.
#[derive(Debug)]
pub struct AntiderivativeTable {
    w_start: f64,
    panels: Vec<ChebyshevPanel>,
    /// `F` at each panel's left edge, plus the final right edge.
    edge_values: Vec<f64>,
    /// Largest relative deviation between interpolant and direct quadrature
    /// observed at the midpoints between interpolation nodes.
    certified_error: f64,
}

impl AntiderivativeTable {
    fn build() -> Self {
        let w_start = SERIES_LIMIT.ln();
        let w_end = TABLE_LIMIT.ln();
        let n_panels = ((w_end - w_start) / PANEL_WIDTH).ceil() as usize;
        let width = (w_end - w_start) / n_panels as f64;

        let mut panels = Vec::with_capacity(n_panels);
        let mut edge_values = Vec::with_capacity(n_panels + 1);
        let mut f_left = f_series(SERIES_LIMIT);
        edge_values.push(f_left);
        let mut certified_error: f64 = 0.0;

        for k in 0..n_panels {
            let a = w_start + width * k as f64;
            let b = a + width;
            let nodes = ChebyshevPanel::nodes(a, b, PANEL_NODES);
            let samples: Vec<f64> = nodes
                .iter()
                .map(|&w| (f_left + integrate_log(a, w)).ln())
                .collect();
            let panel = ChebyshevPanel::from_samples(a, b, &samples);

            // Check at midpoints between consecutive nodes.
            for pair in nodes.windows(2) {
                let w = 0.5 * (pair[0] + pair[1]);
                let direct = f_left + integrate_log(a, w);
                let interp = panel.eval(w).exp();
                certified_error = certified_error.max((interp - direct).abs() / direct);
            }

            f_left += integrate_log(a, b);
            edge_values.push(f_left);
            panels.push(panel);
        }

        Self {
            w_start,
            panels,
            edge_values,
            certified_error,
        }
    }

    fn width(&self) -> f64 {
        (TABLE_LIMIT.ln() - self.w_start) / self.panels.len() as f64
    }

    /// Maximum relative interpolation error found during construction.
    pub fn certified_error(&self) -> f64 {
        self.certified_error
    }

    pub fn panel_count(&self) -> usize {
        self.panels.len()
    }

    /// Evaluates `F(t)` for `t >= 0` (unchecked).
    pub fn eval(&self, t: f64) -> f64 {
        if t <= SERIES_LIMIT {
            return f_series(t);
        }
        if t > TABLE_LIMIT {
            let last = *self.edge_values.last().expect("table is non-empty");
            return last + integrate_log(TABLE_LIMIT.ln(), t.ln());
        }
        let w = t.ln();
        let idx = (((w - self.w_start) / self.width()) as usize).min(self.panels.len() - 1);
        self.panels[idx].eval(w).exp()
    }

    /// Inverse `F^{-1}(u)` for `u >= 0`, by safeguarded Newton iteration.
    pub fn inverse(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        let (mut lo, mut hi, mut t);
        if u <= self.edge_values[0] {
            lo = 0.0;
            hi = SERIES_LIMIT;
            t = (1.5 * u).powf(2.0 / 3.0).min(SERIES_LIMIT);
        } else if u >= *self.edge_values.last().expect("table is non-empty") {
            lo = TABLE_LIMIT;
            hi = TABLE_LIMIT;
            while self.eval(hi) < u {
                lo = hi;
                hi *= 2.0;
            }
            t = 0.5 * (lo + hi);
        } else {
            let k = self.edge_values.partition_point(|&v| v <= u) - 1;
            let width = self.width();
            lo = (self.w_start + width * k as f64).exp();
            hi = (self.w_start + width * (k + 1) as f64).exp();
            let frac = (u - self.edge_values[k]) / (self.edge_values[k + 1] - self.edge_values[k]);
            t = lo + frac * (hi - lo);
        }
        for _ in 0..60 {
            let r = self.eval(t) - u;
            if r > 0.0 {
                hi = hi.min(t);
            } else {
                lo = lo.max(t);
            }
            let deriv = f(t);
            let mut next = if deriv > 0.0 { t - r / deriv } else { f64::NAN };
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t {
                return next;
            }
            t = next;
        }
        t
    }
}

/// Shared, lazily built table for `F`.
pub fn antiderivative_table() -> &'static AntiderivativeTable {
    static TABLE: OnceLock<AntiderivativeTable> = OnceLock::new();
    TABLE.get_or_init(AntiderivativeTable::build)
}

/// `F(t)` with argument validation.
pub fn eval_big_f(t: f64) -> Result<f64> {
    require_finite_nonneg("eval_F", t)?;
    Ok(antiderivative_table().eval(t))
}

/// `F(t)` without validation.
#[inline]
pub fn big_f(t: f64) -> f64 {
    antiderivative_table().eval(t)
}

/// `F^{-1}(u)` without validation.
#[inline]
pub fn big_f_inverse(u: f64) -> f64 {
    antiderivative_table().inverse(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{log_space, simpson};

    // 40-digit quadrature reference values.
    const REF: [(f64, f64); 8] = [
        (1e-3, 2.108_185_784_409_122e-5),
        (0.01, 6.666_880_929_466_993e-4),
        (0.1, 2.114_889_792_049_583_7e-2),
        (1.0, 0.771_809_821_896_790_7),
        (10.0, 21.201_869_734_994_926),
        (100.0, 306.717_311_061_576_35),
        (1e4, 43_294.976_814_804_75),
        (1e6, 5_289_458.418_940_481),
    ];

    #[test]
    fn matches_high_precision_references() {
        for (t, v) in REF {
            let got = eval_big_f(t).unwrap();
            assert!((got - v).abs() <= 1e-10 * v, "F({t}) = {got}, want {v}");
        }
    }

    #[test]
    fn construction_error_is_certified() {
        let table = antiderivative_table();
        assert!(table.certified_error() <= 1e-10, "{}", table.certified_error());
        assert!(table.panel_count() > 50);
    }

    #[test]
    fn agrees_with_brute_force_simpson_at_one() {
        // Substitution s = v^2 removes the sqrt singularity of f at 0.
        let oracle = simpson(&|v: f64| 2.0 * v * f(v * v), 0.0, 1.0, 1_000_000);
        assert!((eval_big_f(1.0).unwrap() - oracle).abs() < 1e-8);
    }

    #[test]
    fn zero_and_domain() {
        assert_eq!(eval_big_f(0.0).unwrap(), 0.0);
        assert!(eval_big_f(-1e-3).is_err());
    }

    #[test]
    fn lower_bound_and_monotonicity_on_log_grid() {
        let grid = log_space(1e-6, 1e6, 3000);
        let mut prev = 0.0;
        for t in grid {
            let v = big_f(t);
            assert!(v > prev, "not increasing at {t}");
            assert!(v >= t * t.asinh().sqrt() / 2.0, "lower bound fails at {t}");
            prev = v;
        }
    }

    #[test]
    fn continuity_across_panel_edges_and_beyond_table() {
        let just_below = big_f(TABLE_LIMIT * (1.0 - 1e-12));
        let just_above = big_f(TABLE_LIMIT * (1.0 + 1e-12));
        assert!((just_above - just_below).abs() < 1e-9 * just_below);
        let s_lo = big_f(SERIES_LIMIT * (1.0 - 1e-13));
        let s_hi = big_f(SERIES_LIMIT * (1.0 + 1e-13));
        assert!((s_hi - s_lo).abs() < 1e-11 * s_lo);
    }

    #[test]
    fn inverse_round_trips() {
        for t in log_space(1e-9, 1e9, 500) {
            let u = big_f(t);
            let back = big_f_inverse(u);
            assert!((back - t).abs() <= 1e-11 * t, "t={t} back={back}");
        }
        assert_eq!(big_f_inverse(0.0), 0.0);
    }
}
