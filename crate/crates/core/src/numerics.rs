//! Small numerical kernels shared by the rest of the crate: Gauss-Legendre
//! rules, adaptive quadrature, Chebyshev panels, bracketing root finders and
//! golden-section maximization.

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `g` over `[a, b]`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: &G, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * g(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// Adaptive Gauss-Legendre quadrature: a panel is accepted once the 10- and
/// 20-point rules agree to `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_integrate<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> f64 {
    thread_local! {
        static RULES: (GaussLegendre, GaussLegendre) = (GaussLegendre::new(10), GaussLegendre::new(20));
    }
    RULES.with(|(lo, hi)| adaptive_panel(g, a, b, rel_tol, abs_tol, lo, hi, 0))
}

#[allow(clippy::too_many_arguments)]
fn adaptive_panel<G: Fn(f64) -> f64>(
    g: &G,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    lo: &GaussLegendre,
    hi: &GaussLegendre,
    depth: usize,
) -> f64 {
    let coarse = lo.integrate(g, a, b);
    let fine = hi.integrate(g, a, b);
    let err = (fine - coarse).abs();
    if depth >= 40 || err <= abs_tol.max(rel_tol * fine.abs()) {
        return fine;
    }
    let mid = 0.5 * (a + b);
    adaptive_panel(g, a, mid, rel_tol, 0.5 * abs_tol, lo, hi, depth + 1)
        + adaptive_panel(g, mid, b, rel_tol, 0.5 * abs_tol, lo, hi, depth + 1)
}

/// Composite Simpson rule on `n` (even) subintervals.
pub fn simpson<G: Fn(f64) -> f64>(g: &G, a: f64, b: f64, n: usize) -> f64 {
    let n = if n % 2 == 1 { n + 1 } else { n.max(2) };
    let h = (b - a) / n as f64;
    let mut sum = g(a) + g(b);
    for i in 1..n {
        let x = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 * g(x) } else { 2.0 * g(x) };
    }
    sum * h / 3.0
}

/// Chebyshev interpolant of degree `n - 1` on `[a, b]`.
#[derive(Debug, Clone)]
pub struct ChebyshevPanel {
    pub a: f64,
    pub b: f64,
    coeffs: Vec<f64>,
}

impl ChebyshevPanel {
    /// Chebyshev points of the first kind mapped to `[a, b]`.
    pub fn nodes(a: f64, b: f64, n: usize) -> Vec<f64> {
        (0..n)
            .map(|j| {
                let x = (std::f64::consts::PI * (j as f64 + 0.5) / n as f64).cos();
                0.5 * (a + b) + 0.5 * (b - a) * x
            })
            .collect()
    }

    /// Builds the interpolant from samples taken at [`ChebyshevPanel::nodes`].
    pub fn from_samples(a: f64, b: f64, samples: &[f64]) -> Self {
        let n = samples.len();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = samples
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * (std::f64::consts::PI * k as f64 * (j as f64 + 0.5) / n as f64).cos()
                    })
                    .sum();
                let scale = if k == 0 { 1.0 } else { 2.0 };
                scale * s / n as f64
            })
            .collect();
        Self { a, b, coeffs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let y = (2.0 * x - self.a - self.b) / (self.b - self.a);
        let y2 = 2.0 * y;
        let mut b1 = 0.0;
        let mut b2 = 0.0;
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + y2 * b1 - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + y * b1 - b2
    }

    /// Magnitude of the trailing coefficients, a cheap truncation indicator.
    pub fn tail_magnitude(&self) -> f64 {
        self.coeffs.iter().rev().take(2).map(|c| c.abs()).sum()
    }
}

/// Bisection on an increasing function. `lo` and `hi` must bracket the root
/// (`g(lo) <= 0 <= g(hi)`). Stops when the bracket cannot shrink further.
pub fn bisect_increasing<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if g(hi).abs() < g(lo).abs() {
        hi
    } else {
        lo
    }
}

/// Golden-section search for a maximum of a unimodal `g` on `[a, b]`.
/// Returns `(argmax, max)`.
pub fn golden_max<G: Fn(f64) -> f64>(g: G, mut a: f64, mut b: f64, x_tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut gc = g(c);
    let mut gd = g(d);
    let mut iters = 0;
    while (b - a).abs() > x_tol && iters < 500 {
        if gc > gd {
            b = d;
            d = c;
            gd = gc;
            c = b - inv_phi * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + inv_phi * (b - a);
            gd = g(d);
        }
        iters += 1;
    }
    let x = 0.5 * (a + b);
    (x, g(x))
}

/// `n` logarithmically spaced points covering `[lo, hi]` inclusive.
pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (l0, l1) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (l0 + (l1 - l0) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Scans `g` on a log grid, then refines the best grid cell by golden section
/// in the log variable. Returns `(argmax, max)`.
pub fn log_scan_max<G: Fn(f64) -> f64>(g: G, lo: f64, hi: f64, n: usize, rel_x_tol: f64) -> (f64, f64) {
    let grid = log_space(lo, hi, n);
    let (mut best_i, mut best_v) = (0, f64::NEG_INFINITY);
    for (i, &t) in grid.iter().enumerate() {
        let v = g(t);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let left = grid[best_i.saturating_sub(1)].ln();
    let right = grid[(best_i + 1).min(n - 1)].ln();
    let (w, v) = golden_max(|w| g(w.exp()), left, right, rel_x_tol);
    if v >= best_v {
        (w.exp(), v)
    } else {
        (grid[best_i], best_v)
    }
}

pub(crate) fn require_finite_nonneg(op: &'static str, t: f64) -> Result<()> {
    if !t.is_finite() || t < 0.0 {
        return Err(Error::domain(op, format!("argument must be finite and >= 0, got {t}")));
    }
    Ok(())
}


/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}
