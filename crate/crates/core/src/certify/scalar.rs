//! Certificates over scalar functions of one or two variables.

use super::Worst;
use crate::error::Result;
use crate::model::DEFAULT_C;
use crate::numerics::{adaptive_integrate, log_space, GaussLegendre};
use crate::specfun::{
    a_fn, big_f, compute_mu, compute_trig_max, compute_xi, f_sq, trig_ratio, ttf, ttf_over_t4, ttf_over_t5, x,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

type Outcome = Result<(String, Worst)>;

/// Relative margin `(big - small) / scale`, with `scale = max(|big|, |small|)`.
fn rel(big: f64, small: f64) -> f64 {
    let scale = big.abs().max(small.abs());
    if scale == 0.0 {
        0.0
    } else {
        (big - small) / scale
    }
}

/// A log grid plus a dense grid of the same size within 10% of `focus`.
fn focused_grid(lo: f64, hi: f64, n: usize, focus: f64) -> Vec<f64> {
    let mut pts = log_space(lo, hi, n);
    pts.extend((0..n).map(|i| focus * (0.9 + 0.2 * i as f64 / (n - 1) as f64)));
    pts
}

pub(super) fn f_lower(n: usize, _seed: u64) -> Outcome {
    let (lo, hi) = (1e-8, 1e8);
    let mut w = Worst::new();
    for t in log_space(lo, hi, n) {
        let bound = 0.5 * t * t.asinh().sqrt();
        w.update(rel(big_f(t), bound), || format!("t = {t:e}"));
    }
    Ok((format!("{n} log-spaced t in [{lo:e}, {hi:e}]; margin (F - bound)/F"), w))
}

pub(super) fn ttf_ratios(n: usize, _seed: u64) -> Outcome {
    let (lo, hi) = (1e-4, 1e4);
    let grid = log_space(lo, hi, n);
    let r5: Vec<f64> = grid.iter().map(|&t| ttf_over_t5(t)).collect();
    let r4: Vec<f64> = grid.iter().map(|&t| ttf_over_t4(t)).collect();
    let mut w = Worst::new();
    for i in 0..n {
        let t = grid[i];
        w.update(rel(0.8, r5[i]), || format!("T/t^5 <= 4/5 at t = {t:e}"));
        w.update(rel(2.0, r4[i]), || format!("T/t^4 <= 2 at t = {t:e}"));
        if i + 1 < n {
            let u = grid[i + 1];
            w.update(rel(r5[i], r5[i + 1]), || format!("T/t^5 decreasing on [{t:e}, {u:e}]"));
            w.update(rel(r4[i + 1], r4[i]), || format!("T/t^4 increasing on [{t:e}, {u:e}]"));
        }
    }
    // The limits themselves: 4/5 and 0 for T/t^5, 0 and 2 for T/t^4,
    // probed at t = 1e-8 and 1e8 where the corrections are O(1e-8).
    const LIMIT_TOL: f64 = 1e-6;
    let ends = [
        ((ttf_over_t5(1e-8) - 0.8).abs() / 0.8, "T/t^5 -> 4/5 as t -> 0"),
        (ttf_over_t5(1e8), "T/t^5 -> 0 as t -> inf"),
        (ttf_over_t4(1e-8), "T/t^4 -> 0 as t -> 0"),
        ((ttf_over_t4(1e8) - 2.0).abs() / 2.0, "T/t^4 -> 2 as t -> inf"),
    ];
    for (dev, what) in ends {
        w.update((LIMIT_TOL - dev) / LIMIT_TOL, || format!("{what}: deviation {dev:e}"));
    }
    Ok((
        format!(
            "{n} log-spaced t in [{lo:e}, {hi:e}]; relative bounds and successive differences, limits checked at 1e-8 and 1e8 to 1e-6"
        ),
        w,
    ))
}

pub(super) fn f_sq_linear(n: usize, _seed: u64) -> Outcome {
    let mu = compute_mu();
    let focus = mu.argmax.unwrap_or(1.0);
    let (lo, hi) = (1e-8, 1e8);
    let mut w = Worst::new();
    for t in focused_grid(lo, hi, n, focus) {
        w.update(rel(mu.value * t, f_sq(t)), || format!("t = {t:e}"));
    }
    Ok((
        format!(
            "mu = {:.15} at t = {focus:.12}; {n} log-spaced t in [{lo:e}, {hi:e}] plus {n} points within 10% of the argmax",
            mu.value
        ),
        w,
    ))
}

pub(super) fn x_cubic(n: usize, _seed: u64) -> Outcome {
    let (xi0, _) = compute_xi(3.0)?;
    let focus = xi0.argmax.unwrap_or(1.0);
    let (lo, hi) = (1e-8, 1e8);
    let mut w = Worst::new();
    for t in focused_grid(lo, hi, n, focus) {
        w.update(rel(xi0.value * t.powi(3), x(t)), || format!("t = {t:e}"));
    }
    Ok((
        format!(
            "xi_0 = {:.15} at t = {focus:.12}; {n} log-spaced t in [{lo:e}, {hi:e}] plus {n} points within 10% of the argmax",
            xi0.value
        ),
        w,
    ))
}

pub(super) fn ttf_quartic(n: usize, _seed: u64) -> Outcome {
    let (lo, hi) = (1e-6, 1e4);
    let mut w = Worst::new();
    for t in log_space(lo, hi, n) {
        let bound = 2.0 * t.powi(4) - 8.0 / 3.0 * t.powi(3);
        w.update(rel(ttf(t), bound), || format!("t = {t:e}"));
    }
    Ok((format!("{n} log-spaced t in [{lo:e}, {hi:e}]; margin relative to max(|T|, |bound|)"), w))
}

/// Speeds of light at which the `a`-certificates are scanned.
const C_VALUES: [f64; 3] = [0.1, 1.0, DEFAULT_C];

pub(super) fn a_scaling(n: usize, _seed: u64) -> Outcome {
    let side = ((n as f64).sqrt().ceil() as usize).max(10);
    let (lo, hi) = (1e-3, 1e3);
    let ts = log_space(lo, hi, side);
    let mut w = Worst::new();
    for &c in &C_VALUES {
        for &t in &ts {
            let at = a_fn(t, c);
            for j in 1..=side {
                let f = j as f64 / side as f64;
                w.update(rel(f.powi(3) * at, a_fn(f * t, c)), || format!("c = {c}, t = {t:e}, f = {f}"));
            }
        }
    }
    Ok((
        format!("{side} x {side} grid: t log-spaced in [{lo:e}, {hi:e}], f = j/{side}; c in {C_VALUES:?}"),
        w,
    ))
}

pub(super) fn a_derivatives(n: usize, _seed: u64) -> Outcome {
    let (lo, hi) = (0.01, 100.0);
    let mut w = Worst::new();
    for &c in &C_VALUES {
        let a = |t: f64| a_fn(t, c);
        for t in log_space(lo, hi, n) {
            let h = 1e-3 * t.max(1.0);
            let v: Vec<f64> = (-3..=3).map(|k| a(t + k as f64 * h)).collect();
            let [m3, m2, m1, z, p1, p2, p3] = [v[0], v[1], v[2], v[3], v[4], v[5], v[6]];
            let d1 = (-p2 + 8.0 * p1 - 8.0 * m1 + m2) / (12.0 * h);
            let d2 = (-p2 + 16.0 * p1 - 30.0 * z + 16.0 * m1 - m2) / (12.0 * h * h);
            let d3 = (-p3 + 8.0 * p2 - 13.0 * p1 + 13.0 * m1 - 8.0 * m2 + m3) / (8.0 * h.powi(3));
            let d4 = (-p3 + 12.0 * p2 - 39.0 * p1 + 56.0 * z - 39.0 * m1 + 12.0 * m2 - m3) / (6.0 * h.powi(4));
            let scale = z;
            w.update(z / scale.max(f64::MIN_POSITIVE), || format!("a at c = {c}, t = {t:e}"));
            for (k, d) in [(1, d1), (2, d2), (3, d3), (4, d4)] {
                w.update(d * t.powi(k) / scale, || format!("a^({k}) at c = {c}, t = {t:e}"));
            }
        }
    }
    Ok((
        format!(
            "{n} log-spaced t in [{lo}, {hi}] for c in {C_VALUES:?}; fourth-order central differences with h = 1e-3 max(1, t); margin a^(k) t^k / a"
        ),
        w,
    ))
}

/// `int_S (omega . x - alpha)_+ d omega / 4 pi` with the polar axis along
/// `pole`, which makes an angle `beta` with `x`. The azimuthal integral is
/// cut at its kink and done by Gauss-Legendre; the polar one adaptively,
/// split at its own kinks.
fn sphere_average(r: f64, alpha: f64, beta: f64, rule: &GaussLegendre) -> f64 {
    let (sb, cb) = beta.sin_cos();
    let inner = |theta: f64| {
        let (st, ct) = theta.sin_cos();
        let a = r * ct * cb - alpha;
        let b = r * st * sb;
        // int_0^{2 pi} (a + b cos phi)_+ d phi
        if b <= 1e-300 {
            return 2.0 * PI * a.max(0.0);
        }
        let k = -a / b;
        if k <= -1.0 {
            2.0 * PI * a
        } else if k >= 1.0 {
            0.0
        } else {
            let phi_star = k.acos();
            2.0 * rule.integrate(&|phi: f64| (a + b * phi.cos()).max(0.0), 0.0, phi_star)
        }
    };
    let g = |theta: f64| theta.sin() * inner(theta);
    // The polar integrand has kinks where the cut circle touches the
    // azimuthal range ends, i.e. where cos(theta -+ beta) = alpha / r.
    let mut cuts = vec![0.0, PI];
    if alpha < r {
        let w = (alpha / r).acos();
        for th in [beta - w, beta + w, w - beta, 2.0 * PI - w - beta] {
            if th > 0.0 && th < PI {
                cuts.push(th);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.windows(2)
        .map(|p| adaptive_integrate(&g, p[0], p[1], 1e-13, 1e-16 * r.max(1.0)))
        .sum::<f64>()
        / (4.0 * PI)
}

pub(super) fn angular_identity(n: usize, seed: u64) -> Outcome {
    const TOL: f64 = 1e-8;
    let rule = GaussLegendre::new(24);
    let samples = (n / 100).max(20);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Worst::new();
    let check = |r: f64, alpha: f64, beta: f64, w: &mut Worst| {
        let lhs = sphere_average(r, alpha, beta, &rule);
        let rhs = 0.25 * r * (1.0 - alpha / r).max(0.0).powi(2);
        // Absolute deviation in units of |x|/4, against the tolerance.
        let dev = (lhs - rhs).abs() / (0.25 * r);
        w.update((TOL - dev) / TOL, || format!("|x| = {r:e}, alpha = {alpha:e}, pole angle = {beta:.6}, deviation {dev:e}"));
    };
    // alpha = 0, unit x: exactly 1/4; alpha >= |x|: both sides vanish.
    check(1.0, 0.0, 0.0, &mut w);
    check(1.0, 0.0, 1.1, &mut w);
    check(2.0, 2.0, 0.3, &mut w);
    check(0.5, 3.0, 2.0, &mut w);
    for _ in 0..samples {
        let r = 10f64.powf(rng.gen_range(-3.0..3.0));
        let alpha = r * rng.gen_range(0.0..1.5);
        let beta = rng.gen_range(0.0..PI);
        check(r, alpha, beta, &mut w);
    }
    Ok((
        format!(
            "{samples} random (|x|, alpha, pole angle) with |x| log-uniform in [1e-3, 1e3], alpha/|x| in [0, 1.5), plus 4 fixed cases; polar axis tilted from x, azimuth split at its kink; margin (1e-8 - |lhs - rhs|/(|x|/4))/1e-8"
        ),
        w,
    ))
}

pub(super) fn trig_max(n: usize, _seed: u64) -> Outcome {
    const TOL: f64 = 1e-9;
    let claimed = (2.0 + SQRT_2) / 4.0;
    let mut w = Worst::new();
    for i in 0..=n {
        let t = FRAC_PI_2 * i as f64 / n as f64;
        w.update(rel(claimed, trig_ratio(t)), || format!("t = {t:.12}"));
    }
    let found = compute_trig_max();
    let dev = (found.value - claimed).abs() / claimed;
    w.update((TOL - dev) / TOL, || {
        format!("refined maximum {:.16} at t = {:?}", found.value, found.argmax)
    });
    Ok((
        format!(
            "{} uniform t in [0, pi/2] stay below (2+sqrt2)/4; refined maximum {:.16} must match it to {TOL:e} relative",
            n + 1,
            found.value
        ),
        w,
    ))
}
