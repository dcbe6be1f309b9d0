//! Thomas-Fermi energy of a neutral atom,
//! `E(Z, gamma) = min_rho (3/10) gamma int rho^{5/3} - Z int rho/|x| + D[rho]`,
//! by two independent routes.
//!
//! # Shooting
//!
//! The Euler-Lagrange equation of the functional (chemical potential 0 for
//! the neutral minimizer) is `(1/2) gamma rho^{2/3} = phi`, with
//! `phi = Z/|x| - rho * |x|^{-1}` and `-Laplace phi = -4 pi rho` away from the
//! nucleus. Writing `phi(r) = (Z / r) chi(r / b)` and choosing
//! `b = (4 pi)^{-2/3} (gamma / 2) Z^{-1/3}` reduces this to
//! `chi'' = chi^{3/2} / sqrt(x)`, `chi(0) = 1`, `chi(inf) = 0`.
//! The slope `B = -chi'(0)` is found by bisection: too small a slope turns
//! `chi` upward, too large a slope drives it through zero. The virial theorem
//! then gives `E = -(3/7) B Z^2 / b`. The substitution `x = tau^2` turns the
//! system into `d chi/d tau = 2 tau chi'`, `d chi'/d tau = 2 chi^{3/2}`, which
//! is regular at the origin and is integrated by classical RK4.
//!
//! # Direct minimization
//!
//! The discrete functional on a log grid is convex in the node values; it is
//! minimized by damped Newton iterations with a dense Hessian (local
//! Thomas-Fermi curvature plus the Coulomb kernel `1/max(r_i, r_j)`).

use crate::error::{Error, Result};
use crate::model::{gamma_tf, hartree_potential, RadialGrid};
use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;
use std::sync::OnceLock;

const RK_STEP: f64 = 2e-3;
const TAU_MAX: f64 = 40.0;

enum Fate {
    /// `chi` crossed zero: slope too steep.
    Crossed,
    /// `chi` turned upward: slope too shallow.
    Turned,
    Undecided,
}

fn shoot(slope: f64) -> Fate {
    let rhs = |tau: f64, y: [f64; 2]| -> [f64; 2] {
        let chi = y[0].max(0.0);
        [2.0 * tau * y[1], 2.0 * chi * chi.sqrt()]
    };
    let mut y = [1.0, -slope];
    let mut tau = 0.0;
    let h = RK_STEP;
    while tau < TAU_MAX {
        let k1 = rhs(tau, y);
        let k2 = rhs(tau + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(tau + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(tau + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        tau += h;
        if y[0] < 0.0 {
            return Fate::Crossed;
        }
        if y[1] > 0.0 {
            return Fate::Turned;
        }
    }
    Fate::Undecided
}

/// Initial slope `B = -chi'(0)` of the Thomas-Fermi function.
pub fn tf_initial_slope() -> Result<f64> {
    let (mut lo, mut hi) = (1.0, 2.0);
    if !matches!(shoot(lo), Fate::Turned) || !matches!(shoot(hi), Fate::Crossed) {
        return Err(Error::convergence(
            "tf_initial_slope",
            format!("slope bracket [{lo}, {hi}] does not bracket the Thomas-Fermi solution"),
        ));
    }
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        match shoot(mid) {
            Fate::Crossed => hi = mid,
            Fate::Turned => lo = mid,
            Fate::Undecided => return Ok(mid),
        }
        if hi - lo < 1e-13 {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Length scale `b` of the Thomas-Fermi atom.
pub fn tf_length_scale(z: f64, gamma: f64) -> f64 {
    (4.0 * PI).powf(-2.0 / 3.0) * 0.5 * gamma * z.powf(-1.0 / 3.0)
}

/// Neutral-atom Thomas-Fermi energy from the shooting solution.
pub fn tf_energy_shooting(z: f64, gamma: f64) -> Result<f64> {
    let slope = tf_initial_slope()?;
    Ok(-3.0 / 7.0 * slope * z * z / tf_length_scale(z, gamma))
}

/// Options for the direct minimization route.
#[derive(Debug, Clone, Copy)]
pub struct TfMinimizeOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub nodes: usize,
    pub max_iters: usize,
}

impl Default for TfMinimizeOptions {
    fn default() -> Self {
        Self {
            r_min: 1e-7,
            r_max: 2000.0,
            nodes: 700,
            max_iters: 200,
        }
    }
}

/// Discrete Thomas-Fermi functional and its minimizer on a log grid.
struct TfProblem {
    nodes: Vec<f64>,
    /// `4 pi w_i r_i^2`
    shell: Vec<f64>,
    z: f64,
    gamma: f64,
}

impl TfProblem {
    fn energy(&self, rho: &[f64]) -> f64 {
        let q: Vec<f64> = rho.iter().zip(&self.shell).map(|(v, m)| v * m).collect();
        let phi = hartree_potential(&self.nodes, &q);
        let mut e = 0.0;
        for i in 0..rho.len() {
            e += 0.3 * self.gamma * rho[i].powf(5.0 / 3.0) * self.shell[i]
                - self.z * q[i] / self.nodes[i]
                + 0.5 * q[i] * phi[i];
        }
        e
    }

    fn gradient(&self, rho: &[f64]) -> Vec<f64> {
        let q: Vec<f64> = rho.iter().zip(&self.shell).map(|(v, m)| v * m).collect();
        let phi = hartree_potential(&self.nodes, &q);
        (0..rho.len())
            .map(|i| self.shell[i] * (0.5 * self.gamma * rho[i].powf(2.0 / 3.0) - self.z / self.nodes[i] + phi[i]))
            .collect()
    }

    fn hessian(&self, rho: &[f64]) -> DMatrix<f64> {
        let m = rho.len();
        DMatrix::from_fn(m, m, |i, j| {
            let coulomb = self.shell[i] * self.shell[j] / self.nodes[i].max(self.nodes[j]);
            if i == j {
                coulomb + self.shell[i] * self.gamma / 3.0 * rho[i].powf(-1.0 / 3.0)
            } else {
                coulomb
            }
        })
    }
}

/// Minimizes the discrete neutral-atom Thomas-Fermi functional directly and
/// returns `(energy, mass)`.
pub fn tf_energy_direct(z: f64, gamma: f64, opts: TfMinimizeOptions) -> Result<(f64, f64)> {
    let grid = RadialGrid::log_spaced(opts.r_min, opts.r_max, opts.nodes)?;
    let nodes = grid.nodes().to_vec();
    let shell: Vec<f64> = nodes
        .iter()
        .zip(grid.weights())
        .map(|(r, w)| 4.0 * PI * w * r * r)
        .collect();
    let problem = TfProblem {
        nodes,
        shell,
        z,
        gamma,
    };

    // Seed: Thomas-Fermi density of the bare nucleus, cut off smoothly.
    let b = tf_length_scale(z, gamma);
    let mut rho: Vec<f64> = problem
        .nodes
        .iter()
        .map(|&r| (2.0 * z / (gamma * r)).powf(1.5) * (-r / b).exp() + 1e-300)
        .collect();
    let mut energy = problem.energy(&rho);

    for iter in 0..opts.max_iters {
        let grad = problem.gradient(&rho);
        let hess = problem.hessian(&rho);
        let chol = hess.cholesky().ok_or_else(|| {
            Error::convergence("tf_energy_direct", format!("Hessian not positive definite at iteration {iter}"))
        })?;
        let step = chol.solve(&DVector::from_vec(grad.clone()));
        let decrement: f64 = step.iter().zip(&grad).map(|(s, g)| s * g).sum();
        if decrement < 1e-13 * energy.abs() {
            let mass = rho.iter().zip(&problem.shell).map(|(v, m)| v * m).sum();
            return Ok((energy, mass));
        }
        let mut alpha = 1.0;
        loop {
            let trial: Vec<f64> = rho
                .iter()
                .zip(step.iter())
                .map(|(v, s)| v - alpha * s)
                .collect();
            if trial.iter().all(|&v| v > 0.0) {
                let e = problem.energy(&trial);
                if e <= energy - 0.25 * alpha * decrement {
                    rho = trial;
                    energy = e;
                    break;
                }
            }
            alpha *= 0.5;
            if alpha < 1e-12 {
                return Err(Error::convergence(
                    "tf_energy_direct",
                    format!("line search failed at iteration {iter}, energy {energy}"),
                ));
            }
        }
    }
    Err(Error::convergence(
        "tf_energy_direct",
        format!("no convergence in {} Newton iterations (energy {energy})", opts.max_iters),
    ))
}

/// `e^TF`: minus the Thomas-Fermi energy of hydrogen with `gamma = (3 pi^2)^{2/3}`.
/// Computed once by shooting and cached.
pub fn tf_hydrogen_energy() -> Result<f64> {
    static CACHE: OnceLock<Result<f64>> = OnceLock::new();
    CACHE
        .get_or_init(|| tf_energy_shooting(1.0, gamma_tf()).map(|e| -e))
        .clone()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_matches_known_value() {
        // Literature value of -chi'(0) for the Thomas-Fermi function.
        let b = tf_initial_slope().unwrap();
        assert!((b - 1.588_071).abs() < 1e-5, "{b}");
    }

    #[test]
    fn hydrogen_energy() {
        let e = tf_hydrogen_energy().unwrap();
        assert!((e - 0.7687).abs() < 1e-4, "{e}");
    }

    #[test]
    fn length_scale_for_hydrogen() {
        assert!((tf_length_scale(1.0, gamma_tf()) - 0.8853).abs() < 1e-4);
    }
}
