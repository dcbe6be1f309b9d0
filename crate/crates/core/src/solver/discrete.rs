//! The discrete functional in the substituted variable `u_i = F(p_i / c)`,
//! with its analytic gradient and a tridiagonal preconditioner.

use crate::model::{
    fermi_momentum, hartree_potential, ModelParams, RadialGrid,
};
use crate::numerics::CompensatedSum;
use crate::specfun::{big_f, big_f_inverse, f_sq, ttf, x, x_prime};
use std::f64::consts::PI;
use std::sync::Arc;

/// Node values in the three equivalent parametrizations.
#[derive(Debug, Clone)]
pub(crate) struct State {
    /// `u_i = F(t_i)`
    pub u: Vec<f64>,
    /// `t_i = p_i / c`
    pub t: Vec<f64>,
    pub rho: Vec<f64>,
}

pub(crate) struct Discrete {
    pub params: ModelParams,
    pub grid: Arc<RadialGrid>,
    /// `4 pi w_i r_i^2`
    pub shell: Vec<f64>,
    weizsacker: f64,
    tf_pre: f64,
    x_pre: f64,
}

impl Discrete {
    pub fn new(params: ModelParams, grid: Arc<RadialGrid>) -> Self {
        let shell = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .map(|(r, w)| 4.0 * PI * w * r * r)
            .collect();
        let c = params.c;
        Self {
            weizsacker: crate::model::weizsacker_prefactor(&params),
            tf_pre: c.powi(5) / (8.0 * PI * PI),
            x_pre: c.powi(4) / (8.0 * PI.powi(3)),
            params,
            grid,
            shell,
        }
    }

    fn rho_of_t(&self, t: f64) -> f64 {
        let p = self.params.c * t;
        p * p * p / (3.0 * PI * PI)
    }

    pub fn state_from_rho(&self, rho: Vec<f64>) -> State {
        let c = self.params.c;
        let t: Vec<f64> = rho.iter().map(|&v| fermi_momentum(v) / c).collect();
        let u = t.iter().map(|&t| big_f(t)).collect();
        State { u, t, rho }
    }

    pub fn state_from_u(&self, u: Vec<f64>) -> State {
        let t: Vec<f64> = u.iter().map(|&v| big_f_inverse(v)).collect();
        let rho = t.iter().map(|&t| self.rho_of_t(t)).collect();
        State { u, t, rho }
    }

    /// The state with density multiplied by `k`.
    pub fn scaled(&self, s: &State, k: f64) -> State {
        let kt = k.cbrt();
        let t: Vec<f64> = s.t.iter().map(|t| t * kt).collect();
        let u = t.iter().map(|&t| big_f(t)).collect();
        let rho = s.rho.iter().map(|r| r * k).collect();
        State { u, t, rho }
    }

    pub fn mass(&self, s: &State) -> f64 {
        s.rho.iter().zip(&self.shell).map(|(r, m)| r * m).sum()
    }

    fn charges(&self, s: &State) -> Vec<f64> {
        s.rho.iter().zip(&self.shell).map(|(r, m)| r * m).collect()
    }

    pub fn energy(&self, s: &State) -> f64 {
        let q = self.charges(s);
        let phi = hartree_potential(self.grid.nodes(), &q);
        let nodes = self.grid.nodes();
        // Compensated sums keep the energy noise well below the changes
        // the line search must resolve near convergence.
        let mut total = CompensatedSum::default();
        for i in 0..nodes.len() {
            total.add(self.shell[i] * self.tf_pre * ttf(s.t[i]));
            total.add(-self.shell[i] * self.x_pre * x(s.t[i]));
            total.add(q[i] * 0.5 * phi[i]);
            total.add(-q[i] * self.params.z / nodes[i]);
        }
        for (k, pair) in self.grid.edge_coupling().iter().zip(s.u.windows(2)) {
            let d = pair[1] - pair[0];
            total.add(self.weizsacker * k * d * d);
        }
        total.value()
    }

    /// `d rho / d u` at `t`.
    fn rho_prime(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        self.params.c.powi(3) * t * t / (PI * PI * f_sq(t).sqrt())
    }

    /// `dE/d rho` node by node, without the Weizsäcker part.
    fn local_potential(&self, s: &State) -> Vec<f64> {
        let c = self.params.c;
        let q = self.charges(s);
        let phi = hartree_potential(self.grid.nodes(), &q);
        let nodes = self.grid.nodes();
        (0..nodes.len())
            .map(|i| {
                let t = s.t[i];
                let (tf_pot, x_pot) = if t > 0.0 {
                    let root = (1.0 + t * t).sqrt();
                    (c * c * t * t / (1.0 + root), c * x_prime(t) / (8.0 * PI * t * t))
                } else {
                    (0.0, 0.0)
                };
                tf_pot - x_pot - self.params.z / nodes[i] + phi[i]
            })
            .collect()
    }

    /// `(dE/du, dN/du)`.
    pub fn gradient(&self, s: &State) -> (Vec<f64>, Vec<f64>) {
        let pot = self.local_potential(s);
        let k = self.grid.edge_coupling();
        let m = pot.len();
        let mut g = vec![0.0; m];
        let mut dn = vec![0.0; m];
        for i in 0..m {
            dn[i] = self.shell[i] * self.rho_prime(s.t[i]);
            g[i] = dn[i] * pot[i];
        }
        for e in 0..m - 1 {
            let flux = 2.0 * self.weizsacker * k[e] * (s.u[e + 1] - s.u[e]);
            g[e] -= flux;
            g[e + 1] += flux;
        }
        (g, dn)
    }

    /// `d^2 rho / d u^2` at `t`.
    fn rho_second(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let t2 = t * t;
        let q = 1.0 + t2;
        let fsq = f_sq(t);
        let fsq_prime = (1.0 + 2.0 * t2) / (q * q.sqrt()) + 4.0 * t * t.asinh() / (q * q);
        self.params.c.powi(3) / (PI * PI * fsq) * (2.0 * t - t2 * fsq_prime / (2.0 * fsq))
    }

    /// Tridiagonal preconditioner for the Lagrangian `E - lambda N`: the
    /// Weizsäcker Hessian, the Thomas-Fermi and self-interaction curvature,
    /// and the positive part of `(dE/d rho - lambda) d^2 rho/du^2` on the
    /// diagonal. Leaving out the last term makes the preconditioner badly
    /// underestimate the curvature in the tail.
    pub fn preconditioner(&self, s: &State, lambda: f64) -> Tridiagonal {
        let c = self.params.c;
        let pot = self.local_potential(s);
        let nodes = self.grid.nodes();
        let k = self.grid.edge_coupling();
        let m = nodes.len();
        let mut diag: Vec<f64> = (0..m)
            .map(|i| {
                let t = s.t[i];
                if t <= 0.0 {
                    return 0.0;
                }
                let root = (1.0 + t * t).sqrt();
                let tf = self.shell[i] * c.powi(5) * t.powi(3) * (2.0 + root + 1.0 / root)
                    / (PI * PI * f_sq(t) * (1.0 + root).powi(2));
                let dn = self.shell[i] * self.rho_prime(t);
                let bend = (self.shell[i] * self.rho_second(t) * (pot[i] - lambda)).max(0.0);
                tf + dn * dn / nodes[i] + bend
            })
            .collect();
        let mut off = vec![0.0; m - 1];
        for e in 0..m - 1 {
            let a = 2.0 * self.weizsacker * k[e];
            diag[e] += a;
            diag[e + 1] += a;
            off[e] = -a;
        }
        let scale = diag.iter().cloned().fold(0.0, f64::max);
        for d in &mut diag {
            *d += 1e-14 * scale;
        }
        Tridiagonal { diag, off }
    }
}

/// Symmetric tridiagonal matrix.
pub(crate) struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Solves `A x = b` by the Thomas algorithm.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        let mut cp = vec![0.0; m];
        let mut dp = vec![0.0; m];
        cp[0] = if m > 1 { self.off[0] / self.diag[0] } else { 0.0 };
        dp[0] = b[0] / self.diag[0];
        for i in 1..m {
            let denom = self.diag[i] - self.off[i - 1] * cp[i - 1];
            if i + 1 < m {
                cp[i] = self.off[i] / denom;
            }
            dp[i] = (b[i] - self.off[i - 1] * dp[i - 1]) / denom;
        }
        let mut out = dp;
        for i in (0..m - 1).rev() {
            out[i] -= cp[i] * out[i + 1];
        }
        out
    }

    #[cfg(test)]
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let m = self.diag.len();
        (0..m)
            .map(|i| {
                let mut s = self.diag[i] * v[i];
                if i > 0 {
                    s += self.off[i - 1] * v[i - 1];
                }
                if i + 1 < m {
                    s += self.off[i] * v[i + 1];
                }
                s
            })
            .collect()
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
