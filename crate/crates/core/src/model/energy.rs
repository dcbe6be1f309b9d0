use super::{fermi_momentum, gamma_tf, ModelParams, RadialDensity};
use crate::error::{Error, Result};
use crate::specfun::{big_f, ttf, x};
use serde::Serialize;
use std::f64::consts::PI;

/// Relative size of the extrapolated outer tail above which a truncation
/// warning is attached to the breakdown.
const TAIL_WARN: f64 = 1e-8;

/// Every term of the functional for one density.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyBreakdown {
    pub weizsacker: f64,
    pub thomas_fermi: f64,
    pub exchange: f64,
    pub external: f64,
    pub hartree: f64,
    /// `W + TF - X + external + hartree`
    pub total: f64,
    /// `H(rho) = int rho^{2/3} arsinh(p/c) / |x|^2`
    pub diag_hardy: f64,
    /// `T_g(rho)` at `diag_tg_threshold`
    pub diag_tg: f64,
    pub diag_tg_threshold: f64,
    /// `int rho^{4/3}`
    pub diag_l43: f64,
    pub mass: f64,
    pub warnings: Vec<String>,
}

/// Discrete `sum_e k_e (v_{e+1} - v_e)^2`, approximating `int r^2 v'(r)^2 dr`.
pub(crate) fn dirichlet_form(coupling: &[f64], v: &[f64]) -> f64 {
    coupling
        .iter()
        .zip(v.windows(2))
        .map(|(k, pair)| {
            let d = pair[1] - pair[0];
            k * d * d
        })
        .sum()
}

/// `u_i = F(p_i / c)`.
pub(crate) fn substituted_profile(rho: &RadialDensity, c: f64) -> Vec<f64> {
    rho.values()
        .iter()
        .map(|&v| big_f(fermi_momentum(v) / c))
        .collect()
}

/// Prefactor of the discrete Dirichlet form in `W`: `(3 lambda c^3 / 8 pi^2) 4 pi`.
pub(crate) fn weizsacker_prefactor(params: &ModelParams) -> f64 {
    3.0 * params.lambda * params.c.powi(3) / (2.0 * PI)
}

fn local_integral<G: Fn(f64, f64) -> f64>(rho: &RadialDensity, g: G) -> f64 {
    let grid = rho.grid();
    grid.nodes()
        .iter()
        .zip(grid.weights())
        .zip(rho.values())
        .map(|((&r, &w), &v)| 4.0 * PI * w * r * r * g(r, v))
        .sum()
}

/// `W(rho) = (3 lambda c^3 / 8 pi^2) int |grad F(p/c)|^2`, with the gradient
/// taken of `u = F(p/c)` on the edges of the grid.
pub fn weizsacker_energy(rho: &RadialDensity, params: &ModelParams) -> Result<f64> {
    if rho.grid().len() < 3 {
        return Err(Error::Grid("Weizsäcker term needs at least 3 nodes".into()));
    }
    let u = substituted_profile(rho, params.c);
    Ok(weizsacker_prefactor(params) * dirichlet_form(rho.grid().edge_coupling(), &u))
}

/// `TF(rho) = int c^5/(8 pi^2) T^TF(p/c)`.
pub fn tf_energy(rho: &RadialDensity, params: &ModelParams) -> f64 {
    let c = params.c;
    let pre = c.powi(5) / (8.0 * PI * PI);
    pre * local_integral(rho, |_, v| ttf(fermi_momentum(v) / c))
}

/// `X(rho) = int c^4/(8 pi^3) X(p/c)`.
pub fn exchange_energy(rho: &RadialDensity, params: &ModelParams) -> f64 {
    let c = params.c;
    let pre = c.powi(4) / (8.0 * PI.powi(3));
    pre * local_integral(rho, |_, v| x(fermi_momentum(v) / c))
}

/// `-Z int rho / |x|`.
pub fn external_energy(rho: &RadialDensity, params: &ModelParams) -> f64 {
    -params.z * local_integral(rho, |r, v| v / r)
}

/// Potential `Phi_i = sum_j q_j / max(r_i, r_j)` of the shell charges `q`.
pub fn hartree_potential(nodes: &[f64], charges: &[f64]) -> Vec<f64> {
    let m = nodes.len();
    let mut outer = vec![0.0; m];
    let mut acc = 0.0;
    for i in (0..m).rev() {
        outer[i] = acc;
        acc += charges[i] / nodes[i];
    }
    let mut inner = 0.0;
    (0..m)
        .map(|i| {
            inner += charges[i];
            inner / nodes[i] + outer[i]
        })
        .collect()
}

/// Coulomb self-energy `D[rho] = (1/2) sum_ij q_i q_j / max(r_i, r_j)`.
pub fn hartree_energy(rho: &RadialDensity) -> f64 {
    let q = rho.shell_charges();
    let phi = hartree_potential(rho.grid().nodes(), &q);
    0.5 * q.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>()
}

pub fn mass(rho: &RadialDensity) -> f64 {
    rho.shell_charges().iter().sum()
}

/// `int rho^{4/3}`.
pub fn lp43(rho: &RadialDensity) -> f64 {
    local_integral(rho, |_, v| v.powf(4.0 / 3.0))
}

/// `T_g(rho) = int_{p/c > s} rho^{4/3}`.
pub fn tg(rho: &RadialDensity, s: f64, c: f64) -> f64 {
    local_integral(rho, |_, v| {
        if fermi_momentum(v) / c > s {
            v.powf(4.0 / 3.0)
        } else {
            0.0
        }
    })
}

/// `H(rho) = int rho^{2/3} arsinh(p/c) / |x|^2`.
pub fn hardy_functional(rho: &RadialDensity, c: f64) -> f64 {
    let grid = rho.grid();
    grid.weights()
        .iter()
        .zip(rho.values())
        .map(|(&w, &v)| 4.0 * PI * w * v.powf(2.0 / 3.0) * (fermi_momentum(v) / c).asinh())
        .sum()
}

/// Estimated mass beyond `r_max`, extrapolating `r^2 rho` exponentially from
/// the last two nodes. A flat or growing tail (as produced by the natural
/// boundary condition of a minimizer) is instead continued as constant out to
/// `2 r_max`.
fn outer_tail_mass(rho: &RadialDensity) -> f64 {
    let nodes = rho.grid().nodes();
    let vals = rho.values();
    let m = nodes.len();
    let g1 = nodes[m - 2].powi(2) * vals[m - 2];
    let g2 = nodes[m - 1].powi(2) * vals[m - 1];
    if g2 == 0.0 {
        return 0.0;
    }
    if g1 <= g2 {
        return 4.0 * PI * g2 * nodes[m - 1];
    }
    let decay = (g1 / g2).ln() / (nodes[m - 1] - nodes[m - 2]);
    4.0 * PI * g2 / decay
}

fn domain_check(terms: [(&str, f64); 3]) -> Result<()> {
    for (name, v) in terms {
        if !v.is_finite() {
            return Err(Error::Density(format!(
                "density is outside the functional's domain: {name} is not finite"
            )));
        }
    }
    Ok(())
}

/// All terms and diagnostics, with `T_g` at threshold `s = 1`.
pub fn total_energy(rho: &RadialDensity, params: &ModelParams) -> Result<EnergyBreakdown> {
    total_energy_at(rho, params, 1.0)
}

/// All terms and diagnostics, with `T_g` evaluated at threshold `s`.
pub fn total_energy_at(rho: &RadialDensity, params: &ModelParams, s: f64) -> Result<EnergyBreakdown> {
    let weizsacker = weizsacker_energy(rho, params)?;
    let diag_l43 = lp43(rho);
    let hartree = hartree_energy(rho);
    domain_check([
        ("int rho^{4/3}", diag_l43),
        ("D[rho]", hartree),
        ("Weizsäcker Dirichlet integral", weizsacker),
    ])?;
    let thomas_fermi = tf_energy(rho, params);
    let exchange = exchange_energy(rho, params);
    let external = external_energy(rho, params);
    let total = weizsacker + thomas_fermi - exchange + external + hartree;
    let m = mass(rho);

    let mut warnings = Vec::new();
    let tail = outer_tail_mass(rho);
    if m > 0.0 && tail > TAIL_WARN * m {
        warnings.push(format!(
            "outer tail beyond r_max = {} carries an estimated {:.3e} of the mass (relative {:.3e})",
            rho.grid().r_max(),
            tail,
            tail / m
        ));
    }

    Ok(EnergyBreakdown {
        weizsacker,
        thomas_fermi,
        exchange,
        external,
        hartree,
        total,
        diag_hardy: hardy_functional(rho, params.c),
        diag_tg: tg(rho, s, params.c),
        diag_tg_threshold: s,
        diag_l43,
        mass: m,
        warnings,
    })
}

/// Terms of the non-relativistic TFWD functional.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonrelTerms {
    pub weizsacker: f64,
    pub thomas_fermi: f64,
    pub exchange: f64,
    pub external: f64,
    pub hartree: f64,
    pub total: f64,
}

pub fn nonrel_terms(rho: &RadialDensity, params: &ModelParams) -> NonrelTerms {
    let sqrt_rho: Vec<f64> = rho.values().iter().map(|v| v.sqrt()).collect();
    let weizsacker =
        0.5 * params.lambda * 4.0 * PI * dirichlet_form(rho.grid().edge_coupling(), &sqrt_rho);
    let thomas_fermi = 0.3 * gamma_tf() * local_integral(rho, |_, v| v.powf(5.0 / 3.0));
    let exchange = 0.75 * (3.0 / PI).cbrt() * lp43(rho);
    let external = external_energy(rho, params);
    let hartree = hartree_energy(rho);
    NonrelTerms {
        weizsacker,
        thomas_fermi,
        exchange,
        external,
        hartree,
        total: weizsacker + thomas_fermi - exchange + external + hartree,
    }
}

/// Non-relativistic TFWD energy of the same density.
pub fn nonrel_energy(rho: &RadialDensity, params: &ModelParams) -> f64 {
    nonrel_terms(rho, params).total
}
