//! Radial densities and the terms of the TFWD energy functional.
//!
//! Densities are spherically symmetric and sampled on a [`RadialGrid`]. All
//! integrals over `R^3` reduce to `4 pi int r^2 (...) dr`.

mod energy;
mod grid;
pub mod io;

pub use energy::{
    exchange_energy, external_energy, hartree_energy, hartree_potential, hardy_functional, lp43,
    mass, nonrel_energy, nonrel_terms, tf_energy, tg, total_energy, total_energy_at,
    weizsacker_energy, EnergyBreakdown, NonrelTerms,
};
pub use grid::{RadialGrid, DEFAULT_GRID_SIZE, DEFAULT_R_MAX};
pub(crate) use energy::weizsacker_prefactor;

use crate::error::{Error, Result};
use serde::Serialize;
use std::f64::consts::PI;
use std::sync::Arc;

/// Weizsäcker coefficient from the gradient expansion.
pub const DEFAULT_LAMBDA: f64 = 1.0 / 9.0;
/// Speed of light in Hartree units.
pub const DEFAULT_C: f64 = 137.036;

/// `(3 pi^2)^{2/3}`, the Thomas-Fermi constant.
pub fn gamma_tf() -> f64 {
    (3.0 * PI * PI).powf(2.0 / 3.0)
}

/// Physical parameters: nuclear charge `z`, speed of light `c` and the
/// Weizsäcker coefficient `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    pub z: f64,
    pub c: f64,
    pub lambda: f64,
}

impl ModelParams {
    pub fn new(z: f64, c: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("Z", z), ("c", c), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(
                    "ModelParams",
                    format!("{name} must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(Self { z, c, lambda })
    }

    /// Parameters with `c` chosen so that `Z / (c sqrt(lambda)) = kappa`.
    pub fn from_kappa(z: f64, kappa: f64, lambda: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::domain("ModelParams", format!("kappa must be positive, got {kappa}")));
        }
        Self::new(z, z / (kappa * lambda.sqrt()), lambda)
    }

    /// The coupling `kappa = Z / (c sqrt(lambda))`.
    pub fn kappa(&self) -> f64 {
        self.z / (self.c * self.lambda.sqrt())
    }
}

/// Fermi momentum `p = (3 pi^2 rho)^{1/3}`.
#[inline]
pub fn fermi_momentum(rho: f64) -> f64 {
    (3.0 * PI * PI * rho).cbrt()
}

/// Density from Fermi momentum, `rho = p^3 / (3 pi^2)`.
#[inline]
pub fn density_from_momentum(p: f64) -> f64 {
    p * p * p / (3.0 * PI * PI)
}

/// A nonnegative radial density `rho(r_i)` on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
}

impl RadialDensity {
    pub fn new(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Density(format!(
                "{} values for a grid of {} nodes",
                values.len(),
                grid.len()
            )));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0) {
            return Err(Error::Density(format!(
                "value at node {i} (r = {}) is not a finite nonnegative number: {v}",
                grid.nodes()[i]
            )));
        }
        Ok(Self { grid, values })
    }

    /// Samples `profile` on every node.
    pub fn from_fn<P: Fn(f64) -> f64>(grid: Arc<RadialGrid>, profile: P) -> Result<Self> {
        let values = grid.nodes().iter().map(|&r| profile(r)).collect();
        Self::new(grid, values)
    }

    pub fn zero(grid: Arc<RadialGrid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// `rho(r) = (N alpha^3 / 8 pi) exp(-alpha r)`, mass `N`.
    pub fn exponential(grid: Arc<RadialGrid>, n: f64, alpha: f64) -> Result<Self> {
        let amp = n * alpha.powi(3) / (8.0 * PI);
        Self::from_fn(grid, |r| amp * (-alpha * r).exp())
    }

    /// Hydrogenic seed `rho(r) = (N Z^3 / pi) exp(-2 Z r)`.
    pub fn hydrogenic(grid: Arc<RadialGrid>, n: f64, z: f64) -> Result<Self> {
        Self::exponential(grid, n, 2.0 * z)
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn shared_grid(&self) -> Arc<RadialGrid> {
        Arc::clone(&self.grid)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// The same density multiplied by `factor >= 0`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.shared_grid(), self.values.iter().map(|v| v * factor).collect())
    }

    /// Shell charges `q_i = 4 pi w_i r_i^2 rho_i`.
    pub fn shell_charges(&self) -> Vec<f64> {
        self.grid
            .nodes()
            .iter()
            .zip(self.grid.weights())
            .zip(&self.values)
            .map(|((&r, &w), &rho)| 4.0 * PI * w * r * r * rho)
            .collect()
    }
}
