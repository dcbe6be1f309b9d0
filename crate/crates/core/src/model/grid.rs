use crate::error::{Error, Result};

/// Default number of radial nodes.
pub const DEFAULT_GRID_SIZE: usize = 2000;
/// Outer radius of the default grid, in Bohr.
pub const DEFAULT_R_MAX: f64 = 50.0;

/// Radial nodes `r_1 < ... < r_M` with trapezoidal weights in `x = ln r`, so
/// that `sum_i w_i g(r_i)` approximates `int g(r) dr`.
///
/// Edge data (`edge_coupling`) holds `sqrt(r_i r_{i+1}) / (x_{i+1} - x_i)`,
/// the coefficient of `(v_{i+1} - v_i)^2` in the discrete form of
/// `int r^2 v'(r)^2 dr`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    edge_coupling: Vec<f64>,
}

impl RadialGrid {
    /// Builds a grid on arbitrary strictly increasing positive nodes.
    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 3 {
            return Err(Error::Grid(format!(
                "need at least 3 nodes, got {}",
                nodes.len()
            )));
        }
        if let Some((i, r)) = nodes.iter().enumerate().find(|(_, r)| !r.is_finite() || **r <= 0.0) {
            return Err(Error::Grid(format!("node {i} is not a positive finite radius: {r}")));
        }
        if let Some(i) = nodes.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Grid(format!(
                "nodes must be strictly increasing (r[{}] = {} >= r[{}] = {})",
                i,
                nodes[i],
                i + 1,
                nodes[i + 1]
            )));
        }
        let logs: Vec<f64> = nodes.iter().map(|r| r.ln()).collect();
        let m = nodes.len();
        let weights = (0..m)
            .map(|i| {
                let left = if i > 0 { logs[i] - logs[i - 1] } else { 0.0 };
                let right = if i + 1 < m { logs[i + 1] - logs[i] } else { 0.0 };
                0.5 * (left + right) * nodes[i]
            })
            .collect();
        let edge_coupling = (0..m - 1)
            .map(|i| (nodes[i] * nodes[i + 1]).sqrt() / (logs[i + 1] - logs[i]))
            .collect();
        Ok(Self {
            nodes,
            weights,
            edge_coupling,
        })
    }

    /// `m` log-spaced nodes from `r_min` to `r_max`.
    pub fn log_spaced(r_min: f64, r_max: f64, m: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_max > r_min && r_max.is_finite()) {
            return Err(Error::Grid(format!("invalid extent [{r_min}, {r_max}]")));
        }
        if m < 3 {
            return Err(Error::Grid(format!("need at least 3 nodes, got {m}")));
        }
        Self::from_nodes(crate::numerics::log_space(r_min, r_max, m))
    }

    /// The default atomic grid: `r_min = 1e-6 / Z`, `r_max = 50` Bohr.
    pub fn for_charge(z: f64, m: usize) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::Grid(format!("nuclear charge must be positive, got {z}")));
        }
        Self::log_spaced(1e-6 / z, DEFAULT_R_MAX, m)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn edge_coupling(&self) -> &[f64] {
        &self.edge_coupling
    }

    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }

    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }

    /// `sum_i w_i g(r_i)`.
    pub fn integrate<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&r, &w)| w * g(r)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_quadrature_on_default_grid() {
        let grid = RadialGrid::for_charge(1.0, DEFAULT_GRID_SIZE).unwrap();
        let v = grid.integrate(|r| (-r).exp());
        let exact = (-grid.r_min()).exp() - (-grid.r_max()).exp();
        assert!((v - exact).abs() < 1e-8, "{v} vs {exact}");
        // The inner tail is 1 - exp(-r_min), well below the tolerance.
        assert!((v - 1.0).abs() < 2e-6);
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(RadialGrid::from_nodes(vec![1.0, 2.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![1.0, 3.0, 2.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![0.0, 1.0, 2.0]).is_err());
        assert!(RadialGrid::from_nodes(vec![1.0, 1.0, 2.0]).is_err());
        assert!(RadialGrid::log_spaced(1.0, 0.5, 10).is_err());
        assert!(RadialGrid::for_charge(-1.0, 10).is_err());
    }

    #[test]
    fn weights_positive() {
        let grid = RadialGrid::from_nodes(vec![0.1, 0.2, 0.5, 1.0, 3.0]).unwrap();
        assert!(grid.weights().iter().all(|&w| w > 0.0));
        assert!(grid.edge_coupling().iter().all(|&k| k > 0.0));
    }
}
