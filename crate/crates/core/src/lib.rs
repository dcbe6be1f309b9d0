//! Relativistic Thomas-Fermi-Weizsäcker-Dirac (TFWD) atomic energy functional.
//!
//! * [`specfun`]: cancellation-safe scalar functions and extremal constants.
//! * [`model`]: radial grids, densities and every energy term.
//! * [`bounds`]: the Thomas-Fermi type lower bound and the excess-charge bound.
//! * [`solver`]: constrained minimization over radial densities.
//! * [`certify`]: numerical certificates for the scalar inequalities.

pub mod bounds;
pub mod certify;
pub mod error;
pub mod numerics;
pub mod model;
pub mod solver;
pub mod specfun;

pub use error::{Error, Result};
