//! Named numerical certificates. Each one scans the inputs of a scalar
//! inequality or identity and reports the worst relative margin found.
//!
//! A certificate passes iff its worst margin is at least `-1e-12`. Passing
//! is evidence on the scanned set, not a proof.

mod density;
mod scalar;

pub use density::{random_density, RandomDensity};

use crate::error::{Error, Result};
use serde::Serialize;

/// Default scan resolution.
pub const DEFAULT_RESOLUTION: usize = 10_000;
/// Smallest accepted resolution.
pub const MIN_RESOLUTION: usize = 100;
/// Margins down to this value count as roundoff.
pub const PASS_TOLERANCE: f64 = 1e-12;

/// Label attached to every report.
pub const EVIDENCE: &str = "numerical scan (evidence, not proof)";

/// The localization inequality used for the excess-charge bound quantifies
/// over cut-off functions and densities and is not checked at runtime.
pub const LOCALIZATION_NOTE: &str =
    "the product-rule localization estimate for the Weizsäcker term is verified only through its scalar ingredients (mu, angular_identity)";

/// Outcome of one certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub name: String,
    pub paper_anchor: String,
    pub scan_description: String,
    pub evidence: String,
    pub worst_margin: f64,
    pub worst_location: String,
    pub passed: bool,
}

/// Running minimum of margins with the input that produced it.
pub(crate) struct Worst {
    margin: f64,
    location: String,
}

impl Worst {
    pub fn new() -> Self {
        Self {
            margin: f64::INFINITY,
            location: String::from("none"),
        }
    }

    /// Records `margin`; `location` is only formatted when it becomes the
    /// new minimum. A NaN margin always wins, so it cannot hide.
    pub fn update<L: FnOnce() -> String>(&mut self, margin: f64, location: L) {
        if self.margin.is_nan() {
            return;
        }
        if margin.is_nan() || margin < self.margin {
            self.margin = margin;
            self.location = location();
        }
    }

    #[cfg(test)]
    pub fn margin(&self) -> f64 {
        self.margin
    }
}

pub(crate) struct Spec {
    pub name: &'static str,
    pub anchor: &'static str,
    pub run: fn(usize, u64) -> Result<(String, Worst)>,
}

fn registry() -> [Spec; 13] {
    [
        Spec {
            name: "F_lower",
            anchor: "F(t) >= t sqrt(arsinh t) / 2, used with Hardy's inequality for the Weizsäcker term",
            run: scalar::f_lower,
        },
        Spec {
            name: "ttf_ratios",
            anchor: "T(t)/t^5 decreases from 4/5 to 0 and T(t)/t^4 increases from 0 to 2",
            run: scalar::ttf_ratios,
        },
        Spec {
            name: "f_sq_linear",
            anchor: "f(t)^2 <= mu t with the optimal constant mu",
            run: scalar::f_sq_linear,
        },
        Spec {
            name: "X_cubic",
            anchor: "X(t) <= xi_0 t^3, giving the exchange bound xi c N",
            run: scalar::x_cubic,
        },
        Spec {
            name: "ttf_quartic",
            anchor: "T(t) >= 2 t^4 - (8/3) t^3",
            run: scalar::ttf_quartic,
        },
        Spec {
            name: "a_scaling",
            anchor: "a(f t) <= f^3 a(t) for f in [0, 1], obtained by integrating a''' successively",
            run: scalar::a_scaling,
        },
        Spec {
            name: "a_derivatives",
            anchor: "a, a', a'', a''', a'''' are all positive",
            run: scalar::a_derivatives,
        },
        Spec {
            name: "angular_identity",
            anchor: "int_S (omega . x - alpha)_+ d omega / 4 pi = (|x|/4) [(1 - alpha/|x|)_+]^2",
            run: scalar::angular_identity,
        },
        Spec {
            name: "hardy_weizsacker",
            anchor: "W(rho) >= 3^{5/3} lambda c / (2^7 pi^{2/3}) H(rho)",
            run: density::hardy_weizsacker,
        },
        Spec {
            name: "theorem1",
            anchor: "TFWD(rho) >= -4 s0^5 / (5 T(s0)) e_TF Z^{7/3} - xi c N",
            run: density::theorem1,
        },
        Spec {
            name: "trig_max",
            anchor: "max over [0, pi/2] of (1 - cos^4 - sin^4)^2 / (1 - cos^3 - sin^3) = (2 + sqrt 2)/4",
            run: scalar::trig_max,
        },
        Spec {
            name: "nonrel_limit",
            anchor: "as c -> infinity the integrands tend to the non-relativistic TFWD functional",
            run: density::nonrel_limit,
        },
        Spec {
            name: "tfl_split",
            anchor: "two-regime lower bound on the Thomas-Fermi term at momentum cut s",
            run: density::tfl_split,
        },
    ]
}

/// Registered certificate names, in run order.
pub fn certificate_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name).collect()
}

/// Runs one certificate; deterministic in `(resolution, seed)`.
pub fn run_certificate(name: &str, resolution: usize, seed: u64) -> Result<CertificateReport> {
    let spec = registry()
        .into_iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::Registry(format!("unknown certificate {name:?}; known: {}", certificate_names().join(", "))))?;
    if resolution < MIN_RESOLUTION {
        return Err(Error::Registry(format!(
            "certificate {name}: resolution {resolution} is below the minimum {MIN_RESOLUTION}"
        )));
    }
    let (scan_description, worst) = (spec.run)(resolution, seed)?;
    let worst_margin = worst.margin;
    Ok(CertificateReport {
        name: spec.name.to_string(),
        paper_anchor: spec.anchor.to_string(),
        scan_description,
        evidence: EVIDENCE.to_string(),
        worst_margin,
        worst_location: worst.location,
        passed: worst_margin >= -PASS_TOLERANCE,
    })
}

/// Runs every certificate; failures and errors are reported per entry.
pub fn run_all(resolution: usize, seed: u64) -> Vec<Result<CertificateReport>> {
    certificate_names()
        .into_iter()
        .map(|name| run_certificate(name, resolution, seed))
        .collect()
}

/// Number of random densities used at a given resolution.
pub fn density_count(resolution: usize) -> usize {
    (resolution / 200).max(50)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn worst_tracks_minimum_and_nan() {
        let mut w = Worst::new();
        w.update(0.5, || "a".into());
        w.update(0.7, || "b".into());
        assert_eq!((w.margin(), w.location.as_str()), (0.5, "a"));
        w.update(f64::NAN, || "nan".into());
        assert!(w.margin().is_nan());
        w.update(-1.0, || "c".into());
        assert_eq!(w.location, "nan");
    }

    #[test]
    fn registry_errors() {
        assert!(matches!(run_certificate("nope", 1000, 0), Err(Error::Registry(_))));
        assert!(matches!(run_certificate("trig_max", 99, 0), Err(Error::Registry(_))));
        assert!(run_all(10, 0).iter().all(|r| matches!(r, Err(Error::Registry(_)))));
        assert_eq!(certificate_names().len(), 13);
    }
}
