use std::sync::Arc;
use tfwd_core::bounds::lower_bound;
use tfwd_core::model::{total_energy, ModelParams, RadialDensity, RadialGrid, DEFAULT_LAMBDA};
use tfwd_core::solver::{
    energy_curve, excess_charge_estimate, gradient_check, minimize, MassMode, MinimizeOptions,
};

fn opts(m: usize) -> MinimizeOptions {
    MinimizeOptions {
        grid_size: m,
        ..Default::default()
    }
}

#[test]
fn gradient_check_on_three_densities() {
    let grid = Arc::new(RadialGrid::for_charge(2.0, 800).unwrap());
    let params = ModelParams::from_kappa(2.0, 1.0, DEFAULT_LAMBDA).unwrap();
    let densities = [
        RadialDensity::exponential(grid.clone(), 2.0, 4.0).unwrap(),
        RadialDensity::from_fn(grid.clone(), |r| 3.0 * (-r * r).exp() + 0.1 * (-r).exp()).unwrap(),
        RadialDensity::from_fn(grid, |r| 50.0 * (-8.0 * r).exp() + (-0.5 * r).exp()).unwrap(),
    ];
    for (i, rho) in densities.iter().enumerate() {
        let chk = gradient_check(&params, rho, 5, i as u64).unwrap();
        assert!(chk.max_rel_error < 1e-6, "density {i}: {chk:?}");
    }
}

#[test]
fn hydrogen_small_kappa_window() {
    let params = ModelParams::new(1.0, 1e4, DEFAULT_LAMBDA).unwrap();
    let r = minimize(&params, 1.0, &opts(1000)).unwrap();
    assert!(r.converged, "{}", r.stop_reason);
    let lb = lower_bound(&params, 1.0, 1.0, 1.0).unwrap().bound_value;
    assert!(r.energy() < -0.5 * 0.7, "{}", r.energy());
    assert!(r.energy() > lb, "{} vs bound {lb}", r.energy());
    // The hydrogenic trial energy is the seed; descent must not end above it.
    assert!(r.energy() <= r.seed_energy());
}

#[test]
fn grid_refinement_changes_energy_little() {
    let params = ModelParams::from_kappa(2.0, 1.0, DEFAULT_LAMBDA).unwrap();
    let coarse = minimize(&params, 2.0, &opts(1000)).unwrap();
    let fine = minimize(&params, 2.0, &opts(2000)).unwrap();
    assert!(coarse.converged && fine.converged);
    let rel = (fine.energy() - coarse.energy()).abs() / fine.energy().abs();
    assert!(rel <= 1e-3, "{rel}");
}

#[test]
fn descent_mass_and_sandwich() {
    for (z, kappa) in [(1.0, 0.5), (3.0, 1.0), (2.0, 3.0)] {
        let params = ModelParams::from_kappa(z, kappa, DEFAULT_LAMBDA).unwrap();
        let r = minimize(&params, z, &opts(800)).unwrap();
        assert!(r.energy_history.windows(2).all(|w| w[1] < w[0]));
        assert!((r.achieved_mass - z).abs() <= 1e-8);
        let lb = lower_bound(&params, z, 1.0, 1.0).unwrap().bound_value;
        assert!(lb <= r.energy() && r.energy() <= r.seed_energy());
        let again = total_energy(&r.density, &params).unwrap();
        assert_eq!(again, r.breakdown);
    }
}

#[test]
fn at_most_curve_is_nonincreasing() {
    let params = ModelParams::from_kappa(1.0, 1.0, DEFAULT_LAMBDA).unwrap();
    let o = MinimizeOptions {
        mass_mode: MassMode::AtMost,
        ..opts(800)
    };
    let ns = [0.5, 1.0, 1.2, 1.4, 1.6];
    let curve = energy_curve(&params, &ns, &o).unwrap();
    for w in curve.windows(2) {
        assert!(w[1].result.energy() <= w[0].result.energy() + 1e-8);
    }
    for p in &curve {
        assert!(p.result.achieved_mass <= p.n + 1e-8);
    }
    // Past saturation the extra charge is not bound.
    assert!(curve.last().unwrap().result.achieved_mass < 1.6 - 0.1);
}

#[test]
fn excess_estimate_is_stable_and_below_rhs() {
    let params = ModelParams::from_kappa(1.0, 1.0, DEFAULT_LAMBDA).unwrap();
    let a = excess_charge_estimate(&params, &opts(1000), 1e-6).unwrap();
    let b = excess_charge_estimate(&params, &opts(1000), 5e-7).unwrap();
    assert!(a.n_c <= a.rhs.rhs);
    assert!(a.n_c >= params.z);
    assert!((a.n_c - b.n_c).abs() < a.delta + 1e-12, "{} vs {}", a.n_c, b.n_c);
    assert!(excess_charge_estimate(&params, &opts(1000), 0.0).is_err());
}

#[test]
fn neutral_energy_scales_like_z_seven_thirds() {
    let mut scaled = Vec::new();
    for z in [1.0f64, 2.0, 5.0, 10.0] {
        let params = ModelParams::from_kappa(z, 1.0, DEFAULT_LAMBDA).unwrap();
        let r = minimize(&params, z, &opts(1000)).unwrap();
        scaled.push(r.energy() / z.powf(7.0 / 3.0));
    }
    let hi = scaled.iter().cloned().fold(f64::MIN, f64::max);
    let lo = scaled.iter().cloned().fold(f64::MAX, f64::min);
    assert!(hi < 0.0 && lo / hi < 1.2, "{scaled:?}");
}
