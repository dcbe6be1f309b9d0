//! Acceptance checks, one pass/fail line per criterion. Runs without the
//! test harness so the lines always appear in the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use tfwd_core::bounds::{
    bound_coefficient, excess_rhs, lower_bound, s0_residual, solve_s0, tf_energy_direct, tf_energy_shooting,
    TfMinimizeOptions,
};
use tfwd_core::certify::{random_density, run_all, DEFAULT_RESOLUTION};
use tfwd_core::model::{
    gamma_tf, mass, nonrel_energy, total_energy, ModelParams, RadialDensity, RadialGrid, DEFAULT_LAMBDA,
};
use tfwd_core::numerics::log_space;
use tfwd_core::solver::{excess_charge_estimate, gradient_check, MinimizeOptions};
use tfwd_core::specfun::{compute_mu, compute_trig_max, compute_xi, ttf};

type Verdict = Result<String, String>;

fn check(ok: bool, detail: String) -> Verdict {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn extremal_constants() -> Verdict {
    let mu = compute_mu();
    let (xi0, xi) = compute_xi(3.0).map_err(|e| e.to_string())?;
    let trig = compute_trig_max().value;
    let arg = mu.argmax.unwrap_or(f64::NAN);
    let trig_dev = (trig - (2.0 + 2f64.sqrt()) / 4.0).abs();
    check(
        (mu.value - 1.66).abs() <= 0.01
            && (arg - 1.45).abs() <= 0.05
            && (xi0.value - 1.15).abs() <= 0.01
            && (xi - 0.0914).abs() <= 0.001
            && trig_dev <= 1e-9,
        format!(
            "mu = {:.6} at t = {arg:.4}, xi_0 = {:.6}, xi = {xi:.6}, trig max deviation {trig_dev:.1e}",
            mu.value, xi0.value
        ),
    )
}

fn limit_values() -> Verdict {
    let small = ttf(1e-4) / 1e-4f64.powi(5);
    let large = ttf(1e4) / 1e4f64.powi(4);
    check(
        (small - 0.8).abs() <= 1e-6 && (large - 2.0).abs() <= 1e-3,
        format!("T(1e-4)/t^5 - 4/5 = {:.2e}, T(1e4)/t^4 - 2 = {:.2e}", small - 0.8, large - 2.0),
    )
}

fn s0_solver() -> Verdict {
    let kappas = log_space(1e-3, 1e2, 200);
    let mut worst = 0.0f64;
    let mut prev = f64::NEG_INFINITY;
    let mut increasing = true;
    for &k in &kappas {
        let s = solve_s0(k, 1.0).map_err(|e| e.to_string())?;
        // Recompute from s0 where it is representable; beyond kappa ~ 57 it
        // overflows and the solver's own residual in arsinh(s0) is used.
        let r = if s.s0.is_finite() { s0_residual(s.s0, k, 1.0) } else { s.residual };
        worst = worst.max(r.abs());
        increasing &= s.asinh_s0 > prev;
        prev = s.asinh_s0;
    }
    let (coef, _) = bound_coefficient(&solve_s0(1e-3, 1.0).map_err(|e| e.to_string())?);
    check(
        worst <= 1e-12 && increasing && (coef - 1.0).abs() <= 1e-3,
        format!(
            "{} kappa values in [1e-3, 1e2]: max |residual| {worst:.1e}, strictly increasing {increasing}, coefficient(1e-3) - 1 = {:.2e}",
            kappas.len(),
            coef - 1.0
        ),
    )
}

fn tf_hydrogen() -> Verdict {
    let g = gamma_tf();
    let shoot = tf_energy_shooting(1.0, g).map_err(|e| e.to_string())?;
    let direct = |z: f64| tf_energy_direct(z, g, TfMinimizeOptions::default()).map(|r| r.0);
    let e1 = direct(1.0).map_err(|e| e.to_string())?;
    let agree = (e1 - shoot).abs() / shoot.abs();
    let mut scaling = 0.0f64;
    for z in [2.0, 4.0] {
        let ez = direct(z).map_err(|e| e.to_string())?;
        scaling = scaling.max((ez / (e1 * z.powf(7.0 / 3.0)) - 1.0).abs());
    }
    check(
        agree <= 1e-3 && scaling <= 1e-3,
        format!("shooting {shoot:.6}, direct {e1:.6}, relative gap {agree:.1e}; Z^(7/3) deviation over Z = 2, 4: {scaling:.1e}"),
    )
}

fn lower_bound_property() -> Verdict {
    let kappas = [0.1, 1.0, 5.0];
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let mut violations = 0;
    let mut tightest = f64::INFINITY;
    for i in 0..50 {
        let z = [1.0, 2.0, 5.0, 10.0, 20.0][i % 5];
        let params = ModelParams::from_kappa(z, kappas[i % 3], DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
        let grid = Arc::new(RadialGrid::for_charge(z, 1500).map_err(|e| e.to_string())?);
        let rho = random_density(&mut rng, z, grid).map_err(|e| e.to_string())?.density;
        let e = total_energy(&rho, &params).map_err(|e| e.to_string())?.total;
        let b = lower_bound(&params, mass(&rho), 1.0, 1.0).map_err(|e| e.to_string())?.bound_value;
        if e < b {
            violations += 1;
        }
        tightest = tightest.min((e - b) / e.abs().max(b.abs()));
    }
    check(
        violations == 0,
        format!("50 densities, kappa in {kappas:?}: {violations} violations, tightest relative margin {tightest:.3}"),
    )
}

fn certificate_suite() -> Verdict {
    let reports: Vec<_> = run_all(DEFAULT_RESOLUTION, 0).into_iter().collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed).map(|r| r.name.as_str()).collect();
    let margin = |n: &str| reports.iter().find(|r| r.name == n).map_or(f64::NAN, |r| r.worst_margin);
    let (angular, hardy, split) = (margin("angular_identity"), margin("hardy_weizsacker"), margin("tfl_split"));
    check(
        reports.len() == 13 && failed.is_empty() && angular >= 0.0 && hardy >= 0.0 && split >= 0.0,
        format!(
            "{} of {} passed {failed:?}; angular margin {angular:.3} (>= 0 means deviation <= 1e-8), hardy {hardy:.3}, tfl_split {split:.2e}",
            reports.len() - failed.len(),
            reports.len()
        ),
    )
}

fn nonrel_limit() -> Verdict {
    let grid = Arc::new(RadialGrid::for_charge(1.0, 2000).map_err(|e| e.to_string())?);
    // Smooth: a Gaussian core plus a Gaussian shell, total mass 2.
    let rho = RadialDensity::from_fn(grid, |r: f64| {
        let pi = std::f64::consts::PI;
        (-r * r).exp() / pi.powf(1.5) + (-(r * r) / 4.0).exp() / (8.0 * pi.powf(1.5))
    })
    .map_err(|e| e.to_string())?;
    let mut gaps = Vec::new();
    for c in [100.0, 200.0, 400.0] {
        let p = ModelParams::new(2.0, c, DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
        let e = total_energy(&rho, &p).map_err(|e| e.to_string())?.total;
        gaps.push((e - nonrel_energy(&rho, &p)).abs());
    }
    let (r1, r2) = (gaps[0] / gaps[1], gaps[1] / gaps[2]);
    check(
        r1 >= 3.0 && r2 >= 3.0,
        format!("|E_c - E_nr| at c = 100, 200, 400: {:.3e}, {:.3e}, {:.3e}; ratios {r1:.2}, {r2:.2}", gaps[0], gaps[1], gaps[2]),
    )
}

fn excess_charge() -> Verdict {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut worst_grad = 0.0f64;
    for z in [1.0, 2.0, 5.0, 10.0] {
        let params = ModelParams::from_kappa(z, 1.0, DEFAULT_LAMBDA).map_err(|e| e.to_string())?;
        let est = excess_charge_estimate(&params, &MinimizeOptions::default(), 1e-6).map_err(|e| e.to_string())?;
        let mut converged = 0;
        for point in est.curve.iter().filter(|p| p.result.converged) {
            converged += 1;
            let rhs = excess_rhs(&point.result.density, &params).map_err(|e| e.to_string())?.rhs;
            ok &= point.result.achieved_mass <= rhs;
        }
        ok &= converged > 0;
        let neutral = &est.curve[0].result.density;
        let g = gradient_check(&params, neutral, 5, 7).map_err(|e| e.to_string())?;
        worst_grad = worst_grad.max(g.max_rel_error);
        lines.push(format!(
            "Z = {z}: N_c = {:.2}, bound mass {:.4} <= rhs {:.3}, {converged}/{} converged",
            est.n_c,
            est.bound_mass,
            est.rhs.rhs,
            est.curve.len()
        ));
    }
    ok &= worst_grad <= 1e-6;
    check(ok, format!("{}; gradient check max error {worst_grad:.1e}", lines.join("; ")))
}

fn reproducible_reports() -> Verdict {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut same = Vec::new();
    for (name, text) in [
        ("certify.cfg", "command = certify\nresolution = 2000\nseed = 11\n"),
        ("bound.cfg", "command = bound\nZ = 10\nkappa = 1\nN = 10\n"),
    ] {
        let cfg = dir.path().join(name);
        std::fs::write(&cfg, text).map_err(|e| e.to_string())?;
        let run = || -> Result<Vec<u8>, String> {
            let out = Command::new(env!("CARGO_BIN_EXE_tfwd"))
                .arg("--config")
                .arg(Path::new(&cfg))
                .output()
                .map_err(|e| e.to_string())?;
            if out.status.code() != Some(0) {
                return Err(format!("{name}: exit {:?}", out.status.code()));
            }
            Ok(out.stdout)
        };
        let (a, b) = (run()?, run()?);
        same.push((name, a == b, a.len()));
    }
    check(
        same.iter().all(|s| s.1),
        same.iter().map(|(n, eq, len)| format!("{n}: identical {eq} ({len} bytes)")).collect::<Vec<_>>().join(", "),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 9] = [
        ("extremal constants", extremal_constants),
        ("limit values", limit_values),
        ("s0 solver", s0_solver),
        ("TF hydrogen oracle", tf_hydrogen),
        ("lower-bound property suite", lower_bound_property),
        ("certificate suite", certificate_suite),
        ("non-relativistic limit", nonrel_limit),
        ("excess-charge experiment", excess_charge),
        ("reproducible reports", reproducible_reports),
    ];
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}
