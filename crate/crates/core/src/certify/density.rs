//! Certificates evaluated on randomized radial densities.
//!
//! Family: `rho = sum_k m_k phi_k(r / l_k)` with one to four components,
//! each an exponential or a Gaussian normalized to mass `m_k`. Masses are
//! log-uniform in `[0.05, 2] Z` and lengths log-uniform in `[0.01, 2]` Bohr.
//! Component choices are drawn from a ChaCha8 stream seeded by the
//! certificate seed, so every run is reproducible.

use super::{density_count, Worst};
use crate::bounds::lower_bound;
use crate::error::Result;
use crate::model::{
    fermi_momentum, gamma_tf, hardy_functional, mass, nonrel_terms, tf_energy, total_energy, exchange_energy,
    weizsacker_energy, ModelParams, RadialDensity, RadialGrid, DEFAULT_LAMBDA,
};
use crate::specfun::ttf;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::Arc;

type Outcome = Result<(String, Worst)>;

/// Nodes of the grids the random densities live on.
const GRID_NODES: usize = 1500;

/// A sampled density and a human-readable recipe.
#[derive(Debug, Clone)]
pub struct RandomDensity {
    pub density: RadialDensity,
    pub description: String,
}

fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..hi.ln())).exp()
}

/// Draws one member of the random density family on `grid`.
pub fn random_density<R: Rng>(rng: &mut R, z: f64, grid: Arc<RadialGrid>) -> Result<RandomDensity> {
    let count = rng.gen_range(1..=4);
    let mut parts = Vec::with_capacity(count);
    for _ in 0..count {
        let gaussian = rng.gen_bool(0.5);
        let m = log_uniform(rng, 0.05, 2.0) * z;
        let l = log_uniform(rng, 0.01, 2.0);
        parts.push((gaussian, m, l));
    }
    let description = parts
        .iter()
        .map(|(g, m, l)| format!("{}(m={m:.4}, l={l:.4})", if *g { "gauss" } else { "exp" }))
        .collect::<Vec<_>>()
        .join(" + ");
    let density = RadialDensity::from_fn(grid, |r| {
        parts
            .iter()
            .map(|&(g, m, l)| {
                if g {
                    m * (-(r * r) / (l * l)).exp() / (PI.powf(1.5) * l.powi(3))
                } else {
                    m * (-r / l).exp() / (8.0 * PI * l.powi(3))
                }
            })
            .sum()
    })?;
    Ok(RandomDensity { density, description })
}

/// Relative margin `(big - small) / max(|big|, |small|)`.
fn rel(big: f64, small: f64) -> f64 {
    let scale = big.abs().max(small.abs());
    if scale == 0.0 {
        0.0
    } else {
        (big - small) / scale
    }
}

struct Sample {
    z: f64,
    params: ModelParams,
    rho: RandomDensity,
}

/// `count` samples with `Z` log-uniform in `[1, 20]` and `c` from `pick_c`.
fn samples<F: FnMut(&mut ChaCha8Rng, usize, f64) -> f64>(count: usize, seed: u64, mut pick_c: F) -> Result<Vec<Sample>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut grids: Vec<(u64, Arc<RadialGrid>)> = Vec::new();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let z = log_uniform(&mut rng, 1.0, 20.0);
        let c = pick_c(&mut rng, i, z);
        let params = ModelParams::new(z, c, DEFAULT_LAMBDA)?;
        let key = z.to_bits();
        let grid = match grids.iter().find(|(k, _)| *k == key) {
            Some((_, g)) => Arc::clone(g),
            None => {
                let g = Arc::new(RadialGrid::for_charge(z, GRID_NODES)?);
                grids.push((key, Arc::clone(&g)));
                g
            }
        };
        let rho = random_density(&mut rng, z, grid)?;
        out.push(Sample { z, params, rho });
    }
    Ok(out)
}

fn label(s: &Sample, i: usize) -> String {
    format!(
        "density #{i}: Z = {:.4}, c = {:.4}, kappa = {:.4}, rho = {}",
        s.z,
        s.params.c,
        s.params.kappa(),
        s.rho.description
    )
}

pub(super) fn hardy_weizsacker(resolution: usize, seed: u64) -> Outcome {
    let count = density_count(resolution);
    let set = samples(count, seed, |rng, _, _| log_uniform(rng, 1.0, 1e3))?;
    let mut w = Worst::new();
    for (i, s) in set.iter().enumerate() {
        let rho = &s.rho.density;
        let c = s.params.c;
        let k = 3f64.powf(5.0 / 3.0) * s.params.lambda * c / (128.0 * PI.powf(2.0 / 3.0));
        let weiz = weizsacker_energy(rho, &s.params)?;
        let hardy = k * hardy_functional(rho, c);
        w.update(rel(weiz, hardy), || label(s, i));
    }
    Ok((
        format!("{count} random densities, Z log-uniform in [1, 20], c log-uniform in [1, 1e3]; margin (W - K H)/W"),
        w,
    ))
}

/// Couplings cycled through in the lower-bound scan.
pub(super) const THEOREM1_KAPPAS: [f64; 3] = [0.1, 1.0, 5.0];

pub(super) fn theorem1(resolution: usize, seed: u64) -> Outcome {
    let count = density_count(resolution);
    let set = samples(count, seed, |_, i, z| {
        let kappa = THEOREM1_KAPPAS[i % THEOREM1_KAPPAS.len()];
        z / (kappa * DEFAULT_LAMBDA.sqrt())
    })?;
    let mut w = Worst::new();
    for (i, s) in set.iter().enumerate() {
        let rho = &s.rho.density;
        let energy = total_energy(rho, &s.params)?.total;
        let bound = lower_bound(&s.params, mass(rho), 1.0, 1.0)?.bound_value;
        let margin = if bound == f64::NEG_INFINITY { 1.0 } else { rel(energy, bound) };
        w.update(margin, || format!("{} (E = {energy:e}, bound = {bound:e})", label(s, i)));
    }
    Ok((
        format!(
            "{count} random densities, Z log-uniform in [1, 20], kappa cycling through {THEOREM1_KAPPAS:?}; margin (E - bound)/max(|E|, |bound|)"
        ),
        w,
    ))
}

/// Speeds of light for the non-relativistic limit, one decade apart.
const NONREL_C: [f64; 4] = [1e3, 1e4, 1e5, 1e6];
/// Deviations below this are at roundoff level.
const NONREL_FLOOR: f64 = 1e-11;

pub(super) fn nonrel_limit(resolution: usize, seed: u64) -> Outcome {
    let count = density_count(resolution);
    let set = samples(count, seed, |_, _, _| 1.0)?;
    let mut w = Worst::new();
    for s in &set {
        let rho = &s.rho.density;
        let nr = nonrel_terms(rho, &s.params);
        let mut devs: [Vec<f64>; 3] = Default::default();
        for &c in &NONREL_C {
            let p = ModelParams::new(s.z, c, s.params.lambda)?;
            let terms = [
                (weizsacker_energy(rho, &p)?, nr.weizsacker),
                (tf_energy(rho, &p), nr.thomas_fermi),
                (exchange_energy(rho, &p), nr.exchange),
            ];
            for (k, (rel_v, nr_v)) in terms.into_iter().enumerate() {
                devs[k].push((rel_v - nr_v).abs() / nr_v.abs());
            }
        }
        for (k, name) in ["W", "TF", "X"].into_iter().enumerate() {
            for j in 0..NONREL_C.len() - 1 {
                let (a, b) = (devs[k][j], devs[k][j + 1]);
                // Each decade in c must shrink the deviation tenfold (the
                // expected rate is a hundredfold), until roundoff is reached.
                let margin = if a < NONREL_FLOOR {
                    (10.0 * NONREL_FLOOR - b) / (10.0 * NONREL_FLOOR)
                } else {
                    (0.1 * a - b) / (0.1 * a)
                };
                w.update(margin, || {
                    format!(
                        "{name} term, c = {:e} -> {:e}: relative deviation {a:e} -> {b:e}; Z = {:.4}, rho = {}",
                        NONREL_C[j],
                        NONREL_C[j + 1],
                        s.z,
                        s.rho.description
                    )
                });
            }
        }
    }
    Ok((
        format!(
            "{count} random densities; W, TF and X at c in {NONREL_C:?} against the non-relativistic terms; deviation must fall tenfold per decade (floor {NONREL_FLOOR:e})"
        ),
        w,
    ))
}

/// Momentum cuts scanned in the split bound.
const SPLIT_S: usize = 25;

pub(super) fn tfl_split(resolution: usize, seed: u64) -> Outcome {
    let count = density_count(resolution);
    let set = samples(count, seed, |rng, _, _| log_uniform(rng, 1.0, 1e3))?;
    let cuts = crate::numerics::log_space(1e-3, 1e3, SPLIT_S);
    let gamma = gamma_tf();
    let mut w = Worst::new();
    for (i, s) in set.iter().enumerate() {
        let rho = &s.rho.density;
        let c = s.params.c;
        let tf = tf_energy(rho, &s.params);
        let grid = rho.grid();
        let shells: Vec<(f64, f64)> = grid
            .nodes()
            .iter()
            .zip(grid.weights())
            .zip(rho.values())
            .map(|((&r, &wt), &v)| (4.0 * PI * wt * r * r, v))
            .collect();
        for &cut in &cuts {
            let (mut low, mut high) = (0.0, 0.0);
            for &(m, v) in &shells {
                if fermi_momentum(v) / c < cut {
                    low += m * v.powf(5.0 / 3.0);
                } else {
                    high += m * v.powf(4.0 / 3.0);
                }
            }
            let t = ttf(cut);
            let bound = 0.3 * (5.0 * t / (4.0 * cut.powi(5))) * gamma * low + 0.375 * (t / cut.powi(4)) * gamma.sqrt() * c * high;
            w.update(rel(tf, bound), || format!("{} at s = {cut:e}", label(s, i)));
        }
    }
    Ok((
        format!(
            "{count} random densities, c log-uniform in [1, 1e3], {SPLIT_S} cuts s log-spaced in [1e-3, 1e3]; margin (TF - split bound)/TF"
        ),
        w,
    ))
}
