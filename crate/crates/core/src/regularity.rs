//! Bunching constants, skeleton persistence and Hölder diagnostics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::{skeleton_solve, SKELETON_TOL};
use crate::error::{LisError, Result};
use crate::expr::Expr;
use crate::lis::{BiContactCoeffs, InterpolationSystem};
use crate::models::{FlowModel, Point};
use crate::sampling::{rng, Sampling};

/// Step in synchronized time; exactly representable so dyadic checkpoints are hit.
pub const SYNC_STEP: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BunchingReport {
    pub b_s: f64,
    /// `1 − max_t (1/t)∫_0^t r_s/r_u dτ` per orbit, `t` over dyadic checkpoints.
    pub per_point: Vec<f64>,
    pub starts: Vec<Point>,
    pub t_max: f64,
    pub n_samples: usize,
    pub seed: u64,
}

fn dyadic_checkpoints(t_max: f64) -> Vec<f64> {
    std::iter::successors(Some(1.0), |t| Some(t * 2.0)).take_while(|t| *t <= t_max).collect()
}

/// Largest Birkhoff average of `r_s/r_u` over the checkpoints, along the flow
/// reparametrized so that `r_u ≡ 1`. Each unit of synchronized time is integrated
/// by composite Simpson over 64 steps.
fn max_sync_average(model: &FlowModel, start: &Point, checkpoints: &[f64]) -> f64 {
    let ratio = |p: &Point| {
        let r = model.rates(p);
        r.r_s / r.r_u
    };
    let mut p = *start;
    let mut integral = 0.0;
    let mut tau = 0.0;
    let mut best = f64::NEG_INFINITY;
    let last = *checkpoints.last().unwrap_or(&0.0);
    let mut next_cp = 0;
    while tau < last {
        // One Simpson panel over two substeps.
        let r0 = ratio(&p);
        let mid = model.flow_step(&p, SYNC_STEP / model.rates(&p).r_u);
        let r1 = ratio(&mid);
        let end = model.flow_step(&mid, SYNC_STEP / model.rates(&mid).r_u);
        let r2 = ratio(&end);
        integral += SYNC_STEP / 3.0 * (r0 + 4.0 * r1 + r2);
        tau += 2.0 * SYNC_STEP;
        p = end;
        if tau == checkpoints[next_cp] {
            best = best.max(integral / tau);
            next_cp += 1;
        }
    }
    best
}

/// Monte-Carlo estimate of `B_s = inf_p [1 − sup_t (1/t)∫_0^t r_s]` in synchronized
/// time, over `n_orbits` seeded starts plus the model's distinguished points.
pub fn bunching_estimate(model: &FlowModel, t_max: f64, n_orbits: usize, seed: u64) -> Result<BunchingReport> {
    if !(t_max >= 1.0) || n_orbits == 0 {
        return Err(LisError::InvalidInput(format!("need t_max ≥ 1 and n_orbits ≥ 1, got {t_max}, {n_orbits}")));
    }
    let mut r = rng(seed);
    let d = model.domain();
    let mut starts: Vec<Point> = (0..n_orbits).map(|_| d.random_point(&mut r)).collect();
    starts.extend(model.distinguished_points());
    let cps = dyadic_checkpoints(t_max);
    let per_point: Vec<f64> = starts.par_iter().map(|p| 1.0 - max_sync_average(model, p, &cps)).collect();
    let b_s = per_point.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(BunchingReport { b_s, per_point, starts, t_max, n_samples: n_orbits, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceReport {
    pub eps: f64,
    /// `sup_x |Λ^ε(x) − Λ(x)|` over the base grid.
    pub c0_distance: f64,
    /// `c0_distance / eps`, 0 for `eps = 0`.
    pub ratio: f64,
}

/// `h_s ↦ h_s·e^{eps·perturbation}` for each `eps`, re-solving the skeleton on
/// an `n × n` base grid.
pub fn skeleton_persistence(
    sys: &InterpolationSystem,
    perturbation: &Expr,
    eps_list: &[f64],
    grid: usize,
    sampling: &Sampling,
) -> Result<Vec<PersistenceReport>> {
    if perturbation.depends_on_s() {
        return Err(LisError::InvalidInput("perturbation must be a function on M".into()));
    }
    let base = sys.model.base_grid(grid);
    let solve = |s: &InterpolationSystem| -> Result<Vec<f64>> {
        base.par_iter().map(|x| skeleton_solve(s, x, SKELETON_TOL)).collect()
    };
    let reference = solve(sys)?;
    eps_list
        .iter()
        .map(|&eps| {
            let b = &sys.bicontact;
            let pair = BiContactCoeffs {
                b_minus: b.b_minus.clone() * (Expr::Const(eps) * perturbation.clone()).exp(),
                ..b.clone()
            };
            let perturbed = InterpolationSystem::new(sys.model.clone(), pair, sys.profile.clone(), sys.window)?;
            let report = perturbed.validate(sampling)?;
            if !report.liouville_ok {
                return Err(LisError::InvalidInput(format!(
                    "perturbation with eps = {eps} is not Liouville: density {} at {:?}",
                    report.min_density, report.argmin
                )));
            }
            let moved = solve(&perturbed)?;
            let c0 = reference.iter().zip(&moved).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            Ok(PersistenceReport { eps, c0_distance: c0, ratio: if eps == 0.0 { 0.0 } else { c0 / eps.abs() } })
        })
        .collect()
}

/// Skeleton heights at `n` points of a closed curve `t ↦ curve(t)`, `t ∈ [0, 1)`.
pub fn skeleton_along_curve(sys: &InterpolationSystem, curve: impl Fn(f64) -> Point + Sync, n: usize) -> Result<Vec<f64>> {
    (0..n)
        .into_par_iter()
        .map(|i| skeleton_solve(sys, &curve(i as f64 / n as f64), SKELETON_TOL))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    pub exponent: f64,
    /// The samples are constant to 1e−14; the exponent is reported as 1.
    pub degenerate: bool,
    /// `(δ, max oscillation at δ)` pairs used in the fit.
    pub scales: Vec<(f64, f64)>,
}

/// Fit `osc(δ) ~ δ^a` for samples of a periodic function at `n` uniform points,
/// with `δ` running over dyadic multiples of `min_lag` grid spacings up to `n/8`.
pub fn holder_exponent(values: &[f64], min_lag: usize) -> Result<HolderEstimate> {
    let n = values.len();
    let lags: Vec<usize> =
        std::iter::successors(Some(min_lag.max(1)), |k| Some(k * 2)).take_while(|k| 8 * k <= n).collect();
    if lags.len() < 3 {
        return Err(LisError::InvalidInput(format!(
            "{n} samples give {} dyadic scales from lag {min_lag}; need at least 3",
            lags.len()
        )));
    }
    let osc = |k: usize| (0..n).map(|i| (values[(i + k) % n] - values[i]).abs()).fold(0.0, f64::max);
    let scales: Vec<(f64, f64)> = lags.iter().map(|&k| (k as f64 / n as f64, osc(k))).collect();
    if scales.iter().all(|&(_, o)| o < 1e-14) {
        return Ok(HolderEstimate { exponent: 1.0, degenerate: true, scales });
    }
    let pts: Vec<(f64, f64)> = scales.iter().map(|&(d, o)| (d.ln(), o.max(1e-300).ln())).collect();
    let m = pts.len() as f64;
    let (mx, my) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x / m, b + y / m));
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let slope = sxy / sxx;
    Ok(HolderEstimate { exponent: slope.clamp(f64::MIN_POSITIVE, 1.0), degenerate: false, scales })
}
