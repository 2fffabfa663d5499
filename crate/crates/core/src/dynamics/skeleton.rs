use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::field::liouville_field;
use crate::error::{LisError, Result};
use crate::lis::{Gauge, InterpolationSystem, ProfileKind};
use crate::models::Point;

pub const SKELETON_TOL: f64 = 1e-12;
pub const SKELETON_MAX_ITERS: usize = 200;
const FD_STEP: f64 = 1e-5;

/// Bisection for the root of the `α_s`-coefficient `F(·, x)`, which is strictly
/// decreasing in `s`. The bracket grows geometrically from `s = 0`, clipped to the window.
/// The final midpoint gets one Newton correction inside the bracket.
pub fn skeleton_solve(sys: &InterpolationSystem, x: &Point, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(LisError::InvalidInput(format!("tolerance must be positive, got {tol}")));
    }
    let (wa, wb) = sys.window;
    let coeff = |s: f64| -> Result<f64> { Ok(sys.alpha_coeffs(s, x)?.f.value) };
    let centre = 0.0f64.clamp(wa, wb);
    let f0 = coeff(centre)?;
    if f0 == 0.0 {
        return Ok(centre);
    }
    let (mut lo, mut hi) = (centre, centre);
    let mut step = 0.5;
    loop {
        if f0 > 0.0 {
            lo = hi;
            hi = (hi + step).min(wb);
            if coeff(hi)? <= 0.0 {
                break;
            }
            if hi == wb {
                return Err(LisError::Bracket { lo: wa, hi: wb, x: *x });
            }
        } else {
            hi = lo;
            lo = (lo - step).max(wa);
            if coeff(lo)? >= 0.0 {
                break;
            }
            if lo == wa {
                return Err(LisError::Bracket { lo: wa, hi: wb, x: *x });
            }
        }
        step *= 2.0;
    }
    for _ in 0..SKELETON_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            // One Newton step from the midpoint, kept only if it stays in the bracket.
            let j = sys.alpha_coeffs(mid, x)?.f;
            let polished = mid - j.value / j.d_s;
            return Ok(if polished >= lo && polished <= hi { polished } else { mid });
        }
        if coeff(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(LisError::NoConvergence { iters: SKELETON_MAX_ITERS, residual: hi - lo })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SkeletonSample {
    pub x: Point,
    pub s: f64,
    /// `|F(s, x)|` at the returned root.
    pub residual: f64,
    /// `∂_s(g/f)` at the root.
    pub normal_expansion: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkeletonGraph {
    pub grid: usize,
    /// Ordered as the model's base grid.
    pub samples: Vec<SkeletonSample>,
}

impl SkeletonGraph {
    pub fn max_residual(&self) -> f64 {
        self.samples.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    pub fn min_normal_expansion(&self) -> f64 {
        self.samples.iter().map(|p| p.normal_expansion).fold(f64::INFINITY, f64::min)
    }
}

pub fn skeleton_graph(sys: &InterpolationSystem, grid: usize, tol: f64) -> Result<SkeletonGraph> {
    let samples = sys
        .model
        .base_grid(grid)
        .par_iter()
        .map(|x| {
            let s = skeleton_solve(sys, x, tol)?;
            Ok(SkeletonSample {
                x: *x,
                s,
                residual: sys.alpha_coeffs(s, x)?.f.value.abs(),
                normal_expansion: liouville_field(sys, s, x)?.d_s_g_over_f,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SkeletonGraph { grid, samples })
}

/// `∂_s(g/f)` at the skeleton over `x`.
pub fn normal_expansion(sys: &InterpolationSystem, x: &Point) -> Result<f64> {
    let s = skeleton_solve(sys, x, SKELETON_TOL)?;
    Ok(liouville_field(sys, s, x)?.d_s_g_over_f)
}

/// Central difference of `g/f` across the skeleton.
pub fn normal_expansion_fd(sys: &InterpolationSystem, x: &Point) -> Result<f64> {
    let s = skeleton_solve(sys, x, SKELETON_TOL)?;
    let up = liouville_field(sys, s + FD_STEP, x)?.g_over_f;
    let down = liouville_field(sys, s - FD_STEP, x)?.g_over_f;
    Ok((up - down) / (2.0 * FD_STEP))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncReport {
    pub skeleton_s: f64,
    pub f_at_skeleton: f64,
    /// Expansion rate of `E^u` measured by `α` along the skeleton.
    pub rtilde_u: f64,
    pub inv_rtilde: f64,
    /// `r_u + X·ln[(h_u/h_s + 1)√h_s]`, available for the symmetric exponential gauge.
    pub rtilde_u_closed_form: Option<f64>,
}

impl SyncReport {
    pub fn product(&self) -> f64 {
        self.f_at_skeleton * self.rtilde_u
    }
}

/// `Y|_Λ = fX` is a synchronization iff `f·r̃_u = 1`, where along the section
/// `α|_Λ = E α_u` and `r̃_u = r_u + X·ln(E ∘ Λ)`.
pub fn sync_check(sys: &InterpolationSystem, x: &Point) -> Result<SyncReport> {
    let s = skeleton_solve(sys, x, SKELETON_TOL)?;
    let alpha = sys.alpha_coeffs(s, x)?;
    let (e, f) = (alpha.e, alpha.f);
    let slope = -f.d_x / f.d_s;
    let rtilde = sys.rates(x).r_u + (e.d_x + e.d_s * slope) / e.value;
    let closed = if sys.bicontact.gauge == Gauge::Symmetric && sys.profile.kind == ProfileKind::Exponential {
        let c = sys.canonical(x)?;
        let (hu, hs) = (c.h_u, c.h_s);
        let xln = hu.d_x / hu.value - hs.d_x / hs.value;
        let ratio = hu.value / hs.value;
        Some(c.r_u + ratio * xln / (ratio + 1.0) + 0.5 * hs.d_x / hs.value)
    } else {
        None
    };
    let fy = liouville_field(sys, s, x)?.f;
    Ok(SyncReport { skeleton_s: s, f_at_skeleton: fy, rtilde_u: rtilde, inv_rtilde: 1.0 / rtilde, rtilde_u_closed_form: closed })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalHyperbolicity {
    /// `f·∂_s(g/f)`: expansion of `∂_s` in the time of `Y`.
    pub normal_rate: f64,
    /// `max(1, 1 + r_s f)`: the tangential rates, with `r_u f = 1` on the skeleton.
    pub tangential_bound: f64,
    pub holds: bool,
}

pub fn normal_hyperbolicity(sys: &InterpolationSystem, x: &Point) -> Result<NormalHyperbolicity> {
    let s = skeleton_solve(sys, x, SKELETON_TOL)?;
    let y = liouville_field(sys, s, x)?;
    let normal_rate = y.f * y.d_s_g_over_f;
    let tangential_bound = 1.0f64.max(1.0 + sys.rates(x).r_s * y.f);
    Ok(NormalHyperbolicity { normal_rate, tangential_bound, holds: normal_rate > tangential_bound })
}
