use serde::{Deserialize, Serialize};

use super::field::liouville_field;
use super::skeleton::{skeleton_solve, SKELETON_TOL};
use crate::error::{LisError, Result};
use crate::lis::InterpolationSystem;
use crate::models::Point;
use crate::ode::try_rk4_step;

pub const MAX_DT: f64 = 1e-2;
const FD_STEP: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub s: f64,
    pub x: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    /// The orbit left the window; `points` stops at the last in-window state.
    pub exited: bool,
}

impl Trajectory {
    pub fn last(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectories contain the start point")
    }
}

fn y_rhs(sys: &InterpolationSystem, state: &[f64; 4]) -> Result<[f64; 4]> {
    let x = [state[1], state[2], state[3]];
    let y = liouville_field(sys, state[0], &x)?;
    let v = sys.model.vector_field(&x);
    Ok([y.g, y.f * v[0], y.f * v[1], y.f * v[2]])
}

/// Fixed-step RK4 for `Y` over time `t_total` (negative for backward), with
/// `⌈|T|/dt⌉` equal steps. Base points are wrapped after every step.
pub fn integrate_y(sys: &InterpolationSystem, start: (f64, Point), t_total: f64, dt: f64) -> Result<Trajectory> {
    if !(dt > 0.0 && dt <= MAX_DT) {
        return Err(LisError::InvalidInput(format!("dt must lie in (0, {MAX_DT}], got {dt}")));
    }
    if !t_total.is_finite() {
        return Err(LisError::InvalidInput(format!("integration time must be finite, got {t_total}")));
    }
    let (s0, x0) = start;
    if !sys.in_window(s0) {
        return Err(LisError::InvalidInput(format!("start s = {s0} outside window {:?}", sys.window)));
    }
    let n = (t_total.abs() / dt).ceil() as usize;
    let h = if n == 0 { 0.0 } else { t_total / n as f64 };
    let mut state = [s0, x0[0], x0[1], x0[2]];
    let mut points = Vec::with_capacity(n + 1);
    points.push(TrajectoryPoint { t: 0.0, s: s0, x: x0 });
    for k in 1..=n {
        let next = try_rk4_step(&state, h, |y| y_rhs(sys, y))?;
        if !sys.in_window(next[0]) {
            return Ok(Trajectory { points, exited: true });
        }
        let x = sys.model.wrap(&[next[1], next[2], next[3]]);
        state = [next[0], x[0], x[1], x[2]];
        points.push(TrajectoryPoint { t: k as f64 * h, s: state[0], x });
    }
    Ok(Trajectory { points, exited: false })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalBundleSample {
    pub s: f64,
    pub x: Point,
    /// Unit vector in `(X, ∂_s)` components, oriented with positive `∂_s` part.
    pub direction: [f64; 2],
    /// Sine of the angle between the last two iterates.
    pub residual: f64,
    pub iterations: usize,
}

type Mat2 = [[f64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// `[[X·f, ∂_s f], [X·g, ∂_s g]]` by central differences along the flow and in `s`.
fn cocycle_generator(sys: &InterpolationSystem, s: f64, x: &Point) -> Result<Mat2> {
    let (xp, xm) = (sys.model.flow_step(x, FD_STEP), sys.model.flow_step(x, -FD_STEP));
    let along_p = liouville_field(sys, s, &xp)?;
    let along_m = liouville_field(sys, s, &xm)?;
    let up = liouville_field(sys, s + FD_STEP, x)?;
    let down = liouville_field(sys, s - FD_STEP, x)?;
    let d = 2.0 * FD_STEP;
    Ok([[(along_p.f - along_m.f) / d, (up.f - down.f) / d], [(along_p.g - along_m.g) / d, (up.g - down.g) / d]])
}

/// Linearized time-`t` map of `Y` in the weak normal leaf, from `(s, x)`.
fn block(sys: &InterpolationSystem, s: f64, x: &Point, t: f64, dt: f64) -> Result<Mat2> {
    let n = (t / dt).ceil().max(1.0) as usize;
    let h = t / n as f64;
    // State: (s, x0, x1, x2, m00, m01, m10, m11).
    let mut state = [s, x[0], x[1], x[2], 1.0, 0.0, 0.0, 1.0];
    for _ in 0..n {
        state = try_rk4_step(&state, h, |y: &[f64; 8]| -> Result<[f64; 8]> {
            let p = [y[1], y[2], y[3]];
            let base = y_rhs(sys, &[y[0], y[1], y[2], y[3]])?;
            let a = cocycle_generator(sys, y[0], &p)?;
            let m = [[y[4], y[5]], [y[6], y[7]]];
            let am = mat_mul(&a, &m);
            Ok([base[0], base[1], base[2], base[3], am[0][0], am[0][1], am[1][0], am[1][1]])
        })?;
        let w = sys.model.wrap(&[state[1], state[2], state[3]]);
        state[1..4].copy_from_slice(&w);
    }
    Ok([[state[4], state[5]], [state[6], state[7]]])
}

/// Power iteration for the strong normal line at the skeleton point over `x`:
/// `d_k ∝ Φ_1 ⋯ Φ_k ∂_s`, where `Φ_j` is the linearized time-`t_step` map of `Y`
/// from `p_{−j}` to `p_{−j+1}` along the backward skeleton orbit.
pub fn strong_normal_direction(
    sys: &InterpolationSystem,
    x: &Point,
    t_step: f64,
    iters: usize,
    tol: f64,
) -> Result<NormalBundleSample> {
    if iters == 0 || !(t_step > 0.0) || !(tol > 0.0) {
        return Err(LisError::InvalidInput("need iters ≥ 1, t_step > 0 and tol > 0".into()));
    }
    let dt = MAX_DT;
    let s0 = skeleton_solve(sys, x, SKELETON_TOL)?;
    let mut prod: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut dir = [0.0, 1.0];
    let mut residual = f64::INFINITY;
    let (mut s, mut p) = (s0, *x);
    for k in 1..=iters {
        // Step back one block along the skeleton orbit; re-project onto the
        // skeleton to suppress drift.
        let back = integrate_y(sys, (s, p), -t_step, dt)?;
        let last = back.last();
        p = last.x;
        s = skeleton_solve(sys, &p, SKELETON_TOL)?;
        let phi = block(sys, s, &p, t_step, dt)?;
        prod = mat_mul(&prod, &phi);
        let norm = prod.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        for v in prod.iter_mut().flatten() {
            *v /= norm;
        }
        let v = [prod[0][1], prod[1][1]];
        let len = v[0].hypot(v[1]);
        let sign = if v[1] < 0.0 { -1.0 } else { 1.0 };
        let next = [sign * v[0] / len, sign * v[1] / len];
        residual = (next[0] * dir[1] - next[1] * dir[0]).abs();
        dir = next;
        if k > 1 && residual < tol {
            return Ok(NormalBundleSample { s: s0, x: *x, direction: dir, residual, iterations: k });
        }
    }
    Err(LisError::NoConvergence { iters, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lis::examples::*;
    use crate::models::{cat_eigenvalue, FlowModel};

    #[test]
    fn backward_flow_matches_exact_orbit() {
        // Exponential symmetric cat system: g/f = Δ/2·tanh 2s, f = 2/(Δ cosh 2s) give
        // sinh 2s(t) = sinh(2s_0) e^{2t}.
        let sys = exponential_symmetric(FlowModel::Cat);
        let tr = integrate_y(&sys, (1.0, [0.2, 0.3, 0.4]), -5.0, 1e-2).unwrap();
        let exact = 0.5 * (2.0f64.sinh() * (-10.0f64).exp()).asinh();
        assert!(!tr.exited);
        assert!((tr.last().s - exact).abs() < 1e-10);
        assert!(tr.last().s.abs() <= 2e-4);
        let _ = cat_eigenvalue();
    }

    #[test]
    fn skeleton_is_invariant_and_repelling() {
        let sys = exponential_symmetric(FlowModel::Cat);
        let tr = integrate_y(&sys, (0.0, [0.1, 0.1, 0.1]), 10.0, 1e-2).unwrap();
        assert!(tr.points.iter().all(|p| p.s.abs() < 1e-8));
        let tr = integrate_y(&sys, (0.1, [0.1, 0.1, 0.1]), 1.0, 1e-2).unwrap();
        assert!(tr.points.windows(2).all(|w| w[1].s > w[0].s));
        let tr = integrate_y(&sys, (0.1, [0.1, 0.1, 0.1]), 10.0, 1e-2).unwrap();
        assert!(tr.exited && sys.in_window(tr.last().s));
        assert!(integrate_y(&sys, (0.1, [0.0; 3]), 1.0, 0.05).is_err());
    }

    #[test]
    fn strong_normal_constant_h() {
        let sys = exponential_symmetric(FlowModel::Cat);
        let n = strong_normal_direction(&sys, &[0.0, 0.0, 0.2], 1.0, 20, 1e-8).unwrap();
        assert!(n.direction[0].abs() < 1e-9 && (n.direction[1] - 1.0).abs() < 1e-12);
    }
}
