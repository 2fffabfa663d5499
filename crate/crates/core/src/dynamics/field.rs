use serde::{Deserialize, Serialize};

use crate::error::{LisError, Result};
use crate::forms::{lie_s, lie_x_with};
use crate::jet::Jet2;
use crate::lis::InterpolationSystem;
use crate::models::{FlowModel, Point};

/// Below this `|J|` the 2×2 system is treated as singular.
const DEGENERATE_DET: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    LinearSolve,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleField {
    pub f: f64,
    pub g: f64,
    pub g_over_f: f64,
    pub d_s_g_over_f: f64,
    pub provenance: Provenance,
}

fn check_det(det: f64, s: f64, x: &Point) -> Result<()> {
    if !(det.abs() >= DEGENERATE_DET) {
        return Err(LisError::Degenerate { det, s, x: *x });
    }
    if det > 0.0 {
        return Err(LisError::NotLiouville { density: -det, s, x: *x });
    }
    Ok(())
}

/// Closed form when the coframe has an invariant `α_s` kernel, generic solve otherwise.
pub fn liouville_field(sys: &InterpolationSystem, s: f64, x: &Point) -> Result<LiouvilleField> {
    match sys.model {
        FlowModel::DaChart(_) => liouville_field_solve(sys, s, x),
        _ => liouville_field_closed_form(sys, s, x),
    }
}

/// Solve `f·L_Xα + g·L_{∂_s}α = α` as a 2×2 linear system in the coframe.
pub fn liouville_field_solve(sys: &InterpolationSystem, s: f64, x: &Point) -> Result<LiouvilleField> {
    let alpha = sys.alpha_coeffs(s, x)?;
    let lx = lie_x_with(&alpha, &sys.rates(x));
    let ls = lie_s(&alpha);
    let (a, b, c, d) = (lx.e, ls.e, lx.f, ls.f);
    let (e, f) = (alpha.e, alpha.f);
    let det = a.value * d.value - b.value * c.value;
    check_det(det, s, x)?;
    // Only the value and d_s slots of these jets are meaningful.
    let f_num: Jet2 = d * e - b * f;
    let g_num: Jet2 = a * f - c * e;
    let ratio = g_num / f_num;
    Ok(LiouvilleField {
        f: f_num.value / det,
        g: g_num.value / det,
        g_over_f: ratio.value,
        d_s_g_over_f: ratio.d_s,
        provenance: Provenance::LinearSolve,
    })
}

/// Explicit formulas: reduce to the diagonal coframe, evaluate the exponential
/// gauge at `σ`, pull back through `(s, x) ↦ (σ(s, x), x)`, then rescale by `e^w`.
pub fn liouville_field_closed_form(sys: &InterpolationSystem, s: f64, x: &Point) -> Result<LiouvilleField> {
    let c = sys.canonical(x)?;
    let (sigma, w) = sys.profile_gauge(s, x)?;
    let (hu, hs) = (c.h_u.value, c.h_s.value);
    let (xhu, xhs) = (c.h_u.d_x, c.h_s.d_x);
    let hsum = hu + hs;
    let xh = xhu + xhs;
    let gap = c.r_u - c.r_s;
    let e2 = (2.0 * sigma.value).exp();

    let det = -gap * e2 + hu * hs * (-gap - (xhu / hu - xhs / hs)) / e2 - hsum * (c.r_s + c.r_u) - xh;
    check_det(det, s, x)?;
    let f_exp = -2.0 * hsum / det;
    let damp = 1.0 - hs / e2;
    let q = 0.5 * ((e2 + hu) * damp * gap / hsum + damp * xh / hsum + xhs / e2);
    let dq = (e2 + hs * hu / e2) * gap / hsum + hs * xh / (e2 * hsum) - xhs / e2;

    let ratio = (q - sigma.d_x) / sigma.d_s;
    let d_ratio = (dq * sigma.d_s - sigma.d_sx) / sigma.d_s - (q - sigma.d_x) * sigma.d_ss / (sigma.d_s * sigma.d_s);
    let yw = f_exp * (w.d_x + ratio * w.d_s);
    let f = f_exp / (1.0 + yw);
    Ok(LiouvilleField { f, g: f * ratio, g_over_f: ratio, d_s_g_over_f: d_ratio, provenance: Provenance::ClosedForm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lis::examples::*;
    use crate::models::cat_eigenvalue;

    #[test]
    fn symmetric_skeleton_value() {
        let r_u = cat_eigenvalue().ln();
        let y = liouville_field(&exponential_symmetric(FlowModel::Cat), 0.0, &[0.3, 0.1, 0.2]).unwrap();
        assert!((y.f - 1.0 / r_u).abs() < 1e-14 && y.g.abs() < 1e-15);
        assert!((y.f - 1.039044).abs() < 1e-6);
    }

    #[test]
    fn linear_profile_field() {
        let r_u = cat_eigenvalue().ln();
        let sys = linear_symmetric(FlowModel::Cat);
        for y in [liouville_field_closed_form(&sys, 0.5, &[0.0; 3]).unwrap(), liouville_field_solve(&sys, 0.5, &[0.0; 3]).unwrap()] {
            assert!((y.f - 1.0 / r_u).abs() < 1e-13);
            // (r_u − r_s)/r_u · s with r_s = −r_u.
            assert!((y.g - 1.0).abs() < 1e-13, "g = {}", y.g);
        }
    }

    #[test]
    fn providers_agree() {
        for (name, sys) in bundled() {
            for k in 0..40 {
                let t = k as f64 / 40.0;
                let s = sys.window.0 + (sys.window.1 - sys.window.0) * t;
                let x = [0.3 * t, 0.7, (7.0 * t) % 1.0];
                let a = liouville_field_closed_form(&sys, s, &x).unwrap();
                let b = liouville_field_solve(&sys, s, &x).unwrap();
                for (p, q) in [(a.f, b.f), (a.g, b.g), (a.d_s_g_over_f, b.d_s_g_over_f)] {
                    assert!((p - q).abs() <= 1e-9 * p.abs().max(q.abs()).max(1e-3), "{name}: {p} vs {q} at s={s}");
                }
            }
        }
    }

    #[test]
    fn defining_identity() {
        for (_, sys) in bundled() {
            for k in 0..25 {
                let s = sys.window.0 + 0.04 * k as f64 * (sys.window.1 - sys.window.0);
                let x = [0.1, 0.2, 0.037 * k as f64];
                let y = liouville_field(&sys, s, &x).unwrap();
                let a = sys.alpha_coeffs(s, &x).unwrap();
                let lx = lie_x_with(&a, &sys.rates(&x));
                let ls = lie_s(&a);
                assert!((y.f * lx.e.value + y.g * ls.e.value - a.e.value).abs() < 1e-10);
                assert!((y.f * lx.f.value + y.g * ls.f.value - a.f.value).abs() < 1e-10);
            }
        }
    }
}
