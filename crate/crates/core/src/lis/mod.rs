//! Liouville interpolation systems `α = λ_-(s,x) α_- + λ_+(s,x) α_+` on `ℝ_s × M`.
//!
//! The bi-contact pair is stored by its coefficients in the model coframe,
//! `α_± = a_± α_u + b_± α_s`. The symmetric gauge is `α_+ = α_u − α_s`,
//! `α_- = h_u α_u + h_s α_s`; the decomposed gauge is `α_+ = h_+ α_u − α_s`,
//! `α_- = (2 − h_+) α_u + α_s`. Elementary maps can produce general coefficients.

mod descriptor;
pub mod examples;
mod maps;

pub use descriptor::{ProfileSpec, SystemDescriptor};
pub use maps::{change_of_basis, horizontal_map, scaling_map};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LisError, Result};
use crate::expr::{EvalAt, Expr};
use crate::field::Field;
use crate::forms::{lie_s, lie_x_with, wedge, AnnihilatorForm, Rates};
use crate::jet::Jet2;
use crate::models::{FlowModel, Point};
use crate::sampling::Sampling;

/// Coefficients below this magnitude are rejected as positivity violations.
pub const POSITIVITY_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gauge {
    Symmetric,
    ExponentialDecomposed,
    /// Produced by a change of basis.
    Rescaled,
}

#[derive(Debug, Clone)]
pub struct BiContactCoeffs {
    pub gauge: Gauge,
    pub a_plus: Expr,
    pub b_plus: Expr,
    pub a_minus: Expr,
    pub b_minus: Expr,
}

impl BiContactCoeffs {
    pub fn symmetric(h_u: Expr, h_s: Expr) -> Self {
        BiContactCoeffs {
            gauge: Gauge::Symmetric,
            a_plus: Expr::Const(1.0),
            b_plus: Expr::Const(-1.0),
            a_minus: h_u,
            b_minus: h_s,
        }
    }

    pub fn decomposed(h_plus: Expr) -> Self {
        BiContactCoeffs {
            gauge: Gauge::ExponentialDecomposed,
            a_minus: Expr::Const(2.0) - h_plus.clone(),
            a_plus: h_plus,
            b_plus: Expr::Const(-1.0),
            b_minus: Expr::Const(1.0),
        }
    }

    /// Jets of `(a_+, b_+, a_-, b_-)` at a base point.
    pub fn jets(&self, model: &FlowModel, x: &Point) -> [Jet2; 4] {
        let at = EvalAt { s: 0.0, point: *x, flow: model.vector_field(x) };
        [
            self.a_plus.eval(&at),
            self.b_plus.eval(&at),
            self.a_minus.eval(&at),
            self.b_minus.eval(&at),
        ]
    }

    fn depends_on_s(&self) -> bool {
        [&self.a_plus, &self.b_plus, &self.a_minus, &self.b_minus].iter().any(|e| e.depends_on_s())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    Linear,
    Exponential,
    General,
}

#[derive(Debug, Clone)]
pub struct Profile {
    pub kind: ProfileKind,
    pub lambda_minus: Field,
    pub lambda_plus: Field,
}

impl Profile {
    /// `(1 − s, 1 + s)`, valid on windows inside `(−1, 1)`.
    pub fn linear() -> Self {
        Profile {
            kind: ProfileKind::Linear,
            lambda_minus: (Expr::Const(1.0) - Expr::S).into(),
            lambda_plus: (Expr::Const(1.0) + Expr::S).into(),
        }
    }

    pub fn exponential() -> Self {
        Profile {
            kind: ProfileKind::Exponential,
            lambda_minus: (-Expr::S).exp().into(),
            lambda_plus: Expr::S.exp().into(),
        }
    }

    /// `λ_± = exp(±σ + w)` for a reparametrization `σ` and distortion `w`.
    pub fn general(sigma: Expr, w: Expr) -> Self {
        Profile {
            kind: ProfileKind::General,
            lambda_minus: (w.clone() - sigma.clone()).exp().into(),
            lambda_plus: (w + sigma).exp().into(),
        }
    }
}

/// The bi-contact pair in the diagonal coframe where `α_+ = α_u − α_s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Canonical {
    pub h_u: Jet2,
    pub h_s: Jet2,
    pub r_u: f64,
    pub r_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactDensities {
    pub c_plus: f64,
    pub c_minus: f64,
}

impl ContactDensities {
    pub fn ok(&self) -> bool {
        self.c_plus > 0.0 && self.c_minus > 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FibrationMin {
    pub closed_form_min: f64,
    pub sampled_min: f64,
    pub argmin_s: f64,
    pub relative_gap: f64,
    /// `X·h_+ + h_+(r_u − r_s)` in the normalized frame.
    pub b: f64,
    /// `r_u − r_s` in the normalized frame.
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n_points: usize,
    pub min_density: f64,
    pub argmin: (f64, Point),
    pub min_reversed_density: f64,
    pub min_contact: ContactDensities,
    pub contact_argmin: Point,
    pub min_profile_slope: f64,
    pub liouville_ok: bool,
    pub contact_ok: bool,
}

#[derive(Debug, Clone)]
pub struct InterpolationSystem {
    pub model: FlowModel,
    pub bicontact: BiContactCoeffs,
    pub profile: Profile,
    pub window: (f64, f64),
}

impl InterpolationSystem {
    pub fn new(model: FlowModel, bicontact: BiContactCoeffs, profile: Profile, window: (f64, f64)) -> Result<Self> {
        let (a, b) = window;
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(LisError::InvalidInput(format!("window [{a}, {b}] must be finite with a < b")));
        }
        if profile.kind == ProfileKind::Linear && (a <= -1.0 || b >= 1.0) {
            return Err(LisError::InvalidInput(format!(
                "linear profile needs a window inside (-1, 1), got [{a}, {b}]"
            )));
        }
        if bicontact.depends_on_s() {
            return Err(LisError::InvalidInput("bi-contact coefficients must not depend on s".into()));
        }
        Ok(InterpolationSystem { model, bicontact, profile, window })
    }

    pub fn with_window(&self, window: (f64, f64)) -> Result<Self> {
        InterpolationSystem::new(self.model.clone(), self.bicontact.clone(), self.profile.clone(), window)
    }

    pub fn in_window(&self, s: f64) -> bool {
        s >= self.window.0 && s <= self.window.1
    }

    pub fn rates(&self, x: &Point) -> Rates {
        self.model.rates(x)
    }

    pub fn lambdas(&self, s: f64, x: &Point) -> Result<(Jet2, Jet2)> {
        let lm = self.profile.lambda_minus.jet(&self.model, s, x)?;
        let lp = self.profile.lambda_plus.jet(&self.model, s, x)?;
        for (what, j) in [("λ_-", lm), ("λ_+", lp)] {
            if !(j.value > 0.0) {
                return Err(LisError::Positivity { what: what.into(), value: j.value, s, x: *x });
            }
        }
        Ok((lm, lp))
    }

    fn combine(&self, s: f64, x: &Point, plus_sign: f64) -> Result<AnnihilatorForm> {
        let (lm, lp) = self.lambdas(s, x)?;
        let [ap, bp, am, bm] = self.bicontact.jets(&self.model, x);
        let lp = lp.scale(plus_sign);
        Ok(AnnihilatorForm::new(lm * am + lp * ap, lm * bm + lp * bp))
    }

    /// Coefficients of `α` in the coframe `(α_u, α_s)`.
    pub fn alpha_coeffs(&self, s: f64, x: &Point) -> Result<AnnihilatorForm> {
        self.combine(s, x, 1.0)
    }

    /// Coefficients of `λ_- α_- − λ_+ α_+`, the interpolation supporting `−X`.
    pub fn reversed_alpha_coeffs(&self, s: f64, x: &Point) -> Result<AnnihilatorForm> {
        self.combine(s, x, -1.0)
    }

    /// `(L_X α) ∧ (L_{∂_s} α)` on `α_s ∧ α_u`; positive everywhere iff Liouville.
    pub fn liouville_density(&self, s: f64, x: &Point) -> Result<f64> {
        let a = self.alpha_coeffs(s, x)?;
        Ok(wedge(&lie_x_with(&a, &self.rates(x)), &lie_s(&a)).coeff)
    }

    pub fn reversed_density(&self, s: f64, x: &Point) -> Result<f64> {
        let a = self.reversed_alpha_coeffs(s, x)?;
        Ok(wedge(&lie_x_with(&a, &self.rates(x)), &lie_s(&a)).coeff)
    }

    /// Normalized contactness densities: for `α = aα_u + bα_s`,
    /// `α ∧ dα = −ab·c·Ω` with `c = (r_u − r_s) + X·ln|a/b| + coupling·b/a`.
    /// `c_+ > 0` means `α_+` is positive contact, `c_- > 0` that `α_-` is negative contact.
    pub fn contact_densities(&self, x: &Point) -> ContactDensities {
        let r = self.rates(x);
        let [ap, bp, am, bm] = self.bicontact.jets(&self.model, x);
        let c = |a: Jet2, b: Jet2| {
            r.gap() + a.d_x / a.value - b.d_x / b.value + r.coupling * b.value / a.value
        };
        ContactDensities { c_plus: c(ap, bp), c_minus: c(am, bm) }
    }

    /// `σ = ½ ln(λ_+/λ_-)` and `w = ½ ln(λ_+ λ_-)`, so `α = e^w(e^{−σ}α_- + e^{σ}α_+)`.
    pub fn profile_gauge(&self, s: f64, x: &Point) -> Result<(Jet2, Jet2)> {
        let (lm, lp) = self.lambdas(s, x)?;
        let (lnm, lnp) = (lm.ln(), lp.ln());
        Ok(((lnp - lnm).scale(0.5), (lnp + lnm).scale(0.5)))
    }

    /// Pass to the coframe `α'_u = a_+ α_u`, `α'_s = −b_+ α_s`, where
    /// `α_+ = α'_u − α'_s` and `α_- = h_u α'_u + h_s α'_s`.
    pub fn canonical(&self, x: &Point) -> Result<Canonical> {
        let r = self.rates(x);
        if r.coupling != 0.0 {
            return Err(LisError::Unsupported(format!(
                "model `{}` has a non-invariant α_s kernel; no canonical gauge",
                self.model.name()
            )));
        }
        let [ap, bp, am, bm] = self.bicontact.jets(&self.model, x);
        Ok(Canonical {
            h_u: am / ap,
            h_s: -(bm / bp),
            r_u: r.r_u + ap.d_x / ap.value,
            r_s: r.r_s + bp.d_x / bp.value,
        })
    }

    pub fn fibration_min_check(&self, x: &Point) -> Result<FibrationMin> {
        self.fibration_min_check_with(x, (-5.0, 5.0), 10_000)
    }

    /// Closed-form minimum over `s` of the density for exponential profiles,
    /// against a grid of `n` samples on `range`.
    pub fn fibration_min_check_with(&self, x: &Point, range: (f64, f64), n: usize) -> Result<FibrationMin> {
        if self.profile.kind != ProfileKind::Exponential {
            return Err(LisError::Unsupported("fibration minimum needs the exponential profile".into()));
        }
        let c = self.canonical(x)?;
        let hsum = c.h_u + c.h_s;
        let h_plus = (c.h_s / hsum).scale(2.0);
        let xln = |j: Jet2| j.d_x / j.value;
        let r_u = c.r_u + xln(hsum) - 0.5 * xln(c.h_s);
        let r_s = c.r_s + 0.5 * xln(c.h_s);
        let gap = r_u - r_s;
        let b = h_plus.d_x + h_plus.value * gap;
        if !(b > 0.0 && b < 2.0 * gap) {
            return Err(LisError::Contactness(format!(
                "B = {b} outside (0, {}) at x = {x:?}",
                2.0 * gap
            )));
        }
        let [ap, bp, _, _] = self.bicontact.jets(&self.model, x);
        let scale = 0.5 * hsum.value * ap.value * (-bp.value);
        let closed = scale * (2.0 * ((2.0 * gap - b) * b).sqrt() + 2.0 * (r_s + r_u));
        let (lo, hi) = range;
        let mut best = (f64::INFINITY, lo);
        for k in 0..n {
            let s = lo + (hi - lo) * k as f64 / (n - 1) as f64;
            let d = self.liouville_density(s, x)?;
            if d < best.0 {
                best = (d, s);
            }
        }
        Ok(FibrationMin {
            closed_form_min: closed,
            sampled_min: best.0,
            argmin_s: best.1,
            relative_gap: ((closed - best.0) / closed).abs(),
            b,
            gap,
        })
    }

    /// Sweep the sample set: positivity and monotonicity violations are errors;
    /// Liouville and contact conditions are reported.
    pub fn validate(&self, sampling: &Sampling) -> Result<ValidationReport> {
        let pts = sampling.points(&self.model, self.window);
        struct Row {
            density: f64,
            reversed: f64,
            slope: f64,
            contact: ContactDensities,
        }
        let rows: Vec<Row> = pts
            .par_iter()
            .map(|(s, x)| -> Result<Row> {
                let [ap, bp, am, bm] = self.bicontact.jets(&self.model, x);
                for (what, v) in [("a_+", ap.value), ("-b_+", -bp.value), ("h_u", am.value), ("h_s", bm.value)] {
                    if !(v >= POSITIVITY_FLOOR) {
                        return Err(LisError::Positivity { what: what.into(), value: v, s: *s, x: *x });
                    }
                }
                let (sigma, _) = self.profile_gauge(*s, x)?;
                if !(sigma.d_s > 0.0) {
                    return Err(LisError::NotMonotone(format!(
                        "d/ds ln(λ_+/λ_-) = {} at s = {s}, x = {x:?}",
                        2.0 * sigma.d_s
                    )));
                }
                Ok(Row {
                    density: self.liouville_density(*s, x)?,
                    reversed: self.reversed_density(*s, x)?,
                    slope: 2.0 * sigma.d_s,
                    contact: self.contact_densities(x),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let mut rep = ValidationReport {
            n_points: pts.len(),
            min_density: f64::INFINITY,
            argmin: pts[0],
            min_reversed_density: f64::INFINITY,
            min_contact: ContactDensities { c_plus: f64::INFINITY, c_minus: f64::INFINITY },
            contact_argmin: pts[0].1,
            min_profile_slope: f64::INFINITY,
            liouville_ok: false,
            contact_ok: false,
        };
        for (p, r) in pts.iter().zip(&rows) {
            if r.density < rep.min_density {
                rep.min_density = r.density;
                rep.argmin = *p;
            }
            rep.min_reversed_density = rep.min_reversed_density.min(r.reversed);
            rep.min_profile_slope = rep.min_profile_slope.min(r.slope);
            let worst = r.contact.c_plus.min(r.contact.c_minus);
            if worst < rep.min_contact.c_plus.min(rep.min_contact.c_minus) {
                rep.contact_argmin = p.1;
            }
            rep.min_contact.c_plus = rep.min_contact.c_plus.min(r.contact.c_plus);
            rep.min_contact.c_minus = rep.min_contact.c_minus.min(r.contact.c_minus);
        }
        rep.liouville_ok = rep.min_density > 0.0;
        rep.contact_ok = rep.min_contact.ok();
        Ok(rep)
    }
}
