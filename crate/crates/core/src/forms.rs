//! Reduced exterior calculus on 1-forms annihilating `⟨X, ∂_s⟩`.
//!
//! Such a form is `α = E·α_u + F·α_s` with coefficient jets `E`, `F`. The flow
//! acts on the coframe by `L_X α_u = r_u α_u` and `L_X α_s = r_s α_s + c α_u`,
//! where the coupling `c` vanishes whenever `ker α_s` is itself invariant.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::jet::Jet2;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AnnihilatorForm {
    /// Coefficient of `α_u`.
    pub e: Jet2,
    /// Coefficient of `α_s`.
    pub f: Jet2,
}

/// A multiple of the oriented area element `α_s ∧ α_u`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Area2 {
    pub coeff: f64,
}

/// Infinitesimal action of the flow on the coframe at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub r_u: f64,
    pub r_s: f64,
    /// `L_X α_s − r_s α_s` as a multiple of `α_u`.
    pub coupling: f64,
}

impl Rates {
    pub const fn diagonal(r_u: f64, r_s: f64) -> Self {
        Rates { r_u, r_s, coupling: 0.0 }
    }

    pub fn gap(&self) -> f64 {
        self.r_u - self.r_s
    }
}

impl AnnihilatorForm {
    pub const ZERO: AnnihilatorForm = AnnihilatorForm { e: Jet2::ZERO, f: Jet2::ZERO };

    pub const fn new(e: Jet2, f: Jet2) -> Self {
        AnnihilatorForm { e, f }
    }

    pub const fn constant(e: f64, f: f64) -> Self {
        AnnihilatorForm::new(Jet2::constant(e), Jet2::constant(f))
    }

    pub fn values(&self) -> (f64, f64) {
        (self.e.value, self.f.value)
    }
}

impl Add for AnnihilatorForm {
    type Output = AnnihilatorForm;
    fn add(self, o: Self) -> Self {
        AnnihilatorForm::new(self.e + o.e, self.f + o.f)
    }
}

impl Sub for AnnihilatorForm {
    type Output = AnnihilatorForm;
    fn sub(self, o: Self) -> Self {
        AnnihilatorForm::new(self.e - o.e, self.f - o.f)
    }
}

impl Mul<AnnihilatorForm> for Jet2 {
    type Output = AnnihilatorForm;
    fn mul(self, a: AnnihilatorForm) -> AnnihilatorForm {
        AnnihilatorForm::new(self * a.e, self * a.f)
    }
}

impl Mul<AnnihilatorForm> for f64 {
    type Output = AnnihilatorForm;
    fn mul(self, a: AnnihilatorForm) -> AnnihilatorForm {
        AnnihilatorForm::new(a.e * self, a.f * self)
    }
}

/// `L_X α` for a diagonal coframe.
pub fn lie_x(form: &AnnihilatorForm, r_u: f64, r_s: f64) -> AnnihilatorForm {
    lie_x_with(form, &Rates::diagonal(r_u, r_s))
}

/// `L_X α = (X·E + r_u E + c F) α_u + (X·F + r_s F) α_s`.
///
/// A second-order jet determines the value and `∂_s` slots of the result; the
/// `X`-slot would need `X·X·E`. The value, `d_s` and (trivially) `d_x = 0` slots
/// are filled; `d_sx` and `d_ss` are zero. Rates are taken to be independent
/// of `s`.
pub fn lie_x_with(form: &AnnihilatorForm, rates: &Rates) -> AnnihilatorForm {
    let Rates { r_u, r_s, coupling } = *rates;
    let (e, f) = (form.e, form.f);
    AnnihilatorForm::new(
        Jet2::new(
            e.d_x + r_u * e.value + coupling * f.value,
            0.0,
            e.d_sx + r_u * e.d_s + coupling * f.d_s,
            0.0,
            0.0,
        ),
        Jet2::new(f.d_x + r_s * f.value, 0.0, f.d_sx + r_s * f.d_s, 0.0, 0.0),
    )
}

/// `L_{∂_s} α`: differentiate both coefficients in `s`.
///
/// The value, `d_x` and `d_s` slots of the result are exact; `d_sx` would need
/// third-order data and is left at zero.
pub fn lie_s(form: &AnnihilatorForm) -> AnnihilatorForm {
    let shift = |j: Jet2| Jet2::new(j.d_s, j.d_sx, j.d_ss, 0.0, 0.0);
    AnnihilatorForm::new(shift(form.e), shift(form.f))
}

/// Coefficient of `a ∧ b` on `α_s ∧ α_u`.
pub fn wedge(a: &AnnihilatorForm, b: &AnnihilatorForm) -> Area2 {
    Area2 { coeff: a.f.value * b.e.value - a.e.value * b.f.value }
}
