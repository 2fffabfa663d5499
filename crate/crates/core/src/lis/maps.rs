//! Elementary maps between interpolation systems.

use std::sync::Arc;

use super::{BiContactCoeffs, Gauge, InterpolationSystem, Profile, ProfileKind};
use crate::dynamics::liouville_field;
use crate::error::{LisError, Result};
use crate::expr::{EvalAt, Expr};
use crate::field::Field;
use crate::sampling::Sampling;

fn rescaled(field: &Field, factor: Expr) -> Field {
    Field::from(factor).times(field.clone())
}

/// `(α_-, α_+) ↦ (e^{z_-}α_-, e^{z_+}α_+)` with `λ_± ↦ e^{−z_±}λ_±`; the form `α` is unchanged.
pub fn change_of_basis(sys: &InterpolationSystem, z_minus: Expr, z_plus: Expr) -> Result<InterpolationSystem> {
    if z_minus.depends_on_s() || z_plus.depends_on_s() {
        return Err(LisError::InvalidInput("change of basis factors must not depend on s".into()));
    }
    let (em, ep) = (z_minus.clone().exp(), z_plus.clone().exp());
    let b = &sys.bicontact;
    let pair = BiContactCoeffs {
        gauge: Gauge::Rescaled,
        a_plus: ep.clone() * b.a_plus.clone(),
        b_plus: ep * b.b_plus.clone(),
        a_minus: em.clone() * b.a_minus.clone(),
        b_minus: em * b.b_minus.clone(),
    };
    let profile = Profile {
        kind: ProfileKind::General,
        lambda_minus: rescaled(&sys.profile.lambda_minus, (-z_minus).exp()),
        lambda_plus: rescaled(&sys.profile.lambda_plus, (-z_plus).exp()),
    };
    InterpolationSystem::new(sys.model.clone(), pair, profile, sys.window)
}

/// Push the system forward by `H_ψ(s, x) = (ψ(s, x), x)`: `λ_± ↦ λ_± ∘ H_ψ⁻¹`.
/// The new window is the largest `s`-interval contained in the image of the old one
/// over the sampled base points.
pub fn horizontal_map(sys: &InterpolationSystem, psi: Expr, sampling: &Sampling) -> Result<InterpolationSystem> {
    let (a, b) = sys.window;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for x in sampling.base_points(&sys.model) {
        let at = |s: f64| EvalAt { s, point: x, flow: sys.model.vector_field(&x) };
        for k in 0..sampling.grid.max(2) {
            let s = a + (b - a) * k as f64 / (sampling.grid.max(2) - 1) as f64;
            let j = psi.eval(&at(s));
            if !(j.d_s > 0.0) {
                return Err(LisError::NotMonotone(format!("∂_s ψ = {} at s = {s}, x = {x:?}", j.d_s)));
            }
        }
        lo = lo.max(psi.value(&at(a)));
        hi = hi.min(psi.value(&at(b)));
    }
    let psi = Arc::new(psi);
    let pull = |f: &Field| Field::Pullback { inner: Arc::new(f.clone()), psi: psi.clone() };
    let profile = Profile {
        kind: ProfileKind::General,
        lambda_minus: pull(&sys.profile.lambda_minus),
        lambda_plus: pull(&sys.profile.lambda_plus),
    };
    InterpolationSystem::new(sys.model.clone(), sys.bicontact.clone(), profile, (lo, hi))
}

/// `α ↦ e^{f}α`. Requires `Y₀·f > −1` at every sample, where `Y₀` is the
/// Liouville field of `sys`; the new field is `Y₀/(1 + Y₀·f)`.
pub fn scaling_map(sys: &InterpolationSystem, fscale: Expr, sampling: &Sampling) -> Result<InterpolationSystem> {
    for (s, x) in sampling.points(&sys.model, sys.window) {
        let y = liouville_field(sys, s, &x)?;
        let j = fscale.eval(&EvalAt { s, point: x, flow: sys.model.vector_field(&x) });
        let yf = y.f * j.d_x + y.g * j.d_s;
        if !(yf > -1.0) {
            return Err(LisError::Admissibility { value: yf, s, x });
        }
    }
    let factor = fscale.exp();
    let profile = Profile {
        kind: ProfileKind::General,
        lambda_minus: rescaled(&sys.profile.lambda_minus, factor.clone()),
        lambda_plus: rescaled(&sys.profile.lambda_plus, factor),
    };
    InterpolationSystem::new(sys.model.clone(), sys.bicontact.clone(), profile, sys.window)
}
