//! Scalar fields on `ℝ_s × M` with jet evaluation, JSON field specs, and the
//! per-model library of named test fields.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{LisError, Result};
use crate::expr::{EvalAt, Expr};
use crate::jet::Jet2;
use crate::models::{FlowModel, Point};

#[derive(Debug, Clone)]
pub enum Field {
    Expr(Arc<Expr>),
    Product(Arc<Field>, Arc<Field>),
    /// `inner ∘ H_ψ⁻¹` where `H_ψ(s, x) = (ψ(s, x), x)`.
    Pullback { inner: Arc<Field>, psi: Arc<Expr> },
}

impl From<Expr> for Field {
    fn from(e: Expr) -> Self {
        Field::Expr(Arc::new(e))
    }
}

impl Field {
    pub fn constant(c: f64) -> Self {
        Expr::Const(c).into()
    }

    pub fn times(self, other: Field) -> Field {
        Field::Product(Arc::new(self), Arc::new(other))
    }

    pub fn as_expr(&self) -> Option<&Expr> {
        match self {
            Field::Expr(e) => Some(e),
            _ => None,
        }
    }

    pub fn depends_on_s(&self) -> bool {
        match self {
            Field::Expr(e) => e.depends_on_s(),
            _ => true,
        }
    }

    pub fn jet(&self, model: &FlowModel, s: f64, x: &Point) -> Result<Jet2> {
        match self {
            Field::Expr(e) => Ok(e.eval(&EvalAt { s, point: *x, flow: model.vector_field(x) })),
            Field::Product(a, b) => Ok(a.jet(model, s, x)? * b.jet(model, s, x)?),
            Field::Pullback { inner, psi } => {
                let at = |t: f64| EvalAt { s: t, point: *x, flow: model.vector_field(x) };
                let phi = invert_monotone(|t| psi.value(&at(t)), s)?;
                let p = psi.eval(&at(phi));
                let l = inner.jet(model, phi, x)?;
                Ok(compose_inverse(l, p))
            }
        }
    }

    pub fn value(&self, model: &FlowModel, s: f64, x: &Point) -> Result<f64> {
        Ok(self.jet(model, s, x)?.value)
    }
}

/// Solve `ψ(t) = target` for strictly increasing `ψ` by bracketing and bisection.
pub fn invert_monotone(psi: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (target - 1.0, target + 1.0);
    let mut width = 1.0;
    for _ in 0..64 {
        if psi(lo) <= target {
            break;
        }
        width *= 2.0;
        lo = target - width;
    }
    width = 1.0;
    for _ in 0..64 {
        if psi(hi) >= target {
            break;
        }
        width *= 2.0;
        hi = target + width;
    }
    if !(psi(lo) <= target && psi(hi) >= target) {
        return Err(LisError::NotMonotone(format!("cannot bracket ψ⁻¹({target})")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if psi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Jet of `λ(φ(s,x), x)` where `φ(·, x) = ψ(·, x)⁻¹`, given the jets of `λ`
/// and `ψ` at `(φ, x)`.
fn compose_inverse(l: Jet2, p: Jet2) -> Jet2 {
    let phi_s = 1.0 / p.d_s;
    let phi_x = -p.d_x * phi_s;
    let phi_ss = -p.d_ss * phi_s * phi_s * phi_s;
    let phi_sx = -(p.d_ss * phi_s * phi_x + p.d_sx * phi_s) * phi_s;
    Jet2 {
        value: l.value,
        d_x: l.d_s * phi_x + l.d_x,
        d_s: l.d_s * phi_s,
        d_sx: l.d_ss * phi_s * phi_x + l.d_s * phi_sx + l.d_sx * phi_s,
        d_ss: l.d_ss * phi_s * phi_s + l.d_s * phi_ss,
    }
}

/// JSON field spec: `{"type": "const" | "cos_theta" | "expr", "params": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub params: Value,
}

impl FieldSpec {
    pub fn constant(c: f64) -> Self {
        FieldSpec { kind: "const".into(), params: serde_json::json!({ "value": c }) }
    }

    pub fn cos_theta(mean: f64, amp: f64) -> Self {
        FieldSpec { kind: "cos_theta".into(), params: serde_json::json!({ "mean": mean, "amp": amp }) }
    }

    pub fn expr(src: &str) -> Self {
        FieldSpec { kind: "expr".into(), params: serde_json::json!({ "expr": src }) }
    }

    pub fn to_expr(&self, model: &FlowModel) -> Result<Expr> {
        let num = |key: &str, default: Option<f64>| -> Result<f64> {
            match self.params.get(key) {
                Some(v) => v
                    .as_f64()
                    .ok_or_else(|| LisError::Parse(format!("field param `{key}` must be a number"))),
                None => default
                    .ok_or_else(|| LisError::Parse(format!("field spec `{}` needs `{key}`", self.kind))),
            }
        };
        match self.kind.as_str() {
            "const" => Ok(Expr::Const(num("value", None)?)),
            "cos_theta" => Ok(Expr::cos_theta(num("mean", Some(1.0))?, num("amp", None)?)),
            "expr" => {
                let src = self
                    .params
                    .get("expr")
                    .and_then(Value::as_str)
                    .ok_or_else(|| LisError::Parse("expr field needs a string `expr`".into()))?;
                Expr::parse(src, model.coordinate_names())
            }
            "library" => {
                let id = self
                    .params
                    .get("id")
                    .and_then(Value::as_str)
                    .ok_or_else(|| LisError::Parse("library field needs a string `id`".into()))?;
                library_field(model, id)
            }
            other => Err(LisError::Parse(format!("unknown field type `{other}`"))),
        }
    }
}

/// Named test fields available on a model. All depend on the flow coordinate
/// only, so they are continuous across the suspension gluing.
pub fn scalar_field_library(model: &FlowModel) -> BTreeMap<&'static str, Expr> {
    let coords = model.coordinate_names();
    let p = |src: &str| Expr::parse(src, coords).expect("library expressions parse");
    let mut lib = BTreeMap::new();
    lib.insert("one", Expr::Const(1.0));
    lib.insert("e_squared", Expr::Const(std::f64::consts::E.powi(2)));
    lib.insert("cos_half", Expr::cos_theta(1.0, 0.5));
    lib.insert("cos_quarter", Expr::cos_theta(1.0, 0.25));
    lib.insert("cos_unit", p("cos(2*pi*theta)"));
    lib.insert("exp_cos", p("exp(0.3*cos(2*pi*theta))"));
    lib.insert("cos_sin_product", p("(1 + 0.5*cos(2*pi*theta))*(1 + 0.25*sin(2*pi*theta))"));
    lib
}

pub fn library_field(model: &FlowModel, id: &str) -> Result<Expr> {
    scalar_field_library(model)
        .remove(id)
        .ok_or_else(|| LisError::UnknownField(id.into()))
}

/// Jet of a library field at a base point (`s`-independent).
pub fn scalar_jet(model: &FlowModel, id: &str, x: &Point) -> Result<Jet2> {
    Field::from(library_field(model, id)?).jet(model, 0.0, x)
}
