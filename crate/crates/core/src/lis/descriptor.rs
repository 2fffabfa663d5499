//! JSON system descriptors.
//!
//! ```json
//! {"model": "cat", "gauge": "symmetric",
//!  "h_u": {"type": "const", "params": {"value": 1}},
//!  "h_s": {"type": "cos_theta", "params": {"mean": 1, "amp": 0.5}},
//!  "profile": {"kind": "exponential"}, "window": [-0.45, 3]}
//! ```

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{BiContactCoeffs, Gauge, InterpolationSystem, Profile, ProfileKind};
use crate::da::DAParams;
use crate::error::{LisError, Result};
use crate::expr::Expr;
use crate::field::FieldSpec;
use crate::models::FlowModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub kind: ProfileKind,
    /// For `general`: `{"sigma": "<expr>", "w": "<expr>"}`; `w` defaults to 0.
    #[serde(default, skip_serializing_if = "Value::is_null")]
    pub params: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDescriptor {
    pub model: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model_params: Option<Value>,
    #[serde(default = "default_gauge")]
    pub gauge: Gauge,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_u: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_s: Option<FieldSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h_plus: Option<FieldSpec>,
    pub profile: ProfileSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<[f64; 2]>,
}

fn default_gauge() -> Gauge {
    Gauge::Symmetric
}

impl SystemDescriptor {
    pub fn from_json(src: &str) -> Result<Self> {
        serde_json::from_str(src).map_err(|e| LisError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("descriptor serializes")
    }

    pub fn model(&self) -> Result<FlowModel> {
        let params = self.model_params.clone().unwrap_or(Value::Null);
        match self.model.as_str() {
            "da-chart" if !params.is_null() => {
                let p: DAParams = serde_json::from_value(params).map_err(|e| LisError::Parse(e.to_string()))?;
                FlowModel::da_chart(p)
            }
            "constant" => {
                let get = |k: &str| {
                    params
                        .get(k)
                        .and_then(Value::as_f64)
                        .ok_or_else(|| LisError::Parse(format!("constant model needs numeric `{k}`")))
                };
                FlowModel::constant_rates(get("r_u")?, get("r_s")?)
            }
            name => FlowModel::by_name(name),
        }
    }

    pub fn build(&self) -> Result<InterpolationSystem> {
        let model = self.model()?;
        let field = |spec: &Option<FieldSpec>, name: &str| -> Result<Expr> {
            match spec {
                Some(f) => f.to_expr(&model),
                None => Err(LisError::Parse(format!("gauge {:?} needs `{name}`", self.gauge))),
            }
        };
        let pair = match self.gauge {
            Gauge::Symmetric => BiContactCoeffs::symmetric(field(&self.h_u, "h_u")?, field(&self.h_s, "h_s")?),
            Gauge::ExponentialDecomposed => BiContactCoeffs::decomposed(field(&self.h_plus, "h_plus")?),
            Gauge::Rescaled => {
                return Err(LisError::Parse("gauge `rescaled` cannot be loaded from a descriptor".into()))
            }
        };
        let profile = match self.profile.kind {
            ProfileKind::Linear => Profile::linear(),
            ProfileKind::Exponential => Profile::exponential(),
            ProfileKind::General => {
                let expr = |key: &str, default: Option<&str>| -> Result<Expr> {
                    let src = match self.profile.params.get(key) {
                        Some(v) => v
                            .as_str()
                            .ok_or_else(|| LisError::Parse(format!("profile param `{key}` must be a string")))?,
                        None => default.ok_or_else(|| LisError::Parse(format!("general profile needs `{key}`")))?,
                    };
                    Expr::parse(src, model.coordinate_names())
                };
                Profile::general(expr("sigma", None)?, expr("w", Some("0"))?)
            }
        };
        let window = match (self.window, self.profile.kind) {
            (Some([a, b]), _) => (a, b),
            (None, ProfileKind::Linear) => (-0.9, 0.9),
            (None, _) => (-3.0, 3.0),
        };
        InterpolationSystem::new(model, pair, profile, window)
    }
}
