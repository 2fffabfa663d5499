//! Model 3-flows: the suspension of the cat map, a constant-rate local frame
//! (the geodesic flow of a hyperbolic surface in its normalized frame), and the
//! local chart around the periodic orbit used for the DA deformation.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::da::DAParams;
use crate::error::{LisError, Result};
use crate::forms::Rates;
use crate::ode::rk4_step;

pub type Point = [f64; 3];

/// Leading eigenvalue of `[[2,1],[1,1]]`.
pub fn cat_eigenvalue() -> f64 {
    (3.0 + 5f64.sqrt()) / 2.0
}

/// Axis-aligned sampling box; periodic axes are sampled half-open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Point,
    pub hi: Point,
    pub periodic: [bool; 3],
}

impl Domain {
    pub fn axis_value(&self, axis: usize, j: usize, n: usize) -> f64 {
        let (lo, hi) = (self.lo[axis], self.hi[axis]);
        if n <= 1 {
            return 0.5 * (lo + hi);
        }
        let denom = if self.periodic[axis] { n } else { n - 1 } as f64;
        lo + (hi - lo) * j as f64 / denom
    }

    pub fn centre(&self, axis: usize) -> f64 {
        0.5 * (self.lo[axis] + self.hi[axis])
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        let mut p = [0.0; 3];
        for (i, c) in p.iter_mut().enumerate() {
            *c = rng.gen_range(self.lo[i]..self.hi[i]);
        }
        p
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum FlowModel {
    /// Suspension of the cat map in eigencoordinates `(u, v, θ)`, roof 1.
    Cat,
    /// Local frame with constant rates and `X = ∂_θ`.
    ConstantRate { name: String, r_u: f64, r_s: f64 },
    /// Chart `[-1,1]² × ℝ/Tℤ` around a periodic orbit, deformed by [`DAParams`].
    DaChart(DAParams),
}

impl FlowModel {
    pub fn cat_suspension() -> Self {
        FlowModel::Cat
    }

    pub fn geodesic_frame_local() -> Self {
        FlowModel::ConstantRate { name: "geodesic-local".into(), r_u: 1.0, r_s: -1.0 }
    }

    pub fn constant_rates(r_u: f64, r_s: f64) -> Result<Self> {
        if !(r_u > 0.0 && r_u > r_s) {
            return Err(LisError::InvalidInput(format!(
                "rates must satisfy r_u > 0 and r_u > r_s, got ({r_u}, {r_s})"
            )));
        }
        Ok(FlowModel::ConstantRate { name: "constant".into(), r_u, r_s })
    }

    pub fn da_chart(params: DAParams) -> Result<Self> {
        params.validate()?;
        Ok(FlowModel::DaChart(params))
    }

    /// Resolve a CLI/config model name. The DA chart uses [`DAParams::default`].
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "cat" => Ok(FlowModel::Cat),
            "geodesic-local" => Ok(FlowModel::geodesic_frame_local()),
            "da-chart" => FlowModel::da_chart(DAParams::default()),
            other => Err(LisError::UnknownModel(other.into())),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            FlowModel::Cat => "cat",
            FlowModel::ConstantRate { name, .. } => name,
            FlowModel::DaChart(_) => "da-chart",
        }
    }

    pub fn point_dim(&self) -> usize {
        3
    }

    pub fn coordinate_names(&self) -> [&'static str; 3] {
        match self {
            FlowModel::Cat | FlowModel::ConstantRate { .. } => ["u", "v", "theta"],
            FlowModel::DaChart(_) => ["x", "y", "theta"],
        }
    }

    pub fn rates(&self, p: &Point) -> Rates {
        match self {
            FlowModel::Cat => {
                let r = cat_eigenvalue().ln();
                Rates::diagonal(r, -r)
            }
            FlowModel::ConstantRate { r_u, r_s, .. } => Rates::diagonal(*r_u, *r_s),
            FlowModel::DaChart(da) => da.rates(p[0], p[1]),
        }
    }

    pub fn expansion_rates(&self, p: &Point) -> (f64, f64) {
        let r = self.rates(p);
        (r.r_u, r.r_s)
    }

    /// Components of `X` in the model coordinates.
    pub fn vector_field(&self, p: &Point) -> [f64; 3] {
        match self {
            FlowModel::Cat | FlowModel::ConstantRate { .. } => [0.0, 0.0, 1.0],
            FlowModel::DaChart(da) => da.vector_field(p),
        }
    }

    /// Time-`dt` map of `X`, reduced to the fundamental domain.
    pub fn flow_step(&self, p: &Point, dt: f64) -> Point {
        match self {
            FlowModel::Cat | FlowModel::ConstantRate { .. } => {
                self.wrap(&[p[0], p[1], p[2] + dt])
            }
            FlowModel::DaChart(da) => {
                let n = (dt.abs() / 1e-3).ceil().max(1.0) as usize;
                let h = dt / n as f64;
                let mut q = *p;
                for _ in 0..n {
                    q = rk4_step(&q, h, |y| da.vector_field(y));
                }
                self.wrap(&q)
            }
        }
    }

    /// Fundamental-domain reduction in the flow coordinate. The cat suspension
    /// applies the gluing `(u, v, 1) ≡ (λu, λ⁻¹v, 0)`; the local models only
    /// reduce the periodic coordinate.
    pub fn wrap(&self, p: &Point) -> Point {
        match self {
            FlowModel::Cat => {
                let mut k = p[2].floor();
                let mut theta = p[2] - k;
                if theta >= 1.0 {
                    theta -= 1.0;
                    k += 1.0;
                }
                let lam = cat_eigenvalue().powi(k as i32);
                [p[0] * lam, p[1] / lam, theta]
            }
            FlowModel::ConstantRate { .. } => *p,
            FlowModel::DaChart(da) => [p[0], p[1], p[2].rem_euclid(da.period)],
        }
    }

    pub fn domain(&self) -> Domain {
        match self {
            FlowModel::Cat => Domain { lo: [0.0; 3], hi: [1.0; 3], periodic: [true, true, true] },
            FlowModel::ConstantRate { .. } => {
                Domain { lo: [0.0; 3], hi: [1.0; 3], periodic: [false, false, true] }
            }
            FlowModel::DaChart(da) => Domain {
                lo: [-1.0, -1.0, 0.0],
                hi: [1.0, 1.0, da.period],
                periodic: [false, false, true],
            },
        }
    }

    /// Orbits that sampling must always include (the blown-up orbit of the chart).
    pub fn distinguished_points(&self) -> Vec<Point> {
        match self {
            FlowModel::DaChart(_) => vec![[0.0, 0.0, 0.0]],
            _ => Vec::new(),
        }
    }

    /// Whether the model is Anosov by construction (`r_s < 0` everywhere).
    pub fn is_anosov(&self) -> bool {
        match self {
            FlowModel::Cat => true,
            FlowModel::ConstantRate { r_s, .. } => *r_s < 0.0,
            FlowModel::DaChart(da) => da.nubar < 0.0,
        }
    }

    /// `n × n` base points over the first and flow coordinates, middle of the second.
    pub fn base_grid(&self, n: usize) -> Vec<Point> {
        let d = self.domain();
        let mid = d.centre(1);
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push([d.axis_value(0, i, n), mid, d.axis_value(2, j, n)]);
            }
        }
        out
    }
}
