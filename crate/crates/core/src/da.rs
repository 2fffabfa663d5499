//! The bi-contact DA deformation in the chart `[-1,1]² × ℝ/Tℤ` around a
//! periodic orbit with eigen-rates `ν < 0 < μ`.
//!
//! The stable rate is replaced by `ν̄` near the orbit:
//! `X_η = ν̂(x,y)·x ∂_x + μ y ∂_y + ∂_θ` with
//! `ν̂ = ν + (ν̄ − ν) φ(x/η) φ(y/η)` and `φ(t) = (1 − t²)²` on `[-1, 1]`.
//! The deformed contact pair is
//! `ᾱ_± = dy ∓ dx + (±ν̂x − μy) dθ`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LisError, Result};
use crate::forms::Rates;
use crate::models::Point;
use crate::ode::rk4_step;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DAParams {
    pub nu: f64,
    pub mu: f64,
    pub nubar: f64,
    pub eta: f64,
    pub period: f64,
}

impl Default for DAParams {
    fn default() -> Self {
        DAParams { nu: -1.0, mu: 1.0, nubar: 0.5, eta: 0.5, period: 1.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

/// Which linear Liouville pair on `ℝ_s × chart` is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PairOrientation {
    /// `(1−s)ᾱ_- + (1+s)ᾱ_+`, supporting `X_η`.
    Forward,
    /// `(1−s)ᾱ_- − (1+s)ᾱ_+`, supporting `−X_η`.
    Reversed,
}

/// Bump `(1 − t²)²` clipped to `[-1, 1]`, and its derivative.
pub fn bump(t: f64) -> (f64, f64) {
    if t.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let w = 1.0 - t * t;
    (w * w, -4.0 * t * w)
}

pub fn a_polynomial(x: f64, y: f64) -> f64 {
    let (x2, y2) = (x * x, y * y);
    (1.0 - x2) * (1.0 - y2) * ((1.0 - 5.0 * x2) * (1.0 - y2) - 4.0 * x * y * (1.0 - x2))
}

impl DAParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.mu > 0.0
            && self.nu < 0.0
            && self.nubar < self.mu
            && self.eta > 0.0
            && self.eta < 1.0
            && self.period > 0.0
            && [self.nu, self.mu, self.nubar, self.eta, self.period].iter().all(|v| v.is_finite());
        if ok {
            Ok(())
        } else {
            Err(LisError::InvalidInput(format!(
                "DA parameters need ν < 0 < μ, ν̄ < μ, 0 < η < 1, T > 0; got {self:?}"
            )))
        }
    }

    /// `ν̂` and its partial derivatives in `x` and `y`.
    pub fn nu_hat(&self, x: f64, y: f64) -> (f64, f64, f64) {
        let (px, dpx) = bump(x / self.eta);
        let (py, dpy) = bump(y / self.eta);
        let amp = self.nubar - self.nu;
        (
            self.nu + amp * px * py,
            amp * dpx * py / self.eta,
            amp * px * dpy / self.eta,
        )
    }

    pub fn vector_field(&self, p: &Point) -> [f64; 3] {
        let (nh, _, _) = self.nu_hat(p[0], p[1]);
        [nh * p[0], self.mu * p[1], 1.0]
    }

    /// Action of `X_η` on the coframe `α_u = dy − μy dθ`, `α_s = dx − ν̂x dθ`.
    /// `ker α_u = ⟨X_η, ∂_x⟩` is invariant; `ker α_s` is not, hence the coupling.
    pub fn rates(&self, x: f64, y: f64) -> Rates {
        let (nh, nx, ny) = self.nu_hat(x, y);
        Rates { r_u: self.mu, r_s: nh + x * nx, coupling: x * ny }
    }

    /// Coefficient of `ᾱ_± ∧ dᾱ_±` on `dx ∧ dy ∧ dθ`, from the `A` polynomial.
    pub fn deformed_contact_density(&self, sign: Sign, p: &Point) -> f64 {
        let (x, y) = (p[0] / self.eta, p[1] / self.eta);
        let inside = x.abs() <= 1.0 && y.abs() <= 1.0;
        let gap = self.mu - self.nu;
        let pull = self.nu - self.nubar;
        match sign {
            Sign::Plus => gap + if inside { pull * a_polynomial(x, y) } else { 0.0 },
            Sign::Minus => -(gap + if inside { pull * a_polynomial(x, -y) } else { 0.0 }),
        }
    }

    /// Coefficients `(dx, dy, dθ)` of `ᾱ_±` at a chart point.
    pub fn contact_form(&self, sign: Sign, p: &Point) -> [f64; 3] {
        let (nh, _, _) = self.nu_hat(p[0], p[1]);
        match sign {
            Sign::Plus => [-1.0, 1.0, nh * p[0] - self.mu * p[1]],
            Sign::Minus => [1.0, 1.0, -nh * p[0] - self.mu * p[1]],
        }
    }

    /// Reduced Liouville density of the linear pair: half the coefficient of
    /// `dᾱ ∧ dᾱ` on `ds ∧ dx ∧ dy ∧ dθ`, computed from the explicit 1-form.
    pub fn pair_density(&self, orientation: PairOrientation, s: f64, p: &Point) -> f64 {
        let (x, y) = (p[0], p[1]);
        let (nh, nx, ny) = self.nu_hat(x, y);
        let sigma = match orientation {
            PairOrientation::Forward => 1.0,
            PairOrientation::Reversed => -1.0,
        };
        // ᾱ_- = dx + dy + (−ν̂x − μy)dθ,  ᾱ_+ = −dx + dy + (ν̂x − μy)dθ.
        let m = [1.0, 1.0, -nh * x - self.mu * y];
        let q = [-1.0, 1.0, nh * x - self.mu * y];
        let m_theta_x = -(nh + x * nx);
        let m_theta_y = -(x * ny + self.mu);
        let q_theta_x = nh + x * nx;
        let q_theta_y = x * ny - self.mu;
        let (cm, cq) = (1.0 - s, sigma * (1.0 + s));
        let w_sx = -m[0] + sigma * q[0];
        let w_sy = -m[1] + sigma * q[1];
        let w_st = -m[2] + sigma * q[2];
        let w_xy = 0.0;
        let w_xt = cm * m_theta_x + cq * q_theta_x;
        let w_yt = cm * m_theta_y + cq * q_theta_y;
        w_sx * w_yt - w_sy * w_xt + w_st * w_xy
    }

    fn chart_grid(n: usize) -> impl Iterator<Item = (f64, f64)> {
        let step = if n > 1 { 2.0 / (n - 1) as f64 } else { 0.0 };
        (0..n).flat_map(move |i| (0..n).map(move |j| (-1.0 + i as f64 * step, -1.0 + j as f64 * step)))
    }

    /// Minimum over an `n × n` grid of the reduced density at `s = 0`, and its
    /// largest deviation from `4μ`.
    pub fn liouville_at_skeleton(&self, grid_n: usize) -> (f64, f64) {
        let target = 4.0 * self.mu;
        Self::chart_grid(grid_n).fold((f64::INFINITY, 0.0f64), |(mn, dev), (x, y)| {
            let d = self.pair_density(PairOrientation::Forward, 0.0, &[x, y, 0.0]);
            (mn.min(d), dev.max((d - target).abs()))
        })
    }

    pub fn check(&self, grid_n: usize) -> Result<DAReport> {
        self.validate()?;
        if grid_n < 2 {
            return Err(LisError::InvalidInput("grid must have at least 2 points per side".into()));
        }
        let pts: Vec<(f64, f64)> = Self::chart_grid(grid_n).collect();
        let rows: Vec<[f64; 3]> = pts
            .par_iter()
            .map(|&(x, y)| {
                let p = [x, y, 0.0];
                [
                    self.deformed_contact_density(Sign::Plus, &p),
                    self.deformed_contact_density(Sign::Minus, &p),
                    self.pair_density(PairOrientation::Reversed, 0.0, &p),
                ]
            })
            .collect();
        let mut report = DAReport {
            params: *self,
            grid: grid_n,
            min_contact_plus: f64::INFINITY,
            max_contact_minus: f64::NEG_INFINITY,
            argmin: [0.0; 3],
            liouville_at_zero: 0.0,
            liouville_deviation: 0.0,
            reversed_min: f64::INFINITY,
            reversed_argmin: [0.0; 3],
        };
        for (&(x, y), r) in pts.iter().zip(&rows) {
            if r[0] < report.min_contact_plus {
                report.min_contact_plus = r[0];
                report.argmin = [x, y, 0.0];
            }
            report.max_contact_minus = report.max_contact_minus.max(r[1]);
            if r[2] < report.reversed_min {
                report.reversed_min = r[2];
                report.reversed_argmin = [x, y, 0.0];
            }
        }
        let (liou, dev) = self.liouville_at_skeleton(grid_n);
        report.liouville_at_zero = liou;
        report.liouville_deviation = dev;
        Ok(report)
    }

    /// Does the time-`t_total` linearized flow map the cone
    /// `{|v_x| ≤ k|v_y|}` strictly into itself at every grid point?
    ///
    /// The normal cocycle is upper triangular in `(∂_x, ∂_y)`, so the slope
    /// `z = v_x / v_y` obeys the affine equation `z' = (a − μ) z + b` with
    /// `a = ν̂ + x ν̂_x`, `b = x ν̂_y`. The contraction factor is the largest
    /// `|z(T)| / k` over the two boundary slopes.
    pub fn cone_domination_check(&self, t_total: f64, cone_slope: f64, grid_n: usize) -> Result<ConeReport> {
        self.validate()?;
        if !(cone_slope.is_finite() && cone_slope > 0.0 && cone_slope <= MAX_CONE_SLOPE) {
            return Err(LisError::InvalidInput(format!(
                "cone slope must lie in (0, {MAX_CONE_SLOPE:e}], got {cone_slope}"
            )));
        }
        let periods = t_total / self.period;
        if !(t_total > 0.0 && (periods - periods.round()).abs() < 1e-9) {
            return Err(LisError::InvalidInput(format!(
                "T_total = {t_total} is not a positive multiple of the period {}",
                self.period
            )));
        }
        let factor_at = |x: f64, y: f64| {
            let steps = (t_total / CONE_DT).ceil() as usize;
            let h = t_total / steps as f64;
            let mut st = [x, y, 0.0, cone_slope, -cone_slope];
            for _ in 0..steps {
                st = rk4_step(&st, h, |u| {
                    let r = self.rates(u[0], u[1]);
                    let v = self.vector_field(&[u[0], u[1], u[2]]);
                    let lin = r.r_s - self.mu;
                    [v[0], v[1], v[2], lin * u[3] + r.coupling, lin * u[4] + r.coupling]
                });
            }
            st[3].abs().max(st[4].abs()) / cone_slope
        };
        let pts: Vec<(f64, f64)> = Self::chart_grid(grid_n).collect();
        let max_factor = pts
            .par_iter()
            .map(|&(x, y)| factor_at(x, y))
            .collect::<Vec<_>>()
            .into_iter()
            .fold(0.0f64, f64::max);
        let origin_factor = factor_at(0.0, 0.0);
        let max_factor = max_factor.max(origin_factor);
        Ok(ConeReport { holds: max_factor < 1.0, max_factor, origin_factor })
    }
}

pub const MAX_CONE_SLOPE: f64 = 1e8;
const CONE_DT: f64 = 1e-3;

/// Maximum of `A` on an `n × n` grid of `[-1,1]²` and where it is attained.
pub fn a_grid_max(n: usize) -> (f64, [f64; 2]) {
    let step = 2.0 / (n - 1) as f64;
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = -1.0 + i as f64 * step;
            (0..n).fold((f64::NEG_INFINITY, [0.0; 2]), |best, j| {
                let y = -1.0 + j as f64 * step;
                let a = a_polynomial(x, y);
                if a > best.0 { (a, [x, y]) } else { best }
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .fold((f64::NEG_INFINITY, [0.0; 2]), |b, c| if c.0 > b.0 { c } else { b })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DAReport {
    pub params: DAParams,
    pub grid: usize,
    /// Minimum of the `ᾱ_+` contact density; positive certifies positive contact.
    pub min_contact_plus: f64,
    /// Maximum of the `ᾱ_-` contact density; negative certifies negative contact.
    pub max_contact_minus: f64,
    pub argmin: Point,
    /// Minimum over the grid of the reduced Liouville density at `s = 0`.
    pub liouville_at_zero: f64,
    pub liouville_deviation: f64,
    /// Minimum of the reversed-pair density at `s = 0`; `≤ 0` rules out Anosov.
    pub reversed_min: f64,
    pub reversed_argmin: Point,
}

impl DAReport {
    pub fn bicontact_ok(&self) -> bool {
        self.min_contact_plus > 0.0 && self.max_contact_minus < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub holds: bool,
    pub max_factor: f64,
    pub origin_factor: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(nubar: f64, eta: f64) -> DAParams {
        DAParams { nu: -1.0, mu: 1.0, nubar, eta, period: 1.0 }
    }

    /// Coefficient of `α ∧ dα` on `dx ∧ dy ∧ dθ` via `a · curl a` with central differences.
    fn fd_contact_density(p: &DAParams, sign: Sign, x: f64, y: f64) -> f64 {
        let h = 1e-5;
        let a = |x: f64, y: f64| p.contact_form(sign, &[x, y, 0.0]);
        let c = a(x, y);
        let dx = |i: usize| (a(x + h, y)[i] - a(x - h, y)[i]) / (2.0 * h);
        let dy = |i: usize| (a(x, y + h)[i] - a(x, y - h)[i]) / (2.0 * h);
        // θ-derivatives vanish: curl = (∂_y a_θ, −∂_x a_θ, ∂_x a_y − ∂_y a_x).
        c[0] * dy(2) - c[1] * dx(2) + c[2] * (dx(1) - dy(0))
    }

    #[test]
    fn vector_field_examples() {
        let p = params(0.0, 0.5);
        assert_eq!(p.vector_field(&[0.0, 0.0, 0.3]), [0.0, 0.0, 1.0]);
        assert_eq!(p.nu_hat(0.0, 0.0).0, 0.0);
        assert_eq!(p.vector_field(&[0.6, 0.2, 0.0]), [-0.6, 0.2, 1.0]);
        assert!((p.nu_hat(0.25, 0.0).0 + 0.4375).abs() < 1e-15);
    }

    #[test]
    fn a_polynomial_examples() {
        assert_eq!(a_polynomial(0.0, 0.0), 1.0);
        for y in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_eq!(a_polynomial(1.0, y), 0.0);
            assert_eq!(a_polynomial(-1.0, y), 0.0);
        }
    }

    #[test]
    fn hand_derived_densities_match_exterior_derivative() {
        for &(nubar, eta) in &[(0.5, 0.5), (0.9, 0.3), (-0.5, 0.8)] {
            let p = params(nubar, eta);
            for i in 0..15 {
                for j in 0..15 {
                    // Offsets keep samples off |x| = η, where ν̂ is only C¹.
                    let x = -0.951 + 0.13 * i as f64;
                    let y = -0.931 + 0.127 * j as f64;
                    for sign in [Sign::Plus, Sign::Minus] {
                        let exact = p.deformed_contact_density(sign, &[x, y, 0.0]);
                        let fd = fd_contact_density(&p, sign, x, y);
                        assert!((exact - fd).abs() < 1e-6, "{sign:?} ({x},{y}): {exact} vs {fd}");
                    }
                }
            }
        }
    }

    #[test]
    fn contact_density_examples() {
        let p = params(0.5, 0.5);
        assert_eq!(p.deformed_contact_density(Sign::Plus, &[0.0, 0.0, 0.0]), 0.5);
        assert_eq!(p.deformed_contact_density(Sign::Plus, &[0.7, 0.1, 0.0]), 2.0);
        assert_eq!(p.deformed_contact_density(Sign::Minus, &[0.1, -0.9, 0.0]), -2.0);
    }

    #[test]
    fn bump_is_c1_across_support_boundary() {
        let h = 1e-7;
        for t in [-1.0, 1.0] {
            let (v, d) = bump(t);
            assert_eq!((v, d), (0.0, 0.0));
            let fd = (bump(t + h).0 - bump(t - h).0) / (2.0 * h);
            assert!(fd.abs() < 1e-6);
        }
        let fd = (bump(0.3 + h).0 - bump(0.3 - h).0) / (2.0 * h);
        assert!((fd - bump(0.3).1).abs() < 1e-7);
    }

    #[test]
    fn pair_density_matches_finite_difference_four_form() {
        // Half the ds∧dx∧dy∧dθ coefficient of dᾱ∧dᾱ, with dᾱ from central differences.
        let p = params(0.5, 0.5);
        let form = |o: PairOrientation, s: f64, x: f64, y: f64| -> [f64; 4] {
            let m = p.contact_form(Sign::Minus, &[x, y, 0.0]);
            let q = p.contact_form(Sign::Plus, &[x, y, 0.0]);
            let sg = if o == PairOrientation::Forward { 1.0 } else { -1.0 };
            let c = |i: usize| (1.0 - s) * m[i] + sg * (1.0 + s) * q[i];
            [0.0, c(0), c(1), c(2)]
        };
        let h = 1e-5;
        for o in [PairOrientation::Forward, PairOrientation::Reversed] {
            for &(s, x, y) in &[(0.0, 0.1, 0.2), (0.3, -0.2, 0.05), (-0.5, 0.4, -0.3), (0.0, 0.0, 0.0)] {
                let d = |axis: usize, i: usize| {
                    let mut plus = [s, x, y];
                    let mut minus = [s, x, y];
                    if axis < 3 {
                        plus[axis] += h;
                        minus[axis] -= h;
                    } else {
                        return 0.0;
                    }
                    (form(o, plus[0], plus[1], plus[2])[i] - form(o, minus[0], minus[1], minus[2])[i]) / (2.0 * h)
                };
                let w = |i: usize, j: usize| d(i, j) - d(j, i);
                let reduced = w(0, 1) * w(2, 3) - w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
                let exact = p.pair_density(o, s, &[x, y, 0.0]);
                assert!((reduced - exact).abs() < 1e-6, "{o:?} {reduced} vs {exact}");
            }
        }
    }

    #[test]
    fn liouville_at_zero_is_four_mu() {
        let p = DAParams { mu: crate::models::cat_eigenvalue().ln(), ..params(0.3, 0.5) };
        let (mn, dev) = p.liouville_at_skeleton(41);
        assert!(dev < 1e-12);
        assert!((mn - 3.849695).abs() < 1e-6);
    }

    #[test]
    fn report_certificates() {
        let r = params(0.5, 0.5).check(41).unwrap();
        assert!(r.bicontact_ok());
        assert!((r.min_contact_plus - 0.5).abs() < 1e-12);
        assert_eq!(r.argmin, [0.0, 0.0, 0.0]);
        assert!(r.reversed_min <= 0.0);
        let r = params(-0.5, 0.5).check(41).unwrap();
        assert!(r.reversed_min > 0.0);
        assert!(params(2.0, 0.5).check(41).is_err());
    }

    #[test]
    fn cone_check_examples() {
        let t = 4.0;
        let undeformed = params(-1.0, 0.5).cone_domination_check(t, 1.0, 11).unwrap();
        assert!(undeformed.holds);
        assert!((undeformed.max_factor - (-2.0 * t).exp()).abs() < 1e-9);
        let da = params(0.5, 0.5).cone_domination_check(t, 1.0, 11).unwrap();
        assert!(da.holds);
        assert!((da.origin_factor - (-0.5 * t).exp()).abs() < 1e-9);
        assert!(da.max_factor <= (-0.5 * t).exp() + 1e-9);
        assert!(params(0.5, 0.5).cone_domination_check(t, f64::INFINITY, 11).is_err());
        assert!(params(0.5, 0.5).cone_domination_check(t, 1e12, 11).is_err());
        assert!(params(0.5, 0.5).cone_domination_check(2.5 * 0.999, 1.0, 11).is_err());
    }
}
