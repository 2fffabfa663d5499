//! Second-order jets in the flow direction X and the interpolation variable s.
//!
//! A [`Jet2`] carries the value of a scalar field together with `X·φ`, `∂_s φ`,
//! `∂_s(X·φ)` and `∂_s² φ`. Arithmetic propagates all five slots exactly, which
//! makes the type a small forward-mode differentiator. `X` and `∂_s` commute on
//! `ℝ × M`, so the mixed slot is symmetric.

use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Jet2 {
    pub value: f64,
    pub d_x: f64,
    pub d_s: f64,
    pub d_sx: f64,
    pub d_ss: f64,
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2::constant(0.0);
    pub const ONE: Jet2 = Jet2::constant(1.0);

    pub const fn new(value: f64, d_x: f64, d_s: f64, d_sx: f64, d_ss: f64) -> Self {
        Jet2 { value, d_x, d_s, d_sx, d_ss }
    }

    pub const fn constant(value: f64) -> Self {
        Jet2::new(value, 0.0, 0.0, 0.0, 0.0)
    }

    /// The coordinate `s` itself.
    pub const fn s_variable(s: f64) -> Self {
        Jet2::new(s, 0.0, 1.0, 0.0, 0.0)
    }

    /// A coordinate function on `M` whose derivative along `X` is `x_rate`.
    pub const fn coordinate(value: f64, x_rate: f64) -> Self {
        Jet2::new(value, x_rate, 0.0, 0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.d_x.is_finite()
            && self.d_s.is_finite()
            && self.d_sx.is_finite()
            && self.d_ss.is_finite()
    }

    pub fn scale(self, c: f64) -> Self {
        Jet2::new(
            c * self.value,
            c * self.d_x,
            c * self.d_s,
            c * self.d_sx,
            c * self.d_ss,
        )
    }

    /// Composition `g ∘ self` given `g(v)`, `g'(v)`, `g''(v)` at `v = self.value`.
    pub fn compose(self, g0: f64, g1: f64, g2: f64) -> Self {
        Jet2 {
            value: g0,
            d_x: g1 * self.d_x,
            d_s: g1 * self.d_s,
            d_sx: g2 * self.d_s * self.d_x + g1 * self.d_sx,
            d_ss: g2 * self.d_s * self.d_s + g1 * self.d_ss,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.value.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.value;
        self.compose(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.compose(c, -s, -c)
    }

    pub fn tan(self) -> Self {
        let t = self.value.tan();
        let sec2 = 1.0 + t * t;
        self.compose(t, sec2, 2.0 * t * sec2)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(s, c, s)
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.value.sinh(), self.value.cosh());
        self.compose(c, s, c)
    }

    pub fn tanh(self) -> Self {
        let t = self.value.tanh();
        let d = 1.0 - t * t;
        self.compose(t, d, -2.0 * t * d)
    }

    pub fn atan(self) -> Self {
        let v = self.value;
        let d = 1.0 / (1.0 + v * v);
        self.compose(v.atan(), d, -2.0 * v * d * d)
    }

    pub fn sqrt(self) -> Self {
        let r = self.value.sqrt();
        self.compose(r, 0.5 / r, -0.25 / (r * self.value))
    }

    pub fn powf(self, p: f64) -> Self {
        let v = self.value;
        if p == 0.0 {
            return Jet2::ONE;
        }
        if p.fract() == 0.0 && p.abs() <= 64.0 {
            let n = p as i32;
            let g2 = if n == 1 { 0.0 } else { p * (p - 1.0) * v.powi(n - 2) };
            return self.compose(v.powi(n), p * v.powi(n - 1), g2);
        }
        self.compose(v.powf(p), p * v.powf(p - 1.0), p * (p - 1.0) * v.powf(p - 2.0))
    }

    pub fn recip(self) -> Self {
        let v = self.value;
        self.compose(1.0 / v, -1.0 / (v * v), 2.0 / (v * v * v))
    }
}

impl From<f64> for Jet2 {
    fn from(c: f64) -> Self {
        Jet2::constant(c)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value + o.value,
            self.d_x + o.d_x,
            self.d_s + o.d_s,
            self.d_sx + o.d_sx,
            self.d_ss + o.d_ss,
        )
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, o: Jet2) -> Jet2 {
        Jet2::new(
            self.value - o.value,
            self.d_x - o.d_x,
            self.d_s - o.d_s,
            self.d_sx - o.d_sx,
            self.d_ss - o.d_ss,
        )
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            value: self.value * o.value,
            d_x: self.d_x * o.value + self.value * o.d_x,
            d_s: self.d_s * o.value + self.value * o.d_s,
            d_sx: self.d_sx * o.value
                + self.d_s * o.d_x
                + self.d_x * o.d_s
                + self.value * o.d_sx,
            d_ss: self.d_ss * o.value + 2.0 * self.d_s * o.d_s + self.value * o.d_ss,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, c: f64) -> Jet2 {
        Jet2 { value: self.value + c, ..self }
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, c: f64) -> Jet2 {
        Jet2 { value: self.value - c, ..self }
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    fn div(self, c: f64) -> Jet2 {
        self.scale(1.0 / c)
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}
