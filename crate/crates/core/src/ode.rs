//! Fixed-step classical Runge–Kutta.

pub fn rk4_step<const N: usize>(y: &[f64; N], h: f64, f: impl Fn(&[f64; N]) -> [f64; N]) -> [f64; N] {
    let axpy = |a: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(y);
    let k2 = f(&axpy(y, &k1, h / 2.0));
    let k3 = f(&axpy(y, &k2, h / 2.0));
    let k4 = f(&axpy(y, &k3, h));
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Fallible variant: the right-hand side may reject a state.
pub fn try_rk4_step<const N: usize, E>(
    y: &[f64; N],
    h: f64,
    f: impl Fn(&[f64; N]) -> Result<[f64; N], E>,
) -> Result<[f64; N], E> {
    let axpy = |a: &[f64; N], k: &[f64; N], c: f64| {
        let mut out = *a;
        for i in 0..N {
            out[i] += c * k[i];
        }
        out
    };
    let k1 = f(y)?;
    let k2 = f(&axpy(y, &k1, h / 2.0))?;
    let k3 = f(&axpy(y, &k2, h / 2.0))?;
    let k4 = f(&axpy(y, &k3, h))?;
    let mut out = *y;
    for i in 0..N {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}
