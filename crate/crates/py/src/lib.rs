//! Python bindings: `lis_py.System` plus module-level DA and regularity functions.

use lis_core::da::{a_polynomial as a_poly, DAParams};
use lis_core::dynamics;
use lis_core::expr::Expr;
use lis_core::lis::{self, examples, InterpolationSystem, SystemDescriptor};
use lis_core::models::FlowModel;
use lis_core::regularity;
use lis_core::sampling::Sampling;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use serde_json::Value;

create_exception!(lis_py, LisError, PyException);

/// `(x0, x1, x2, s*, residual, normal_expansion)`.
type SkeletonRow = (f64, f64, f64, f64, f64, f64);
/// `(t, s, x0, x1, x2)`.
type FlowRow = (f64, f64, f64, f64, f64);

fn err(e: lis_core::LisError) -> PyErr {
    LisError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => s.into_pyobject(py)?.into_any(),
        Value::Array(a) => {
            let items = a.iter().map(|x| to_py(py, x)).collect::<PyResult<Vec<_>>>()?;
            PyList::new(py, items)?.into_any()
        }
        Value::Object(o) => {
            let d = PyDict::new(py);
            for (k, x) in o {
                d.set_item(k, to_py(py, x)?)?;
            }
            d.into_any()
        }
    })
}

fn serialized<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(v).expect("reports serialize"))
}

/// A Liouville interpolation system.
#[pyclass(name = "System", frozen)]
struct PySystem {
    inner: InterpolationSystem,
}

impl PySystem {
    fn expr(&self, src: &str) -> PyResult<Expr> {
        Expr::parse(src, self.inner.model.coordinate_names()).map_err(err)
    }

    fn wrap(inner: InterpolationSystem) -> Self {
        PySystem { inner }
    }
}

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn from_json(src: &str) -> PyResult<Self> {
        let sys = SystemDescriptor::from_json(src).and_then(|d| d.build()).map_err(err)?;
        Ok(Self::wrap(sys))
    }

    /// One of `bundled_names()`.
    #[staticmethod]
    fn bundled(name: &str) -> PyResult<Self> {
        examples::by_name(name)
            .map(Self::wrap)
            .ok_or_else(|| LisError::new_err(format!("no bundled system `{name}`")))
    }

    #[staticmethod]
    fn bundled_names() -> Vec<&'static str> {
        examples::bundled().into_iter().map(|(n, _)| n).collect()
    }

    #[getter]
    fn window(&self) -> (f64, f64) {
        self.inner.window
    }

    #[getter]
    fn model(&self) -> String {
        self.inner.model.name().to_string()
    }

    fn with_window(&self, a: f64, b: f64) -> PyResult<Self> {
        self.inner.with_window((a, b)).map(Self::wrap).map_err(err)
    }

    /// Coefficients `(E, F)` of `α = E α_u + F α_s`.
    fn alpha_coeffs(&self, s: f64, x: [f64; 3]) -> PyResult<(f64, f64)> {
        self.inner.alpha_coeffs(s, &x).map(|a| a.values()).map_err(err)
    }

    fn liouville_density(&self, s: f64, x: [f64; 3]) -> PyResult<f64> {
        self.inner.liouville_density(s, &x).map_err(err)
    }

    fn reversed_density(&self, s: f64, x: [f64; 3]) -> PyResult<f64> {
        self.inner.reversed_density(s, &x).map_err(err)
    }

    /// `(c_+, c_-)`; both positive for a bi-contact pair.
    fn contact_densities(&self, x: [f64; 3]) -> (f64, f64) {
        let c = self.inner.contact_densities(&x);
        (c.c_plus, c.c_minus)
    }

    #[pyo3(signature = (grid = 16, random = 200, seed = 0))]
    fn validate<'py>(&self, py: Python<'py>, grid: usize, random: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| self.inner.validate(&Sampling::new(grid, random, seed))).map_err(err)?;
        serialized(py, &r)
    }

    fn fibration_min_check<'py>(&self, py: Python<'py>, x: [f64; 3]) -> PyResult<Bound<'py, PyAny>> {
        serialized(py, &self.inner.fibration_min_check(&x).map_err(err)?)
    }

    /// `{"f", "g", "g_over_f", "d_s_g_over_f", "provenance"}`; `method` is
    /// `"auto"`, `"closed_form"` or `"solve"`.
    #[pyo3(signature = (s, x, method = "auto"))]
    fn liouville_field<'py>(&self, py: Python<'py>, s: f64, x: [f64; 3], method: &str) -> PyResult<Bound<'py, PyAny>> {
        let y = match method {
            "auto" => dynamics::liouville_field(&self.inner, s, &x),
            "closed_form" => dynamics::liouville_field_closed_form(&self.inner, s, &x),
            "solve" => dynamics::liouville_field_solve(&self.inner, s, &x),
            other => return Err(LisError::new_err(format!("unknown method `{other}`"))),
        }
        .map_err(err)?;
        serialized(py, &y)
    }

    #[pyo3(signature = (x, tol = dynamics::SKELETON_TOL))]
    fn skeleton(&self, x: [f64; 3], tol: f64) -> PyResult<f64> {
        dynamics::skeleton_solve(&self.inner, &x, tol).map_err(err)
    }

    /// Skeleton rows over an `n × n` base grid.
    #[pyo3(signature = (n, tol = dynamics::SKELETON_TOL))]
    fn skeleton_grid(&self, py: Python<'_>, n: usize, tol: f64) -> PyResult<Vec<SkeletonRow>> {
        let g = py.detach(|| dynamics::skeleton_graph(&self.inner, n, tol)).map_err(err)?;
        Ok(g.samples.iter().map(|p| (p.x[0], p.x[1], p.x[2], p.s, p.residual, p.normal_expansion)).collect())
    }

    fn normal_expansion(&self, x: [f64; 3]) -> PyResult<f64> {
        dynamics::normal_expansion(&self.inner, &x).map_err(err)
    }

    fn sync_check<'py>(&self, py: Python<'py>, x: [f64; 3]) -> PyResult<Bound<'py, PyAny>> {
        serialized(py, &dynamics::sync_check(&self.inner, &x).map_err(err)?)
    }

    fn normal_hyperbolicity<'py>(&self, py: Python<'py>, x: [f64; 3]) -> PyResult<Bound<'py, PyAny>> {
        serialized(py, &dynamics::normal_hyperbolicity(&self.inner, &x).map_err(err)?)
    }

    #[pyo3(signature = (x, t_step = 1.0, iters = 200, tol = 1e-8))]
    fn strong_normal_direction<'py>(
        &self,
        py: Python<'py>,
        x: [f64; 3],
        t_step: f64,
        iters: usize,
        tol: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let r = py.detach(|| dynamics::strong_normal_direction(&self.inner, &x, t_step, iters, tol)).map_err(err)?;
        serialized(py, &r)
    }

    /// Returns `(points, exited)`.
    #[pyo3(signature = (s, x, t_total, dt = 1e-2))]
    fn integrate(&self, py: Python<'_>, s: f64, x: [f64; 3], t_total: f64, dt: f64) -> PyResult<(Vec<FlowRow>, bool)> {
        let tr = py.detach(|| dynamics::integrate_y(&self.inner, (s, x), t_total, dt)).map_err(err)?;
        Ok((tr.points.iter().map(|p| (p.t, p.s, p.x[0], p.x[1], p.x[2])).collect(), tr.exited))
    }

    fn change_of_basis(&self, z_minus: &str, z_plus: &str) -> PyResult<Self> {
        lis::change_of_basis(&self.inner, self.expr(z_minus)?, self.expr(z_plus)?).map(Self::wrap).map_err(err)
    }

    fn horizontal_map(&self, psi: &str) -> PyResult<Self> {
        lis::horizontal_map(&self.inner, self.expr(psi)?, &Sampling::new(16, 0, 0)).map(Self::wrap).map_err(err)
    }

    fn scaling_map(&self, fscale: &str) -> PyResult<Self> {
        lis::scaling_map(&self.inner, self.expr(fscale)?, &Sampling::new(8, 100, 0)).map(Self::wrap).map_err(err)
    }

    #[pyo3(signature = (perturbation, eps_list, grid = 16))]
    fn skeleton_persistence<'py>(
        &self,
        py: Python<'py>,
        perturbation: &str,
        eps_list: Vec<f64>,
        grid: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let p = self.expr(perturbation)?;
        let r = py
            .detach(|| regularity::skeleton_persistence(&self.inner, &p, &eps_list, grid, &Sampling::new(8, 0, 0)))
            .map_err(err)?;
        serialized(py, &r)
    }

    fn __repr__(&self) -> String {
        format!("System(model={:?}, window={:?})", self.inner.model.name(), self.inner.window)
    }
}

#[pyfunction]
fn a_polynomial(x: f64, y: f64) -> f64 {
    a_poly(x, y)
}

#[pyfunction]
#[pyo3(signature = (mu = 1.0, nu = -1.0, nubar = 0.5, eta = 0.5, period = 1.0, grid = 101))]
fn da_check<'py>(py: Python<'py>, mu: f64, nu: f64, nubar: f64, eta: f64, period: f64, grid: usize) -> PyResult<Bound<'py, PyAny>> {
    let p = DAParams { nu, mu, nubar, eta, period };
    let r = py.detach(|| p.check(grid)).map_err(err)?;
    serialized(py, &r)
}

#[pyfunction]
#[pyo3(signature = (model, t_max = 64.0, n_orbits = 64, seed = 0))]
fn bunching_estimate<'py>(py: Python<'py>, model: &str, t_max: f64, n_orbits: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let m = FlowModel::by_name(model).map_err(err)?;
    let r = py.detach(|| regularity::bunching_estimate(&m, t_max, n_orbits, seed)).map_err(err)?;
    serialized(py, &r)
}

#[pyfunction]
#[pyo3(signature = (values, min_lag = 10))]
fn holder_exponent<'py>(py: Python<'py>, values: Vec<f64>, min_lag: usize) -> PyResult<Bound<'py, PyAny>> {
    serialized(py, &regularity::holder_exponent(&values, min_lag).map_err(err)?)
}

#[pymodule]
fn lis_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add("LisError", m.py().get_type::<LisError>())?;
    m.add_function(wrap_pyfunction!(a_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(da_check, m)?)?;
    m.add_function(wrap_pyfunction!(bunching_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(holder_exponent, m)?)?;
    Ok(())
}
