//! Python bindings: model parameters, spectra, eigenfunctions and the
//! verification suite.

use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gup_hydrogen::export::{spectrum_report, wavefunction_diagnostics};
use gup_hydrogen::localization::{ml_moments, ml_overlap, quasiposition_samples, MLState};
use gup_hydrogen::coordinate::{coordinate_samples, dirichlet_check};
use gup_hydrogen::semiclassical::{action_integral, energy_semiclassical, wkb_phase_residual};
use gup_hydrogen::spectrum::{
    energy_closed_form, energy_perturbative, energy_root_found_with_tol, energy_single_valued, m_of_n,
    moment_p4_cutoff, PerturbativeOrder,
};
use gup_hydrogen::verify::{run_verification, VerifyConfig};
use gup_hydrogen::wavefunction::{eval_phi, integral_condition, schrodinger_residual, EigenfunctionContext, DEFAULT_NODES};
use gup_hydrogen::{interval_half_width, Error, MomentumGrid, Tolerances};

fn to_py(e: Error) -> PyErr {
    if e.is_non_convergence() {
        PyArithmeticError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

/// Coupling α > 0 and deformation β ≥ 0.
#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
pub struct PyModelParams {
    inner: gup_hydrogen::ModelParams,
}

#[pymethods]
impl PyModelParams {
    #[new]
    #[pyo3(signature = (alpha, beta = 0.0))]
    fn new(alpha: f64, beta: f64) -> PyResult<Self> {
        Ok(Self {
            inner: gup_hydrogen::ModelParams::new(alpha, beta).map_err(to_py)?,
        })
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta()
    }

    /// π/(2√β), the half-width of the momentum interval.
    fn half_width(&self) -> PyResult<f64> {
        interval_half_width(&self.inner).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!("ModelParams(alpha={}, beta={})", self.inner.alpha(), self.inner.beta())
    }
}

#[pyclass(name = "EnergyLevel", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
pub struct PyEnergyLevel {
    inner: gup_hydrogen::EnergyLevel,
}

#[pymethods]
impl PyEnergyLevel {
    #[getter]
    fn n(&self) -> u32 {
        self.inner.n
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn energy(&self) -> f64 {
        self.inner.energy
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    fn __repr__(&self) -> String {
        format!(
            "EnergyLevel(n={}, energy={:e}, method='{}')",
            self.inner.n, self.inner.energy, self.inner.method
        )
    }
}

fn level(result: gup_hydrogen::Result<gup_hydrogen::EnergyLevel>) -> PyResult<PyEnergyLevel> {
    result.map(|inner| PyEnergyLevel { inner }).map_err(to_py)
}

/// Energy level by the named method: closed_form, root_found, semiclassical
/// or single_valued.
#[pyfunction]
#[pyo3(signature = (params, n, method = "closed_form", tol = 1e-12))]
fn energy(params: PyModelParams, n: u32, method: &str, tol: f64) -> PyResult<PyEnergyLevel> {
    let p = &params.inner;
    match method {
        "closed_form" => level(energy_closed_form(p, n)),
        "root_found" => level(energy_root_found_with_tol(p, n, tol)),
        "semiclassical" => level(energy_semiclassical(p, n)),
        "single_valued" => level(energy_single_valued(p, n)),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

/// E_n expanded to order √β or β.
#[pyfunction]
#[pyo3(signature = (params, n, order = "beta"))]
fn energy_perturbative_py(params: PyModelParams, n: u32, order: &str) -> PyResult<f64> {
    let order = match order {
        "sqrt_beta" => PerturbativeOrder::SqrtBeta,
        "beta" => PerturbativeOrder::Beta,
        other => return Err(PyValueError::new_err(format!("unknown order {other:?}"))),
    };
    energy_perturbative(&params.inner, n, order).map_err(to_py)
}

#[pyfunction]
fn single_valued_index(params: PyModelParams, n: u32) -> PyResult<f64> {
    m_of_n(&params.inner, n).map_err(to_py)
}

#[pyfunction]
fn action(params: PyModelParams, epsilon: f64) -> PyResult<f64> {
    action_integral(&params.inner, epsilon).map_err(to_py)
}

#[pyfunction]
fn wkb_residual(params: PyModelParams, energy: f64, x: f64) -> PyResult<f64> {
    wkb_phase_residual(&params.inner, energy, x).map_err(to_py)
}

#[pyfunction]
fn p4_moment(params: PyModelParams, n: u32, cutoff: f64) -> PyResult<f64> {
    moment_p4_cutoff(&params.inner, n, cutoff).map_err(to_py)
}

#[pyfunction]
fn overlap(params: PyModelParams, xi: f64, xi_prime: f64) -> PyResult<f64> {
    ml_overlap(&params.inner, xi, xi_prime).map_err(to_py)
}

/// (⟨X⟩, ΔX) of the maximally localized state at ξ.
#[pyfunction]
fn localized_moments(params: PyModelParams, xi: f64) -> PyResult<(f64, f64)> {
    ml_moments(&MLState::new(params.inner, xi).map_err(to_py)?).map_err(to_py)
}

/// Momentum-space eigenfunction φ_n on a clustered Gauss–Legendre grid.
#[pyclass(name = "Eigenfunction", frozen, skip_from_py_object)]
pub struct PyEigenfunction {
    ctx: EigenfunctionContext,
    grid: MomentumGrid,
}

#[pymethods]
impl PyEigenfunction {
    #[new]
    #[pyo3(signature = (params, n, grid_points = DEFAULT_NODES))]
    fn new(params: PyModelParams, n: u32, grid_points: usize) -> PyResult<Self> {
        let lvl = energy_closed_form(&params.inner, n).map_err(to_py)?;
        let ctx = EigenfunctionContext::new(params.inner, lvl);
        let grid = ctx.grid(grid_points).map_err(to_py)?;
        Ok(Self { ctx, grid })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.ctx.epsilon()
    }

    #[getter]
    fn normalization(&self) -> f64 {
        self.ctx.normalization()
    }

    #[getter]
    fn c(&self) -> Complex64 {
        self.ctx.c()
    }

    fn __call__(&self, p: f64) -> PyResult<Complex64> {
        eval_phi(&self.ctx, p).map_err(to_py)
    }

    /// Grid nodes and φ at those nodes.
    fn sample(&self) -> PyResult<(Vec<f64>, Vec<Complex64>)> {
        let s = self.ctx.sample(&self.grid).map_err(to_py)?;
        Ok((s.abscissae, s.values))
    }

    fn norm(&self) -> PyResult<f64> {
        self.ctx.sample(&self.grid).and_then(|s| s.norm_squared(&self.grid)).map_err(to_py)
    }

    fn integral(&self) -> PyResult<Complex64> {
        integral_condition(&self.ctx, &self.grid).map_err(to_py)
    }

    fn schrodinger_residual(&self) -> PyResult<f64> {
        schrodinger_residual(&self.ctx, &self.grid).map_err(to_py)
    }

    fn quasiposition(&self, xis: Vec<f64>) -> PyResult<Vec<Complex64>> {
        Ok(quasiposition_samples(&self.ctx, &self.grid, &xis).map_err(to_py)?.values)
    }

    /// η(x), a formal solution rather than a physical wave function.
    fn coordinate(&self, xs: Vec<f64>) -> PyResult<Vec<Complex64>> {
        Ok(coordinate_samples(&self.ctx, &self.grid, &xs).map_err(to_py)?.values)
    }

    fn dirichlet_ratio(&self) -> PyResult<f64> {
        dirichlet_check(&self.ctx, &self.grid).map_err(to_py)
    }

    fn diagnostics<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = wavefunction_diagnostics(&self.ctx, &self.grid).map_err(to_py)?;
        let dict = PyDict::new(py);
        dict.set_item("n", d.n)?;
        for (k, v) in [
            ("alpha", d.alpha),
            ("beta", d.beta),
            ("epsilon", d.epsilon),
            ("energy", d.energy),
            ("normalization_a", d.normalization_a),
            ("abs_im_c", d.abs_im_c),
            ("abs_integral_phi", d.abs_integral_phi),
            ("norm", d.norm),
            ("schrodinger_residual", d.schrodinger_residual),
        ] {
            dict.set_item(k, v)?;
        }
        dict.set_item("c", Complex64::new(d.c_re, d.c_im))?;
        Ok(dict)
    }
}

/// Side-by-side spectrum for levels first..=last as a JSON document.
#[pyfunction]
#[pyo3(signature = (params, first = 1, last = 5))]
fn spectrum_json(params: PyModelParams, first: u32, last: u32) -> PyResult<String> {
    spectrum_report(&params.inner, first..=last, &Tolerances::default())
        .and_then(|r| r.to_json())
        .map_err(to_py)
}

/// Runs the invariant suite; returns (all passed, JSON report).
#[pyfunction]
#[pyo3(signature = (params, first = 1, last = 10, grid_points = DEFAULT_NODES))]
fn verify(py: Python<'_>, params: PyModelParams, first: u32, last: u32, grid_points: usize) -> PyResult<(bool, String)> {
    let config = VerifyConfig {
        levels: first..=last,
        grid_points,
        tolerances: Tolerances::default(),
    };
    let report = py
        .detach(|| run_verification(&params.inner, &config))
        .map_err(to_py)?;
    Ok((report.passed(), report.to_json().map_err(to_py)?))
}

pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModelParams>()?;
    m.add_class::<PyEnergyLevel>()?;
    m.add_class::<PyEigenfunction>()?;
    m.add_function(wrap_pyfunction!(energy, m)?)?;
    m.add("energy_perturbative", wrap_pyfunction!(energy_perturbative_py, m)?)?;
    m.add_function(wrap_pyfunction!(single_valued_index, m)?)?;
    m.add_function(wrap_pyfunction!(action, m)?)?;
    m.add_function(wrap_pyfunction!(wkb_residual, m)?)?;
    m.add_function(wrap_pyfunction!(p4_moment, m)?)?;
    m.add_function(wrap_pyfunction!(overlap, m)?)?;
    m.add_function(wrap_pyfunction!(localized_moments, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum_json, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}

#[pymodule]
#[pyo3(name = "gup_hydrogen")]
fn python_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
