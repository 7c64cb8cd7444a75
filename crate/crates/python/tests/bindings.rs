use pyo3::prelude::*;
use pyo3::types::PyModule;

fn with_module<F: for<'py> FnOnce(Python<'py>, &Bound<'py, PyModule>)>(f: F) {
    Python::attach(|py| {
        let m = PyModule::new(py, "gup_hydrogen").unwrap();
        gup_hydrogen_py::register(&m).unwrap();
        f(py, &m);
    });
}

fn eval<'py>(py: Python<'py>, m: &Bound<'py, PyModule>, code: &str) -> Bound<'py, PyAny> {
    let locals = pyo3::types::PyDict::new(py);
    locals.set_item("g", m).unwrap();
    let code = std::ffi::CString::new(code).unwrap();
    py.eval(&code, None, Some(&locals)).unwrap()
}

#[test]
fn ground_state_energy() {
    with_module(|py, m| {
        let e: f64 = eval(py, m, "g.energy(g.ModelParams(1.0, 0.01), 1).energy").extract().unwrap();
        assert!((e + 0.22774424948338864).abs() < 1e-15);
        let root: f64 = eval(py, m, "g.energy(g.ModelParams(1.0, 0.01), 1, 'root_found').energy")
            .extract()
            .unwrap();
        assert!((root / e - 1.0).abs() < 1e-10);
    });
}

#[test]
fn invalid_parameters_raise_value_error() {
    with_module(|py, m| {
        let locals = pyo3::types::PyDict::new(py);
        locals.set_item("g", m).unwrap();
        let err = py.eval(c"g.ModelParams(-1.0, 0.1)", None, Some(&locals)).unwrap_err();
        assert!(err.is_instance_of::<pyo3::exceptions::PyValueError>(py));
    });
}

#[test]
fn eigenfunction_diagnostics() {
    with_module(|py, m| {
        let norm: f64 = eval(py, m, "g.Eigenfunction(g.ModelParams(1.0, 0.1), 2, 512).norm()")
            .extract()
            .unwrap();
        assert!((norm - 1.0).abs() < 1e-8);
        let im_c: f64 = eval(py, m, "g.Eigenfunction(g.ModelParams(1.0, 0.1), 2, 512).diagnostics()['abs_im_c']")
            .extract()
            .unwrap();
        assert!(im_c < 1e-10);
        let overlap: f64 = eval(py, m, "g.overlap(g.ModelParams(1.0, 0.1), 0.0, 0.0)").extract().unwrap();
        assert!((overlap - 1.0).abs() < 1e-15);
    });
}
