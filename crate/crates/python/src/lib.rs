//! Python bindings for `torsionlab`.

use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use torsionlab::numerics::hurwitz_zeta as hurwitz;
use torsionlab::rs_torsion;
use torsionlab::spaces::{self, circle_spectrum, torus_form_spectra};
use torsionlab::spectral::{self, MellinSplit};
use torsionlab::{ComplexFile, Error, LensModel, Matrix, TorsionMethod};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Singular { .. } | Error::Pole { .. } => PyArithmeticError::new_err(e.to_string()),
        Error::Unsupported(_) => PyNotImplementedError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn method(name: &str) -> PyResult<TorsionMethod> {
    match name {
        "def" | "definition" => Ok(TorsionMethod::Definition),
        "laplacian" => Ok(TorsionMethod::Laplacian),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

/// A based chain complex; `boundaries[i]` is the matrix of `d_{i+1}` as a
/// list of rows.
#[pyclass(name = "ChainComplex", module = "pytorsionlab")]
struct PyChainComplex {
    inner: torsionlab::ChainComplex,
}

#[pymethods]
impl PyChainComplex {
    #[new]
    #[pyo3(signature = (dims, boundaries, label = String::new()))]
    fn new(dims: Vec<usize>, boundaries: Vec<Vec<Vec<f64>>>, label: String) -> PyResult<Self> {
        let doc = ComplexFile {
            dims,
            boundaries,
            label: Some(label),
            ..Default::default()
        };
        let inner = doc.to_chain_complex().map_err(py_err)?;
        inner.validate().map_err(py_err)?;
        Ok(PyChainComplex { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = ComplexFile::parse(text).map_err(py_err)?;
        Ok(PyChainComplex {
            inner: doc.to_chain_complex().map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        ComplexFile::from_chain_complex(&self.inner).write()
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    fn homology_dims(&self) -> PyResult<Vec<usize>> {
        self.inner.homology_dims().map_err(py_err)
    }

    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    #[pyo3(signature = (method = "def"))]
    fn torsion(&self, method: &str) -> PyResult<f64> {
        Ok(self
            .inner
            .torsion(self::method(method)?)
            .map_err(py_err)?
            .tau)
    }

    #[pyo3(signature = (method = "def"))]
    fn log_torsion(&self, method: &str) -> PyResult<f64> {
        Ok(self
            .inner
            .torsion(self::method(method)?)
            .map_err(py_err)?
            .log_tau)
    }

    fn dual(&self) -> Self {
        PyChainComplex {
            inner: self.inner.dual(),
        }
    }

    fn tensor(&self, other: &PyChainComplex) -> Self {
        PyChainComplex {
            inner: self.inner.tensor_product(&other.inner),
        }
    }

    fn __repr__(&self) -> String {
        format!("ChainComplex(dims={:?})", self.inner.dims())
    }
}

/// Torsion of the lens space `L(p, q)` for the rotation character `k`.
#[pyfunction]
fn lens_torsion(p: u64, q: u64, k: u64) -> PyResult<f64> {
    let model = LensModel::new(p, q, k).map_err(py_err)?;
    let c = spaces::lens_complex(&model);
    Ok(c.torsion_def(None).map_err(py_err)?.tau)
}

/// Sorted torsion values of `L(p, q)` over `k = 1..p-1`.
#[pyfunction]
fn lens_torsion_multiset(p: u64, q: u64) -> PyResult<Vec<f64>> {
    spaces::lens_torsion_multiset(p, q).map_err(py_err)
}

#[pyfunction]
fn hurwitz_zeta(s: f64, a: f64) -> PyResult<(f64, f64)> {
    hurwitz(s, a).map_err(py_err)
}

/// `(value, error_estimate)` of the zeta function of the circle Laplacian on
/// functions with holonomy angle `theta`.
#[pyfunction]
#[pyo3(signature = (length, s, theta = 0.0))]
fn circle_zeta(length: f64, s: f64, theta: f64) -> PyResult<(f64, f64)> {
    let spec = circle_spectrum(length, theta)
        .map_err(py_err)?
        .degrees
        .remove(0);
    let z = spectral::zeta_eval(&spec, s, &MellinSplit::default()).map_err(py_err)?;
    Ok((z.value, z.error_estimate))
}

#[pyfunction]
#[pyo3(signature = (length, theta = 0.0))]
fn circle_det(length: f64, theta: f64) -> PyResult<f64> {
    let spec = circle_spectrum(length, theta)
        .map_err(py_err)?
        .degrees
        .remove(0);
    spectral::zeta_det(&spec, &MellinSplit::default()).map_err(py_err)
}

/// `log T` of the circle of length `length` with holonomy angle `theta`.
#[pyfunction]
fn circle_log_analytic_torsion(length: f64, theta: f64) -> PyResult<f64> {
    let spectra = circle_spectrum(length, theta).map_err(py_err)?;
    rs_torsion::log_analytic_torsion(&spectra.degrees, &MellinSplit::default()).map_err(py_err)
}

/// `log T` of the flat torus whose lattice is generated by the rows of `basis`.
#[pyfunction]
fn torus_log_analytic_torsion(basis: Vec<Vec<f64>>) -> PyResult<f64> {
    let n = basis.len();
    let m = Matrix::from_rows(&basis, n).map_err(py_err)?;
    let spectra = torus_form_spectra(&m).map_err(py_err)?;
    rs_torsion::log_analytic_torsion(&spectra.degrees, &MellinSplit::default()).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (theta, levels = 0))]
fn circle_log_reidemeister_torsion(theta: f64, levels: usize) -> PyResult<f64> {
    rs_torsion::circle_reidemeister_log_torsion(theta, levels).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (p, k, subdiv = 2))]
fn cheeger_muller_check<'py>(
    py: Python<'py>,
    p: u64,
    k: u64,
    subdiv: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let c = rs_torsion::cheeger_muller_check(p, k, subdiv).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("p", c.p)?;
    d.set_item("k", c.k)?;
    d.set_item("theta", c.theta)?;
    d.set_item("log_tau", c.log_tau_combinatorial)?;
    d.set_item("log_T", c.log_t_analytic)?;
    d.set_item("gap", c.gap)?;
    Ok(d)
}

#[pymodule]
fn pytorsionlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyChainComplex>()?;
    m.add_function(wrap_pyfunction!(lens_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(lens_torsion_multiset, m)?)?;
    m.add_function(wrap_pyfunction!(hurwitz_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(circle_zeta, m)?)?;
    m.add_function(wrap_pyfunction!(circle_det, m)?)?;
    m.add_function(wrap_pyfunction!(circle_log_analytic_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(torus_log_analytic_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(circle_log_reidemeister_torsion, m)?)?;
    m.add_function(wrap_pyfunction!(cheeger_muller_check, m)?)?;
    Ok(())
}
