//! Python bindings: `import bfun`.

use bfun_core::arith::{format_rational, UniPoly};
use bfun_core::bernstein::{bhat_poly_with_limit, theorem_poly, BFunctionResult, Method};
use bfun_core::cyclic::cyclic_det;
use bfun_core::radial::verify_radial_identity;
use bfun_core::shift::{
    constant_term, ct_formula as core_ct_formula, shift_report, solve_shift_generator,
    verify_generator, ShiftBounds, ShiftGenerator,
};
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: bfun_core::Error) -> PyErr {
    if e.is_usage() {
        PyValueError::new_err(e.to_string())
    } else {
        PyArithmeticError::new_err(e.to_string())
    }
}

fn coeffs(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(format_rational).collect()
}

/// Result of a b-function computation.
#[pyclass(name = "BFunction", frozen)]
struct PyBFunction {
    inner: BFunctionResult,
}

#[pymethods]
impl PyBFunction {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    /// Coefficients of b-hat, constant term first, as "num/den" strings.
    #[getter]
    fn coeffs(&self) -> Vec<String> {
        coeffs(&self.inner.bhat)
    }

    /// Rational roots as (num, den, multiplicity).
    #[getter]
    fn roots(&self) -> Vec<(i64, i64, usize)> {
        self.inner.report().btilde_roots
    }

    #[getter]
    fn alpha(&self) -> String {
        format_rational(&self.inner.alpha)
    }

    fn matches_theorem(&self) -> bool {
        self.inner.matches_theorem()
    }

    fn report_json(&self) -> String {
        serde_json::to_string(&self.inner.report()).expect("report serializes")
    }

    fn __repr__(&self) -> String {
        format!("BFunction(n={}, bhat={})", self.inner.n, self.inner.bhat)
    }
}

/// Minimal shift operator for `r = -1`.
#[pyclass(name = "ShiftGenerator", frozen)]
struct PyShiftGenerator {
    inner: ShiftGenerator,
}

#[pymethods]
impl PyShiftGenerator {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn order(&self) -> u32 {
        self.inner.order
    }

    #[getter]
    fn nullspace_dim(&self) -> usize {
        self.inner.nullspace_dim
    }

    /// Constant term of the generator as a polynomial in k.
    fn constant_term(&self) -> Vec<String> {
        coeffs(&constant_term(&self.inner.operator))
    }

    /// Operator in LWEYL text form.
    fn lweyl(&self) -> String {
        self.inner.operator.to_text()
    }

    /// Runs all generator checks; True when every one holds.
    fn verify(&self, py: Python<'_>) -> bool {
        py.detach(|| verify_generator(&self.inner).all())
    }

    fn report_json(&self, py: Python<'_>) -> String {
        py.detach(|| {
            let v = verify_generator(&self.inner);
            serde_json::to_string(&shift_report(&self.inner, &v)).expect("report serializes")
        })
    }
}

/// b-hat by sampling and interpolation; `method` is "jets" or "symbolic".
#[pyfunction]
#[pyo3(signature = (n, method = "jets"))]
fn bhat_poly(py: Python<'_>, n: usize, method: &str) -> PyResult<PyBFunction> {
    let method: Method = method.parse().map_err(to_py)?;
    let inner = py
        .detach(|| bhat_poly_with_limit(n, method, 3))
        .map_err(to_py)?;
    Ok(PyBFunction { inner })
}

/// Closed form: (monic coefficients, leading constant).
#[pyfunction]
fn theorem(n: usize) -> (Vec<String>, String) {
    let t = theorem_poly(n);
    (coeffs(&t.btilde), format_rational(&t.alpha))
}

/// The cyclic-pair determinant f in MPOLY text form.
#[pyfunction]
fn cyclic_pair_det(py: Python<'_>, n: usize) -> PyResult<String> {
    py.detach(|| cyclic_det(n).map(|f| f.to_text()))
        .map_err(to_py)
}

/// Radial identity checks as (name, holds) pairs.
#[pyfunction]
fn verify_radial(py: Python<'_>, n: usize) -> PyResult<Vec<(String, bool)>> {
    let rep = py.detach(|| verify_radial_identity(n)).map_err(to_py)?;
    Ok(rep.checks.into_iter().map(|c| (c.name, c.holds)).collect())
}

#[pyfunction]
fn shift_generator(py: Python<'_>, n: usize) -> PyResult<PyShiftGenerator> {
    if n > 3 {
        return Err(PyValueError::new_err(format!(
            "shift generator limited to n <= 3, got {n}"
        )));
    }
    let inner = py
        .detach(|| solve_shift_generator(n, -1, &ShiftBounds::default_for(n)))
        .map_err(to_py)?;
    Ok(PyShiftGenerator { inner })
}

/// Coefficients of the constant-term formula in k.
#[pyfunction]
fn ct_formula(n: usize) -> Vec<String> {
    coeffs(&core_ct_formula(n))
}

#[pymodule]
fn bfun(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBFunction>()?;
    m.add_class::<PyShiftGenerator>()?;
    m.add_function(wrap_pyfunction!(bhat_poly, m)?)?;
    m.add_function(wrap_pyfunction!(theorem, m)?)?;
    m.add_function(wrap_pyfunction!(cyclic_pair_det, m)?)?;
    m.add_function(wrap_pyfunction!(verify_radial, m)?)?;
    m.add_function(wrap_pyfunction!(shift_generator, m)?)?;
    m.add_function(wrap_pyfunction!(ct_formula, m)?)?;
    Ok(())
}
