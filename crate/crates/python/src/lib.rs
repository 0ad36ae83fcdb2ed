//! Python bindings. Rationals cross the boundary as `fractions.Fraction`
//! (ints are accepted on input); families are `"first"`, `"second"`,
//! `"third"`.

use pyo3::exceptions::{PyOverflowError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use vasyunin::cli::{cmd_diverge, Command, RunConfig};
use vasyunin::corrections::{self, PlateauWitness};
use vasyunin::diagnostics::{self, AuditWitness};
use vasyunin::{numtheory, Error, Precision, Rational, SeedFamily};

fn err(e: Error) -> PyErr {
    match e {
        Error::Overflow(_) => PyOverflowError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_rational(value: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = value.str()?;
    text.to_str()?
        .parse()
        .map_err(|_| PyValueError::new_err(format!("expected an int or Fraction, got {text}")))
}

fn to_fraction<'py>(py: Python<'py>, q: &Rational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((q.to_string(),))
}

fn fractions<'py>(py: Python<'py>, qs: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let items = qs
        .iter()
        .map(|q| to_fraction(py, q))
        .collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn family(name: &str) -> PyResult<SeedFamily> {
    name.parse().map_err(err)
}

fn precision(digits: u32) -> PyResult<Precision> {
    Precision::new(digits).map_err(err)
}

/// Step function `Σ α_a ⌊x/a⌋`.
#[pyclass(name = "NaturalFunction", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNaturalFunction(vasyunin::NaturalFunction);

#[pymethods]
impl PyNaturalFunction {
    /// `terms` is a list of `(denominator, coefficient)` pairs.
    #[new]
    fn new(terms: Vec<(u64, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let terms = terms
            .iter()
            .map(|(a, c)| Ok((*a, to_rational(c)?)))
            .collect::<PyResult<Vec<_>>>()?;
        vasyunin::NaturalFunction::from_terms(terms)
            .map(Self)
            .map_err(err)
    }

    fn terms<'py>(&self, py: Python<'py>) -> PyResult<Vec<(u64, Bound<'py, PyAny>)>> {
        self.0
            .terms()
            .iter()
            .map(|(a, c)| Ok((*a, to_fraction(py, c)?)))
            .collect()
    }

    fn is_zero_sum(&self) -> bool {
        self.0.is_zero_sum()
    }

    fn sup_bound<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, &self.0.sup_bound())
    }

    fn __call__<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let v = self.0.evaluate(&to_rational(x)?).map_err(err)?;
        to_fraction(py, &v)
    }

    fn value_at<'py>(&self, py: Python<'py>, m: u64) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, &self.0.value_at(m))
    }

    fn jump_at<'py>(&self, py: Python<'py>, m: u64) -> PyResult<Bound<'py, PyAny>> {
        to_fraction(py, &self.0.jump_at(m).map_err(err)?)
    }

    fn period(&self) -> PyResult<u64> {
        self.0.period().map_err(err)
    }

    /// Values on `[m, m+1)` for `m < horizon`.
    fn profile<'py>(&self, py: Python<'py>, horizon: u64) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.0.profile(horizon).values())
    }

    /// Exact `∫ φ(x) x⁻² dx` over `[lower, upper]`.
    fn integrate_weighted<'py>(
        &self,
        py: Python<'py>,
        lower: &Bound<'py, PyAny>,
        upper: &Bound<'py, PyAny>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let v = self
            .0
            .integrate_weighted(&to_rational(lower)?, &to_rational(upper)?)
            .map_err(err)?;
        to_fraction(py, &v)
    }

    /// Closed form, truncation and tail bound of `∫_1^∞ φ(x) x⁻² dx`.
    #[pyo3(signature = (cutoff = vasyunin::natfunc::DEFAULT_CUTOFF, digits = 30))]
    fn integral_to_infinity<'py>(
        &self,
        py: Python<'py>,
        cutoff: u64,
        digits: u32,
    ) -> PyResult<Bound<'py, PyDict>> {
        let p = precision(digits)?;
        let i = self.0.integral_to_infinity(cutoff).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("closed_form", i.closed_form().to_string())?;
        d.set_item("closed_form_decimal", i.closed_form().render(p))?;
        d.set_item("truncated", to_fraction(py, i.truncated())?)?;
        d.set_item("tail_bound", to_fraction(py, i.tail_bound())?)?;
        d.set_item("cutoff", i.cutoff())?;
        d.set_item("within_tail_bound", i.within_tail_bound(p))?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        let terms: Vec<String> = self
            .0
            .terms()
            .iter()
            .map(|(a, c)| format!("({a}, {c})"))
            .collect();
        format!("NaturalFunction([{}])", terms.join(", "))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

/// `φ_n = Σ_{k<=n} c_k s_k` for one seed family.
#[pyclass(name = "Correction", frozen)]
struct PyCorrection(vasyunin::Correction);

#[pymethods]
impl PyCorrection {
    #[getter]
    fn family(&self) -> &'static str {
        self.0.family().name()
    }

    #[getter]
    fn n(&self) -> u64 {
        self.0.n()
    }

    fn coeffs<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        fractions(py, self.0.coeffs())
    }

    fn phi(&self) -> PyNaturalFunction {
        PyNaturalFunction(self.0.phi().clone())
    }

    /// `None` on success, else `(index, value)` of the first bad interval.
    fn verify_plateau<'py>(
        &self,
        py: Python<'py>,
    ) -> PyResult<Option<(u64, Bound<'py, PyAny>)>> {
        match corrections::verify_plateau(&self.0) {
            PlateauWitness::Pass { .. } => Ok(None),
            PlateauWitness::Fail { index, value } => Ok(Some((index, to_fraction(py, &value)?))),
        }
    }

    /// First family only.
    fn to_canonical(&self) -> PyResult<PyNaturalFunction> {
        corrections::to_canonical(&self.0)
            .map(PyNaturalFunction)
            .map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Correction(family={:?}, n={})", self.0.family().name(), self.0.n())
    }
}

#[pyfunction]
fn mobius(n: u64) -> PyResult<i32> {
    numtheory::mobius(n).map_err(err)
}

#[pyfunction]
fn coeff_closed(k: u64) -> PyResult<i64> {
    numtheory::coeff_closed(k).map_err(err)
}

#[pyfunction]
fn seed(family_name: &str, n: u64) -> PyResult<PyNaturalFunction> {
    family(family_name)?
        .seed(n)
        .map(PyNaturalFunction)
        .map_err(err)
}

#[pyfunction]
fn build_correction(family_name: &str, n: u64) -> PyResult<PyCorrection> {
    corrections::build_correction(family(family_name)?, n)
        .map(PyCorrection)
        .map_err(err)
}

/// `‖φ_n - φ_{n-1}‖₁` truncated at `cutoff`, with its tail bound.
#[pyfunction]
fn delta_norm<'py>(
    py: Python<'py>,
    family_name: &str,
    n: u64,
    cutoff: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let est = diagnostics::delta_norm(family(family_name)?, n, cutoff).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("truncated", to_fraction(py, est.truncated())?)?;
    d.set_item("tail_bound", to_fraction(py, est.tail_bound())?)?;
    d.set_item("lower_bound", to_fraction(py, &est.lower_bound())?)?;
    d.set_item("upper_bound", to_fraction(py, &est.upper_bound())?)?;
    d.set_item("cutoff", est.cutoff())?;
    Ok(d)
}

/// The `diverge` table as a dict with `metadata` and `rows`.
#[pyfunction]
#[pyo3(signature = (family_name, n_max, x = None, digits = 50))]
fn divergence_report<'py>(
    py: Python<'py>,
    family_name: &str,
    n_max: u64,
    x: Option<u64>,
    digits: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = RunConfig::new(Command::Diverge, family(family_name)?);
    cfg.n_max = Some(n_max);
    cfg.cutoff = x;
    cfg.precision = precision(digits)?;
    cfg.validate().map_err(err)?;
    let report = cmd_diverge(&cfg).map_err(err)?;
    let json = serde_json::to_string(&report).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((json,))
}

/// `None` if the Dirichlet identity holds for `m <= limit`, else the first
/// failing `(m, residual)`.
#[pyfunction]
fn identity_audit(limit: u64) -> PyResult<Option<(u64, i128)>> {
    match diagnostics::identity_audit(limit).map_err(err)? {
        AuditWitness::Pass { .. } => Ok(None),
        AuditWitness::Fail { m, residual } => Ok(Some((m, residual))),
    }
}

#[pymodule]
#[pyo3(name = "vasyunin")]
pub fn vasyunin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNaturalFunction>()?;
    m.add_class::<PyCorrection>()?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(coeff_closed, m)?)?;
    m.add_function(wrap_pyfunction!(seed, m)?)?;
    m.add_function(wrap_pyfunction!(build_correction, m)?)?;
    m.add_function(wrap_pyfunction!(delta_norm, m)?)?;
    m.add_function(wrap_pyfunction!(divergence_report, m)?)?;
    m.add_function(wrap_pyfunction!(identity_audit, m)?)?;
    Ok(())
}
