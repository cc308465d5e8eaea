//! Python bindings: `import richardson`.
//!
//! Domain errors surface as `ValueError`, numerical failures as
//! `RuntimeError`. Couplings and energies are Python `complex` wherever the
//! Rust side is complex. Long computations release the GIL.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use richardson_sl::identities::{self, DegeneratePoint};
use richardson_sl::lattice::{self, LatticeSite};
use richardson_sl::richardson::{self as rich, Coupling, SheetLabel, SpectralSegment};
use richardson_sl::schrodinger::{self, BranchPoint, CriticalKind, CriticalPoint, EigenPair};
use richardson_sl::verify::{self, CriterionResult};
use richardson_sl::Error;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Domain(msg) => PyValueError::new_err(msg),
        other => PyRuntimeError::new_err(other.to_string()),
    }
}

fn label(s: &str) -> PyResult<SheetLabel> {
    s.parse().map_err(py_err)
}

#[pyclass(frozen, name = "EigenPair", module = "richardson")]
struct PyEigenPair(EigenPair);

#[pymethods]
impl PyEigenPair {
    #[getter]
    fn lambda_(&self) -> Complex64 {
        self.0.lambda
    }
    #[getter]
    fn e(&self) -> Complex64 {
        self.0.e
    }
    #[getter]
    fn sheet(&self) -> usize {
        self.0.sheet
    }
    #[getter]
    fn osc(&self) -> Option<usize> {
        self.0.osc
    }
    fn __repr__(&self) -> String {
        format!("EigenPair(sheet={}, lambda_={}, e={}, osc={:?})", self.0.sheet, self.0.lambda, self.0.e, self.0.osc)
    }
}

#[pyclass(frozen, name = "CriticalPoint", module = "richardson")]
struct PyCriticalPoint(CriticalPoint);

#[pymethods]
impl PyCriticalPoint {
    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }
    #[getter]
    fn e(&self) -> f64 {
        self.0.e
    }
    #[getter]
    fn sheet(&self) -> usize {
        self.0.sheet
    }
    /// "max" or "min".
    #[getter]
    fn kind(&self) -> &'static str {
        match self.0.kind {
            CriticalKind::Max => "max",
            CriticalKind::Min => "min",
        }
    }
    #[getter]
    fn exact(&self) -> bool {
        self.0.exact
    }
    /// Residual of the defect condition at this point.
    fn defect(&self, py: Python<'_>) -> PyResult<PyIdentityReport> {
        let p = DegeneratePoint::from(&self.0);
        py.detach(|| identities::defect_check(&p)).map(PyIdentityReport).map_err(py_err)
    }
    fn __repr__(&self) -> String {
        format!("CriticalPoint(sheet={}, kind={:?}, lambda_={}, e={})", self.0.sheet, self.kind(), self.0.lambda, self.0.e)
    }
}

#[pyclass(frozen, name = "BranchPoint", module = "richardson")]
struct PyBranchPoint(BranchPoint);

#[pymethods]
impl PyBranchPoint {
    #[getter]
    fn lambda_(&self) -> Complex64 {
        self.0.lambda
    }
    #[getter]
    fn e(&self) -> Complex64 {
        self.0.e
    }
    #[getter]
    fn sheets(&self) -> (usize, usize) {
        self.0.sheets
    }
    /// Whether a small loop around the point swaps its two sheets.
    fn swaps_sheets(&self, py: Python<'_>) -> PyResult<bool> {
        py.detach(|| schrodinger::monodromy(&self.0)).map(|m| m.swapped).map_err(py_err)
    }
    fn defect(&self, py: Python<'_>) -> PyResult<PyIdentityReport> {
        let p = DegeneratePoint::from(&self.0);
        py.detach(|| identities::defect_check(&p)).map(PyIdentityReport).map_err(py_err)
    }
    fn __repr__(&self) -> String {
        format!("BranchPoint(sheets={:?}, lambda_={}, e={})", self.0.sheets, self.0.lambda, self.0.e)
    }
}

#[pyclass(frozen, name = "Coupling", module = "richardson")]
struct PyCoupling(Coupling);

#[pymethods]
impl PyCoupling {
    #[getter]
    fn lambda_(&self) -> Complex64 {
        self.0.lambda
    }
    /// "R", "iR" or "C".
    #[getter]
    fn kind(&self) -> String {
        self.0.kind.to_string()
    }
    #[getter]
    fn multiplicity(&self) -> usize {
        self.0.multiplicity
    }
    /// Sheet label such as "1+", when the coupling could be labelled.
    #[getter]
    fn label(&self) -> Option<String> {
        self.0.label.map(|l| l.to_string())
    }
    fn __repr__(&self) -> String {
        format!("Coupling(label={:?}, lambda_={}, kind={})", self.label(), self.0.lambda, self.0.kind)
    }
}

#[pyclass(frozen, name = "Segment", module = "richardson")]
struct PySegment(SpectralSegment);

#[pymethods]
impl PySegment {
    #[getter]
    fn sheet(&self) -> String {
        self.0.sheet.to_string()
    }
    #[getter]
    fn kind(&self) -> String {
        self.0.kind.to_string()
    }
    #[getter]
    fn e_lo(&self) -> f64 {
        self.0.e_lo
    }
    #[getter]
    fn e_hi(&self) -> f64 {
        self.0.e_hi
    }
    #[getter]
    fn osc(&self) -> Option<usize> {
        self.0.osc
    }
    /// Coupling at the closing branch point, if any.
    #[getter]
    fn end_lambda(&self) -> Option<Complex64> {
        self.0.end.map(|b| b.lambda)
    }
    /// Schrödinger critical point the closing branch point is the image of.
    #[getter]
    fn end_critical(&self) -> Option<PyCriticalPoint> {
        self.0.end.and_then(|b| b.critical).map(PyCriticalPoint)
    }
    fn __repr__(&self) -> String {
        format!("Segment(sheet={}, kind={}, e_lo={}, e_hi={}, osc={:?})", self.0.sheet, self.0.kind, self.0.e_lo, self.0.e_hi, self.0.osc)
    }
}

#[pyclass(frozen, name = "LatticeSite", module = "richardson")]
struct PyLatticeSite(LatticeSite);

#[pymethods]
impl PyLatticeSite {
    #[getter]
    fn i(&self) -> u64 {
        self.0.i
    }
    #[getter]
    fn j(&self) -> u64 {
        self.0.j
    }
    #[getter]
    fn n(&self) -> u64 {
        self.0.n
    }
    #[getter]
    fn lambda_red(&self) -> i64 {
        self.0.lambda_red
    }
    #[getter]
    fn e_red(&self) -> u64 {
        self.0.e_red
    }
    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda()
    }
    #[getter]
    fn e(&self) -> f64 {
        self.0.e()
    }
    fn __repr__(&self) -> String {
        format!("LatticeSite(i={}, j={}, n={}, lambda_red={}, e_red={})", self.0.i, self.0.j, self.0.n, self.0.lambda_red, self.0.e_red)
    }
}

#[pyclass(frozen, name = "IdentityReport", module = "richardson")]
struct PyIdentityReport(identities::IdentityReport);

#[pymethods]
impl PyIdentityReport {
    #[getter]
    fn name(&self) -> &str {
        &self.0.name
    }
    #[getter]
    fn location(&self) -> (Complex64, Complex64) {
        self.0.location
    }
    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }
    #[getter]
    fn tolerance(&self) -> f64 {
        self.0.tolerance
    }
    #[getter]
    fn passed(&self) -> bool {
        self.0.pass
    }
    fn __repr__(&self) -> String {
        format!("IdentityReport({:?}, residual={:e}, tolerance={:e}, passed={})", self.0.name, self.0.residual, self.0.tolerance, self.0.pass)
    }
}

#[pyclass(frozen, name = "CriterionResult", module = "richardson")]
struct PyCriterionResult(CriterionResult);

#[pymethods]
impl PyCriterionResult {
    #[getter]
    fn id(&self) -> usize {
        self.0.id
    }
    #[getter]
    fn name(&self) -> &str {
        self.0.name
    }
    #[getter]
    fn passed(&self) -> bool {
        self.0.pass
    }
    #[getter]
    fn detail(&self) -> &str {
        &self.0.detail
    }
    fn __repr__(&self) -> String {
        self.0.to_string()
    }
}

/// Characteristic function; zero exactly at eigenpairs.
#[pyfunction]
fn char_d(lambda_: Complex64, e: Complex64) -> Complex64 {
    richardson_sl::charfun::char_d(lambda_, e)
}

/// `n`-th real eigenvalue (1-based) at real coupling.
#[pyfunction]
fn eigenvalue(lambda_: f64, n: usize) -> PyResult<f64> {
    schrodinger::eigenvalue(lambda_, n).map_err(py_err)
}

#[pyfunction]
fn eigenpairs_at(lambda_: f64, n_max: usize) -> PyResult<Vec<PyEigenPair>> {
    schrodinger::eigenpairs_at(lambda_, n_max)
        .map(|v| v.into_iter().map(PyEigenPair).collect())
        .map_err(py_err)
}

#[pyfunction]
fn critical_catalog(py: Python<'_>, n_max: usize) -> PyResult<Vec<PyCriticalPoint>> {
    py.detach(|| schrodinger::critical_catalog(n_max))
        .map(|v| v.into_iter().map(PyCriticalPoint).collect())
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (n_max = 5, radius = 70.0))]
fn branch_catalog(py: Python<'_>, n_max: usize, radius: f64) -> PyResult<Vec<PyBranchPoint>> {
    py.detach(|| schrodinger::branch_catalog(n_max, radius))
        .map(|v| v.into_iter().map(PyBranchPoint).collect())
        .map_err(py_err)
}

/// Real-E locus through the sheet's critical point nearest `lambda_`;
/// returns `(kind, points)` with points as `(complex λ, E)`.
#[pyfunction]
#[pyo3(signature = (sheet, lambda_ = 0.0))]
fn trace_locus(py: Python<'_>, sheet: usize, lambda_: f64) -> PyResult<(String, Vec<(Complex64, f64)>)> {
    let locus = py
        .detach(|| {
            let start = schrodinger::critical_catalog(sheet)?
                .into_iter()
                .filter(|p| p.sheet == sheet)
                .min_by(|a, b| (a.lambda - lambda_).abs().total_cmp(&(b.lambda - lambda_).abs()))
                .ok_or_else(|| Error::Domain(format!("no critical point on sheet {sheet}")))?;
            schrodinger::trace_real_locus(&start)
        })
        .map_err(py_err)?;
    let points = locus.points.iter().map(|p| (p.lambda, p.e)).collect();
    Ok((format!("{:?}", locus.kind), points))
}

#[pyfunction]
#[pyo3(signature = (e, radius = 60.0))]
fn eigencouplings(py: Python<'_>, e: f64, radius: f64) -> PyResult<Vec<PyCoupling>> {
    py.detach(|| rich::eigencouplings(e, radius))
        .map(|s| s.couplings.into_iter().map(PyCoupling).collect())
        .map_err(py_err)
}

/// Continued coupling on sheet `label` ("1+", "2-", ...) at energy `e`.
#[pyfunction]
fn coupling_at(py: Python<'_>, label: &str, e: f64) -> PyResult<Complex64> {
    let l = self::label(label)?;
    py.detach(|| rich::coupling_at(l, e)).map_err(py_err)
}

#[pyfunction]
fn classify_segments(py: Python<'_>, label: &str, e_lo: f64, e_hi: f64) -> PyResult<Vec<PySegment>> {
    let l = self::label(label)?;
    py.detach(|| rich::classify_segments(l, e_lo, e_hi))
        .map(|v| v.into_iter().map(PySegment).collect())
        .map_err(py_err)
}

/// Number of real couplings with `m` nodes, for `m = 0..=m_max`.
#[pyfunction]
#[pyo3(signature = (e, m_max = 4, radius = None))]
fn oscillation_census(py: Python<'_>, e: f64, m_max: usize, radius: Option<f64>) -> PyResult<Vec<usize>> {
    let r = radius.unwrap_or_else(|| rich::census_radius(e, m_max));
    py.detach(|| rich::oscillation_census(e, m_max, r)).map_err(py_err)
}

#[pyfunction]
fn zettl_bound(e: f64) -> usize {
    rich::zettl_bound(e)
}

#[pyfunction]
fn sheet_maxima(n: u64) -> Vec<PyLatticeSite> {
    lattice::sheet_maxima(n).into_iter().map(PyLatticeSite).collect()
}

#[pyfunction]
fn defective_multiplicity(e_red: u64) -> PyResult<u64> {
    lattice::defective_multiplicity(e_red).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (target, ceiling = lattice::DEFAULT_SEARCH_CEILING))]
fn smallest_with_multiplicity(target: u64, ceiling: u64) -> PyResult<u64> {
    lattice::smallest_with_multiplicity(target, ceiling).map_err(py_err)
}

/// `(agreement, reciprocity)` reports for the slope identities at an eigenpair.
#[pyfunction]
fn derivative_check(py: Python<'_>, lambda_: Complex64, e: Complex64) -> PyResult<(PyIdentityReport, PyIdentityReport)> {
    py.detach(|| identities::derivative_check(lambda_, e))
        .map(|c| (PyIdentityReport(c.agreement), PyIdentityReport(c.reciprocity)))
        .map_err(py_err)
}

#[pyfunction]
fn im_identity(lambda_: Complex64, e: Complex64) -> PyResult<PyIdentityReport> {
    identities::im_identity(lambda_, e).map(PyIdentityReport).map_err(py_err)
}

/// Acceptance criteria; all of them when `criteria` is omitted.
#[pyfunction]
#[pyo3(signature = (criteria = None))]
fn run_verification(py: Python<'_>, criteria: Option<Vec<usize>>) -> PyResult<Vec<PyCriterionResult>> {
    let ids = match criteria {
        Some(ids) => ids,
        None => verify::CRITERIA.iter().map(|(id, _)| *id).collect(),
    };
    if let Some(bad) = ids.iter().find(|id| !verify::CRITERIA.iter().any(|(k, _)| k == *id)) {
        return Err(PyValueError::new_err(format!("no criterion {bad}")));
    }
    Ok(py.detach(|| ids.into_iter().map(verify::run_criterion).map(PyCriterionResult).collect()))
}

#[pymodule]
fn richardson(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UNIT", lattice::UNIT)?;
    m.add_class::<PyEigenPair>()?;
    m.add_class::<PyCriticalPoint>()?;
    m.add_class::<PyBranchPoint>()?;
    m.add_class::<PyCoupling>()?;
    m.add_class::<PySegment>()?;
    m.add_class::<PyLatticeSite>()?;
    m.add_class::<PyIdentityReport>()?;
    m.add_class::<PyCriterionResult>()?;
    m.add_function(wrap_pyfunction!(char_d, m)?)?;
    m.add_function(wrap_pyfunction!(eigenvalue, m)?)?;
    m.add_function(wrap_pyfunction!(eigenpairs_at, m)?)?;
    m.add_function(wrap_pyfunction!(critical_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(branch_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(trace_locus, m)?)?;
    m.add_function(wrap_pyfunction!(eigencouplings, m)?)?;
    m.add_function(wrap_pyfunction!(coupling_at, m)?)?;
    m.add_function(wrap_pyfunction!(classify_segments, m)?)?;
    m.add_function(wrap_pyfunction!(oscillation_census, m)?)?;
    m.add_function(wrap_pyfunction!(zettl_bound, m)?)?;
    m.add_function(wrap_pyfunction!(sheet_maxima, m)?)?;
    m.add_function(wrap_pyfunction!(defective_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(smallest_with_multiplicity, m)?)?;
    m.add_function(wrap_pyfunction!(derivative_check, m)?)?;
    m.add_function(wrap_pyfunction!(im_identity, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
