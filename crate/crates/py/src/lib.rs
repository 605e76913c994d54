use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;

use weylnorm::catalog;
use weylnorm::document::Document;
use weylnorm::extension::{self, CheckPlan, ExtensionCocycle};
use weylnorm::lattice::{IntMatrix, StrictMarking};
use weylnorm::report::{self, NtOptions};
use weylnorm::rootdata::{self, MarkedReflectionLattice, Root};
use weylnorm::selftest::{self, Level};
use weylnorm::twoadic::{self, CompleteMarkedLattice};
use weylnorm::Error;

create_exception!(weylnorm_py, WeylnormError, PyException, "Error raised by the weylnorm library.");
create_exception!(weylnorm_py, ParseError, WeylnormError, "Malformed input document.");

fn err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. } => ParseError::new_err(e.to_string()),
        e => WeylnormError::new_err(e.to_string()),
    }
}

type Rows = Vec<Vec<BigInt>>;

/// Serialize a report and load it as Python data.
fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| WeylnormError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse(text: &str) -> PyResult<Document> {
    Document::parse(text).map_err(err)
}

/// A lattice with a finite reflection group and strict markings of its reflections.
#[pyclass(module = "weylnorm_py", name = "Lattice", frozen)]
struct PyLattice {
    inner: MarkedReflectionLattice,
}

#[pymethods]
impl PyLattice {
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(Self { inner: catalog::build_entry(name).map_err(err)?.lattice })
    }

    #[staticmethod]
    fn from_document(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse(text)?.to_lattice().map_err(err)? })
    }

    /// Generate the group and propagate the given markings `(b, beta)` by conjugation.
    #[staticmethod]
    fn from_markings(generators: Vec<Rows>, markings: Vec<(Vec<BigInt>, Vec<BigInt>)>) -> PyResult<Self> {
        let rank = generators.first().map_or(0, Vec::len);
        let gens = generators.iter().map(|g| IntMatrix::from_rows(g)).collect::<Result<Vec<_>, _>>().map_err(err)?;
        let group = weylnorm::lattice::generate_group(rank, &gens, weylnorm::lattice::DEFAULT_CAP).map_err(err)?;
        let given: Vec<StrictMarking> = markings.into_iter().map(|(b, beta)| StrictMarking { b, beta }).collect();
        Ok(Self { inner: MarkedReflectionLattice::from_markings(std::sync::Arc::new(group), &given).map_err(err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.group.order()
    }

    fn reflections(&self) -> Vec<Rows> {
        self.inner.reflections.iter().map(|&r| self.inner.group.element(r).rows()).collect()
    }

    /// `(b, beta)` for each reflection, with `sigma = I + b beta^T`.
    fn markings(&self) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
        self.inner.markings.iter().map(|m| (m.b.clone(), m.beta.clone())).collect()
    }

    /// Torus markings `h_sigma = b/2`, as fraction strings.
    fn torus_markings(&self) -> Vec<Vec<String>> {
        rootdata::lattice_to_torus(&self.inner).markings.iter().map(|h| h.coords().iter().map(|c| c.to_string()).collect()).collect()
    }

    fn root_system(&self) -> PyRootSystem {
        PyRootSystem { inner: rootdata::lattice_to_rootsystem(&self.inner) }
    }

    fn dual(&self) -> PyResult<Self> {
        Ok(Self { inner: self.inner.dual().map_err(err)? })
    }

    fn count_root_systems(&self) -> PyResult<u64> {
        rootdata::count_root_systems(&self.inner.group).map_err(err)
    }

    /// One lattice per consistent choice of markings on the same group.
    fn marking_families(&self) -> PyResult<Vec<Self>> {
        Ok(rootdata::enumerate_marking_families(&self.inner.group).map_err(err)?.into_iter().map(|inner| Self { inner }).collect())
    }

    fn normalizer_extension(&self) -> PyResult<PyCocycle> {
        let ss = weylnorm::coxeter::find_simple_system(&self.inner.group).map_err(err)?;
        let data = std::sync::Arc::new(extension::ReflectionData::from_simple_system(&ss).map_err(err)?);
        let inner = extension::normalizer_extension(&rootdata::lattice_to_torus(&self.inner), &data).map_err(err)?;
        Ok(PyCocycle { inner })
    }

    fn promote(&self, precision: u32) -> PyResult<PyTwoAdicLattice> {
        Ok(PyTwoAdicLattice { inner: twoadic::promote(&self.inner, precision).map_err(err)? })
    }

    #[pyo3(signature = (name=None))]
    fn to_document(&self, name: Option<&str>) -> String {
        Document::from_lattice(name, &self.inner).render()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Lattice(rank={}, order={}, reflections={})", self.rank(), self.order(), self.inner.reflections.len())
    }
}

#[pyclass(module = "weylnorm_py", name = "RootSystem", frozen)]
struct PyRootSystem {
    inner: rootdata::RootSystem,
}

#[pymethods]
impl PyRootSystem {
    #[new]
    fn new(rank: usize, roots: Vec<(Vec<BigInt>, Vec<BigInt>)>) -> PyResult<Self> {
        let roots = roots.into_iter().map(|(vector, coroot)| Root { vector, coroot }).collect();
        Ok(Self { inner: rootdata::RootSystem::new(rank, roots).map_err(err)? })
    }

    #[staticmethod]
    fn from_document(text: &str) -> PyResult<Self> {
        Ok(Self { inner: parse(text)?.to_rootsystem().map_err(err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank
    }

    fn roots(&self) -> Vec<(Vec<BigInt>, Vec<BigInt>)> {
        self.inner.roots.iter().map(|r| (r.vector.clone(), r.coroot.clone())).collect()
    }

    /// `(axiom, passed, detail)` for each axiom.
    fn validate(&self) -> Vec<(String, bool, String)> {
        self.inner.validate().checks.into_iter().map(|c| (c.axiom, c.passed, c.detail)).collect()
    }

    fn is_valid(&self) -> bool {
        self.inner.validate().passed()
    }

    fn to_lattice(&self) -> PyResult<PyLattice> {
        Ok(PyLattice { inner: rootdata::rootsystem_to_lattice(&self.inner).map_err(err)? })
    }

    fn dual(&self) -> Self {
        Self { inner: self.inner.dualize() }
    }

    fn __len__(&self) -> usize {
        self.inner.roots.len()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("RootSystem(rank={}, roots={})", self.inner.rank, self.inner.roots.len())
    }
}

/// A normalized 2-cocycle on a finite group, stored by element indices.
#[pyclass(module = "weylnorm_py", name = "Cocycle", frozen)]
struct PyCocycle {
    inner: ExtensionCocycle,
}

fn fractions(v: &[i64], den: Option<i64>) -> Vec<String> {
    v.iter()
        .map(|&x| match den {
            Some(d) => num_rational::Ratio::new(x, d).to_string(),
            None => x.to_string(),
        })
        .collect()
}

#[pymethods]
impl PyCocycle {
    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn generators(&self) -> Vec<usize> {
        self.inner.generators().to_vec()
    }

    #[getter]
    fn coefficients(&self) -> String {
        self.inner.module().label.clone()
    }

    fn value(&self, g: usize, h: usize) -> PyResult<Vec<String>> {
        let n = self.inner.order();
        if g >= n || h >= n {
            return Err(pyo3::exceptions::PyIndexError::new_err(format!("group has {n} elements")));
        }
        Ok(fractions(&self.inner.value(g, h), self.inner.module().denominator()))
    }

    /// Whether the cocycle identity holds, exhaustively when affordable.
    fn check_identity(&self) -> bool {
        self.inner.check_identity(CheckPlan::Auto).passed()
    }

    /// `(split, witness)`: the witness lists `b(g)` for every element when one is found.
    fn split(&self) -> PyResult<(bool, Option<Vec<Vec<String>>>)> {
        let r = extension::split_check(&self.inner).map_err(err)?;
        let w = r.witness.map(|b| b.values.iter().map(|v| fractions(v, b.denominator())).collect());
        Ok((r.split, w))
    }

    fn cohomologous(&self, other: &Self) -> PyResult<bool> {
        Ok(extension::cohomologous(&self.inner, &other.inner).map_err(err)?.is_some())
    }

    fn table(&self) -> String {
        self.inner.export_table()
    }

    fn __repr__(&self) -> String {
        format!("Cocycle(order={}, coefficients={})", self.inner.order(), self.inner.module().label)
    }
}

/// A marked reflection lattice over the 2-adic integers, kept modulo `2^precision`.
#[pyclass(module = "weylnorm_py", name = "TwoAdicLattice", frozen)]
struct PyTwoAdicLattice {
    inner: CompleteMarkedLattice,
}

#[pymethods]
impl PyTwoAdicLattice {
    #[staticmethod]
    fn di4(precision: u32) -> PyResult<Self> {
        Ok(Self { inner: twoadic::di4_data(precision).and_then(|d| d.lattice()).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (text, precision=None))]
    fn from_document(text: &str, precision: Option<u32>) -> PyResult<Self> {
        Ok(Self { inner: parse(text)?.to_complete(precision).map_err(err)? })
    }

    #[staticmethod]
    fn block_sum(parts: Vec<PyRef<'_, Self>>) -> PyResult<Self> {
        let refs: Vec<&CompleteMarkedLattice> = parts.iter().map(|p| &p.inner).collect();
        Ok(Self { inner: CompleteMarkedLattice::block_sum(&refs).map_err(err)? })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.group.order()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.inner.precision()
    }

    fn marking_counts(&self) -> Vec<usize> {
        self.inner.marking_counts()
    }

    /// Factor tags such as `"DI4"` or `"Coxeter(B2)"`.
    fn classify(&self) -> PyResult<Vec<String>> {
        Ok(twoadic::classify(&self.inner).map_err(err)?.iter().map(|t| t.to_string()).collect())
    }

    fn __repr__(&self) -> String {
        format!("TwoAdicLattice(rank={}, order={}, precision={})", self.rank(), self.order(), self.precision())
    }
}

#[pyfunction]
fn catalog_names() -> Vec<&'static str> {
    catalog::names()
}

#[pyfunction]
fn validate<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &report::validate(&parse(text)?).map_err(err)?)
}

#[pyfunction]
fn markings<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &report::markings(&parse(text)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (text, presentation_check=false, split_check=false))]
fn build_nt<'py>(py: Python<'py>, text: &str, presentation_check: bool, split_check: bool) -> PyResult<Bound<'py, PyAny>> {
    let opts = NtOptions { presentation_check, split_check, table: false };
    to_py(py, &report::build_nt(&parse(text)?, opts).map_err(err)?)
}

#[pyfunction]
fn compare<'py>(py: Python<'py>, first: &str, second: &str) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &report::compare(&parse(first)?, &parse(second)?).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (text, precision=None))]
fn classify2adic<'py>(py: Python<'py>, text: &str, precision: Option<u32>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &report::classify2adic(&parse(text)?, precision).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (level="quick"))]
fn run_selftest<'py>(py: Python<'py>, level: &str) -> PyResult<Bound<'py, PyAny>> {
    let level = match level {
        "quick" => Level::Quick,
        "full" => Level::Full,
        other => return Err(pyo3::exceptions::PyValueError::new_err(format!("unknown level `{other}`"))),
    };
    let r = py.detach(|| selftest::run(level));
    to_py(py, &r)
}

#[pymodule]
fn weylnorm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("WeylnormError", m.py().get_type::<WeylnormError>())?;
    m.add("ParseError", m.py().get_type::<ParseError>())?;
    m.add_class::<PyLattice>()?;
    m.add_class::<PyRootSystem>()?;
    m.add_class::<PyCocycle>()?;
    m.add_class::<PyTwoAdicLattice>()?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(markings, m)?)?;
    m.add_function(wrap_pyfunction!(build_nt, m)?)?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add_function(wrap_pyfunction!(classify2adic, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
