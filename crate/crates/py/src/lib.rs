//! Python bindings: relations, doubled processes, diagrams and stabilizer codes.

use std::path::{Path, PathBuf};

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use stabrel::diag::{self, ParseOptions, Semantics};
use stabrel::qec::{self, fmt_tuple, StabilizerCode};
use stabrel::render;
use stabrel::stab::{self, GradedRelation, Phase};
use stabrel::symp::{self, GradedSubspace};
use stabrel::{AffineRelation, Prime};

create_exception!(stabrel, StabrelError, PyValueError);

fn err(e: stabrel::Error) -> PyErr {
    StabrelError::new_err(e.to_string())
}

fn prime(p: u64) -> PyResult<Prime> {
    Prime::new(p).map_err(err)
}

/// An affine relation between `F_p^dom` and `F_p^cod`, possibly empty.
#[pyclass(module = "stabrel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Relation {
    inner: AffineRelation,
}

#[pymethods]
impl Relation {
    /// Relation cut out by rows `[c_1, ..., c_{dom+cod}, k]` meaning `Σ c_i v_i + k = 0`.
    #[staticmethod]
    fn from_equations(p: u64, dom: usize, cod: usize, rows: Vec<Vec<i64>>) -> PyResult<Self> {
        let inner = AffineRelation::from_equations(prime(p)?, dom, cod, &rows).map_err(err)?;
        Ok(Relation { inner })
    }

    #[staticmethod]
    fn identity(p: u64, n: usize) -> PyResult<Self> {
        Ok(Relation {
            inner: stabrel::affrel::identity(prime(p)?, n),
        })
    }

    #[staticmethod]
    fn empty(p: u64, dom: usize, cod: usize) -> PyResult<Self> {
        Ok(Relation {
            inner: AffineRelation::empty(prime(p)?, dom, cod),
        })
    }

    #[staticmethod]
    fn total(p: u64, dom: usize, cod: usize) -> PyResult<Self> {
        Ok(Relation {
            inner: AffineRelation::total(prime(p)?, dom, cod),
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.prime().get()
    }

    #[getter]
    fn dom(&self) -> usize {
        self.inner.dom()
    }

    #[getter]
    fn cod(&self) -> usize {
        self.inner.cod()
    }

    fn is_empty(&self) -> bool {
        self.inner.is_empty()
    }

    /// Sequential composition: `self` first, then `other`.
    fn compose(&self, other: PyRef<'_, Relation>) -> PyResult<Relation> {
        Ok(Relation {
            inner: self.inner.compose(&other.inner).map_err(err)?,
        })
    }

    fn tensor(&self, other: PyRef<'_, Relation>) -> PyResult<Relation> {
        Ok(Relation {
            inner: self.inner.tensor(&other.inner).map_err(err)?,
        })
    }

    fn converse(&self) -> Relation {
        Relation {
            inner: self.inner.converse(),
        }
    }

    fn complement(&self) -> PyResult<Relation> {
        Ok(Relation {
            inner: self.inner.ortho_complement().map_err(err)?,
        })
    }

    fn subset(&self, other: PyRef<'_, Relation>) -> PyResult<bool> {
        self.inner.subset(&other.inner).map_err(err)
    }

    fn contains(&self, v: Vec<i64>) -> bool {
        let p = self.inner.prime();
        let v: Vec<u32> = v.into_iter().map(|x| p.reduce(x)).collect();
        v.len() == self.inner.arity() && self.inner.contains(&v)
    }

    fn points(&self) -> Vec<Vec<u32>> {
        self.inner.points()
    }

    fn equations(&self) -> Vec<String> {
        render::equations(&self.inner, &render::affine_names(self.inner.dom(), self.inner.cod()))
    }

    fn basis(&self) -> Vec<String> {
        render::basis(&self.inner)
    }

    fn __eq__(&self, other: PyRef<'_, Relation>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Relation({} -> {}: {})", self.inner.dom(), self.inner.cod(), self.equations().join("; "))
    }
}

/// A process on quantum (`Q`) and classical (`C`) wires.
#[pyclass(module = "stabrel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Process {
    inner: GradedRelation,
}

fn process(inner: GradedRelation) -> Process {
    Process { inner }
}

#[pymethods]
impl Process {
    #[getter]
    fn p(&self) -> u32 {
        self.inner.prime().get()
    }

    /// Input wire types as a string such as `"QC"`.
    #[getter]
    fn dom(&self) -> String {
        self.inner.dom().iter().map(|t| t.to_string()).collect()
    }

    #[getter]
    fn cod(&self) -> String {
        self.inner.cod().iter().map(|t| t.to_string()).collect()
    }

    /// The underlying relation on doubled coordinates.
    #[getter]
    fn relation(&self) -> Relation {
        Relation {
            inner: self.inner.relation().clone(),
        }
    }

    fn compose(&self, other: PyRef<'_, Process>) -> PyResult<Process> {
        Ok(process(self.inner.compose(&other.inner).map_err(err)?))
    }

    fn tensor(&self, other: PyRef<'_, Process>) -> PyResult<Process> {
        Ok(process(self.inner.tensor(&other.inner).map_err(err)?))
    }

    fn dagger(&self) -> Process {
        process(self.inner.dagger())
    }

    fn conjugate(&self) -> Process {
        process(self.inner.conjugate())
    }

    fn subset(&self, other: PyRef<'_, Process>) -> PyResult<bool> {
        self.inner.subset(&other.inner).map_err(err)
    }

    fn coarse_grains(&self, other: PyRef<'_, Process>) -> PyResult<bool> {
        self.inner.coarse_grains(&other.inner).map_err(err)
    }

    /// `"isotropic"`, `"coisotropic"`, `"lagrangian"` or `"none"`.
    fn classify(&self) -> PyResult<String> {
        Ok(self.inner.classify().map_err(err)?.to_string())
    }

    fn equations(&self) -> Vec<String> {
        let names = render::doubled_names(self.inner.dom(), self.inner.cod());
        render::equations(self.inner.relation(), &names)
    }

    fn __eq__(&self, other: PyRef<'_, Process>) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Process({} -> {}: {})", self.dom(), self.cod(), self.equations().join("; "))
    }
}

fn phase(p: Prime, a: i64, b: i64) -> Phase {
    Phase::new(p, a, b)
}

#[pyfunction]
#[pyo3(signature = (p, n_in, n_out, a=0, b=0))]
fn z_spider(p: u64, n_in: usize, n_out: usize, a: i64, b: i64) -> PyResult<Process> {
    let p = prime(p)?;
    Ok(process(stab::z_spider(p, n_in, n_out, phase(p, a, b))))
}

#[pyfunction]
#[pyo3(signature = (p, n_in, n_out, a=0, b=0))]
fn x_spider(p: u64, n_in: usize, n_out: usize, a: i64, b: i64) -> PyResult<Process> {
    let p = prime(p)?;
    Ok(process(stab::x_spider(p, n_in, n_out, phase(p, a, b))))
}

#[pyfunction]
fn identity(p: u64, n: usize) -> PyResult<Process> {
    Ok(process(stab::identity(prime(p)?, n)))
}

#[pyfunction]
fn fourier(p: u64) -> PyResult<Process> {
    Ok(process(stab::fourier(prime(p)?)))
}

#[pyfunction]
fn scaling(p: u64, a: i64) -> PyResult<Process> {
    let p = prime(p)?;
    Ok(process(stab::scaling_gate(p, p.reduce(a)).map_err(err)?))
}

/// The Weyl shift by `(z, x)`, one entry per wire.
#[pyfunction]
fn weyl(p: u64, z: Vec<i64>, x: Vec<i64>) -> PyResult<Process> {
    let p = prime(p)?;
    let r = |v: Vec<i64>| -> Vec<u32> { v.into_iter().map(|a| p.reduce(a)).collect() };
    Ok(process(stab::weyl(p, &r(z), &r(x)).map_err(err)?))
}

#[pyfunction]
fn discard(p: u64) -> PyResult<Process> {
    Ok(process(stab::discard(prime(p)?)))
}

#[pyfunction]
fn measure_z(p: u64) -> PyResult<Process> {
    Ok(process(stab::measure_z(prime(p)?)))
}

#[pyfunction]
fn prep_z(p: u64) -> PyResult<Process> {
    Ok(process(stab::prep_z(prime(p)?)))
}

#[pyfunction]
fn measure_x(p: u64) -> PyResult<Process> {
    Ok(process(stab::measure_x(prime(p)?)))
}

#[pyfunction]
fn prep_x(p: u64) -> PyResult<Process> {
    Ok(process(stab::prep_x(prime(p)?)))
}

#[pyfunction]
fn cup(p: u64) -> PyResult<Process> {
    Ok(process(stab::cup(prime(p)?)))
}

#[pyfunction]
fn cap(p: u64) -> PyResult<Process> {
    Ok(process(stab::cap(prime(p)?)))
}

/// Splits a coisotropic process into a pure one with extra outputs to discard.
#[pyfunction]
fn purify(r: PyRef<'_, Process>) -> PyResult<(Process, usize)> {
    let (pure, k) = stab::purify(&r.inner).map_err(err)?;
    Ok((process(pure), k))
}

fn semantics_to_py(py: Python<'_>, s: Semantics) -> PyResult<Py<PyAny>> {
    Ok(match s {
        Semantics::Affine(r) => Py::new(py, Relation { inner: r })?.into_any(),
        Semantics::Doubled(g) => Py::new(py, process(g))?.into_any(),
    })
}

fn parse_diagram(text: &str, p: Option<u64>, base: Option<&Path>) -> PyResult<diag::Diagram> {
    let p = p.map(prime).transpose()?;
    let base = base.map(Path::to_path_buf);
    let resolver = |name: &str| -> stabrel::Result<String> {
        let dir: PathBuf = base.clone().unwrap_or_default();
        std::fs::read_to_string(dir.join(format!("{name}.diag")))
            .map_err(|e| stabrel::Error::Diagram(format!("box `{name}`: {e}")))
    };
    let opts = ParseOptions {
        p,
        resolver: Some(&resolver),
    };
    diag::parse_with(text, &opts).map_err(err)
}

/// Evaluates diagram text: a `Relation` for the affine layer, a `Process` for the doubled one.
#[pyfunction]
#[pyo3(signature = (text, p=None))]
fn evaluate(py: Python<'_>, text: &str, p: Option<u64>) -> PyResult<Py<PyAny>> {
    let d = parse_diagram(text, p, None)?;
    semantics_to_py(py, d.evaluate().map_err(err)?)
}

/// Evaluates a diagram file; boxes are looked up next to it.
#[pyfunction]
#[pyo3(signature = (path, p=None))]
fn evaluate_file(py: Python<'_>, path: PathBuf, p: Option<u64>) -> PyResult<Py<PyAny>> {
    let text = std::fs::read_to_string(&path).map_err(|e| StabrelError::new_err(format!("{}: {e}", path.display())))?;
    let d = parse_diagram(&text, p, path.parent())?;
    semantics_to_py(py, d.evaluate().map_err(err)?)
}

/// Classification of a subspace file's contents.
#[pyfunction]
#[pyo3(signature = (text, p=None))]
fn classify_subspace(text: &str, p: Option<u64>) -> PyResult<String> {
    let p = p.map(prime).transpose()?;
    Ok(qec::parse_subspace(text, p).map_err(err)?.classify().to_string())
}

/// A stabilizer code given by a coisotropic affine subspace.
#[pyclass(module = "stabrel", frozen)]
struct Code {
    inner: StabilizerCode,
}

#[pymethods]
impl Code {
    /// Parses a code file (`p=..; n=..; k=..` then generator rows `z | x [| phase]`).
    #[staticmethod]
    #[pyo3(signature = (text, p=None))]
    fn parse(text: &str, p: Option<u64>) -> PyResult<Code> {
        let p = p.map(prime).transpose()?;
        Ok(Code {
            inner: qec::parse_code(text, p).map_err(err)?,
        })
    }

    /// Builds a code from a subspace file.
    #[staticmethod]
    #[pyo3(signature = (text, p=None))]
    fn from_subspace(text: &str, p: Option<u64>) -> PyResult<Code> {
        let p = p.map(prime).transpose()?;
        let s: GradedSubspace = qec::parse_subspace(text, p).map_err(err)?;
        Ok(Code {
            inner: StabilizerCode::from_subspace(&s).map_err(err)?,
        })
    }

    #[getter]
    fn p(&self) -> u32 {
        self.inner.prime().get()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    fn encoder(&self) -> Process {
        process(self.inner.encoder().clone())
    }

    fn syndrome_basis(&self) -> Vec<Vec<u32>> {
        self.inner.syndrome_basis()
    }

    fn syndrome(&self, e: Vec<i64>) -> PyResult<Vec<u32>> {
        self.inner.syndrome(&self.vector(e)).map_err(err)
    }

    fn undetectable(&self, e: Vec<i64>) -> PyResult<bool> {
        self.inner.undetectable(&self.vector(e)).map_err(err)
    }

    /// Runs the correction protocol for each error; returns `(all_passed, report)`.
    fn verify(&self, table: &str, errors: &str) -> PyResult<(bool, String)> {
        let table = qec::parse_table(table, &self.inner).map_err(err)?;
        let errors = qec::parse_errors(errors, self.inner.prime(), self.inner.n()).map_err(err)?;
        let report = qec::verify_correction(&self.inner, &errors, &table).map_err(err)?;
        Ok((report.all_passed(), report.to_string()))
    }

    fn __repr__(&self) -> String {
        format!("Code([{}, {}] over F_{})", self.n(), self.k(), self.p())
    }
}

impl Code {
    fn vector(&self, e: Vec<i64>) -> Vec<u32> {
        let p = self.inner.prime();
        e.into_iter().map(|x| p.reduce(x)).collect()
    }
}

/// `(a,b,c)` for a list of residues.
#[pyfunction]
fn format_tuple(v: Vec<u32>) -> String {
    fmt_tuple(&v)
}

/// Dilates a coisotropic subspace; returns the encoder as diagram text.
#[pyfunction]
#[pyo3(signature = (text, p=None))]
fn dilate(text: &str, p: Option<u64>) -> PyResult<String> {
    let p = p.map(prime).transpose()?;
    let s = qec::parse_subspace(text, p).map_err(err)?;
    let dil = symp::stinespring_dilate(&s).map_err(err)?;
    Ok(diag::dilation_diagram(&dil).map_err(err)?.to_text())
}

#[pymodule]
#[pyo3(name = "stabrel")]
fn stabrel_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("StabrelError", m.py().get_type::<StabrelError>())?;
    m.add_class::<Relation>()?;
    m.add_class::<Process>()?;
    m.add_class::<Code>()?;
    m.add_function(wrap_pyfunction!(z_spider, m)?)?;
    m.add_function(wrap_pyfunction!(x_spider, m)?)?;
    m.add_function(wrap_pyfunction!(identity, m)?)?;
    m.add_function(wrap_pyfunction!(fourier, m)?)?;
    m.add_function(wrap_pyfunction!(scaling, m)?)?;
    m.add_function(wrap_pyfunction!(weyl, m)?)?;
    m.add_function(wrap_pyfunction!(discard, m)?)?;
    m.add_function(wrap_pyfunction!(measure_z, m)?)?;
    m.add_function(wrap_pyfunction!(prep_z, m)?)?;
    m.add_function(wrap_pyfunction!(measure_x, m)?)?;
    m.add_function(wrap_pyfunction!(prep_x, m)?)?;
    m.add_function(wrap_pyfunction!(cup, m)?)?;
    m.add_function(wrap_pyfunction!(cap, m)?)?;
    m.add_function(wrap_pyfunction!(purify, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_file, m)?)?;
    m.add_function(wrap_pyfunction!(classify_subspace, m)?)?;
    m.add_function(wrap_pyfunction!(dilate, m)?)?;
    m.add_function(wrap_pyfunction!(format_tuple, m)?)?;
    Ok(())
}
