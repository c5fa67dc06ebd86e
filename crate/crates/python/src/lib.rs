//! Python bindings. Elements are passed by name, grades as `"p/q"` strings.

use gammaspec::bitset::Subset;
use gammaspec::error::Error;
use gammaspec::fuzzy::{self, FuzzySubset, Grade};
use gammaspec::io::{self, InputDocument};
use gammaspec::semiring::{ElementId, FiniteSemiring, TernaryGammaSemiring};
use gammaspec::sheaf::StructureSheaf;
use gammaspec::spectral::{self, ComparabilityGraph, LaplacianAnalysis};
use gammaspec::spectrum::{find_power_decomposition, Spectrum};
use gammaspec::verify::{self, Status, VerifyOptions};
use gammaspec::{ideal, triadic};
use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(pygammaspec, ConsistencyError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    if e.is_consistency() {
        ConsistencyError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn parse_grade(s: &str) -> PyResult<Grade> {
    s.trim().parse::<Grade>().map_err(|e| PyValueError::new_err(format!("bad rational \"{s}\": {e}")))
}

fn grades(v: &[String]) -> PyResult<FuzzySubset> {
    let g = v.iter().map(|s| parse_grade(s)).collect::<PyResult<Vec<_>>>()?;
    FuzzySubset::new(g).map_err(py_err)
}

/// A finite ternary Γ-semiring.
#[pyclass(module = "pygammaspec", frozen)]
struct Algebra {
    inner: TernaryGammaSemiring,
}

impl Algebra {
    fn index(&self, name: &str) -> PyResult<ElementId> {
        self.inner.semiring().index_of(name).ok_or_else(|| PyValueError::new_err(format!("unknown element \"{name}\"")))
    }

    fn indices(&self, names: &[String]) -> PyResult<Vec<ElementId>> {
        names.iter().map(|n| self.index(n)).collect()
    }

    fn names(&self, set: Subset) -> Vec<String> {
        set.iter().map(|x| self.inner.semiring().name(x).to_string()).collect()
    }

    fn spectrum(&self) -> PyResult<Spectrum> {
        Spectrum::new(&self.inner).map_err(py_err)
    }

    fn analysis(&self, hasse: bool) -> PyResult<LaplacianAnalysis> {
        let x = self.spectrum()?;
        let g = if hasse { ComparabilityGraph::hasse(&x) } else { ComparabilityGraph::from_spectrum(&x) };
        LaplacianAnalysis::new(g).map_err(py_err)
    }
}

#[pymethods]
impl Algebra {
    #[staticmethod]
    fn chain(n: usize) -> PyResult<Self> {
        let s = FiniteSemiring::chain(n).map_err(py_err)?;
        Ok(Algebra { inner: TernaryGammaSemiring::with_trivial_gamma(s) })
    }

    #[staticmethod]
    fn boolean_product(n: usize) -> PyResult<Self> {
        let s = FiniteSemiring::boolean_power(n).map_err(py_err)?;
        Ok(Algebra { inner: TernaryGammaSemiring::with_trivial_gamma(s) })
    }

    /// Parses the JSON input format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let doc = InputDocument::parse(text).map_err(py_err)?;
        Ok(Algebra { inner: doc.algebra().map_err(py_err)? })
    }

    fn to_json(&self) -> String {
        io::algebra_to_json(&self.inner).to_string()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    #[getter]
    fn elements(&self) -> Vec<String> {
        self.inner.semiring().names().to_vec()
    }

    fn is_idempotent(&self) -> bool {
        self.inner.semiring().is_idempotent()
    }

    fn add(&self, a: &str, b: &str) -> PyResult<String> {
        let s = self.inner.semiring();
        Ok(s.name(s.add(self.index(a)?, self.index(b)?)).to_string())
    }

    fn mul(&self, a: &str, b: &str) -> PyResult<String> {
        let s = self.inner.semiring();
        Ok(s.name(s.mul(self.index(a)?, self.index(b)?)).to_string())
    }

    #[pyo3(signature = (a, b, c, gamma=0))]
    fn bracket(&self, a: &str, b: &str, c: &str, gamma: usize) -> PyResult<String> {
        let x = self.inner.ternary_product(self.index(a)?, self.index(b)?, self.index(c)?, gamma).map_err(py_err)?;
        Ok(self.inner.semiring().name(x).to_string())
    }

    fn ideals(&self) -> PyResult<Vec<Vec<String>>> {
        Ok(ideal::enumerate_ideals(&self.inner).map_err(py_err)?.into_iter().map(|i| self.names(i)).collect())
    }

    fn primes(&self) -> PyResult<Vec<Vec<String>>> {
        Ok(self.spectrum()?.primes().iter().map(|&p| self.names(p)).collect())
    }

    /// `containment()[i][j]` is true when prime `i` is contained in prime `j`.
    fn containment(&self) -> PyResult<Vec<Vec<bool>>> {
        Ok(self.spectrum()?.containment().to_vec())
    }

    /// Radical of the ideal generated by `gens`.
    fn radical(&self, gens: Vec<String>) -> PyResult<Vec<String>> {
        let i = ideal::generated_by(&self.inner, &self.indices(&gens)?);
        Ok(self.names(ideal::radical(&self.inner, i).map_err(py_err)?))
    }

    /// Prime indices in `D(f)`.
    fn principal_open(&self, f: &str) -> PyResult<Vec<usize>> {
        Ok(self.spectrum()?.principal_open(self.index(f)?).points.iter().collect())
    }

    /// `(covers, equal, radical_member, witness)`; the witness is
    /// `(exponent, coefficients)` when `f` lies in the radical.
    fn cover(&self, f: &str, fs: Vec<String>) -> PyResult<(bool, bool, bool, Option<(u32, Vec<String>)>)> {
        let (f, fs) = (self.index(f)?, self.indices(&fs)?);
        let v = self.spectrum()?.check_standard_cover(f, &fs).map_err(py_err)?;
        let witness = find_power_decomposition(&self.inner, f, &fs).map_err(py_err)?.map(|d| {
            let s = self.inner.semiring();
            (d.exponent, d.coefficients.iter().map(|&a| s.name(a).to_string()).collect())
        });
        Ok((v.covers, v.equal, v.radical_member, witness))
    }

    /// Size of the localization at `f`.
    fn localization_size(&self, f: &str) -> PyResult<usize> {
        let sheaf = StructureSheaf::new(&self.inner).map_err(py_err)?;
        Ok(sheaf.sections(self.index(f)?).size())
    }

    fn filippov_holds(&self) -> bool {
        matches!(triadic::verify_filippov(&self.inner), triadic::FilippovStatus::Holds { .. })
    }

    /// Automorphism maps as lists of element names, image of each element in order.
    #[pyo3(signature = (cap=8))]
    fn automorphisms(&self, cap: usize) -> PyResult<Vec<Vec<String>>> {
        let s = self.inner.semiring();
        let autos = triadic::enumerate_gamma_automorphisms_with_cap(&self.inner, cap).map_err(py_err)?;
        Ok(autos.iter().map(|a| a.map().iter().map(|&x| s.name(x).to_string()).collect()).collect())
    }

    #[pyo3(signature = (hasse=false))]
    fn laplacian(&self, hasse: bool) -> PyResult<Vec<Vec<i64>>> {
        Ok(self.analysis(hasse)?.matrices.laplacian)
    }

    #[pyo3(signature = (hasse=false))]
    fn eigenvalues(&self, hasse: bool) -> PyResult<Vec<f64>> {
        Ok(self.analysis(hasse)?.eigenvalues().iter().map(|&v| spectral::clean(v)).collect())
    }

    /// Connected components of the specialization graph, as prime indices.
    fn components(&self) -> PyResult<Vec<Vec<usize>>> {
        Ok(self.analysis(false)?.components)
    }

    /// `None` for an empty spectrum, else whether the graph is connected.
    fn is_connected(&self) -> PyResult<Option<bool>> {
        Ok(self.analysis(false)?.connectivity_verdict().map_err(py_err)?.is_connected())
    }

    #[pyo3(signature = (k, seed=0))]
    fn cluster(&self, k: usize, seed: u64) -> PyResult<Vec<Vec<usize>>> {
        let a = self.analysis(false)?;
        Ok(spectral::spectral_cluster(&a, k, seed).map_err(py_err)?.clusters())
    }

    /// Whether the grades (one per element, in order) form a fuzzy Γ-ideal.
    fn is_fuzzy_ideal(&self, grades_: Vec<String>) -> PyResult<bool> {
        let mu = grades(&grades_)?;
        if mu.len() != self.inner.size() {
            return Err(PyValueError::new_err("one grade per element is required"));
        }
        fuzzy::is_fuzzy_gamma_ideal(&self.inner, &mu).map_err(py_err)
    }

    /// Runs every check; returns `(module, name, status, detail)` rows.
    #[pyo3(signature = (seed=0))]
    fn verify(&self, seed: u64) -> PyResult<Vec<(String, String, String, String)>> {
        let opts = VerifyOptions { seed, ..VerifyOptions::default() };
        let report = verify::verify_all(&self.inner, &opts).map_err(py_err)?;
        Ok(report
            .checks
            .into_iter()
            .map(|c| {
                let status = match c.status {
                    Status::Pass => "pass",
                    Status::Fail => "fail",
                    Status::Skipped => "skipped",
                };
                (c.module.to_string(), c.name.to_string(), status.to_string(), c.detail)
            })
            .collect())
    }

    fn __repr__(&self) -> String {
        format!("Algebra(size={}, gamma={})", self.inner.size(), self.inner.gamma().size())
    }
}

/// Elements of the α-cut, by index.
#[pyfunction]
fn alpha_cut(grades_: Vec<String>, alpha: &str) -> PyResult<Vec<usize>> {
    Ok(fuzzy::alpha_cut(&grades(&grades_)?, parse_grade(alpha)?).iter().collect())
}

/// The three nested cuts `(μ at α+ε, ν at α, μ at α−ε)` and whether the inclusions hold.
#[pyfunction]
fn stability(mu: Vec<String>, nu: Vec<String>, alpha: &str, epsilon: &str) -> PyResult<(Vec<usize>, Vec<usize>, Vec<usize>, bool)> {
    let r = fuzzy::verify_stability(&grades(&mu)?, &grades(&nu)?, parse_grade(alpha)?, parse_grade(epsilon)?).map_err(py_err)?;
    Ok((r.upper.iter().collect(), r.middle.iter().collect(), r.lower.iter().collect(), r.holds()))
}

#[pymodule]
fn pygammaspec(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Algebra>()?;
    m.add_function(wrap_pyfunction!(alpha_cut, m)?)?;
    m.add_function(wrap_pyfunction!(stability, m)?)?;
    m.add("ConsistencyError", m.py().get_type::<ConsistencyError>())?;
    Ok(())
}
