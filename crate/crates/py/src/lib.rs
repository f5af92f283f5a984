//! Python bindings. Scalars cross the boundary as strings such as `"1/3"` or
//! `"0.25"`; any object whose `str()` parses works, so `fractions.Fraction`
//! and `int` are accepted. Certificates and reports cross as
//! JSON strings in the same format the CLI writes.

use std::str::FromStr;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

use hyperfrac_core::coded_family::{epsilon_for_k as core_epsilon_for_k, Code};
use hyperfrac_core::hutchinson::{hutchinson_apply, iterate_weak, solve_attractor};
use hyperfrac_core::hyperspace::{hausdorff_distance, hausdorff_distance_d, CompactSet1D, CompactSetD, Interval};
use hyperfrac_core::maps::Ifs;
use hyperfrac_core::scalar::Scalar;
use hyperfrac_core::theorems::{
    replay, run_thm41_trials, thm41_witness_search, Certificate, CountingParams, Prop32Certificate,
    Prop33Certificate, SampleParams, Thm41TrialConfig,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scalar(obj: &Bound<'_, PyAny>) -> PyResult<Scalar> {
    Scalar::from_str(&obj.str()?.to_cow()?).map_err(err)
}

fn scalars(objs: &[Bound<'_, PyAny>]) -> PyResult<Vec<Scalar>> {
    objs.iter().map(scalar).collect()
}

fn json<T: Serialize>(value: &T) -> PyResult<String> {
    serde_json::to_string(value).map_err(err)
}

/// A compact subset of `[0,1]`: sorted points or disjoint closed intervals.
#[pyclass(name = "Set1D", module = "hyperfrac", eq, frozen, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PySet1D(CompactSet1D);

#[pymethods]
impl PySet1D {
    #[staticmethod]
    fn points(pts: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        CompactSet1D::points(scalars(&pts)?).map(PySet1D).map_err(err)
    }

    /// Arbitrary closed intervals; overlapping or touching ones merge.
    #[staticmethod]
    fn intervals(ivs: Vec<(Bound<'_, PyAny>, Bound<'_, PyAny>)>) -> PyResult<Self> {
        let ivs = ivs
            .iter()
            .map(|(lo, hi)| Interval::new(scalar(lo)?, scalar(hi)?).map_err(err))
            .collect::<PyResult<Vec<_>>>()?;
        CompactSet1D::from_intervals_normalized(ivs).map(PySet1D).map_err(err)
    }

    #[staticmethod]
    fn unit_interval() -> Self {
        PySet1D(CompactSet1D::unit_interval())
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(PySet1D).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    fn is_points(&self) -> bool {
        self.0.is_points()
    }

    /// Components as `(lo, hi)` string pairs; points have `lo == hi`.
    fn spans(&self) -> Vec<(String, String)> {
        self.0.spans().map(|(l, h)| (l.to_string(), h.to_string())).collect()
    }

    fn measure(&self) -> String {
        self.0.measure().to_string()
    }

    fn contains(&self, x: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.contains(&scalar(x)?))
    }

    fn hausdorff(&self, other: &PySet1D) -> String {
        hausdorff_distance(&self.0, &other.0).to_string()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __repr__(&self) -> String {
        let kind = if self.0.is_points() { "points" } else { "intervals" };
        format!("Set1D({kind}, {} components)", self.0.len())
    }
}

/// A finite family of maps of `[0,1]`, in the CLI's JSON format.
#[pyclass(name = "Ifs", module = "hyperfrac", frozen)]
struct PyIfs(Ifs);

#[pymethods]
impl PyIfs {
    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(PyIfs).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    fn is_strict(&self) -> bool {
        self.0.is_strict()
    }

    fn lipschitz_constant(&self) -> String {
        self.0.lipschitz_constant().to_string()
    }

    fn apply(&self, set: &PySet1D) -> PyResult<PySet1D> {
        hutchinson_apply(&self.0, &set.0).map(PySet1D).map_err(err)
    }

    /// Attractor result as JSON; `weak=True` runs the best-effort iterator.
    #[pyo3(signature = (tol, start = None, weak = false, max_iter = 1000))]
    fn solve(
        &self,
        py: Python<'_>,
        tol: &Bound<'_, PyAny>,
        start: Option<&PySet1D>,
        weak: bool,
        max_iter: usize,
    ) -> PyResult<String> {
        let tol = scalar(tol)?;
        let start = start.map(|s| s.0.clone());
        let res = py.detach(|| {
            if weak {
                iterate_weak(&self.0, start.unwrap_or_else(CompactSet1D::unit_interval), &tol, max_iter)
            } else {
                solve_attractor(&self.0, &tol, start)
            }
        });
        json(&res.map_err(err)?)
    }
}

/// A code: one shift per node of the binary tree, down to `depth`.
#[pyclass(name = "Code", module = "hyperfrac", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyCode(Code);

#[pymethods]
impl PyCode {
    /// Entries in flat order; a short list is padded with zeros.
    #[new]
    fn new(entries: Vec<Bound<'_, PyAny>>, depth: usize) -> PyResult<Self> {
        Code::from_prefix(scalars(&entries)?, depth).map(PyCode).map_err(err)
    }

    #[staticmethod]
    fn zero(depth: usize) -> Self {
        PyCode(Code::zero(depth))
    }

    #[staticmethod]
    fn from_json(s: &str) -> PyResult<Self> {
        serde_json::from_str(s).map(PyCode).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        json(&self.0)
    }

    #[getter]
    fn depth(&self) -> usize {
        self.0.depth()
    }

    fn entries(&self) -> Vec<String> {
        self.0.entries().iter().map(Scalar::to_string).collect()
    }

    /// Depth-`m` interval union; the code is zero-padded when `m` exceeds its depth.
    fn expand(&self, m: usize) -> PyResult<PySet1D> {
        let code = self.0.resized(m.max(self.0.depth()));
        hyperfrac_core::coded_family::expand(&code, m).map(PySet1D).map_err(err)
    }
}

#[pyfunction]
fn hausdorff(a: &PySet1D, b: &PySet1D) -> String {
    a.hausdorff(b)
}

/// Squared Hausdorff distance between two point-set files of equal dimension.
#[pyfunction]
fn hausdorff_squared(a_json: &str, b_json: &str) -> PyResult<String> {
    let a: CompactSetD = serde_json::from_str(a_json).map_err(err)?;
    let b: CompactSetD = serde_json::from_str(b_json).map_err(err)?;
    Ok(hausdorff_distance_d(&a, &b).map_err(err)?.squared.to_string())
}

/// `(n, ε)` for a given `k`.
#[pyfunction]
fn epsilon_for_k(k: usize) -> PyResult<(usize, String)> {
    let (n, eps) = core_epsilon_for_k(k).map_err(err)?;
    Ok((n, eps.to_string()))
}

/// One witness search for `y` near `code`; returns the certificate JSON.
#[pyfunction]
#[pyo3(signature = (code, k, y, depth = None))]
fn thm41_search(py: Python<'_>, code: &PyCode, k: usize, y: &PySet1D, depth: Option<usize>) -> PyResult<String> {
    let cert = py.detach(|| thm41_witness_search(&code.0, k, &y.0, depth)).map_err(err)?;
    json(&Certificate::Thm41(cert))
}

/// Seeded trials; returns `(certificate JSONs, summary JSON)`.
#[pyfunction]
#[pyo3(signature = (code, k, seed = 1, trials = 1, depth = None, perturb = true))]
fn thm41_trials(
    py: Python<'_>,
    code: &PyCode,
    k: usize,
    seed: u64,
    trials: usize,
    depth: Option<usize>,
    perturb: bool,
) -> PyResult<(Vec<String>, String)> {
    let cfg = Thm41TrialConfig { k, seed, trials, depth, sample: SampleParams { perturb, ..SampleParams::default() } };
    let (certs, summary) = py.detach(|| run_thm41_trials(&code.0, &cfg)).map_err(err)?;
    let certs = certs.into_iter().map(|c| json(&Certificate::Thm41(c))).collect::<PyResult<_>>()?;
    Ok((certs, json(&summary)?))
}

/// Annulus construction with its counting check; returns the certificate JSON.
#[pyfunction]
#[pyo3(signature = (annuli = 4, ratio = None, f_size = 1, k = 1, n = None))]
fn prop32(
    py: Python<'_>,
    annuli: usize,
    ratio: Option<&Bound<'_, PyAny>>,
    f_size: usize,
    k: usize,
    n: Option<usize>,
) -> PyResult<String> {
    let ratio = ratio.map(scalar).transpose()?.unwrap_or_else(|| Scalar::one().half());
    let params = CountingParams { f_size, k, n: n.unwrap_or(annuli) };
    let cert = py.detach(|| Prop32Certificate::build(annuli, &ratio, params)).map_err(err)?;
    json(&Certificate::Prop32(cert))
}

/// Strong-porosity witness at `x` of the point-set file `set_json`.
#[pyfunction]
#[pyo3(signature = (set_json, x, count = 4, radius = None, attempts = 1000, seed = 1))]
fn prop33(
    py: Python<'_>,
    set_json: &str,
    x: Vec<Bound<'_, PyAny>>,
    count: usize,
    radius: Option<&Bound<'_, PyAny>>,
    attempts: usize,
    seed: u64,
) -> PyResult<String> {
    let f: CompactSetD = serde_json::from_str(set_json).map_err(err)?;
    let x = scalars(&x)?;
    let radius = radius.map(scalar).transpose()?;
    let cert = py.detach(|| Prop33Certificate::build(&f, &x, count, radius, attempts, seed)).map_err(err)?;
    json(&Certificate::Prop33(cert))
}

/// Recomputes a certificate from its inputs; returns the replay report JSON.
#[pyfunction]
fn verify(py: Python<'_>, cert_json: &str) -> PyResult<String> {
    let cert: Certificate = serde_json::from_str(cert_json).map_err(err)?;
    let report = py.detach(|| replay(&cert)).map_err(err)?;
    json(&report)
}

#[pymodule]
fn hyperfrac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet1D>()?;
    m.add_class::<PyIfs>()?;
    m.add_class::<PyCode>()?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_squared, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_for_k, m)?)?;
    m.add_function(wrap_pyfunction!(thm41_search, m)?)?;
    m.add_function(wrap_pyfunction!(thm41_trials, m)?)?;
    m.add_function(wrap_pyfunction!(prop32, m)?)?;
    m.add_function(wrap_pyfunction!(prop33, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
