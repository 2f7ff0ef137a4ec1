//! Python bindings. Sets are passed as iterables of point labels `1..=n`.

use std::time::Duration;

use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;

use quotopo_core::clans::{all_rooted_clans, build_digraph, RootKind};
use quotopo_core::format::{parse_spaces, write_space};
use quotopo_core::oracle::oracle_reconstruct;
use quotopo_core::reconstruct::NStarHypothesis;
use quotopo_core::{self as core, PointSet, QuotientFamily, ReconstructOptions, SearchStatus};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_set(points: Vec<usize>) -> PointSet {
    PointSet::from_points(points)
}

fn to_list(set: PointSet) -> Vec<usize> {
    set.points().collect()
}

#[pyclass(name = "FiniteSpace", module = "quotopo", frozen, eq, hash, from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PySpace {
    inner: core::FiniteSpace,
}

impl From<core::FiniteSpace> for PySpace {
    fn from(inner: core::FiniteSpace) -> Self {
        PySpace { inner }
    }
}

#[pymethods]
impl PySpace {
    /// A topology on `1..=n` from its open sets. The empty and full sets may be omitted.
    #[new]
    fn new(n: usize, opens: Vec<Vec<usize>>) -> PyResult<Self> {
        core::FiniteSpace::new(n, opens.into_iter().map(to_set))
            .map(Into::into)
            .map_err(value_error)
    }

    /// The smallest topology containing `sets`.
    #[staticmethod]
    fn generated_by(n: usize, sets: Vec<Vec<usize>>) -> PyResult<Self> {
        core::FiniteSpace::generated_by(n, sets.into_iter().map(to_set))
            .map(Into::into)
            .map_err(value_error)
    }

    #[staticmethod]
    fn discrete(n: usize) -> Self {
        core::FiniteSpace::discrete(n).into()
    }

    #[staticmethod]
    fn indiscrete(n: usize) -> Self {
        core::FiniteSpace::indiscrete(n).into()
    }

    /// Every space block in `text`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Vec<Self>> {
        Ok(parse_spaces(text)
            .map_err(value_error)?
            .into_iter()
            .map(Into::into)
            .collect())
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// Open sets including the empty and full sets.
    fn opens(&self) -> Vec<Vec<usize>> {
        self.inner.opens().iter().map(|&o| to_list(o)).collect()
    }

    /// Smallest open set containing `p`.
    fn cover(&self, p: usize) -> PyResult<Vec<usize>> {
        if p == 0 || p > self.inner.n() {
            return Err(PyValueError::new_err(format!("point {p} out of range")));
        }
        Ok(to_list(self.inner.cover(p)))
    }

    fn is_open(&self, points: Vec<usize>) -> bool {
        self.inner.is_open(to_set(points))
    }

    fn to_text(&self) -> String {
        write_space(&self.inner)
    }

    fn __repr__(&self) -> String {
        let opens: Vec<String> = self
            .inner
            .opens()
            .iter()
            .map(|o| format!("{:?}", to_list(*o)))
            .collect();
        format!("FiniteSpace({}, [{}])", self.inner.n(), opens.join(", "))
    }
}

fn family_of(spaces: &[PySpace]) -> PyResult<QuotientFamily> {
    QuotientFamily::new(spaces.iter().map(|s| s.inner.clone()).collect()).map_err(value_error)
}

/// The space obtained by identifying `i` with the top point.
#[pyfunction]
fn identify(space: &PySpace, i: usize) -> PyResult<PySpace> {
    core::identify(&space.inner, i)
        .map(|q| q.space.into())
        .map_err(value_error)
}

/// `[identify(space, i) for i in 1..n]`.
#[pyfunction]
fn quotient_family(space: &PySpace) -> PyResult<Vec<PySpace>> {
    let family = core::quotient_family(&space.inner).map_err(value_error)?;
    Ok(family.spaces().iter().cloned().map(Into::into).collect())
}

/// Hex certificate shared exactly by homeomorphic spaces.
#[pyfunction]
fn canonical_form(space: &PySpace) -> String {
    core::canonical_form(&space.inner).to_hex()
}

#[pyfunction]
fn is_homeomorphic(a: &PySpace, b: &PySpace) -> bool {
    core::is_homeomorphic(&a.inner, &b.inner)
}

#[pyfunction]
fn verify(candidate: &PySpace, family: Vec<PySpace>) -> PyResult<bool> {
    Ok(core::verify_candidate(&candidate.inner, &family_of(&family)?))
}

/// Every space, up to homeomorphism, with the given quotient family.
#[pyfunction]
#[pyo3(signature = (family, max_branches=1_000_000, time_limit=None, threads=1, n_star="any"))]
fn reconstruct(
    py: Python<'_>,
    family: Vec<PySpace>,
    max_branches: u64,
    time_limit: Option<f64>,
    threads: usize,
    n_star: &str,
) -> PyResult<Vec<PySpace>> {
    let family = family_of(&family)?;
    let n_star = match n_star {
        "any" => NStarHypothesis::Any,
        "full" => NStarHypothesis::Full,
        "point" => NStarHypothesis::Point,
        other => return Err(PyValueError::new_err(format!("unknown n_star {other:?}"))),
    };
    let options = ReconstructOptions {
        max_branches,
        time_limit: time_limit.map(Duration::from_secs_f64),
        threads: threads.max(1),
        n_star,
    };
    let found = py.detach(|| core::reconstruct_with(&family, &options));
    if found.status == SearchStatus::LimitExceeded {
        return Err(PyTimeoutError::new_err(format!(
            "limit exceeded after {} branches",
            found.branches
        )));
    }
    Ok(found.spaces().cloned().map(Into::into).collect())
}

/// Brute-force answer to the same question, for at most 8 points.
#[pyfunction]
fn oracle(py: Python<'_>, family: Vec<PySpace>) -> PyResult<Vec<PySpace>> {
    let family = family_of(&family)?;
    let found = py.detach(|| oracle_reconstruct(&family)).map_err(value_error)?;
    Ok(found.spaces().cloned().map(Into::into).collect())
}

/// `(root, members, kind)` for every rooted clan; kind is "upper", "lower" or "paired".
#[pyfunction]
fn clans(space: &PySpace) -> Vec<(Vec<usize>, Vec<Vec<usize>>, &'static str)> {
    all_rooted_clans(&build_digraph(&space.inner))
        .into_iter()
        .map(|c| {
            let kind = match c.root_kind {
                RootKind::UpperNonPaired => "upper",
                RootKind::LowerNonPaired => "lower",
                RootKind::Paired => "paired",
            };
            (to_list(c.root), c.members.iter().map(|&m| to_list(m)).collect(), kind)
        })
        .collect()
}

#[pymodule]
fn quotopo(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpace>()?;
    m.add_function(wrap_pyfunction!(identify, m)?)?;
    m.add_function(wrap_pyfunction!(quotient_family, m)?)?;
    m.add_function(wrap_pyfunction!(canonical_form, m)?)?;
    m.add_function(wrap_pyfunction!(is_homeomorphic, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(clans, m)?)?;
    Ok(())
}
