//! Python bindings for the rainbow-matching toolkit. Instances cross the
//! boundary as the canonical JSON text; results come back as plain Python
//! structures.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use rainbow_core::bounds::bounds_report;
use rainbow_core::constructions::{
    fixed_r_construction, lift_uniformity, simple_f_partite_family, simple_f_upper_family,
    t2_complete_construction, t2_partite_construction,
};
use rainbow_core::finder::{find_rainbow_constructive, FinderPath};
use rainbow_core::gen::random_instance;
use rainbow_core::instance::{decode, encode, validate_instance, Instance as CoreInstance};
use rainbow_core::multilinear::rainbow_via_multilinear;
use rainbow_core::search::{
    check_strong_property, exact_value_search, find_rainbow, SearchBudget, SearchStatus,
    StrongOutcome,
};
use rainbow_core::Error;

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A collection of same-size matchings in an r-uniform hypergraph, with one
/// color per matching.
#[pyclass]
#[derive(Clone)]
struct Instance {
    inner: CoreInstance,
}

fn certificate_to_py(status: &SearchStatus) -> Option<Vec<(usize, Vec<u32>)>> {
    match status {
        SearchStatus::Found(cert) => Some(
            cert.picks
                .iter()
                .map(|(c, e)| (*c, e.verts().to_vec()))
                .collect(),
        ),
        _ => None,
    }
}

#[pymethods]
impl Instance {
    /// Parse the canonical JSON text.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Instance {
            inner: decode(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        encode(&self.inner)
    }

    #[getter]
    fn r(&self) -> u32 {
        self.inner.r
    }

    #[getter]
    fn t(&self) -> u32 {
        self.inner.t
    }

    #[getter]
    fn num_vertices(&self) -> u32 {
        self.inner.num_vertices
    }

    #[getter]
    fn num_colors(&self) -> usize {
        self.inner.num_colors()
    }

    #[getter]
    fn is_partite(&self) -> bool {
        self.inner.partition.is_some()
    }

    fn validate(&self) -> Vec<String> {
        validate_instance(&self.inner)
            .violations
            .iter()
            .map(|v| v.to_string())
            .collect()
    }

    /// Exhaustive search for a rainbow matching of size s (default t).
    /// Returns a list of (color, vertices) picks, or None.
    #[pyo3(signature = (s=None, max_nodes=None))]
    fn find_rainbow(
        &self,
        s: Option<usize>,
        max_nodes: Option<u64>,
    ) -> PyResult<Option<Vec<(usize, Vec<u32>)>>> {
        let mut budget = SearchBudget::default();
        if let Some(n) = max_nodes {
            budget.max_nodes = n;
        }
        let s = s.unwrap_or(self.inner.t as usize);
        let out = find_rainbow(&self.inner, s, &budget).map_err(err)?;
        match out.status {
            SearchStatus::Indeterminate => Err(PyValueError::new_err("budget exhausted")),
            ref status => Ok(certificate_to_py(status)),
        }
    }

    /// Spread-decomposition finder with search fallback. Returns
    /// (certificate_or_None, path) with path "constructive" or "fallback".
    fn find_constructive(&self) -> PyResult<(Option<Vec<(usize, Vec<u32>)>>, String)> {
        let rep = find_rainbow_constructive(&self.inner, &SearchBudget::default()).map_err(err)?;
        let path = match rep.path {
            FinderPath::Constructive => "constructive",
            FinderPath::Fallback => "fallback",
        };
        Ok((certificate_to_py(&rep.outcome.status), path.to_string()))
    }

    /// Wedge-form algebraic finder. Returns a certificate or None when the
    /// algebraic path proves nothing.
    #[pyo3(signature = (seed=0))]
    fn find_algebraic(&self, seed: u64) -> PyResult<Option<Vec<(usize, Vec<u32>)>>> {
        let out =
            rainbow_via_multilinear(&self.inner, &SearchBudget::default(), seed).map_err(err)?;
        Ok(certificate_to_py(&out.status))
    }

    /// True when every vertex-disjoint selection of t pool edges is
    /// monochromatic.
    fn strong_property_holds(&self) -> PyResult<bool> {
        match check_strong_property(&self.inner, &SearchBudget::default()).map_err(err)? {
            StrongOutcome::Holds => Ok(true),
            StrongOutcome::Fails(_) => Ok(false),
            StrongOutcome::Indeterminate => Err(PyValueError::new_err("budget exhausted")),
        }
    }

    fn lift(&self, target_r: u32) -> PyResult<Instance> {
        Ok(Instance {
            inner: lift_uniformity(&self.inner, target_r).map_err(err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(r={}, t={}, vertices={}, colors={})",
            self.inner.r,
            self.inner.t,
            self.inner.num_vertices,
            self.inner.num_colors()
        )
    }
}

#[pyfunction]
fn fixed_r(r: u32, t: u32) -> PyResult<Instance> {
    Ok(Instance {
        inner: fixed_r_construction(r, t).map_err(err)?,
    })
}

#[pyfunction]
fn simple_upper(r: u32, t: u32) -> PyResult<Instance> {
    Ok(Instance {
        inner: simple_f_upper_family(r, t).map_err(err)?,
    })
}

#[pyfunction]
fn simple_partite(r: u32, t: u32) -> PyResult<Instance> {
    Ok(Instance {
        inner: simple_f_partite_family(r, t).map_err(err)?,
    })
}

#[pyfunction]
fn t2_complete(r: u32) -> PyResult<Instance> {
    Ok(Instance {
        inner: t2_complete_construction(r).map_err(err)?,
    })
}

#[pyfunction]
fn t2_partite(r: u32) -> PyResult<Instance> {
    Ok(Instance {
        inner: t2_partite_construction(r).map_err(err)?,
    })
}

#[pyfunction]
#[pyo3(signature = (r, t, num_vertices, n, distinct=true, seed=0))]
fn random(r: u32, t: u32, num_vertices: u32, n: usize, distinct: bool, seed: u64) -> PyResult<Instance> {
    Ok(Instance {
        inner: random_instance(r, t, num_vertices, n, distinct, seed).map_err(err)?,
    })
}

/// Exact bound table as a dict of decimal strings.
#[pyfunction]
fn bounds(py: Python<'_>, r: u32, t: u32) -> PyResult<PyObject> {
    let rep = bounds_report(r, t).map_err(err)?;
    let json = rep.to_json().to_string();
    let json_mod = py.import("json")?;
    Ok(json_mod.call_method1("loads", (json,))?.unbind())
}

/// Largest rainbow-free family on a small universe; (n_max, witness, complete).
#[pyfunction]
#[pyo3(signature = (r, t, universe, partite=false, cap=1))]
fn exact_value(
    r: u32,
    t: u32,
    universe: u32,
    partite: bool,
    cap: usize,
) -> PyResult<(usize, Instance, bool)> {
    let res = exact_value_search(r, t, universe, partite, cap, &SearchBudget::default())
        .map_err(err)?;
    Ok((res.n_max, Instance { inner: res.witness }, res.complete))
}

#[pymodule]
fn rainbow_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Instance>()?;
    m.add_function(wrap_pyfunction!(fixed_r, m)?)?;
    m.add_function(wrap_pyfunction!(simple_upper, m)?)?;
    m.add_function(wrap_pyfunction!(simple_partite, m)?)?;
    m.add_function(wrap_pyfunction!(t2_complete, m)?)?;
    m.add_function(wrap_pyfunction!(t2_partite, m)?)?;
    m.add_function(wrap_pyfunction!(random, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(exact_value, m)?)?;
    Ok(())
}
