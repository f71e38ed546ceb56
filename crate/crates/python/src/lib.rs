//! Python bindings. Reports come back as plain dicts (decoded from the same
//! JSON the CLI writes), node ids are ints in canonical order.

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use hplscape::fla::{fla_report, WalkConfig, DEFAULT_EPSILON};
use hplscape::local::{build_lon, escape_improve_rates, find_local_optima, local_search, EscapeConfig};
use hplscape::similarity::{compare_report, DEFAULT_GAMMA};
use hplscape::synthetic::{gen_grid_function, gen_nk, GridFunction, GridFunctionSpec, NeighborModel, NkSpec};
use hplscape::{parse_evaluations, parse_space, Direction, Landscape, Scenario, Split};

fn py_err(e: hplscape::Error) -> PyErr {
    match e {
        hplscape::Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

#[pyclass(name = "Landscape", module = "hplscape_py", frozen)]
struct PyLandscape {
    inner: Landscape,
}

impl PyLandscape {
    fn check_node(&self, node: usize) -> PyResult<()> {
        if node >= self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "node {node} out of range for {} nodes",
                self.inner.len()
            )));
        }
        Ok(())
    }
}

#[pymethods]
impl PyLandscape {
    /// Build from a schema JSON file and an evaluations CSV file.
    #[staticmethod]
    #[pyo3(signature = (schema, evals, loss_column = "loss", direction = "minimize", split = "test", alpha = None, epochs = None))]
    fn from_files(
        schema: &str,
        evals: &str,
        loss_column: &str,
        direction: &str,
        split: &str,
        alpha: Option<f64>,
        epochs: Option<u32>,
    ) -> PyResult<Self> {
        let space = parse_space(schema).map_err(py_err)?;
        let scenario = Scenario {
            loss_column: loss_column.to_string(),
            direction: direction.parse::<Direction>().map_err(py_err)?,
            fidelity_alpha: alpha,
            fidelity_epochs: epochs,
            split: Split::from(split),
        };
        let inner = parse_evaluations(&space, evals, &scenario).map_err(py_err)?;
        Ok(PyLandscape { inner })
    }

    #[staticmethod]
    fn from_graph_json(text: &str) -> PyResult<Self> {
        let inner = Landscape::from_json_str(text).map_err(py_err)?;
        Ok(PyLandscape { inner })
    }

    #[staticmethod]
    fn read_graph(path: &str) -> PyResult<Self> {
        let inner = Landscape::read_graph(path).map_err(py_err)?;
        Ok(PyLandscape { inner })
    }

    /// NK landscape over `n` binary hyperparameters; loss is negated fitness.
    #[staticmethod]
    #[pyo3(signature = (n, k, seed = 0, neighbor_model = "adjacent"))]
    fn nk(n: usize, k: usize, seed: u64, neighbor_model: &str) -> PyResult<Self> {
        let neighbor_model = match neighbor_model {
            "adjacent" => NeighborModel::Adjacent,
            "random" => NeighborModel::Random,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown neighbor model `{other}` (expected adjacent or random)"
                )))
            }
        };
        let spec = NkSpec { n, k, seed, neighbor_model };
        Ok(PyLandscape { inner: gen_nk(&spec).map_err(py_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (function, dims, min = -5.0, max = 5.0, points = 21, shift_seed = None))]
    fn grid_function(
        function: &str,
        dims: usize,
        min: f64,
        max: f64,
        points: usize,
        shift_seed: Option<u64>,
    ) -> PyResult<Self> {
        let function = function.parse::<GridFunction>().map_err(py_err)?;
        let spec = GridFunctionSpec {
            shift_seed,
            ..GridFunctionSpec::square(function, dims, min, max, points)
        };
        Ok(PyLandscape { inner: gen_grid_function(&spec).map_err(py_err)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Landscape({} nodes, {} adjacencies)",
            self.inner.len(),
            self.inner.adjacency_count()
        )
    }

    #[getter]
    fn n_nodes(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn n_adjacencies(&self) -> usize {
        self.inner.adjacency_count()
    }

    fn losses(&self) -> Vec<f64> {
        self.inner.losses().to_vec()
    }

    /// Fractional ranks, 1 = best.
    fn ranks(&self) -> Vec<f64> {
        self.inner.ranks()
    }

    /// Grid index vectors in node order.
    fn configs(&self) -> Vec<Vec<u32>> {
        self.inner.configs().iter().map(|c| c.indices().to_vec()).collect()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn neutral_pairs(&self) -> Vec<(usize, usize)> {
        self.inner.neutral_pairs().to_vec()
    }

    fn neighbors(&self, node: usize) -> PyResult<Vec<usize>> {
        self.check_node(node)?;
        Ok(self.inner.neighbors_of(node).to_vec())
    }

    fn distance(&self, a: usize, b: usize) -> PyResult<u64> {
        self.check_node(a)?;
        self.check_node(b)?;
        Ok(self.inner.distance(a, b))
    }

    /// Same configurations with new losses (one per node, in node order).
    fn with_losses(&self, losses: Vec<f64>) -> PyResult<Self> {
        let inner = self.inner.with_losses(losses).map_err(py_err)?;
        Ok(PyLandscape { inner })
    }

    fn to_graph_json(&self) -> String {
        self.inner.to_json()
    }

    #[pyo3(signature = (n_walks = 100, walk_length = 100, lag = 1, seed = 0, epsilon = DEFAULT_EPSILON))]
    fn fla_report<'py>(
        &self,
        py: Python<'py>,
        n_walks: usize,
        walk_length: usize,
        lag: usize,
        seed: u64,
        epsilon: f64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let w = WalkConfig { n_walks, walk_length, lag, seed };
        let r = fla_report(&self.inner, &w, epsilon).map_err(py_err)?;
        json_to_py(py, &r.to_json())
    }

    /// Returns (optimum, steps, path) of best-improvement descent from `start`.
    fn local_search(&self, start: usize) -> PyResult<(usize, usize, Vec<usize>)> {
        self.check_node(start)?;
        let t = local_search(&self.inner, start);
        Ok((t.optimum, t.steps, t.path))
    }

    fn local_optima(&self) -> Vec<usize> {
        find_local_optima(&self.inner).optima().to_vec()
    }

    /// Per node: the optimum it descends to and the number of steps.
    fn basins(&self) -> (Vec<usize>, Vec<usize>) {
        let b = find_local_optima(&self.inner);
        (0..self.inner.len()).map(|u| (b.optimum_of(u), b.steps(u))).unzip()
    }

    fn lon<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let b = find_local_optima(&self.inner);
        json_to_py(py, &build_lon(&self.inner, &b).to_json())
    }

    #[pyo3(signature = (enumeration_limit = 1_000_000, samples = 100_000, seed = 0))]
    fn escape_rates<'py>(
        &self,
        py: Python<'py>,
        enumeration_limit: u64,
        samples: u64,
        seed: u64,
    ) -> PyResult<Bound<'py, PyAny>> {
        let b = find_local_optima(&self.inner);
        let cfg = EscapeConfig { enumeration_limit, samples, seed };
        let stats = escape_improve_rates(&self.inner, &b, &cfg);
        let text = serde_json::to_string(&stats).map_err(|e| PyValueError::new_err(e.to_string()))?;
        json_to_py(py, &text)
    }

    #[pyo3(signature = (other, gamma = DEFAULT_GAMMA))]
    fn compare<'py>(&self, py: Python<'py>, other: &PyLandscape, gamma: f64) -> PyResult<Bound<'py, PyAny>> {
        let r = compare_report(&self.inner, &other.inner, gamma).map_err(py_err)?;
        json_to_py(py, &r.to_json())
    }
}

#[pymodule]
fn hplscape_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLandscape>()?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
