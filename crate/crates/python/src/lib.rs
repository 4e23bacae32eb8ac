//! Python bindings: a `Graph` class over the core graph container plus its
//! determination map, and module-level access to the bundled fixtures.

use mampcg::{
    audit_faithfulness, closure, eampify, emampify, enumerate_model, fixtures, latent_lift,
    marginalize, markov_equivalent, models_equal, pairwise_base, parse_graph, selectionize,
    separated, serialize_graph, to_dot, triplexes, CiThresholds, Criterion, DeterminationMap,
    EquivalenceMode, Error, ErrorGraph, Family, IndependenceModel, MixedGraph, NodeTag,
};
use pyo3::exceptions::{PyKeyError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::UnknownNode(_) => PyKeyError::new_err(e.to_string()),
        Error::Numerical(_) | Error::PropertyViolation(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    Ok(match name.to_ascii_lowercase().as_str() {
        "mamp" => Family::Mamp,
        "amp" => Family::Amp,
        "mvr" => Family::Mvr,
        "lwf" => Family::Lwf,
        "dag" => Family::Dag,
        other => return Err(PyValueError::new_err(format!("unknown family `{other}`"))),
    })
}

type Triple = (Vec<String>, Vec<String>, Vec<String>);

fn statements(m: &IndependenceModel) -> Vec<Triple> {
    m.sorted_statements()
        .iter()
        .map(|s| (m.names_of(s.x), m.names_of(s.y), m.names_of(s.z)))
        .collect()
}

/// A mixed graph with undirected (`--`), directed (`->`) and bidirected
/// (`<->`) edges, together with its determination map.
#[pyclass(frozen, skip_from_py_object, module = "pymampcg")]
#[derive(Clone)]
struct Graph {
    graph: MixedGraph,
    det: DeterminationMap,
}

impl Graph {
    fn plain(graph: MixedGraph) -> Self {
        Graph {
            graph,
            det: DeterminationMap::new(),
        }
    }

    fn lifted(eg: ErrorGraph) -> Self {
        Graph {
            graph: eg.graph,
            det: eg.det,
        }
    }

    fn error_graph(&self) -> PyResult<ErrorGraph> {
        if !self.graph.nodes_tagged(NodeTag::Error).is_empty() {
            return ErrorGraph::from_parts(self.graph.clone(), self.det.clone()).map_err(to_py);
        }
        let lift = if self.graph.validate(Family::Amp).is_valid() {
            eampify(&self.graph)
        } else {
            emampify(&self.graph)
        };
        lift.map_err(to_py)
    }
}

#[pymethods]
impl Graph {
    /// Parses the line-oriented graph format.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let (graph, det) = parse_graph(text).map_err(to_py)?;
        Ok(Graph { graph, det })
    }

    /// Builds a graph from a list such as `"A->B, B--C, C<->D"`.
    #[staticmethod]
    fn from_edges(edges: &str) -> PyResult<Self> {
        MixedGraph::from_edge_list(edges)
            .map(Graph::plain)
            .map_err(to_py)
    }

    #[getter]
    fn nodes(&self) -> Vec<String> {
        self.graph.names().to_vec()
    }

    #[getter]
    fn edges(&self) -> String {
        self.graph.edge_list_string()
    }

    /// `(constraint, witness)` pairs; empty iff the graph is in the family.
    #[pyo3(signature = (family_name = "mamp"))]
    fn validate(&self, family_name: &str) -> PyResult<Vec<(String, Vec<String>)>> {
        let report = self.graph.validate(family(family_name)?);
        Ok(report
            .violations
            .into_iter()
            .map(|v| (v.constraint.to_string(), v.witness))
            .collect())
    }

    #[pyo3(signature = (x, y, z = Vec::new(), criterion = "mamp"))]
    fn separated(
        &self,
        x: Vec<String>,
        y: Vec<String>,
        z: Vec<String>,
        criterion: &str,
    ) -> PyResult<bool> {
        let c: Criterion = criterion.parse().map_err(to_py)?;
        let g = &self.graph;
        let (xs, ys, zs) = (
            g.set_of(&x).map_err(to_py)?,
            g.set_of(&y).map_err(to_py)?,
            g.set_of(&z).map_err(to_py)?,
        );
        separated(g, xs, ys, zs, c, &self.det).map_err(to_py)
    }

    /// Every separation statement as `(X, Y, Z)` name lists.
    #[pyo3(signature = (criterion = "mamp"))]
    fn model(&self, criterion: &str) -> PyResult<Vec<Triple>> {
        let c: Criterion = criterion.parse().map_err(to_py)?;
        let m = enumerate_model(&self.graph, c, &self.det, self.graph.all()).map_err(to_py)?;
        Ok(statements(&m))
    }

    fn pairwise_base(&self) -> PyResult<Vec<Triple>> {
        Ok(statements(&pairwise_base(&self.graph).map_err(to_py)?))
    }

    /// Closure of the pairwise base as statements.
    fn closure(&self) -> PyResult<Vec<Triple>> {
        let base = pairwise_base(&self.graph).map_err(to_py)?;
        Ok(statements(&closure(&base).map_err(to_py)?.model))
    }

    /// Whether the closure of the pairwise base equals the separation model.
    fn closure_matches_model(&self) -> PyResult<bool> {
        let base = pairwise_base(&self.graph).map_err(to_py)?;
        let derived = closure(&base).map_err(to_py)?.model;
        let m = enumerate_model(&self.graph, Criterion::Mamp, &self.det, self.graph.all())
            .map_err(to_py)?;
        Ok(models_equal(&derived, &m, 0).map_err(to_py)?.equal)
    }

    /// Triplexes as `(endpoint, endpoint, center)`.
    fn triplexes(&self) -> PyResult<Vec<(String, String, String)>> {
        Ok(triplexes(&self.graph)
            .map_err(to_py)?
            .into_iter()
            .map(|t| (t.endpoints.0, t.endpoints.1, t.center))
            .collect())
    }

    #[pyo3(signature = (other, oracle = false))]
    fn markov_equivalent(&self, other: &Graph, oracle: bool) -> PyResult<bool> {
        let mode = if oracle {
            EquivalenceMode::Oracle
        } else {
            EquivalenceMode::Triplex
        };
        markov_equivalent(&self.graph, &other.graph, mode).map_err(to_py)
    }

    fn eampify(&self) -> PyResult<Graph> {
        eampify(&self.graph).map(Graph::lifted).map_err(to_py)
    }

    fn emampify(&self) -> PyResult<Graph> {
        emampify(&self.graph).map(Graph::lifted).map_err(to_py)
    }

    fn selectionize(&self) -> PyResult<Graph> {
        selectionize(&self.error_graph()?)
            .map(Graph::lifted)
            .map_err(to_py)
    }

    fn marginalize(&self, nodes: Vec<String>) -> PyResult<Graph> {
        marginalize(&self.error_graph()?, &nodes)
            .map(Graph::lifted)
            .map_err(to_py)
    }

    fn latent_lift(&self) -> PyResult<Graph> {
        latent_lift(&self.graph)
            .map(|l| Graph::plain(l.graph))
            .map_err(to_py)
    }

    /// Gaussian audit report as a JSON string.
    #[pyo3(signature = (seeds = Vec::new()))]
    fn gaussian_audit(&self, seeds: Vec<u64>) -> PyResult<String> {
        let report =
            audit_faithfulness(&self.graph, &CiThresholds::default(), &seeds).map_err(to_py)?;
        serde_json::to_string(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))
    }

    /// The graph in the text format, including `det` lines.
    fn to_text(&self) -> String {
        serialize_graph(&self.graph, &self.det)
    }

    #[pyo3(signature = (name = "G"))]
    fn to_dot(&self, name: &str) -> String {
        to_dot(&self.graph, name)
    }

    fn __repr__(&self) -> String {
        format!("Graph({:?})", self.graph.edge_list_string())
    }

    fn __eq__(&self, other: &Graph) -> bool {
        self.graph == other.graph && self.det == other.det
    }
}

/// A bundled example graph by name.
#[pyfunction]
fn fixture(name: &str) -> PyResult<Graph> {
    fixtures::load(name).map(Graph::plain).map_err(to_py)
}

#[pyfunction]
fn fixture_names() -> Vec<&'static str> {
    fixtures::ALL.iter().map(|(name, _)| *name).collect()
}

#[pymodule]
fn pymampcg(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    Ok(())
}
