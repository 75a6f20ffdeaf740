//! JSON graph-spec files.
//!
//! ```json
//! {
//!   "vertices": [{"id": 1, "bc": "nk"}, {"id": 2, "bc": {"custom": [[{"re": 0, "im": 0}]]}}],
//!   "edges": [{"from": 1, "to": 2, "length": 1.0}],
//!   "leads": [{"vertex": 1}, {"vertex": 2}]
//! }
//! ```
//!
//! `length` defaults to 1. Unknown keys are rejected.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{BoundaryCondition, Edge, QuantumGraph, Vertex, VertexId};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    pub vertices: Vec<VertexSpec>,
    pub edges: Vec<EdgeSpec>,
    #[serde(default)]
    pub leads: Vec<LeadSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexSpec {
    pub id: VertexId,
    pub bc: BcSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum BcSpec {
    #[serde(rename = "nk")]
    NeumannKirchhoff,
    #[serde(rename = "custom")]
    Custom(Vec<Vec<ComplexSpec>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeSpec {
    pub from: VertexId,
    pub to: VertexId,
    #[serde(default = "unit_length")]
    pub length: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadSpec {
    pub vertex: VertexId,
}

fn unit_length() -> f64 {
    1.0
}

impl GraphSpec {
    /// Structural conversion only; run [`QuantumGraph::validate`] afterwards.
    pub fn to_graph(&self) -> Result<QuantumGraph> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| {
                let bc = match &v.bc {
                    BcSpec::NeumannKirchhoff => BoundaryCondition::NeumannKirchhoff,
                    BcSpec::Custom(rows) => BoundaryCondition::Custom(custom_matrix(v.id, rows)?),
                };
                Ok(Vertex { id: v.id, bc })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges = self
            .edges
            .iter()
            .map(|e| Edge {
                from: e.from,
                to: e.to,
                length: e.length,
            })
            .collect();
        let leads = self.leads.iter().map(|l| l.vertex).collect();
        Ok(QuantumGraph::new(vertices, edges, leads))
    }

    pub fn from_graph(graph: &QuantumGraph) -> Self {
        let vertices = graph
            .vertices()
            .iter()
            .map(|v| VertexSpec {
                id: v.id,
                bc: match &v.bc {
                    BoundaryCondition::NeumannKirchhoff => BcSpec::NeumannKirchhoff,
                    BoundaryCondition::Custom(m) => BcSpec::Custom(
                        (0..m.nrows())
                            .map(|i| {
                                (0..m.ncols())
                                    .map(|j| ComplexSpec {
                                        re: m[(i, j)].re,
                                        im: m[(i, j)].im,
                                    })
                                    .collect()
                            })
                            .collect(),
                    ),
                },
            })
            .collect();
        let edges = graph
            .edges()
            .iter()
            .map(|e| EdgeSpec {
                from: e.from,
                to: e.to,
                length: e.length,
            })
            .collect();
        let leads = graph.leads().iter().map(|&vertex| LeadSpec { vertex }).collect();
        Self {
            vertices,
            edges,
            leads,
        }
    }
}

fn custom_matrix(id: VertexId, rows: &[Vec<ComplexSpec>]) -> Result<DMatrix<Complex64>> {
    let n = rows.len();
    if let Some(bad) = rows.iter().position(|r| r.len() != n) {
        return Err(Error::Spec(format!(
            "vertex {id}: custom matrix row {bad} has {} entries, expected {n}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(n, n, |i, j| {
        Complex64::new(rows[i][j].re, rows[i][j].im)
    }))
}

pub fn parse_graph_spec(text: &str) -> Result<QuantumGraph> {
    let spec: GraphSpec = serde_json::from_str(text)?;
    spec.to_graph()
}

pub fn load_graph_spec(path: &Path) -> Result<QuantumGraph> {
    parse_graph_spec(&std::fs::read_to_string(path)?)
}

pub fn graph_spec_json(graph: &QuantumGraph) -> String {
    serde_json::to_string_pretty(&GraphSpec::from_graph(graph)).expect("graph specs serialize")
}
