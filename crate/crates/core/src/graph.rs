//! Metric graph model: vertices with flux-conserving boundary conditions,
//! internal edges measured in units of the base length, and up to two
//! external leads.
//!
//! Vertex matrices follow one fixed convention. The amplitude for a wave
//! arriving on port `a` and leaving on port `b` is entry `(b, a)`, so the
//! diagonal holds back-reflection. Ports at a vertex are ordered by edge
//! index (an edge's tail before its head for self-loops), followed by the
//! attached leads in lead order.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type VertexId = u32;

/// Unitarity tolerance applied when vertex matrices are built or validated.
pub const CONSTRUCTION_UNITARITY_TOL: f64 = 1e-12;

/// Looser tolerance for parameter sets and checks downstream of construction.
pub const UNITARITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub enum BoundaryCondition {
    NeumannKirchhoff,
    /// Explicit vertex scattering matrix over the vertex's ports.
    Custom(DMatrix<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub id: VertexId,
    pub bc: BoundaryCondition,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub from: VertexId,
    pub to: VertexId,
    /// Length in units of the base length.
    pub length: f64,
}

/// Which end of an edge a port sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum End {
    Tail,
    Head,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Port {
    Edge { edge: usize, end: End },
    Lead(usize),
}

/// Unitary scattering matrix of a single vertex.
#[derive(Clone, Debug, PartialEq)]
pub struct VertexScattering {
    matrix: DMatrix<Complex64>,
}

impl VertexScattering {
    pub fn new(matrix: DMatrix<Complex64>) -> Self {
        assert!(matrix.is_square(), "vertex matrix must be square");
        Self { matrix }
    }

    pub fn degree(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Amplitude for arrival on port `from` and departure on port `to`.
    pub fn amplitude(&self, to: usize, from: usize) -> Complex64 {
        self.matrix[(to, from)]
    }

    /// `max |(σσ† - I)_ij|`.
    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect(&self.matrix)
    }
}

pub fn unitarity_defect(m: &DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    let prod = m * m.adjoint();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let expect = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((prod[(i, j)] - Complex64::new(expect, 0.0)).norm());
        }
    }
    worst
}

/// Neumann-Kirchhoff vertex matrix: `2/d` off the diagonal, `2/d - 1` on it.
pub fn nk_vertex_matrix(degree: usize) -> Result<VertexScattering> {
    if degree == 0 {
        return Err(Error::ZeroDegree);
    }
    let d = degree as f64;
    let t = 2.0 / d;
    let m = DMatrix::from_fn(degree, degree, |i, j| {
        Complex64::new(if i == j { t - 1.0 } else { t }, 0.0)
    });
    Ok(VertexScattering::new(m))
}

/// A single invariant violation found by [`QuantumGraph::validate`].
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    NoVertices,
    DuplicateVertex(VertexId),
    UnknownEdgeEndpoint { edge: usize, vertex: VertexId },
    UnknownLeadVertex { lead: usize, vertex: VertexId },
    LeadCount(usize),
    NonPositiveLength { edge: usize, length: f64 },
    Disconnected { components: usize },
    CustomDimension {
        vertex: VertexId,
        expected: usize,
        found: (usize, usize),
    },
    NonUnitary { vertex: VertexId, deviation: f64 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoVertices => write!(f, "graph has no vertices"),
            Violation::DuplicateVertex(v) => write!(f, "vertex id {v} appears more than once"),
            Violation::UnknownEdgeEndpoint { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            Violation::UnknownLeadVertex { lead, vertex } => {
                write!(f, "lead {lead} attaches to unknown vertex {vertex}")
            }
            Violation::LeadCount(n) => write!(f, "graph has {n} leads; expected 0 or 2"),
            Violation::NonPositiveLength { edge, length } => {
                write!(f, "edge {edge} has non-positive length {length}")
            }
            Violation::Disconnected { components } => {
                write!(f, "graph is disconnected ({components} components)")
            }
            Violation::CustomDimension {
                vertex,
                expected,
                found,
            } => write!(
                f,
                "vertex {vertex} custom matrix is {}x{}, degree is {expected}",
                found.0, found.1
            ),
            Violation::NonUnitary { vertex, deviation } => {
                write!(f, "vertex {vertex} matrix is not unitary (deviation {deviation:e})")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuantumGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    leads: Vec<VertexId>,
}

impl QuantumGraph {
    /// Assembles a graph without checking invariants; see [`Self::validate`].
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>, leads: Vec<VertexId>) -> Self {
        Self {
            vertices,
            edges,
            leads,
        }
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn leads(&self) -> &[VertexId] {
        &self.leads
    }

    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn contains(&self, id: VertexId) -> bool {
        self.vertex(id).is_some()
    }

    /// Ordered ports at vertex `id`: internal edge ends by edge index, then leads.
    pub fn ports(&self, id: VertexId) -> Vec<Port> {
        let mut ports = Vec::new();
        for (i, e) in self.edges.iter().enumerate() {
            if e.from == id {
                ports.push(Port::Edge {
                    edge: i,
                    end: End::Tail,
                });
            }
            if e.to == id {
                ports.push(Port::Edge {
                    edge: i,
                    end: End::Head,
                });
            }
        }
        for (i, &l) in self.leads.iter().enumerate() {
            if l == id {
                ports.push(Port::Lead(i));
            }
        }
        ports
    }

    /// Total degree, counting internal edge ends and attached leads.
    pub fn degree(&self, id: VertexId) -> usize {
        self.ports(id).len()
    }

    pub fn vertex_scattering(&self, id: VertexId) -> Result<VertexScattering> {
        let v = self.vertex(id).ok_or(Error::UnknownVertex(id))?;
        match &v.bc {
            BoundaryCondition::NeumannKirchhoff => nk_vertex_matrix(self.degree(id)),
            BoundaryCondition::Custom(m) => Ok(VertexScattering::new(m.clone())),
        }
    }

    /// Returns a copy with one more lead at `id`. NK vertices pick up the new
    /// degree automatically since their matrices are derived on demand.
    pub fn attach_lead(&self, id: VertexId) -> Result<Self> {
        if self.leads.len() >= 2 {
            return Err(Error::TooManyLeads);
        }
        if !self.contains(id) {
            return Err(Error::UnknownVertex(id));
        }
        let mut g = self.clone();
        g.leads.push(id);
        Ok(g)
    }

    pub fn without_leads(&self) -> Self {
        Self {
            leads: Vec::new(),
            ..self.clone()
        }
    }

    /// Entrance and exit exchanged.
    pub fn with_leads_swapped(&self) -> Self {
        let mut g = self.clone();
        g.leads.reverse();
        g
    }

    /// Multiplies every edge length by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut g = self.clone();
        for e in &mut g.edges {
            e.length *= factor;
        }
        g
    }

    /// Edge lengths as step counts; fails on any non-integral length.
    pub fn integral_lengths(&self) -> Result<Vec<usize>> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let r = e.length.round();
                if r >= 1.0 && (e.length - r).abs() <= 1e-12 * r {
                    Ok(r as usize)
                } else {
                    Err(Error::NonIntegralLength {
                        edge: i,
                        length: e.length,
                    })
                }
            })
            .collect()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        if self.vertices.is_empty() {
            violations.push(Violation::NoVertices);
        }
        for (i, v) in self.vertices.iter().enumerate() {
            if self.vertices[..i].iter().any(|w| w.id == v.id) {
                violations.push(Violation::DuplicateVertex(v.id));
            }
        }
        let mut endpoints_ok = true;
        for (i, e) in self.edges.iter().enumerate() {
            for vertex in [e.from, e.to] {
                if !self.contains(vertex) {
                    endpoints_ok = false;
                    violations.push(Violation::UnknownEdgeEndpoint { edge: i, vertex });
                }
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                violations.push(Violation::NonPositiveLength {
                    edge: i,
                    length: e.length,
                });
            }
        }
        for (i, &l) in self.leads.iter().enumerate() {
            if !self.contains(l) {
                violations.push(Violation::UnknownLeadVertex {
                    lead: i,
                    vertex: l,
                });
            }
        }
        if !self.leads.is_empty() && self.leads.len() != 2 {
            violations.push(Violation::LeadCount(self.leads.len()));
        }
        if endpoints_ok && !self.vertices.is_empty() {
            let components = self.component_count();
            if components > 1 {
                violations.push(Violation::Disconnected { components });
            }
        }
        for v in &self.vertices {
            if let BoundaryCondition::Custom(m) = &v.bc {
                let degree = self.degree(v.id);
                if m.nrows() != degree || m.ncols() != degree {
                    violations.push(Violation::CustomDimension {
                        vertex: v.id,
                        expected: degree,
                        found: (m.nrows(), m.ncols()),
                    });
                } else {
                    let deviation = unitarity_defect(m);
                    if deviation > CONSTRUCTION_UNITARITY_TOL {
                        violations.push(Violation::NonUnitary {
                            vertex: v.id,
                            deviation,
                        });
                    }
                }
            }
        }
        ValidationReport { violations }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(Error::InvalidGraph(report.violations))
        }
    }

    fn component_count(&self) -> usize {
        let index = |id: VertexId| self.vertices.iter().position(|v| v.id == id).unwrap();
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &self.edges {
            let (a, b) = (find(&mut parent, index(e.from)), find(&mut parent, index(e.to)));
            if a != b {
                parent[a] = b;
            }
        }
        (0..parent.len())
            .filter(|&i| find(&mut parent, i) == i)
            .count()
    }
}

pub fn validate_graph(graph: &QuantumGraph) -> ValidationReport {
    graph.validate()
}

/// Cycle on vertices `1..=n` with edges `(1,2), (2,3), ..., (n,1)`, NK
/// conditions everywhere, and leads on the adjacent vertices 1 and 2.
pub fn make_cycle_graph(n: usize, length: f64) -> Result<QuantumGraph> {
    if n < 3 {
        return Err(Error::CycleTooSmall(n));
    }
    let vertices = (1..=n as VertexId)
        .map(|id| Vertex {
            id,
            bc: BoundaryCondition::NeumannKirchhoff,
        })
        .collect();
    let edges = (1..=n as VertexId)
        .map(|i| Edge {
            from: i,
            to: i % n as VertexId + 1,
            length,
        })
        .collect();
    Ok(QuantumGraph::new(vertices, edges, vec![1, 2]))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn cycle_structure() {
        let g = make_cycle_graph(3, 1.0).unwrap();
        assert_eq!(g.vertices().len(), 3);
        assert_eq!(g.edges().len(), 3);
        assert_eq!(g.leads(), &[1, 2]);

        let g = make_cycle_graph(4, 1.0).unwrap();
        let degrees: Vec<_> = (1..=4).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, vec![3, 3, 2, 2]);
        assert!(matches!(make_cycle_graph(2, 1.0), Err(Error::CycleTooSmall(2))));
    }

    #[test]
    fn nk_amplitudes() {
        let s = nk_vertex_matrix(3).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { -1.0 / 3.0 } else { 2.0 / 3.0 };
                assert!((s.amplitude(i, j) - c(want)).norm() < 1e-15);
            }
        }
        let s = nk_vertex_matrix(2).unwrap();
        assert!(s.amplitude(0, 0).norm() < 1e-15);
        assert!((s.amplitude(1, 0) - c(1.0)).norm() < 1e-15);

        let s = nk_vertex_matrix(1).unwrap();
        assert_eq!(s.matrix()[(0, 0)], c(1.0));
        assert!(s.unitarity_defect() < 1e-15);
        assert!(matches!(nk_vertex_matrix(0), Err(Error::ZeroDegree)));
    }

    #[test]
    fn nk_unitary_with_unit_row_sums() {
        for d in 1..=20 {
            let s = nk_vertex_matrix(d).unwrap();
            assert!(s.unitarity_defect() < 1e-12, "d = {d}");
            for i in 0..d {
                let row: Complex64 = (0..d).map(|j| s.amplitude(i, j)).sum();
                assert!((row - c(1.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn attach_leads() {
        let bare = make_cycle_graph(4, 1.0).unwrap().without_leads();
        let g = bare.attach_lead(1).unwrap().attach_lead(2).unwrap();
        let degrees: Vec<_> = (1..=4).map(|v| g.degree(v)).collect();
        assert_eq!(degrees, vec![3, 3, 2, 2]);
        assert_eq!(g.vertex_scattering(1).unwrap().degree(), 3);
        assert_eq!(g.vertex_scattering(3).unwrap().degree(), 2);

        let opposite = bare.attach_lead(1).unwrap().attach_lead(3).unwrap();
        let degrees: Vec<_> = (1..=4).map(|v| opposite.degree(v)).collect();
        assert_eq!(degrees, vec![3, 2, 3, 2]);

        assert!(matches!(g.attach_lead(3), Err(Error::TooManyLeads)));
        assert!(matches!(bare.attach_lead(9), Err(Error::UnknownVertex(9))));
    }

    #[test]
    fn port_order_puts_leads_last() {
        let g = make_cycle_graph(3, 1.0).unwrap();
        // vertex 1 is the tail of edge 0 and the head of edge 2
        assert_eq!(
            g.ports(1),
            vec![
                Port::Edge { edge: 0, end: End::Tail },
                Port::Edge { edge: 2, end: End::Head },
                Port::Lead(0),
            ]
        );
    }

    #[test]
    fn validation_reports() {
        assert!(make_cycle_graph(3, 1.0).unwrap().validate().is_valid());
        for n in 3..50 {
            assert!(validate_graph(&make_cycle_graph(n, 1.0).unwrap()).is_valid());
        }

        let mut g = make_cycle_graph(3, 1.0).unwrap();
        g.vertices[0].bc = BoundaryCondition::Custom(DMatrix::from_diagonal(
            &nalgebra::DVector::from_vec(vec![c(2.0), c(1.0), c(1.0)]),
        ));
        let report = g.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::NonUnitary { vertex: 1, .. }));

        let tri = make_cycle_graph(3, 1.0).unwrap();
        let mut vertices = tri.vertices().to_vec();
        let mut edges = tri.edges().to_vec();
        for v in tri.vertices() {
            vertices.push(Vertex { id: v.id + 3, bc: v.bc.clone() });
        }
        for e in tri.edges() {
            edges.push(Edge { from: e.from + 3, to: e.to + 3, length: 1.0 });
        }
        let split = QuantumGraph::new(vertices, edges, vec![1, 4]);
        assert_eq!(
            split.validate().violations,
            vec![Violation::Disconnected { components: 2 }]
        );
    }

    #[test]
    fn validation_catches_structural_errors() {
        let g = QuantumGraph::new(
            vec![
                Vertex { id: 1, bc: BoundaryCondition::NeumannKirchhoff },
                Vertex { id: 1, bc: BoundaryCondition::NeumannKirchhoff },
            ],
            vec![Edge { from: 1, to: 7, length: -1.0 }],
            vec![1],
        );
        let v = g.validate().violations;
        assert!(v.contains(&Violation::DuplicateVertex(1)));
        assert!(v.contains(&Violation::UnknownEdgeEndpoint { edge: 0, vertex: 7 }));
        assert!(v.contains(&Violation::NonPositiveLength { edge: 0, length: -1.0 }));
        assert!(v.contains(&Violation::LeadCount(1)));

        let mut g = make_cycle_graph(3, 1.0).unwrap();
        g.vertices[2].bc = BoundaryCondition::Custom(DMatrix::identity(3, 3));
        assert!(matches!(
            g.validate().violations[..],
            [Violation::CustomDimension { vertex: 3, expected: 2, .. }]
        ));
    }

    #[test]
    fn integral_lengths() {
        let g = make_cycle_graph(3, 2.0).unwrap();
        assert_eq!(g.integral_lengths().unwrap(), vec![2, 2, 2]);
        assert!(make_cycle_graph(3, 1.5).unwrap().integral_lengths().is_err());
    }
}
