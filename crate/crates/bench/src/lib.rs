//! Shared fixtures for the criterion benches.

use qgraph_core::{compose_series, make_cycle_graph, QuantumGraph, SeriesSpec, CANONICAL_GLUE};

/// Graphs exercised by every bench, labelled for reports.
pub fn fixtures() -> Vec<(&'static str, QuantumGraph)> {
    vec![
        ("c3", make_cycle_graph(3, 1.0).unwrap()),
        ("c4", make_cycle_graph(4, 1.0).unwrap()),
        ("c20", make_cycle_graph(20, 1.0).unwrap()),
        ("c3+c4+c3", series(&[3, 4, 3])),
        ("c4x6", series(&[4; 6])),
    ]
}

pub fn series(sizes: &[usize]) -> QuantumGraph {
    compose_series(&SeriesSpec::cycles(sizes, CANONICAL_GLUE)).unwrap()
}
