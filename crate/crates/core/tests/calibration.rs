//! Picks the junction geometry of series compositions: the canonical glue
//! must reproduce every reference resonance position, and vertex merging
//! must not.

use std::f64::consts::PI;

use qgraph_core::analysis::DEFAULT_MIN_HEIGHT;
use qgraph_core::{
    compose_series, detect_peaks, sweep_with_resolution, Glue, SeriesSpec, CANONICAL_GLUE,
};

/// Offsets `x` of the reference peaks at `pi ± x`.
const ANCHORS: [(&[usize], &[f64]); 3] = [
    (&[3, 3], &[0.91393]),
    (&[4, 4], &[1.76182, 1.37977]),
    (&[3, 4, 3], &[1.12611, 0.43440]),
];

fn offsets(sizes: &[usize], glue: Glue) -> Vec<f64> {
    let g = compose_series(&SeriesSpec::cycles(sizes, glue)).unwrap();
    let sweep = sweep_with_resolution(&g, 0.005, 2.0 * PI - 0.005, 2e-4).unwrap();
    detect_peaks(&sweep, DEFAULT_MIN_HEIGHT)
        .unwrap()
        .iter()
        .map(|p| (p.center - PI).abs())
        .collect()
}

fn matches(found: &[f64], want: &[f64]) -> bool {
    found.len() == 2 * want.len()
        && want
            .iter()
            .all(|w| found.iter().filter(|f| (*f - w).abs() < 1e-3).count() == 2)
}

#[test]
fn canonical_glue_reproduces_reference_peaks() {
    assert_eq!(CANONICAL_GLUE, Glue::ConnectingEdge { multiplier: 1 });
    for (sizes, want) in ANCHORS {
        let found = offsets(sizes, CANONICAL_GLUE);
        assert!(matches(&found, want), "{sizes:?}: {found:?}");
    }
}

#[test]
fn vertex_merge_does_not() {
    let hits = ANCHORS
        .iter()
        .filter(|(sizes, want)| matches(&offsets(sizes, Glue::VertexMerge), want))
        .count();
    assert_eq!(hits, 0);
}
