//! Scattering through metric quantum graphs: a directed-bond solver, the
//! analytic cycle amplitudes it cross-checks, series compositions of cycles,
//! quantum-walk statistics from the transmission generating function, and
//! resonance analysis of transmission spectra.

pub mod analysis;
pub mod closed_forms;
pub mod compose;
pub mod error;
pub mod export;
pub mod graph;
pub mod limit;
pub mod poly;
pub mod solver;
pub mod spec_file;
pub mod walks;

pub use analysis::{
    check_reflection_symmetry, detect_peaks, detect_peaks_with_floor, detect_suppression_bands,
    sweep_grid, sweep_transmission, sweep_with_resolution, symmetric_grid, uniform_grid, Band,
    PeakReport, Sweep,
};
pub use closed_forms::{
    cycle_nk_amplitude, eval_amplitude, symmetric_c3_amplitude, symmetric_c4_amplitude, Family,
    NkCycle, RationalAmplitude, SymmetricParams,
};
pub use compose::{
    compose_series, parse_composition, parse_preset, Glue, SeriesElement, SeriesSpec,
    CANONICAL_GLUE,
};
pub use error::{Error, Result};
pub use graph::{
    make_cycle_graph, nk_vertex_matrix, validate_graph, BoundaryCondition, Edge, QuantumGraph,
    ValidationReport, Vertex, VertexId, VertexScattering, Violation,
};
pub use num_complex::Complex64;
pub use poly::Poly;
pub use spec_file::{graph_spec_json, load_graph_spec, parse_graph_spec, GraphSpec};
pub use solver::{assemble_bond_system, graph_amplitudes, green_function_value, scattering_matrix, BondSystem, ScatteringResult};
pub use walks::{
    coefficients_via_power_iteration, taylor_coefficients, walk_stats, walk_stats_by_quadrature,
    WalkSeries, WalkStats,
};
