use thiserror::Error;

use crate::graph::{VertexId, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cycle graphs need at least 3 vertices, got {0}")]
    CycleTooSmall(usize),

    #[error("vertex degree must be at least 1")]
    ZeroDegree,

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("graph already has two leads")]
    TooManyLeads,

    #[error("invalid graph: {}", join_violations(.0))]
    InvalidGraph(Vec<Violation>),

    #[error("scattering requires exactly two leads, graph has {0}")]
    NotTwoPort(usize),

    #[error("linear system is singular at kl = {kl} (bound state on the energy shell)")]
    Singular { kl: f64 },

    #[error("limit policy failed to resolve the singularity at kl = {kl}")]
    UnresolvedSingularity { kl: f64 },

    #[error("step variable |z| = {modulus} lies outside the closed unit disk")]
    OutsideUnitDisk { modulus: f64 },

    #[error("wavenumber must be positive, got kl = {0}")]
    NonPositiveWavenumber(f64),

    #[error("lead coordinate must be non-negative, got {0}")]
    NegativeLeadCoordinate(f64),

    #[error("vertex parameters are not unitary (deviation {deviation:e})")]
    NonUnitaryParameters { deviation: f64 },

    #[error("amplitude has a pole at kl = {kl}")]
    Pole { kl: f64 },

    #[error("denominator has a vanishing constant term")]
    ZeroConstantTerm,

    #[error("edge {edge} has non-integral length {length}; walk analysis needs multiples of the base length")]
    NonIntegralLength { edge: usize, length: f64 },

    #[error("truncation order {order} is insufficient: estimated error {estimate:e} exceeds tolerance {tolerance:e}")]
    InsufficientOrder {
        order: usize,
        estimate: f64,
        tolerance: f64,
    },

    #[error("amplitude carries no transmission")]
    NoTransmission,

    #[error("quadrature failed to converge (last change {change:e})")]
    QuadratureDiverged { change: f64 },

    #[error("invalid series composition: {0}")]
    InvalidSeries(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error("sweep grid is not symmetric about pi (pair {index} off by {offset:e})")]
    AsymmetricGrid { index: usize, offset: f64 },

    #[error("graph spec: {0}")]
    Spec(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Singular { .. }
                | Error::UnresolvedSingularity { .. }
                | Error::Pole { .. }
                | Error::InsufficientOrder { .. }
                | Error::QuadratureDiverged { .. }
        )
    }
}
