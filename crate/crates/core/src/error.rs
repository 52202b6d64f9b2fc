use std::fmt;

use thiserror::Error;

/// Grid node `(i, j)`: `i` indexes u, `j` indexes v.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Node {
    pub i: usize,
    pub j: usize,
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("field shape {got:?} does not match chart {expected:?}")]
    Shape { expected: (usize, usize), got: (usize, usize) },
    #[error("invalid surface parameter: {0}")]
    InvalidParameter(String),
    #[error("quadratic differential coefficient must be non-zero")]
    ZeroQuadraticDifferential,
    #[error("point is not on the unit 3-sphere: |x| = {norm}")]
    NotOnSphere { norm: f64 },
    #[error("1-form is not orthogonal to x at node {node}: |<omega, x>| = {value:e}")]
    NotOrthogonal { node: Node, value: f64 },
    #[error("1-form is not closed: |d alpha| = {residual:e} exceeds {tolerance:e}")]
    NotClosed { residual: f64, tolerance: f64 },
    #[error("matrix does not preserve the (4,1) inner product: defect {defect:e}")]
    NotLorentzian { defect: f64 },
    #[error("point at node {node} is mapped to infinity of the affine chart")]
    AtInfinity { node: Node },
    #[error("II+ - II- vanishes at node {node} (norm {norm:e})")]
    VanishingQuadraticDifferential { node: Node, norm: f64 },
    #[error("W plane at node {node} has rank {rank}, expected 3")]
    RankDeficient { node: Node, rank: usize },
    #[error("no decomposable 3-plane: {0}")]
    NoLine(String),
    #[error("sign continuity fails at node {node}; the chart may need a double cover")]
    SignContinuity { node: Node },
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
