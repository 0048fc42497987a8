use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("face {face} is empty or has fewer than two vertices")]
    DegenerateFace { face: usize },
    #[error("face {face} contains a loop at vertex {vertex}")]
    Loop { face: usize, vertex: usize },
    #[error("edge ({0}, {1}) is used by {2} face sides, expected exactly 2")]
    NonManifoldEdge(usize, usize, usize),
    #[error("edge ({0}, {1}) is traversed twice in the same direction")]
    InconsistentOrientation(usize, usize),
    #[error("vertex ids must be 0..{expected}, id {missing} is unused")]
    MissingVertex { expected: usize, missing: usize },
    #[error("faces around vertex {0} do not form a single disk")]
    NonManifoldVertex(usize),
    #[error("input graph is disconnected")]
    Disconnected,
    #[error("embedding is not spherical: V - E + F = {0}")]
    NotSpherical(i64),
    #[error("graph is not polyhedral: {0}")]
    NotPolyhedral(String),
    #[error("cycle enumeration exceeded the cap of {0} cycles")]
    ResourceCap(usize),
    #[error("missing weight for edge ({0}, {1})")]
    MissingWeight(usize, usize),
    #[error("unknown edge ({0}, {1})")]
    UnknownEdge(usize, usize),
    #[error("weight {value} on edge {edge} is outside {range}")]
    WeightOutOfRange {
        edge: usize,
        value: f64,
        range: &'static str,
    },
    #[error("corner {0} is not trivalent")]
    NotTrivalent(usize),
    #[error("pattern angle conditions fail: {0}")]
    ConditionsFailed(String),
    #[error("{what} did not converge after {iterations} iterations (worst error {worst:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        worst: f64,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid mark: {0}")]
    InvalidMark(String),
    #[error("leading triple of vertex {0}'s star is collinear")]
    CollinearStar(usize),
    #[error("points of vertex {vertex} are not coplanar (deviation {deviation:e})")]
    NotCoplanar { vertex: usize, deviation: f64 },
    #[error("point off the unit sphere by {0:e}")]
    OffSphere(f64),
    #[error("missing contact data for edge {0}")]
    MissingContact(usize),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("continuation failed at s = {s}: {reason}")]
    Continuation { s: f64, reason: String },
    #[error("internal error: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
