use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("cone is not pointed")]
    NotPointed,
    #[error("polyhedron is not full-dimensional")]
    NotFullDimensional,
    #[error("constraint system is infeasible")]
    Infeasible,
    #[error("projection is not full-dimensional")]
    ProjectionNotFullDimensional,
    #[error("parent polyhedron is unbounded in the projected coordinates")]
    UnboundedParent,
    #[error("vertex already lies inside the hull")]
    VertexInsideHull,
    #[error("group does not stabilize the polyhedron")]
    GroupDoesNotStabilize,
    #[error("group closure exceeds cap of {0} elements")]
    GroupTooLarge(usize),
    #[error("ray count exceeds cap of {0}")]
    RayCapExceeded(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid network problem: {0}")]
    InvalidProblem(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("inequality is not implied; violated at a feasible point")]
    NotImplied { point: Vec<crate::Q> },
    #[error("objective is unbounded")]
    UnboundedObjective,
    #[error("invalid access structure: {0}")]
    InvalidAccessStructure(String),
    #[error("invalid digraph: {0}")]
    InvalidDigraph(String),
    #[error("certificate check failed: {0}")]
    CertificateFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
