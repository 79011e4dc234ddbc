use alloc::string::String;
use alloc::vec::Vec;
use num_bigint::BigInt;

/// Errors produced by the exact and numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("expected a square selection, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("matrix has rank {found}, expected {expected}")]
    RankDeficient { expected: usize, found: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// `b` is not in `cone(A)`. `violated` is the primitive inward normal of a
    /// facet of `cone(A)` that `b` lies strictly outside of.
    #[error("right-hand side is outside cone(A): violates {violated:?} . b >= 0")]
    Infeasible { violated: Vec<BigInt> },

    /// `b` lies on the boundary of `cone(A)`, so the fiber is not full-dimensional.
    #[error("right-hand side lies on the boundary of cone(A); fiber has dimension {dimension} < {expected}")]
    NotFullDimensional { dimension: usize, expected: usize },

    #[error("polytope is not simple: vertex {vertex} lies on {facets} facets, expected {expected}")]
    NotSimple { vertex: usize, facets: usize, expected: usize },

    #[error("facet representation is not minimal: inequality {index} does not support a facet")]
    NotMinimal { index: usize },

    #[error("polyhedron is unbounded")]
    Unbounded,

    /// `b` lies on a wall of the chamber complex. `normal` is the primitive
    /// normal of the supporting hyperplane of the wall.
    #[error("right-hand side lies on a chamber wall with normal {normal:?}")]
    OnWall { normal: Vec<BigInt> },

    #[error("point is outside the closed cell")]
    OutsideCell,

    #[error("point is not in the interior of the polytope")]
    NotInterior,

    #[error("point lies on the divisor (adjoint or facet hyperplane vanishes)")]
    OnDivisor,

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("line search failed after {iterations} iterations (gradient norm {gradient_norm:e})")]
    LineSearchFailure { iterations: usize, gradient_norm: f64, iterate: Vec<f64> },

    #[error("iteration limit {0} reached")]
    IterationLimit(usize),

    #[error("path tracking failed at t = {t}: {reason}")]
    PathFailure { t: f64, reason: &'static str },

    #[error("could not draw a nondegenerate start pair")]
    DegenerateStart,

    #[error("expected exactly one positive endpoint, found {0}")]
    PositiveEndpoints(usize),

    #[error("monodromy loop budget exhausted with {found} solutions")]
    LoopBudgetExhausted { found: usize },

    #[error("independent monodromy runs disagree: {first} vs {second} solutions")]
    SeedDisagreement { first: usize, second: usize },
}

pub type Result<T> = core::result::Result<T, Error>;
