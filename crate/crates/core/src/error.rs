use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("torsion order {0} is invalid: every order must be at least 2")]
    TorsionOrder(u64),

    #[error("trivial group: free rank 0 and no torsion factors")]
    TrivialGroup,

    #[error("element {index}: {reason}")]
    BadElement { index: usize, reason: String },

    #[error("generating set is not symmetric: {0}")]
    NotSymmetric(String),

    #[error("generating set does not generate the group")]
    DoesNotGenerate,

    #[error("generating set is empty")]
    EmptyGeneratingSet,

    #[error("vertex budget exceeded: {needed} vertices requested, budget is {budget}")]
    Budget { needed: usize, budget: usize },

    #[error("basis size budget exceeded: {needed} monomials requested, budget is {budget}")]
    BasisBudget { needed: usize, budget: usize },

    #[error("function shape does not match: {0}")]
    ShapeMismatch(String),

    #[error("image lies outside the declared codomain: {0}")]
    OutsideCodomain(String),

    #[error("harmonicity precondition violated at {0}")]
    NotHarmonic(String),

    #[error("missing value at vertex {0}")]
    MissingValue(String),

    #[error("Dirichlet problem has empty boundary")]
    EmptyBoundary,

    #[error("solver failed to converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("consistency violation: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
