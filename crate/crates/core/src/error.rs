use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("degenerate basis: gram condition number {0:e} exceeds threshold")]
    DegenerateBasis(f64),

    #[error("quadrature not exact: {nodes} nodes per axis, at least {required} required")]
    Inexact { nodes: usize, required: usize },

    #[error("not a counterexample: integral of f(PB) is {0}, expected a negative value")]
    NotACounterexample(f64),

    #[error("precondition violated: {0}")]
    Precondition(String),
}
