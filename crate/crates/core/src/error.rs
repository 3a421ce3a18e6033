use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument violated the operation's documented preconditions.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{spins} total spins exceeds the configured maximum of {max}")]
    DimensionTooLarge { spins: usize, max: usize },

    /// Second-order perturbation theory needs an isolated ground state.
    #[error(
        "chain ground state is degenerate at B = {field} (gap {gap:e}); \
         the second-order effective Hamiltonian is not valid there"
    )]
    DegenerateGroundState { field: f64, gap: f64 },

    #[error("could not separate level crossings inside B in [{lo}, {hi}]")]
    AmbiguousCrossing { lo: f64, hi: f64 },

    #[error("trace shows fewer than 2 full oscillations ({found} found); extend t_grid")]
    TooFewOscillations { found: usize },

    #[error("every field value in the grid lies on a level crossing")]
    NoValidGridPoints,

    /// Two routes that must agree did not.
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
