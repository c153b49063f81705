use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Hamiltonian d·σ is degenerate (|d| = 0); the ground state is undefined")]
    DegenerateHamiltonian,

    #[error("gapless initial mode at k = {k}")]
    GaplessMode { k: f64 },

    #[error("critical momentum undefined for g_i + g_f = 0 (g_i = {g_i}, g_f = {g_f})")]
    UndefinedExpression { g_i: f64, g_f: f64 },

    #[error("no dynamical phase transition for g_i = {g_i}, g_f = {g_f}")]
    NoDqpt { g_i: f64, g_f: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("{n_phi} phase samples cannot resolve coherence order {m_max} (need at least {})", 2 * m_max + 1)]
    Aliasing { n_phi: usize, m_max: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("chain of {n} spins is outside the supported range 1..=14")]
    ResourceGuard { n: usize },

    #[error("numerical failure: {what} (achieved residual {residual:e})")]
    NumericalFailure { what: String, residual: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}
