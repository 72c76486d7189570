//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A parameter violates its physical domain (negative temperature, rate, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A response function was evaluated at (or numerically indistinguishable
    /// from) one of its real-axis poles.
    #[error("pole in the {mode} response at omega = {omega:.6e} rad/s")]
    Pole { mode: &'static str, omega: f64 },

    /// Eq.-(4)-style steady state has a vanishing denominator.
    #[error("singular drive: steady-state denominator vanishes")]
    SingularDrive,

    /// The supermode diagonalization requires omega_a = omega_m.
    #[error("degenerate-frequency required: omega_a != omega_m (got {omega_a:.6e} vs {omega_m:.6e})")]
    DegenerateFrequencyRequired { omega_a: f64, omega_m: f64 },

    /// No exceptional point exists in the coupling for these rates.
    #[error("no exceptional point: kappa_a + kappa_m <= 0")]
    NoExceptionalPoint,

    /// A_- <= A_+ : no steady cooling limit exists.
    #[error("net heating: a_minus = {a_minus:.6e} <= a_plus = {a_plus:.6e}")]
    NetHeating { a_plus: f64, a_minus: f64 },

    /// Gamma + gamma_b <= 0: Eq.-(22) balance has no stable solution.
    #[error("unstable cooling: gamma_net + gamma_b = {0:.6e} <= 0")]
    UnstableCooling(f64),

    /// Detailed-balance ratio >= 1: the Fock distribution is non-normalizable.
    #[error("non-normalizable steady state: detailed-balance ratio r = {0:.6e} >= 1")]
    NonNormalizable(f64),

    /// Truncated Fock sum left too much tail mass.
    #[error("rate-equation truncation too small: tail mass {tail:.3e}, suggest n_trunc >= {suggested}")]
    Truncation { tail: f64, suggested: usize },

    /// Drift matrix has an eigenvalue with non-negative real part.
    #[error("unstable drift: max Re eigenvalue = {margin:.6e} rad/s; no steady state")]
    UnstableDrift { margin: f64 },

    /// Covariance propagation exceeded the divergence bound.
    #[error("covariance divergence at t = {t:.6e} s (unstable drift, margin = {margin:.6e} rad/s)")]
    Divergence { t: f64, margin: f64 },

    /// Configuration file / key-value parse failure.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
