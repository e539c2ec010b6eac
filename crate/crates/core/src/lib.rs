//! A statevector laboratory for quantized multi-round centipede games.
//!
//! The library models each round of a two-player centipede game as one qubit
//! (|0⟩ = cooperate, |1⟩ = defect). A game is played by entangling the round
//! register with the GHZ-type entangler `J = (I + i·X⊗…⊗X)/√2`, rotating each
//! round qubit with a strategy unitary `U(θ, φ)`, disentangling with `J†`, and
//! measuring in the computational basis. The first measured 1-bit decides the
//! round at which the game ends; payoffs follow from a configurable schedule.
//!
//! Modules:
//!
//! - [`sim`] — dense statevector simulator: gates, Pauli-string exponentials,
//!   seeded measurement sampling, phase-aware state comparison.
//! - [`protocol`] — the entangle–rotate–disentangle pipeline, with both a
//!   matrix backend and an exact gate-circuit decomposition of the entangler,
//!   plus closed-form amplitudes for the 3-round game.
//! - [`game`] — centipede payoff schedules, outcome classification, exact and
//!   Monte Carlo expected payoffs, and the classical backward-induction
//!   baseline.
//! - [`equilibrium`] — strategy-grid sweeps, Nash certification by
//!   best-response search, and analytic-vs-finite-difference gradient checks.
//! - [`conjecture`] — multi-round probes: last-round defection collapse and
//!   corner degeneracy across round counts.

pub mod conjecture;
pub mod equilibrium;
pub mod game;
pub mod protocol;
pub mod sim;

pub use num_complex::Complex64;

pub use game::{Outcome, PayoffPair, PayoffSchedule, Player};
pub use protocol::{EntanglerBackend, StrategyProfile};
pub use sim::StateVector;

/// Errors reported by fallible operations across the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Requested register size is outside the supported 1..=24 range.
    #[error("qubit count must be in 1..={max}, got {got}", max = sim::MAX_QUBITS)]
    InvalidQubitCount { got: usize },

    /// A qubit argument does not name a qubit of the register (qubits are
    /// numbered 1..=n, one per round).
    #[error("qubit {qubit} out of range for a {n_qubits}-qubit register")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },

    /// Control and target of a two-qubit gate must differ.
    #[error("control and target qubits must differ, both are {0}")]
    ControlEqualsTarget(usize),

    /// Sampling requires at least one shot.
    #[error("shots must be at least 1")]
    ZeroShots,

    /// An amplitude vector does not have length 2^n.
    #[error("amplitude vector has length {got}, expected {expected}")]
    BadAmplitudeLength { expected: usize, got: usize },

    /// A bitstring is malformed or has the wrong length.
    #[error("invalid bitstring `{bits}`: expected {expected} characters of 0/1")]
    InvalidBitstring { bits: String, expected: usize },

    /// Two n-round objects disagree on n.
    #[error("round count mismatch: expected {expected}, got {got}")]
    RoundCountMismatch { expected: usize, got: usize },

    /// A strategy angle lies outside the [0, π] strategy cube.
    #[error("strategy angle {0} outside [0, \u{3c0}]")]
    AngleOutOfRange(f64),

    /// An angle token could not be parsed.
    #[error("invalid angle token `{0}`")]
    BadAngleToken(String),

    /// A payoff schedule violates its structural invariants.
    #[error("invalid payoff schedule: {0}")]
    InvalidSchedule(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
