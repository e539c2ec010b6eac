//! The entangle–rotate–disentangle pipeline for an n-round game.
//!
//! The canonical entangler is the operator `J = (I + i·X⊗…⊗X)/√2`, i.e. the
//! Pauli-string exponential `exp(i·(π/4)·X^⊗n)`. It maps |0…0⟩ to the
//! GHZ-type state (|0…0⟩ + i|1…1⟩)/√2. A protocol run applies `J`, then one
//! strategy unitary per round qubit, then the exact adjoint `J†`, and returns
//! the final state before measurement.
//!
//! Two interchangeable entangler backends are provided: direct operator
//! application ([`entangler_matrix_apply`]) and an exact gate-level
//! decomposition ([`entangler_gate_circuit`]). For the 3-round game the final
//! amplitudes are also available in closed form, which the simulation must
//! reproduce element-wise.

use num_complex::Complex64;
use rand::Rng;

use crate::sim::{SingleQubitUnitary, StateVector};
use crate::{Error, Result};

/// Per-round rotation angles. θ_k ∈ [0, π] is round k's cooperate/defect mix
/// (0 = pure cooperation, π = pure defection); φ_k defaults to 0.
///
/// Odd rounds belong to player 1, even rounds to player 2.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct StrategyProfile {
    thetas: Vec<f64>,
    phis: Vec<f64>,
}

impl StrategyProfile {
    /// Profile with the given θ per round and φ = 0 everywhere.
    pub fn from_thetas(thetas: Vec<f64>) -> Result<Self> {
        let phis = vec![0.0; thetas.len()];
        Self::new(thetas, phis)
    }

    pub fn new(thetas: Vec<f64>, phis: Vec<f64>) -> Result<Self> {
        if thetas.len() != phis.len() {
            return Err(Error::RoundCountMismatch {
                expected: thetas.len(),
                got: phis.len(),
            });
        }
        for &t in &thetas {
            if !(0.0..=std::f64::consts::PI).contains(&t) {
                return Err(Error::AngleOutOfRange(t));
            }
        }
        Ok(Self { thetas, phis })
    }

    /// Internal constructor for evaluations outside the strategy cube
    /// (finite-difference probes step past the cube walls).
    pub(crate) fn from_thetas_unchecked(thetas: Vec<f64>) -> Self {
        let phis = vec![0.0; thetas.len()];
        Self { thetas, phis }
    }

    /// All-cooperate corner (0, …, 0).
    pub fn all_zeros(n_rounds: usize) -> Self {
        Self::from_thetas(vec![0.0; n_rounds]).expect("zero angles are in range")
    }

    /// All-defect corner (π, …, π).
    pub fn all_pi(n_rounds: usize) -> Self {
        Self::from_thetas(vec![std::f64::consts::PI; n_rounds]).expect("\u{3c0} is in range")
    }

    /// Uniform draw from the strategy cube [0, π]^n.
    pub fn sample_uniform<R: Rng + ?Sized>(n_rounds: usize, rng: &mut R) -> Self {
        let thetas = (0..n_rounds)
            .map(|_| rng.random::<f64>() * std::f64::consts::PI)
            .collect();
        Self::from_thetas_unchecked(thetas)
    }

    pub fn n_rounds(&self) -> usize {
        self.thetas.len()
    }

    pub fn thetas(&self) -> &[f64] {
        &self.thetas
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn theta(&self, round: usize) -> f64 {
        self.thetas[round - 1]
    }

    /// Copy of the profile with round `round`'s θ replaced.
    pub fn with_theta(&self, round: usize, theta: f64) -> Self {
        let mut out = self.clone();
        out.thetas[round - 1] = theta;
        out
    }
}

/// The cooperate/defect weights of one round: α = cos(θ/2), β = sin(θ/2).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlphaBeta {
    pub alpha: f64,
    pub beta: f64,
}

impl AlphaBeta {
    pub fn from_theta(theta: f64) -> Self {
        Self {
            alpha: (theta / 2.0).cos(),
            beta: (theta / 2.0).sin(),
        }
    }
}

/// Probability of the game ending at each round, plus full cooperation.
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeProbabilities {
    /// `p_defect_round[r-1]` is the probability the game ends by defection at
    /// round r (first measured 1-bit at position r).
    pub p_defect_round: Vec<f64>,
    /// Probability of the all-zeros outcome.
    pub p_full_cooperation: f64,
}

impl OutcomeProbabilities {
    pub fn n_rounds(&self) -> usize {
        self.p_defect_round.len()
    }

    pub fn total(&self) -> f64 {
        self.p_full_cooperation + self.p_defect_round.iter().sum::<f64>()
    }
}

/// The strategy rotation
/// `U(θ, φ) = [[e^{iφ}·cos(θ/2), sin(θ/2)], [−sin(θ/2), e^{−iφ}·cos(θ/2)]]`.
pub fn strategy_unitary(theta: f64, phi: f64) -> SingleQubitUnitary {
    let ab = AlphaBeta::from_theta(theta);
    SingleQubitUnitary::new([
        [
            Complex64::from_polar(ab.alpha, phi),
            Complex64::new(ab.beta, 0.0),
        ],
        [
            Complex64::new(-ab.beta, 0.0),
            Complex64::from_polar(ab.alpha, -phi),
        ],
    ])
}

/// Which entangler implementation a protocol run uses. The disentangler is
/// always the exact adjoint of the selected entangler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntanglerBackend {
    /// Direct complement-pair application of (I + i·X^⊗n)/√2.
    Matrix,
    /// The gate decomposition from [`entangler_gate_circuit`].
    Circuit,
}

/// Apply `J = (I + i·X^⊗n)/√2` in place.
pub fn entangler_matrix_apply(state: &mut StateVector) {
    assert!(state.n_qubits() >= 2, "entangler needs at least 2 qubits");
    state.apply_pauli_x_string_exp(std::f64::consts::FRAC_PI_2);
}

/// Apply the exact adjoint `J† = (I − i·X^⊗n)/√2` in place.
pub fn disentangler_matrix_apply(state: &mut StateVector) {
    assert!(state.n_qubits() >= 2, "disentangler needs at least 2 qubits");
    state.apply_pauli_x_string_exp(-std::f64::consts::FRAC_PI_2);
}

/// One primitive gate of the entangler decomposition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Hadamard(usize),
    Cnot { control: usize, target: usize },
    RotationZ { qubit: usize, angle: f64 },
}

impl Gate {
    pub fn apply(&self, state: &mut StateVector) -> Result<()> {
        match *self {
            Gate::Hadamard(q) => state.apply_hadamard(q),
            Gate::Cnot { control, target } => state.apply_cnot(control, target),
            Gate::RotationZ { qubit, angle } => {
                state.apply_single_qubit(qubit, &SingleQubitUnitary::rotation_z(angle))
            }
        }
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::RotationZ { qubit, angle } => Gate::RotationZ { qubit, angle: -angle },
            g => g,
        }
    }
}

/// Apply a gate sequence left to right.
pub fn apply_gates(state: &mut StateVector, gates: &[Gate]) -> Result<()> {
    for g in gates {
        g.apply(state)?;
    }
    Ok(())
}

/// The adjoint of a gate sequence: inverses in reverse order.
pub fn inverted_gates(gates: &[Gate]) -> Vec<Gate> {
    gates.iter().rev().map(Gate::inverse).collect()
}

/// Exact gate decomposition of `(I + i·X^⊗n)/√2`:
/// Hadamards on every qubit, a CNOT parity chain 1→2→…→n, `Rz(−π/2)` on
/// qubit n, the chain undone, and Hadamards again.
///
/// Conjugating by Hadamards turns the X-string into a Z-string, the chain
/// collects the register parity onto qubit n, and the Z rotation applies
/// `e^{±iπ/4}` by parity. No global phase is left over, but callers should
/// only rely on equality up to one.
pub fn entangler_gate_circuit(n_qubits: usize) -> Vec<Gate> {
    assert!(n_qubits >= 2, "entangler needs at least 2 qubits");
    let mut gates = Vec::with_capacity(4 * n_qubits);
    for q in 1..=n_qubits {
        gates.push(Gate::Hadamard(q));
    }
    for q in 1..n_qubits {
        gates.push(Gate::Cnot { control: q, target: q + 1 });
    }
    gates.push(Gate::RotationZ {
        qubit: n_qubits,
        angle: -std::f64::consts::FRAC_PI_2,
    });
    for q in (1..n_qubits).rev() {
        gates.push(Gate::Cnot { control: q, target: q + 1 });
    }
    for q in 1..=n_qubits {
        gates.push(Gate::Hadamard(q));
    }
    gates
}

/// Run the full pipeline `J → ⊗_k U(θ_k, φ_k) → J†` from |0…0⟩ and return the
/// normalized final state before measurement.
pub fn run_protocol(profile: &StrategyProfile, backend: EntanglerBackend) -> StateVector {
    let n = profile.n_rounds();
    assert!(n >= 2, "the protocol needs at least 2 rounds");
    let mut state = StateVector::zero(n).expect("round count validated");
    match backend {
        EntanglerBackend::Matrix => entangler_matrix_apply(&mut state),
        EntanglerBackend::Circuit => {
            apply_gates(&mut state, &entangler_gate_circuit(n)).expect("gate indices in range")
        }
    }
    for round in 1..=n {
        let u = strategy_unitary(profile.thetas()[round - 1], profile.phis()[round - 1]);
        state
            .apply_single_qubit(round, &u)
            .expect("round index in range");
    }
    match backend {
        EntanglerBackend::Matrix => disentangler_matrix_apply(&mut state),
        EntanglerBackend::Circuit => {
            let adjoint = inverted_gates(&entangler_gate_circuit(n));
            apply_gates(&mut state, &adjoint).expect("gate indices in range")
        }
    }
    state
}

/// Closed-form final state of the 3-round game at φ = 0.
///
/// Writing α_k = cos(θ_k/2), β_k = sin(θ_k/2), only four amplitudes survive:
///
/// ```text
/// amp(000) = α1α2α3 + i·β1β2β3      amp(011) = α1β2β3 + i·β1α2α3
/// amp(101) = β1α2β3 + i·α1β2α3      amp(110) = β1β2α3 + i·α1α2β3
/// ```
///
/// The odd-parity amplitudes (001, 010, 100, 111) cancel identically.
pub fn closed_form_amplitudes(theta1: f64, theta2: f64, theta3: f64) -> StateVector {
    let a1 = AlphaBeta::from_theta(theta1);
    let a2 = AlphaBeta::from_theta(theta2);
    let a3 = AlphaBeta::from_theta(theta3);
    let mut amps = vec![Complex64::new(0.0, 0.0); 8];
    amps[0b000] = Complex64::new(a1.alpha * a2.alpha * a3.alpha, a1.beta * a2.beta * a3.beta);
    amps[0b011] = Complex64::new(a1.alpha * a2.beta * a3.beta, a1.beta * a2.alpha * a3.alpha);
    amps[0b101] = Complex64::new(a1.beta * a2.alpha * a3.beta, a1.alpha * a2.beta * a3.alpha);
    amps[0b110] = Complex64::new(a1.beta * a2.beta * a3.alpha, a1.alpha * a2.alpha * a3.beta);
    StateVector::from_amplitudes(3, amps).expect("eight amplitudes for three qubits")
}

/// Closed-form outcome probabilities of the 3-round game at φ = 0:
///
/// ```text
/// P_defect(1) = (β1α2β3)² + (α1β2α3)² + (β1β2α3)² + (α1α2β3)²
/// P_defect(2) = (α1β2β3)² + (β1α2α3)²
/// P_defect(3) = 0
/// P_coop      = (α1α2α3)² + (β1β2β3)²
/// ```
pub fn outcome_probabilities_closed_form(
    theta1: f64,
    theta2: f64,
    theta3: f64,
) -> OutcomeProbabilities {
    let a1 = AlphaBeta::from_theta(theta1);
    let a2 = AlphaBeta::from_theta(theta2);
    let a3 = AlphaBeta::from_theta(theta3);
    let sq = |x: f64| x * x;
    let p1 = sq(a1.beta * a2.alpha * a3.beta)
        + sq(a1.alpha * a2.beta * a3.alpha)
        + sq(a1.beta * a2.beta * a3.alpha)
        + sq(a1.alpha * a2.alpha * a3.beta);
    let p2 = sq(a1.alpha * a2.beta * a3.beta) + sq(a1.beta * a2.alpha * a3.alpha);
    let pc = sq(a1.alpha * a2.alpha * a3.alpha) + sq(a1.beta * a2.beta * a3.beta);
    OutcomeProbabilities {
        p_defect_round: vec![p1, p2, 0.0],
        p_full_cooperation: pc,
    }
}
