//! Centipede-game semantics on top of the protocol layer.
//!
//! A measured bitstring ends the game at its first 1-bit; payoffs come from a
//! [`PayoffSchedule`] holding one pair per defection round plus the terminal
//! cooperation pair. Expected payoffs are available exactly (from the final
//! state's outcome distribution) and by seeded Monte Carlo sampling. The
//! classical backward-induction baseline lives here too.

use serde::{Deserialize, Serialize};

use crate::protocol::{run_protocol, EntanglerBackend, OutcomeProbabilities, StrategyProfile};
use crate::sim::StateVector;
use crate::{Error, Result};

/// The two players. Player 1 moves on odd rounds, player 2 on even rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    One,
    Two,
}

impl Player {
    /// Who decides at the given 1-based round.
    pub fn mover_of_round(round: usize) -> Player {
        if round % 2 == 1 {
            Player::One
        } else {
            Player::Two
        }
    }

    /// The rounds a player owns in an n-round game.
    pub fn rounds(self, n_rounds: usize) -> Vec<usize> {
        (1..=n_rounds)
            .filter(|&r| Player::mover_of_round(r) == self)
            .collect()
    }
}

/// A payoff for each player, in schedule units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PayoffPair {
    pub player1: f64,
    pub player2: f64,
}

impl PayoffPair {
    pub fn new(player1: f64, player2: f64) -> Self {
        Self { player1, player2 }
    }

    pub fn for_player(&self, player: Player) -> f64 {
        match player {
            Player::One => self.player1,
            Player::Two => self.player2,
        }
    }
}

/// How a single play of the game ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    /// The game terminated by defection at the given 1-based round; any bits
    /// after that round are ignored.
    DefectAt(usize),
    /// Nobody defected.
    FullCooperation,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::DefectAt(r) => write!(f, "DefectAt({r})"),
            Outcome::FullCooperation => write!(f, "FullCooperation"),
        }
    }
}

/// Per-round defection payoffs plus the terminal cooperation payoff.
///
/// The JSON form is `{"rounds": 3, "defect": [[1,0],[0,2],[3,1]],
/// "cooperate": [2,2]}`; the default value is exactly that 3-round schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct PayoffSchedule {
    n_rounds: usize,
    defect_payoff: Vec<PayoffPair>,
    cooperate_payoff: PayoffPair,
}

#[derive(Serialize, Deserialize)]
struct ScheduleJson {
    rounds: usize,
    defect: Vec<[f64; 2]>,
    cooperate: [f64; 2],
}

impl PayoffSchedule {
    pub fn new(
        defect_payoff: Vec<PayoffPair>,
        cooperate_payoff: PayoffPair,
    ) -> Result<Self> {
        if defect_payoff.len() < 2 {
            return Err(Error::InvalidSchedule(format!(
                "need at least 2 rounds, got {}",
                defect_payoff.len()
            )));
        }
        let finite = |p: &PayoffPair| p.player1.is_finite() && p.player2.is_finite();
        if !defect_payoff.iter().all(finite) || !finite(&cooperate_payoff) {
            return Err(Error::InvalidSchedule("payoffs must be finite".into()));
        }
        Ok(Self {
            n_rounds: defect_payoff.len(),
            defect_payoff,
            cooperate_payoff,
        })
    }

    pub fn n_rounds(&self) -> usize {
        self.n_rounds
    }

    /// Payoffs if the game ends by defection at the 1-based round.
    pub fn defect_payoff(&self, round: usize) -> PayoffPair {
        self.defect_payoff[round - 1]
    }

    pub fn cooperate_payoff(&self) -> PayoffPair {
        self.cooperate_payoff
    }

    pub fn from_json_str(json: &str) -> Result<Self> {
        let raw: ScheduleJson = serde_json::from_str(json)
            .map_err(|e| Error::InvalidSchedule(e.to_string()))?;
        if raw.defect.len() != raw.rounds {
            return Err(Error::InvalidSchedule(format!(
                "`defect` has {} entries but `rounds` is {}",
                raw.defect.len(),
                raw.rounds
            )));
        }
        Self::new(
            raw.defect.iter().map(|p| PayoffPair::new(p[0], p[1])).collect(),
            PayoffPair::new(raw.cooperate[0], raw.cooperate[1]),
        )
    }

    pub fn to_json_string(&self) -> String {
        let raw = ScheduleJson {
            rounds: self.n_rounds,
            defect: self
                .defect_payoff
                .iter()
                .map(|p| [p.player1, p.player2])
                .collect(),
            cooperate: [self.cooperate_payoff.player1, self.cooperate_payoff.player2],
        };
        serde_json::to_string(&raw).expect("schedule serializes")
    }
}

impl Default for PayoffSchedule {
    /// The 3-round schedule: defect at round 1 → (1, 0), round 2 → (0, 2),
    /// round 3 → (3, 1); everyone cooperates → (2, 2).
    fn default() -> Self {
        Self::new(
            vec![
                PayoffPair::new(1.0, 0.0),
                PayoffPair::new(0.0, 2.0),
                PayoffPair::new(3.0, 1.0),
            ],
            PayoffPair::new(2.0, 2.0),
        )
        .expect("built-in schedule is valid")
    }
}

/// Map a measured bitstring to the round at which the game ended.
pub fn classify(bits: &str, n_rounds: usize) -> Result<Outcome> {
    let index = crate::sim::bitstring_index(bits, n_rounds)?;
    Ok(classify_index(index, n_rounds))
}

/// Index-level classifier: the first 1-bit (counting from round 1, the most
/// significant bit) names the defection round; zero means full cooperation.
pub fn classify_index(index: usize, n_rounds: usize) -> Outcome {
    if index == 0 {
        Outcome::FullCooperation
    } else {
        Outcome::DefectAt(n_rounds - index.ilog2() as usize)
    }
}

/// Payoffs for a classified outcome under a schedule.
pub fn payoff(outcome: Outcome, schedule: &PayoffSchedule) -> PayoffPair {
    match outcome {
        Outcome::FullCooperation => schedule.cooperate_payoff(),
        Outcome::DefectAt(round) => {
            assert!(
                round >= 1 && round <= schedule.n_rounds(),
                "outcome round {round} outside schedule"
            );
            schedule.defect_payoff(round)
        }
    }
}

/// Group a state's measurement distribution by outcome.
pub fn outcome_distribution(state: &StateVector) -> OutcomeProbabilities {
    let n = state.n_qubits();
    let mut p_defect_round = vec![0.0; n];
    let mut p_full_cooperation = 0.0;
    for (index, prob) in state.probabilities().into_iter().enumerate() {
        match classify_index(index, n) {
            Outcome::FullCooperation => p_full_cooperation += prob,
            Outcome::DefectAt(r) => p_defect_round[r - 1] += prob,
        }
    }
    OutcomeProbabilities {
        p_defect_round,
        p_full_cooperation,
    }
}

fn payoffs_from_distribution(
    dist: &OutcomeProbabilities,
    schedule: &PayoffSchedule,
) -> PayoffPair {
    let mut p1 = dist.p_full_cooperation * schedule.cooperate_payoff().player1;
    let mut p2 = dist.p_full_cooperation * schedule.cooperate_payoff().player2;
    for (r, &prob) in dist.p_defect_round.iter().enumerate() {
        let pay = schedule.defect_payoff(r + 1);
        p1 += prob * pay.player1;
        p2 += prob * pay.player2;
    }
    PayoffPair::new(p1, p2)
}

/// Exact expected payoffs: run the protocol, classify the outcome
/// distribution, and weight by the schedule.
pub fn expected_payoffs_exact(
    profile: &StrategyProfile,
    schedule: &PayoffSchedule,
) -> Result<PayoffPair> {
    if profile.n_rounds() != schedule.n_rounds() {
        return Err(Error::RoundCountMismatch {
            expected: schedule.n_rounds(),
            got: profile.n_rounds(),
        });
    }
    let state = run_protocol(profile, EntanglerBackend::Matrix);
    Ok(payoffs_from_distribution(&outcome_distribution(&state), schedule))
}

/// Exact payoffs at raw θ values (φ = 0) without strategy-cube validation;
/// finite-difference probes need evaluations just past the cube walls.
pub(crate) fn expected_payoffs_exact_at(thetas: &[f64], schedule: &PayoffSchedule) -> PayoffPair {
    let profile = StrategyProfile::from_thetas_unchecked(thetas.to_vec());
    let state = run_protocol(&profile, EntanglerBackend::Matrix);
    payoffs_from_distribution(&outcome_distribution(&state), schedule)
}

/// Average classified payoff over `shots` sampled bitstrings. Deterministic
/// for a given `(profile, shots, seed)` and converges to
/// [`expected_payoffs_exact`] as shots grow.
pub fn expected_payoffs_mc(
    profile: &StrategyProfile,
    schedule: &PayoffSchedule,
    shots: u64,
    seed: u64,
) -> Result<PayoffPair> {
    if profile.n_rounds() != schedule.n_rounds() {
        return Err(Error::RoundCountMismatch {
            expected: schedule.n_rounds(),
            got: profile.n_rounds(),
        });
    }
    let state = run_protocol(profile, EntanglerBackend::Matrix);
    let counts = state.sample(shots, seed)?;
    let n = profile.n_rounds();
    let mut p1 = 0.0;
    let mut p2 = 0.0;
    for (bits, count) in counts.iter() {
        let pay = payoff(classify(bits, n)?, schedule);
        p1 += count as f64 * pay.player1;
        p2 += count as f64 * pay.player2;
    }
    Ok(PayoffPair::new(p1 / shots as f64, p2 / shots as f64))
}

/// Solve the classical game by backward induction.
///
/// Walking from the last round to the first, the mover defects iff their
/// defection payoff strictly exceeds their continuation value (ties
/// cooperate). Returns the subgame-perfect path's first defection round
/// (`None` when play reaches the end) and its payoffs.
pub fn backward_induction(schedule: &PayoffSchedule) -> (Option<usize>, PayoffPair) {
    let mut value = schedule.cooperate_payoff();
    let mut first_defection = None;
    for round in (1..=schedule.n_rounds()).rev() {
        let mover = Player::mover_of_round(round);
        let defect = schedule.defect_payoff(round);
        if defect.for_player(mover) > value.for_player(mover) {
            value = defect;
            first_defection = Some(round);
        }
    }
    (first_defection, value)
}
