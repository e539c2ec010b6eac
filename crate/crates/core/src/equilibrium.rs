//! Strategy-space exploration: the 18-point grid sweep, Nash certification by
//! exhaustive best-response search, and analytic-vs-numerical gradient checks
//! for the 3-round game's payoff surfaces.

use serde::Serialize;

use crate::game::{expected_payoffs_exact, expected_payoffs_mc, PayoffPair, PayoffSchedule, Player};
use crate::protocol::StrategyProfile;
use crate::{Error, Result};

const PI: f64 = std::f64::consts::PI;
const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

/// One sweep entry: a grid strategy with its exact and sampled payoffs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub thetas: [f64; 3],
    pub exact_payoffs: PayoffPair,
    pub mc_payoffs: PayoffPair,
    pub shots: u64,
    pub seed: u64,
}

/// Column order of the sweep CSV.
pub const SWEEP_CSV_HEADER: &str =
    "theta1,theta2,theta3,exact_p1,exact_p2,mc_p1,mc_p2,shots,seed";

impl SweepRow {
    /// Serialize as one CSV record, angles and payoffs at 12 significant
    /// digits.
    pub fn csv_record(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            format_sig12(self.thetas[0]),
            format_sig12(self.thetas[1]),
            format_sig12(self.thetas[2]),
            format_sig12(self.exact_payoffs.player1),
            format_sig12(self.exact_payoffs.player2),
            format_sig12(self.mc_payoffs.player1),
            format_sig12(self.mc_payoffs.player2),
            self.shots,
            self.seed,
        )
    }
}

/// The 18 grid strategies in sweep order: θ1 varies fastest over
/// {0, π, π/2}, then θ2 over the same set, then θ3 over {0, π}.
pub fn table_grid() -> Vec<[f64; 3]> {
    let first = [0.0, PI, FRAC_PI_2];
    let last = [0.0, PI];
    let mut rows = Vec::with_capacity(18);
    for &t3 in &last {
        for &t2 in &first {
            for &t1 in &first {
                rows.push([t1, t2, t3]);
            }
        }
    }
    rows
}

/// Sweep the 18-point grid under the default schedule, pairing exact payoffs
/// with a Monte Carlo estimate per row. Row r samples with seed `seed + r` so
/// rows stay independent and the whole sweep reproduces bit-for-bit.
pub fn sweep_table(shots: u64, seed: u64) -> Vec<SweepRow> {
    assert!(shots >= 1, "sweep needs at least one shot");
    let schedule = PayoffSchedule::default();
    table_grid()
        .into_iter()
        .enumerate()
        .map(|(i, thetas)| {
            let profile =
                StrategyProfile::from_thetas(thetas.to_vec()).expect("grid angles in range");
            let row_seed = seed.wrapping_add(i as u64);
            let exact = expected_payoffs_exact(&profile, &schedule)
                .expect("grid profiles match the default schedule");
            let mc = expected_payoffs_mc(&profile, &schedule, shots, row_seed)
                .expect("shots validated above");
            SweepRow {
                thetas,
                exact_payoffs: exact,
                mc_payoffs: mc,
                shots,
                seed: row_seed,
            }
        })
        .collect()
}

/// Outcome of a best-response search around one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquilibriumReport {
    pub profile: StrategyProfile,
    pub is_nash: bool,
    /// Best payoff improvement either player can reach by unilateral
    /// deviation (player 1, player 2). Non-positive means no improvement was
    /// found.
    pub best_deviation_gain: (f64, f64),
    pub deviation_grid_size: usize,
}

/// Largest payoff gain `player` can obtain by redeciding all of their rounds
/// jointly, with candidate θ values per owned round given explicitly. Returns
/// the gain and the best deviation's angles (one per owned round).
pub fn best_deviation(
    profile: &StrategyProfile,
    schedule: &PayoffSchedule,
    player: Player,
    candidates_per_owned_round: &[Vec<f64>],
) -> (f64, Vec<f64>) {
    let owned = player.rounds(profile.n_rounds());
    assert_eq!(
        owned.len(),
        candidates_per_owned_round.len(),
        "one candidate set per owned round"
    );
    assert!(candidates_per_owned_round.iter().all(|c| !c.is_empty()));

    let base = expected_payoffs_exact(profile, schedule)
        .expect("profile and schedule agree on rounds")
        .for_player(player);

    let mut best_gain = f64::NEG_INFINITY;
    let mut best_angles = Vec::new();
    let mut idx = vec![0usize; owned.len()];
    loop {
        let mut thetas = profile.thetas().to_vec();
        for (slot, &round) in owned.iter().enumerate() {
            thetas[round - 1] = candidates_per_owned_round[slot][idx[slot]];
        }
        let deviated = StrategyProfile::new(thetas, profile.phis().to_vec())
            .expect("candidate angles stay in the strategy cube");
        let value = expected_payoffs_exact(&deviated, schedule)
            .expect("deviation preserves the round count")
            .for_player(player);
        if value - base > best_gain {
            best_gain = value - base;
            best_angles = owned
                .iter()
                .enumerate()
                .map(|(slot, _)| candidates_per_owned_round[slot][idx[slot]])
                .collect();
        }

        let mut k = 0;
        loop {
            idx[k] += 1;
            if idx[k] < candidates_per_owned_round[k].len() {
                break;
            }
            idx[k] = 0;
            k += 1;
            if k == owned.len() {
                return (best_gain, best_angles);
            }
        }
    }
}

/// `deviation_grid` evenly spaced points over [0, π], endpoints included.
pub fn deviation_grid(points: usize) -> Vec<f64> {
    assert!(points >= 2, "a deviation grid needs at least 2 points");
    (0..points)
        .map(|i| PI * i as f64 / (points - 1) as f64)
        .collect()
}

/// Certify (or reject) a profile as a Nash equilibrium by exhaustive
/// best-response search: each player redecides all of their rounds jointly
/// over a uniform `deviation_grid`-point grid per angle, and the profile is
/// Nash iff neither player improves by more than `tol`.
pub fn certify_nash(
    profile: &StrategyProfile,
    schedule: &PayoffSchedule,
    grid_points: usize,
    tol: f64,
) -> EquilibriumReport {
    let candidates = deviation_grid(grid_points);
    let gain_of = |player: Player| {
        let sets = vec![candidates.clone(); player.rounds(profile.n_rounds()).len()];
        best_deviation(profile, schedule, player, &sets).0
    };
    let gains = (gain_of(Player::One), gain_of(Player::Two));
    EquilibriumReport {
        profile: profile.clone(),
        is_nash: gains.0 <= tol && gains.1 <= tol,
        best_deviation_gain: gains,
        deviation_grid_size: grid_points,
    }
}

/// The six payoff partial derivatives of the 3-round game at φ = 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientVector {
    pub d1_dtheta1: f64,
    pub d1_dtheta2: f64,
    pub d1_dtheta3: f64,
    pub d2_dtheta1: f64,
    pub d2_dtheta2: f64,
    pub d2_dtheta3: f64,
}

impl GradientVector {
    pub fn as_array(&self) -> [f64; 6] {
        [
            self.d1_dtheta1,
            self.d1_dtheta2,
            self.d1_dtheta3,
            self.d2_dtheta1,
            self.d2_dtheta2,
            self.d2_dtheta3,
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.as_array().iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn max_abs_diff(&self, other: &GradientVector) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Closed-form gradient of both players' expected payoffs under the default
/// schedule. Player 2's payoff is θ1-independent, so that channel is
/// identically zero.
pub fn payoff_gradient_analytic(profile: &StrategyProfile) -> GradientVector {
    assert_eq!(profile.n_rounds(), 3, "gradients are for the 3-round game");
    let [t1, t2, t3] = [profile.theta(1), profile.theta(2), profile.theta(3)];
    let (c1, s1) = ((t1 / 2.0).cos(), (t1 / 2.0).sin());
    let (c2, s2) = ((t2 / 2.0).cos(), (t2 / 2.0).sin());
    let (c3, s3) = ((t3 / 2.0).cos(), (t3 / 2.0).sin());
    GradientVector {
        d1_dtheta1: 2.0 * c1 * s1 * (-(c2 * c2) * (c3 * c3) + (s2 * s2) * (s3 * s3)),
        d1_dtheta2: -c2 * s2 * t1.cos(),
        d1_dtheta3: c3 * s3
            * (c2 * c2 - s2 * s2 - 2.0 * (c1 * c1) * (c2 * c2) + 2.0 * (s1 * s1) * (s2 * s2)),
        d2_dtheta1: 0.0,
        d2_dtheta2: -2.0 * c2 * s2 * t3.cos(),
        d2_dtheta3: -2.0 * c3 * s3 * t2.cos(),
    }
}

/// Central-difference gradient of the exact payoffs with step `h`
/// (0 < h ≤ 1e-3), under the default schedule.
pub fn payoff_gradient_fd(profile: &StrategyProfile, h: f64) -> GradientVector {
    assert_eq!(profile.n_rounds(), 3, "gradients are for the 3-round game");
    assert!(h > 0.0 && h <= 1e-3, "step must be in (0, 1e-3]");
    let schedule = PayoffSchedule::default();
    let mut partials = [[0.0; 3]; 2];
    for k in 0..3 {
        let mut plus = profile.thetas().to_vec();
        let mut minus = profile.thetas().to_vec();
        plus[k] += h;
        minus[k] -= h;
        let up = crate::game::expected_payoffs_exact_at(&plus, &schedule);
        let down = crate::game::expected_payoffs_exact_at(&minus, &schedule);
        partials[0][k] = (up.player1 - down.player1) / (2.0 * h);
        partials[1][k] = (up.player2 - down.player2) / (2.0 * h);
    }
    GradientVector {
        d1_dtheta1: partials[0][0],
        d1_dtheta2: partials[0][1],
        d1_dtheta3: partials[0][2],
        d2_dtheta1: partials[1][0],
        d2_dtheta2: partials[1][1],
        d2_dtheta3: partials[1][2],
    }
}

/// Worst-case disagreement between the analytic and finite-difference
/// gradients over a batch of random profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GradientCheckSummary {
    pub samples: u64,
    pub h: f64,
    pub max_abs_difference: f64,
    /// Largest finite-difference response of player 2's payoff to θ1, which
    /// the closed form says is exactly zero.
    pub max_abs_d2_dtheta1: f64,
}

/// Compare [`payoff_gradient_analytic`] with [`payoff_gradient_fd`] at
/// `samples` seeded uniform-random strategy triples.
pub fn gradient_check(samples: u64, h: f64, seed: u64) -> GradientCheckSummary {
    use rand::SeedableRng;
    assert!(samples >= 1, "need at least one sample");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs_difference = 0.0f64;
    let mut max_abs_d2_dtheta1 = 0.0f64;
    for _ in 0..samples {
        let profile = StrategyProfile::sample_uniform(3, &mut rng);
        let analytic = payoff_gradient_analytic(&profile);
        let fd = payoff_gradient_fd(&profile, h);
        max_abs_difference = max_abs_difference.max(analytic.max_abs_diff(&fd));
        max_abs_d2_dtheta1 = max_abs_d2_dtheta1.max(fd.d2_dtheta1.abs());
    }
    GradientCheckSummary {
        samples,
        h,
        max_abs_difference,
        max_abs_d2_dtheta1,
    }
}

/// Format with 12 significant digits (the CSV angle contract). Magnitudes
/// outside [1e-4, 1e12) fall back to scientific notation so round-off noise
/// near zero stays readable.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let exponent = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exponent) {
        let decimals = (11 - exponent).max(0) as usize;
        format!("{x:.decimals$}")
    } else {
        format!("{x:.11e}")
    }
}

/// Parse an angle given as decimal radians or as a symbolic multiple of π
/// (`0`, `pi`, `pi/2`, `pi/4`, `2pi/3`, …).
pub fn parse_angle(token: &str) -> Result<f64> {
    let bad = || Error::BadAngleToken(token.to_string());
    let t = token.trim().to_ascii_lowercase();
    match t.find("pi") {
        None => t.parse::<f64>().map_err(|_| bad()),
        Some(at) => {
            let (pre, post) = (&t[..at], &t[at + 2..]);
            let numerator = match pre {
                "" => 1.0,
                "-" => -1.0,
                p => p.parse::<f64>().map_err(|_| bad())?,
            };
            let denominator = match post.strip_prefix('/') {
                None if post.is_empty() => 1.0,
                None => return Err(bad()),
                Some(d) => {
                    let d: f64 = d.parse().map_err(|_| bad())?;
                    if d == 0.0 {
                        return Err(bad());
                    }
                    d
                }
            };
            Ok(numerator * PI / denominator)
        }
    }
}
