//! Report assembly: provenance headers, CSV/JSON envelopes, and the
//! human-readable state rendering for `simulate`.
//!
//! Report content is a pure function of the run configuration, so files are
//! byte-identical across runs: no timestamps, fixed float formatting, and
//! struct-order-preserving JSON for the pinned report shapes.

use std::fmt::Write as _;

use qcentipede::equilibrium::{format_sig12, SweepRow, SWEEP_CSV_HEADER};
use qcentipede::game::PayoffSchedule;
use qcentipede::protocol::OutcomeProbabilities;
use qcentipede::sim::{bitstring, StateVector};
use qcentipede::Complex64;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "qcentipede";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Hex SHA-256 of the schedule's canonical JSON form.
pub fn schedule_hash(schedule: &PayoffSchedule) -> String {
    let digest = Sha256::digest(schedule.to_json_string().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// A JSON object with caller-controlled key order (serde_json's maps would
/// re-sort keys and break the documented report layouts).
pub fn json_object(pairs: &[(&str, String)]) -> String {
    let body: Vec<String> = pairs
        .iter()
        .map(|(k, v)| format!("{}:{}", serde_json::Value::from(*k), v))
        .collect();
    format!("{{{}}}", body.join(","))
}

pub fn json_str(s: &str) -> String {
    serde_json::Value::from(s).to_string()
}

/// The sweep as a CSV report with a `#` provenance header block.
pub fn sweep_csv(rows: &[SweepRow], schedule: &PayoffSchedule, shots: u64, seed: u64) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {TOOL} {VERSION}");
    let _ = writeln!(out, "# schedule_sha256: {}", schedule_hash(schedule));
    let _ = writeln!(out, "# shots: {shots}");
    let _ = writeln!(out, "# seed: {seed}");
    let _ = writeln!(out, "{SWEEP_CSV_HEADER}");
    for row in rows {
        let _ = writeln!(out, "{}", row.csv_record());
    }
    out
}

/// Meta block shared by the JSON envelopes.
pub fn meta(entries: &[(&str, String)]) -> String {
    let mut pairs: Vec<(&str, String)> = vec![
        ("tool", json_str(TOOL)),
        ("version", json_str(VERSION)),
    ];
    pairs.extend_from_slice(entries);
    json_object(&pairs)
}

/// `{"meta": …, "<key>": <body>}` with body serialized upstream.
pub fn envelope(meta_json: &str, key: &str, body_json: &str) -> String {
    let mut out = json_object(&[("meta", meta_json.to_string()), (key, body_json.to_string())]);
    out.push('\n');
    out
}

fn is_close(z: Complex64, re: f64, im: f64) -> bool {
    (z - Complex64::new(re, im)).norm() < 1e-9
}

/// Compact complex coefficient: `1`, `-1`, `i` and `-i` render bare,
/// pure-real and pure-imaginary values drop the silent part, and true mixes
/// render as `(re+imi)`, all at 12 significant digits.
pub fn format_coefficient(z: Complex64) -> String {
    if is_close(z, 1.0, 0.0) {
        String::new()
    } else if is_close(z, -1.0, 0.0) {
        "-".to_string()
    } else if is_close(z, 0.0, 1.0) {
        "i".to_string()
    } else if is_close(z, 0.0, -1.0) {
        "-i".to_string()
    } else if z.im.abs() < 1e-12 {
        format_sig12(z.re)
    } else if z.re.abs() < 1e-12 {
        format!("{}i", format_sig12(z.im))
    } else {
        let sign = if z.im.is_sign_negative() { "-" } else { "+" };
        format!("({}{}{}i)", format_sig12(z.re), sign, format_sig12(z.im.abs()))
    }
}

/// Ket-sum rendering of the nonzero amplitudes, e.g. `i|000⟩`.
pub fn format_ket(state: &StateVector) -> String {
    let n = state.n_qubits();
    let terms: Vec<String> = state
        .amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, amp)| amp.norm() > 1e-12)
        .map(|(i, amp)| format!("{}|{}⟩", format_coefficient(*amp), bitstring(i, n)))
        .collect();
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Outcome labels in report order: full cooperation first, then per round.
pub fn outcome_labels(n_rounds: usize) -> Vec<String> {
    let mut labels = vec!["FullCooperation".to_string()];
    labels.extend((1..=n_rounds).map(|r| format!("DefectAt({r})")));
    labels
}

pub fn outcome_values(dist: &OutcomeProbabilities) -> Vec<f64> {
    let mut values = vec![dist.p_full_cooperation];
    values.extend(dist.p_defect_round.iter().copied());
    values
}
