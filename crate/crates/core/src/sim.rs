//! Minimal dense statevector simulator.
//!
//! States hold `2^n` complex amplitudes for an n-qubit round register. Qubits
//! are numbered `1..=n`, one per game round, and qubit 1 owns the *most
//! significant* index bit: the basis index of bitstring `b1 b2 … bn` is
//! `b1·2^(n−1) + … + bn`, so formatting an index with width n in binary prints
//! the round outcomes in play order.
//!
//! Everything here is a plain value type. Unitary application mutates in
//! place; sampling is a pure function of `(state, shots, seed)` backed by a
//! ChaCha8 stream so counts reproduce across platforms.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Largest register the dense representation will allocate (2^24 amplitudes).
pub const MAX_QUBITS: usize = 24;

/// A 2×2 complex matrix acting on one qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitUnitary {
    m: [[Complex64; 2]; 2],
}

impl SingleQubitUnitary {
    pub fn new(m: [[Complex64; 2]; 2]) -> Self {
        Self { m }
    }

    pub fn identity() -> Self {
        Self::new([
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        ])
    }

    pub fn hadamard() -> Self {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        Self::new([
            [Complex64::new(h, 0.0), Complex64::new(h, 0.0)],
            [Complex64::new(h, 0.0), Complex64::new(-h, 0.0)],
        ])
    }

    /// Z rotation `diag(e^{−iθ/2}, e^{iθ/2})`.
    pub fn rotation_z(angle: f64) -> Self {
        Self::new([
            [Complex64::from_polar(1.0, -angle / 2.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, angle / 2.0)],
        ])
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::new([
            [self.m[0][0].conj(), self.m[1][0].conj()],
            [self.m[0][1].conj(), self.m[1][1].conj()],
        ])
    }

    /// Max element-wise deviation of `U·U†` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let a = self.m;
        let mut defect: f64 = 0.0;
        for r in 0..2 {
            for c in 0..2 {
                let e: Complex64 = a[r].iter().zip(&a[c]).map(|(x, y)| x * y.conj()).sum();
                let want = if r == c { 1.0 } else { 0.0 };
                defect = defect.max((e - want).norm());
            }
        }
        defect
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }
}

/// Dense n-qubit state: `2^n` amplitudes indexed by round bitstring.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-cooperate state |0…0⟩ on `n_qubits` qubits.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidQubitCount { got: n_qubits });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Wrap an explicit amplitude vector; the length must be `2^n_qubits`.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::InvalidQubitCount { got: n_qubits });
        }
        if amps.len() != 1 << n_qubits {
            return Err(Error::BadAmplitudeLength {
                expected: 1 << n_qubits,
                got: amps.len(),
            });
        }
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// Number of amplitudes, `2^n_qubits`.
    pub fn dimension(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Measurement distribution |amplitude|² over basis indices.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_qubit(&self, qubit: usize) -> Result<usize> {
        if qubit == 0 || qubit > self.n_qubits {
            return Err(Error::QubitOutOfRange {
                qubit,
                n_qubits: self.n_qubits,
            });
        }
        // qubit 1 is the most significant index bit
        Ok(1 << (self.n_qubits - qubit))
    }

    /// Apply `u` to the given qubit (I ⊗ … ⊗ u ⊗ … ⊗ I).
    pub fn apply_single_qubit(&mut self, qubit: usize, u: &SingleQubitUnitary) -> Result<()> {
        let mask = self.check_qubit(qubit)?;
        let (u00, u01) = (u.entry(0, 0), u.entry(0, 1));
        let (u10, u11) = (u.entry(1, 0), u.entry(1, 1));
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a = self.amps[i];
                let b = self.amps[j];
                self.amps[i] = u00 * a + u01 * b;
                self.amps[j] = u10 * a + u11 * b;
            }
        }
        Ok(())
    }

    pub fn apply_hadamard(&mut self, qubit: usize) -> Result<()> {
        self.apply_single_qubit(qubit, &SingleQubitUnitary::hadamard())
    }

    /// Flip the target bit on basis states whose control bit is 1.
    pub fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        if control == target {
            return Err(Error::ControlEqualsTarget(control));
        }
        let cmask = self.check_qubit(control)?;
        let tmask = self.check_qubit(target)?;
        for i in 0..self.amps.len() {
            if i & cmask != 0 && i & tmask == 0 {
                self.amps.swap(i, i | tmask);
            }
        }
        Ok(())
    }

    /// Phase gate S (or S† when `dagger`): basis states with the given bit set
    /// pick up a factor i (resp. −i).
    pub fn apply_phase_s(&mut self, qubit: usize, dagger: bool) -> Result<()> {
        let mask = self.check_qubit(qubit)?;
        let phase = Complex64::new(0.0, if dagger { -1.0 } else { 1.0 });
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *amp *= phase;
            }
        }
        Ok(())
    }

    /// `exp(i·(angle/2)·X⊗…⊗X) = cos(angle/2)·I + i·sin(angle/2)·X^⊗n`.
    ///
    /// Acts on bit-complement pairs (x, x̄): each pair of amplitudes mixes as
    /// `(c·a_x + i·s·a_x̄, c·a_x̄ + i·s·a_x)`.
    pub fn apply_pauli_x_string_exp(&mut self, angle: f64) {
        let c = (angle / 2.0).cos();
        let is = Complex64::new(0.0, (angle / 2.0).sin());
        let full = self.amps.len() - 1;
        for x in 0..self.amps.len() / 2 {
            let y = full ^ x;
            let ax = self.amps[x];
            let ay = self.amps[y];
            self.amps[x] = c * ax + is * ay;
            self.amps[y] = c * ay + is * ax;
        }
    }

    /// Draw `shots` computational-basis samples from |amplitude|².
    ///
    /// Sampling is inverse-CDF over a ChaCha8 stream seeded from `seed`, so a
    /// given `(state, shots, seed)` always yields the same counts.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<MeasurementCounts> {
        if shots == 0 {
            return Err(Error::ZeroShots);
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random();
            let idx = cdf.partition_point(|&c| c <= u).min(self.amps.len() - 1);
            *counts.entry(bitstring(idx, self.n_qubits)).or_insert(0) += 1;
        }
        Ok(MeasurementCounts { counts, shots })
    }
}

/// Histogram of measured bitstrings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurementCounts {
    counts: BTreeMap<String, u64>,
    shots: u64,
}

impl MeasurementCounts {
    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn count(&self, bits: &str) -> u64 {
        self.counts.get(bits).copied().unwrap_or(0)
    }

    pub fn frequency(&self, bits: &str) -> f64 {
        self.count(bits) as f64 / self.shots as f64
    }

    /// Bitstring → count pairs in lexicographic bitstring order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

/// Render a basis index as the round bitstring `b1 b2 … bn`.
pub fn bitstring(index: usize, n_qubits: usize) -> String {
    format!("{index:0n_qubits$b}")
}

/// Parse a round bitstring back to its basis index.
pub fn bitstring_index(bits: &str, n_qubits: usize) -> Result<usize> {
    if bits.len() != n_qubits || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::InvalidBitstring {
            bits: bits.to_string(),
            expected: n_qubits,
        });
    }
    Ok(bits.bytes().fold(0, |acc, b| (acc << 1) | (b - b'0') as usize))
}

/// True iff some unit-modulus scalar c makes ‖a − c·b‖ ≤ tol.
///
/// The phase is fitted at b's largest-magnitude amplitude; the residual over
/// the full vector then decides.
pub fn equal_up_to_global_phase(a: &StateVector, b: &StateVector, tol: f64) -> bool {
    assert_eq!(a.n_qubits, b.n_qubits, "states must have the same qubit count");
    let c = fitted_global_phase(a, b);
    if !c.re.is_finite() || !c.im.is_finite() {
        return false;
    }
    let residual: f64 = a
        .amps
        .iter()
        .zip(&b.amps)
        .map(|(x, y)| (x - c * y).norm_sqr())
        .sum::<f64>()
        .sqrt();
    residual <= tol
}

/// The scalar `c = a_k / b_k` fitted at b's largest-magnitude amplitude k.
///
/// When `a` and `b` agree up to a global phase this is that phase.
pub fn fitted_global_phase(a: &StateVector, b: &StateVector) -> Complex64 {
    assert_eq!(a.n_qubits, b.n_qubits, "states must have the same qubit count");
    let mut k = 0;
    let mut best = -1.0;
    for (i, amp) in b.amps.iter().enumerate() {
        let m = amp.norm_sqr();
        if m > best {
            best = m;
            k = i;
        }
    }
    a.amps[k] / b.amps[k]
}
