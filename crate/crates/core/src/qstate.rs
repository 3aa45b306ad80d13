//! Phase-encoded quantum hash states as dense amplitude vectors.
//!
//! A set B = {b_1 < … < b_T} hashes w ∈ F_q to
//! |ψ_B(w)⟩ = T^{-1/2} Σ_j e^{2πi·w·b_j/q} |j⟩ on s = ⌈log₂ T⌉ qubits. Basis
//! indices j ≥ T are structural zero padding.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::bias::{unit_root, BiasSet};
use crate::error::{Error, Result};
use crate::field::FieldElement;

/// Allowed deviation of Σ|a_j|² from 1.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// Largest register the explicit encodings will materialize.
pub const MAX_QUBITS: u32 = 24;

/// Probabilities this close to 0 or 1 are snapped before sampling.
const PROB_SNAP: f64 = 1e-12;

/// Trials per deterministic sampling block.
const SAMPLE_BLOCK: u64 = 4096;

/// ⌈log₂ dim⌉, with a single basis state needing no qubits.
pub fn qubits_for(dim: usize) -> u32 {
    if dim <= 1 {
        0
    } else {
        usize::BITS - (dim - 1).leading_zeros()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumHashState {
    num_qubits: u32,
    amplitudes: Vec<Complex64>,
    active_dim: usize,
}

impl QuantumHashState {
    /// Pads `active` to the next power of two and checks unit norm.
    pub fn from_amplitudes(active: Vec<Complex64>) -> Result<Self> {
        if active.is_empty() {
            return Err(Error::InvalidState("no amplitudes".into()));
        }
        let active_dim = active.len();
        let num_qubits = qubits_for(active_dim);
        if num_qubits > MAX_QUBITS {
            return Err(Error::Range(format!("{num_qubits} qubits exceeds the cap of {MAX_QUBITS}")));
        }
        let mut amplitudes = active;
        amplitudes.resize(1 << num_qubits, Complex64::new(0.0, 0.0));
        let state = Self { num_qubits, amplitudes, active_dim };
        state.check_norm()?;
        Ok(state)
    }

    /// T^{-1/2} Σ_j e^{2πi·r_j/q} |j⟩ for reduced residues r_j.
    pub fn from_phases(residues: &[u64], q: u64) -> Result<Self> {
        let scale = 1.0 / (residues.len() as f64).sqrt();
        Self::from_amplitudes(residues.iter().map(|&r| unit_root(r, q) * scale).collect())
    }

    /// Computational basis state |index⟩ on `num_qubits` qubits.
    pub fn basis(num_qubits: u32, index: usize) -> Result<Self> {
        if num_qubits > MAX_QUBITS {
            return Err(Error::Range(format!("{num_qubits} qubits exceeds the cap of {MAX_QUBITS}")));
        }
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::Range(format!("basis index {index} needs more than {num_qubits} qubits")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits, amplitudes, active_dim: dim })
    }

    fn check_norm(&self) -> Result<()> {
        let norm = self.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(())
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    /// All 2^s amplitudes including padding.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn active(&self) -> &[Complex64] {
        &self.amplitudes[..self.active_dim]
    }

    pub fn active_dim(&self) -> usize {
        self.active_dim
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn same_shape(&self, other: &Self) -> Result<()> {
        if self.dimension() != other.dimension() {
            return Err(Error::DimensionMismatch(self.dimension(), other.dimension()));
        }
        if self.active_dim != other.active_dim {
            return Err(Error::DimensionMismatch(self.active_dim, other.active_dim));
        }
        Ok(())
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            s: self.num_qubits,
            active_dim: self.active_dim,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_file(file: &StateFile) -> Result<Self> {
        let dim = file.amplitudes.len();
        if file.s > MAX_QUBITS || dim != 1usize << file.s {
            return Err(Error::InvalidState(format!("{dim} amplitudes do not match s = {}", file.s)));
        }
        if file.active_dim == 0 || file.active_dim > dim {
            return Err(Error::InvalidState(format!("active_dim {} out of range", file.active_dim)));
        }
        let amplitudes: Vec<Complex64> =
            file.amplitudes.iter().map(|&[re, im]| Complex64::new(re, im)).collect();
        if amplitudes[file.active_dim..].iter().any(|a| a.norm_sqr() != 0.0) {
            return Err(Error::InvalidState("nonzero amplitude in the padding".into()));
        }
        let state = Self { num_qubits: file.s, amplitudes, active_dim: file.active_dim };
        state.check_norm()?;
        Ok(state)
    }
}

/// Exported state: `{"s": int, "active_dim": int, "amplitudes": [[re, im]…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateFile {
    pub s: u32,
    pub active_dim: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

/// |ψ_B(w)⟩ with b_j taken in ascending order.
pub fn hash_state(set: &BiasSet, w: FieldElement) -> Result<QuantumHashState> {
    let field = set.field();
    w.same_field(&field.zero())?;
    let residues: Vec<u64> = set.elements().iter().map(|&b| field.mul_raw(w.value(), b)).collect();
    QuantumHashState::from_phases(&residues, field.modulus())
}

/// ⟨a|b⟩ = Σ_j a_j · conj(b_j).
pub fn inner_product(a: &QuantumHashState, b: &QuantumHashState) -> Result<Complex64> {
    a.same_shape(b)?;
    Ok(a.active().iter().zip(b.active()).map(|(x, y)| x * y.conj()).sum())
}

/// Worst-case |⟨ψ(w)|ψ(w′)⟩| over distinct w, w′ ∈ F_q.
///
/// Hash states of w and w′ differ by the phase pattern of w′ − w, so the
/// magnitude only depends on the difference; this scans ⟨ψ(0)|ψ(d)⟩ for the
/// q − 1 nonzero d.
pub fn collision_delta(set: &BiasSet) -> Result<f64> {
    let field = set.field();
    let origin = hash_state(set, field.zero())?;
    let worst = (1..field.modulus())
        .into_par_iter()
        .map(|d| -> Result<f64> {
            let other = hash_state(set, field.element(d)?)?;
            Ok(inner_product(&origin, &other)?.norm())
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
    Ok(worst.min(1.0))
}

/// Brute-force max |⟨ψ_i|ψ_j⟩| over all i < j.
pub fn pairwise_collision_delta(states: &[QuantumHashState]) -> Result<f64> {
    pairwise_max(states, |z| z.norm())
}

/// Max Re⟨ψ_i|ψ_j⟩ over all i < j. Distinguishes near-parallel from
/// antiparallel pairs, which the magnitude does not.
pub fn max_real_overlap(states: &[QuantumHashState]) -> Result<f64> {
    pairwise_max(states, |z| z.re)
}

fn pairwise_max(states: &[QuantumHashState], score: impl Fn(Complex64) -> f64 + Sync) -> Result<f64> {
    if states.len() < 2 {
        return Err(Error::Range("need at least two states to compare".into()));
    }
    (0..states.len())
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let mut best = f64::NEG_INFINITY;
            for j in (i + 1)..states.len() {
                best = best.max(score(inner_product(&states[i], &states[j])?));
            }
            Ok(best)
        })
        .try_reduce(|| f64::NEG_INFINITY, |a, b| Ok(a.max(b)))
}

/// Acceptance probability ½(1 + |⟨a|b⟩|²) of the SWAP test.
pub fn swap_test_probability(a: &QuantumHashState, b: &QuantumHashState) -> Result<f64> {
    let overlap = inner_product(a, b)?.norm_sqr().min(1.0);
    Ok(0.5 * (1.0 + overlap))
}

/// Acceptance probability of the REVERSE test for candidate `v`.
///
/// Undoes the phase rotation of `v` on `state` and projects onto the uniform
/// superposition that every hash state is rotated out of.
pub fn reverse_test_probability(set: &BiasSet, v: FieldElement, state: &QuantumHashState) -> Result<f64> {
    let field = set.field();
    v.same_field(&field.zero())?;
    if state.active_dim() != set.len() {
        return Err(Error::DimensionMismatch(state.active_dim(), set.len()));
    }
    let q = field.modulus();
    let scale = 1.0 / (set.len() as f64).sqrt();
    let projection: Complex64 = set
        .elements()
        .iter()
        .zip(state.active())
        .map(|(&b, &x)| unit_root(field.mul_raw(v.value(), b), q).conj() * x * scale)
        .sum();
    Ok(projection.norm_sqr().min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EqualityTest {
    Swap,
    Reverse,
}

impl EqualityTest {
    /// Acceptance probability for a pair of states. For REVERSE this is
    /// |⟨a|b⟩|², which the uncompute-and-project route reproduces.
    pub fn probability(self, a: &QuantumHashState, b: &QuantumHashState) -> Result<f64> {
        match self {
            EqualityTest::Swap => swap_test_probability(a, b),
            EqualityTest::Reverse => Ok(inner_product(a, b)?.norm_sqr().min(1.0)),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Equal,
    Unequal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EqualityTestOutcome {
    pub kind: EqualityTest,
    /// `equal` only when every trial accepted; a single rejection proves the
    /// states differ.
    pub verdict: Verdict,
    pub trials: u64,
    pub equal_count: u64,
    pub estimated_prob: f64,
    pub exact_prob: f64,
}

/// Uniform draw in [0, 1) for trial `index` of the stream keyed by `seed`.
///
/// Trial i reads the i-th 64-bit word of the ChaCha8 stream, so any trial can
/// be reproduced without replaying the ones before it.
pub fn trial_uniform(seed: u64, index: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_word_pos(2 * index as u128);
    to_unit(rng.next_u64())
}

#[inline]
fn to_unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn count_successes(p: f64, trials: u64, seed: u64) -> u64 {
    let starts: Vec<u64> = (0..trials).step_by(SAMPLE_BLOCK as usize).collect();
    starts
        .par_iter()
        .map(|&start| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_word_pos(2 * start as u128);
            let end = (start + SAMPLE_BLOCK).min(trials);
            (start..end).filter(|_| to_unit(rng.next_u64()) < p).count() as u64
        })
        .sum()
}

/// Runs `trials` independent equality tests on the pair (a, b).
pub fn simulate_equality_test(
    kind: EqualityTest,
    a: &QuantumHashState,
    b: &QuantumHashState,
    trials: u64,
    seed: u64,
) -> Result<EqualityTestOutcome> {
    if trials < 1 {
        return Err(Error::Range("trials must be at least 1".into()));
    }
    let exact = kind.probability(a, b)?;
    let p = if exact >= 1.0 - PROB_SNAP {
        1.0
    } else if exact <= PROB_SNAP {
        0.0
    } else {
        exact
    };
    let equal_count = count_successes(p, trials, seed);
    Ok(EqualityTestOutcome {
        kind,
        verdict: if equal_count == trials { Verdict::Equal } else { Verdict::Unequal },
        trials,
        equal_count,
        estimated_prob: equal_count as f64 / trials as f64,
        exact_prob: exact,
    })
}

fn check_word(v: u64, k: u32) -> Result<()> {
    if k == 0 || k > 63 {
        return Err(Error::Range(format!("word length k = {k} must lie in [1, 63]")));
    }
    if v >= 1u64 << k {
        return Err(Error::Range(format!("{v} does not fit in {k} bits")));
    }
    Ok(())
}

/// One real qubit cos(2πv/2^k)|0⟩ + sin(2πv/2^k)|1⟩.
pub fn example_amplitude_qubit(v: u64, k: u32) -> Result<QuantumHashState> {
    check_word(v, k)?;
    let angle = std::f64::consts::TAU * v as f64 / (1u64 << k) as f64;
    QuantumHashState::from_amplitudes(vec![Complex64::new(angle.cos(), 0.0), Complex64::new(angle.sin(), 0.0)])
}

/// The word v written directly into k qubits.
pub fn example_basis_encoding(v: u64, k: u32) -> Result<QuantumHashState> {
    check_word(v, k)?;
    QuantumHashState::basis(k, v as usize)
}
