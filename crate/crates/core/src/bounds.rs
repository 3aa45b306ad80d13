//! One-wayness and qubit-count bounds.
//!
//! * Holevo–Nayak: decoding K uniform messages from s qubits succeeds with
//!   probability at most 2^s / K.
//! * A δ-resistant (K; s) hash needs s ≥ log log K − log log(1 + √(2/(1−δ))) − 1.
//! * The pretty-good measurement gives a concrete decoder whose success
//!   probability can be sandwiched against the Holevo–Nayak cap.

use serde::{Deserialize, Serialize};

use crate::bias::BiasSet;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, CMatrix};
use crate::qstate::{hash_state, qubits_for, QuantumHashState};

/// Eigenvalues of ρ below this are treated as outside its support.
pub const SUPPORT_TOLERANCE: f64 = 1e-12;

/// min(1, 2^s / K).
pub fn holevo_nayak_epsilon(s: u32, domain_size: u128) -> Result<f64> {
    if domain_size < 1 {
        return Err(Error::Range("domain size must be at least 1".into()));
    }
    let log_ratio = s as f64 - (domain_size as f64).log2();
    Ok(if log_ratio >= 0.0 { 1.0 } else { log_ratio.exp2() })
}

/// log₂log₂K − log₂log₂(1 + √(2/(1−δ))) − 1.
pub fn min_qubits_lower_bound(domain_size: u128, delta: f64) -> Result<f64> {
    if domain_size < 4 {
        return Err(Error::Range(format!("domain size {domain_size} must be at least 4")));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Range(format!("delta {delta} must lie in [0, 1)")));
    }
    let loglog = |x: f64| x.log2().log2();
    Ok(loglog(domain_size as f64) - loglog(1.0 + (2.0 / (1.0 - delta)).sqrt()) - 1.0)
}

/// Pure states with prior probabilities.
#[derive(Debug, Clone)]
pub struct StateEnsemble {
    states: Vec<QuantumHashState>,
    priors: Vec<f64>,
}

impl StateEnsemble {
    pub fn new(states: Vec<QuantumHashState>, priors: Vec<f64>) -> Result<Self> {
        let first = states.first().ok_or_else(|| Error::Range("ensemble needs at least one state".into()))?;
        for s in &states[1..] {
            first.same_shape(s)?;
        }
        if priors.len() != states.len() {
            return Err(Error::LengthMismatch { expected: states.len(), actual: priors.len() });
        }
        if priors.iter().any(|&p| p.is_nan() || p < 0.0) {
            return Err(Error::Range("priors must be nonnegative".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::Range(format!("priors sum to {total}, not 1")));
        }
        Ok(Self { states, priors })
    }

    pub fn uniform(states: Vec<QuantumHashState>) -> Result<Self> {
        let p = 1.0 / states.len().max(1) as f64;
        let priors = vec![p; states.len()];
        Self::new(states, priors)
    }

    /// {ψ_B(w) : w ∈ F_q} with uniform priors.
    pub fn from_bias_set(set: &BiasSet) -> Result<Self> {
        let states = set.field().elements().map(|w| hash_state(set, w)).collect::<Result<Vec<_>>>()?;
        Self::uniform(states)
    }

    pub fn states(&self) -> &[QuantumHashState] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Σ_w p_w².
    pub fn guessing_floor(&self) -> f64 {
        self.priors.iter().map(|p| p * p).sum()
    }

    /// Σ_w p_w |ψ_w⟩⟨ψ_w| restricted to the active coordinates.
    pub fn density_matrix(&self) -> CMatrix {
        let d = self.states[0].active_dim();
        let mut rho = CMatrix::zeros(d);
        for (state, &p) in self.states.iter().zip(&self.priors) {
            rho.add_outer(p, state.active());
        }
        rho
    }
}

/// Success probability of the pretty-good measurement,
/// Σ_w p_w² |⟨ψ_w|ρ^{-1/2}|ψ_w⟩|², with ρ^{-1/2} taken on the support of ρ.
pub fn pgm_success(ensemble: &StateEnsemble) -> Result<f64> {
    let eigen = hermitian_eigen(&ensemble.density_matrix())?;
    let inv_sqrt = eigen.spectral_map(|lambda| if lambda > SUPPORT_TOLERANCE { 1.0 / lambda.sqrt() } else { 0.0 });
    let success = ensemble
        .states
        .iter()
        .zip(&ensemble.priors)
        .map(|(state, &p)| {
            let mapped = inv_sqrt.mul_vec(state.active());
            let diag: num_complex::Complex64 =
                state.active().iter().zip(&mapped).map(|(x, y)| x.conj() * y).sum();
            p * p * diag.norm_sqr()
        })
        .sum::<f64>();
    Ok(success.min(1.0))
}

/// Thresholds that decide whether a hash counts as balanced.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BalancePolicy {
    /// s may exceed the qubit lower bound by at most this much.
    pub qubit_slack: f64,
    /// δ must not exceed this.
    pub max_delta: f64,
}

impl Default for BalancePolicy {
    fn default() -> Self {
        Self { qubit_slack: 3.0, max_delta: 0.5 }
    }
}

/// (ε, δ) resistance figures of a (K; s) quantum hash function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceReport {
    #[serde(rename = "K")]
    pub domain_size: u128,
    pub s: u32,
    pub epsilon_bound: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measured_decoder_success: Option<f64>,
    pub delta: f64,
    /// `None` when δ = 1 or K < 4, where the lower bound is undefined.
    pub min_qubits: Option<f64>,
    pub balanced: bool,
    pub policy: BalancePolicy,
}

impl ResistanceReport {
    pub fn assess(domain_size: u128, s: u32, delta: f64, policy: BalancePolicy) -> Result<Self> {
        if !(0.0..=1.0 + 1e-12).contains(&delta) {
            return Err(Error::Range(format!("delta {delta} must lie in [0, 1]")));
        }
        let epsilon_bound = holevo_nayak_epsilon(s, domain_size)?;
        let min_qubits = if domain_size >= 4 && delta < 1.0 {
            Some(min_qubits_lower_bound(domain_size, delta)?)
        } else {
            None
        };
        let balanced = delta <= policy.max_delta
            && min_qubits.is_some_and(|bound| s as f64 - bound <= policy.qubit_slack);
        Ok(Self {
            domain_size,
            s,
            epsilon_bound,
            measured_decoder_success: None,
            delta,
            min_qubits,
            balanced,
            policy,
        })
    }

    /// Attaches a decoder measurement; a value above the Holevo–Nayak cap is
    /// reported as an error since it cannot happen for a correct simulation.
    pub fn with_measured_success(mut self, success: f64) -> Result<Self> {
        if success > self.epsilon_bound + 1e-9 {
            return Err(Error::BoundViolation(format!(
                "decoder success {success} exceeds the cap {}",
                self.epsilon_bound
            )));
        }
        self.measured_decoder_success = Some(success);
        Ok(self)
    }

    /// s ≥ lower bound − 1e-9 whenever the bound is defined.
    pub fn respects_qubit_bound(&self) -> bool {
        self.min_qubits.is_none_or(|bound| self.s as f64 >= bound - 1e-9)
    }
}

/// Report for ψ_B over F_q: K = q, s = ⌈log₂ T⌉, δ = λ(B).
pub fn balance_report(q: u64, size: usize, set: &BiasSet, policy: BalancePolicy) -> Result<ResistanceReport> {
    if set.modulus() != q {
        return Err(Error::FieldMismatch { left: q, right: set.modulus() });
    }
    if set.len() != size {
        return Err(Error::LengthMismatch { expected: size, actual: set.len() });
    }
    ResistanceReport::assess(q as u128, qubits_for(size), set.bias(), policy)
}
