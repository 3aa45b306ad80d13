//! Small-bias sets over F_q.
//!
//! For B ⊆ F_q the Fourier transform is f_B(w) = Σ_{b∈B} e^{2πi·wb/q} and the
//! bias is λ(B) = max_{w≠0} |f_B(w)| / |B|. A set is δ-good when λ(B) ≤ δ.
//!
//! Phases are always taken from the reduced residue `w·b mod q`, so the angle
//! passed to the trig functions stays in [0, 2π).

use std::f64::consts::TAU;

use itertools::Itertools;
use num_complex::Complex64;
use rand::seq::index;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};

/// Exhaustive frequency scans refuse moduli above this.
pub const MAX_SCAN_MODULUS: u64 = 1_000_000;

/// Slack used by [`BiasSet::is_delta_good`].
pub const DELTA_TOLERANCE: f64 = 1e-9;

/// Two bias values closer than this are treated as a tie and broken
/// lexicographically.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Frequency scans below this size stay on the calling thread.
const PAR_SCAN_THRESHOLD: u64 = 1 << 14;
const SCAN_CHUNK: u64 = 4096;

/// e^{2πi·r/q} for a reduced residue r.
#[inline]
pub fn unit_root(r: u64, q: u64) -> Complex64 {
    let (sin, cos) = (TAU * r as f64 / q as f64).sin_cos();
    Complex64::new(cos, sin)
}

/// Table of all q-th roots of unity, indexed by residue.
#[derive(Debug, Clone)]
pub struct UnitRoots {
    q: u64,
    table: Vec<Complex64>,
}

impl UnitRoots {
    pub fn new(q: u64) -> Self {
        let table = (0..q).map(|r| unit_root(r, q)).collect();
        Self { q, table }
    }

    pub fn modulus(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn get(&self, r: u64) -> Complex64 {
        self.table[r as usize]
    }
}

/// Largest |f_B(w)| over w ≠ 0 and the smallest frequency attaining it.
fn frequency_scan(field: PrimeField, elements: &[u64], roots: &UnitRoots) -> (f64, u64) {
    let q = field.modulus();
    if q < 2 {
        return (0.0, 0);
    }
    let scan_range = |start: u64, end: u64| -> (f64, u64) {
        let mut residues: Vec<u64> = elements.iter().map(|&b| field.mul_raw(start, b)).collect();
        let mut best = (-1.0f64, start);
        for w in start..end {
            let mut acc = Complex64::new(0.0, 0.0);
            for (r, &b) in residues.iter_mut().zip(elements) {
                acc += roots.get(*r);
                *r = field.add_raw(*r, b);
            }
            let mag = acc.norm_sqr();
            if mag > best.0 {
                best = (mag, w);
            }
        }
        best
    };
    let (norm_sqr, argmax) = if q <= PAR_SCAN_THRESHOLD {
        scan_range(1, q)
    } else {
        let chunks: Vec<u64> = (1..q).step_by(SCAN_CHUNK as usize).collect();
        chunks
            .par_iter()
            .map(|&start| scan_range(start, (start + SCAN_CHUNK).min(q)))
            .reduce(
                || (-1.0, u64::MAX),
                |a, b| {
                    if a.0 > b.0 || (a.0 == b.0 && a.1 < b.1) {
                        a
                    } else {
                        b
                    }
                },
            )
    };
    (norm_sqr.sqrt(), argmax)
}

fn normalized_bias(max_abs: f64, size: usize) -> f64 {
    (max_abs / size as f64).min(1.0)
}

/// A subset B ⊆ F_q with its bias λ(B) computed at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct BiasSet {
    field: PrimeField,
    elements: Vec<u64>,
    bias: f64,
    worst_frequency: u64,
}

impl BiasSet {
    /// Builds a set from residues in any order; duplicates are rejected.
    pub fn new(field: PrimeField, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let roots = UnitRoots::new(Self::check_scan(field)?);
        Self::with_roots(field, elements.into_iter().collect(), &roots)
    }

    pub fn from_elements(field: PrimeField, elements: &[FieldElement]) -> Result<Self> {
        for e in elements {
            e.same_field(&field.zero())?;
        }
        Self::new(field, elements.iter().map(|e| e.value()))
    }

    fn check_scan(field: PrimeField) -> Result<u64> {
        let q = field.modulus();
        if q > MAX_SCAN_MODULUS {
            return Err(Error::ScanTooLarge { q, cap: MAX_SCAN_MODULUS });
        }
        Ok(q)
    }

    fn with_roots(field: PrimeField, mut elements: Vec<u64>, roots: &UnitRoots) -> Result<Self> {
        let q = field.modulus();
        if elements.is_empty() {
            return Err(Error::InvalidSet("a bias set needs at least one element".into()));
        }
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidSet(format!("duplicate element {}", w[0])));
        }
        if let Some(&last) = elements.last() {
            if last >= q {
                return Err(Error::NotAResidue { value: last, q });
            }
        }
        let (max_abs, worst_frequency) = frequency_scan(field, &elements, roots);
        Ok(Self {
            field,
            bias: normalized_bias(max_abs, elements.len()),
            elements,
            worst_frequency,
        })
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn modulus(&self) -> u64 {
        self.field.modulus()
    }

    /// Sorted residues b_1 < ... < b_T.
    pub fn elements(&self) -> &[u64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// λ(B).
    pub fn bias(&self) -> f64 {
        self.bias
    }

    /// Smallest nonzero frequency w with |f_B(w)| = |B|·λ(B).
    pub fn worst_frequency(&self) -> u64 {
        self.worst_frequency
    }

    /// f_B(w) in double precision.
    pub fn dft_value(&self, w: FieldElement) -> Result<Complex64> {
        w.same_field(&self.field.zero())?;
        let q = self.modulus();
        Ok(self
            .elements
            .iter()
            .map(|&b| unit_root(self.field.mul_raw(w.value(), b), q))
            .sum())
    }

    pub fn is_delta_good(&self, delta: f64) -> bool {
        self.bias <= delta + DELTA_TOLERANCE
    }

    pub fn to_file(&self) -> BiasSetFile {
        BiasSetFile {
            q: self.modulus(),
            elements: self.elements.clone(),
            bias: Some(self.bias),
        }
    }

    /// Rebuilds a set from its file form, recomputing λ and rejecting a stored
    /// bias that disagrees by more than 1e-12.
    pub fn from_file(file: &BiasSetFile) -> Result<Self> {
        let field = PrimeField::new(file.q)?;
        let set = Self::new(field, file.elements.iter().copied())?;
        if let Some(stored) = file.bias {
            if (stored - set.bias).abs() > 1e-12 {
                return Err(Error::InvalidSet(format!(
                    "stored bias {stored} disagrees with recomputed {}",
                    set.bias
                )));
            }
        }
        Ok(set)
    }
}

/// On-disk form of a bias set: `{"q": int, "elements": [int…], "bias": float}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasSetFile {
    pub q: u64,
    pub elements: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    Exhaustive,
    Heuristic,
}

/// Parameters for finding a size-T set of small bias. `budget` counts bias
/// evaluations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub q: u64,
    pub size: usize,
    pub mode: SearchMode,
    pub budget: u64,
    pub seed: u64,
}

impl SearchConfig {
    fn validate(&self) -> Result<PrimeField> {
        let field = PrimeField::new(self.q)?;
        BiasSet::check_scan(field)?;
        if self.size < 1 || self.size as u64 > self.q {
            return Err(Error::InvalidConfig(format!(
                "set size {} must lie in [1, {}]",
                self.size, self.q
            )));
        }
        if self.budget < 1 {
            return Err(Error::InvalidConfig("budget must be at least 1".into()));
        }
        Ok(field)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchOutcome {
    #[serde(rename = "set")]
    pub best: BiasSetFile,
    /// λ of the first candidate examined.
    pub initial_bias: f64,
    pub evaluations: u64,
    pub restarts: u64,
    #[serde(skip)]
    set: Option<BiasSet>,
}

impl SearchOutcome {
    pub fn set(&self) -> &BiasSet {
        self.set.as_ref().expect("outcome always carries its set")
    }

    pub fn into_set(self) -> BiasSet {
        self.set.expect("outcome always carries its set")
    }
}

pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    match cfg.mode {
        SearchMode::Exhaustive => exhaustive_search(cfg),
        SearchMode::Heuristic => heuristic_search(cfg),
    }
}

/// Counts bias evaluations against the configured budget.
struct Evaluator {
    field: PrimeField,
    roots: UnitRoots,
    evaluations: u64,
}

impl Evaluator {
    fn new(field: PrimeField) -> Self {
        Self { field, roots: UnitRoots::new(field.modulus()), evaluations: 0 }
    }

    fn bias(&mut self, sorted: &[u64]) -> f64 {
        self.evaluations += 1;
        normalized_bias(frequency_scan(self.field, sorted, &self.roots).0, sorted.len())
    }
}

/// `(lambda, set)` strictly improves on `(best_lambda, best)` under the
/// tolerance-then-lexicographic order.
fn improves(lambda: f64, set: &[u64], best_lambda: f64, best: &[u64]) -> bool {
    if lambda < best_lambda - TIE_TOLERANCE {
        return true;
    }
    lambda <= best_lambda + TIE_TOLERANCE && set < best
}

fn binomial(n: u64, k: u64) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

/// Enumerates every size-T subset in lexicographic order and keeps the one of
/// least bias.
pub fn exhaustive_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.mode != SearchMode::Exhaustive {
        return Err(Error::InvalidConfig("exhaustive_search needs mode = exhaustive".into()));
    }
    let field = cfg.validate()?;
    let required = binomial(cfg.q, cfg.size as u64).unwrap_or(u128::MAX);
    if required > cfg.budget as u128 {
        return Err(Error::BudgetExceeded { required, budget: cfg.budget });
    }
    let mut eval = Evaluator::new(field);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut initial_bias = None;
    for candidate in (0..cfg.q).combinations(cfg.size) {
        let lambda = eval.bias(&candidate);
        initial_bias.get_or_insert(lambda);
        match &best {
            Some((bl, bs)) if !improves(lambda, &candidate, *bl, bs) => {}
            _ => best = Some((lambda, candidate)),
        }
    }
    let (_, elements) = best.expect("at least one subset");
    finish(field, elements, &eval, initial_bias.unwrap_or(1.0), 0)
}

/// Seeded random-restart steepest descent over single-element swaps.
///
/// Each restart draws a uniform size-T subset, then repeatedly moves to the
/// best swap neighbour while that strictly lowers λ. The run stops once
/// `budget` bias evaluations have been spent and returns the best set seen.
pub fn heuristic_search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    if cfg.mode != SearchMode::Heuristic {
        return Err(Error::InvalidConfig("heuristic_search needs mode = heuristic".into()));
    }
    let field = cfg.validate()?;
    let q = cfg.q;
    let size = cfg.size;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut eval = Evaluator::new(field);
    let mut best: Option<(f64, Vec<u64>)> = None;
    let mut initial_bias = None;
    let mut restarts = 0u64;

    'restart: while eval.evaluations < cfg.budget {
        let mut current: Vec<u64> =
            index::sample(&mut rng, q as usize, size).into_iter().map(|i| i as u64).collect();
        current.sort_unstable();
        let mut current_lambda = eval.bias(&current);
        initial_bias.get_or_insert(current_lambda);
        if best.as_ref().is_none_or(|(bl, bs)| improves(current_lambda, &current, *bl, bs)) {
            best = Some((current_lambda, current.clone()));
        }
        if size as u64 == q {
            // the only subset; nothing to descend
            break;
        }

        loop {
            let mut step: Option<(f64, Vec<u64>)> = None;
            let outside: Vec<u64> = (0..q).filter(|x| current.binary_search(x).is_err()).collect();
            for i in 0..size {
                for &x in &outside {
                    if eval.evaluations >= cfg.budget {
                        break 'restart;
                    }
                    let mut candidate = current.clone();
                    candidate[i] = x;
                    candidate.sort_unstable();
                    let lambda = eval.bias(&candidate);
                    if step.as_ref().is_none_or(|(sl, ss)| improves(lambda, &candidate, *sl, ss)) {
                        step = Some((lambda, candidate));
                    }
                }
            }
            match step {
                Some((lambda, candidate)) if lambda < current_lambda - TIE_TOLERANCE => {
                    current = candidate;
                    current_lambda = lambda;
                    let (bl, bs) = best.as_ref().expect("seeded above");
                    if improves(current_lambda, &current, *bl, bs) {
                        best = Some((current_lambda, current.clone()));
                    }
                }
                _ => break,
            }
        }
        restarts += 1;
    }

    let (_, elements) = best.expect("budget >= 1 guarantees one evaluation");
    finish(field, elements, &eval, initial_bias.unwrap_or(1.0), restarts)
}

fn finish(
    field: PrimeField,
    elements: Vec<u64>,
    eval: &Evaluator,
    initial_bias: f64,
    restarts: u64,
) -> Result<SearchOutcome> {
    let set = BiasSet::with_roots(field, elements, &eval.roots)?;
    Ok(SearchOutcome {
        best: set.to_file(),
        initial_bias,
        evaluations: eval.evaluations,
        restarts,
        set: Some(set),
    })
}
