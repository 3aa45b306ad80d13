//! Classical function families used as quantum hash generators.
//!
//! A generator is any indexed family of functions into F_q. Phase-encoding the
//! outputs of every member gives a hash state. Three families are provided:
//!
//! * [`LinearFamily`]: h_j(w) = b_j·w for a bias set B.
//! * [`RSFamily`]: f_l(w) = P_w(a_l), Reed–Solomon evaluation of the message
//!   polynomial at point a_l.
//! * [`ComposedGenerator`]: g_{jl}(w) = h_j(f_l(w)), indexed l-major
//!   (flat index l·T + j).

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bias::{BiasSet, BiasSetFile, UnitRoots};
use crate::error::{Error, Result};
use crate::field::{FieldElement, PrimeField};
use crate::qstate::QuantumHashState;

/// Default cap on q^k for exhaustive generator scans.
pub const DEFAULT_DOMAIN_LIMIT: u128 = 100_000;

pub trait ClassicalFamily {
    type Message: ?Sized;

    fn field(&self) -> PrimeField;

    /// Number of functions in the family.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Rejects messages of the wrong shape or field.
    fn check_message(&self, message: &Self::Message) -> Result<()>;

    /// Residue of member `index` on a message already checked.
    fn eval_unchecked(&self, index: usize, message: &Self::Message) -> u64;

    fn eval(&self, index: usize, message: &Self::Message) -> Result<FieldElement> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange { index, len: self.len() });
        }
        self.check_message(message)?;
        Ok(self.field().element(self.eval_unchecked(index, message)).expect("reduced"))
    }

    /// Outputs of every member in index order.
    fn eval_all(&self, message: &Self::Message) -> Result<Vec<u64>> {
        self.check_message(message)?;
        Ok((0..self.len()).map(|i| self.eval_unchecked(i, message)).collect())
    }

    /// Phase-encodes every member's output.
    fn hash_state(&self, message: &Self::Message) -> Result<QuantumHashState> {
        QuantumHashState::from_phases(&self.eval_all(message)?, self.field().modulus())
    }
}

/// H_B = {w ↦ b·w : b ∈ B}.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFamily {
    base: BiasSet,
}

impl LinearFamily {
    pub fn new(base: BiasSet) -> Self {
        Self { base }
    }

    pub fn base(&self) -> &BiasSet {
        &self.base
    }
}

impl ClassicalFamily for LinearFamily {
    type Message = FieldElement;

    fn field(&self) -> PrimeField {
        self.base.field()
    }

    fn len(&self) -> usize {
        self.base.len()
    }

    fn check_message(&self, message: &FieldElement) -> Result<()> {
        message.same_field(&self.field().zero())
    }

    fn eval_unchecked(&self, index: usize, message: &FieldElement) -> u64 {
        self.field().mul_raw(self.base.elements()[index], message.value())
    }
}

/// Reed–Solomon evaluation family over distinct points a_1 … a_n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RSFamily {
    field: PrimeField,
    k: usize,
    points: Vec<u64>,
}

impl RSFamily {
    /// `k = 1` is accepted as the degenerate repetition code.
    pub fn new(field: PrimeField, k: usize, points: Vec<u64>) -> Result<Self> {
        let q = field.modulus();
        let n = points.len();
        if k < 1 || k > n || n as u64 > q {
            return Err(Error::InvalidConfig(format!("need 1 <= k <= n <= q, got k={k}, n={n}, q={q}")));
        }
        let mut sorted = points.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidConfig("evaluation points must be distinct".into()));
        }
        if let Some(&p) = sorted.last().filter(|&&p| p >= q) {
            return Err(Error::NotAResidue { value: p, q });
        }
        Ok(Self { field, k, points })
    }

    /// Points {1, …, n}, or all of F_q when n = q.
    pub fn with_default_points(field: PrimeField, k: usize, n: usize) -> Result<Self> {
        let points = if n as u64 >= field.modulus() { (0..n as u64).collect() } else { (1..=n as u64).collect() };
        Self::new(field, k, points)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[u64] {
        &self.points
    }

    /// q^k, or `None` if it does not fit in a u128.
    pub fn domain_size(&self) -> Option<u128> {
        (self.field.modulus() as u128).checked_pow(self.k as u32)
    }

    /// C_RS(w) = (P_w(a_1), …, P_w(a_n)).
    pub fn encode(&self, message: &[FieldElement]) -> Result<Vec<FieldElement>> {
        self.eval_all(message)
            .map(|c| c.into_iter().map(|v| self.field.element(v).expect("reduced")).collect())
    }

    /// Every message in F_q^k, in mixed-radix order with w_0 varying fastest.
    pub fn messages(&self) -> impl Iterator<Item = Vec<FieldElement>> + '_ {
        let total = self.domain_size().unwrap_or(u128::MAX);
        (0..total).map(move |m| self.message_at(m))
    }

    fn message_at(&self, mut m: u128) -> Vec<FieldElement> {
        let q = self.field.modulus() as u128;
        (0..self.k)
            .map(|_| {
                let digit = (m % q) as u64;
                m /= q;
                self.field.element(digit).expect("reduced")
            })
            .collect()
    }

    fn eval_residues(&self, coeffs: &[u64], x: u64) -> u64 {
        let f = &self.field;
        coeffs.iter().rev().fold(0, |acc, &c| f.add_raw(f.mul_raw(acc, x), c))
    }
}

impl ClassicalFamily for RSFamily {
    type Message = [FieldElement];

    fn field(&self) -> PrimeField {
        self.field
    }

    fn len(&self) -> usize {
        self.points.len()
    }

    fn check_message(&self, message: &[FieldElement]) -> Result<()> {
        if message.len() != self.k {
            return Err(Error::LengthMismatch { expected: self.k, actual: message.len() });
        }
        let zero = self.field.zero();
        message.iter().try_for_each(|w| w.same_field(&zero))
    }

    fn eval_unchecked(&self, index: usize, message: &[FieldElement]) -> u64 {
        let f = &self.field;
        let x = self.points[index];
        message.iter().rev().fold(0, |acc, c| f.add_raw(f.mul_raw(acc, x), c.value()))
    }
}

/// g_{jl}(w) = b_j · f_l(w) for an inner classical family f and an outer
/// linear family H_B.
#[derive(Debug, Clone, PartialEq)]
pub struct ComposedGenerator<F = RSFamily> {
    outer: LinearFamily,
    inner: F,
}

impl<F: ClassicalFamily> ComposedGenerator<F> {
    pub fn new(outer: LinearFamily, inner: F) -> Result<Self> {
        let (a, b) = (outer.field().modulus(), inner.field().modulus());
        if a != b {
            return Err(Error::FieldMismatch { left: a, right: b });
        }
        Ok(Self { outer, inner })
    }

    pub fn outer(&self) -> &LinearFamily {
        &self.outer
    }

    pub fn inner(&self) -> &F {
        &self.inner
    }

    /// Flat basis index of the pair (l, j).
    pub fn flat_index(&self, l: usize, j: usize) -> usize {
        l * self.outer.len() + j
    }
}

impl<F: ClassicalFamily> ClassicalFamily for ComposedGenerator<F> {
    type Message = F::Message;

    fn field(&self) -> PrimeField {
        self.inner.field()
    }

    fn len(&self) -> usize {
        self.inner.len() * self.outer.len()
    }

    fn check_message(&self, message: &F::Message) -> Result<()> {
        self.inner.check_message(message)
    }

    fn eval_unchecked(&self, index: usize, message: &F::Message) -> u64 {
        let t = self.outer.len();
        let inner = self.inner.eval_unchecked(index / t, message);
        self.field().mul_raw(self.outer.base().elements()[index % t], inner)
    }

    /// Encodes classically through the inner family once, then applies the
    /// linear layer to each codeword symbol.
    fn eval_all(&self, message: &F::Message) -> Result<Vec<u64>> {
        let field = self.field();
        let codeword = self.inner.eval_all(message)?;
        let base = self.outer.base().elements();
        Ok(codeword
            .iter()
            .flat_map(|&c| base.iter().map(move |&b| field.mul_raw(b, c)))
            .collect())
    }
}

impl ComposedGenerator<RSFamily> {
    /// Exact worst-case |⟨ψ(w)|ψ(w′)⟩| over distinct messages.
    ///
    /// Both layers are linear, so the overlap of w and w′ only depends on
    /// d = w − w′ and equals |Σ_l f_B(P_d(a_l))| / (nT). The scan runs over the
    /// q^k − 1 nonzero d.
    pub fn collision_delta(&self, domain_limit: u128) -> Result<f64> {
        let size = self.inner.domain_size().unwrap_or(u128::MAX);
        if size > domain_limit {
            return Err(Error::DomainTooLarge { size, limit: domain_limit });
        }
        let field = self.field();
        let q = field.modulus();
        let roots = UnitRoots::new(q);
        let base = self.outer.base().elements();
        let transform: Vec<Complex64> =
            (0..q).map(|r| base.iter().map(|&b| roots.get(field.mul_raw(r, b))).sum()).collect();
        let scale = 1.0 / self.len() as f64;
        let worst = (1..size as u64)
            .into_par_iter()
            .map(|m| {
                let coeffs: Vec<u64> = self.inner.message_at(m as u128).iter().map(|e| e.value()).collect();
                let total: Complex64 = self
                    .inner
                    .points
                    .iter()
                    .map(|&a| transform[self.inner.eval_residues(&coeffs, a) as usize])
                    .sum();
                total.norm() * scale
            })
            .reduce(|| 0.0, f64::max);
        Ok(worst.min(1.0))
    }

    /// (k − 1)/n + λ(B).
    pub fn collision_bound(&self) -> f64 {
        (self.inner.k() as f64 - 1.0) / self.inner.n() as f64 + self.outer.base().bias()
    }

    pub fn to_file(&self) -> GeneratorFile {
        GeneratorFile {
            q: self.field().modulus(),
            k: self.inner.k(),
            n: self.inner.n(),
            points: self.inner.points().to_vec(),
            bias_set: self.outer.base().to_file(),
        }
    }

    pub fn from_file(file: &GeneratorFile) -> Result<Self> {
        let set = BiasSet::from_file(&file.bias_set)?;
        if set.modulus() != file.q {
            return Err(Error::FieldMismatch { left: file.q, right: set.modulus() });
        }
        if file.points.len() != file.n {
            return Err(Error::LengthMismatch { expected: file.n, actual: file.points.len() });
        }
        let inner = RSFamily::new(set.field(), file.k, file.points.clone())?;
        Self::new(LinearFamily::new(set), inner)
    }
}

/// Generator descriptor: `{"q", "k", "n", "points", "bias_set"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    pub q: u64,
    pub k: usize,
    pub n: usize,
    pub points: Vec<u64>,
    pub bias_set: BiasSetFile,
}
