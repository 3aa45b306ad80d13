//! Prime-field arithmetic.
//!
//! Moduli are restricted to primes below 2^31 so every product of two residues
//! fits comfortably in a `u64`. Primality is checked with a deterministic
//! Miller–Rabin test whose witness set is exact for all 64-bit inputs.

use std::fmt;

use crate::error::{Error, Result};

/// Largest accepted modulus (exclusive).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Witnesses that make Miller–Rabin deterministic below 2^64.
const MR_WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod_u128(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u128(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod_u128(acc, base, m);
        }
        base = mul_mod_u128(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin primality test, exact for every `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &MR_WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        r += 1;
    }
    'witness: for &a in &MR_WITNESSES {
        let mut x = pow_mod_u128(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod_u128(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The prime field F_q.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeField {
    q: u64,
}

impl PrimeField {
    pub fn new(q: u64) -> Result<Self> {
        if q >= MAX_MODULUS {
            return Err(Error::Overflow(q));
        }
        if !is_prime(q) {
            return Err(Error::NotPrime(q));
        }
        Ok(Self { q })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.q
    }

    /// Wraps `value`, which must already be reduced.
    pub fn element(&self, value: u64) -> Result<FieldElement> {
        if value >= self.q {
            return Err(Error::NotAResidue { value, q: self.q });
        }
        Ok(FieldElement { value, field: *self })
    }

    /// Reduces an arbitrary integer into the field.
    pub fn reduce(&self, value: i64) -> FieldElement {
        FieldElement {
            value: value.rem_euclid(self.q as i64) as u64,
            field: *self,
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement { value: 0, field: *self }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement { value: 1, field: *self }
    }

    /// Every element of the field in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.q).map(move |value| FieldElement { value, field: *self })
    }

    // Raw residue helpers for hot loops; inputs must already be reduced.

    #[inline]
    pub fn add_raw(&self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.q {
            s - self.q
        } else {
            s
        }
    }

    #[inline]
    pub fn sub_raw(&self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.q - b
        }
    }

    #[inline]
    pub fn mul_raw(&self, a: u64, b: u64) -> u64 {
        a * b % self.q
    }

    pub fn pow_raw(&self, base: u64, exp: u64) -> u64 {
        pow_mod_u128(base, exp, self.q)
    }

    fn check(&self, other: &PrimeField) -> Result<()> {
        if self.q != other.q {
            return Err(Error::FieldMismatch { left: self.q, right: other.q });
        }
        Ok(())
    }
}

impl fmt::Display for PrimeField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}", self.q)
    }
}

/// A residue together with the field it lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    field: PrimeField,
}

#[allow(clippy::should_implement_trait)]
impl FieldElement {
    #[inline]
    pub fn value(&self) -> u64 {
        self.value
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn same_field(&self, other: &FieldElement) -> Result<()> {
        self.field.check(&other.field)
    }

    pub fn add(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.with(self.field.add_raw(self.value, rhs.value)))
    }

    pub fn sub(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.with(self.field.sub_raw(self.value, rhs.value)))
    }

    pub fn mul(self, rhs: FieldElement) -> Result<FieldElement> {
        self.same_field(&rhs)?;
        Ok(self.with(self.field.mul_raw(self.value, rhs.value)))
    }

    pub fn neg(self) -> FieldElement {
        self.with(self.field.sub_raw(0, self.value))
    }

    pub fn pow(self, exp: u64) -> FieldElement {
        self.with(self.field.pow_raw(self.value, exp))
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(self) -> Result<FieldElement> {
        if self.value == 0 {
            return Err(Error::DivisionByZero);
        }
        Ok(self.pow(self.field.q - 2))
    }

    fn with(&self, value: u64) -> FieldElement {
        FieldElement { value, field: self.field }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

/// P_w(x) = w_0 + w_1 x + ... + w_{k-1} x^{k-1}, low degree first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: PrimeField,
    coefficients: Vec<FieldElement>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<FieldElement>) -> Result<Self> {
        let first = coefficients
            .first()
            .ok_or_else(|| Error::Range("polynomial needs at least one coefficient".into()))?;
        let field = first.field();
        for c in &coefficients {
            field.check(&c.field())?;
        }
        Ok(Self { field, coefficients })
    }

    pub fn from_residues(field: PrimeField, residues: &[u64]) -> Result<Self> {
        let coefficients = residues
            .iter()
            .map(|&r| field.element(r))
            .collect::<Result<Vec<_>>>()?;
        Self::new(coefficients)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coefficients
    }

    /// Number of coefficients (the message length k).
    pub fn len(&self) -> usize {
        self.coefficients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: FieldElement) -> Result<FieldElement> {
        self.field.check(&x.field())?;
        Ok(self.field.element(self.eval_raw(x.value())).expect("reduced"))
    }

    pub(crate) fn eval_raw(&self, x: u64) -> u64 {
        let f = &self.field;
        self.coefficients
            .iter()
            .rev()
            .fold(0, |acc, c| f.add_raw(f.mul_raw(acc, x), c.value()))
    }
}
