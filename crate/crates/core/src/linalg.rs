//! Dense Hermitian eigendecomposition by cyclic Jacobi rotations.
//!
//! Each rotation first rephases column q so the pivot a_pq becomes real, then
//! applies a real plane rotation that annihilates it. Sweeps visit every
//! (p, q) pair with p < q and stop once the off-diagonal Frobenius norm drops
//! below the tolerance.

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
pub const MAX_DIMENSION: usize = 256;
const MAX_SWEEPS: usize = 100;

/// Row-major square complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![Complex64::new(0.0, 0.0); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::DimensionMismatch(data.len(), n * n));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Adds weight · |v⟩⟨v|.
    pub fn add_outer(&mut self, weight: f64, v: &[Complex64]) {
        for (row, &vi) in self.data.chunks_exact_mut(self.n).zip(v) {
            let vi = vi * weight;
            for (cell, vj) in row.iter_mut().zip(v) {
                *cell += vi * vj.conj();
            }
        }
    }

    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        (0..self.n)
            .map(|i| self.data[i * self.n..(i + 1) * self.n].iter().zip(v).map(|(a, x)| a * x).sum())
            .collect()
    }

    fn off_diagonal_norm(&self) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                if i != j {
                    acc += self.data[i * self.n + j].norm_sqr();
                }
            }
        }
        acc.sqrt()
    }
}

impl std::ops::Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Eigenvalues (ascending) with eigenvectors stored as the columns of
/// `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, m: usize) -> Vec<Complex64> {
        (0..self.vectors.n).map(|i| self.vectors[(i, m)]).collect()
    }

    /// Σ_m g(λ_m) |v_m⟩⟨v_m|.
    pub fn spectral_map(&self, g: impl Fn(f64) -> f64) -> CMatrix {
        let n = self.vectors.n;
        let mut out = CMatrix::zeros(n);
        for (m, &lambda) in self.values.iter().enumerate() {
            let weight = g(lambda);
            if weight != 0.0 {
                out.add_outer(weight, &self.vector(m));
            }
        }
        out
    }
}

pub fn hermitian_eigen(matrix: &CMatrix) -> Result<HermitianEigen> {
    let n = matrix.n;
    if n > MAX_DIMENSION {
        return Err(Error::Range(format!("dimension {n} exceeds the eigensolver cap of {MAX_DIMENSION}")));
    }
    let mut a = matrix.clone();
    let mut v = CMatrix::identity(n);
    let mut converged = a.off_diagonal_norm() < OFF_DIAGONAL_TOLERANCE;
    let mut sweeps = 0;
    while !converged {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence(MAX_SWEEPS));
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = a.off_diagonal_norm() < OFF_DIAGONAL_TOLERANCE;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMatrix::zeros(n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let n = a.n;
    let apq = a[(p, q)];
    let b = apq.norm();
    if b < f64::MIN_POSITIVE {
        return;
    }
    // conj(phase) rephases column q so that the pivot becomes real
    let phase = apq / b;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (aqq - app) / (2.0 * b);
    let t = if tau >= 0.0 { 1.0 / (tau + (1.0 + tau * tau).sqrt()) } else { -1.0 / (-tau + (1.0 + tau * tau).sqrt()) };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    // columns: A ← A G with G = D R, D = diag(1, conj(phase)) on (p, q)
    for k in 0..n {
        let x = a[(k, p)];
        let y = a[(k, q)] * phase.conj();
        a[(k, p)] = x * c - y * s;
        a[(k, q)] = x * s + y * c;
    }
    // rows: A ← G† A
    for k in 0..n {
        let x = a[(p, k)];
        let y = a[(q, k)] * phase;
        a[(p, k)] = x * c - y * s;
        a[(q, k)] = x * s + y * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;

    for k in 0..n {
        let x = v[(k, p)];
        let y = v[(k, q)] * phase.conj();
        v[(k, p)] = x * c - y * s;
        v[(k, q)] = x * s + y * c;
    }
}
