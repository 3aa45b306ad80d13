//! Coherent-state form of hash states.
//!
//! A hash state with amplitudes T^{-1/2} e^{iθ_j} maps to the product of
//! coherent states |α e^{iθ_j} / √T⟩ over T optical modes. Each coherent state
//! is stored by its complex amplitude; overlaps use
//! ⟨β|γ⟩ = exp(−|β|²/2 − |γ|²/2 + β̄γ).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bias::BiasSet;
use crate::error::{Error, Result};
use crate::field::FieldElement;
use crate::qstate::{hash_state, QuantumHashState};

#[derive(Debug, Clone, PartialEq)]
pub struct CoherentHashState {
    alpha: Complex64,
    modes: Vec<Complex64>,
}

impl CoherentHashState {
    /// Scales every active amplitude of `state` by α. Works for any phase
    /// state, including composed Reed–Solomon states over nT modes.
    pub fn from_state(state: &QuantumHashState, alpha: Complex64) -> Self {
        Self { alpha, modes: state.active().iter().map(|a| a * alpha).collect() }
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn modes(&self) -> &[Complex64] {
        &self.modes
    }

    /// Mean photon number Σ|β_j|² = |α|².
    pub fn mean_photons(&self) -> f64 {
        self.modes.iter().map(|m| m.norm_sqr()).sum()
    }

    pub fn to_file(&self) -> CoherentFile {
        CoherentFile {
            alpha: [self.alpha.re, self.alpha.im],
            modes: self.modes.iter().map(|m| [m.re, m.im]).collect(),
        }
    }
}

/// `{"alpha": [re, im], "modes": [[re, im]…]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoherentFile {
    pub alpha: [f64; 2],
    pub modes: Vec<[f64; 2]>,
}

pub fn coherent_hash(set: &BiasSet, w: FieldElement, alpha: Complex64) -> Result<CoherentHashState> {
    Ok(CoherentHashState::from_state(&hash_state(set, w)?, alpha))
}

/// ⟨a|b⟩ as the product of per-mode overlaps.
pub fn coherent_overlap(a: &CoherentHashState, b: &CoherentHashState) -> Result<Complex64> {
    if a.modes.len() != b.modes.len() {
        return Err(Error::DimensionMismatch(a.modes.len(), b.modes.len()));
    }
    let exponent: Complex64 = a
        .modes
        .iter()
        .zip(&b.modes)
        .map(|(beta, gamma)| -0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr() + beta.conj() * gamma)
        .sum();
    Ok(exponent.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::PrimeField;
    use crate::qstate::inner_product;

    fn set(q: u64, elems: &[u64]) -> BiasSet {
        BiasSet::new(PrimeField::new(q).unwrap(), elems.iter().copied()).unwrap()
    }

    fn el(q: u64, v: u64) -> FieldElement {
        PrimeField::new(q).unwrap().element(v).unwrap()
    }

    #[test]
    fn coherent_hash_examples() {
        let b = set(5, &[1, 2]);
        let vac = coherent_hash(&b, el(5, 3), Complex64::new(0.0, 0.0)).unwrap();
        assert!(vac.modes().iter().all(|m| m.norm() == 0.0));

        let alpha = Complex64::new(1.5, -0.5);
        let flat = coherent_hash(&b, el(5, 0), alpha).unwrap();
        for m in flat.modes() {
            assert!((m - alpha / 2f64.sqrt()).norm() < 1e-15);
        }

        let s = coherent_hash(&b, el(5, 1), Complex64::new(1.0, 0.0)).unwrap();
        let tau = std::f64::consts::TAU;
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((s.modes()[0] - Complex64::from_polar(h, tau / 5.0)).norm() < 1e-12);
        assert!((s.modes()[1] - Complex64::from_polar(h, 2.0 * tau / 5.0)).norm() < 1e-12);
        assert!((s.mean_photons() - 1.0).abs() < 1e-12);
        assert!(coherent_hash(&b, el(7, 1), alpha).is_err());
    }

    #[test]
    fn mode_magnitudes_are_uniform() {
        let b = set(13, &[1, 3, 9, 10, 12]);
        let alpha = Complex64::new(0.3, 1.1);
        for w in b.field().elements() {
            let s = coherent_hash(&b, w, alpha).unwrap();
            for m in s.modes() {
                assert!((m.norm() - alpha.norm() / 5f64.sqrt()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn overlap_examples() {
        let b = set(5, &[1, 2]);
        let one = Complex64::new(1.0, 0.0);
        let s1 = coherent_hash(&b, el(5, 1), one).unwrap();
        let s2 = coherent_hash(&b, el(5, 2), one).unwrap();
        assert!((coherent_overlap(&s1, &s1).unwrap() - one).norm() < 1e-12);

        let zero = Complex64::new(0.0, 0.0);
        let v1 = coherent_hash(&b, el(5, 1), zero).unwrap();
        let v2 = coherent_hash(&b, el(5, 4), zero).unwrap();
        assert_eq!(coherent_overlap(&v1, &v2).unwrap(), one);

        // per-mode oracle: Π_j exp(−|β_j|²/2 − |γ_j|²/2 + β̄_j γ_j)
        let oracle: Complex64 = s1
            .modes()
            .iter()
            .zip(s2.modes())
            .map(|(x, y)| (-0.5 * x.norm_sqr() - 0.5 * y.norm_sqr() + x.conj() * y).exp())
            .product();
        let got = coherent_overlap(&s1, &s2).unwrap();
        assert!((got - oracle).norm() < 1e-12);
        assert!((got.norm() - (-1.25f64).exp()).abs() < 1e-12);

        let other = coherent_hash(&set(5, &[1, 2, 3]), el(5, 1), one).unwrap();
        assert!(matches!(coherent_overlap(&s1, &other), Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn overlap_tracks_single_photon_inner_product() {
        let b = set(11, &[0, 2, 3, 7]);
        for alpha in [0.5, 1.0, 2.0] {
            let a = Complex64::new(alpha, 0.0);
            for w in b.field().elements() {
                for w2 in b.field().elements() {
                    let ov = coherent_overlap(&coherent_hash(&b, w, a).unwrap(), &coherent_hash(&b, w2, a).unwrap()).unwrap();
                    let ip = inner_product(&hash_state(&b, w).unwrap(), &hash_state(&b, w2).unwrap()).unwrap();
                    assert!((ov.norm() - (-alpha * alpha * (1.0 - ip.re)).exp()).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn overlap_shrinks_with_amplitude() {
        let b = set(7, &[1, 2, 4]);
        let mut last = 1.0;
        for step in 1..40 {
            let a = Complex64::new(0.1 * step as f64, 0.0);
            let ov = coherent_overlap(&coherent_hash(&b, el(7, 1), a).unwrap(), &coherent_hash(&b, el(7, 3), a).unwrap())
                .unwrap()
                .norm();
            assert!(ov < last);
            last = ov;
        }
    }

    #[test]
    fn composed_states_map_over_all_modes() {
        use crate::generator::{ClassicalFamily, ComposedGenerator, LinearFamily, RSFamily};
        let f = PrimeField::new(5).unwrap();
        let g = ComposedGenerator::new(
            LinearFamily::new(set(5, &[1, 2])),
            RSFamily::with_default_points(f, 2, 4).unwrap(),
        )
        .unwrap();
        let w = [f.element(1).unwrap(), f.element(2).unwrap()];
        let c = CoherentHashState::from_state(&g.hash_state(&w).unwrap(), Complex64::new(2.0, 0.0));
        assert_eq!(c.modes().len(), 8);
        assert!((c.mean_photons() - 4.0).abs() < 1e-12);
    }
}
