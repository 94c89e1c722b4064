//! Abstract `[n, m]` code in the aligned basis.
//!
//! The code space is spanned by `|0⟩ … |d′−1⟩` and the discrete error `E_s`
//! shifts basis indices by `s·d′`, so syndrome block `S_s` covers amplitudes
//! `s·d′ … s·d′ + d′ − 1`. Measurement projects onto the blocks and recovery
//! relabels the measured block back onto the code space.

use rand::Rng;

use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::state::StateVector;

/// Largest supported number of physical qubits.
pub const MAX_QUBITS: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeParams {
    n: u32,
    m: u32,
}

impl CodeParams {
    /// An `[n, m]` code with `1 ≤ m < n`.
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if !(2..=MAX_QUBITS).contains(&n) {
            return domain(format!("n must lie in [2, {MAX_QUBITS}], got {n}"));
        }
        if m < 1 || m >= n {
            return domain(format!("m must satisfy 1 <= m < n, got n = {n}, m = {m}"));
        }
        Ok(Self { n, m })
    }

    /// The no-op "code" with `m = n`: a single syndrome block covering the
    /// whole space. Only meaningful as a test fixture.
    #[doc(hidden)]
    pub fn whole_space(n: u32) -> Self {
        Self { n, m: n }
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// `d = 2^n` physical amplitudes.
    pub fn d(&self) -> usize {
        1 << self.n
    }

    /// `d′ = 2^m` logical amplitudes.
    pub fn d_logical(&self) -> usize {
        1 << self.m
    }

    /// `d″ = 2^{n−m}` syndromes.
    pub fn syndromes(&self) -> usize {
        1 << (self.n - self.m)
    }

    /// Real-coordinate range of block `S_s`.
    pub fn block(&self, s: usize) -> std::ops::Range<usize> {
        let w = 2 * self.d_logical();
        s * w..(s + 1) * w
    }

    fn check_state<T: Real>(&self, psi: &StateVector<T>) -> Result<()> {
        if psi.d() != self.d() {
            return Err(Error::DimensionMismatch { expected: self.d(), got: psi.d() });
        }
        Ok(())
    }
}

/// One measurement branch: syndrome, its probability and the recovered state.
#[derive(Clone, Debug, PartialEq)]
pub struct CorrectionOutcome<T> {
    pub syndrome: usize,
    pub probability: T,
    /// `None` exactly when the branch has probability zero.
    pub corrected: Option<StateVector<T>>,
}

impl<T: Real> CorrectionOutcome<T> {
    pub fn is_empty(&self) -> bool {
        self.corrected.is_none()
    }

    /// `P_s·‖Φ − Φ̃_s‖²`, zero for empty branches.
    pub fn weighted_deviation_sq(&self) -> T {
        match &self.corrected {
            Some(c) => self.probability * c.deviation_sq(),
            None => T::zero(),
        }
    }
}

/// Born-rule probabilities `P_s` of each syndrome block.
pub fn syndrome_probabilities<T: Real>(psi: &StateVector<T>, code: &CodeParams) -> Result<Vec<T>> {
    code.check_state(psi)?;
    let x = psi.coords();
    Ok((0..code.syndromes()).map(|s| x[code.block(s)].iter().map(|&v| v * v).sum()).collect())
}

fn branch<T: Real>(psi: &StateVector<T>, code: &CodeParams, s: usize, probability: T) -> CorrectionOutcome<T> {
    let slice = &psi.coords()[code.block(s)];
    let corrected = if probability > T::zero() {
        // The block is copied to positions 0..2d′, which is the action of E_s^{-1}.
        StateVector::normalized(slice.to_vec()).ok()
    } else {
        None
    };
    CorrectionOutcome { syndrome: s, probability, corrected }
}

/// Project onto every block and undo its discrete error.
pub fn correct_all_branches<T: Real>(psi: &StateVector<T>, code: &CodeParams) -> Result<Vec<CorrectionOutcome<T>>> {
    let probs = syndrome_probabilities(psi, code)?;
    Ok(probs.into_iter().enumerate().map(|(s, p)| branch(psi, code, s, p)).collect())
}

/// The branch for a given syndrome.
pub fn correct_branch<T: Real>(psi: &StateVector<T>, code: &CodeParams, s: usize) -> Result<CorrectionOutcome<T>> {
    code.check_state(psi)?;
    if s >= code.syndromes() {
        return domain(format!("syndrome {s} out of range for {} blocks", code.syndromes()));
    }
    let p = psi.coords()[code.block(s)].iter().map(|&v| v * v).sum();
    Ok(branch(psi, code, s, p))
}

/// Draw a syndrome index from `probs` with a uniform variate `u ∈ [0, 1)`.
pub(crate) fn pick_syndrome<T: Real>(probs: &[T], u: T) -> usize {
    let total: T = probs.iter().copied().sum();
    let target = u * total;
    let mut acc = T::zero();
    let mut last_positive = 0;
    for (s, &p) in probs.iter().enumerate() {
        if p > T::zero() {
            last_positive = s;
            acc = acc + p;
            if target < acc {
                return s;
            }
        }
    }
    last_positive
}

/// Measure against the block decomposition, then recover.
pub fn measure_and_correct<T, R>(psi: &StateVector<T>, code: &CodeParams, rng: &mut R) -> Result<CorrectionOutcome<T>>
where
    T: Real,
    R: Rng + ?Sized,
{
    let probs = syndrome_probabilities(psi, code)?;
    let u = T::lit(rng.random::<f64>());
    let s = pick_syndrome(&probs, u);
    Ok(branch(psi, code, s, probs[s]))
}

/// Place a logical state into block `S_s` of the physical space.
pub fn embed_logical<T: Real>(logical: &StateVector<T>, s: usize, code: &CodeParams) -> Result<StateVector<T>> {
    if logical.d() != code.d_logical() {
        return Err(Error::DimensionMismatch { expected: code.d_logical(), got: logical.d() });
    }
    if s >= code.syndromes() {
        return domain(format!("syndrome {s} out of range for {} blocks", code.syndromes()));
    }
    let mut coords = vec![T::zero(); 2 * code.d()];
    coords[code.block(s)].copy_from_slice(logical.coords());
    Ok(StateVector::from_coords_unchecked(coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn parameters() {
        let c = CodeParams::new(3, 1).unwrap();
        assert_eq!((c.d(), c.d_logical(), c.syndromes()), (8, 2, 4));
        assert_eq!(c.block(2), 8..12);
        assert!(CodeParams::new(2, 2).is_err());
        assert!(CodeParams::new(2, 0).is_err());
        assert!(CodeParams::new(1, 1).is_err());
    }

    #[test]
    fn probabilities_of_basis_states() {
        let c = CodeParams::new(3, 1).unwrap();
        let p = syndrome_probabilities(&StateVector::<f64>::reference(8).unwrap(), &c).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0, 0.0]);
        let p = syndrome_probabilities(&StateVector::<f64>::basis(8, 2).unwrap(), &c).unwrap();
        assert_eq!(p, vec![0.0, 1.0, 0.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut x = vec![0.0; 16];
        x[0] = h;
        x[4] = h;
        let p = syndrome_probabilities(&StateVector::new(x).unwrap(), &c).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dimension_mismatch() {
        let c = CodeParams::new(3, 1).unwrap();
        let psi = StateVector::<f64>::reference(4).unwrap();
        assert_eq!(
            syndrome_probabilities(&psi, &c).unwrap_err(),
            Error::DimensionMismatch { expected: 8, got: 4 }
        );
    }

    #[test]
    fn discrete_error_is_fixed_exactly() {
        let c = CodeParams::new(3, 1).unwrap();
        for s in 0..c.syndromes() {
            let psi = StateVector::<f64>::basis(8, s * c.d_logical()).unwrap();
            let out = correct_all_branches(&psi, &c).unwrap();
            assert_eq!(out[s].probability, 1.0);
            assert_eq!(out[s].corrected.as_ref().unwrap(), &StateVector::reference(2).unwrap());
            assert!(out.iter().filter(|o| o.syndrome != s).all(|o| o.is_empty()));
        }
    }

    #[test]
    fn error_inside_code_space_is_untouched() {
        let c = CodeParams::new(2, 1).unwrap();
        let g: f64 = 0.3;
        let psi = StateVector::from_amplitudes(&[(g.cos(), 0.0), (g.sin(), 0.0), (0.0, 0.0), (0.0, 0.0)]).unwrap();
        let out = correct_all_branches(&psi, &c).unwrap();
        assert!(out[1].is_empty());
        let fixed = out[0].corrected.as_ref().unwrap();
        for (a, b) in fixed.coords().iter().zip(&psi.coords()[..4]) {
            assert!((a - b).abs() < 1e-15);
        }
        assert!((fixed.deviation_sq() - (2.0 - 2.0 * g.cos())).abs() < 1e-15);
    }

    #[test]
    fn measurement_of_code_state() {
        let c = CodeParams::new(2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let phi = StateVector::<f64>::reference(4).unwrap();
        for _ in 0..100 {
            let o = measure_and_correct(&phi, &c, &mut rng).unwrap();
            assert_eq!(o.syndrome, 0);
            assert_eq!(o.corrected.unwrap(), StateVector::reference(2).unwrap());
        }
    }

    #[test]
    fn measured_branch_matches_enumerated_branch() {
        let c = CodeParams::new(3, 1).unwrap();
        let psi = StateVector::<f64>::normalized((0..16).map(|i| (i as f64 * 0.7).sin()).collect()).unwrap();
        let all = correct_all_branches(&psi, &c).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..50 {
            let o = measure_and_correct(&psi, &c, &mut rng).unwrap();
            assert_eq!(o, all[o.syndrome]);
            assert_eq!(o, correct_branch(&psi, &c, o.syndrome).unwrap());
        }
    }

    #[test]
    fn embed_examples() {
        let c = CodeParams::new(3, 1).unwrap();
        let zero = StateVector::<f64>::reference(2).unwrap();
        assert_eq!(embed_logical(&zero, 0, &c).unwrap(), StateVector::reference(8).unwrap());
        assert_eq!(embed_logical(&zero, 2, &c).unwrap(), StateVector::basis(8, 4).unwrap());
        assert!(embed_logical(&zero, 4, &c).is_err());
        assert!(embed_logical(&StateVector::<f64>::reference(4).unwrap(), 0, &c).is_err());
    }

    #[test]
    fn pick_skips_zero_branches() {
        assert_eq!(pick_syndrome(&[0.0f64, 1.0, 0.0], 0.999_999), 1);
        assert_eq!(pick_syndrome(&[0.5f64, 0.0, 0.5], 0.5), 2);
        assert_eq!(pick_syndrome(&[0.5f64, 0.0, 0.5], 0.0), 0);
    }
}
