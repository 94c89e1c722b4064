//! Closed-form evaluation of the variance, moment and syndrome results.
//!
//! Every quantity is written in terms of marginal moments
//! `M[g] = E[g(θ0)]` under the polar-angle marginal, which are O(1) for any
//! dimension. The prefactor forms with `(2π)^{d−1}` and double factorials are
//! kept in [`raw`] and checked against these at small `d`.
//!
//! With `R_k` the double-factorial ratio
//! `(2d−3)!!(2d−2d′+2k−2)!!(2k−3)!! / ((2d−2d′−2)!!(2k)!!(2d+2k−3)!!)`,
//! the corrected-state variance is
//! `V(Φ̃) = 2 − 2·M[cos θ0] + 2·Σ_{k≥1} R_k·M[cos θ0 sin^{2k} θ0]`.

pub mod raw;

use crate::code::CodeParams;
use crate::distributions::{marginal_moment_with, IsotropicDensity};
use crate::error::{domain, Error, Result};
use crate::numerics::{sum_series_with, LogScaled, SeriesOptions};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryTolerances<T> {
    /// Relative tolerance of each marginal-moment quadrature.
    pub quad_rel_tol: T,
    /// Relative stopping tolerance of the correction series.
    pub series_rel_tol: T,
    pub k_max: usize,
}

impl<T: Real> Default for TheoryTolerances<T> {
    fn default() -> Self {
        Self { quad_rel_tol: T::lit(1e-12), series_rel_tol: T::lit(1e-10), k_max: 20_000 }
    }
}

impl<T: Real> TheoryTolerances<T> {
    pub fn with_series_rel_tol(mut self, tol: T) -> Self {
        self.series_rel_tol = tol;
        self
    }

    fn series_abs_tol(&self) -> T {
        self.series_rel_tol * T::lit(1e-3)
    }
}

fn check_dims<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams) -> Result<()> {
    if density.d() != code.d() {
        return Err(Error::DimensionMismatch { expected: code.d(), got: density.d() });
    }
    Ok(())
}

fn moment<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G, tol: &TheoryTolerances<T>) -> Result<T> {
    marginal_moment_with(density, g, tol.quad_rel_tol)
}

/// `V(Ψ) = 2 − 2·E[cos θ0]`.
pub fn variance_disturbed<T: Real>(density: &IsotropicDensity<T>) -> Result<T> {
    variance_disturbed_with(density, &TheoryTolerances::default())
}

pub fn variance_disturbed_with<T: Real>(density: &IsotropicDensity<T>, tol: &TheoryTolerances<T>) -> Result<T> {
    Ok(T::lit(2.0) - T::lit(2.0) * moment(density, |t: T| t.cos(), tol)?)
}

/// Closed-form variance of the normal family, `2(1 − σ)`, independent of `d`.
pub fn variance_normal<T: Real>(sigma: T) -> Result<T> {
    if !(sigma >= T::zero() && sigma < T::one()) {
        return domain(format!("sigma must lie in [0, 1), got {sigma}"));
    }
    Ok(T::lit(2.0) * (T::one() - sigma))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SecondMoments<T> {
    /// `E[x0²]`
    pub ex0sq: T,
    /// `E[x_j²]` for any `j > 0`
    pub exjsq: T,
    /// `E[|α0|²]`
    pub ealpha0sq: T,
    /// `E[|α_k|²]` for any `k > 0`
    pub ealphaksq: T,
}

pub fn second_moments<T: Real>(density: &IsotropicDensity<T>) -> Result<SecondMoments<T>> {
    second_moments_with(density, &TheoryTolerances::default())
}

pub fn second_moments_with<T: Real>(density: &IsotropicDensity<T>, tol: &TheoryTolerances<T>) -> Result<SecondMoments<T>> {
    let ex0sq = moment(density, |t: T| t.cos().powi(2), tol)?;
    let sin2 = moment(density, |t: T| t.sin().powi(2), tol)?;
    let exjsq = sin2 / T::from_count(2 * density.d() - 1);
    Ok(SecondMoments { ex0sq, exjsq, ealpha0sq: ex0sq + exjsq, ealphaksq: T::lit(2.0) * exjsq })
}

/// `F = √E[|α0|²]`.
pub fn fidelity_isotropic<T: Real>(density: &IsotropicDensity<T>) -> Result<T> {
    Ok(second_moments(density)?.ealpha0sq.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeExpectations<T> {
    /// `E[P_0]`
    pub e_p0: T,
    /// `E[P_s]`, identical for every `s > 0`
    pub e_ps: T,
}

pub fn syndrome_prob_expectations<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams) -> Result<SyndromeExpectations<T>> {
    syndrome_prob_expectations_with(density, code, &TheoryTolerances::default())
}

pub fn syndrome_prob_expectations_with<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<SyndromeExpectations<T>> {
    check_dims(density, code)?;
    let sin2 = moment(density, |t: T| t.sin().powi(2), tol)?;
    let two_d_minus_1 = T::from_count(2 * code.d() - 1);
    let e_p0 = T::one() - T::lit(2.0) * T::from_count(code.d() - code.d_logical()) * sin2 / two_d_minus_1;
    let e_ps = T::lit(2.0) * T::from_count(code.d_logical()) * sin2 / two_d_minus_1;
    debug_assert!(
        (e_p0 + T::from_count(code.syndromes() - 1) * e_ps - T::one()).abs() <= T::lit(1e-10),
        "syndrome expectations must sum to one"
    );
    Ok(SyndromeExpectations { e_p0, e_ps })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchExpectations<T> {
    /// `E[1 − P_0]`
    pub e1: T,
    /// `E[1 − P_0 − P_1]`
    pub e2: T,
    /// Odd cross term, identically zero.
    pub e3: T,
    /// `E[cos θ0 · √P_0]`
    pub e4: T,
}

pub fn branch_expectations<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams) -> Result<BranchExpectations<T>> {
    branch_expectations_with(density, code, &TheoryTolerances::default())
}

pub fn branch_expectations_with<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<BranchExpectations<T>> {
    check_dims(density, code)?;
    let (d, dl) = (code.d() as f64, code.d_logical() as f64);
    let sin2 = moment(density, |t: T| t.sin().powi(2), tol)?;
    let scale = T::lit(2.0) * sin2 / T::lit(2.0 * d - 1.0);
    let series = correction_series(density, code, tol)?;
    let cos1 = moment(density, |t: T| t.cos(), tol)?;
    Ok(BranchExpectations {
        e1: scale * T::lit(d - dl),
        e2: scale * T::lit(d - 2.0 * dl),
        e3: T::zero(),
        e4: cos1 - T::lit(0.5) * series.value,
    })
}

/// Ratios `R_1, R_2, …` by the recurrence
/// `R_{k+1} = R_k·(2k−1)(2d−2d′+2k) / ((2k+2)(2d+2k−1))`, `R_1 = (d−d′)/(2d−1)`.
#[derive(Clone, Copy, Debug)]
pub struct CorrectionRatios<T> {
    d: f64,
    d_logical: f64,
    k: usize,
    current: LogScaled<T>,
}

impl<T: Real> CorrectionRatios<T> {
    pub fn new(code: &CodeParams) -> Self {
        let d = code.d() as f64;
        let dl = code.d_logical() as f64;
        Self { d, d_logical: dl, k: 0, current: LogScaled::from_value(T::lit((d - dl) / (2.0 * d - 1.0))) }
    }
}

impl<T: Real> Iterator for CorrectionRatios<T> {
    type Item = T;
    fn next(&mut self) -> Option<T> {
        if self.k > 0 {
            let k = self.k as f64;
            let num = (2.0 * k - 1.0) * (2.0 * self.d - 2.0 * self.d_logical + 2.0 * k);
            let den = (2.0 * k + 2.0) * (2.0 * self.d + 2.0 * k - 1.0);
            self.current = self.current * LogScaled::from_value(T::lit(num)) / LogScaled::from_value(T::lit(den));
        }
        self.k += 1;
        Some(self.current.value())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CorrectionSeries<T> {
    /// `2·Σ_k R_k·M[cos θ0 sin^{2k} θ0]`, which is `V(Φ̃) − V(Ψ)`.
    pub value: T,
    pub terms_used: usize,
}

pub fn correction_series<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<CorrectionSeries<T>> {
    check_dims(density, code)?;
    let mut ratios = CorrectionRatios::<T>::new(code);
    let opts = SeriesOptions::new(tol.series_rel_tol, tol.k_max).with_abs_tol(tol.series_abs_tol());
    let sum = sum_series_with(
        |k| {
            let r = ratios.next().expect("infinite iterator");
            if r == T::zero() {
                return Ok(T::zero());
            }
            let two_k = 2 * k as i32;
            Ok(r * moment(density, |t: T| t.cos() * t.sin().powi(two_k), tol)?)
        },
        &opts,
    )?;
    Ok(CorrectionSeries { value: T::lit(2.0) * sum.value, terms_used: sum.terms_used })
}

/// `V(Φ̃)` at the default tolerances, with the series stopping at `rel_tol`.
pub fn variance_corrected<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams, rel_tol: T) -> Result<T> {
    let tol = TheoryTolerances::default().with_series_rel_tol(rel_tol);
    Ok(variance_disturbed_with(density, &tol)? + correction_series(density, code, &tol)?.value)
}

/// `V(Φ̃) − V(Ψ)` straight from the series, not as a difference.
pub fn variance_gap<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams) -> Result<T> {
    Ok(correction_series(density, code, &TheoryTolerances::default())?.value)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TheoryReport<T> {
    pub v_disturbed: T,
    pub v_corrected: T,
    pub gap: T,
    pub series_terms_used: usize,
    pub e_p0: T,
    pub e_ps: T,
    pub tolerances: TheoryTolerances<T>,
}

pub fn theory_report<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<TheoryReport<T>> {
    let v_disturbed = variance_disturbed_with(density, tol)?;
    let series = correction_series(density, code, tol)?;
    let probs = syndrome_prob_expectations_with(density, code, tol)?;
    Ok(TheoryReport {
        v_disturbed,
        v_corrected: v_disturbed + series.value,
        gap: series.value,
        series_terms_used: series.terms_used,
        e_p0: probs.e_p0,
        e_ps: probs.e_ps,
        tolerances: *tol,
    })
}
