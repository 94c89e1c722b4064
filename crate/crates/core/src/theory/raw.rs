//! Prefactor forms in terms of the raw functional `Ē[g] = ∫ f(θ0)·g(θ0) dθ0`,
//! with explicit `(2π)^{d−1}` powers and double factorials.
//!
//! These overflow in the density for large `d` and exist as an independent
//! cross-check of the stabilized evaluators at small `d`.

use super::TheoryTolerances;
use crate::code::CodeParams;
use crate::distributions::{ebar_with, IsotropicDensity};
use crate::error::{Error, Result};
use crate::numerics::{double_factorial, sum_series_with, LogScaled, SeriesOptions};
use crate::scalar::Real;

fn check_dims<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams) -> Result<()> {
    if density.d() != code.d() {
        return Err(Error::DimensionMismatch { expected: code.d(), got: density.d() });
    }
    Ok(())
}

/// `(2π)^{d−1} / k!!`
fn two_pi_over_df<T: Real>(d: usize, k: i64) -> Result<LogScaled<T>> {
    Ok(LogScaled::from_value(T::TAU()).powi(d as i32 - 1) / double_factorial::<T>(k)?)
}

fn eb<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G, tol: &TheoryTolerances<T>) -> Result<T> {
    ebar_with(density, g, tol.quad_rel_tol)
}

pub fn variance_disturbed<T: Real>(density: &IsotropicDensity<T>, tol: &TheoryTolerances<T>) -> Result<T> {
    let d = density.d();
    let pref = two_pi_over_df::<T>(d, 2 * d as i64 - 3)?.scale(T::lit(4.0)).value();
    let power = 2 * d as i32 - 2;
    Ok(T::lit(2.0) - pref * eb(density, |t: T| t.cos() * t.sin().powi(power), tol)?)
}

pub fn second_moments<T: Real>(density: &IsotropicDensity<T>, tol: &TheoryTolerances<T>) -> Result<super::SecondMoments<T>> {
    let d = density.d();
    let di = d as i64;
    let a = two_pi_over_df::<T>(d, 2 * di - 3)?.scale(T::lit(2.0)).value();
    let b = two_pi_over_df::<T>(d, 2 * di - 1)?.scale(T::lit(2.0)).value();
    let power = 2 * d as i32 - 2;
    let cos2 = eb(density, |t: T| t.cos().powi(2) * t.sin().powi(power), tol)?;
    let sin2d = eb(density, |t: T| t.sin().powi(power + 2), tol)?;
    Ok(super::SecondMoments {
        ex0sq: a * cos2,
        exjsq: b * sin2d,
        ealpha0sq: a * (cos2 + sin2d / T::from_count(2 * d - 1)),
        ealphaksq: T::lit(2.0) * b * sin2d,
    })
}

/// `E[P_0]` by both the direct and the complementary form, and `E[P_s]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RawSyndromeExpectations<T> {
    pub e_p0_direct: T,
    pub e_p0_complement: T,
    pub e_ps: T,
}

pub fn syndrome_prob_expectations<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<RawSyndromeExpectations<T>> {
    check_dims(density, code)?;
    let (d, dl) = (code.d(), code.d_logical());
    let di = d as i64;
    let a = two_pi_over_df::<T>(d, 2 * di - 3)?.scale(T::lit(2.0)).value();
    let b = two_pi_over_df::<T>(d, 2 * di - 1)?.scale(T::lit(4.0)).value();
    let power = 2 * d as i32 - 2;
    let cos2 = eb(density, |t: T| t.cos().powi(2) * t.sin().powi(power), tol)?;
    let sin2d = eb(density, |t: T| t.sin().powi(power + 2), tol)?;
    let frac = T::from_count(2 * dl - 1) / T::from_count(2 * d - 1);
    Ok(RawSyndromeExpectations {
        e_p0_direct: a * (cos2 + frac * sin2d),
        e_p0_complement: T::one() - b * T::from_count(d - dl) * sin2d,
        e_ps: b * T::from_count(dl) * sin2d,
    })
}

/// `(2k−3)!!·(2d−2d′+2k−2)!! / ((2k)!!·(2d+2k−3)!!)`
pub fn correction_coefficient<T: Real>(d: i64, d_logical: i64, k: i64) -> Result<T> {
    let num = double_factorial::<T>(2 * k - 3)? * double_factorial::<T>(2 * d - 2 * d_logical + 2 * k - 2)?;
    let den = double_factorial::<T>(2 * k)? * double_factorial::<T>(2 * d + 2 * k - 3)?;
    Ok((num / den).value())
}

/// `4(2π)^{d−1}/(2d−2d′−2)!! · Σ_k c_k·Ē[cos θ0 sin^{2d+2k−2} θ0]`, the gap `V(Φ̃) − V(Ψ)`.
pub fn correction_series<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    tol: &TheoryTolerances<T>,
) -> Result<T> {
    check_dims(density, code)?;
    if code.d() == code.d_logical() {
        return Ok(T::zero());
    }
    let (d, dl) = (code.d() as i64, code.d_logical() as i64);
    let pref = two_pi_over_df::<T>(code.d(), 2 * d - 2 * dl - 2)?.scale(T::lit(4.0)).value();
    let opts = SeriesOptions::new(tol.series_rel_tol, tol.k_max).with_abs_tol(tol.series_abs_tol() / pref);
    let sum = sum_series_with(
        |k| {
            let k = k as i64;
            let power = (2 * d + 2 * k - 2) as i32;
            Ok(correction_coefficient::<T>(d, dl, k)? * eb(density, |t: T| t.cos() * t.sin().powi(power), tol)?)
        },
        &opts,
    )?;
    Ok(pref * sum.value)
}

pub fn variance_corrected<T: Real>(density: &IsotropicDensity<T>, code: &CodeParams, tol: &TheoryTolerances<T>) -> Result<T> {
    Ok(variance_disturbed(density, tol)? + correction_series(density, code, tol)?)
}
