//! Double factorials and the closed-form definite integrals built from them.

use crate::error::{domain, Result};
use crate::numerics::logscaled::LogScaled;
use crate::scalar::Real;

/// `k!!` as an exact integer, with `(-1)!! = 0!! = 1`.
///
/// Returns `None` when `k < -1` or the value does not fit in a `u128`.
pub fn double_factorial_exact(k: i64) -> Option<u128> {
    if k < -1 {
        return None;
    }
    let mut acc: u128 = 1;
    let mut j = k;
    while j > 1 {
        acc = acc.checked_mul(j as u128)?;
        j -= 2;
    }
    Some(acc)
}

/// `k!!` for any `k >= -1`, exact through the integer path while it fits and
/// carried in [`LogScaled`] beyond.
pub fn double_factorial<T: Real>(k: i64) -> Result<LogScaled<T>> {
    if k < -1 {
        return domain(format!("double factorial undefined for k = {k}"));
    }
    // Peel factors from the top until the remaining product fits in u128.
    let mut top = LogScaled::one();
    let mut j = k;
    loop {
        if let Some(exact) = double_factorial_exact(j) {
            return Ok(top * LogScaled::from_u128(exact));
        }
        top = top * LogScaled::from_value(T::lit(j as f64));
        j -= 2;
    }
}

/// Ratio `a!! / b!!` evaluated without forming either factor.
pub fn double_factorial_ratio<T: Real>(a: i64, b: i64) -> Result<T> {
    Ok((double_factorial::<T>(a)? / double_factorial::<T>(b)?).value())
}

/// `∫_0^π sin^k θ dθ`.
pub fn wallis_integral<T: Real>(k: u32) -> T {
    let k = i64::from(k);
    let ratio = double_factorial_ratio::<T>(k - 1, k).expect("k >= 0");
    if k % 2 == 1 {
        T::lit(2.0) * ratio
    } else {
        T::PI() * ratio
    }
}

/// `∫_0^{π/2} cos^a θ sin^b θ dθ`.
pub fn cos_sin_halfpi_integral<T: Real>(a: u32, b: u32) -> T {
    let (a, b) = (i64::from(a), i64::from(b));
    let num = double_factorial::<T>(a - 1).expect("a >= 0") * double_factorial::<T>(b - 1).expect("b >= 0");
    let r = (num / double_factorial::<T>(a + b).expect("a + b >= 0")).value();
    if a % 2 == 0 && b % 2 == 0 {
        T::FRAC_PI_2() * r
    } else {
        r
    }
}

/// The four Poisson-kernel integrals over `[0, π]` with weight
/// `(1 + σ² − 2σ cos θ)^{-d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum KernelKind {
    /// `sin^{2d-2} θ`
    Plain,
    /// `cos θ sin^{2d-2} θ`
    Cos,
    /// `sin^{2d} θ`
    Sin2d,
    /// `cos² θ sin^{2d-2} θ`
    Cos2,
}

impl KernelKind {
    pub const ALL: [KernelKind; 4] = [KernelKind::Plain, KernelKind::Cos, KernelKind::Sin2d, KernelKind::Cos2];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::Plain => "plain",
            KernelKind::Cos => "cos",
            KernelKind::Sin2d => "sin2d",
            KernelKind::Cos2 => "cos2",
        }
    }

    /// Smallest `d` for which the closed form holds.
    pub fn min_d(self) -> u32 {
        match self {
            KernelKind::Sin2d => 0,
            _ => 1,
        }
    }
}

fn check_sigma<T: Real>(sigma: T) -> Result<()> {
    if !(sigma >= T::zero() && sigma < T::one()) {
        return domain(format!("sigma must lie in [0, 1), got {sigma}"));
    }
    Ok(())
}

/// Closed form of the kernel integral selected by `kind`.
pub fn kernel_integral<T: Real>(kind: KernelKind, d: u32, sigma: T) -> Result<T> {
    check_sigma(sigma)?;
    if d < kind.min_d() {
        return domain(format!("{} kernel integral needs d >= {}, got {d}", kind.name(), kind.min_d()));
    }
    let d = i64::from(d);
    let one_minus_s2 = T::one() - sigma * sigma;
    let pi = T::PI();
    Ok(match kind {
        KernelKind::Plain => double_factorial_ratio::<T>(2 * d - 3, 2 * d - 2)? * pi / one_minus_s2,
        KernelKind::Cos => double_factorial_ratio::<T>(2 * d - 3, 2 * d - 2)? * sigma * pi / one_minus_s2,
        KernelKind::Sin2d => double_factorial_ratio::<T>(2 * d - 1, 2 * d)? * pi,
        KernelKind::Cos2 => {
            let s2 = sigma * sigma;
            pi * double_factorial_ratio::<T>(2 * d - 3, 2 * d)? * (T::one() + T::lit((2 * d - 1) as f64) * s2)
                / one_minus_s2
        }
    })
}

/// The integrand whose integral over `[0, π]` [`kernel_integral`] evaluates.
pub fn kernel_integrand<T: Real>(kind: KernelKind, d: u32, sigma: T, theta: T) -> T {
    let (s, c) = theta.sin_cos();
    let base = T::one() + sigma * sigma - T::lit(2.0) * sigma * c;
    let weight = base.powi(-(d as i32));
    let sin_pow = |p: i32| s.powi(p);
    let d = d as i32;
    match kind {
        KernelKind::Plain => sin_pow(2 * d - 2) * weight,
        KernelKind::Cos => c * sin_pow(2 * d - 2) * weight,
        KernelKind::Sin2d => sin_pow(2 * d) * weight,
        KernelKind::Cos2 => c * c * sin_pow(2 * d - 2) * weight,
    }
}

/// Surface measure of the unit sphere `S_dim` embedded in `R^{dim+1}`.
pub fn sphere_surface<T: Real>(dim: u32) -> Result<LogScaled<T>> {
    if dim < 1 {
        return domain("sphere dimension must be >= 1");
    }
    let two_pi = LogScaled::from_value(T::TAU());
    if dim.is_multiple_of(2) {
        let d = i64::from(dim / 2);
        Ok(LogScaled::from_value(T::lit(2.0)) * two_pi.powi(d as i32) / double_factorial(2 * d - 1)?)
    } else {
        let d = i64::from(dim / 2 + 1);
        Ok(two_pi.powi(d as i32) / double_factorial(2 * d - 2)?)
    }
}
