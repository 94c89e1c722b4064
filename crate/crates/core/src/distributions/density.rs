use std::fmt;
use std::sync::Arc;

use crate::error::{domain, Result};
use crate::numerics::{double_factorial, integrate_with, sphere_surface, QuadOptions};
use crate::scalar::Real;

/// Default relative tolerance for expectations against a density.
pub const DEFAULT_MOMENT_TOL: f64 = 1e-12;

/// Depth of the geometric breakpoint ladder placed next to each pole.
const POLE_LADDER: i32 = 40;

type DensityFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DensityKind<T> {
    Normal { sigma: T },
    Uniform,
    Custom,
}

/// An isotropic density on `S^{2d−1}`: a function `f(θ0)` of the polar angle
/// measured from the reference state.
///
/// Values are handled in log space. For `d` in the hundreds `f` itself
/// overflows, while the polar-angle marginal `|S_{2d−2}|·f(θ0)·sin^{2d−2}θ0`
/// stays of order one.
#[derive(Clone)]
pub struct IsotropicDensity<T> {
    kind: DensityKind<T>,
    d: usize,
    /// `ln |S_{2d−2}|`
    ln_sphere: T,
    /// Constant part of `ln f`.
    ln_coef: T,
    custom: Option<DensityFn<T>>,
    breakpoints: Vec<T>,
}

impl<T: Real> fmt::Debug for IsotropicDensity<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IsotropicDensity")
            .field("kind", &self.kind)
            .field("d", &self.d)
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}

fn check_d(d: usize) -> Result<()> {
    if d < 2 {
        return domain(format!("state dimension d must be >= 2, got {d}"));
    }
    if d > (1 << 20) {
        return domain(format!("state dimension d = {d} too large"));
    }
    Ok(())
}

fn ln_sphere<T: Real>(dim: usize) -> Result<T> {
    Ok(sphere_surface::<T>(dim as u32)?.ln_abs())
}

impl<T: Real> IsotropicDensity<T> {
    /// `f(θ0) = (2d−2)!!/(2π)^d · (1−σ²)/(1+σ²−2σ cos θ0)^d`.
    pub fn normal(sigma: T, d: usize) -> Result<Self> {
        check_d(d)?;
        if !(sigma >= T::zero() && sigma < T::one()) {
            return domain(format!("sigma must lie in [0, 1), got {sigma}"));
        }
        let di = d as i64;
        let ln_coef = double_factorial::<T>(2 * di - 2)?.ln_abs() - T::from_count(d) * T::TAU().ln()
            + (T::one() - sigma * sigma).ln();
        Ok(Self {
            kind: DensityKind::Normal { sigma },
            d,
            ln_sphere: ln_sphere(2 * d - 2)?,
            ln_coef,
            custom: None,
            breakpoints: Vec::new(),
        })
    }

    /// Constant `1/|S_{2d−1}|`.
    pub fn uniform(d: usize) -> Result<Self> {
        check_d(d)?;
        Ok(Self {
            kind: DensityKind::Uniform,
            d,
            ln_sphere: ln_sphere(2 * d - 2)?,
            ln_coef: -ln_sphere::<T>(2 * d - 1)?,
            custom: None,
            breakpoints: Vec::new(),
        })
    }

    /// A user-supplied `f(θ0) ≥ 0`. Points where `f` is discontinuous should
    /// be listed in `breakpoints` so quadrature and sampling grids align with them.
    pub fn custom<F>(d: usize, f: F, breakpoints: Vec<T>) -> Result<Self>
    where
        F: Fn(T) -> T + Send + Sync + 'static,
    {
        check_d(d)?;
        if breakpoints.iter().any(|&b| !(b > T::zero() && b < T::PI())) {
            return domain("breakpoints must lie strictly inside (0, π)");
        }
        Ok(Self {
            kind: DensityKind::Custom,
            d,
            ln_sphere: ln_sphere(2 * d - 2)?,
            ln_coef: T::zero(),
            custom: Some(Arc::new(f)),
            breakpoints,
        })
    }

    /// Uniform on the hemisphere `θ0 < π/2` and zero beyond it.
    pub fn hemisphere(d: usize) -> Result<Self> {
        check_d(d)?;
        let height = T::lit(2.0) / sphere_surface::<T>(2 * d as u32 - 1)?.value();
        let half = T::FRAC_PI_2();
        Self::custom(d, move |theta: T| if theta < half { height } else { T::zero() }, vec![half])
    }

    pub fn kind(&self) -> DensityKind<T> {
        self.kind
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn sigma(&self) -> Option<T> {
        match self.kind {
            DensityKind::Normal { sigma } => Some(sigma),
            _ => None,
        }
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// `ln |S_{2d−2}|`.
    pub fn ln_sphere(&self) -> T {
        self.ln_sphere
    }

    /// `ln f` as a function of `t = cos θ0`.
    pub fn ln_density_cos(&self, t: T) -> T {
        match self.kind {
            DensityKind::Normal { sigma } => {
                // 1 + σ² − 2σt written to keep accuracy near σ → 1, t → 1.
                let one_minus = T::one() - sigma;
                let base = one_minus * one_minus + T::lit(2.0) * sigma * (T::one() - t);
                self.ln_coef - T::from_count(self.d) * base.ln()
            }
            DensityKind::Uniform => self.ln_coef,
            DensityKind::Custom => self.ln_density(t.max(-T::one()).min(T::one()).acos()),
        }
    }

    /// `ln f(θ0)`; `-inf` where the density vanishes.
    pub fn ln_density(&self, theta: T) -> T {
        match self.kind {
            DensityKind::Normal { sigma } => {
                let h = (theta * T::lit(0.5)).sin();
                let one_minus = T::one() - sigma;
                let base = one_minus * one_minus + T::lit(4.0) * sigma * h * h;
                self.ln_coef - T::from_count(self.d) * base.ln()
            }
            DensityKind::Uniform => self.ln_coef,
            DensityKind::Custom => {
                let f = (self.custom.as_ref().expect("custom density"))(theta);
                if f > T::zero() {
                    f.ln()
                } else {
                    T::neg_infinity()
                }
            }
        }
    }

    /// `f(θ0)`; may overflow for very large `d`.
    pub fn density(&self, theta: T) -> T {
        match self.kind {
            DensityKind::Custom => (self.custom.as_ref().expect("custom density"))(theta),
            _ => self.ln_density(theta).exp(),
        }
    }

    /// Polar-angle marginal `|S_{2d−2}|·f(θ0)·sin^{2d−2}θ0`, a probability
    /// density on `[0, π]` when `f` is normalized.
    pub fn marginal_pdf(&self, theta: T) -> T {
        let s = theta.sin();
        if s <= T::zero() {
            return T::zero();
        }
        let ln_f = self.ln_density(theta);
        if ln_f == T::neg_infinity() {
            return T::zero();
        }
        (self.ln_sphere + ln_f + T::from_count(2 * self.d - 2) * s.ln()).exp()
    }

    /// Density of `t = cos θ0`: `|S_{2d−2}|·f·(1−t²)^{(2d−3)/2}` on `[−1, 1]`.
    pub fn marginal_pdf_cos(&self, t: T) -> T {
        if !(t > -T::one() && t < T::one()) {
            return T::zero();
        }
        let ln_f = self.ln_density_cos(t);
        if ln_f == T::neg_infinity() {
            return T::zero();
        }
        let ln_1mt2 = (-t).ln_1p() + t.ln_1p();
        (self.ln_sphere + ln_f + T::lit((2 * self.d) as f64 - 3.0) * T::lit(0.5) * ln_1mt2).exp()
    }

    /// Panel boundaries in `θ0` used for every integral against this density:
    /// geometric ladders towards both poles, `π/2`, and the declared breakpoints.
    pub fn quadrature_breakpoints(&self) -> Vec<T> {
        let pi = T::PI();
        let mut pts = Vec::with_capacity(2 * POLE_LADDER as usize + 1 + self.breakpoints.len());
        for j in 2..=POLE_LADDER {
            let h = pi * T::lit(2f64.powi(-j));
            pts.push(h);
            pts.push(pi - h);
        }
        pts.push(T::FRAC_PI_2());
        pts.extend(self.breakpoints.iter().copied());
        pts
    }

    fn moment_options(&self, rel_tol: T) -> QuadOptions<T> {
        QuadOptions::new(rel_tol).with_l1_rel_tol(rel_tol).with_breakpoints(self.quadrature_breakpoints())
    }
}

/// Def.-3 normal density; see [`IsotropicDensity::normal`].
pub fn normal_density<T: Real>(sigma: T, d: usize) -> Result<IsotropicDensity<T>> {
    IsotropicDensity::normal(sigma, d)
}

pub fn uniform_density<T: Real>(d: usize) -> Result<IsotropicDensity<T>> {
    IsotropicDensity::uniform(d)
}

/// `|1 − |S_{2d−2}|·∫_0^π f sin^{2d−2}|`.
pub fn check_normalization<T: Real>(density: &IsotropicDensity<T>) -> Result<T> {
    check_normalization_with(density, T::lit(DEFAULT_MOMENT_TOL))
}

pub fn check_normalization_with<T: Real>(density: &IsotropicDensity<T>, rel_tol: T) -> Result<T> {
    Ok((T::one() - marginal_moment_with(density, |_| T::one(), rel_tol)?).abs())
}

/// `Ē[g] = ∫_0^π f(θ0)·g(θ0) dθ0`, the raw functional evaluated directly.
/// Overflows for large `d`; prefer [`marginal_moment`] there.
pub fn ebar<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G) -> Result<T> {
    ebar_with(density, g, T::lit(DEFAULT_MOMENT_TOL))
}

pub fn ebar_with<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G, rel_tol: T) -> Result<T> {
    let opts = density.moment_options(rel_tol);
    Ok(integrate_with(|th: T| density.density(th) * g(th), T::zero(), T::PI(), &opts)?.value)
}

/// Expectation of `g(θ0)` under the polar-angle marginal,
/// `|S_{2d−2}|·Ē[g·sin^{2d−2}]`, computed without overflow.
pub fn marginal_moment<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G) -> Result<T> {
    marginal_moment_with(density, g, T::lit(DEFAULT_MOMENT_TOL))
}

pub fn marginal_moment_with<T: Real, G: Fn(T) -> T>(density: &IsotropicDensity<T>, g: G, rel_tol: T) -> Result<T> {
    let opts = density.moment_options(rel_tol);
    Ok(integrate_with(|th: T| density.marginal_pdf(th) * g(th), T::zero(), T::PI(), &opts)?.value)
}
