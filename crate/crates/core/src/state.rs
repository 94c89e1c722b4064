//! Real-coordinate and spherical-angle views of n-qubit states.
//!
//! A state with `d` complex amplitudes `α_k = x_{2k} + i·x_{2k+1}` is a point
//! of the unit sphere in `R^{2d}`. The error-free reference state is `|0⟩`,
//! i.e. `x = (1, 0, …, 0)`.

use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Tolerance on `Σ x_j² = 1` accepted by the checked constructors.
pub const NORM_TOLERANCE: f64 = 1e-10;

/// A unit vector of `2d` real coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector<T> {
    coords: Vec<T>,
}

impl<T: Real> StateVector<T> {
    /// Checked constructor: even length, at least two amplitudes, unit norm.
    pub fn new(coords: Vec<T>) -> Result<Self> {
        Self::check_len(coords.len())?;
        let norm_sq: T = coords.iter().map(|&x| x * x).sum();
        if (norm_sq - T::one()).abs() > T::lit(NORM_TOLERANCE) {
            return domain(format!("state is not unit norm: |x|² = {norm_sq}"));
        }
        Ok(Self { coords })
    }

    /// Rescale an arbitrary non-zero vector onto the sphere.
    pub fn normalized(mut coords: Vec<T>) -> Result<Self> {
        Self::check_len(coords.len())?;
        let scale = coords.iter().fold(T::zero(), |m, &x| m.max(x.abs()));
        if scale == T::zero() || !scale.is_finite() {
            return domain("cannot normalize a zero or non-finite vector");
        }
        let norm = scale * coords.iter().map(|&x| (x / scale) * (x / scale)).sum::<T>().sqrt();
        for x in coords.iter_mut() {
            *x = *x / norm;
        }
        Ok(Self { coords })
    }

    /// Basis state `|k⟩` in a space of `d` amplitudes.
    pub fn basis(d: usize, k: usize) -> Result<Self> {
        if k >= d {
            return domain(format!("basis index {k} out of range for d = {d}"));
        }
        let mut coords = vec![T::zero(); 2 * d];
        coords[2 * k] = T::one();
        Self::new(coords)
    }

    /// The reference state `Φ = |0⟩`.
    pub fn reference(d: usize) -> Result<Self> {
        Self::basis(d, 0)
    }

    /// Build from complex amplitudes given as `(re, im)` pairs.
    pub fn from_amplitudes(amps: &[(T, T)]) -> Result<Self> {
        Self::new(amps.iter().flat_map(|&(re, im)| [re, im]).collect())
    }

    pub(crate) fn from_coords_unchecked(coords: Vec<T>) -> Self {
        debug_assert!(coords.len().is_multiple_of(2));
        Self { coords }
    }

    fn check_len(len: usize) -> Result<()> {
        if len < 4 || !len.is_multiple_of(2) {
            return domain(format!("state needs an even number >= 4 of coordinates, got {len}"));
        }
        Ok(())
    }

    /// Number of complex amplitudes.
    pub fn d(&self) -> usize {
        self.coords.len() / 2
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Amplitude `α_k` as `(re, im)`.
    pub fn amplitude(&self, k: usize) -> (T, T) {
        (self.coords[2 * k], self.coords[2 * k + 1])
    }

    pub fn norm_sq(&self) -> T {
        self.coords.iter().map(|&x| x * x).sum()
    }

    /// `‖Φ − Ψ‖² = 2 − 2·x0` for `Φ = |0⟩`.
    pub fn deviation_sq(&self) -> T {
        T::lit(2.0) - T::lit(2.0) * self.coords[0]
    }

    /// `min_φ ‖Ψ − e^{iφ}Φ‖² = 2 − 2·√(x0² + x1²)`.
    pub fn phase_deviation_sq(&self) -> T {
        T::lit(2.0) - T::lit(2.0) * self.coords[0].hypot(self.coords[1])
    }

    /// Hyperspherical angles of this point.
    ///
    /// Where the tail of the vector vanishes the remaining angles are
    /// unconstrained and are set to zero.
    pub fn to_spherical(&self) -> SphericalAngles<T> {
        let x = &self.coords;
        let n = x.len();
        // tail[j] = ‖(x_j, …, x_{n-1})‖
        let mut tail = vec![T::zero(); n + 1];
        for j in (0..n).rev() {
            tail[j] = tail[j + 1].hypot(x[j]);
        }
        let mut theta = vec![T::zero(); n - 1];
        for j in 0..n - 2 {
            if tail[j] == T::zero() {
                break;
            }
            theta[j] = tail[j + 1].atan2(x[j]);
        }
        if tail[n - 2] != T::zero() {
            let mut last = x[n - 1].atan2(x[n - 2]);
            if last < T::zero() {
                last = last + T::TAU();
            }
            theta[n - 2] = last;
        }
        SphericalAngles { theta }
    }
}

/// Free function form of [`StateVector::deviation_sq`].
pub fn deviation_sq<T: Real>(psi: &StateVector<T>) -> T {
    psi.deviation_sq()
}

/// Free function form of [`StateVector::phase_deviation_sq`].
pub fn phase_deviation_sq<T: Real>(psi: &StateVector<T>) -> T {
    psi.phase_deviation_sq()
}

/// Angles `θ_0 … θ_{2d−2}`: all in `[0, π]` except the last, in `[0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SphericalAngles<T> {
    theta: Vec<T>,
}

impl<T: Real> SphericalAngles<T> {
    pub fn new(theta: Vec<T>) -> Result<Self> {
        let len = theta.len();
        if len < 3 || len.is_multiple_of(2) {
            return domain(format!("need 2d - 1 >= 3 angles, got {len}"));
        }
        let pi = T::PI();
        for (j, &t) in theta.iter().enumerate() {
            let upper_ok = if j + 1 == len { t < T::TAU() } else { t <= pi };
            if !(t >= T::zero() && upper_ok) {
                return Err(Error::Domain(format!("angle θ_{j} = {t} out of range")));
            }
        }
        Ok(Self { theta })
    }

    pub fn theta(&self) -> &[T] {
        &self.theta
    }

    pub fn d(&self) -> usize {
        self.theta.len().div_ceil(2)
    }

    /// `x_j = sin θ_0 ⋯ sin θ_{j−1} · cos θ_j`, last coordinate the full sine product.
    pub fn to_cartesian(&self) -> StateVector<T> {
        let n = self.theta.len() + 1;
        let mut coords = Vec::with_capacity(n);
        let mut sines = T::one();
        for &t in &self.theta {
            let (s, c) = t.sin_cos();
            coords.push(sines * c);
            sines = sines * s;
        }
        coords.push(sines);
        StateVector::from_coords_unchecked(coords)
    }
}
