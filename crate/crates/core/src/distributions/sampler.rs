//! Exact inverse-CDF sampling of the polar angle.
//!
//! The CDF is tabulated in `t = cos θ0` on panels that are refined until each
//! carries little mass and is resolved by a single Gauss–Kronrod panel. A draw
//! interpolates linearly inside its panel and is then polished with safeguarded
//! Newton steps against the exact CDF.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::distributions::density::{check_normalization, IsotropicDensity};
use crate::error::{domain, Error, Result};
use crate::numerics::quadrature::gauss_kronrod_15;
use crate::scalar::Real;
use crate::state::StateVector;

pub const DEFAULT_GRID_SIZE: usize = 4096;
pub const MIN_GRID_SIZE: usize = 64;
/// Largest CDF increment allowed on one panel.
pub const MAX_PANEL_MASS: f64 = 1.0 / 256.0;
/// Normalization residual beyond which a density is refused.
pub const MAX_NORMALIZATION_RESIDUAL: f64 = 1e-6;
/// Absolute GK error accepted on a single panel.
const PANEL_ERROR: f64 = 1e-14;
const MAX_PANELS: usize = 1 << 20;
const NEWTON_TOL: f64 = 1e-13;
const NEWTON_MAX_STEPS: usize = 8;

/// Tabulated CDF of `cos θ0` with its density.
#[derive(Clone, Debug)]
pub struct Theta0Sampler<T: Real> {
    density: IsotropicDensity<T>,
    t_nodes: Vec<T>,
    cdf: Vec<T>,
    mass: T,
    grid_size: usize,
}

fn theta_of<T: Real>(t: T) -> T {
    t.max(-T::one()).min(T::one()).acos()
}

impl<T: Real> Theta0Sampler<T> {
    pub fn new(density: IsotropicDensity<T>, grid_size: usize) -> Result<Self> {
        if grid_size < MIN_GRID_SIZE {
            return domain(format!("grid_size must be >= {MIN_GRID_SIZE}, got {grid_size}"));
        }
        let residual = check_normalization(&density)?;
        if residual.as_f64() > MAX_NORMALIZATION_RESIDUAL {
            return Err(Error::InvalidDensity { residual: residual.as_f64(), limit: MAX_NORMALIZATION_RESIDUAL });
        }

        // Seed nodes in θ: uniform grid, pole ladders and declared breakpoints.
        let pi = T::PI();
        let mut thetas: Vec<T> = (0..=grid_size).map(|i| pi * T::from_count(i) / T::from_count(grid_size)).collect();
        thetas.extend(density.quadrature_breakpoints());
        let mut ts: Vec<T> = thetas.into_iter().map(|th| th.cos()).collect();
        ts.push(-T::one());
        ts.push(T::one());
        ts.sort_by(|a, b| a.partial_cmp(b).expect("finite nodes"));
        ts.dedup();

        let pdf = |t: T| density.marginal_pdf_cos(t);
        let max_mass = T::lit(MAX_PANEL_MASS);
        let max_err = T::lit(PANEL_ERROR);

        // Refine left to right with an explicit stack so nodes come out sorted.
        let mut nodes = vec![ts[0]];
        let mut masses = Vec::with_capacity(ts.len());
        for w in ts.windows(2) {
            let mut stack = vec![(w[0], w[1])];
            while let Some((a, b)) = stack.pop() {
                let panel = gauss_kronrod_15(&pdf, a, b);
                let mid = ((theta_of(a) + theta_of(b)) * T::lit(0.5)).cos();
                let splittable = mid > a && mid < b && nodes.len() + stack.len() < MAX_PANELS;
                if splittable && (panel.value > max_mass || panel.error > max_err) {
                    // Push the right half first so the left half is processed next.
                    stack.push((mid, b));
                    stack.push((a, mid));
                } else {
                    nodes.push(b);
                    masses.push(panel.value.max(T::zero()));
                }
            }
        }

        let mut cdf = Vec::with_capacity(nodes.len());
        cdf.push(T::zero());
        let (mut sum, mut comp) = (T::zero(), T::zero());
        for &m in &masses {
            let s = sum + m;
            comp = comp + if sum.abs() >= m.abs() { (sum - s) + m } else { (m - s) + sum };
            sum = s;
            cdf.push(sum + comp);
        }
        let mass = sum + comp;
        if !(mass > T::zero()) {
            return Err(Error::InvalidDensity { residual: 1.0, limit: MAX_NORMALIZATION_RESIDUAL });
        }
        for c in cdf.iter_mut() {
            *c = *c / mass;
        }

        // Collapse zero-mass runs so the table is strictly increasing: keep the
        // last node of a leading/interior flat run and the first of a trailing one.
        let mut t_nodes = Vec::with_capacity(nodes.len());
        let mut table = Vec::with_capacity(nodes.len());
        let n = nodes.len();
        for i in 0..n {
            let flat_with_next = i + 1 < n && cdf[i + 1] <= cdf[i];
            let flat_with_prev = i > 0 && cdf[i] <= cdf[i - 1];
            let at_top = cdf[i] >= T::one();
            if flat_with_next && !at_top {
                continue;
            }
            if flat_with_prev && at_top {
                continue;
            }
            t_nodes.push(nodes[i]);
            table.push(cdf[i]);
        }
        if let Some(last) = table.last_mut() {
            *last = T::one();
        }

        Ok(Self { density, t_nodes, cdf: table, mass, grid_size })
    }

    pub fn density(&self) -> &IsotropicDensity<T> {
        &self.density
    }

    pub fn grid_size(&self) -> usize {
        self.grid_size
    }

    /// Number of tabulated panels after refinement.
    pub fn panels(&self) -> usize {
        self.t_nodes.len() - 1
    }

    /// The `(t, CDF)` table.
    pub fn table(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.t_nodes.iter().copied().zip(self.cdf.iter().copied())
    }

    /// Unnormalized mass found while tabulating (≈ 1 for a normalized density).
    pub fn raw_mass(&self) -> T {
        self.mass
    }

    fn panel_of(&self, t: T) -> usize {
        let i = self.t_nodes.partition_point(|&x| x <= t);
        i.saturating_sub(1).min(self.t_nodes.len() - 2)
    }

    fn cdf_in_panel(&self, i: usize, t: T) -> T {
        let a = self.t_nodes[i];
        if t <= a {
            return self.cdf[i];
        }
        let part = gauss_kronrod_15(&|s: T| self.density.marginal_pdf_cos(s), a, t).value;
        self.cdf[i] + part / self.mass
    }

    /// `P(cos θ0 ≤ t)`.
    pub fn cdf(&self, t: T) -> T {
        if t <= self.t_nodes[0] {
            return T::zero();
        }
        if t >= *self.t_nodes.last().expect("non-empty") {
            return T::one();
        }
        self.cdf_in_panel(self.panel_of(t), t)
    }

    /// Inverse CDF: the `t = cos θ0` with `CDF(t) = u`.
    pub fn invert(&self, u: T) -> T {
        let u = u.max(T::zero()).min(T::one());
        let i = self.cdf.partition_point(|&c| c <= u).saturating_sub(1).min(self.cdf.len() - 2);
        let (mut lo, mut hi) = (self.t_nodes[i], self.t_nodes[i + 1]);
        let (c0, c1) = (self.cdf[i], self.cdf[i + 1]);
        let mut t = if c1 > c0 { lo + (u - c0) / (c1 - c0) * (hi - lo) } else { lo };
        let tol = T::lit(NEWTON_TOL);
        for _ in 0..NEWTON_MAX_STEPS {
            let resid = self.cdf_in_panel(i, t) - u;
            if resid.abs() <= tol {
                break;
            }
            if resid > T::zero() {
                hi = t;
            } else {
                lo = t;
            }
            let slope = self.density.marginal_pdf_cos(t) / self.mass;
            let newton = t - resid / slope;
            t = if slope > T::zero() && newton > lo && newton < hi { newton } else { T::lit(0.5) * (lo + hi) };
        }
        t
    }

    /// Draw `cos θ0`.
    pub fn sample_cos<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        self.invert(T::lit(rng.random::<f64>()))
    }

    /// Draw a full state: `(cos θ0, sin θ0 · u)` with `u` uniform on `S^{2d−2}`.
    pub fn sample_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateVector<T> {
        let t = self.sample_cos(rng);
        let s = (T::one() - t * t).max(T::zero()).sqrt();
        let n = 2 * self.density.d();
        let mut coords = Vec::with_capacity(n);
        coords.push(t);
        let dir = loop {
            let v: Vec<f64> = (1..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                break v.into_iter().map(move |x| x / norm);
            }
        };
        coords.extend(dir.map(|x| s * T::lit(x)));
        StateVector::from_coords_unchecked(coords)
    }
}

pub fn build_sampler<T: Real>(density: IsotropicDensity<T>, grid_size: usize) -> Result<Theta0Sampler<T>> {
    Theta0Sampler::new(density, grid_size)
}

pub fn sample_state<T: Real, R: Rng + ?Sized>(sampler: &Theta0Sampler<T>, rng: &mut R) -> StateVector<T> {
    sampler.sample_state(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::integrate_adaptive;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn table_is_strictly_increasing() {
        for density in [
            IsotropicDensity::normal(0.9f64, 8).unwrap(),
            IsotropicDensity::uniform(2).unwrap(),
            IsotropicDensity::hemisphere(4).unwrap(),
        ] {
            let s = Theta0Sampler::new(density, 256).unwrap();
            let table: Vec<_> = s.table().collect();
            assert_eq!(table[0].1, 0.0);
            assert_eq!(table.last().unwrap().1, 1.0);
            assert!(table.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1));
        }
    }

    #[test]
    fn hemisphere_table_starts_at_equator() {
        let s = Theta0Sampler::new(IsotropicDensity::<f64>::hemisphere(4).unwrap(), 128).unwrap();
        let first = s.table().next().unwrap().0;
        assert!(first.abs() < 1e-12, "first node {first}");
    }

    #[test]
    fn inversion_accuracy_against_quadrature() {
        let density = IsotropicDensity::normal(0.9f64, 8).unwrap();
        let s = Theta0Sampler::new(density.clone(), DEFAULT_GRID_SIZE).unwrap();
        for i in 1..50 {
            let u = i as f64 / 50.0 + 0.003;
            let t = s.invert(u);
            let oracle = integrate_adaptive(|x: f64| density.marginal_pdf_cos(x), -1.0, t, 1e-13).unwrap().value;
            assert!((oracle - u).abs() <= 1e-9, "u = {u}: cdf = {oracle}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let bad = IsotropicDensity::custom(3, |_: f64| 1.0, vec![]).unwrap();
        assert!(matches!(Theta0Sampler::new(bad, 256), Err(Error::InvalidDensity { .. })));
        assert!(Theta0Sampler::new(IsotropicDensity::<f64>::uniform(2).unwrap(), 10).is_err());
    }

    #[test]
    fn states_are_unit_and_seeded() {
        let s = Theta0Sampler::new(IsotropicDensity::normal(0.5f64, 4).unwrap(), 256).unwrap();
        let mut a = ChaCha8Rng::seed_from_u64(3);
        let mut b = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let x = s.sample_state(&mut a);
            assert_eq!(x.d(), 4);
            assert!((x.norm_sq() - 1.0).abs() < 1e-12);
            assert_eq!(x, s.sample_state(&mut b));
        }
    }
}
