//! Globally adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! The panel with the largest error estimate is bisected until the summed
//! estimate meets the tolerance. Callers may seed the initial partition with
//! breakpoints, which is how peaked densities get a-priori refinement.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::scalar::Real;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Default floor on the absolute error target.
pub const ABS_FLOOR: f64 = 1e-300;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    /// Estimate of `∫|f|`, a by-product of the Kronrod sums.
    pub l1_norm: T,
}

#[derive(Clone, Debug, PartialEq)]
pub struct QuadOptions<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    /// Also accept once the error is below `l1_rel_tol * ∫|f|`. Zero disables.
    /// Needed when the integral cancels to (near) zero.
    pub l1_rel_tol: T,
    pub max_subdivisions: usize,
    /// Interior points that start as panel boundaries.
    pub breakpoints: Vec<T>,
}

impl<T: Real> QuadOptions<T> {
    pub fn new(rel_tol: T) -> Self {
        Self {
            rel_tol,
            abs_tol: T::lit(ABS_FLOOR),
            l1_rel_tol: T::zero(),
            max_subdivisions: 2000,
            breakpoints: Vec::new(),
        }
    }

    pub fn with_l1_rel_tol(mut self, tol: T) -> Self {
        self.l1_rel_tol = tol;
        self
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = T>) -> Self {
        self.breakpoints.extend(points);
        self
    }

    pub fn with_max_subdivisions(mut self, n: usize) -> Self {
        self.max_subdivisions = n;
        self
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Panel<T> {
    pub a: T,
    pub b: T,
    pub value: T,
    pub error: T,
    pub abs_value: T,
}

impl<T: Real> PartialEq for Panel<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl<T: Real> Eq for Panel<T> {}

impl<T: Real> PartialOrd for Panel<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T: Real> Ord for Panel<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

/// One 15-point Kronrod panel with its embedded 7-point Gauss estimate.
pub(crate) fn gauss_kronrod_15<T: Real, F: Fn(T) -> T>(f: &F, a: T, b: T) -> Panel<T> {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_g = fc * T::lit(WG[3]);
    let mut res_k = fc * T::lit(WGK[7]);
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 7];
    let mut fv2 = [T::zero(); 7];

    for j in 0..7 {
        let x = half_len * T::lit(XGK[j]);
        let f1 = f(center - x);
        let f2 = f(center + x);
        fv1[j] = f1;
        fv2[j] = f2;
        let w = T::lit(WGK[j]);
        res_k = res_k + w * (f1 + f2);
        res_abs = res_abs + w * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[7]) * (fc - mean).abs();
    for j in 0..7 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let value = res_k * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut error = ((res_k - res_g) * half_len).abs();
    if res_asc != T::zero() && error != T::zero() {
        let scaled = (T::lit(200.0) * error / res_asc).powf(T::lit(1.5));
        error = res_asc * scaled.min(T::one());
    }
    let eps = T::lit(T::EPS_F64);
    if res_abs > T::min_positive_value() / (T::lit(50.0) * eps) {
        error = error.max(T::lit(50.0) * eps * res_abs);
    }
    Panel { a, b, value, error, abs_value: res_abs }
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_adaptive<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, rel_tol: T) -> Result<QuadratureResult<T>> {
    integrate_with(f, a, b, &QuadOptions::new(rel_tol))
}

/// Integrate with explicit options.
pub fn integrate_with<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, opts: &QuadOptions<T>) -> Result<QuadratureResult<T>> {
    if !(opts.rel_tol > T::zero()) {
        return Err(Error::Domain(format!("rel_tol must be positive, got {}", opts.rel_tol)));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain("integration limits must be finite".into()));
    }
    if a == b {
        return Ok(QuadratureResult { value: T::zero(), error_estimate: T::zero(), evaluations: 0, l1_norm: T::zero() });
    }
    let (lo, hi, flip) = if a < b { (a, b, false) } else { (b, a, true) };

    let mut cuts: Vec<T> = opts.breakpoints.iter().copied().filter(|&p| p > lo && p < hi).collect();
    cuts.sort_by(|x, y| x.partial_cmp(y).unwrap_or(Ordering::Equal));
    cuts.dedup();
    let mut nodes = Vec::with_capacity(cuts.len() + 2);
    nodes.push(lo);
    nodes.extend(cuts);
    nodes.push(hi);

    let mut heap = BinaryHeap::with_capacity(nodes.len() + 2 * opts.max_subdivisions);
    let mut evaluations = 0usize;
    for w in nodes.windows(2) {
        heap.push(gauss_kronrod_15(&f, w[0], w[1]));
        evaluations += 15;
    }

    let totals = |heap: &BinaryHeap<Panel<T>>| {
        let mut value = T::zero();
        let mut error = T::zero();
        let mut l1 = T::zero();
        for p in heap.iter() {
            value = value + p.value;
            error = error + p.error;
            l1 = l1 + p.abs_value;
        }
        (value, error, l1)
    };

    let mut subdivisions = 0usize;
    loop {
        let (value, error, l1) = totals(&heap);
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::NumericalFailure {
                context: "adaptive quadrature: non-finite integrand".into(),
                best_estimate: value.as_f64(),
                error_estimate: error.as_f64(),
            });
        }
        let target = (opts.rel_tol * value.abs()).max(opts.abs_tol).max(opts.l1_rel_tol * l1);
        if error <= target {
            let value = if flip { -value } else { value };
            return Ok(QuadratureResult { value, error_estimate: error, evaluations, l1_norm: l1 });
        }
        if subdivisions >= opts.max_subdivisions {
            return Err(Error::NumericalFailure {
                context: format!("adaptive quadrature: {subdivisions} subdivisions exhausted"),
                best_estimate: if flip { -value } else { value }.as_f64(),
                error_estimate: error.as_f64(),
            });
        }
        let worst = heap.pop().expect("non-empty partition");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if !(mid > worst.a && mid < worst.b) {
            // Panel can no longer be split in this precision.
            return Err(Error::NumericalFailure {
                context: "adaptive quadrature: panel width below machine resolution".into(),
                best_estimate: if flip { -value } else { value }.as_f64(),
                error_estimate: error.as_f64(),
            });
        }
        heap.push(gauss_kronrod_15(&f, worst.a, mid));
        heap.push(gauss_kronrod_15(&f, mid, worst.b));
        evaluations += 30;
        subdivisions += 1;
    }
}
