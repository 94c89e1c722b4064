//! Tolerance-controlled summation of slowly decaying series.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_REL_TOL: f64 = 1e-12;
pub const DEFAULT_K_MAX: usize = 20_000;
/// Consecutive small terms required before stopping.
pub const QUIET_RUN: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesOptions<T> {
    pub rel_tol: T,
    /// Terms below this magnitude also count as small.
    pub abs_tol: T,
    pub k_max: usize,
}

impl<T: Real> SeriesOptions<T> {
    pub fn new(rel_tol: T, k_max: usize) -> Self {
        Self { rel_tol, abs_tol: T::zero(), k_max }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

impl<T: Real> Default for SeriesOptions<T> {
    fn default() -> Self {
        Self::new(T::lit(DEFAULT_REL_TOL), DEFAULT_K_MAX)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeriesSum<T> {
    pub value: T,
    pub terms_used: usize,
}

/// Sum `Σ_{k≥1} term(k)` until `QUIET_RUN` consecutive terms satisfy
/// `|term_k| ≤ rel_tol·|partial sum|`.
pub fn sum_series<T: Real, F: FnMut(usize) -> T>(mut term: F, rel_tol: T, k_max: usize) -> Result<T> {
    sum_series_with(|k| Ok(term(k)), &SeriesOptions::new(rel_tol, k_max)).map(|s| s.value)
}

/// Fallible-term variant with an optional absolute floor on "small".
pub fn sum_series_with<T: Real, F: FnMut(usize) -> Result<T>>(mut term: F, opts: &SeriesOptions<T>) -> Result<SeriesSum<T>> {
    if !(opts.rel_tol > T::zero()) {
        return Err(Error::Domain(format!("series rel_tol must be positive, got {}", opts.rel_tol)));
    }
    // Neumaier-compensated running sum.
    let mut sum = T::zero();
    let mut comp = T::zero();
    let mut quiet = 0usize;
    for k in 1..=opts.k_max {
        let t = term(k)?;
        if !t.is_finite() {
            return Err(Error::NumericalFailure {
                context: format!("series term {k} is not finite"),
                best_estimate: (sum + comp).as_f64(),
                error_estimate: f64::INFINITY,
            });
        }
        let s = sum + t;
        comp = comp + if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
        sum = s;
        let partial = sum + comp;
        if t.abs() <= (opts.rel_tol * partial.abs()).max(opts.abs_tol) {
            quiet += 1;
            if quiet >= QUIET_RUN {
                return Ok(SeriesSum { value: partial, terms_used: k });
            }
        } else {
            quiet = 0;
        }
    }
    Err(Error::NumericalFailure {
        context: format!("series did not converge within k_max = {}", opts.k_max),
        best_estimate: (sum + comp).as_f64(),
        error_estimate: f64::NAN,
    })
}
