use super::{check_dims, check_samples, run_chunks, sampler, EstimateReport, Estimator, Moments, StateSource};
use crate::code::{measure_and_correct, CodeParams};
use crate::distributions::{IsotropicDensity, Theta0Sampler};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;

/// Fewest conditioned samples accepted for a branch.
pub const MIN_HITS: usize = 100;
/// Standard-normal quantile used for the histogram cut (one-sided 0.999).
const HISTOGRAM_Z: f64 = 3.09;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UniformityOptions {
    /// Also run an equal-probability histogram test of `cos θ0` with this many bins.
    pub histogram_bins: Option<usize>,
}

/// Chi-square comparison of `cos θ0` against the uniform-sphere marginal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistogramCheck {
    pub bins: usize,
    pub chi_square: f64,
    pub critical_value: f64,
    pub pass: bool,
}

/// Polar moments of the corrected state on one syndrome branch.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformityReport {
    pub syndrome: usize,
    pub d_logical: usize,
    pub n_hits: usize,
    /// `cos θ0` of the corrected state
    pub moment1: EstimateReport,
    /// `cos² θ0` of the corrected state
    pub moment2: EstimateReport,
    /// Both moments within 3 standard errors of `0` and `1/(2d′)`.
    pub pass: bool,
    pub histogram: Option<HistogramCheck>,
}

impl UniformityReport {
    pub fn moment2_target(&self) -> f64 {
        1.0 / (2 * self.d_logical) as f64
    }
}

fn bin_edges(d_logical: usize, bins: usize) -> Result<Vec<f64>> {
    if bins < 2 {
        return domain(format!("histogram needs at least 2 bins, got {bins}"));
    }
    let uniform = Theta0Sampler::new(IsotropicDensity::<f64>::uniform(d_logical)?, 256)?;
    Ok((1..bins).map(|i| uniform.invert(i as f64 / bins as f64)).collect())
}

fn wilson_hilferty(dof: f64, z: f64) -> f64 {
    let a = 2.0 / (9.0 * dof);
    dof * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Branch statistics for every syndrome in `syndromes`, in one pass.
fn branches<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    syndromes: &[usize],
    n_samples: usize,
    seed: u64,
    opts: &UniformityOptions,
) -> Result<Vec<UniformityReport>> {
    check_samples(n_samples)?;
    check_dims(source, code)?;
    let dl = code.d_logical();
    let edges = opts.histogram_bins.map(|b| bin_edges(dl, b)).transpose()?;
    let bins = opts.histogram_bins.unwrap_or(0);
    // Per syndrome: cos, cos², then one indicator slot per histogram bin.
    let stride = 2 + bins;
    let mut slot = vec![usize::MAX; code.syndromes()];
    for (i, &s) in syndromes.iter().enumerate() {
        slot[s] = i;
    }
    let acc = run_chunks(source, n_samples, seed, stride * syndromes.len(), |psi, rng, acc| {
        let outcome = measure_and_correct(&psi, code, rng)?;
        let i = slot[outcome.syndrome];
        if i == usize::MAX {
            return Ok(());
        }
        let Some(corrected) = outcome.corrected else { return Ok(()) };
        let t = corrected.coords()[0].as_f64();
        let base = stride * i;
        acc[base].push(t);
        acc[base + 1].push(t * t);
        if let Some(edges) = &edges {
            let bin = edges.partition_point(|&e| e <= t);
            acc[base + 2 + bin].push(1.0);
        }
        Ok(())
    })?;
    syndromes
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let base = stride * i;
            let (m1, m2): (&Moments, &Moments) = (&acc[base], &acc[base + 1]);
            let n_hits = m1.count();
            if n_hits < MIN_HITS {
                return Err(Error::InsufficientSamples { hits: n_hits, required: MIN_HITS });
            }
            let moment1 = m1.report(seed, Estimator::Sampled);
            let moment2 = m2.report(seed, Estimator::Sampled);
            let target2 = 1.0 / (2 * dl) as f64;
            let pass = moment1.within(0.0, 3.0) && moment2.within(target2, 3.0);
            let histogram = (bins > 0).then(|| {
                let expected = n_hits as f64 / bins as f64;
                let chi_square = (0..bins)
                    .map(|b| (acc[base + 2 + b].count() as f64 - expected).powi(2) / expected)
                    .sum::<f64>();
                let critical_value = wilson_hilferty((bins - 1) as f64, HISTOGRAM_Z);
                HistogramCheck { bins, chi_square, critical_value, pass: chi_square <= critical_value }
            });
            Ok(UniformityReport { syndrome: s, d_logical: dl, n_hits, moment1, moment2, pass, histogram })
        })
        .collect()
}

/// Moment test of the corrected state conditioned on measuring syndrome `s > 0`.
pub fn mc_uniformity_test<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    s: usize,
    n_samples: usize,
    seed: u64,
) -> Result<UniformityReport> {
    mc_uniformity_test_from(&sampler(density)?, code, s, n_samples, seed, &UniformityOptions::default())
}

pub fn mc_uniformity_test_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    s: usize,
    n_samples: usize,
    seed: u64,
    opts: &UniformityOptions,
) -> Result<UniformityReport> {
    if s == 0 || s >= code.syndromes() {
        return domain(format!("syndrome must lie in 1..{}, got {s}", code.syndromes()));
    }
    Ok(branches(source, code, &[s], n_samples, seed, opts)?.remove(0))
}

/// The same statistics for every syndrome `0..d″` from a single run.
pub fn mc_uniformity_branches<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<UniformityReport>> {
    mc_uniformity_branches_from(&sampler(density)?, code, n_samples, seed, &UniformityOptions::default())
}

pub fn mc_uniformity_branches_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
    opts: &UniformityOptions,
) -> Result<Vec<UniformityReport>> {
    let all: Vec<usize> = (0..code.syndromes()).collect();
    branches(source, code, &all, n_samples, seed, opts)
}
