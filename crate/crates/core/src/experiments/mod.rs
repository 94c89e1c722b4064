//! Seeded Monte Carlo estimators for the closed-form quantities.
//!
//! Samples are split into chunks of [`CHUNK_SIZE`]. Chunk `c` draws from
//! `ChaCha8Rng` seeded with `seed` on stream `c`, and chunk statistics are
//! merged in chunk order, so results do not depend on the thread count.

mod source;
mod stats;
mod sweep;
mod uniformity;

pub use source::{FnSource, PointMass, SampleRng, StateSource};
pub use stats::{EstimateReport, Estimator, Moments};
pub use sweep::{row_seed, sweep, SweepRow, SweepValues};
pub use uniformity::{
    mc_uniformity_branches, mc_uniformity_branches_from, mc_uniformity_test, mc_uniformity_test_from, HistogramCheck,
    UniformityOptions, UniformityReport,
};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::code::{correct_all_branches, measure_and_correct, syndrome_probabilities, CodeParams};
use crate::distributions::{IsotropicDensity, Theta0Sampler, DEFAULT_GRID_SIZE};
use crate::error::{domain, Error, Result};
use crate::scalar::Real;
use crate::state::StateVector;

pub const CHUNK_SIZE: usize = 4096;
pub const MIN_SAMPLES: usize = 100;
pub const DEFAULT_SAMPLES: usize = 100_000;
pub const DEFAULT_UNIFORMITY_SAMPLES: usize = 1_000_000;

pub(crate) fn sampler<T: Real>(density: &IsotropicDensity<T>) -> Result<Theta0Sampler<T>> {
    Theta0Sampler::new(density.clone(), DEFAULT_GRID_SIZE)
}

fn check_samples(n_samples: usize) -> Result<()> {
    if n_samples < MIN_SAMPLES {
        return domain(format!("need at least {MIN_SAMPLES} samples, got {n_samples}"));
    }
    Ok(())
}

fn check_dims<T: Real, S: StateSource<T> + ?Sized>(source: &S, code: &CodeParams) -> Result<()> {
    if source.d() != code.d() {
        return Err(Error::DimensionMismatch { expected: code.d(), got: source.d() });
    }
    Ok(())
}

/// Run `visit` on `n_samples` states, accumulating into `width` slots.
pub(crate) fn run_chunks<T, S, F>(source: &S, n_samples: usize, seed: u64, width: usize, visit: F) -> Result<Vec<Moments>>
where
    T: Real,
    S: StateSource<T> + ?Sized,
    F: Fn(StateVector<T>, &mut SampleRng, &mut [Moments]) -> Result<()> + Sync,
{
    let n_chunks = n_samples.div_ceil(CHUNK_SIZE);
    let parts: Vec<Result<Vec<Moments>>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK_SIZE.min(n_samples - c * CHUNK_SIZE);
            let mut acc = vec![Moments::default(); width];
            for _ in 0..len {
                let psi = source.sample(&mut rng);
                visit(psi, &mut rng, &mut acc)?;
            }
            Ok(acc)
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for part in parts {
        for (t, p) in total.iter_mut().zip(part?.iter()) {
            t.merge(p);
        }
    }
    Ok(total)
}

/// Estimate of `V(Ψ) = E[‖Φ − Ψ‖²]`.
pub fn mc_variance_disturbed<T: Real>(density: &IsotropicDensity<T>, n_samples: usize, seed: u64) -> Result<EstimateReport> {
    mc_variance_disturbed_from(&sampler(density)?, n_samples, seed)
}

pub fn mc_variance_disturbed_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    n_samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(n_samples)?;
    let acc = run_chunks(source, n_samples, seed, 1, |psi, _, acc| {
        acc[0].push(psi.deviation_sq().as_f64());
        Ok(())
    })?;
    Ok(acc[0].report(seed, Estimator::Sampled))
}

/// Estimate of `V(Φ̃)`, the mean squared deviation of the corrected state.
pub fn mc_variance_corrected<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<EstimateReport> {
    mc_variance_corrected_from(&sampler(density)?, code, n_samples, seed, estimator)
}

pub fn mc_variance_corrected_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
    estimator: Estimator,
) -> Result<EstimateReport> {
    check_samples(n_samples)?;
    check_dims(source, code)?;
    let acc = run_chunks(source, n_samples, seed, 1, |psi, rng, acc| {
        let value = match estimator {
            Estimator::Sampled => {
                let outcome = measure_and_correct(&psi, code, rng)?;
                outcome.corrected.map_or(T::zero(), |c| c.deviation_sq())
            }
            Estimator::RaoBlackwell => {
                correct_all_branches(&psi, code)?.iter().map(|b| b.weighted_deviation_sq()).sum()
            }
        };
        acc[0].push(value.as_f64());
        Ok(())
    })?;
    Ok(acc[0].report(seed, estimator))
}

/// Per-syndrome mean of the exact probability `P_s`.
pub fn mc_syndrome_probs<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    mc_syndrome_probs_from(&sampler(density)?, code, n_samples, seed)
}

pub fn mc_syndrome_probs_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(n_samples)?;
    check_dims(source, code)?;
    let acc = run_chunks(source, n_samples, seed, code.syndromes(), |psi, _, acc| {
        for (a, p) in acc.iter_mut().zip(syndrome_probabilities(&psi, code)?) {
            a.push(p.as_f64());
        }
        Ok(())
    })?;
    Ok(acc.iter().map(|a| a.report(seed, Estimator::RaoBlackwell)).collect())
}

/// Per-syndrome frequency of the simulated measurement outcome.
pub fn mc_syndrome_frequencies<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    mc_syndrome_frequencies_from(&sampler(density)?, code, n_samples, seed)
}

pub fn mc_syndrome_frequencies_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(n_samples)?;
    check_dims(source, code)?;
    let acc = run_chunks(source, n_samples, seed, code.syndromes(), |psi, rng, acc| {
        let s = measure_and_correct(&psi, code, rng)?.syndrome;
        for (k, a) in acc.iter_mut().enumerate() {
            a.push(if k == s { 1.0 } else { 0.0 });
        }
        Ok(())
    })?;
    Ok(acc.iter().map(|a| a.report(seed, Estimator::Sampled)).collect())
}

/// Per-syndrome mean of `P_s·‖Φ − Φ̃_s‖²`; the entries sum to the
/// Rao-Blackwellized estimate of `V(Φ̃)`.
pub fn mc_branch_contributions<T: Real>(
    density: &IsotropicDensity<T>,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    mc_branch_contributions_from(&sampler(density)?, code, n_samples, seed)
}

pub fn mc_branch_contributions_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    code: &CodeParams,
    n_samples: usize,
    seed: u64,
) -> Result<Vec<EstimateReport>> {
    check_samples(n_samples)?;
    check_dims(source, code)?;
    let acc = run_chunks(source, n_samples, seed, code.syndromes(), |psi, _, acc| {
        for (a, b) in acc.iter_mut().zip(correct_all_branches(&psi, code)?) {
            a.push(b.weighted_deviation_sq().as_f64());
        }
        Ok(())
    })?;
    Ok(acc.iter().map(|a| a.report(seed, Estimator::RaoBlackwell)).collect())
}

/// Estimate of the phase-insensitive variance `2 − 2·E[|α0|]`.
pub fn mc_quantum_variance<T: Real>(density: &IsotropicDensity<T>, n_samples: usize, seed: u64) -> Result<EstimateReport> {
    mc_quantum_variance_from(&sampler(density)?, n_samples, seed)
}

pub fn mc_quantum_variance_from<T: Real, S: StateSource<T> + ?Sized>(
    source: &S,
    n_samples: usize,
    seed: u64,
) -> Result<EstimateReport> {
    check_samples(n_samples)?;
    let acc = run_chunks(source, n_samples, seed, 1, |psi, _, acc| {
        acc[0].push(psi.phase_deviation_sq().as_f64());
        Ok(())
    })?;
    Ok(acc[0].report(seed, Estimator::Sampled))
}
