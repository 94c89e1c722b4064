use super::{check_samples, run_chunks, sampler, EstimateReport, Estimator};
use crate::code::{correct_all_branches, CodeParams};
use crate::distributions::IsotropicDensity;
use crate::error::{domain, Error, Result};
use crate::theory::{theory_report, TheoryTolerances};

/// Theory and simulation side by side for one `(σ, code)` point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepValues {
    pub v_psi_theory: f64,
    pub v_psi_mc: EstimateReport,
    pub v_corr_theory: f64,
    /// Rao-Blackwellized, on the same states as `v_psi_mc`.
    pub v_corr_mc: EstimateReport,
    pub gap_theory: f64,
    pub e_p0_theory: f64,
    pub e_p0_mc: EstimateReport,
    pub series_terms_used: usize,
}

#[derive(Debug)]
pub struct SweepRow {
    pub sigma: f64,
    pub n: u32,
    pub m: u32,
    pub values: std::result::Result<SweepValues, Error>,
}

fn row(sigma: f64, code: &CodeParams, n_samples: usize, seed: u64, rel_tol: f64) -> Result<SweepValues> {
    let density = IsotropicDensity::normal(sigma, code.d())?;
    let tol = TheoryTolerances::default().with_series_rel_tol(rel_tol);
    let theory = theory_report(&density, code, &tol)?;
    let acc = run_chunks(&sampler(&density)?, n_samples, seed, 3, |psi, _, acc| {
        let branches = correct_all_branches(&psi, code)?;
        acc[0].push(psi.deviation_sq());
        acc[1].push(branches.iter().map(|b| b.weighted_deviation_sq()).sum());
        acc[2].push(branches[0].probability);
        Ok(())
    })?;
    Ok(SweepValues {
        v_psi_theory: theory.v_disturbed,
        v_psi_mc: acc[0].report(seed, Estimator::Sampled),
        v_corr_theory: theory.v_corrected,
        v_corr_mc: acc[1].report(seed, Estimator::RaoBlackwell),
        gap_theory: theory.gap,
        e_p0_theory: theory.e_p0,
        e_p0_mc: acc[2].report(seed, Estimator::RaoBlackwell),
        series_terms_used: theory.series_terms_used,
    })
}

/// Seed of row `index`; rows draw independent samples.
pub fn row_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_add(index as u64)
}

/// One row per `(σ, code)` pair, σ-major. Failures are kept per row.
pub fn sweep(sigmas: &[f64], codes: &[CodeParams], n_samples: usize, seed: u64, rel_tol: f64) -> Result<Vec<SweepRow>> {
    if sigmas.is_empty() || codes.is_empty() {
        return domain("sweep needs at least one sigma and one code");
    }
    check_samples(n_samples)?;
    Ok(sigmas
        .iter()
        .flat_map(|&sigma| codes.iter().map(move |code| (sigma, code)))
        .enumerate()
        .map(|(i, (sigma, code))| SweepRow {
            sigma,
            n: code.n(),
            m: code.m(),
            values: row(sigma, code, n_samples, row_seed(seed, i), rel_tol),
        })
        .collect())
}
