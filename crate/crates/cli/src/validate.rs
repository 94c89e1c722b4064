//! Identity and closed-form checks run by `isoqec validate`.

use std::f64::consts::PI;

use isoqec::code::CodeParams;
use isoqec::distributions::{check_normalization_with, IsotropicDensity, Theta0Sampler};
use isoqec::numerics::{
    cos_sin_halfpi_integral, double_factorial, double_factorial_exact, integrate_with, kernel_integral,
    kernel_integrand, sphere_surface, sum_series_with, wallis_integral, KernelKind, LogScaled, QuadOptions,
    SeriesOptions,
};
use isoqec::theory::{self, raw, TheoryTolerances};
use isoqec::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const SIGMA_GRID: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 0.9];

/// Observed discrepancy and the largest one accepted.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measured {
    pub error: f64,
    pub limit: f64,
}

impl Measured {
    pub fn pass(&self) -> bool {
        self.error <= self.limit
    }
}

#[derive(Debug)]
pub struct Check {
    pub name: String,
    pub outcome: Result<Measured>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ValidateOptions {
    /// Quadrature tolerance used inside the checks.
    pub tol: f64,
    /// Corrupt `7!!` as a negative control.
    pub inject_fault: bool,
}

struct Ctx {
    tol: f64,
    fault: bool,
}

impl Ctx {
    fn quad(&self, f: impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
        let r = integrate_with(f, a, b, &QuadOptions::new(self.tol).with_l1_rel_tol(self.tol))?;
        Ok((r.value, r.l1_norm))
    }

    fn df(&self, k: i64) -> Result<f64> {
        let v = double_factorial::<f64>(k)?.value();
        Ok(if self.fault && k == 7 { v + 1.0 } else { v })
    }

    fn theory_tol(&self) -> TheoryTolerances<f64> {
        TheoryTolerances { quad_rel_tol: self.tol, ..TheoryTolerances::default() }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn max_of(it: impl IntoIterator<Item = Result<f64>>) -> Result<f64> {
    it.into_iter().try_fold(0.0f64, |m, e| Ok(m.max(e?)))
}

fn measured(error: f64, limit: f64) -> Result<Measured> {
    Ok(Measured { error, limit })
}

fn double_factorial_checks(ctx: &Ctx, out: &mut Vec<Check>) {
    for (k, expected) in [(-1i64, 1.0), (6, 48.0), (7, 105.0)] {
        out.push(Check {
            name: format!("double factorial {k}!! = {expected}"),
            outcome: ctx.df(k).and_then(|v| measured((v - expected).abs(), 0.0)),
        });
    }
    out.push(Check {
        name: "k!! (k-1)!! = k! for k = 1..20".into(),
        outcome: max_of((1..=20i64).map(|k| {
            let fact: f64 = (1..=k).map(|j| j as f64).product();
            Ok(rel(ctx.df(k)? * ctx.df(k - 1)?, fact))
        }))
        .and_then(|e| measured(e, 1e-15)),
    });
    out.push(Check {
        name: "exact and log-scaled double factorials agree for k <= 60".into(),
        outcome: max_of((0..=60i64).filter_map(|k| {
            double_factorial_exact(k).map(|e| Ok(rel(double_factorial::<f64>(k)?.value(), e as f64)))
        }))
        .and_then(|e| measured(e, 1e-15)),
    });
    out.push(Check {
        name: "log-scaled round trip over 1e-300..1e300".into(),
        outcome: max_of((-300..=300).step_by(7).map(|e| {
            let x = 1.234_567_890_123 * 10f64.powi(e);
            Ok(rel(LogScaled::from_value(x).value(), x))
        }))
        .and_then(|e| measured(e, 1e-14)),
    });
}

fn integral_checks(ctx: &Ctx, out: &mut Vec<Check>) {
    out.push(Check {
        name: "sine power integral vs quadrature, k = 0..40".into(),
        outcome: max_of((0..=40u32).map(|k| {
            let (q, _) = ctx.quad(|t| t.sin().powi(k as i32), 0.0, PI)?;
            Ok(rel(wallis_integral::<f64>(k), q))
        }))
        .and_then(|e| measured(e, 1e-9)),
    });
    out.push(Check {
        name: "sine power product identity, even k <= 40".into(),
        outcome: max_of((0..=40u32).step_by(2).map(|k| {
            Ok(rel(wallis_integral::<f64>(k) * wallis_integral::<f64>(k + 1), 2.0 * PI / f64::from(k + 1)))
        }))
        .and_then(|e| measured(e, 1e-12)),
    });
    out.push(Check {
        name: "cos^a sin^b on [0, pi/2] vs quadrature, a, b <= 10".into(),
        outcome: max_of((0..=10u32).flat_map(|a| (0..=10u32).map(move |b| (a, b))).map(|(a, b)| {
            let (q, _) = ctx.quad(|t| t.cos().powi(a as i32) * t.sin().powi(b as i32), 0.0, PI / 2.0)?;
            Ok(rel(cos_sin_halfpi_integral::<f64>(a, b), q))
        }))
        .and_then(|e| measured(e, 1e-9)),
    });
    for kind in KernelKind::ALL {
        out.push(Check {
            name: format!("{} kernel integral vs quadrature, d = {}..8", kind.name(), kind.min_d().max(1)),
            outcome: max_of(
                (kind.min_d()..=8)
                    .flat_map(|d| SIGMA_GRID.iter().map(move |&s| (d, s)))
                    .map(|(d, s)| {
                        let closed = kernel_integral::<f64>(kind, d, s)?;
                        let (q, l1) = ctx.quad(|t| kernel_integrand(kind, d, s, t), 0.0, PI)?;
                        Ok((closed - q).abs() / closed.abs().max(l1))
                    }),
            )
            .and_then(|e| measured(e, 1e-9)),
        });
    }
    for (dim, expected) in [(1u32, 2.0 * PI), (2, 4.0 * PI), (3, 2.0 * PI * PI)] {
        out.push(Check {
            name: format!("sphere surface |S_{dim}|"),
            outcome: sphere_surface::<f64>(dim).and_then(|s| measured(rel(s.value(), expected), 1e-15)),
        });
    }
    out.push(Check {
        name: "sphere surfaces match shell recursion, dim <= 25".into(),
        outcome: max_of((2..=25u32).map(|dim| {
            let shell = sphere_surface::<f64>(dim - 1)?.value() * wallis_integral::<f64>(dim - 1);
            Ok(rel(sphere_surface::<f64>(dim)?.value(), shell))
        }))
        .and_then(|e| measured(e, 1e-12)),
    });
}

fn series_checks(out: &mut Vec<Check>) {
    out.push(Check {
        name: "geometric series sum".into(),
        outcome: sum_series_with(|k| Ok(0.5f64.powi(k as i32)), &SeriesOptions::new(1e-13, 1000))
            .and_then(|s| measured((s.value - 1.0).abs(), 1e-12)),
    });
    out.push(Check {
        name: "zero series sum".into(),
        outcome: sum_series_with(|_| Ok(0.0f64), &SeriesOptions::new(1e-12, 100))
            .and_then(|s| measured(s.value.abs(), 0.0)),
    });
}

fn density_checks(ctx: &Ctx, out: &mut Vec<Check>) {
    for d in [4usize, 8, 16, 256] {
        out.push(Check {
            name: format!("normal density normalized, d = {d}"),
            outcome: max_of(SIGMA_GRID.iter().map(|&s| check_normalization_with(&IsotropicDensity::normal(s, d)?, ctx.tol)))
                .and_then(|e| measured(e, 1e-9)),
        });
    }
    out.push(Check {
        name: "uniform and hemisphere densities normalized".into(),
        outcome: max_of([4usize, 8].into_iter().flat_map(|d| {
            [
                IsotropicDensity::uniform(d).and_then(|u| check_normalization_with(&u, ctx.tol)),
                IsotropicDensity::hemisphere(d).and_then(|h| check_normalization_with(&h, ctx.tol)),
            ]
        }))
        .and_then(|e| measured(e, 1e-9)),
    });
    out.push(Check {
        name: "sampler inverts its own CDF, d = 8, sigma = 0.9".into(),
        outcome: (|| {
            let s = Theta0Sampler::new(IsotropicDensity::normal(0.9, 8)?, 1024)?;
            Ok(s.cdf(-1.0f64).abs().max((s.cdf(1.0f64) - 1.0).abs()).max(
                (1..100).map(|i| (s.cdf(s.invert(i as f64 / 100.0)) - i as f64 / 100.0).abs()).fold(0.0, f64::max),
            ))
        })()
        .and_then(|e| measured(e, 1e-9)),
    });
}

fn theory_checks(ctx: &Ctx, out: &mut Vec<Check>) {
    let tt = ctx.theory_tol();
    let grid = [0.0, 0.1, 0.5, 0.9, 0.99];
    for d in [4usize, 8, 16, 256] {
        out.push(Check {
            name: format!("disturbed variance equals 2(1 - sigma), d = {d}"),
            outcome: max_of(grid.iter().map(|&s| {
                Ok((theory::variance_disturbed_with(&IsotropicDensity::normal(s, d)?, &tt)? - 2.0 * (1.0 - s)).abs())
            }))
            .and_then(|e| measured(e, 1e-8)),
        });
    }
    out.push(Check {
        name: "second moments of the normal family".into(),
        outcome: max_of([4usize, 8, 16].into_iter().flat_map(|d| grid.iter().map(move |&s| (d, s))).map(|(d, s)| {
            let m = theory::second_moments_with(&IsotropicDensity::normal(s, d)?, &tt)?;
            let df = d as f64;
            let x0 = (1.0 + (2.0 * df - 1.0) * s * s) / (2.0 * df);
            let xj = (1.0 - s * s) / (2.0 * df);
            Ok((m.ex0sq - x0).abs().max((m.exjsq - xj).abs()))
        }))
        .and_then(|e| measured(e, 1e-10)),
    });
    out.push(Check {
        name: "fidelity of the normal family".into(),
        outcome: max_of([4usize, 8].into_iter().flat_map(|d| grid.iter().map(move |&s| (d, s))).map(|(d, s)| {
            let f = theory::fidelity_isotropic(&IsotropicDensity::normal(s, d)?)?;
            let df = d as f64;
            Ok((f * f - (1.0 + (df - 1.0) * s * s) / df).abs())
        }))
        .and_then(|e| measured(e, 1e-10)),
    });
    for (n, m) in [(2u32, 1u32), (3, 1), (3, 2), (4, 2)] {
        out.push(Check {
            name: format!("expected P_0 of the normal family, code ({n},{m})"),
            outcome: (|| {
                let code = CodeParams::new(n, m)?;
                let dpp = code.syndromes() as f64;
                max_of([0.0, 0.5, 0.9].iter().map(|&s| {
                    let e = theory::syndrome_prob_expectations_with(&IsotropicDensity::normal(s, code.d())?, &code, &tt)?;
                    let closed = 1.0 - (dpp - 1.0) / dpp * (1.0 - s * s);
                    Ok((e.e_p0 - closed).abs().max((e.e_p0 + (dpp - 1.0) * e.e_ps - 1.0).abs()))
                }))
            })()
            .and_then(|e| measured(e, 1e-8)),
        });
    }
    out.push(Check {
        name: "stabilized and raw forms agree, d = 2, 4, 8".into(),
        outcome: max_of([(1u32, 0u32), (2, 1), (3, 1), (3, 2)].into_iter().flat_map(|(n, m)| {
            [0.3, 0.7].into_iter().map(move |s| -> Result<f64> {
                let d = 1usize << n;
                let dens = IsotropicDensity::normal(s, d)?;
                let mut e = (raw::variance_disturbed(&dens, &tt)? - theory::variance_disturbed_with(&dens, &tt)?).abs();
                let (a, b) = (raw::second_moments(&dens, &tt)?, theory::second_moments_with(&dens, &tt)?);
                e = e.max((a.ex0sq - b.ex0sq).abs()).max((a.exjsq - b.exjsq).abs());
                e = e.max((a.ealpha0sq - b.ealpha0sq).abs()).max((a.ealphaksq - b.ealphaksq).abs());
                if m > 0 {
                    let code = CodeParams::new(n, m)?;
                    let p = raw::syndrome_prob_expectations(&dens, &code, &tt)?;
                    let q = theory::syndrome_prob_expectations_with(&dens, &code, &tt)?;
                    e = e.max((p.e_p0_direct - q.e_p0).abs()).max((p.e_p0_complement - q.e_p0).abs());
                    e = e.max((p.e_ps - q.e_ps).abs());
                    let vr = raw::variance_corrected(&dens, &code, &tt)?;
                    let vs = theory::variance_disturbed_with(&dens, &tt)? + theory::correction_series(&dens, &code, &tt)?.value;
                    e = e.max((vr - vs).abs());
                }
                Ok(e)
            })
        }))
        .and_then(|e| measured(e, 1e-10)),
    });
    out.push(Check {
        name: "correction ratios match direct double factorials".into(),
        outcome: max_of([(2u32, 1u32), (3, 1), (3, 2), (4, 2)].into_iter().flat_map(|(n, m)| {
            let code = CodeParams::new(n, m).expect("valid code");
            let (d, dl) = (code.d() as i64, code.d_logical() as i64);
            theory::CorrectionRatios::<f64>::new(&code).take(200).enumerate().map(move |(k, r)| {
                let scale = (double_factorial::<f64>(2 * d - 3)? / double_factorial::<f64>(2 * d - 2 * dl - 2)?).value();
                Ok(rel(r, raw::correction_coefficient::<f64>(d, dl, k as i64 + 1)? * scale))
            })
        }))
        .and_then(|e| measured(e, 1e-12)),
    });
    out.push(Check {
        name: "uniform errors: correction leaves variance at 2".into(),
        outcome: max_of([(2u32, 1u32), (3, 1), (3, 2)].into_iter().map(|(n, m)| {
            let code = CodeParams::new(n, m)?;
            let u = IsotropicDensity::uniform(code.d())?;
            Ok((theory::variance_corrected(&u, &code, 1e-10f64)? - 2.0).abs())
        }))
        .and_then(|e| measured(e, 1e-9)),
    });
    out.push(Check {
        name: "whole-space code has zero gap".into(),
        outcome: theory::variance_gap(&IsotropicDensity::normal(0.5f64, 4).expect("valid"), &CodeParams::whole_space(2))
            .and_then(|g: f64| measured(g.abs(), 0.0)),
    });
    out.push(Check {
        name: "normal errors: gap is positive".into(),
        outcome: max_of([(2u32, 1u32), (3, 1), (3, 2)].into_iter().flat_map(|(n, m)| {
            [0.25, 0.5, 0.75].into_iter().map(move |s| {
                let code = CodeParams::new(n, m)?;
                let g = theory::variance_gap(&IsotropicDensity::normal(s, code.d())?, &code)?;
                Ok(if g > 0.0 { 0.0 } else { 1.0 - g })
            })
        }))
        .and_then(|e| measured(e, 0.0)),
    });
    out.push(Check {
        name: "hemisphere errors: gap is non-negative".into(),
        outcome: max_of([(2u32, 1u32), (3, 1)].into_iter().map(|(n, m)| {
            let code = CodeParams::new(n, m)?;
            Ok((-theory::variance_gap(&IsotropicDensity::<f64>::hemisphere(code.d())?, &code)?).max(0.0))
        }))
        .and_then(|e| measured(e, 1e-9)),
    });
}

pub fn run_checks(opts: &ValidateOptions) -> Vec<Check> {
    let ctx = Ctx { tol: opts.tol, fault: opts.inject_fault };
    let mut out = Vec::new();
    double_factorial_checks(&ctx, &mut out);
    integral_checks(&ctx, &mut out);
    series_checks(&mut out);
    density_checks(&ctx, &mut out);
    theory_checks(&ctx, &mut out);
    out
}

/// Whether any check failed to evaluate because a computation did not converge.
pub fn has_numerical_failure(checks: &[Check]) -> bool {
    checks.iter().any(|c| matches!(c.outcome, Err(Error::NumericalFailure { .. })))
}
