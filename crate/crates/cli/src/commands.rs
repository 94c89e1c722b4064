use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use isoqec::code::CodeParams;
use isoqec::distributions::{IsotropicDensity, Theta0Sampler, DEFAULT_GRID_SIZE};
use isoqec::experiments::{
    mc_syndrome_probs, mc_uniformity_test_from, mc_variance_corrected, mc_variance_disturbed, sweep, Estimator,
    UniformityOptions, MIN_SAMPLES,
};
use isoqec::theory::{theory_report, TheoryTolerances};

use crate::format::{csv_row, provenance, real};
use crate::validate::{has_numerical_failure, run_checks, ValidateOptions};
use crate::{
    Command, DensityArgs, Failure, OutputFormat, SweepArgs, UniformityArgs, ValidateArgs, VarianceArgs,
};

type CmdResult = Result<(), Failure>;

pub(crate) const SWEEP_HEADER: &str =
    "sigma,n,m,v_psi_theory,v_psi_mc,v_psi_se,v_corr_theory,v_corr_mc,v_corr_se,gap_theory,e_p0_theory,e_p0_mc";

pub(crate) fn dispatch(cmd: &Command, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CmdResult {
    match cmd {
        Command::Validate(a) => validate(a, stdout),
        Command::Density(a) => density(a, stdout),
        Command::Variance(a) => variance(a, stdout),
        Command::Sweep(a) => sweep_cmd(a, stdout, stderr),
        Command::Uniformity(a) => uniformity(a, stdout),
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure::Usage(msg.into()))
}

fn check_sigma(sigma: f64) -> CmdResult {
    if !(0.0..1.0).contains(&sigma) {
        return usage(format!("--sigma must lie in [0, 1), got {sigma}"));
    }
    Ok(())
}

fn check_samples(samples: usize) -> CmdResult {
    if samples < MIN_SAMPLES {
        return usage(format!("--samples must be at least {MIN_SAMPLES}, got {samples}"));
    }
    Ok(())
}

fn check_tol(tol: f64) -> CmdResult {
    if !(tol > 0.0 && tol.is_finite()) {
        return usage(format!("--tol must be positive, got {tol}"));
    }
    Ok(())
}

fn check_qubits(n: u32) -> CmdResult {
    if !(1..=isoqec::code::MAX_QUBITS).contains(&n) {
        return usage(format!("--n must lie in 1..={}, got {n}", isoqec::code::MAX_QUBITS));
    }
    Ok(())
}

/// Write `text` to `path`, or to `stdout` when no path is given.
fn emit(path: Option<&Path>, stdout: &mut (dyn Write + Send), text: &str) -> CmdResult {
    match path {
        Some(p) => {
            let mut w = BufWriter::new(File::create(p)?);
            w.write_all(text.as_bytes())?;
            w.flush()?;
        }
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn validate(a: &ValidateArgs, stdout: &mut (dyn Write + Send)) -> CmdResult {
    check_tol(a.tol)?;
    let checks = run_checks(&ValidateOptions { tol: a.tol, inject_fault: a.inject_fault });
    let mut passed = 0;
    for c in &checks {
        match &c.outcome {
            Ok(m) if m.pass() => {
                passed += 1;
                writeln!(stdout, "PASS   {}  (error {:.3e}, limit {:.1e})", c.name, m.error, m.limit)?;
            }
            Ok(m) => writeln!(stdout, "FAIL   {}  (error {:.3e}, limit {:.1e})", c.name, m.error, m.limit)?,
            Err(e) => writeln!(stdout, "ERROR  {}: {e}", c.name)?,
        }
    }
    writeln!(stdout, "{passed} of {} checks passed", checks.len())?;
    if has_numerical_failure(&checks) {
        return Err(Failure::Numerical("a check did not converge".into()));
    }
    if passed < checks.len() {
        return Err(Failure::Validation(format!("{} checks failed", checks.len() - passed)));
    }
    Ok(())
}

fn density(a: &DensityArgs, stdout: &mut (dyn Write + Send)) -> CmdResult {
    check_sigma(a.sigma)?;
    check_qubits(a.n)?;
    if a.points < 2 {
        return usage(format!("--points must be at least 2, got {}", a.points));
    }
    let d = 1usize << a.n;
    let dens = IsotropicDensity::normal(a.sigma, d)?;
    let mut text = provenance(
        "density",
        &[("sigma", a.sigma.to_string()), ("n", a.n.to_string()), ("points", a.points.to_string())],
    );
    text.push_str("\ntheta,f\n");
    for i in 0..a.points {
        let theta = std::f64::consts::PI * i as f64 / (a.points - 1) as f64;
        text.push_str(&csv_row([real(theta), real(dens.density(theta))]));
        text.push('\n');
    }
    emit(a.out.as_deref(), stdout, &text)
}

fn variance(a: &VarianceArgs, stdout: &mut (dyn Write + Send)) -> CmdResult {
    check_sigma(a.sigma)?;
    check_samples(a.samples)?;
    check_tol(a.tol)?;
    let code = CodeParams::new(a.n, a.m)?;
    let dens = IsotropicDensity::normal(a.sigma, code.d())?;
    let theory = theory_report(&dens, &code, &TheoryTolerances::default().with_series_rel_tol(a.tol))?;
    let v_psi = mc_variance_disturbed(&dens, a.samples, a.seed)?;
    let v_sampled = mc_variance_corrected(&dens, &code, a.samples, a.seed, Estimator::Sampled)?;
    let v_rb = mc_variance_corrected(&dens, &code, a.samples, a.seed, Estimator::RaoBlackwell)?;
    let probs = mc_syndrome_probs(&dens, &code, a.samples, a.seed)?;
    let others = (code.syndromes() - 1) as f64;
    let e_ps_mc = (1.0 - probs[0].mean) / others;
    let e_ps_se = probs[0].std_error / others;

    let fields = [
        ("sigma", a.sigma.to_string()),
        ("n", a.n.to_string()),
        ("m", a.m.to_string()),
        ("samples", a.samples.to_string()),
        ("seed", a.seed.to_string()),
        ("tol", a.tol.to_string()),
    ];
    let text = match a.output.format {
        OutputFormat::Csv => {
            let mut t = provenance("variance", &fields);
            t.push_str(
                "\nsigma,n,m,samples,seed,v_psi_theory,v_psi_mc,v_psi_se,v_corr_theory,v_corr_sampled_mc,\
                 v_corr_sampled_se,v_corr_rb_mc,v_corr_rb_se,gap_theory,e_p0_theory,e_p0_mc,e_p0_se,\
                 e_ps_theory,e_ps_mc,e_ps_se\n",
            );
            t.push_str(&csv_row([
                real(a.sigma),
                a.n.to_string(),
                a.m.to_string(),
                a.samples.to_string(),
                a.seed.to_string(),
                real(theory.v_disturbed),
                real(v_psi.mean),
                real(v_psi.std_error),
                real(theory.v_corrected),
                real(v_sampled.mean),
                real(v_sampled.std_error),
                real(v_rb.mean),
                real(v_rb.std_error),
                real(theory.gap),
                real(theory.e_p0),
                real(probs[0].mean),
                real(probs[0].std_error),
                real(theory.e_ps),
                real(e_ps_mc),
                real(e_ps_se),
            ]));
            t.push('\n');
            t
        }
        OutputFormat::Pretty => {
            let mut t = provenance("variance", &fields);
            t.push_str(&format!(
                "\ncode: n = {}, m = {}, d = {}, d' = {}, {} syndromes\n",
                a.n,
                a.m,
                code.d(),
                code.d_logical(),
                code.syndromes()
            ));
            t.push_str(&format!("{:<24}{:>24}{:>24}{:>14}\n", "quantity", "theory", "simulation", "std error"));
            let line = |name: &str, th: f64, mc: f64, se: f64| format!("{name:<24}{th:>24.16}{mc:>24.16}{se:>14.3e}\n");
            t.push_str(&line("V(disturbed)", theory.v_disturbed, v_psi.mean, v_psi.std_error));
            t.push_str(&line("V(corrected) sampled", theory.v_corrected, v_sampled.mean, v_sampled.std_error));
            t.push_str(&line("V(corrected) all-branch", theory.v_corrected, v_rb.mean, v_rb.std_error));
            t.push_str(&format!("{:<24}{:>24.16}\n", "gap", theory.gap));
            t.push_str(&format!("series terms used: {}\n", theory.series_terms_used));
            t.push_str(&format!("{:<24}{:>24}{:>24}{:>14}\n", "syndrome", "E[P_s] theory", "simulation", "std error"));
            for (s, p) in probs.iter().enumerate() {
                let th = if s == 0 { theory.e_p0 } else { theory.e_ps };
                t.push_str(&line(&s.to_string(), th, p.mean, p.std_error));
            }
            t
        }
    };
    emit(a.output.out.as_deref(), stdout, &text)
}

fn parse_code(spec: &str) -> Result<CodeParams, Failure> {
    let parts: Vec<&str> = spec.split(',').map(str::trim).collect();
    let [n, m] = parts.as_slice() else {
        return usage(format!("code spec must be `n,m`, got `{spec}`"));
    };
    let (Ok(n), Ok(m)) = (n.parse::<u32>(), m.parse::<u32>()) else {
        return usage(format!("code spec must be two integers, got `{spec}`"));
    };
    CodeParams::new(n, m).map_err(|e| Failure::Usage(format!("code `{spec}`: {e}")))
}

fn sweep_cmd(a: &SweepArgs, stdout: &mut (dyn Write + Send), stderr: &mut (dyn Write + Send)) -> CmdResult {
    a.sigma_list.iter().try_for_each(|&s| check_sigma(s))?;
    check_samples(a.samples)?;
    check_tol(a.tol)?;
    let codes = a.codes.iter().flat_map(|c| c.split_whitespace()).map(parse_code).collect::<Result<Vec<_>, _>>()?;
    let rows = sweep(&a.sigma_list, &codes, a.samples, a.seed, a.tol)?;

    let sigmas = a.sigma_list.iter().map(f64::to_string).collect::<Vec<_>>().join(",");
    let code_list = codes.iter().map(|c| format!("{}:{}", c.n(), c.m())).collect::<Vec<_>>().join(",");
    let mut text = provenance(
        "sweep",
        &[
            ("sigma-list", sigmas),
            ("codes", code_list),
            ("samples", a.samples.to_string()),
            ("seed", a.seed.to_string()),
            ("tol", a.tol.to_string()),
        ],
    );
    text.push('\n');
    text.push_str(SWEEP_HEADER);
    text.push('\n');
    let mut failed = 0;
    let mut min_gap: Option<(f64, f64, u32, u32)> = None;
    for r in &rows {
        let head = [real(r.sigma), r.n.to_string(), r.m.to_string()];
        match &r.values {
            Ok(v) => {
                if min_gap.is_none_or(|(g, ..)| v.gap_theory < g) {
                    min_gap = Some((v.gap_theory, r.sigma, r.n, r.m));
                }
                let cells = [
                    v.v_psi_theory,
                    v.v_psi_mc.mean,
                    v.v_psi_mc.std_error,
                    v.v_corr_theory,
                    v.v_corr_mc.mean,
                    v.v_corr_mc.std_error,
                    v.gap_theory,
                    v.e_p0_theory,
                    v.e_p0_mc.mean,
                ];
                text.push_str(&csv_row(head.into_iter().chain(cells.into_iter().map(real))));
            }
            Err(e) => {
                failed += 1;
                text.push_str(&format!("# error sigma={} n={} m={}: {e}\n", r.sigma, r.n, r.m));
                text.push_str(&csv_row(head.into_iter().chain(std::iter::repeat_n("NaN".to_owned(), 9))));
            }
        }
        text.push('\n');
    }
    emit(a.out.as_deref(), stdout, &text)?;
    match min_gap {
        Some((g, s, n, m)) => writeln!(stderr, "min gap_theory over {} rows: {} (sigma={s}, n={n}, m={m})", rows.len(), real(g))?,
        None => writeln!(stderr, "no rows computed")?,
    }
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} of {} rows failed", rows.len())));
    }
    Ok(())
}

fn uniformity(a: &UniformityArgs, stdout: &mut (dyn Write + Send)) -> CmdResult {
    check_sigma(a.sigma)?;
    check_samples(a.samples)?;
    let code = CodeParams::new(a.n, a.m)?;
    if a.syndrome == 0 || a.syndrome >= code.syndromes() {
        return usage(format!(
            "--syndrome must lie in 1..{} (a detected error), got {}",
            code.syndromes(),
            a.syndrome
        ));
    }
    let sampler = Theta0Sampler::new(IsotropicDensity::normal(a.sigma, code.d())?, DEFAULT_GRID_SIZE)?;
    let opts = UniformityOptions { histogram_bins: a.histogram_bins };
    let r = mc_uniformity_test_from(&sampler, &code, a.syndrome, a.samples, a.seed, &opts)?;
    let mut text = provenance(
        "uniformity",
        &[
            ("sigma", a.sigma.to_string()),
            ("n", a.n.to_string()),
            ("m", a.m.to_string()),
            ("syndrome", a.syndrome.to_string()),
            ("samples", a.samples.to_string()),
            ("seed", a.seed.to_string()),
        ],
    );
    text.push('\n');
    text.push_str(&format!("syndrome {}: {} of {} samples\n", r.syndrome, r.n_hits, a.samples));
    text.push_str(&format!(
        "E[cos]   = {} +/- {} (target 0)\n",
        real(r.moment1.mean),
        real(r.moment1.std_error)
    ));
    text.push_str(&format!(
        "E[cos^2] = {} +/- {} (target {})\n",
        real(r.moment2.mean),
        real(r.moment2.std_error),
        real(r.moment2_target())
    ));
    if let Some(h) = r.histogram {
        text.push_str(&format!(
            "histogram: chi-square {:.4} with {} bins, critical {:.4}: {}\n",
            h.chi_square,
            h.bins,
            h.critical_value,
            if h.pass { "pass" } else { "fail" }
        ));
    }
    text.push_str(if r.pass { "uniform: pass\n" } else { "uniform: fail\n" });
    stdout.write_all(text.as_bytes())?;
    if !r.pass {
        return Err(Failure::Validation("corrected states are not uniform at 3 standard errors".into()));
    }
    Ok(())
}
