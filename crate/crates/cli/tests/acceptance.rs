use std::process::Command;
use std::time::{Duration, Instant};

use isoqec::code::{correct_all_branches, syndrome_probabilities, CodeParams};
use isoqec::distributions::{IsotropicDensity, Theta0Sampler};
use isoqec::experiments::{
    mc_quantum_variance, mc_syndrome_frequencies, mc_uniformity_branches, mc_variance_corrected,
    mc_variance_disturbed, row_seed, sweep, Estimator,
};
use isoqec::numerics::{
    cos_sin_halfpi_integral, integrate_with, kernel_integral, kernel_integrand, sphere_surface, wallis_integral,
    KernelKind, QuadOptions,
};
use isoqec::state::StateVector;
use isoqec::theory::{self, raw, TheoryTolerances};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;
const N: usize = 100_000;
const CODES: [(u32, u32); 4] = [(2, 1), (3, 1), (3, 2), (4, 2)];
const SIGMAS: [f64; 3] = [0.0, 0.5, 0.9];

type Outcome = Result<String, String>;

/// Seed of grid point `point` in criterion `criterion`; no two draws share a stream.
fn seed(criterion: u64, point: usize) -> u64 {
    row_seed(SEED + criterion * 1_000_000, point)
}

fn code(n: u32, m: u32) -> CodeParams {
    CodeParams::new(n, m).unwrap()
}

fn normal(sigma: f64, d: usize) -> IsotropicDensity<f64> {
    IsotropicDensity::normal(sigma, d).unwrap()
}

fn check(ok: bool, what: String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// `|got − want| ≤ rel · scale` with `scale = max(|want|, ∫|f|)`.
fn quad_match(name: &str, got: f64, f: impl Fn(f64) -> f64, a: f64, b: f64, rel: f64) -> Result<f64, String> {
    let q = integrate_with(f, a, b, &QuadOptions::new(1e-13).with_l1_rel_tol(1e-13)).map_err(err)?;
    let scale = q.value.abs().max(q.l1_norm);
    let e = (got - q.value).abs() / scale;
    check(e <= rel, format!("{name}: closed form {got:e} vs quadrature {:e}", q.value))?;
    Ok(e)
}

fn integrals() -> Outcome {
    let pi = std::f64::consts::PI;
    let mut worst = 0.0f64;
    for d in 1..=8u32 {
        for k in [2 * d - 2, 2 * d - 1, 2 * d] {
            let e = quad_match(&format!("sin^{k}"), wallis_integral(k), |t: f64| t.sin().powi(k as i32), 0.0, pi, 1e-9)?;
            worst = worst.max(e);
        }
        for (a, b) in [(0, 2 * d), (1, 2 * d - 1), (2, 2 * d - 2), (2 * d, 1)] {
            let f = |t: f64| t.cos().powi(a as i32) * t.sin().powi(b as i32);
            let e = quad_match(&format!("cos^{a} sin^{b}"), cos_sin_halfpi_integral(a, b), f, 0.0, pi / 2.0, 1e-9)?;
            worst = worst.max(e);
        }
        for sigma in [0.0, 0.25, 0.5, 0.75, 0.9] {
            for kind in KernelKind::ALL {
                let closed = kernel_integral(kind, d, sigma).map_err(err)?;
                let name = format!("{} kernel d={d} sigma={sigma}", kind.name());
                let e = quad_match(&name, closed, |t| kernel_integrand(kind, d, sigma, t), 0.0, pi, 1e-9)?;
                worst = worst.max(e);
            }
        }
    }
    let mut shell = 0.0f64;
    for dim in 2..=25u32 {
        let direct = sphere_surface::<f64>(dim).map_err(err)?.value();
        let product: f64 = 2.0 * pi * (1..dim).map(wallis_integral::<f64>).product::<f64>();
        let e = (direct - product).abs() / product;
        check(e <= 1e-12, format!("|S_{dim}| = {direct} vs shell product {product}"))?;
        shell = shell.max(e);
    }
    Ok(format!("worst integral error {worst:.1e}, worst surface error {shell:.1e}"))
}

fn disturbed_variance_closed_form() -> Outcome {
    let mut worst = 0.0f64;
    for d in [4, 8, 16, 256] {
        for sigma in [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99] {
            let v = theory::variance_disturbed(&normal(sigma, d)).map_err(err)?;
            let e = (v - 2.0 * (1.0 - sigma)).abs();
            check(e < 1e-8, format!("d={d} sigma={sigma}: {v}"))?;
            worst = worst.max(e);
        }
    }
    Ok(format!("worst deviation {worst:.1e}"))
}

fn disturbed_variance_simulated() -> Outcome {
    let r = mc_variance_disturbed(&normal(0.5, 8), N, seed(3, 0)).map_err(err)?;
    check(r.within(1.0, 3.0), format!("{} ± {} vs 1", r.mean, r.std_error))?;
    Ok(format!("{:.5} ± {:.1e}", r.mean, r.std_error))
}

fn syndrome_probabilities_match() -> Outcome {
    let mut i = 0;
    let mut worst_z = 0.0f64;
    for (n, m) in CODES {
        let c = code(n, m);
        let dpp = c.syndromes() as f64;
        for sigma in SIGMAS {
            let dens = normal(sigma, c.d());
            let th = theory::syndrome_prob_expectations(&dens, &c).map_err(err)?;
            let closed = 1.0 - (dpp - 1.0) / dpp * (1.0 - sigma * sigma);
            check((th.e_p0 - closed).abs() < 1e-8, format!("({n},{m}) sigma={sigma}: E[P0] {} vs {closed}", th.e_p0))?;
            let freq = mc_syndrome_frequencies(&dens, &c, N, seed(4, i)).map_err(err)?;
            i += 1;
            for (s, f) in freq.iter().enumerate() {
                let target = if s == 0 { th.e_p0 } else { th.e_ps };
                let z = (f.mean - target).abs() / f.std_error;
                check(f.within(target, 3.0), format!("({n},{m}) sigma={sigma} s={s}: {} ± {} vs {target}", f.mean, f.std_error))?;
                worst_z = worst_z.max(z);
            }
        }
    }
    Ok(format!("worst |z| {worst_z:.2}"))
}

fn corrected_variance_matches() -> Outcome {
    let tol = TheoryTolerances::default().with_series_rel_tol(1e-10);
    let mut i = 0;
    let (mut worst_z, mut most_terms) = (0.0f64, 0);
    for (n, m) in CODES {
        let c = code(n, m);
        for sigma in SIGMAS {
            let dens = normal(sigma, c.d());
            let series = theory::correction_series(&dens, &c, &tol).map_err(err)?;
            check(series.terms_used <= tol.k_max, format!("({n},{m}) sigma={sigma}: {} terms", series.terms_used))?;
            most_terms = most_terms.max(series.terms_used);
            let th = theory::variance_corrected(&dens, &c, 1e-10).map_err(err)?;
            let r = mc_variance_corrected(&dens, &c, N, seed(5, i), Estimator::RaoBlackwell).map_err(err)?;
            i += 1;
            let z = (r.mean - th).abs() / r.std_error;
            check(r.within(th, 3.0), format!("({n},{m}) sigma={sigma}: {} ± {} vs {th}", r.mean, r.std_error))?;
            worst_z = worst_z.max(z);
        }
    }
    Ok(format!("worst |z| {worst_z:.2}, at most {most_terms} series terms"))
}

fn correction_never_hurts() -> Outcome {
    let mut smallest = f64::INFINITY;
    for (n, m) in CODES {
        let c = code(n, m);
        for k in 1..=9 {
            let sigma = k as f64 / 10.0;
            for s in [sigma, sigma + 0.09] {
                let g = theory::variance_gap(&normal(s, c.d()), &c).map_err(err)?;
                check(g > 0.0, format!("({n},{m}) sigma={s}: gap {g}"))?;
                smallest = smallest.min(g);
            }
        }
        for (name, dens) in [
            ("uniform", IsotropicDensity::<f64>::uniform(c.d()).map_err(err)?),
            ("hemisphere", IsotropicDensity::<f64>::hemisphere(c.d()).map_err(err)?),
        ] {
            let g = theory::variance_gap(&dens, &c).map_err(err)?;
            check(g >= -1e-9, format!("({n},{m}) {name}: gap {g}"))?;
        }
    }
    let codes: Vec<CodeParams> = CODES.iter().map(|&(n, m)| code(n, m)).collect();
    let rows = sweep(&[0.0, 0.25, 0.5, 0.75, 0.9], &codes, N, seed(6, 0), 1e-10).map_err(err)?;
    let mut worst_z = 0.0f64;
    for row in &rows {
        let v = row.values.as_ref().map_err(err)?;
        let mc_gap = v.v_corr_mc.mean - v.v_psi_mc.mean;
        let se = (v.v_corr_mc.std_error.powi(2) + v.v_psi_mc.std_error.powi(2)).sqrt();
        let z = (mc_gap - v.gap_theory).abs() / se;
        let ok = mc_gap > 0.0 || z <= 3.0;
        check(ok, format!("({},{}) sigma={}: MC gap {mc_gap} ± {se} vs {}", row.n, row.m, row.sigma, v.gap_theory))?;
        if mc_gap <= 0.0 {
            worst_z = worst_z.max(z);
        }
    }
    Ok(format!("smallest normal gap {smallest:.2e}, {} MC rows, worst |z| of non-positive rows {worst_z:.2}", rows.len()))
}

fn conditioned_states_are_uniform() -> Outcome {
    let mut i = 0;
    let mut summary = Vec::new();
    for sigma in [0.5, 0.7] {
        for (n, m) in [(3, 1), (3, 2)] {
            let c = code(n, m);
            let reports = mc_uniformity_branches(&normal(sigma, c.d()), &c, 1_000_000, seed(7, i)).map_err(err)?;
            i += 1;
            for r in reports.iter().filter(|r| r.syndrome > 0) {
                check(
                    r.pass,
                    format!(
                        "({n},{m}) sigma={sigma} s={}: moments {} ± {}, {} ± {} vs 0, {}",
                        r.syndrome,
                        r.moment1.mean,
                        r.moment1.std_error,
                        r.moment2.mean,
                        r.moment2.std_error,
                        r.moment2_target()
                    ),
                )?;
                summary.push(r.n_hits);
            }
        }
    }
    let fewest = summary.iter().min().copied().unwrap_or(0);
    Ok(format!("{} branches, fewest hits {fewest}", summary.len()))
}

fn fidelity_bounds() -> Outcome {
    for (i, sigma) in [0.0, 0.25, 0.5, 0.75, 0.9].into_iter().enumerate() {
        let dens = normal(sigma, 8);
        let f = theory::fidelity_isotropic(&dens).map_err(err)?;
        let vq = mc_quantum_variance(&dens, N, seed(8, i)).map_err(err)?;
        let slack = 3.0 * vq.std_error;
        let lower = 1.0 - (vq.mean + slack) / 2.0;
        let upper = (1.0 - (vq.mean - slack) / 2.0).sqrt();
        check(lower <= f && f <= upper, format!("sigma={sigma}: {lower} <= {f} <= {upper} fails"))?;
    }
    Ok("5 sigma values".into())
}

fn uniform_state(rng: &mut ChaCha8Rng, sampler: &Theta0Sampler<f64>) -> StateVector<f64> {
    sampler.sample_state(rng)
}

fn cli_output(args: &[&str]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_isoqec")).args(args).output().map_err(err)?;
    check(out.status.success(), format!("isoqec {args:?} exited with {:?}", out.status.code()))?;
    Ok(out.stdout)
}

fn properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed(9, 0));
    let (mut trip, mut simplex, mut ident) = (0.0f64, 0.0f64, 0.0f64);
    for (n, m) in CODES {
        let c = code(n, m);
        let smp = Theta0Sampler::new(IsotropicDensity::<f64>::uniform(c.d()).map_err(err)?, 256).map_err(err)?;
        for _ in 0..2_500 {
            let psi = uniform_state(&mut rng, &smp);
            let back = psi.to_spherical().to_cartesian();
            trip = trip.max(psi.coords().iter().zip(back.coords()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max));
            let p = syndrome_probabilities(&psi, &c).map_err(err)?;
            check(p.iter().all(|&x| x >= 0.0), format!("negative probability {p:?}"))?;
            simplex = simplex.max((p.iter().sum::<f64>() - 1.0).abs());
            let b0 = &correct_all_branches(&psi, &c).map_err(err)?[0];
            let p0 = b0.probability;
            let rhs = 2.0 * p0 - 2.0 * psi.coords()[0] * p0.sqrt();
            ident = ident.max((b0.weighted_deviation_sq() - rhs).abs());
        }
    }
    check(trip <= 1e-10, format!("round trip error {trip:e}"))?;
    check(simplex <= 1e-12, format!("simplex error {simplex:e}"))?;
    check(ident <= 1e-10, format!("reference branch identity error {ident:e}"))?;

    let tol = TheoryTolerances::default();
    let mut forms = 0.0f64;
    for d in [2usize, 4, 8] {
        for sigma in [0.0, 0.3, 0.6, 0.9] {
            let dens = normal(sigma, d);
            let a = raw::variance_disturbed(&dens, &tol).map_err(err)?;
            let b = theory::variance_disturbed(&dens).map_err(err)?;
            forms = forms.max((a - b).abs());
            let (ra, rb) = (raw::second_moments(&dens, &tol).map_err(err)?, theory::second_moments(&dens).map_err(err)?);
            for (x, y) in [(ra.ex0sq, rb.ex0sq), (ra.exjsq, rb.exjsq), (ra.ealpha0sq, rb.ealpha0sq), (ra.ealphaksq, rb.ealphaksq)] {
                forms = forms.max((x - y).abs());
            }
            let codes: &[(u32, u32)] = match d {
                4 => &[(2, 1)],
                8 => &[(3, 1), (3, 2)],
                _ => &[],
            };
            for &(n, m) in codes {
                let c = code(n, m);
                let a = raw::variance_corrected(&dens, &c, &tol).map_err(err)?;
                let b = theory::variance_corrected(&dens, &c, 1e-10).map_err(err)?;
                forms = forms.max((a - b).abs());
                let p = raw::syndrome_prob_expectations(&dens, &c, &tol).map_err(err)?;
                let q = theory::syndrome_prob_expectations(&dens, &c).map_err(err)?;
                forms = forms.max((p.e_p0_direct - q.e_p0).abs()).max((p.e_p0_complement - q.e_p0).abs());
                forms = forms.max((p.e_ps - q.e_ps).abs());
            }
        }
    }
    check(forms <= 1e-10, format!("raw and stabilized forms differ by {forms:e}"))?;

    let variance = ["variance", "--sigma", "0.5", "--n", "3", "--m", "1", "--samples", "20000", "--seed", "17"];
    let sweep = ["sweep", "--sigma-list", "0.25,0.75", "--codes", "2,1 3,2", "--samples", "5000", "--seed", "17"];
    for args in [&variance[..], &sweep[..]] {
        let one = cli_output(&[&["--threads", "1"], args].concat())?;
        let again = cli_output(&[&["--threads", "1"], args].concat())?;
        let two = cli_output(&[&["--threads", "2"], args].concat())?;
        check(one == again && one == two, format!("isoqec {} output differs between runs", args[0]))?;
    }
    Ok(format!("round trip {trip:.1e}, simplex {simplex:.1e}, identity {ident:.1e}, forms {forms:.1e}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, u64); 9] = [
        ("closed-form integrals and sphere surfaces", integrals, 5),
        ("disturbed variance closed form", disturbed_variance_closed_form, 10),
        ("disturbed variance by simulation", disturbed_variance_simulated, 5),
        ("syndrome probabilities", syndrome_probabilities_match, 30),
        ("corrected variance", corrected_variance_matches, 60),
        ("correction never increases variance", correction_never_hurts, 60),
        ("uniformity of conditioned states", conditioned_states_are_uniform, 120),
        ("fidelity bounds", fidelity_bounds, 10),
        ("properties and determinism", properties, 30),
    ];
    let mut failed = Vec::new();
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > Duration::from_secs(*budget) => {
                Err(format!("{detail}; took {:.1} s, budget {budget} s", elapsed.as_secs_f64()))
            }
            other => other,
        };
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name} ({detail}; {:.1} s)", i + 1, elapsed.as_secs_f64()),
            Err(why) => {
                println!("criterion {}: FAIL  {name} ({why})", i + 1);
                failed.push(i + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
