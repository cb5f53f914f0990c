//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Tolerances are pinned as constants next to each check.

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use tapmeans_core::analysis::{
    default_deltas, k_functional, k_functional_pgd, multiplier_norm, remainder_integral, zbs_check,
    Modulus, Verdict,
};
use tapmeans_core::experiments::{
    direct_theorem_experiment, generate_test_function, inverse_theorem_experiment, random_function,
    rate_sweep, slope_fit, DecaySpec, Support, SweepOptions, TheoremParams,
};
use tapmeans_core::verify::lambda_violation;
use tapmeans_core::{
    falling_factorial, lambda_coeff, poisson_mean, poisson_rho_derivative, radial_derivative, synthesize,
    tap_mean, taylor_form, BlockMultiplier, LpExponent, MultiIndex, SpectralFunction, TapParameters,
};

type Outcome = Result<String, String>;

const RHOS: [f64; 4] = [0.1, 0.5, 0.9, 0.99];
const CORPUS_SIZE: u64 = 100;
const CORPUS_DEGREE: usize = 16;

fn corpus() -> Vec<SpectralFunction> {
    (0..CORPUS_SIZE)
        .map(|i| {
            let dim = 1 + (i % 3) as usize;
            random_function(dim, CORPUS_DEGREE, i % 2 == 0, Support::Full, 1000 + i).expect("corpus function")
        })
        .collect()
}

fn verdict(worst: f64, tol: f64, what: &str) -> Outcome {
    let line = format!("{what}: worst {worst:.3e} (tol {tol:.0e})");
    if worst <= tol {
        Ok(line)
    } else {
        Err(line)
    }
}

fn taylor_identity(fs: &[SpectralFunction]) -> Outcome {
    const TOL: f64 = 1e-12;
    let mut worst = 0.0f64;
    for f in fs {
        for r in 1..=5 {
            for rho in RHOS {
                let params = TapParameters::new(rho, r).unwrap();
                worst = worst.max(tap_mean(f, params).max_scaled_coeff_diff(&taylor_form(f, params)));
            }
        }
    }
    verdict(worst, TOL, "tap mean vs Taylor form, coefficient-wise")
}

fn remainder_identity(fs: &[SpectralFunction]) -> Outcome {
    const TOL: f64 = 1e-10;
    let m = 2 * CORPUS_DEGREE + 1;
    let mut worst = 0.0f64;
    for f in fs {
        for r in 1..=4 {
            for rho in RHOS {
                let lhs = remainder_integral(f, rho, r, m).unwrap();
                let diff = f.sub(&tap_mean(f, TapParameters::new(rho, r).unwrap())).unwrap();
                worst = worst.max(lhs.max_abs_diff(&synthesize(&diff, m).unwrap()));
            }
        }
    }
    verdict(worst, TOL, "remainder integral vs f - A f, pointwise")
}

fn derivative_identities(fs: &[SpectralFunction]) -> Outcome {
    const TOL: f64 = 1e-14;
    let mut worst = 0.0f64;
    for f in fs {
        for j in 0..=5usize {
            for rho in RHOS {
                let lhs = poisson_rho_derivative(f, rho, j).scale(Complex64::new(rho.powi(j as i32), 0.0));
                worst = worst.max(lhs.max_scaled_coeff_diff(&radial_derivative(&poisson_mean(f, rho), j)));
                if j >= 1 {
                    let params = TapParameters::new(rho, j).unwrap();
                    let a = radial_derivative(&tap_mean(f, params), j);
                    let b = tap_mean(&radial_derivative(f, j), params);
                    worst = worst.max(a.max_scaled_coeff_diff(&b));
                    let a = radial_derivative(&poisson_mean(f, rho), j);
                    let b = poisson_mean(&radial_derivative(f, j), rho);
                    worst = worst.max(a.max_scaled_coeff_diff(&b));
                }
            }
        }
    }
    verdict(worst, TOL, "rho-derivative/radial and commutation identities")
}

fn lambda_properties() -> Outcome {
    const TOL: f64 = 1e-15;
    let (worst, at) = lambda_violation();
    let spot = (lambda_coeff(2, 2, 0.5) - 0.75).abs().max((lambda_coeff(3, 2, 0.5) - 0.5).abs());
    verdict(worst.max(spot), TOL, &format!("lambda range/monotonicity/endpoints/growth (worst at {at})"))
}

fn saturation() -> Outcome {
    const WINDOW: f64 = 0.1;
    const PIPELINE_TOL: f64 = 1e-12;
    let opts = SweepOptions::default();
    let mut worst_slope = 0.0f64;
    let mut worst_pipeline = 0.0f64;
    for r in 1..=3usize {
        for nu in [r, r + 1, r + 3] {
            let k = MultiIndex::from([nu as i32 - 1, 1]);
            let f = SpectralFunction::single_mode(2, nu, k, Complex64::new(1.0, 0.0)).unwrap();
            let rep = rate_sweep(&f, r, LpExponent::TWO, &opts).unwrap();
            for pt in &rep.points {
                let want = 1.0 - lambda_coeff(nu, r, pt.rho);
                worst_pipeline = worst_pipeline.max((pt.error - want).abs());
            }
            let slope = rep.slope().unwrap_or(f64::NAN);
            let dev = (slope - r as f64).abs();
            if dev.is_nan() || dev > worst_slope {
                worst_slope = dev;
            }
        }
    }
    let line = format!(
        "single-mode saturation slopes: worst |slope - r| {worst_slope:.3} (tol {WINDOW}); error vs 1-lambda worst abs {worst_pipeline:.1e} (tol {PIPELINE_TOL:.0e})"
    );
    if worst_slope <= WINDOW && worst_pipeline <= PIPELINE_TOL {
        Ok(line)
    } else {
        Err(line)
    }
}

/// `lambda_{nu,r}(rho)` summed term by term from log-binomials; shares no
/// code with the library's recurrence.
fn naive_lambda(nu: usize, r: usize, rho: f64) -> f64 {
    if nu < r {
        return 1.0;
    }
    let mut log_binom = 0.0;
    let mut sum = 0.0;
    for j in 0..r {
        if j > 0 {
            log_binom += ((nu - j + 1) as f64).ln() - (j as f64).ln();
        }
        let log_term = log_binom + j as f64 * (1.0 - rho).ln() + (nu - j) as f64 * rho.ln();
        sum += log_term.exp();
    }
    sum
}

const THEOREM_CASES: [(usize, usize, f64); 3] = [(2, 1, 0.5), (3, 1, 0.5), (3, 2, 0.5)];
/// `nu_max = d*K = 16384` in both dimensions.
const THEOREM_SETUPS: [(usize, usize); 2] = [(1, 16384), (2, 8192)];

fn theorem_opts() -> SweepOptions {
    SweepOptions {
        j0: 4,
        j1: 12,
        ..SweepOptions::default()
    }
}

fn theorem_spec(dim: usize, degree: usize) -> DecaySpec {
    DecaySpec::new(dim, degree, 1.0).with_per_block(1).with_seed(7)
}

fn direct_rates() -> Outcome {
    const WINDOW: f64 = 0.15;
    const ORACLE_TOL: f64 = 1e-9;
    let opts = theorem_opts();
    let mut lines = Vec::new();
    let mut ok = true;
    for (dim, degree) in THEOREM_SETUPS {
        for (r, n, alpha) in THEOREM_CASES {
            let params = TheoremParams::new(r, n, alpha, LpExponent::TWO).unwrap();
            let rep = direct_theorem_experiment(&theorem_spec(dim, degree), params, &opts).unwrap();
            let slope = rep.rate.slope().unwrap();

            let f = generate_test_function(&rep.spec).unwrap();
            let mut energy = vec![0.0; dim * degree + 1];
            for (k, c) in f.terms() {
                energy[k.l1()] += c.norm_sqr();
            }
            let mut oracle_rel = 0.0f64;
            let mut oracle_errors = Vec::new();
            for pt in &rep.rate.points {
                let sq: f64 = energy
                    .iter()
                    .enumerate()
                    .map(|(nu, e)| {
                        let t = 1.0 - naive_lambda(nu, r, pt.rho);
                        t * t * e
                    })
                    .sum();
                let oracle = sq.sqrt();
                oracle_rel = oracle_rel.max((pt.error - oracle).abs() / oracle);
                oracle_errors.push((1.0 - pt.rho, oracle));
            }
            let (xs, ys): (Vec<f64>, Vec<f64>) = oracle_errors.into_iter().unzip();
            let oracle_slope = slope_fit(&xs, &ys).unwrap().slope;
            let target = params.target_rate();
            let pass = (slope - target).abs() <= WINDOW
                && (oracle_slope - target).abs() <= WINDOW
                && oracle_rel <= ORACLE_TOL;
            ok &= pass;
            lines.push(format!(
                "d={dim} (r,n,a)=({r},{n},{alpha}) slope {slope:.3} oracle {oracle_slope:.3} target {target} rel {oracle_rel:.1e} K-hyp {:.3}",
                rep.hypothesis.slope
            ));
        }
    }
    let line = format!("slopes within +-{WINDOW}, oracle rel tol {ORACLE_TOL:.0e}: {}", lines.join("; "));
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn inverse_bands() -> Outcome {
    const BAND: f64 = 10.0;
    const CLOSED_TOL: f64 = 1e-8;
    let opts = theorem_opts();
    let mut ok = true;
    let mut lines = Vec::new();
    for (dim, degree) in THEOREM_SETUPS {
        for (r, n, alpha) in THEOREM_CASES {
            let params = TheoremParams::new(r, n, alpha, LpExponent::TWO).unwrap();
            let rep = inverse_theorem_experiment(&theorem_spec(dim, degree), params, &opts).unwrap();
            ok &= !rep.refused && rep.m_band < BAND && rep.k_band < BAND;
            lines.push(format!("d={dim} ({r},{n},{alpha}) M {:.2} K {:.2}", rep.m_band, rep.k_band));
        }
    }

    let mut worst_closed = 0.0f64;
    for (r, n, alpha) in THEOREM_CASES {
        for nu in [r, r + 2, 10] {
            let spec = DecaySpec::new(2, nu, 1.0).with_per_block(1).with_blocks(nu, nu).with_seed(3);
            let params = TheoremParams::new(r, n, alpha, LpExponent::TWO).unwrap();
            let rep = inverse_theorem_experiment(&spec, params, &SweepOptions::default()).unwrap();
            let c = (nu as f64 + 1.0).powf(-params.decay_exponent());
            for pt in &rep.points {
                let delta: f64 = 1.0 - pt.rho;
                let w = delta.powf(alpha);
                let m = delta.powi(n as i32) * falling_factorial(nu, r) * pt.rho.powi(nu as i32) * c / w;
                let k = (delta.powi(n as i32) * falling_factorial(nu, n)).min(1.0) * falling_factorial(nu, r - n) * c / w;
                worst_closed = worst_closed.max(((pt.m_ratio - m) / m).abs()).max(((pt.k_ratio - k) / k).abs());
            }
        }
    }
    ok &= worst_closed <= CLOSED_TOL;
    let line = format!(
        "bands < {BAND}: {}; single-mode closed forms worst rel {worst_closed:.1e} (tol {CLOSED_TOL:.0e})",
        lines.join("; ")
    );
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn kfunctional_oracle() -> Outcome {
    const TOL: f64 = 1e-8;
    const FLOOR: f64 = 1e-10;
    let mut worst = 0.0f64;
    let mut below = 0.0f64;
    for nu in 0..=20usize {
        let k = MultiIndex::from([(nu as i32).min(10), nu as i32 - (nu as i32).min(10)]);
        let f = SpectralFunction::single_mode(2, 10, k, Complex64::new(1.0, 0.0)).unwrap();
        for n in 1..=3usize {
            for j in 1..=10 {
                let delta = 2f64.powi(-j);
                let closed = if nu < n { 0.0 } else { (delta.powi(n as i32) * falling_factorial(nu, n)).min(1.0) };
                let est = k_functional(&f, delta, n, LpExponent::TWO, 4).unwrap();
                worst = worst.max((est.upper - closed).abs());
                below = below.max(closed - est.upper);
                let pgd = k_functional_pgd(&f.block_energies(), delta, n, 100_000, 1e-10);
                below = below.max(closed - pgd.value);
            }
        }
    }
    let line = format!(
        "single-mode K-functional: worst |K - closed| {worst:.1e} (tol {TOL:.0e}); worst shortfall below closed form {below:.1e} (tol {FLOOR:.0e})"
    );
    if worst <= TOL && below <= FLOOR {
        Ok(line)
    } else {
        Err(line)
    }
}

fn multiplier_norms() -> Outcome {
    const NU_MAX: usize = 12;
    let mults = [
        BlockMultiplier::poisson(0.5, NU_MAX),
        BlockMultiplier::tap(TapParameters::new(0.5, 2).unwrap(), NU_MAX),
    ];
    let mut ok = true;
    let mut lines = Vec::new();
    for mult in &mults {
        let exact: Vec<f64> = (1..=3usize)
            .map(|d| {
                multiplier_norm(mult, d, LpExponent::TWO, NU_MAX / d, 0, 0, 0)
                    .unwrap()
                    .exact
                    .unwrap()
            })
            .collect();
        ok &= exact[0] == exact[1] && exact[1] == exact[2];
        lines.push(format!("{} p=2 {:?}", mult.label(), exact));
        for p in [LpExponent::ONE, LpExponent::Infinity] {
            let est: Vec<_> = [1usize, 2]
                .iter()
                .map(|&d| {
                    let degree = NU_MAX / d;
                    multiplier_norm(mult, d, p, degree, 4 * (2 * degree + 1), 17, 12).unwrap()
                })
                .collect();
            for e in &est {
                ok &= e.is_consistent();
            }
            ok &= est[0].overlaps(&est[1]);
            lines.push(format!(
                "p={p} d1 [{:.4},{:.4}] d2 [{:.4},{:.4}]",
                est[0].lower,
                est[0].upper.unwrap(),
                est[1].lower,
                est[1].upper.unwrap()
            ));
        }
    }
    let line = format!("multiplier norms: {}", lines.join("; "));
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

fn zbs() -> Outcome {
    const REL: f64 = 0.01;
    let deltas = default_deltas();
    let mut ok = true;
    let mut lines = Vec::new();
    let alpha = 0.5;
    for n in [1usize, 2] {
        let rep = zbs_check(&Modulus::power(alpha), n, &deltas).unwrap();
        let z = *rep.z.ratios.last().unwrap();
        let zn = *rep.zn.ratios.last().unwrap();
        let ez = (z * alpha - 1.0).abs();
        let ezn = (zn * (n as f64 - alpha) - 1.0).abs();
        ok &= rep.both_hold() && ez <= REL && ezn <= REL;
        lines.push(format!("t^{alpha} n={n}: (Z) {z:.4} (Z_n) {zn:.4}"));

        let rep = zbs_check(&Modulus::power(n as f64), n, &deltas).unwrap();
        ok &= rep.z.verdict == Verdict::Holds && rep.zn.verdict == Verdict::Fails;
        lines.push(format!("t^{n}: (Z_n) {:?}", rep.zn.verdict));
    }
    let rep = zbs_check(&Modulus::power_log(0.0, -1.0), 1, &deltas).unwrap();
    ok &= rep.conditions.all_hold() && rep.z.verdict == Verdict::Fails;
    lines.push(format!("1/ln(e/t): (Z) {:?}", rep.z.verdict));
    let line = format!("ratio limits to {REL}; {}", lines.join("; "));
    if ok {
        Ok(line)
    } else {
        Err(line)
    }
}

type Criterion<'a> = Box<dyn Fn() -> Outcome + 'a>;

fn main() -> ExitCode {
    let started = Instant::now();
    let fs = corpus();
    let criteria: Vec<(&str, Criterion)> = vec![
        ("tap mean equals Taylor form", Box::new(|| taylor_identity(&fs))),
        ("remainder integral", Box::new(|| remainder_identity(&fs))),
        ("derivative and commutation identities", Box::new(|| derivative_identities(&fs))),
        ("lambda properties", Box::new(lambda_properties)),
        ("saturation slope", Box::new(saturation)),
        ("direct rate", Box::new(direct_rates)),
        ("inverse certificates", Box::new(inverse_bands)),
        ("K-functional oracle", Box::new(kfunctional_oracle)),
        ("multiplier norm across dimensions", Box::new(multiplier_norms)),
        ("ZBS checker", Box::new(zbs)),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = check();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS [{name}] {detail} ({secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL [{name}] {detail} ({secs:.1}s)", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1}s",
        criteria.len() - failed,
        started.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
