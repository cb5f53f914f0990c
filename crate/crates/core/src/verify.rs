//! Identity suites run by `tapmeans --cmd verify`: every operator identity
//! the library relies on, checked on seeded random inputs.

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::remainder_integral;
use crate::error::{Error, Result};
use crate::experiments::{random_function, Support};
use crate::operators::{
    lambda_coeff, poisson_mean, poisson_rho_derivative, radial_derivative, tap_mean, taylor_form,
    y_kernel_poisson_mean, BlockMultiplier, TapParameters,
};
use crate::spectral::{analyze, lp_norm, synthesize, LpExponent, SpectralFunction};

pub const RHOS: [f64; 4] = [0.1, 0.5, 0.9, 0.99];

#[derive(Clone, Copy, Debug, Serialize)]
pub struct VerifyConfig {
    pub dim: usize,
    pub degree: usize,
    pub r_max: usize,
    pub seed: u64,
    /// Random functions per suite.
    pub functions: usize,
    /// Perturb `lambda_{1,r}` by `1e-6` inside the taylor-form suite.
    pub fault: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            dim: 2,
            degree: 16,
            r_max: 4,
            seed: 42,
            functions: 4,
            fault: false,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub suite: &'static str,
    pub passed: bool,
    pub worst: f64,
    pub tolerance: f64,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub config: VerifyConfig,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed_suites(&self) -> Vec<&'static str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.suite).collect()
    }
}

/// Running maximum of an error, remembering where it occurred.
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn new() -> Self {
        Worst {
            value: 0.0,
            at: String::from("-"),
        }
    }

    fn update(&mut self, value: f64, at: impl FnOnce() -> String) {
        if value > self.value || value.is_nan() {
            self.value = value;
            self.at = at();
        }
    }

    fn finish(self, suite: &'static str, tolerance: f64) -> CheckResult {
        CheckResult {
            suite,
            passed: self.value <= tolerance,
            worst: self.value,
            tolerance,
            detail: format!("worst at {}", self.at),
        }
    }
}

fn corpus(cfg: &VerifyConfig) -> Result<Vec<SpectralFunction>> {
    (0..cfg.functions as u64)
        .map(|i| random_function(cfg.dim, cfg.degree, i % 2 == 0, Support::Full, cfg.seed.wrapping_add(i)))
        .collect()
}

fn tap_with_fault(f: &SpectralFunction, params: TapParameters, fault: bool) -> Result<SpectralFunction> {
    if !fault {
        return Ok(tap_mean(f, params));
    }
    let mut values = BlockMultiplier::tap(params, f.nu_max()).values().to_vec();
    if values.len() > 1 {
        values[1] += Complex64::new(1e-6, 0.0);
    }
    BlockMultiplier::new("tap+fault", values).apply(f)
}

fn taylor_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let mut worst = Worst::new();
    for (i, f) in fs.iter().enumerate() {
        for r in 1..=cfg.r_max {
            for rho in RHOS {
                let params = TapParameters::new(rho, r)?;
                let err = tap_with_fault(f, params, cfg.fault)?.max_scaled_coeff_diff(&taylor_form(f, params));
                worst.update(err, || format!("f#{i} r={r} rho={rho}"));
            }
        }
    }
    Ok(worst.finish("taylor-form", 1e-12))
}

fn rho_derivative_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let mut worst = Worst::new();
    for (i, f) in fs.iter().enumerate() {
        for j in 0..=cfg.r_max {
            for rho in RHOS {
                let lhs = poisson_rho_derivative(f, rho, j).scale(Complex64::new(rho.powi(j as i32), 0.0));
                let rhs = radial_derivative(&poisson_mean(f, rho), j);
                worst.update(lhs.max_scaled_coeff_diff(&rhs), || format!("f#{i} j={j} rho={rho}"));
            }
        }
    }
    Ok(worst.finish("rho-derivative-radial", 1e-14))
}

fn commutation_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let mut worst = Worst::new();
    for (i, f) in fs.iter().enumerate() {
        for n in 1..=cfg.r_max {
            for rho in RHOS {
                let params = TapParameters::new(rho, n)?;
                let a = radial_derivative(&tap_mean(f, params), n);
                let b = tap_mean(&radial_derivative(f, n), params);
                worst.update(a.max_scaled_coeff_diff(&b), || format!("f#{i} tap/radial n={n} rho={rho}"));
                let a = radial_derivative(&poisson_mean(f, rho), n);
                let b = poisson_mean(&radial_derivative(f, n), rho);
                worst.update(a.max_scaled_coeff_diff(&b), || format!("f#{i} poisson/radial n={n} rho={rho}"));
                let a = tap_mean(&f.project_y(), params);
                let b = tap_mean(f, params).project_y();
                worst.update(a.max_scaled_coeff_diff(&b), || format!("f#{i} tap/project_y n={n} rho={rho}"));
            }
        }
    }
    Ok(worst.finish("commutation", 1e-14))
}

fn remainder_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let m = 2 * cfg.degree + 1;
    let mut worst = Worst::new();
    for (i, f) in fs.iter().enumerate() {
        for r in 1..=cfg.r_max {
            for rho in RHOS {
                let lhs = remainder_integral(f, rho, r, m)?;
                let rhs = synthesize(&f.sub(&tap_mean(f, TapParameters::new(rho, r)?))?, m)?;
                worst.update(lhs.max_abs_diff(&rhs), || format!("f#{i} r={r} rho={rho}"));
            }
        }
    }
    Ok(worst.finish("remainder-integral", 1e-10))
}

/// Sampled properties of `lambda_{nu,r}(rho)` on `nu <= 200`, `r <= 8` and a
/// 100-point rho grid; returns the largest violation.
pub fn lambda_violation() -> (f64, String) {
    let rhos: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
    let mut worst = Worst::new();
    const SLACK: f64 = 1e-15;
    for r in 1..=8usize {
        for nu in 0..=200usize {
            let mut prev = -1.0;
            for &rho in &rhos {
                let l = lambda_coeff(nu, r, rho);
                let outside = (-l).max(l - 1.0).max(0.0);
                worst.update(outside, || format!("range nu={nu} r={r} rho={rho}"));
                worst.update(prev - l - SLACK, || format!("monotone in rho nu={nu} r={r} rho={rho}"));
                prev = l;
                if r < 8 {
                    let next = lambda_coeff(nu, r + 1, rho);
                    worst.update(l - next - SLACK, || format!("monotone in r nu={nu} r={r} rho={rho}"));
                }
                if nu >= r {
                    let q = rho.max(1.0 - rho);
                    let bound = r as f64 * q.powi(nu as i32) * (nu as f64).powi(r as i32 - 1);
                    worst.update(l - bound - SLACK, || format!("growth nu={nu} r={r} rho={rho}"));
                }
            }
            let at_zero = lambda_coeff(nu, r, 0.0);
            let want = if nu >= r { 0.0 } else { 1.0 };
            worst.update((at_zero - want).abs(), || format!("rho=0 nu={nu} r={r}"));
            worst.update((lambda_coeff(nu, r, 1.0) - 1.0).abs(), || format!("rho=1 nu={nu} r={r}"));
        }
    }
    worst.update((lambda_coeff(2, 2, 0.5) - 0.75).abs(), || "lambda(2,2,0.5)".into());
    worst.update((lambda_coeff(3, 2, 0.5) - 0.5).abs(), || "lambda(3,2,0.5)".into());
    (worst.value, worst.at)
}

fn lambda_suite() -> CheckResult {
    let (value, at) = lambda_violation();
    let mut w = Worst::new();
    w.update(value, || at);
    w.finish("lambda-bounds", 1e-15)
}

fn y_kernel_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let mut worst = Worst::new();
    // The kernel's aliasing error decays like rho^(m-K).
    let m = 2 * cfg.degree + 1 + 64;
    for (i, f) in fs.iter().enumerate() {
        let fy = f.project_y();
        for rho in [0.1, 0.5] {
            let lhs = y_kernel_poisson_mean(&fy, rho, m)?;
            let rhs = synthesize(&poisson_mean(&fy, rho), m)?;
            let scale = rhs.max_abs().max(1.0);
            worst.update(lhs.max_abs_diff(&rhs) / scale, || format!("f#{i} rho={rho}"));
        }
    }
    Ok(worst.finish("y-kernel", 1e-12))
}

fn parseval_suite(cfg: &VerifyConfig, fs: &[SpectralFunction]) -> Result<CheckResult> {
    let mut worst = Worst::new();
    let m = 2 * cfg.degree + 1;
    for (i, f) in fs.iter().enumerate() {
        let s = synthesize(f, m)?;
        let grid = lp_norm(&s, LpExponent::TWO);
        let exact = f.l2_norm();
        worst.update((grid - exact).abs() / exact.max(1.0), || format!("f#{i} norm"));
        let back = analyze(&s, cfg.degree)?;
        worst.update(back.max_scaled_coeff_diff(f), || format!("f#{i} round trip"));
    }
    Ok(worst.finish("parseval", 1e-12))
}

/// Runs every suite. Configuration errors are returned as `Err`; identity
/// failures are reported in the result.
pub fn run(cfg: &VerifyConfig) -> Result<VerifyReport> {
    if cfg.dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if cfg.r_max == 0 {
        return Err(crate::error::invalid("r must be at least 1"));
    }
    if cfg.functions == 0 {
        return Err(crate::error::invalid("need at least one random function"));
    }
    let fs = corpus(cfg)?;
    let checks = vec![
        taylor_suite(cfg, &fs)?,
        rho_derivative_suite(cfg, &fs)?,
        commutation_suite(cfg, &fs)?,
        remainder_suite(cfg, &fs)?,
        lambda_suite(),
        y_kernel_suite(cfg, &fs)?,
        parseval_suite(cfg, &fs)?,
    ];
    Ok(VerifyReport { config: *cfg, checks })
}
