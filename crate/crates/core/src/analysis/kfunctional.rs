//! K-functional `K_n(delta, f)_p = inf_h ||f - h||_p + delta^n ||h^[n]||_p`.
//!
//! At `p = 2` both terms depend on `h` only through per-block scalings
//! `h_k = t_nu f_k`, which reduces the infimum to
//!
//! ```text
//! g(t) = sqrt(sum (1 - t_nu)^2 a_nu) + delta^n sqrt(sum mu_nu^2 t_nu^2 a_nu)
//! ```
//!
//! with block energies `a_nu` and `mu_nu = nu!/(nu-n)!`. Stationary points
//! satisfy `t_nu = 1/(1 + sigma mu_nu^2)` for a single `sigma > 0`, and along
//! that path the two terms are monotone, so the objective is unimodal in
//! `log sigma`. The minimum is the best of a golden-section search along the
//! path and the two endpoints `h = f` and `h = S_{n-1} f`.

use num_complex::Complex64;
use serde::Serialize;

use crate::analysis::m_p;
use crate::error::{invalid, Result};
use crate::operators::{falling_factorial, lambda_coeff, lambda_tail, radial_derivative, tap_mean, TapParameters};
use crate::spectral::{LpExponent, SpectralFunction};

/// Absolute slack between `upper` and `lower` on the certified path.
const PATH_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct KFunEstimate {
    pub delta: f64,
    pub n: usize,
    pub p: LpExponent,
    pub upper: f64,
    pub lower: f64,
    /// The `h` achieving `upper`.
    pub minimizer: SpectralFunction,
    /// True on the `p = 2` path, where `upper` is the infimum up to
    /// `upper - lower`.
    pub certified: bool,
}

/// Per-block solution of the `p = 2` problem.
#[derive(Clone, Debug)]
pub struct BlockSolution {
    pub value: f64,
    pub scaling: Vec<f64>,
}

struct Problem<'a> {
    energies: &'a [f64],
    mu: Vec<f64>,
    c: f64,
}

impl<'a> Problem<'a> {
    fn new(energies: &'a [f64], delta: f64, n: usize) -> Self {
        Problem {
            energies,
            mu: (0..energies.len()).map(|nu| falling_factorial(nu, n)).collect(),
            c: delta.powi(n as i32),
        }
    }

    fn terms(&self, t: &[f64]) -> (f64, f64) {
        let mut a = 0.0;
        let mut b = 0.0;
        for ((&e, &mu), &tv) in self.energies.iter().zip(&self.mu).zip(t) {
            a += (1.0 - tv) * (1.0 - tv) * e;
            b += mu * mu * tv * tv * e;
        }
        (a.sqrt(), b.sqrt())
    }

    fn objective(&self, t: &[f64]) -> f64 {
        let (a, b) = self.terms(t);
        a + self.c * b
    }

    fn path(&self, log_sigma: f64, t: &mut [f64]) {
        let sigma = log_sigma.exp();
        for (tv, &mu) in t.iter_mut().zip(&self.mu) {
            *tv = 1.0 / (1.0 + sigma * mu * mu);
        }
    }
}

/// Certified `p = 2` K-functional from block energies (index = block `nu`).
pub fn k_functional_blocks(energies: &[f64], delta: f64, n: usize) -> BlockSolution {
    let prob = Problem::new(energies, delta, n);
    let len = energies.len();
    let active_mu = || {
        prob.mu
            .iter()
            .zip(energies)
            .filter(|(&mu, &e)| mu > 0.0 && e > 0.0)
            .map(|(&mu, _)| mu)
    };
    let (mu_min, mu_max) = active_mu().fold((f64::INFINITY, 0.0f64), |(lo, hi), mu| (lo.min(mu), hi.max(mu)));
    if mu_max == 0.0 {
        // f has no mass where h^[n] could be nonzero: h = f is exact.
        return BlockSolution {
            value: 0.0,
            scaling: vec![1.0; len],
        };
    }

    let keep_all = vec![1.0; len];
    let drop_high: Vec<f64> = prob.mu.iter().map(|&mu| if mu > 0.0 { 0.0 } else { 1.0 }).collect();
    let mut best = (prob.objective(&keep_all), keep_all);
    let low = prob.objective(&drop_high);
    if low < best.0 {
        best = (low, drop_high);
    }

    let lo = (1e-8 / (mu_max * mu_max)).ln();
    let hi = (1e8 / (mu_min * mu_min)).ln();
    let mut t = vec![0.0; len];
    let eval = |u: f64, t: &mut Vec<f64>| {
        prob.path(u, t);
        prob.objective(t)
    };

    const SCAN: usize = 64;
    let grid: Vec<f64> = (0..=SCAN).map(|i| lo + (hi - lo) * i as f64 / SCAN as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&u| eval(u, &mut t)).collect();
    let imin = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    let (mut a, mut b) = (grid[imin.saturating_sub(1)], grid[(imin + 1).min(SCAN)]);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = eval(x1, &mut t);
    let mut f2 = eval(x2, &mut t);
    for _ in 0..200 {
        if (b - a).abs() < 1e-12 {
            break;
        }
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = eval(x1, &mut t);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = eval(x2, &mut t);
        }
    }
    let u_star = 0.5 * (a + b);
    let v_star = eval(u_star, &mut t);
    if v_star < best.0 {
        best = (v_star, t);
    }
    BlockSolution {
        value: best.0,
        scaling: best.1,
    }
}

/// Projected gradient descent with Armijo backtracking on the same `p = 2`
/// objective, started from `t_nu = lambda_{nu,n}(1 - delta)`. Slower and less
/// accurate at kinks than [`k_functional_blocks`]; kept as an independent
/// check.
pub fn k_functional_pgd(
    energies: &[f64],
    delta: f64,
    n: usize,
    max_iter: usize,
    tol: f64,
) -> BlockSolution {
    let prob = Problem::new(energies, delta, n);
    let rho = (1.0 - delta).max(0.0);
    let mut t: Vec<f64> = (0..energies.len()).map(|nu| lambda_coeff(nu, n, rho)).collect();
    let mut value = prob.objective(&t);
    let mut step = 1.0;
    let mut grad = vec![0.0; t.len()];
    let mut trial = vec![0.0; t.len()];
    for _ in 0..max_iter {
        let (a, b) = prob.terms(&t);
        for (nu, g) in grad.iter_mut().enumerate() {
            let e = energies[nu];
            let mu = prob.mu[nu];
            let da = if a > 0.0 { -(1.0 - t[nu]) * e / a } else { 0.0 };
            let db = if b > 0.0 { mu * mu * t[nu] * e / b } else { 0.0 };
            *g = da + prob.c * db;
        }
        let mut accepted = false;
        for _ in 0..60 {
            let mut model = 0.0;
            let mut dist2 = 0.0;
            for ((tr, &tv), &g) in trial.iter_mut().zip(&t).zip(&grad) {
                *tr = (tv - step * g).max(0.0);
                model += g * (*tr - tv);
                dist2 += (*tr - tv) * (*tr - tv);
            }
            let candidate = prob.objective(&trial);
            if candidate <= value + model + dist2 / (2.0 * step) {
                accepted = true;
                let improvement = value - candidate;
                std::mem::swap(&mut t, &mut trial);
                value = candidate;
                step *= 2.0;
                if improvement <= tol * value.max(1e-300) {
                    return BlockSolution { value, scaling: t };
                }
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    BlockSolution { value, scaling: t }
}

fn check_args(delta: f64, n: usize) -> Result<()> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(invalid(format!("delta must be positive, got {delta}")));
    }
    if n == 0 {
        return Err(invalid("K-functional order n must be positive"));
    }
    Ok(())
}

fn objective_at(f: &SpectralFunction, h: &SpectralFunction, delta: f64, n: usize, p: LpExponent, oversample: usize) -> Result<f64> {
    let diff = f.sub(h)?;
    Ok(diff.norm(p, oversample)? + delta.powi(n as i32) * radial_derivative(h, n).norm(p, oversample)?)
}

/// `K_n(delta, f)_p` over `h` in the coefficient box of `f`.
///
/// For `p = 2` the result is the certified infimum. For other `p` it is the
/// best of three concrete candidates (`h = f`, `h = S_{n-1} f`,
/// `h = A_{1-delta,n} f`): an upper bound, with `lower = 0`.
pub fn k_functional(
    f: &SpectralFunction,
    delta: f64,
    n: usize,
    p: LpExponent,
    oversample: usize,
) -> Result<KFunEstimate> {
    check_args(delta, n)?;
    if p.is_two() {
        let sol = k_functional_blocks(&f.block_energies(), delta, n);
        let minimizer = f.map_blocks(true, |nu| Complex64::new(sol.scaling[nu], 0.0));
        return Ok(KFunEstimate {
            delta,
            n,
            p,
            upper: sol.value,
            lower: (sol.value - PATH_TOLERANCE).max(0.0),
            minimizer,
            certified: true,
        });
    }
    let mut candidates = vec![f.clone(), f.partial_sum(n - 1)];
    if delta < 1.0 {
        candidates.push(tap_mean(f, TapParameters::new(1.0 - delta, n)?));
    }
    let mut best: Option<(f64, SpectralFunction)> = None;
    for h in candidates {
        let v = objective_at(f, &h, delta, n, p, oversample)?;
        if best.as_ref().is_none_or(|(b, _)| v < *b) {
            best = Some((v, h));
        }
    }
    let (upper, minimizer) = best.expect("at least two candidates");
    Ok(KFunEstimate {
        delta,
        n,
        p,
        upper,
        lower: 0.0,
        minimizer,
        certified: false,
    })
}

/// One point of the two-sided realization estimate:
/// `L = (1-rho)^n M_p(rho,f,n)`, `K = K_n(1-rho, f)_p`,
/// `U = ||f - A_{rho,n} f||_p + (1-rho)^n M_p(rho,f,n)`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SandwichPoint {
    pub rho: f64,
    pub lower: f64,
    pub kfun: f64,
    pub upper: f64,
}

pub fn realization_sandwich(
    f: &SpectralFunction,
    rho: f64,
    n: usize,
    p: LpExponent,
    oversample: usize,
) -> Result<SandwichPoint> {
    if !(rho > 0.0 && rho < 1.0) {
        return Err(invalid(format!("rho must lie in (0,1), got {rho}")));
    }
    let delta = 1.0 - rho;
    let scaled_m = delta.powi(n as i32) * m_p(f, rho, n, p, oversample)?.value;
    let residual = f.map_blocks(true, |nu| Complex64::new(lambda_tail(nu, n, rho), 0.0));
    let approx = residual.norm(p, oversample)?;
    let kfun = k_functional(f, delta, n, p, oversample)?.upper;
    Ok(SandwichPoint {
        rho,
        lower: scaled_m,
        kfun,
        upper: approx + scaled_m,
    })
}

/// Sandwich over a rho-sweep, with the observed ranges of `L/K` and `K/U`
/// (points where a denominator vanishes are skipped).
#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub n: usize,
    pub p: LpExponent,
    pub points: Vec<SandwichPoint>,
    pub lower_over_k: (f64, f64),
    pub k_over_upper: (f64, f64),
}

pub fn sandwich_sweep(
    f: &SpectralFunction,
    n: usize,
    p: LpExponent,
    rhos: &[f64],
    oversample: usize,
) -> Result<SandwichReport> {
    let points = rhos
        .iter()
        .map(|&rho| realization_sandwich(f, rho, n, p, oversample))
        .collect::<Result<Vec<_>>>()?;
    let range = |it: &mut dyn Iterator<Item = f64>| {
        it.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
    };
    let lower_over_k = range(&mut points.iter().filter(|pt| pt.kfun > 0.0).map(|pt| pt.lower / pt.kfun));
    let k_over_upper = range(&mut points.iter().filter(|pt| pt.upper > 0.0).map(|pt| pt.kfun / pt.upper));
    Ok(SandwichReport {
        n,
        p,
        points,
        lower_over_k,
        k_over_upper,
    })
}
