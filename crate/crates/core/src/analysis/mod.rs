//! Smoothness quantities built on the operators: the realization quantity
//! `M_p`, the integral form of `f - A_{rho,r} f`, K-functionals, moduli with
//! their Zygmund-Bari-Stechkin checks, and multiplier norm estimates.

mod kfunctional;
mod modulus;
mod multnorm;

pub use kfunctional::{
    k_functional, k_functional_blocks, k_functional_pgd, realization_sandwich, sandwich_sweep,
    BlockSolution, KFunEstimate, SandwichPoint, SandwichReport,
};
pub use modulus::{default_deltas, zbs_check, ConditionReport, Modulus, Verdict, ZbsReport, ZbsSeries};
pub use multnorm::{multiplier_norm, NormEstimate};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{invalid, Result};
use crate::operators::{poisson_mean, poisson_rho_derivative, radial_derivative};
use crate::quadrature::GaussLegendre;
use crate::spectral::{synthesize, LpExponent, SampleField, SpectralFunction};

/// `M_p(rho, f, r) = ||(f(rho,.))^[r]||_p`, together with the equivalent
/// `rho^r ||d^r f(rho,.)/drho^r||_p` computed through the other route.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct MpValue {
    pub rho: f64,
    pub r: usize,
    pub p: LpExponent,
    pub value: f64,
    pub derivative_form: f64,
}

pub fn m_p(
    f: &SpectralFunction,
    rho: f64,
    r: usize,
    p: LpExponent,
    oversample: usize,
) -> Result<MpValue> {
    if !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [0,1), got {rho}")));
    }
    let value = radial_derivative(&poisson_mean(f, rho), r).norm(p, oversample)?;
    let derivative_form = rho.powi(r as i32) * poisson_rho_derivative(f, rho, r).norm(p, oversample)?;
    Ok(MpValue {
        rho,
        r,
        p,
        value,
        derivative_form,
    })
}

/// `(1/(r-1)!) int_rho^1 d^r f(zeta,x)/dzeta^r (1-zeta)^(r-1) dzeta` on the
/// `m^d` grid.
///
/// The integrand is a polynomial in `zeta` of degree at most
/// `maxDegree(f) - 1`, so a Gauss-Legendre rule with
/// `(maxDegree + r)/2 + 1` nodes integrates it exactly.
pub fn remainder_integral(
    f: &SpectralFunction,
    rho: f64,
    r: usize,
    m: usize,
) -> Result<SampleField> {
    if r == 0 {
        return Err(invalid("remainder integral needs r >= 1"));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(invalid(format!("rho must lie in [0,1), got {rho}")));
    }
    let nodes = (f.max_degree() + r) / 2 + 1;
    let rule = GaussLegendre::new(nodes);
    let inv_fact: f64 = 1.0 / (1..r).map(|i| i as f64).product::<f64>();
    let mut acc = SpectralFunction::zero(f.dim(), f.degree())?;
    for (zeta, w) in rule.mapped(rho, 1.0) {
        let weight = w * (1.0 - zeta).powi(r as i32 - 1) * inv_fact;
        let term = poisson_rho_derivative(f, zeta, r);
        acc = acc.linear_combination(Complex64::new(1.0, 0.0), &term, Complex64::new(weight, 0.0))?;
    }
    synthesize(&acc, m)
}
