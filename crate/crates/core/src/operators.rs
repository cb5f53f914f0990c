//! Block multipliers: operators that scale every Fourier coefficient with
//! `|k|_1 = nu` by the same number `mu_nu`.
//!
//! Every summation method here (Poisson means, Taylor-Abel-Poisson means,
//! radial derivatives, rho-derivatives of the Poisson integral, the Leis
//! means) is such a multiplier. [`taylor_form`] is the one exception: it
//! rebuilds `A_{rho,r} f` from rho-derivatives of the Poisson integral
//! instead of from the lambda coefficients, so the two routes can be
//! compared.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::spectral::{self, SampleField, SpectralFunction};

/// A sequence `mu_0, ..., mu_{nu_max}` acting block-uniformly.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockMultiplier {
    values: Vec<Complex64>,
    label: String,
}

impl BlockMultiplier {
    pub fn new(label: impl Into<String>, values: Vec<Complex64>) -> Self {
        BlockMultiplier {
            values,
            label: label.into(),
        }
    }

    /// Materializes `mu(nu)` for `nu = 0..=nu_max`.
    pub fn from_fn(label: impl Into<String>, nu_max: usize, mu: impl Fn(usize) -> f64) -> Self {
        Self::new(
            label,
            (0..=nu_max).map(|nu| Complex64::new(mu(nu), 0.0)).collect(),
        )
    }

    pub fn identity(nu_max: usize) -> Self {
        Self::from_fn("identity", nu_max, |_| 1.0)
    }

    pub fn poisson(rho: f64, nu_max: usize) -> Self {
        Self::from_fn(format!("poisson(rho={rho})"), nu_max, |nu| {
            rho.powi(nu as i32)
        })
    }

    pub fn tap(params: TapParameters, nu_max: usize) -> Self {
        Self::from_fn(
            format!("tap(rho={}, r={})", params.rho, params.r),
            nu_max,
            |nu| lambda_coeff(nu, params.r, params.rho),
        )
    }

    pub fn radial(n: usize, nu_max: usize) -> Self {
        Self::from_fn(format!("radial(n={n})"), nu_max, |nu| falling_factorial(nu, n))
    }

    pub fn rho_derivative(rho: f64, j: usize, nu_max: usize) -> Self {
        Self::from_fn(format!("d^{j}/drho^{j} poisson(rho={rho})"), nu_max, |nu| {
            rho_derivative_factor(nu, j, rho)
        })
    }

    pub fn leis(rho: f64, r: usize, nu_max: usize) -> Self {
        Self::from_fn(format!("leis(rho={rho}, r={r})"), nu_max, |nu| {
            leis_factor(nu, r, rho)
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn nu_max(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    /// Pointwise product, truncated to the shorter sequence.
    pub fn compose(&self, other: &BlockMultiplier) -> BlockMultiplier {
        BlockMultiplier {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a * b)
                .collect(),
            label: format!("{} * {}", self.label, other.label),
        }
    }

    /// `sup_{nu <= nu_max} |mu_nu|`.
    pub fn sup_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, f: &SpectralFunction) -> Result<SpectralFunction> {
        let needed = f.max_degree();
        if self.values.is_empty() || self.nu_max() < needed {
            return Err(Error::MultiplierTooShort {
                needed,
                have: self.nu_max(),
            });
        }
        Ok(f.map_blocks(self.is_real(), |nu| self.values[nu]))
    }
}

pub fn apply_block_multiplier(
    f: &SpectralFunction,
    mult: &BlockMultiplier,
) -> Result<SpectralFunction> {
    mult.apply(f)
}

/// Parameters `(rho, r)` of the Taylor-Abel-Poisson mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TapParameters {
    pub rho: f64,
    pub r: usize,
}

impl TapParameters {
    pub fn new(rho: f64, r: usize) -> Result<Self> {
        if !(0.0..1.0).contains(&rho) {
            return Err(invalid(format!("rho must lie in [0,1), got {rho}")));
        }
        if r == 0 {
            return Err(invalid("r must be a positive integer"));
        }
        Ok(TapParameters { rho, r })
    }
}

/// `nu (nu-1) ... (nu-n+1)`, zero when `nu < n`.
pub fn falling_factorial(nu: usize, n: usize) -> f64 {
    if nu < n {
        return 0.0;
    }
    (0..n).map(|i| (nu - i) as f64).product()
}

fn rho_derivative_factor(nu: usize, j: usize, rho: f64) -> f64 {
    if nu < j {
        0.0
    } else {
        falling_factorial(nu, j) * rho.powi((nu - j) as i32)
    }
}

fn leis_factor(nu: usize, r: usize, rho: f64) -> f64 {
    let x = nu as f64 * (rho - 1.0);
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..r {
        term *= x / k as f64;
        sum += term;
    }
    sum
}

const RHO_ZERO: f64 = 1e-12;

/// `lambda_{nu,r}(rho)`: 1 for `nu < r`, otherwise the binomial sum
/// `sum_{j<r} C(nu,j) (1-rho)^j rho^(nu-j)`, i.e. `P(Bin(nu, 1-rho) <= r-1)`.
pub fn lambda_coeff(nu: usize, r: usize, rho: f64) -> f64 {
    if nu < r {
        return 1.0;
    }
    if rho < RHO_ZERO {
        return 0.0;
    }
    if rho >= 1.0 {
        return 1.0;
    }
    let ratio = (1.0 - rho) / rho;
    let seed = rho.powf(nu as f64);
    let sum = if seed > 1e-280 {
        let mut term = seed;
        let mut sum = term;
        for j in 0..r - 1 {
            term *= (nu - j) as f64 / (j + 1) as f64 * ratio;
            sum += term;
        }
        sum
    } else {
        // rho^nu underflows; walk the terms in log space.
        let log_ratio = ratio.ln();
        let mut log_term = nu as f64 * rho.ln();
        let mut sum = log_term.exp();
        for j in 0..r - 1 {
            log_term += ((nu - j) as f64 / (j + 1) as f64).ln() + log_ratio;
            sum += log_term.exp();
        }
        sum
    };
    sum.min(1.0)
}

/// `1 - lambda_{nu,r}(rho)` without cancellation: when lambda is close to 1
/// the binomial upper tail `sum_{j>=r}` is summed directly.
pub fn lambda_tail(nu: usize, r: usize, rho: f64) -> f64 {
    if nu < r || rho >= 1.0 {
        return 0.0;
    }
    if rho < RHO_ZERO {
        return 1.0;
    }
    let lambda = lambda_coeff(nu, r, rho);
    if lambda <= 0.5 {
        return 1.0 - lambda;
    }
    let delta = 1.0 - rho;
    let log_ratio = (delta / rho).ln();
    let mut log_term = (nu - r) as f64 * rho.ln() + r as f64 * delta.ln();
    for i in 0..r {
        log_term += ((nu - i) as f64 / (i + 1) as f64).ln();
    }
    let mode = ((nu + 1) as f64 * delta).floor() as usize;
    let mut sum = 0.0;
    for j in r..=nu {
        let term = log_term.exp();
        sum += term;
        if j > mode && term <= 1e-18 * sum {
            break;
        }
        log_term += ((nu - j) as f64 / (j + 1) as f64).ln() + log_ratio;
    }
    sum
}

/// Poisson integral `f(rho, .)`: multiplier `rho^nu` (with `0^0 = 1`).
pub fn poisson_mean(f: &SpectralFunction, rho: f64) -> SpectralFunction {
    f.map_blocks(true, |nu| Complex64::new(rho.powi(nu as i32), 0.0))
}

/// Taylor-Abel-Poisson mean `A_{rho,r} f`: multiplier `lambda_{nu,r}(rho)`.
pub fn tap_mean(f: &SpectralFunction, params: TapParameters) -> SpectralFunction {
    f.map_blocks(true, |nu| {
        Complex64::new(lambda_coeff(nu, params.r, params.rho), 0.0)
    })
}

/// Radial derivative `f^[n]`: multiplier `nu!/(nu-n)!`.
pub fn radial_derivative(f: &SpectralFunction, n: usize) -> SpectralFunction {
    f.map_blocks(true, |nu| Complex64::new(falling_factorial(nu, n), 0.0))
}

/// `d^j/drho^j f(rho, .)`: multiplier `nu!/(nu-j)! rho^(nu-j)`.
pub fn poisson_rho_derivative(f: &SpectralFunction, rho: f64, j: usize) -> SpectralFunction {
    f.map_blocks(true, |nu| Complex64::new(rho_derivative_factor(nu, j, rho), 0.0))
}

/// `sum_{j<r} d^j f(rho,.)/drho^j * (1-rho)^j / j!`.
pub fn taylor_form(f: &SpectralFunction, params: TapParameters) -> SpectralFunction {
    let delta = 1.0 - params.rho;
    let mut acc = poisson_rho_derivative(f, params.rho, 0);
    let mut weight = 1.0;
    for j in 1..params.r {
        weight *= delta / j as f64;
        let term = poisson_rho_derivative(f, params.rho, j);
        acc = acc
            .linear_combination(
                Complex64::new(1.0, 0.0),
                &term,
                Complex64::new(weight, 0.0),
            )
            .expect("same dimension");
    }
    acc
}

/// Leis means `sum_{k<r} d^k f/dn^k (1-rho)^k/k!`, where the normal derivative
/// acts on block `nu` as multiplication by `-nu`.
pub fn leis_mean(f: &SpectralFunction, rho: f64, r: usize) -> SpectralFunction {
    f.map_blocks(true, |nu| Complex64::new(leis_factor(nu, r, rho), 0.0))
}

fn check_rho(rho: f64) -> Result<()> {
    if (0.0..1.0).contains(&rho) {
        Ok(())
    } else {
        Err(invalid(format!("rho must lie in [0,1), got {rho}")))
    }
}

/// Closed-form Y-restricted Poisson kernel
/// `prod_j 1/(1 - rho e^{i x_j}) + prod_j 1/(1 - rho e^{-i x_j}) - 1` on the grid.
pub fn y_poisson_kernel(rho: f64, dim: usize, m: usize) -> Result<SampleField> {
    check_rho(rho)?;
    let one = Complex64::new(1.0, 0.0);
    SampleField::from_fn(dim, m, |x| {
        let plus: Complex64 = x
            .iter()
            .map(|&xj| one / (one - rho * Complex64::from_polar(1.0, xj)))
            .product();
        let minus: Complex64 = x
            .iter()
            .map(|&xj| one / (one - rho * Complex64::from_polar(1.0, -xj)))
            .product();
        plus + minus - one
    })
}

/// Grid convolution `m^-d sum_s f(x+s) P(rho, s)` of `f` with the closed-form
/// kernel. For `f` supported in `Y` this equals the Poisson integral
/// `f(rho, x)` up to the kernel's aliasing error `O(rho^(m-K))`.
pub fn y_kernel_poisson_mean(f: &SpectralFunction, rho: f64, m: usize) -> Result<SampleField> {
    let kernel = y_poisson_kernel(rho, f.dim(), m)?;
    if m < 2 * f.degree() + 1 {
        return Err(Error::Aliasing {
            m,
            degree: f.degree(),
        });
    }
    let kernel_hat = spectral::forward_dft(&kernel);
    // f(x+s) picks up the kernel coefficient at -k.
    let terms = f
        .terms()
        .iter()
        .map(|(k, c)| (k.clone(), c * kernel_hat[spectral::flat_index(&k.neg(), m)]))
        .collect::<Vec<_>>();
    let conv = SpectralFunction::from_sorted(f.dim(), f.degree(), false, terms);
    spectral::synthesize(&conv, m)
}
