use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::experiments::{random_function, Support};
use crate::operators::BlockMultiplier;
use crate::spectral::{box_indices, lp_norm, synthesize, LpExponent, MultiIndex, SpectralFunction};

/// Norm of a block multiplier on Y-supported trigonometric polynomials of
/// coordinate degree `K` in dimension `d`.
///
/// At `p = 2` the value is exact. At `p` in `{1, inf}` it is a bracket
/// `[lower, upper]` on the `m^d` grid; for other `p` only `lower` is known.
#[derive(Clone, Debug, Serialize)]
pub struct NormEstimate {
    pub d: usize,
    pub p: LpExponent,
    pub nu_max: usize,
    pub exact: Option<f64>,
    pub lower: f64,
    pub upper: Option<f64>,
    pub grid: Option<usize>,
    pub trials: usize,
}

/// Relative slack for comparing grid-computed bounds (FFT rounding).
const BRACKET_SLACK: f64 = 1e-12;

fn at_most(a: f64, b: f64) -> bool {
    a <= b + BRACKET_SLACK * a.abs().max(b.abs())
}

impl NormEstimate {
    /// `lower <= upper` up to rounding (vacuous without an upper bound).
    pub fn is_consistent(&self) -> bool {
        self.upper.is_none_or(|u| at_most(self.lower, u))
    }

    /// Whether two brackets share a value, up to rounding.
    pub fn overlaps(&self, other: &NormEstimate) -> bool {
        let hi = |e: &NormEstimate| e.upper.unwrap_or(f64::INFINITY);
        at_most(self.lower, hi(other)) && at_most(other.lower, hi(self))
    }
}

/// A Y-index with `|k|_1 = nu` inside the box `[0, K]^d`.
fn y_index(d: usize, degree: usize, nu: usize) -> MultiIndex {
    let mut rest = nu;
    MultiIndex::new((0..d).map(|_| {
        let c = rest.min(degree);
        rest -= c;
        c as i32
    }))
}

pub fn multiplier_norm(
    mult: &BlockMultiplier,
    d: usize,
    p: LpExponent,
    degree: usize,
    m: usize,
    seed: u64,
    trials: usize,
) -> Result<NormEstimate> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let nu_max = d * degree;
    if mult.nu_max() < nu_max {
        return Err(Error::MultiplierTooShort {
            needed: nu_max,
            have: mult.nu_max(),
        });
    }
    let mu = mult.values();
    if p.is_two() {
        let sup = mu[..=nu_max].iter().fold(0.0f64, |a, z| a.max(z.norm()));
        return Ok(NormEstimate {
            d,
            p,
            nu_max,
            exact: Some(sup),
            lower: sup,
            upper: Some(sup),
            grid: None,
            trials: 0,
        });
    }

    let ratio = |f: &SpectralFunction| -> Result<f64> {
        let fs = synthesize(f, m)?;
        let gs = synthesize(&mult.apply(f)?, m)?;
        let denom = lp_norm(&fs, p);
        Ok(if denom > 0.0 { lp_norm(&gs, p) / denom } else { 0.0 })
    };
    let one = Complex64::new(1.0, 0.0);
    let mut lower = 0.0f64;
    for nu in 0..=nu_max {
        let e = SpectralFunction::single_mode(d, degree, y_index(d, degree, nu), one)?;
        lower = lower.max(ratio(&e)?);
    }
    for t in 0..trials {
        let f = random_function(d, degree, false, Support::Y, seed.wrapping_add(t as u64))?;
        lower = lower.max(ratio(&f)?);
    }

    let upper = if p == LpExponent::ONE || p == LpExponent::Infinity {
        let kernel = SpectralFunction::new(
            d,
            degree,
            false,
            box_indices(d, degree)
                .filter(MultiIndex::in_y)
                .map(|k| {
                    let c = mu[k.l1()];
                    (k, c)
                }),
        )?;
        Some(lp_norm(&synthesize(&kernel, m)?, LpExponent::ONE))
    } else {
        None
    };

    Ok(NormEstimate {
        d,
        p,
        nu_max,
        exact: None,
        lower,
        upper,
        grid: Some(m),
        trials,
    })
}
