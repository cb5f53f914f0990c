//! Truncated Fourier representation of functions on the torus `T^d`.
//!
//! A [`SpectralFunction`] is a trigonometric polynomial whose coefficients live
//! in the box `|k_j| <= K`. Only nonzero coefficients are stored, sorted by
//! multi-index, so block multipliers are a single pass over the terms and
//! one-mode-per-block test functions stay small even for large `K`.
//!
//! [`SampleField`] holds values on the uniform grid `x_j = 2*pi*t_j/m`; with the
//! weight `m^-d` the grid sum is the normalized Haar measure on the torus.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{invalid, Error, Result};

/// Largest grid (total number of points) we are willing to materialize.
pub const MAX_GRID_POINTS: usize = 1 << 27;

/// Integer frequency vector `k` in `Z^d`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MultiIndex(SmallVec<[i32; 4]>);

impl MultiIndex {
    pub fn new(components: impl IntoIterator<Item = i32>) -> Self {
        MultiIndex(components.into_iter().collect())
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[i32] {
        &self.0
    }

    /// The l1-degree `|k|_1`, i.e. the block this index belongs to.
    pub fn l1(&self) -> usize {
        self.0.iter().map(|c| c.unsigned_abs() as usize).sum()
    }

    /// Largest `|k_j|`; the index fits a box of degree `K` iff this is `<= K`.
    pub fn max_abs(&self) -> usize {
        self.0
            .iter()
            .map(|c| c.unsigned_abs() as usize)
            .max()
            .unwrap_or(0)
    }

    /// Membership in `Y = Z^d_+ ∪ Z^d_-`: all components nonnegative, or all
    /// strictly negative.
    pub fn in_y(&self) -> bool {
        self.0.iter().all(|&c| c >= 0) || self.0.iter().all(|&c| c < 0)
    }

    pub fn neg(&self) -> Self {
        MultiIndex(self.0.iter().map(|c| -c).collect())
    }
}

impl From<Vec<i32>> for MultiIndex {
    fn from(v: Vec<i32>) -> Self {
        MultiIndex(SmallVec::from_vec(v))
    }
}

impl From<&[i32]> for MultiIndex {
    fn from(v: &[i32]) -> Self {
        MultiIndex(SmallVec::from_slice(v))
    }
}

impl<const N: usize> From<[i32; N]> for MultiIndex {
    fn from(v: [i32; N]) -> Self {
        MultiIndex(v.iter().copied().collect())
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of the box `|k_j| <= degree`, in lexicographic order.
pub fn box_indices(dim: usize, degree: usize) -> impl Iterator<Item = MultiIndex> {
    let side = 2 * degree + 1;
    let total = side.pow(dim as u32);
    let k = degree as i64;
    (0..total).map(move |mut flat| {
        let mut comps: SmallVec<[i32; 4]> = SmallVec::from_elem(0, dim);
        for j in (0..dim).rev() {
            comps[j] = ((flat % side) as i64 - k) as i32;
            flat /= side;
        }
        MultiIndex(comps)
    })
}

/// Exponent `p` of an `L_p` norm, `1 <= p <= inf`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LpExponent {
    Finite(f64),
    Infinity,
}

impl LpExponent {
    pub const ONE: LpExponent = LpExponent::Finite(1.0);
    pub const TWO: LpExponent = LpExponent::Finite(2.0);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            Ok(LpExponent::Infinity)
        } else if p >= 1.0 {
            Ok(LpExponent::Finite(p))
        } else {
            Err(invalid(format!("L_p exponent must satisfy p >= 1, got {p}")))
        }
    }

    pub fn is_two(&self) -> bool {
        matches!(self, LpExponent::Finite(p) if *p == 2.0)
    }
}

impl FromStr for LpExponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "∞" => Ok(LpExponent::Infinity),
            other => {
                let p: f64 = other.parse().map_err(|_| Error::Parse {
                    what: "L_p exponent",
                    input: s.to_string(),
                })?;
                LpExponent::new(p)
            }
        }
    }
}

impl fmt::Display for LpExponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LpExponent::Finite(p) => write!(f, "{p}"),
            LpExponent::Infinity => write!(f, "inf"),
        }
    }
}

impl Serialize for LpExponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for LpExponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A trigonometric polynomial `sum_k c_k e^{i<k,x>}` with `|k_j| <= K`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralFile", into = "SpectralFile")]
pub struct SpectralFunction {
    dim: usize,
    degree: usize,
    real: bool,
    terms: Vec<(MultiIndex, Complex64)>,
}

const HERMITIAN_TOL: f64 = 1e-12;

impl SpectralFunction {
    /// Builds a function from arbitrary `(k, c_k)` pairs. Duplicate indices are
    /// summed and exact zeros dropped. With `real` set, the coefficients must be
    /// Hermitian-symmetric, `c_{-k} = conj(c_k)`.
    pub fn new(
        dim: usize,
        degree: usize,
        real: bool,
        terms: impl IntoIterator<Item = (MultiIndex, Complex64)>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut collected: Vec<(MultiIndex, Complex64)> = Vec::new();
        for (k, c) in terms {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch {
                    index: k.components().to_vec(),
                    got: k.dim(),
                    expected: dim,
                });
            }
            if k.max_abs() > degree {
                return Err(Error::OutsideBox {
                    index: k.components().to_vec(),
                    degree,
                });
            }
            collected.push((k, c));
        }
        collected.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(MultiIndex, Complex64)> = Vec::with_capacity(collected.len());
        for (k, c) in collected {
            match merged.last_mut() {
                Some((last, acc)) if *last == k => *acc += c,
                _ => merged.push((k, c)),
            }
        }
        merged.retain(|(_, c)| *c != Complex64::new(0.0, 0.0));
        let f = SpectralFunction {
            dim,
            degree,
            real,
            terms: merged,
        };
        if real {
            f.hermitian_violation(HERMITIAN_TOL)
                .map_or(Ok(()), |k| Err(Error::NotHermitian(k.components().to_vec())))?;
        }
        Ok(f)
    }

    /// Terms must already be sorted, unique and inside the box.
    pub(crate) fn from_sorted(
        dim: usize,
        degree: usize,
        real: bool,
        terms: Vec<(MultiIndex, Complex64)>,
    ) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0 < w[1].0));
        SpectralFunction {
            dim,
            degree,
            real,
            terms,
        }
    }

    pub fn zero(dim: usize, degree: usize) -> Result<Self> {
        Self::new(dim, degree, true, std::iter::empty())
    }

    pub fn constant(dim: usize, degree: usize, value: f64) -> Result<Self> {
        Self::new(
            dim,
            degree,
            true,
            [(MultiIndex::zero(dim), Complex64::new(value, 0.0))],
        )
    }

    /// `c * e_k`.
    pub fn single_mode(dim: usize, degree: usize, k: MultiIndex, c: Complex64) -> Result<Self> {
        let real = k.l1() == 0 && c.im == 0.0;
        Self::new(dim, degree, real, [(k, c)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Box degree `K` per axis.
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn terms(&self) -> &[(MultiIndex, Complex64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest block any function in this box can occupy, `d*K`.
    pub fn nu_max(&self) -> usize {
        self.dim * self.degree
    }

    pub fn coeff(&self, k: &MultiIndex) -> Complex64 {
        self.terms
            .binary_search_by(|(idx, _)| idx.cmp(k))
            .map(|i| self.terms[i].1)
            .unwrap_or_default()
    }

    /// Largest `|k|_1` over nonzero coefficients (0 for the zero function).
    pub fn max_degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, c)| c.norm_sqr() > 0.0)
            .map(|(k, _)| k.l1())
            .max()
            .unwrap_or(0)
    }

    /// Squared l2 mass of every block `|k|_1 = nu`, for `nu = 0..=d*K`.
    pub fn block_energies(&self) -> Vec<f64> {
        let mut e = vec![0.0; self.nu_max() + 1];
        for (k, c) in &self.terms {
            e[k.l1()] += c.norm_sqr();
        }
        e
    }

    pub fn l2_norm(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, c)| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Returns the first index where `c_{-k} != conj(c_k)` beyond `tol`.
    pub fn hermitian_violation(&self, tol: f64) -> Option<&MultiIndex> {
        self.terms.iter().find_map(|(k, c)| {
            let mirror = self.coeff(&k.neg()).conj();
            let scale = 1f64.max(c.norm()).max(mirror.norm());
            ((c - mirror).norm() > tol * scale).then_some(k)
        })
    }

    /// Multiplies each coefficient by `mult(|k|_1)`.
    pub(crate) fn map_blocks(
        &self,
        keeps_real: bool,
        mut mult: impl FnMut(usize) -> Complex64,
    ) -> SpectralFunction {
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| (k.clone(), c * mult(k.l1())))
            .collect();
        SpectralFunction::from_sorted(self.dim, self.degree, self.real && keeps_real, terms)
    }

    pub fn scale(&self, factor: Complex64) -> SpectralFunction {
        self.map_blocks(factor.im == 0.0, |_| factor)
    }

    /// `a*self + b*other`. The result lives in the larger of the two boxes.
    pub fn linear_combination(
        &self,
        a: Complex64,
        other: &SpectralFunction,
        b: Complex64,
    ) -> Result<SpectralFunction> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                index: Vec::new(),
                got: other.dim,
                expected: self.dim,
            });
        }
        let mut out = Vec::with_capacity(self.terms.len().max(other.terms.len()));
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => std::cmp::Ordering::Less,
                _ => std::cmp::Ordering::Greater,
            };
            match ord {
                std::cmp::Ordering::Less => {
                    out.push((self.terms[i].0.clone(), a * self.terms[i].1));
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push((other.terms[j].0.clone(), b * other.terms[j].1));
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((
                        self.terms[i].0.clone(),
                        a * self.terms[i].1 + b * other.terms[j].1,
                    ));
                    i += 1;
                    j += 1;
                }
            }
        }
        let real = self.real && other.real && a.im == 0.0 && b.im == 0.0;
        Ok(SpectralFunction::from_sorted(
            self.dim,
            self.degree.max(other.degree),
            real,
            out,
        ))
    }

    pub fn add(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        self.linear_combination(Complex64::new(1.0, 0.0), other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        self.linear_combination(Complex64::new(1.0, 0.0), other, Complex64::new(-1.0, 0.0))
    }

    /// `max_k |a_k - b_k|` over the union of supports.
    pub fn max_coeff_diff(&self, other: &SpectralFunction) -> f64 {
        self.diff_by(other, |a, b| (a - b).norm())
    }

    /// `max_k |a_k - b_k| / max(1, |a_k|, |b_k|)`.
    pub fn max_scaled_coeff_diff(&self, other: &SpectralFunction) -> f64 {
        self.diff_by(other, |a, b| {
            (a - b).norm() / 1f64.max(a.norm()).max(b.norm())
        })
    }

    fn diff_by(&self, other: &SpectralFunction, metric: impl Fn(Complex64, Complex64) -> f64) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, a) in &self.terms {
            worst = worst.max(metric(*a, other.coeff(k)));
        }
        for (k, b) in &other.terms {
            worst = worst.max(metric(self.coeff(k), *b));
        }
        worst
    }

    /// Keeps the coefficients with `|k|_1 <= m`.
    pub fn partial_sum(&self, m: usize) -> SpectralFunction {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.l1() <= m)
            .cloned()
            .collect();
        SpectralFunction::from_sorted(self.dim, self.degree, self.real, terms)
    }

    /// Zeroes every coefficient with `k` outside `Y`.
    pub fn project_y(&self) -> SpectralFunction {
        let terms: Vec<_> = self
            .terms
            .iter()
            .filter(|(k, _)| k.in_y())
            .cloned()
            .collect();
        // Hermitian pairs survive only when both k and -k are in Y.
        let real = self.real && terms.iter().all(|(k, _)| k.neg().in_y());
        SpectralFunction::from_sorted(self.dim, self.degree, real, terms)
    }

    pub fn is_y_supported(&self) -> bool {
        self.terms.iter().all(|(k, _)| k.in_y())
    }

    /// `||f||_p`. Exact (Parseval) for `p = 2`; otherwise grid quadrature on
    /// `m = oversample * (2K+1)` points per axis.
    pub fn norm(&self, p: LpExponent, oversample: usize) -> Result<f64> {
        if p.is_two() {
            return Ok(self.l2_norm());
        }
        let m = oversample.max(1) * (2 * self.degree + 1);
        Ok(lp_norm(&synthesize(self, m)?, p))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spectral function serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse {
            what: "spectral function JSON",
            input: e.to_string(),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SpectralFile {
    d: usize,
    #[serde(rename = "K")]
    k: usize,
    real: bool,
    coeffs: Vec<(Vec<i32>, f64, f64)>,
}

impl From<SpectralFunction> for SpectralFile {
    fn from(f: SpectralFunction) -> Self {
        SpectralFile {
            d: f.dim,
            k: f.degree,
            real: f.real,
            coeffs: f
                .terms
                .into_iter()
                .map(|(k, c)| (k.components().to_vec(), c.re, c.im))
                .collect(),
        }
    }
}

impl TryFrom<SpectralFile> for SpectralFunction {
    type Error = Error;

    fn try_from(file: SpectralFile) -> Result<Self> {
        SpectralFunction::new(
            file.d,
            file.k,
            file.real,
            file.coeffs
                .into_iter()
                .map(|(k, re, im)| (MultiIndex::from(k), Complex64::new(re, im))),
        )
    }
}

/// Values on the uniform grid of `T^d`, row-major with axis 0 slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleField {
    dim: usize,
    m: usize,
    values: Vec<Complex64>,
}

fn grid_len(dim: usize, m: usize) -> Result<usize> {
    let mut n: usize = 1;
    for _ in 0..dim {
        n = n
            .checked_mul(m)
            .filter(|&n| n <= MAX_GRID_POINTS)
            .ok_or_else(|| invalid(format!("grid {m}^{dim} exceeds {MAX_GRID_POINTS} points")))?;
    }
    Ok(n)
}

impl SampleField {
    pub fn new(dim: usize, m: usize, values: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let expected = grid_len(dim, m)?;
        if values.len() != expected {
            return Err(Error::FieldSize {
                got: values.len(),
                expected,
            });
        }
        Ok(SampleField { dim, m, values })
    }

    /// Samples `g(x)` at every grid point `x = 2*pi*t/m`.
    pub fn from_fn(dim: usize, m: usize, g: impl Fn(&[f64]) -> Complex64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let n = grid_len(dim, m)?;
        let mut x = vec![0.0; dim];
        let values = (0..n)
            .map(|flat| {
                grid_point_into(flat, dim, m, &mut x);
                g(&x)
            })
            .collect();
        Ok(SampleField { dim, m, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    /// Coordinates of the grid point with the given flat index.
    pub fn point(&self, flat: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        grid_point_into(flat, self.dim, self.m, &mut x);
        x
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max)
    }

    pub fn is_real(&self, rel_tol: f64) -> bool {
        self.max_imag() <= rel_tol * self.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn max_abs_diff(&self, other: &SampleField) -> f64 {
        assert_eq!(self.values.len(), other.values.len(), "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn grid_point_into(mut flat: usize, dim: usize, m: usize, x: &mut [f64]) {
    let h = std::f64::consts::TAU / m as f64;
    for j in (0..dim).rev() {
        x[j] = (flat % m) as f64 * h;
        flat /= m;
    }
}

fn wrap(c: i32, m: usize) -> usize {
    c.rem_euclid(m as i32) as usize
}

pub(crate) fn flat_index(k: &MultiIndex, m: usize) -> usize {
    k.components().iter().fold(0, |acc, &c| acc * m + wrap(c, m))
}

/// In-place unnormalized DFT along every axis of an `m^dim` buffer.
fn transform_axes(buf: &mut [Complex64], dim: usize, m: usize, direction: FftDirection) {
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft(m, direction);
    let mut line = vec![Complex64::default(); m];
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for axis in 0..dim {
        let stride = m.pow((dim - 1 - axis) as u32);
        let block = stride * m;
        for outer in (0..buf.len()).step_by(block) {
            for inner in 0..stride {
                let base = outer + inner;
                for (t, v) in line.iter_mut().enumerate() {
                    *v = buf[base + t * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (t, v) in line.iter().enumerate() {
                    buf[base + t * stride] = *v;
                }
            }
        }
    }
}

/// Normalized forward DFT `m^-d sum_t v(t) e^{-i<k,2 pi t/m>}`, indexed by
/// `k mod m` in the same row-major layout.
pub(crate) fn forward_dft(s: &SampleField) -> Vec<Complex64> {
    let mut buf = s.values.clone();
    transform_axes(&mut buf, s.dim, s.m, FftDirection::Forward);
    let norm = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|v| *v *= norm);
    buf
}

/// Evaluates `f` on the `m^d` grid. Requires `m >= 2K+1`.
pub fn synthesize(f: &SpectralFunction, m: usize) -> Result<SampleField> {
    if m < 2 * f.degree + 1 {
        return Err(Error::Aliasing {
            m,
            degree: f.degree,
        });
    }
    let n = grid_len(f.dim, m)?;
    let mut buf = vec![Complex64::default(); n];
    for (k, c) in &f.terms {
        buf[flat_index(k, m)] += c;
    }
    transform_axes(&mut buf, f.dim, m, FftDirection::Inverse);
    SampleField::new(f.dim, m, buf)
}

/// Discrete Fourier coefficients of `s` in the box `|k_j| <= degree`.
/// Requires `m >= 2K+1`.
pub fn analyze(s: &SampleField, degree: usize) -> Result<SpectralFunction> {
    if s.m < 2 * degree + 1 {
        return Err(Error::Aliasing { m: s.m, degree });
    }
    let dft = forward_dft(s);
    let real = s.is_real(1e-12);
    let terms = box_indices(s.dim, degree)
        .filter_map(|k| {
            let c = dft[flat_index(&k, s.m)];
            (c != Complex64::default()).then_some((k, c))
        })
        .collect();
    Ok(SpectralFunction::from_sorted(s.dim, degree, real, terms))
}

/// Grid `L_p` norm: `(m^-d sum |v|^p)^(1/p)`, or `max |v|` for `p = inf`.
pub fn lp_norm(s: &SampleField, p: LpExponent) -> f64 {
    match p {
        LpExponent::Infinity => s.max_abs(),
        LpExponent::Finite(p) => {
            let n = s.values.len() as f64;
            let mean = if p == 1.0 {
                s.values.iter().map(|v| v.norm()).sum::<f64>() / n
            } else if p == 2.0 {
                s.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / n
            } else {
                s.values.iter().map(|v| v.norm().powf(p)).sum::<f64>() / n
            };
            mean.powf(1.0 / p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_synthesizes_to_ones() {
        let f = SpectralFunction::constant(1, 2, 1.0).unwrap();
        let s = synthesize(&f, 8).unwrap();
        assert!(s.values().iter().all(|v| (v - c(1.0, 0.0)).norm() < 1e-15));
    }

    #[test]
    fn single_mode_is_plane_wave() {
        let f = SpectralFunction::single_mode(2, 1, MultiIndex::from([1, 0]), c(1.0, 0.0)).unwrap();
        let s = synthesize(&f, 4).unwrap();
        for (flat, v) in s.values().iter().enumerate() {
            let x = s.point(flat);
            let expect = Complex64::from_polar(1.0, x[0]);
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn cosine_analysis() {
        let s = SampleField::from_fn(1, 8, |x| c(x[0].cos(), 0.0)).unwrap();
        let f = analyze(&s, 2).unwrap();
        assert!((f.coeff(&MultiIndex::from([1])) - c(0.5, 0.0)).norm() < 1e-15);
        assert!((f.coeff(&MultiIndex::from([-1])) - c(0.5, 0.0)).norm() < 1e-15);
        for k in [0, 2, -2] {
            assert!(f.coeff(&MultiIndex::from([k])).norm() < 1e-15);
        }
        assert!(f.is_real());
    }

    #[test]
    fn orthogonality_in_three_dims() {
        let k = MultiIndex::from([1, -1, 1]);
        let s = SampleField::from_fn(3, 7, |x| {
            Complex64::from_polar(1.0, x[0] - x[1] + x[2])
        })
        .unwrap();
        let f = analyze(&s, 3).unwrap();
        for (idx, v) in f.terms() {
            let want = if *idx == k { 1.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-13, "{idx}: {v}");
        }
    }

    #[test]
    fn aliasing_is_rejected() {
        let f = SpectralFunction::constant(1, 4, 1.0).unwrap();
        assert_eq!(synthesize(&f, 8), Err(Error::Aliasing { m: 8, degree: 4 }));
        let s = synthesize(&f, 9).unwrap();
        assert!(analyze(&s, 5).is_err());
    }

    #[test]
    fn norms_of_simple_fields() {
        let s = SampleField::from_fn(2, 5, |_| c(-3.0, 4.0)).unwrap();
        for p in [LpExponent::ONE, LpExponent::TWO, LpExponent::Finite(3.5), LpExponent::Infinity] {
            assert!((lp_norm(&s, p) - 5.0).abs() < 1e-13);
        }
        let e = SampleField::from_fn(2, 6, |x| Complex64::from_polar(1.0, 2.0 * x[0] - x[1])).unwrap();
        for p in [LpExponent::ONE, LpExponent::TWO, LpExponent::Infinity] {
            assert!((lp_norm(&e, p) - 1.0).abs() < 1e-14);
        }
        let cos = SampleField::from_fn(1, 9, |x| c(x[0].cos(), 0.0)).unwrap();
        assert!((lp_norm(&cos, LpExponent::TWO) - 0.5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn partial_sum_blocks() {
        let f = SpectralFunction::new(
            2,
            2,
            false,
            [
                (MultiIndex::from([0, 0]), c(1.0, 0.0)),
                (MultiIndex::from([0, -1]), c(2.0, 0.0)),
                (MultiIndex::from([1, 1]), c(3.0, 0.0)),
                (MultiIndex::from([2, -1]), c(4.0, 0.0)),
            ],
        )
        .unwrap();
        assert_eq!(f.partial_sum(0).len(), 1);
        let s1 = f.partial_sum(1);
        assert_eq!(s1.len(), 2);
        assert!(s1.terms().iter().all(|(k, _)| k.l1() <= 1));
        assert_eq!(f.partial_sum(f.nu_max()), f);
    }

    #[test]
    fn y_projection() {
        let f = SpectralFunction::new(
            2,
            3,
            false,
            [
                (MultiIndex::from([1, -1]), c(1.0, 0.0)),
                (MultiIndex::from([2, 1]), c(2.0, 0.0)),
                (MultiIndex::from([-1, -3]), c(3.0, 0.0)),
                (MultiIndex::from([-1, 0]), c(5.0, 0.0)),
            ],
        )
        .unwrap();
        let y = f.project_y();
        assert_eq!(y.coeff(&MultiIndex::from([1, -1])), c(0.0, 0.0));
        assert_eq!(y.coeff(&MultiIndex::from([-1, 0])), c(0.0, 0.0));
        assert_eq!(y.coeff(&MultiIndex::from([2, 1])), c(2.0, 0.0));
        assert_eq!(y.coeff(&MultiIndex::from([-1, -3])), c(3.0, 0.0));

        let g = SpectralFunction::new(
            1,
            3,
            true,
            [
                (MultiIndex::from([-2]), c(1.0, -1.0)),
                (MultiIndex::from([0]), c(0.5, 0.0)),
                (MultiIndex::from([2]), c(1.0, 1.0)),
            ],
        )
        .unwrap();
        assert_eq!(g.project_y(), g);
    }

    #[test]
    fn hermitian_check_on_construction() {
        let bad = SpectralFunction::new(1, 1, true, [(MultiIndex::from([1]), c(1.0, 0.0))]);
        assert!(matches!(bad, Err(Error::NotHermitian(_))));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(SpectralFunction::zero(0, 3), Err(Error::InvalidDimension(0)));
        let outside = SpectralFunction::new(1, 1, false, [(MultiIndex::from([2]), c(1.0, 0.0))]);
        assert!(matches!(outside, Err(Error::OutsideBox { .. })));
        let wrong_dim = SpectralFunction::new(2, 1, false, [(MultiIndex::from([1]), c(1.0, 0.0))]);
        assert!(matches!(wrong_dim, Err(Error::DimensionMismatch { .. })));
        assert!("0.5".parse::<LpExponent>().is_err());
        assert_eq!("inf".parse::<LpExponent>().unwrap(), LpExponent::Infinity);
    }

    #[test]
    fn json_round_trip() {
        let f = SpectralFunction::new(
            2,
            2,
            true,
            [
                (MultiIndex::from([1, -2]), c(0.1, 1.0 / 3.0)),
                (MultiIndex::from([-1, 2]), c(0.1, -1.0 / 3.0)),
                (MultiIndex::from([0, 0]), c(std::f64::consts::PI, 0.0)),
            ],
        )
        .unwrap();
        let back = SpectralFunction::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
        let text = r#"{"d":1,"K":2,"real":false,"coeffs":[[[2],1.0,0.0]]}"#;
        let g = SpectralFunction::from_json(text).unwrap();
        assert_eq!(g.coeff(&MultiIndex::from([2])), c(1.0, 0.0));
        assert!(SpectralFunction::from_json(r#"{"d":1,"K":1,"real":false,"coeffs":[[[2],1.0,0.0]]}"#).is_err());
    }

    #[test]
    fn direct_grid_sum_matches_fft() {
        // Independent O(N*M) evaluation of the defining sum.
        let f = SpectralFunction::new(
            2,
            2,
            false,
            box_indices(2, 2).enumerate().map(|(i, k)| (k, c(i as f64 * 0.1, 1.0 - i as f64 * 0.05))),
        )
        .unwrap();
        let s = synthesize(&f, 6).unwrap();
        for (flat, v) in s.values().iter().enumerate() {
            let x = s.point(flat);
            let direct: Complex64 = f
                .terms()
                .iter()
                .map(|(k, ck)| {
                    let phase: f64 = k.components().iter().zip(&x).map(|(&kj, xj)| kj as f64 * xj).sum();
                    ck * Complex64::from_polar(1.0, phase)
                })
                .sum();
            assert!((v - direct).norm() < 1e-12);
        }
        assert!((s.point(7)[1] - TAU / 6.0).abs() < 1e-15);
    }
}
