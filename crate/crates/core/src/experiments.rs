//! Test-function generators, rho-sweeps with log-log slope fits, and the
//! direct/inverse rate experiments built on them.

use std::collections::HashSet;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::analysis::{default_deltas, k_functional, m_p, zbs_check, Modulus, ZbsReport};
use crate::error::{invalid, Error, Result};
use crate::operators::{lambda_tail, radial_derivative};
use crate::spectral::{box_indices, LpExponent, MultiIndex, SpectralFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Support {
    Full,
    Y,
}

/// Recipe for a function whose blocks carry energy exactly
/// `c_nu^2 = (nu+1)^(-2s)`.
#[derive(Clone, Debug, Serialize)]
pub struct DecaySpec {
    pub dim: usize,
    pub degree: usize,
    pub s: f64,
    pub seed: u64,
    pub support: Support,
    /// Random indices (or Hermitian pairs) per block; `None` spreads the
    /// energy evenly over the whole block.
    pub per_block: Option<usize>,
    pub real: bool,
    /// Inclusive block range to populate; defaults to every block.
    pub blocks: Option<(usize, usize)>,
}

impl DecaySpec {
    pub fn new(dim: usize, degree: usize, s: f64) -> Self {
        DecaySpec {
            dim,
            degree,
            s,
            seed: 0,
            support: Support::Full,
            per_block: None,
            real: false,
            blocks: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_support(mut self, support: Support) -> Self {
        self.support = support;
        self
    }

    pub fn with_per_block(mut self, q: usize) -> Self {
        self.per_block = Some(q);
        self
    }

    pub fn with_real(mut self, real: bool) -> Self {
        self.real = real;
        self
    }

    pub fn with_blocks(mut self, lo: usize, hi: usize) -> Self {
        self.blocks = Some((lo, hi));
        self
    }
}

/// Counts of integer vectors whose components have magnitudes in `[lo, K]`
/// and sum to a given total, with uniform sampling from each level set.
struct Compositions {
    lo: usize,
    degree: usize,
    /// Components may carry either sign (magnitude `a > 0` counts twice).
    signed: bool,
    /// Sign applied to the components when `signed` is off.
    sign: i32,
    prefix: Vec<Vec<u128>>,
}

impl Compositions {
    fn new(dim: usize, degree: usize, lo: usize, signed: bool, sign: i32) -> Self {
        let top = dim * degree;
        let mut prefix: Vec<Vec<u128>> = Vec::with_capacity(dim + 1);
        let base: Vec<u128> = vec![1; top + 1];
        prefix.push(base);
        let mut c = Compositions {
            lo,
            degree,
            signed,
            sign,
            prefix,
        };
        for j in 1..=dim {
            let mut row = Vec::with_capacity(top + 1);
            let mut acc: u128 = 0;
            for x in 0..=top {
                acc += c.first_weight(j, x, degree);
                row.push(acc);
            }
            c.prefix.push(row);
        }
        c
    }

    fn range_sum(&self, j: usize, a: i64, b: i64) -> u128 {
        let row = &self.prefix[j];
        if b < 0 || a > b || a >= row.len() as i64 {
            return 0;
        }
        let b = (b as usize).min(row.len() - 1);
        let upto = row[b];
        if a <= 0 {
            upto
        } else {
            upto - row[a as usize - 1]
        }
    }

    fn count(&self, j: usize, x: usize) -> u128 {
        if j == 0 {
            return u128::from(x == 0);
        }
        self.range_sum(j, x as i64, x as i64)
    }

    /// Number of `j`-vectors of total `x` whose first magnitude is in `[lo, a_max]`.
    fn first_weight(&self, j: usize, x: usize, a_max: usize) -> u128 {
        let a_max = a_max.min(self.degree).min(x);
        if a_max < self.lo {
            return 0;
        }
        let (x, lo, hi) = (x as i64, self.lo as i64, a_max as i64);
        if j == 1 {
            // One component: its magnitude is the whole total.
            if x < lo || x > hi {
                return 0;
            }
            return if self.signed && x > 0 { 2 } else { 1 };
        }
        if self.signed {
            let zero = if lo == 0 { self.count(j - 1, x as usize) } else { 0 };
            zero + 2 * self.range_sum(j - 1, x - hi, x - lo.max(1))
        } else {
            self.range_sum(j - 1, x - hi, x - lo)
        }
    }

    fn total(&self, dim: usize, x: usize) -> u128 {
        if x >= self.prefix[0].len() {
            return 0;
        }
        self.count(dim, x)
    }

    fn sample(&self, dim: usize, nu: usize, rng: &mut impl Rng) -> MultiIndex {
        let mut rest = nu;
        let mut comps = Vec::with_capacity(dim);
        for j in (1..=dim).rev() {
            let total = self.first_weight(j, rest, self.degree);
            let u = rng.random_range(0..total);
            let (mut a, mut b) = (self.lo, self.degree.min(rest));
            while a < b {
                let mid = (a + b) / 2;
                if self.first_weight(j, rest, mid) > u {
                    b = mid;
                } else {
                    a = mid + 1;
                }
            }
            let sign = if self.signed {
                if a > 0 && rng.random::<bool>() { -1 } else { 1 }
            } else {
                self.sign
            };
            comps.push(sign * a as i32);
            rest -= a;
        }
        MultiIndex::new(comps)
    }

    fn enumerate(&self, dim: usize, nu: usize, out: &mut Vec<MultiIndex>) {
        fn rec(c: &Compositions, j: usize, rest: usize, cur: &mut Vec<i32>, out: &mut Vec<MultiIndex>) {
            if j == 0 {
                if rest == 0 {
                    out.push(MultiIndex::new(cur.iter().copied()));
                }
                return;
            }
            for a in c.lo..=c.degree.min(rest) {
                if c.count(j - 1, rest - a) == 0 {
                    continue;
                }
                let signs: &[i32] = if c.signed && a > 0 { &[1, -1] } else if c.signed { &[1] } else { std::slice::from_ref(&c.sign) };
                for &s in signs {
                    cur.push(s * a as i32);
                    rec(c, j - 1, rest - a, cur, out);
                    cur.pop();
                }
            }
        }
        rec(self, dim, nu, &mut Vec::with_capacity(dim), out);
    }
}

/// The index set of one block `|k|_1 = nu` inside the box and the support.
struct BlockSet {
    dim: usize,
    parts: Vec<Compositions>,
}

impl BlockSet {
    fn new(dim: usize, degree: usize, support: Support) -> Self {
        let parts = match support {
            Support::Full => vec![Compositions::new(dim, degree, 0, true, 1)],
            Support::Y => vec![
                Compositions::new(dim, degree, 0, false, 1),
                Compositions::new(dim, degree, 1, false, -1),
            ],
        };
        BlockSet { dim, parts }
    }

    fn size(&self, nu: usize) -> u128 {
        self.parts.iter().map(|c| c.total(self.dim, nu)).sum()
    }

    fn sample(&self, nu: usize, rng: &mut impl Rng) -> MultiIndex {
        let sizes: Vec<u128> = self.parts.iter().map(|c| c.total(self.dim, nu)).collect();
        let mut u = rng.random_range(0..sizes.iter().sum::<u128>());
        for (c, &n) in self.parts.iter().zip(&sizes) {
            if u < n {
                return c.sample(self.dim, nu, rng);
            }
            u -= n;
        }
        unreachable!("u is below the total size")
    }

    fn all(&self, nu: usize) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        for c in &self.parts {
            c.enumerate(self.dim, nu, &mut out);
        }
        out
    }
}

fn random_phase(rng: &mut impl Rng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))
}

/// Representative of the pair `{k, -k}` (the lexicographically larger one).
fn canonical(k: MultiIndex) -> MultiIndex {
    let n = k.neg();
    if n > k {
        n
    } else {
        k
    }
}

fn check_support(dim: usize, real: bool, support: Support) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if real && support == Support::Y && dim > 1 {
        return Err(invalid("a real function cannot be Y-supported in dimension > 1"));
    }
    Ok(())
}

/// Deterministic (under `spec.seed`) function with block energies
/// `(nu+1)^(-2s)` and random phases.
pub fn generate_test_function(spec: &DecaySpec) -> Result<SpectralFunction> {
    if !(spec.s.is_finite() && spec.s > 0.0) {
        return Err(invalid(format!("decay exponent s must be positive, got {}", spec.s)));
    }
    check_support(spec.dim, spec.real, spec.support)?;
    if spec.per_block == Some(0) {
        return Err(invalid("per_block must be at least 1"));
    }
    let nu_top = spec.dim * spec.degree;
    let (lo, hi) = spec.blocks.unwrap_or((0, nu_top));
    let hi = hi.min(nu_top);
    let set = BlockSet::new(spec.dim, spec.degree, spec.support);
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut terms = Vec::new();
    for nu in lo..=hi {
        let c = (nu as f64 + 1.0).powf(-spec.s);
        if c == 0.0 {
            continue;
        }
        if nu == 0 {
            let phase = if spec.real { Complex64::new(1.0, 0.0) } else { random_phase(&mut rng) };
            terms.push((MultiIndex::zero(spec.dim), phase * c));
            continue;
        }
        let size = set.size(nu);
        if spec.real {
            let pairs = (size / 2) as usize;
            let q = spec.per_block.map_or(pairs, |q| q.min(pairs));
            let reps = choose(&set, nu, q, pairs, true, &mut rng);
            let a = c / (2.0 * q as f64).sqrt();
            for k in reps {
                let z = random_phase(&mut rng) * a;
                terms.push((k.neg(), z.conj()));
                terms.push((k, z));
            }
        } else {
            let q = spec.per_block.map_or(size as usize, |q| (q as u128).min(size) as usize);
            let picked = choose(&set, nu, q, size as usize, false, &mut rng);
            let a = c / (q as f64).sqrt();
            for k in picked {
                terms.push((k, random_phase(&mut rng) * a));
            }
        }
    }
    SpectralFunction::new(spec.dim, spec.degree, spec.real, terms)
}

/// `q` distinct indices (or pair representatives) from block `nu`, in a
/// deterministic order.
fn choose(
    set: &BlockSet,
    nu: usize,
    q: usize,
    available: usize,
    pairs: bool,
    rng: &mut ChaCha8Rng,
) -> Vec<MultiIndex> {
    let key = |k: MultiIndex| if pairs { canonical(k) } else { k };
    if 2 * q >= available {
        let mut all: Vec<MultiIndex> = set.all(nu).into_iter().map(key).collect();
        all.sort();
        all.dedup();
        if q >= all.len() {
            return all;
        }
        let mut picked: Vec<MultiIndex> = rand::seq::index::sample(rng, all.len(), q)
            .into_iter()
            .map(|i| all[i].clone())
            .collect();
        picked.sort();
        return picked;
    }
    let mut seen = HashSet::with_capacity(q);
    let mut picked = Vec::with_capacity(q);
    while picked.len() < q {
        let k = key(set.sample(nu, rng));
        if seen.insert(k.clone()) {
            picked.push(k);
        }
    }
    picked
}

/// Standard-normal coefficients on every index of the box (restricted to the
/// support). Real functions are made Hermitian by mirroring.
pub fn random_function(dim: usize, degree: usize, real: bool, support: Support, seed: u64) -> Result<SpectralFunction> {
    check_support(dim, real, support)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || -> f64 { rng.sample(StandardNormal) };
    let mut terms = Vec::new();
    for k in box_indices(dim, degree) {
        if support == Support::Y && !k.in_y() {
            continue;
        }
        let neg = k.neg();
        if real {
            match k.cmp(&neg) {
                std::cmp::Ordering::Less => continue,
                std::cmp::Ordering::Equal => terms.push((k, Complex64::new(gauss(), 0.0))),
                std::cmp::Ordering::Greater => {
                    let z = Complex64::new(gauss(), gauss());
                    terms.push((neg, z.conj()));
                    terms.push((k, z));
                }
            }
        } else {
            terms.push((k, Complex64::new(gauss(), gauss())));
        }
    }
    SpectralFunction::new(dim, degree, real, terms)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Largest `|log y - fit|`.
    pub residual: f64,
}

impl SlopeFit {
    pub fn predict(&self, x: f64) -> f64 {
        (self.intercept + self.slope * x.ln()).exp()
    }
}

/// Ordinary least squares of `log y` on `log x`.
pub fn slope_fit(xs: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if xs.len() != ys.len() {
        return Err(invalid("slope fit needs equally many x and y values"));
    }
    if xs.len() < 3 {
        return Err(Error::TooFewPoints(xs.len()));
    }
    if let Some(&v) = xs.iter().chain(ys).find(|&&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::NonPositive(v));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        return Err(invalid("slope fit needs at least two distinct x values"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - intercept - slope * x).abs())
        .fold(0.0, f64::max);
    Ok(SlopeFit {
        slope,
        intercept,
        residual,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SweepOptions {
    pub j0: u32,
    pub j1: u32,
    /// Grid oversampling for `p != 2` norms.
    pub oversample: usize,
    /// Block where an underlying infinite series was cut off. When set,
    /// points whose error is dominated by the top quarter of the blocks are
    /// flagged as truncation-limited.
    pub truncated_at: Option<usize>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            j0: 2,
            j1: 12,
            oversample: 4,
            truncated_at: None,
        }
    }
}

impl SweepOptions {
    pub fn rhos(&self) -> Result<Vec<(u32, f64)>> {
        if self.j0 < 1 || self.j1 <= self.j0 {
            return Err(invalid(format!("need 1 <= j0 < j1, got j0={} j1={}", self.j0, self.j1)));
        }
        if self.j1 > 52 {
            return Err(invalid("j1 above 52 leaves no resolution in rho"));
        }
        Ok((self.j0..=self.j1).map(|j| (j, 1.0 - 2f64.powi(-(j as i32)))).collect())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RatePoint {
    pub j: u32,
    pub rho: f64,
    pub error: f64,
    pub fitted: f64,
    /// `log(error) - log(fitted)`; zero when no fit exists.
    pub residual: f64,
    pub truncation_limited: bool,
    pub noise_floor: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RateReport {
    pub r: usize,
    pub p: LpExponent,
    pub points: Vec<RatePoint>,
    /// `None` when every error is exactly zero.
    pub fit: Option<SlopeFit>,
    pub fit_points: usize,
    pub exact_reproduction: bool,
    pub truncation_limited: bool,
    pub noise_limited: bool,
}

impl RateReport {
    pub fn slope(&self) -> Option<f64> {
        self.fit.map(|f| f.slope)
    }
}

/// `||f - A_{rho,r} f||_p` on `rho = 1 - 2^-j`, with a log-log fit against
/// `1 - rho`.
pub fn rate_sweep(f: &SpectralFunction, r: usize, p: LpExponent, opts: &SweepOptions) -> Result<RateReport> {
    if r == 0 {
        return Err(invalid("order r must be positive"));
    }
    let grid = opts.rhos()?;
    let energies = f.block_energies();
    let f_norm = f.norm(p, opts.oversample)?;
    let mut points = Vec::with_capacity(grid.len());
    for (j, rho) in grid {
        let tails: Vec<f64> = (0..energies.len()).map(|nu| lambda_tail(nu, r, rho)).collect();
        let sq: Vec<f64> = tails.iter().zip(&energies).map(|(t, e)| t * t * e).collect();
        let total: f64 = sq.iter().sum();
        let error = if p.is_two() {
            total.sqrt()
        } else {
            f.map_blocks(true, |nu| Complex64::new(tails[nu], 0.0)).norm(p, opts.oversample)?
        };
        let truncation_limited = match opts.truncated_at {
            Some(cut) if total > 0.0 => {
                let from = 3 * cut / 4 + 1;
                let high: f64 = sq.iter().skip(from).sum();
                high > 0.01 * total
            }
            _ => false,
        };
        points.push(RatePoint {
            j,
            rho,
            error,
            fitted: 0.0,
            residual: 0.0,
            truncation_limited,
            noise_floor: error > 0.0 && error < 1e-13 * f_norm,
        });
    }

    let exact_reproduction = points.iter().all(|pt| pt.error == 0.0);
    let clean: Vec<&RatePoint> = points
        .iter()
        .filter(|pt| pt.error > 0.0 && !pt.truncation_limited && !pt.noise_floor)
        .collect();
    let used: Vec<&RatePoint> = if clean.len() >= 3 {
        clean
    } else {
        points.iter().filter(|pt| pt.error > 0.0).collect()
    };
    let fit_points = used.len();
    let fit = if exact_reproduction {
        None
    } else {
        let xs: Vec<f64> = used.iter().map(|pt| 1.0 - pt.rho).collect();
        let ys: Vec<f64> = used.iter().map(|pt| pt.error).collect();
        Some(slope_fit(&xs, &ys)?)
    };
    if let Some(fit) = fit {
        for pt in &mut points {
            pt.fitted = fit.predict(1.0 - pt.rho);
            pt.residual = if pt.error > 0.0 { (pt.error / pt.fitted).ln() } else { 0.0 };
        }
    }
    Ok(RateReport {
        r,
        p,
        truncation_limited: points.iter().any(|pt| pt.truncation_limited),
        noise_limited: points.iter().any(|pt| pt.noise_floor),
        points,
        fit,
        fit_points,
        exact_reproduction,
    })
}

/// `(r, n, alpha, p)` of a rate experiment with majorant `omega(t) = t^alpha`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TheoremParams {
    pub r: usize,
    pub n: usize,
    pub alpha: f64,
    pub p: LpExponent,
}

impl TheoremParams {
    pub fn new(r: usize, n: usize, alpha: f64, p: LpExponent) -> Result<Self> {
        if n == 0 || n > r {
            return Err(invalid(format!("need 1 <= n <= r, got n={n} r={r}")));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(invalid(format!("alpha must be positive, got {alpha}")));
        }
        Ok(TheoremParams { r, n, alpha, p })
    }

    /// `r - n + alpha`: the predicted order of `||f - A_{rho,r} f||_p`.
    pub fn target_rate(&self) -> f64 {
        (self.r - self.n) as f64 + self.alpha
    }

    /// Decay exponent making `K_n(delta, f^[r-n])_2` behave like `delta^alpha`.
    pub fn decay_exponent(&self) -> f64 {
        self.target_rate() + 0.5
    }
}

/// Half-width of the accepted slope window.
pub const SLOPE_WINDOW: f64 = 0.15;

#[derive(Clone, Debug, Serialize)]
pub struct DirectReport {
    pub params: TheoremParams,
    pub spec: DecaySpec,
    /// Fit of `K_n(delta, f^[r-n])_p` against `delta`; should be close to alpha.
    pub hypothesis: SlopeFit,
    pub hypothesis_values: Vec<(f64, f64)>,
    pub rate: RateReport,
    pub target: f64,
    pub meets_rate: bool,
    pub within_window: bool,
}

fn build_function(spec: &DecaySpec, params: &TheoremParams) -> Result<(DecaySpec, SpectralFunction)> {
    let mut spec = spec.clone();
    spec.s = params.decay_exponent();
    let f = generate_test_function(&spec)?;
    Ok((spec, f))
}

fn check_direct(params: &TheoremParams) -> Result<()> {
    if params.alpha >= params.n as f64 {
        return Err(invalid(format!(
            "need alpha < n for an admissible majorant, got alpha={} n={}",
            params.alpha, params.n
        )));
    }
    Ok(())
}

/// Builds `f` with `s = r - n + alpha + 1/2`, confirms the smoothness
/// hypothesis on `g = f^[r-n]` by a K-functional sweep, and measures the
/// approximation rate of `A_{rho,r}`.
pub fn direct_theorem_experiment(
    spec: &DecaySpec,
    params: TheoremParams,
    opts: &SweepOptions,
) -> Result<DirectReport> {
    check_direct(&params)?;
    let (spec, f) = build_function(spec, &params)?;
    let g = radial_derivative(&f, params.r - params.n);
    let mut hypothesis_values = Vec::new();
    for (_, rho) in opts.rhos()? {
        let delta = 1.0 - rho;
        let k = k_functional(&g, delta, params.n, params.p, opts.oversample)?;
        hypothesis_values.push((delta, k.upper));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = hypothesis_values.iter().copied().unzip();
    let hypothesis = slope_fit(&xs, &ys)?;

    let mut sweep = *opts;
    sweep.truncated_at = Some(f.nu_max());
    let rate = rate_sweep(&f, params.r, params.p, &sweep)?;
    let target = params.target_rate();
    let slope = rate.slope().unwrap_or(f64::INFINITY);
    Ok(DirectReport {
        params,
        spec,
        hypothesis,
        hypothesis_values,
        target,
        meets_rate: slope >= target - SLOPE_WINDOW,
        within_window: (slope - target).abs() <= SLOPE_WINDOW,
        rate,
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct InversePoint {
    pub j: u32,
    pub rho: f64,
    /// `(1-rho)^n M_p(rho, f, r) / omega(1-rho)`.
    pub m_ratio: f64,
    /// `K_n(1-rho, f^[r-n])_p / omega(1-rho)`.
    pub k_ratio: f64,
}

/// Largest band ratio (max/min over the sweep) still reported as bounded.
pub const BAND_LIMIT: f64 = 10.0;

#[derive(Clone, Debug, Serialize)]
pub struct InverseReport {
    pub params: TheoremParams,
    pub zbs: ZbsReport,
    /// Set when the majorant fails a ZBS condition; no ratios are computed.
    pub refused: bool,
    pub points: Vec<InversePoint>,
    pub m_band: f64,
    pub k_band: f64,
    pub bounded: bool,
}

fn band(values: impl Iterator<Item = f64>) -> f64 {
    let (lo, hi) = values.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
    if lo > 0.0 {
        hi / lo
    } else {
        f64::INFINITY
    }
}

/// Checks that `M_p` and the K-functional of `f^[r-n]` stay within a
/// bounded multiple of `omega(1-rho)` on the same sweep as the direct
/// experiment. Refuses (without error) when `t^alpha` fails (Z) or (Z_n).
pub fn inverse_theorem_experiment(
    spec: &DecaySpec,
    params: TheoremParams,
    opts: &SweepOptions,
) -> Result<InverseReport> {
    let omega = Modulus::power(params.alpha);
    let zbs = zbs_check(&omega, params.n, &default_deltas())?;
    if !zbs.both_hold() {
        return Ok(InverseReport {
            params,
            zbs,
            refused: true,
            points: Vec::new(),
            m_band: f64::NAN,
            k_band: f64::NAN,
            bounded: false,
        });
    }
    let (_, f) = build_function(spec, &params)?;
    let g = radial_derivative(&f, params.r - params.n);
    let mut points = Vec::new();
    for (j, rho) in opts.rhos()? {
        let delta = 1.0 - rho;
        let w = omega.eval(delta);
        let m = m_p(&f, rho, params.r, params.p, opts.oversample)?.value;
        let k = k_functional(&g, delta, params.n, params.p, opts.oversample)?.upper;
        points.push(InversePoint {
            j,
            rho,
            m_ratio: delta.powi(params.n as i32) * m / w,
            k_ratio: k / w,
        });
    }
    let m_band = band(points.iter().map(|pt| pt.m_ratio));
    let k_band = band(points.iter().map(|pt| pt.k_ratio));
    Ok(InverseReport {
        params,
        zbs,
        refused: false,
        bounded: m_band < BAND_LIMIT && k_band < BAND_LIMIT,
        points,
        m_band,
        k_band,
    })
}
