//! Moduli of continuity `omega` on `[0, 1]` and numerical checks of the
//! Zygmund-Bari-Stechkin conditions
//!
//! ```text
//! (Z)    int_0^delta omega(t)/t dt             = O(omega(delta))
//! (Z_n)  int_delta^1 omega(t)/t^(n+1) dt       = O(omega(delta)/delta^n)
//! ```

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::quadrature::adaptive;

const QUAD_TOL: f64 = 1e-12;

#[derive(Clone)]
enum Kind {
    Power { alpha: f64 },
    PowerLog { alpha: f64, beta: f64 },
    /// Points sorted by `t`; linear interpolation, clamped outside the range.
    Table(Vec<(f64, f64)>),
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

#[derive(Clone)]
pub struct Modulus {
    kind: Kind,
    label: String,
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Modulus").field("label", &self.label).finish()
    }
}

impl Modulus {
    /// `omega(t) = t^alpha`.
    pub fn power(alpha: f64) -> Self {
        Modulus {
            kind: Kind::Power { alpha },
            label: format!("power:{alpha}"),
        }
    }

    /// `omega(t) = t^alpha ln^beta(e/t)`, with `omega(0)` taken as the limit.
    pub fn power_log(alpha: f64, beta: f64) -> Self {
        Modulus {
            kind: Kind::PowerLog { alpha, beta },
            label: format!("power-log:{alpha},{beta}"),
        }
    }

    /// Piecewise-linear interpolation through `(t, omega)` pairs.
    pub fn table(mut points: Vec<(f64, f64)>) -> Result<Self> {
        if points.is_empty() {
            return Err(invalid("tabulated modulus needs at least one point"));
        }
        if points.iter().any(|&(t, w)| !t.is_finite() || !w.is_finite() || !(0.0..=1.0).contains(&t)) {
            return Err(invalid("tabulated modulus needs finite points with t in [0,1]"));
        }
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        if points.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(invalid("tabulated modulus has repeated t values"));
        }
        let label = format!(
            "custom:{}",
            points.iter().map(|(t, w)| format!("{t}:{w}")).collect::<Vec<_>>().join(",")
        );
        Ok(Modulus {
            kind: Kind::Table(points),
            label,
        })
    }

    pub fn custom(label: impl Into<String>, omega: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Modulus {
            kind: Kind::Custom(Arc::new(omega)),
            label: label.into(),
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.kind {
            Kind::Power { alpha } => {
                if t == 0.0 {
                    if *alpha > 0.0 {
                        0.0
                    } else if *alpha == 0.0 {
                        1.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    t.powf(*alpha)
                }
            }
            Kind::PowerLog { alpha, beta } => {
                if t == 0.0 {
                    return match (alpha.partial_cmp(&0.0), beta.partial_cmp(&0.0)) {
                        (Some(std::cmp::Ordering::Greater), _) => 0.0,
                        (Some(std::cmp::Ordering::Equal), Some(std::cmp::Ordering::Less)) => 0.0,
                        (Some(std::cmp::Ordering::Equal), Some(std::cmp::Ordering::Equal)) => 1.0,
                        _ => f64::INFINITY,
                    };
                }
                t.powf(*alpha) * (1.0 - t.ln()).powf(*beta)
            }
            Kind::Table(points) => {
                let i = points.partition_point(|&(x, _)| x <= t);
                if i == 0 {
                    points[0].1
                } else if i == points.len() {
                    points[i - 1].1
                } else {
                    let (t0, w0) = points[i - 1];
                    let (t1, w1) = points[i];
                    w0 + (w1 - w0) * (t - t0) / (t1 - t0)
                }
            }
            Kind::Custom(g) => g(t),
        }
    }

    /// Sampled checks of the standing assumptions on a majorant: continuity,
    /// monotonicity, positivity on `(0,1]` and `omega(0+) = 0`.
    pub fn check_conditions(&self) -> ConditionReport {
        let mut grid: Vec<f64> = (0..=12).map(|k| 10f64.powi(-12 + k)).collect();
        grid.extend((1..=4096).map(|i| i as f64 / 4096.0));
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let values: Vec<f64> = grid.iter().map(|&t| self.eval(t)).collect();
        let scale = values.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let mut failures = Vec::new();

        let finite = values.iter().all(|v| v.is_finite());
        if !finite {
            failures.push("non-finite value on (0,1]".to_string());
        }

        let positive = values.iter().all(|&v| v > 0.0);
        if !positive {
            failures.push("omega(t) <= 0 somewhere on (0,1]".to_string());
        }

        let slack = 1e-14 * scale.max(1e-300);
        let monotone = match grid.windows(2).zip(values.windows(2)).find(|(_, v)| v[1] < v[0] - slack) {
            Some((t, _)) => {
                failures.push(format!("decreases between t={} and t={}", t[0], t[1]));
                false
            }
            None => true,
        };

        let continuous = finite && self.sampled_continuity();
        if !continuous {
            failures.push("jump does not shrink under grid refinement".to_string());
        }

        let at_zero = self.eval(0.0);
        let vanishes_at_zero = at_zero.is_finite() && at_zero.abs() <= 1e-12 * scale.max(1.0);
        if !vanishes_at_zero {
            failures.push(format!("omega(0) = {at_zero}"));
        }

        ConditionReport {
            continuous,
            monotone,
            positive,
            vanishes_at_zero,
            failures,
        }
    }

    fn sampled_continuity(&self) -> bool {
        const T0: f64 = 1e-4;
        let max_jump = |n: usize| {
            let mut prev = self.eval(T0);
            let mut worst = 0.0f64;
            for i in 1..=n {
                let v = self.eval(T0 + (1.0 - T0) * i as f64 / n as f64);
                worst = worst.max((v - prev).abs());
                prev = v;
            }
            worst
        };
        let coarse = max_jump(1024);
        let fine = max_jump(16 * 1024);
        fine <= 0.9 * coarse || fine <= 1e-9
    }
}

impl FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse {
            what: "modulus",
            input: s.to_string(),
        };
        let (name, args) = s.split_once(':').ok_or_else(bad)?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|_| bad());
        match name.trim() {
            "power" => Ok(Modulus::power(num(args)?)),
            "power-log" => {
                let (a, b) = args.split_once(',').ok_or_else(bad)?;
                Ok(Modulus::power_log(num(a)?, num(b)?))
            }
            "custom" => {
                let points = args
                    .split(',')
                    .map(|pair| {
                        let (t, w) = pair.split_once(':').ok_or_else(bad)?;
                        Ok((num(t)?, num(w)?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Modulus::table(points)
            }
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub continuous: bool,
    pub monotone: bool,
    pub positive: bool,
    pub vanishes_at_zero: bool,
    pub failures: Vec<String>,
}

impl ConditionReport {
    pub fn all_hold(&self) -> bool {
        self.continuous && self.monotone && self.positive && self.vanishes_at_zero
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Skipped because the modulus failed the standing conditions.
    NotChecked,
}

/// Ratio sequence `I(delta) / bound(delta)` over the delta grid.
#[derive(Clone, Debug, Serialize)]
pub struct ZbsSeries {
    pub ratios: Vec<f64>,
    pub sup: f64,
    pub integrals_converge: bool,
    pub bounded: bool,
    pub verdict: Verdict,
}

impl ZbsSeries {
    fn skipped() -> Self {
        ZbsSeries {
            ratios: Vec::new(),
            sup: f64::NAN,
            integrals_converge: false,
            bounded: false,
            verdict: Verdict::NotChecked,
        }
    }

    fn from_ratios(ratios: Vec<f64>, integrals_converge: bool) -> Self {
        let sup = ratios.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        let bounded = integrals_converge && sup.is_finite() && settles(&ratios);
        ZbsSeries {
            ratios,
            sup,
            integrals_converge,
            bounded,
            verdict: if bounded { Verdict::Holds } else { Verdict::Fails },
        }
    }
}

/// A sequence sampled on a geometric delta grid is taken as bounded when its
/// increments decay (last at most half the first) or are all negligible.
fn settles(ratios: &[f64]) -> bool {
    let steps: Vec<f64> = ratios.windows(2).map(|w| w[1] - w[0]).collect();
    let last_value = ratios.last().copied().unwrap_or(0.0).abs().max(1e-300);
    if steps.iter().all(|s| s.abs() <= 1e-3 * last_value) {
        return true;
    }
    let first = steps.first().copied().unwrap_or(0.0).abs();
    let last = steps.last().copied().unwrap_or(0.0).abs();
    last <= 0.5 * first
}

#[derive(Clone, Debug, Serialize)]
pub struct ZbsReport {
    pub label: String,
    pub n: usize,
    pub deltas: Vec<f64>,
    pub conditions: ConditionReport,
    pub z: ZbsSeries,
    pub zn: ZbsSeries,
}

impl ZbsReport {
    pub fn both_hold(&self) -> bool {
        self.z.verdict == Verdict::Holds && self.zn.verdict == Verdict::Holds
    }
}

/// `10^-1, ..., 10^-6`.
pub fn default_deltas() -> Vec<f64> {
    (1..=6).map(|k| 10f64.powi(-k)).collect()
}

/// `(1/omega(delta)) int_0^delta omega(t)/t dt` via `t = delta e^-u`, plus
/// whether the `u`-integral has settled by the end of its range.
fn z_ratio(w: &Modulus, delta: f64) -> (f64, bool) {
    let upper = 600f64.min(690.0 + delta.ln());
    let g = |u: f64| w.eval(delta * (-u).exp());
    let head = adaptive(g, 0.0, 0.5 * upper, QUAD_TOL);
    let tail = adaptive(g, 0.5 * upper, upper, QUAD_TOL);
    let total = head + tail;
    let converged = tail.abs() <= 1e-3 * total.abs();
    (total / w.eval(delta), converged)
}

/// `(delta^n/omega(delta)) int_delta^1 omega(t)/t^(n+1) dt` via `t = e^v`.
fn zn_ratio(w: &Modulus, n: usize, delta: f64) -> f64 {
    let nn = n as f64;
    let integral = adaptive(|v| w.eval(v.exp()) * (-nn * v).exp(), delta.ln(), 0.0, QUAD_TOL);
    integral * delta.powi(n as i32) / w.eval(delta)
}

/// Check (Z) and (Z_n) for `w` on a strictly decreasing grid of at least
/// three deltas in `(0, 1)`. The standing conditions are checked first; when
/// they fail, both series are reported as [`Verdict::NotChecked`].
pub fn zbs_check(w: &Modulus, n: usize, deltas: &[f64]) -> Result<ZbsReport> {
    if n == 0 {
        return Err(invalid("ZBS order n must be positive"));
    }
    if deltas.len() < 3 {
        return Err(Error::TooFewPoints(deltas.len()));
    }
    if deltas.iter().any(|&d| !(d > 0.0 && d < 1.0)) || deltas.windows(2).any(|p| p[1] >= p[0]) {
        return Err(invalid("deltas must be strictly decreasing in (0,1)"));
    }
    let conditions = w.check_conditions();
    let (z, zn) = if conditions.all_hold() {
        let (z_ratios, conv): (Vec<f64>, Vec<bool>) = deltas.iter().map(|&d| z_ratio(w, d)).unzip();
        let zn_ratios = deltas.iter().map(|&d| zn_ratio(w, n, d)).collect();
        (
            ZbsSeries::from_ratios(z_ratios, conv.iter().all(|&c| c)),
            ZbsSeries::from_ratios(zn_ratios, true),
        )
    } else {
        (ZbsSeries::skipped(), ZbsSeries::skipped())
    };
    Ok(ZbsReport {
        label: w.label().to_string(),
        n,
        deltas: deltas.to_vec(),
        conditions,
        z,
        zn,
    })
}
