//! Truncated spectral series `sum_lambda d_lambda (1 + kappa_lambda)^s |phi_lambda(a)|^{2k}`
//! for the convolution powers `mu_a^k`, with tail-exponent verdicts.
//!
//! `d_lambda` is the degree surrogate from [`crate::space::degree_surrogate`],
//! which has the same polynomial growth as the true degree.

use std::fmt;
use std::io::Write;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bounds::least_squares_slope;
use crate::scalar::{ratio_to_string, serde_ratio, Scalar};
use crate::space::{casimir, degree_surrogate, shell_weights, GrassmannianSpace, PointSummary, TorusPoint};
use crate::spherical::{SphericalError, SphericalEvaluator};

/// Half-width of the inconclusive band around tail exponent `-1`.
pub const VERDICT_MARGIN: f64 = 0.15;

pub const DEGREE_NOTE: &str = "d_lambda is the degree surrogate (same polynomial growth as the true degree)";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SeriesError {
    #[error(transparent)]
    Eval(#[from] SphericalError),
    #[error("k must be at least 1")]
    InvalidK,
    #[error("s must be a nonnegative rational, got {0}")]
    InvalidS(String),
    #[error("inconclusive at boundary: verdict for k = {k} is inconclusive")]
    InconclusiveAtBoundary { k: u32 },
    #[error("csv output failed: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Converging => "converging",
            Verdict::Diverging => "diverging",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

impl Verdict {
    pub fn from_tail_exponent(exponent: Option<f64>) -> Verdict {
        match exponent {
            Some(e) if e < -1.0 - VERDICT_MARGIN => Verdict::Converging,
            Some(e) if e >= -1.0 + VERDICT_MARGIN => Verdict::Diverging,
            _ => Verdict::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub p: u32,
    pub q: u32,
    pub point: PointSummary,
    pub k: u32,
    #[serde(with = "serde_ratio")]
    pub s: BigRational,
    pub n_max: u32,
    /// Indexed by shell `n_1 = 0..=n_max`.
    pub shell_sums: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub tail_exponent: Option<f64>,
    pub verdict: Verdict,
    /// Set when the point lies in the normalizer; nothing is summed then.
    pub normalizer_point: bool,
    pub degree_note: String,
}

impl SeriesReport {
    /// CSV with columns `shell,shell_sum,partial_sum`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), SeriesError> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let err = |e: csv::Error| SeriesError::Csv(e.to_string());
        wtr.write_record(["shell", "shell_sum", "partial_sum"]).map_err(err)?;
        for (n, (a, b)) in self.shell_sums.iter().zip(&self.partial_sums).enumerate() {
            wtr.write_record([n.to_string(), format!("{a:.16e}"), format!("{b:.16e}")]).map_err(err)?;
        }
        wtr.flush().map_err(|e| SeriesError::Csv(e.to_string()))
    }
}

/// Per-weight factors `d (1+kappa)^s` and `|phi|`, grouped by shell.
#[derive(Debug, Clone)]
pub struct SeriesSamples {
    p: u32,
    q: u32,
    point: PointSummary,
    s: BigRational,
    n_max: u32,
    normalizer: bool,
    shells: Vec<Vec<(f64, f64)>>,
}

fn validate_s(s: &BigRational) -> Result<(), SeriesError> {
    if s.is_negative() {
        return Err(SeriesError::InvalidS(ratio_to_string(s)));
    }
    Ok(())
}

impl SeriesSamples {
    /// Evaluates every weight with `n_1 <= n_max` once. Weights are evaluated
    /// in parallel and regrouped in enumeration order.
    pub fn collect(
        evaluator: &SphericalEvaluator,
        point: &TorusPoint,
        s: &BigRational,
        n_max: u32,
    ) -> Result<Self, SeriesError> {
        validate_s(s)?;
        let space = evaluator.space();
        let normalizer = point.in_normalizer();
        let mut shells = vec![Vec::new(); n_max as usize + 1];
        if !normalizer {
            let s_f = s.to_f64();
            let weights: Vec<_> = (0..=n_max).flat_map(|n1| shell_weights(space, n1)).collect();
            let values = weights
                .par_iter()
                .map(|w| {
                    let phi = evaluator.eval_auto(w, point)?.value.abs();
                    let d = degree_surrogate(space, w).to_f64();
                    let factor = if s_f == 0.0 {
                        d
                    } else {
                        d * (1.0 + casimir(space, w).to_f64()).powf(s_f)
                    };
                    Ok((w.shell(), factor, phi))
                })
                .collect::<Result<Vec<_>, SphericalError>>()?;
            for (shell, factor, phi) in values {
                shells[shell as usize].push((factor, phi));
            }
        }
        Ok(Self {
            p: space.p(),
            q: space.q(),
            point: point.summary(),
            s: s.clone(),
            n_max,
            normalizer,
            shells,
        })
    }

    pub fn report(&self, k: u32) -> Result<SeriesReport, SeriesError> {
        if k == 0 {
            return Err(SeriesError::InvalidK);
        }
        let (shell_sums, partial_sums, tail_exponent, verdict) = if self.normalizer {
            (Vec::new(), Vec::new(), None, Verdict::Diverging)
        } else {
            let shell_sums: Vec<f64> = self
                .shells
                .iter()
                .map(|terms| terms.iter().fold(0.0, |acc, (d, phi)| acc + d * f64::powi(*phi, 2 * k as i32)))
                .collect();
            let mut acc = 0.0;
            let partial_sums = shell_sums
                .iter()
                .map(|v| {
                    acc += v;
                    acc
                })
                .collect();
            let tail = tail_exponent(&shell_sums);
            (shell_sums, partial_sums, tail, Verdict::from_tail_exponent(tail))
        };
        Ok(SeriesReport {
            p: self.p,
            q: self.q,
            point: self.point.clone(),
            k,
            s: self.s.clone(),
            n_max: self.n_max,
            shell_sums,
            partial_sums,
            tail_exponent,
            verdict,
            normalizer_point: self.normalizer,
            degree_note: DEGREE_NOTE.to_string(),
        })
    }
}

/// Log-log slope of the shell sums over the last half of the shells.
pub fn tail_exponent(shell_sums: &[f64]) -> Option<f64> {
    let n_max = shell_sums.len().saturating_sub(1);
    let start = n_max.div_ceil(2);
    let pts: Vec<(f64, f64)> = shell_sums
        .iter()
        .enumerate()
        .skip(start.max(1))
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(n, v)| ((n as f64).ln(), v.ln()))
        .collect();
    least_squares_slope(&pts)
}

pub fn series_sweep(
    evaluator: &SphericalEvaluator,
    point: &TorusPoint,
    k: u32,
    s: &BigRational,
    n_max: u32,
) -> Result<SeriesReport, SeriesError> {
    if k == 0 {
        return Err(SeriesError::InvalidK);
    }
    SeriesSamples::collect(evaluator, point, s, n_max)?.report(k)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KStep {
    pub k: u32,
    pub verdict: Verdict,
    pub tail_exponent: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMinReport {
    /// `None` means no convergent power up to `k_cap`.
    pub k_min: Option<u32>,
    pub k_cap: u32,
    pub n_max: u32,
    #[serde(with = "serde_ratio")]
    pub s: BigRational,
    pub normalizer_point: bool,
    pub steps: Vec<KStep>,
}

impl fmt::Display for KMinReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.k_min {
            Some(k) => write!(f, "{k}"),
            None => write!(f, "none <= {}", self.k_cap),
        }
    }
}

/// Smallest `k <= k_cap` whose series verdict is converging.
///
/// Larger powers are dominated termwise, so the scan stops at the first
/// converging `k`. If the power just below it is inconclusive the boundary is
/// undecided and an error is returned; likewise when nothing converges but
/// some verdict is inconclusive.
pub fn k_min_search(
    evaluator: &SphericalEvaluator,
    point: &TorusPoint,
    s: &BigRational,
    k_cap: u32,
    n_max: u32,
) -> Result<KMinReport, SeriesError> {
    if k_cap == 0 {
        return Err(SeriesError::InvalidK);
    }
    let samples = SeriesSamples::collect(evaluator, point, s, n_max)?;
    let mut steps = Vec::new();
    let mut k_min = None;
    if !samples.normalizer {
        for k in 1..=k_cap {
            let rep = samples.report(k)?;
            steps.push(KStep { k, verdict: rep.verdict, tail_exponent: rep.tail_exponent });
            if rep.verdict == Verdict::Converging {
                if k > 1 && steps[k as usize - 2].verdict == Verdict::Inconclusive {
                    return Err(SeriesError::InconclusiveAtBoundary { k: k - 1 });
                }
                k_min = Some(k);
                break;
            }
        }
        if k_min.is_none() {
            if let Some(step) = steps.iter().find(|st| st.verdict == Verdict::Inconclusive) {
                return Err(SeriesError::InconclusiveAtBoundary { k: step.k });
            }
        }
    }
    Ok(KMinReport {
        k_min,
        k_cap,
        n_max,
        s: s.clone(),
        normalizer_point: samples.normalizer,
        steps,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdRecord {
    pub p: u32,
    pub q: u32,
    #[serde(with = "serde_ratio")]
    pub s: BigRational,
    /// `k > max(p, 2(p-q)+3)` for `p > q`, `k > max(2p, 6)` for `p = q`.
    pub k_main: u32,
    /// 2 for `p > q`, 3 for `p = q` (regular points).
    pub k_regular: u32,
    /// `k > (1 + binom(p+q, 2) + 2s) / (2p - q)` (earlier regular bound).
    pub k_prior: u32,
    /// `k > (p + s)/(p - 1/2)` (regular points, `H^s`).
    pub k_sobolev: u32,
    /// `k > max(s+p, 2(p-q)+3)` for `p > q`, `k > max(2s+2p, 6)` for `p = q`.
    pub k_sobolev_general: u32,
}

/// Smallest integer strictly greater than `x`.
fn above(x: &BigRational) -> u32 {
    let f = x.numer().div_floor(x.denom()) + BigInt::from(1);
    u32::try_from(f).unwrap_or(u32::MAX).max(1)
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn thresholds(space: &GrassmannianSpace, s: &BigRational) -> Result<ThresholdRecord, SeriesError> {
    validate_s(s)?;
    let p = space.p() as i64;
    let q = space.q() as i64;
    let strict = p > q;
    let general = |s: &BigRational| {
        if strict {
            (s.clone() + int(p)).max(int(2 * (p - q) + 3))
        } else {
            (int(2) * s.clone() + int(2 * p)).max(int(6))
        }
    };
    let binom = (p + q) * (p + q - 1) / 2;
    let prior = (int(1 + binom) + int(2) * s.clone()) / int(2 * p - q);
    let sobolev = (int(p) + s.clone()) / (int(p) - BigRational::new(1.into(), 2.into()));
    Ok(ThresholdRecord {
        p: space.p(),
        q: space.q(),
        s: s.clone(),
        k_main: above(&general(&BigRational::zero())),
        k_regular: if strict { 2 } else { 3 },
        k_prior: above(&prior),
        k_sobolev: above(&sobolev),
        k_sobolev_general: above(&general(s)),
    })
}
