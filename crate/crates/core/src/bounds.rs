//! Decay envelopes for `|phi_lambda|` and empirical ratio sweeps.
//!
//! Every envelope is taken with constant 1; the sweep's overall supremum is
//! the empirical constant for the chosen space and point.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{enumerate_weights, GrassmannianSpace, PointSummary, SphericalWeight, TorusPoint};
use crate::spherical::{SphericalError, SphericalEvaluator};

/// Minimum number of nonzero shells for a slope fit.
pub const MIN_SLOPE_SHELLS: usize = 8;

/// Slope at or below which a sweep counts as bounded.
pub const BOUNDED_SLOPE: f64 = 0.05;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoundsError {
    #[error("kind/space mismatch: {kind} {reason}")]
    KindMismatch { kind: BoundKind, reason: &'static str },
    #[error("insufficient data: {found} nonzero shells, need {MIN_SLOPE_SHELLS}")]
    InsufficientData { found: usize },
    #[error(transparent)]
    Eval(#[from] SphericalError),
    #[error("csv output failed: {0}")]
    Csv(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// `prod_{j<q} (n_j+1)^{-1}`, any non-normalizer point, `p > q`.
    GeneralPqStrict,
    /// `prod_{j<q} (n_j+1)^{-1/2}`, any non-normalizer point, `p = q`.
    GeneralPqEqual,
    /// `prod_j (n_j+1)^{-p+j-1/2}` at regular points.
    Regular,
    /// `prod_{j<q} (n_j+r)^{-p+q-1/2} (n_q+1)^{-p+q}` when all `cos 2t_k`
    /// coincide away from `+-1`.
    FlatInterior,
    /// `prod_j (n_j+r)^{-p+q}` at `cos 2t_k = -1`, `p > q`.
    MinusOne,
    /// Earlier regular-point bound `prod_j (n_j+1)^{-p+q/2}`.
    PriorRegular,
}

impl BoundKind {
    pub const ALL: [BoundKind; 6] = [
        BoundKind::GeneralPqStrict,
        BoundKind::GeneralPqEqual,
        BoundKind::Regular,
        BoundKind::FlatInterior,
        BoundKind::MinusOne,
        BoundKind::PriorRegular,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            BoundKind::GeneralPqStrict => "general_pq_strict",
            BoundKind::GeneralPqEqual => "general_pq_equal",
            BoundKind::Regular => "regular",
            BoundKind::FlatInterior => "flat_interior",
            BoundKind::MinusOne => "minus_one",
            BoundKind::PriorRegular => "prior_regular",
        }
    }

    /// The sharpest kind that applies to `point`, if any.
    pub fn for_point(space: &GrassmannianSpace, point: &TorusPoint) -> Option<BoundKind> {
        if point.is_regular() {
            Some(BoundKind::Regular)
        } else if point.in_normalizer() {
            None
        } else if point.all_minus_one() && space.p() > space.q() {
            Some(BoundKind::MinusOne)
        } else if point.is_flat_interior() {
            Some(BoundKind::FlatInterior)
        } else if space.p() > space.q() {
            Some(BoundKind::GeneralPqStrict)
        } else {
            Some(BoundKind::GeneralPqEqual)
        }
    }

    fn check_space(&self, space: &GrassmannianSpace) -> Result<(), BoundsError> {
        let strict = space.p() > space.q();
        let reason = match self {
            BoundKind::GeneralPqStrict | BoundKind::MinusOne if !strict => "requires p > q",
            BoundKind::GeneralPqEqual if strict => "requires p = q",
            _ => return Ok(()),
        };
        Err(BoundsError::KindMismatch { kind: *self, reason })
    }

    fn check_point(&self, point: &TorusPoint) -> Result<(), BoundsError> {
        let reason = match self {
            BoundKind::Regular | BoundKind::PriorRegular if !point.is_regular() => "requires a regular point",
            BoundKind::FlatInterior if !point.is_flat_interior() => {
                "requires all cos 2t_k equal and different from +-1"
            }
            BoundKind::MinusOne if !point.all_minus_one() => "requires cos 2t_k = -1 for all k",
            BoundKind::GeneralPqStrict | BoundKind::GeneralPqEqual if point.in_normalizer() => {
                "requires a point outside the normalizer"
            }
            _ => return Ok(()),
        };
        Err(BoundsError::KindMismatch { kind: *self, reason })
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        BoundKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown bound kind {s:?}"))
    }
}

/// Envelope value with constant 1.
pub fn envelope(kind: BoundKind, space: &GrassmannianSpace, w: &SphericalWeight) -> Result<f64, BoundsError> {
    kind.check_space(space)?;
    let p = space.p() as f64;
    let q = space.q() as f64;
    let r = space.r() as f64;
    let n: Vec<f64> = w.n().iter().map(|&v| v as f64).collect();
    let head = &n[..n.len() - 1];
    let value = match kind {
        BoundKind::GeneralPqStrict => head.iter().map(|v| (v + 1.0).recip()).product(),
        BoundKind::GeneralPqEqual => head.iter().map(|v| (v + 1.0).powf(-0.5)).product(),
        BoundKind::Regular => n
            .iter()
            .enumerate()
            .map(|(i, v)| (v + 1.0).powf(-p + (i + 1) as f64 - 0.5))
            .product(),
        BoundKind::FlatInterior => {
            let last = n[n.len() - 1];
            head.iter().map(|v| (v + r).powf(-p + q - 0.5)).product::<f64>() * (last + 1.0).powf(-p + q)
        }
        BoundKind::MinusOne => n.iter().map(|v| (v + r).powf(-p + q)).product(),
        BoundKind::PriorRegular => n.iter().map(|v| (v + 1.0).powf(-p + q / 2.0)).product(),
    };
    Ok(value)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioSweepReport {
    pub kind: BoundKind,
    pub p: u32,
    pub q: u32,
    pub point: PointSummary,
    pub n_max: u32,
    /// Entry `i` is the largest ratio over weights with `n_1 = i + 1`.
    pub max_ratio_per_shell: Vec<f64>,
    pub overall_sup: f64,
    /// `None` when fewer than [`MIN_SLOPE_SHELLS`] shells are nonzero.
    pub log_log_slope: Option<f64>,
    pub max_abs_phi: f64,
    pub weights_evaluated: usize,
}

impl RatioSweepReport {
    pub fn is_bounded(&self) -> bool {
        self.log_log_slope.is_some_and(|s| s <= BOUNDED_SLOPE)
    }

    /// CSV with columns `shell,max_ratio`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), BoundsError> {
        let mut wtr = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let err = |e: csv::Error| BoundsError::Csv(e.to_string());
        wtr.write_record(["shell", "max_ratio"]).map_err(err)?;
        for (i, v) in self.max_ratio_per_shell.iter().enumerate() {
            wtr.write_record([(i + 1).to_string(), format!("{v:.16e}")]).map_err(err)?;
        }
        wtr.flush().map_err(|e| BoundsError::Csv(e.to_string()))
    }
}

/// Evaluates `|phi_lambda(point)| / envelope` for every weight with
/// `n_1 <= n_max` and reduces to shell maxima.
pub fn ratio_sweep(
    evaluator: &SphericalEvaluator,
    kind: BoundKind,
    point: &TorusPoint,
    n_max: u32,
) -> Result<RatioSweepReport, BoundsError> {
    let space = evaluator.space();
    kind.check_space(space)?;
    kind.check_point(point)?;
    let weights: Vec<SphericalWeight> = enumerate_weights(space, n_max).collect();
    let values = weights
        .par_iter()
        .map(|w| {
            let phi = evaluator.eval_auto(w, point)?.value.abs();
            Ok((w.shell(), phi, phi / envelope(kind, space, w)?))
        })
        .collect::<Result<Vec<_>, BoundsError>>()?;

    let mut shells = vec![0.0f64; n_max as usize];
    let mut max_abs_phi = 0.0f64;
    for &(shell, phi, ratio) in &values {
        max_abs_phi = max_abs_phi.max(phi);
        if shell >= 1 {
            let slot = &mut shells[shell as usize - 1];
            *slot = slot.max(ratio);
        }
    }
    let overall_sup = values.iter().map(|v| v.2).fold(0.0, f64::max);
    let log_log_slope = match slope_estimate(&shells) {
        Ok(s) => Some(s),
        Err(BoundsError::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(RatioSweepReport {
        kind,
        p: space.p(),
        q: space.q(),
        point: point.summary(),
        n_max,
        max_ratio_per_shell: shells,
        overall_sup,
        log_log_slope,
        max_abs_phi,
        weights_evaluated: values.len(),
    })
}

/// Least-squares slope of `ln max` against `ln shell`, where entry `i`
/// belongs to shell `i + 1`. Zero shells are skipped.
pub fn slope_estimate(shell_maxima: &[f64]) -> Result<f64, BoundsError> {
    let pts: Vec<(f64, f64)> = shell_maxima
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0 && v.is_finite())
        .map(|(i, v)| (((i + 1) as f64).ln(), v.ln()))
        .collect();
    least_squares_slope(&pts).ok_or(BoundsError::InsufficientData { found: pts.len() })
}

pub(crate) fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < MIN_SLOPE_SHELLS {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Some(sxy / sxx)
}
