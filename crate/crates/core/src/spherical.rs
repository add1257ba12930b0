//! Spherical functions `phi_lambda(exp iX)` from the Berezin-Karpelevich
//! determinant
//!
//! ```text
//! phi = C_{p,q} det(P~_{n_j}(x_k)) / (prod_{j<k} (x_j - x_k) * prod_{j<k} (N_j - N_k))
//! ```
//!
//! with `x_k = cos 2t_k` and `N_j = n_j (n_j + r)`. Coinciding nodes are
//! handled by the confluent limit: a block of `L` equal nodes contributes the
//! columns `P~^{(i)}(x_B) / i!`, `i < L`, the Vandermonde factors between
//! different blocks stay in the denominator, and each block carries a sign
//! fixed by [`calibrate_constants`].
//!
//! The exact oracle computes the same limit along an independent route:
//! Newton divided differences over sorted (possibly repeated) rational nodes,
//! in arbitrary-precision arithmetic.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jacobi::{normalized_jacobi, normalized_jacobi_derivative, value_at_one, JacobiError};
use crate::linalg::{determinant, leading_divided_differences};
use crate::scalar::{ratio_to_string, serde_ratio, serde_ratio_opt, RationalScalar, Scalar};
use crate::space::{
    enumerate_weights, shell_weights, Block, GrassmannianSpace, SpaceError, SphericalWeight,
    TorusPoint,
};

/// Node gap below which the generic quotient is flagged as ill-conditioned.
pub const CONDITION_GAP: f64 = 1e-6;

/// Points with a repeated block and another node closer than this are
/// evaluated exactly at the dyadic values of their float nodes.
pub const EXACT_FALLBACK_GAP: f64 = 1e-2;

/// Largest `n_1` for which the exact fallback is used.
pub const EXACT_FALLBACK_DEGREE: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SphericalError {
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Jacobi(#[from] JacobiError),
    #[error("confluent point: the generic quotient needs distinct cos 2t_k")]
    ConfluentPoint,
    #[error("normalizer point: cos 2t_k = -1 for all k with p = q lies in the normalizer")]
    NormalizerPoint,
    #[error("the closed form needs cos 2t_k = -1 for every k")]
    NotMinusOnePoint,
    #[error("irrational node: cos 2t_{0} is not rational and no node override was given")]
    IrrationalNode(usize),
    #[error("non-finite node")]
    NonFiniteNode,
    #[error("inconsistent calibration: {0}")]
    InconsistentCalibration(String),
    #[error("rank mismatch: space has rank {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
}

/// Which evaluation route to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvalMode {
    Auto,
    Generic,
    Confluent,
    Oracle,
}

impl FromStr for EvalMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(EvalMode::Auto),
            "generic" => Ok(EvalMode::Generic),
            "confluent" => Ok(EvalMode::Confluent),
            "oracle" => Ok(EvalMode::Oracle),
            _ => Err(format!("unknown mode {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalPath {
    Generic,
    Confluent,
    MinusOneClosedForm,
    Oracle,
}

impl fmt::Display for EvalPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EvalPath::Generic => "generic",
            EvalPath::Confluent => "confluent",
            EvalPath::MinusOneClosedForm => "minus_one_closed_form",
            EvalPath::Oracle => "oracle",
        };
        f.write_str(s)
    }
}

pub struct EvalRequest<'a> {
    pub weight: &'a SphericalWeight,
    pub point: &'a TorusPoint,
    pub mode: EvalMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub value: f64,
    pub path: EvalPath,
    /// Reciprocal of the smallest node gap the quotient divided by; infinite
    /// when a confluent limit was taken, zero for exact evaluation.
    #[serde(with = "crate::scalar::serde_f64_ext")]
    pub condition_estimate: f64,
    pub condition_warning: bool,
    /// Generic-path value computed alongside a near-confluent fallback.
    pub generic_cross_check: Option<f64>,
}

/// `C_{p,q} = 2^{q(q-1)/2} prod_{j=1}^{q-1} j! (j+p-q)^{q-j}`.
pub fn c_pq(space: &GrassmannianSpace) -> BigRational {
    let q = space.q() as i64;
    let gap = space.pq_gap() as i64;
    let mut acc = BigInt::one() << ((q * (q - 1) / 2) as usize);
    for j in 1..q {
        acc *= factorial(j as u32);
        acc *= BigInt::from(j + gap).pow((q - j) as u32);
    }
    BigRational::from_integer(acc)
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

fn sign_pow(exp: u64) -> i32 {
    if exp.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

fn check_rank(space: &GrassmannianSpace, len: usize) -> Result<(), SphericalError> {
    let q = space.q() as usize;
    if len != q {
        return Err(SphericalError::RankMismatch { expected: q, got: len });
    }
    Ok(())
}

/// `det(P~_{n_j}(x_k)) / prod_{j<k} (x_j - x_k)` for distinct nodes.
pub fn generic_quotient<S: Scalar>(pq_gap: u32, n: &[u32], nodes: &[S]) -> Result<S, SphericalError> {
    let rows = n
        .iter()
        .map(|&nj| nodes.iter().map(|x| normalized_jacobi(pq_gap, nj, x)).collect())
        .collect::<Result<Vec<Vec<S>>, _>>()?;
    let mut vandermonde = S::one();
    for j in 0..nodes.len() {
        for k in j + 1..nodes.len() {
            vandermonde = vandermonde * (nodes[j].clone() - nodes[k].clone());
        }
    }
    Ok(determinant(rows) / vandermonde)
}

/// Confluent quotient with Taylor columns `P~^{(i)}(x_B)/i!` per block.
///
/// Excludes the per-block signs; blocks are `(node, size)` in column order.
pub fn blockwise_quotient<S: Scalar>(
    pq_gap: u32,
    n: &[u32],
    blocks: &[(S, usize)],
) -> Result<S, SphericalError> {
    let mut rows = Vec::with_capacity(n.len());
    for &nj in n {
        let mut row = Vec::with_capacity(n.len());
        for (x, size) in blocks {
            let mut fact = S::one();
            for i in 0..*size as u32 {
                if i > 0 {
                    fact = fact * S::from_i64(i as i64);
                }
                row.push(normalized_jacobi_derivative(pq_gap, nj, i, x)? / fact.clone());
            }
        }
        rows.push(row);
    }
    let mut cross = S::one();
    for (a, (xa, la)) in blocks.iter().enumerate() {
        for (xb, lb) in &blocks[a + 1..] {
            cross = cross * (xa.clone() - xb.clone()).powi((la * lb) as u32);
        }
    }
    Ok(determinant(rows) / cross)
}

/// `(-1)^{q(q-1)/2} det(f_j[x_1..x_k])` over nodes sorted so repeats are
/// adjacent; equals `det(f_j(x_k)) / prod_{j<k}(x_j - x_k)` and its limits.
pub fn divided_difference_quotient(
    pq_gap: u32,
    n: &[u32],
    nodes: &[BigRational],
) -> Result<BigRational, SphericalError> {
    let mut sorted = nodes.to_vec();
    sorted.sort();
    let mut rows = Vec::with_capacity(n.len());
    for &nj in n {
        let row = leading_divided_differences(&sorted, |x: &BigRational, m: u32| {
            let d = normalized_jacobi_derivative::<BigRational>(pq_gap, nj, m, x)?;
            Ok::<_, SphericalError>(d / BigRational::from_integer(factorial(m)))
        })?;
        rows.push(row);
    }
    let q = n.len() as u64;
    let det = determinant(rows);
    Ok(if sign_pow(q * (q - 1) / 2) < 0 { -det } else { det })
}

/// Constants fixed by requiring `phi_lambda(identity) = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationRecord {
    pub p: u32,
    pub q: u32,
    pub sample_count: usize,
    #[serde(with = "serde_ratio")]
    pub c_pq: BigRational,
    /// `K` with `phi = C_{p,q} K det(P~^{(k-1)}_{n_j}(x)) / prod (N_j - N_k)`
    /// on a single block of size `q` (raw derivative columns).
    #[serde(with = "serde_ratio")]
    pub raw_derivative_constant: BigRational,
    /// `(-1)^{q(q-1)/2}/(q-1)!`.
    #[serde(with = "serde_ratio")]
    pub factorial_candidate: BigRational,
    /// `(-1)^{q(q-1)/2}/prod_{k=1}^{q-1} k!`.
    #[serde(with = "serde_ratio")]
    pub classical_candidate: BigRational,
    pub matches_factorial_candidate: bool,
    pub matches_classical_candidate: bool,
    /// Whether `C_{p,q} K` (a constant absorbing `C_{p,q}`) equals the factorial candidate.
    pub factorial_candidate_absorbs_c_pq: bool,
    /// Sign for a block of `L` equal nodes with Taylor columns, index `L-1`.
    pub block_signs: Vec<i32>,
    /// `kappa` in `phi = kappa (-1)^{sum n_j} / prod binom(n_j+p-q, n_j)` at
    /// `cos 2t_k = -1` (only for `p > q`).
    #[serde(with = "serde_ratio_opt")]
    pub minus_one_constant: Option<BigRational>,
    pub resolution: String,
}

impl CalibrationRecord {
    pub fn block_sign(&self, size: usize) -> i32 {
        self.block_signs[size - 1]
    }
}

/// Calibration samples: the first weights by increasing shell.
pub fn default_calibration_weights(space: &GrassmannianSpace) -> Vec<SphericalWeight> {
    let q = space.q();
    let mut out = Vec::new();
    for n1 in q - 1..q + 6 {
        for w in shell_weights(space, n1).into_iter().rev() {
            if out.len() < 8 {
                out.push(w);
            }
        }
    }
    out
}

fn identity_constants(
    space: &GrassmannianSpace,
    samples: &[SphericalWeight],
) -> Result<(BigRational, i32), SphericalError> {
    if samples.is_empty() {
        return Err(SphericalError::InconsistentCalibration("no sample weights".into()));
    }
    let gap = space.pq_gap();
    let q = space.q() as usize;
    let c = c_pq(space);
    let one = BigRational::one();
    let mut raw_constant: Option<BigRational> = None;
    let mut sign: Option<i32> = None;
    for w in samples {
        check_rank(space, w.q())?;
        let spacing = BigRational::from_integer(space.spacing_product(w));
        let raw_rows = w
            .n()
            .iter()
            .map(|&nj| (0..q as u32).map(|k| normalized_jacobi_derivative(gap, nj, k, &one)).collect())
            .collect::<Result<Vec<Vec<BigRational>>, _>>()?;
        let raw = determinant(raw_rows);
        let taylor = blockwise_quotient(gap, w.n(), &[(one.clone(), q)])?;
        if raw.is_zero() || taylor.is_zero() {
            return Err(SphericalError::InconsistentCalibration(format!(
                "vanishing confluent determinant at the identity for {w}"
            )));
        }
        let k = spacing.clone() / (c.clone() * raw);
        let s = spacing / (c.clone() * taylor);
        let s = if s == one {
            1
        } else if s == -one.clone() {
            -1
        } else {
            return Err(SphericalError::InconsistentCalibration(format!(
                "Taylor-column constant {} is not a sign for {w}",
                ratio_to_string(&s)
            )));
        };
        match &raw_constant {
            Some(prev) if *prev != k => {
                return Err(SphericalError::InconsistentCalibration(format!(
                    "samples imply constants {} and {}",
                    ratio_to_string(prev),
                    ratio_to_string(&k)
                )))
            }
            _ => raw_constant = Some(k),
        }
        if sign.is_some_and(|prev| prev != s) {
            return Err(SphericalError::InconsistentCalibration("block sign differs between samples".into()));
        }
        sign = Some(s);
    }
    Ok((raw_constant.unwrap(), sign.unwrap()))
}

/// Calibrates the confluent constants of `space` on `sample_weights`.
///
/// Block signs for sizes `2 <= L < q` come from the rank-`L` space with the
/// same `p - q`, whose normalized Jacobi polynomials are identical.
pub fn calibrate_constants(
    space: &GrassmannianSpace,
    sample_weights: &[SphericalWeight],
) -> Result<CalibrationRecord, SphericalError> {
    let q = space.q();
    let gap = space.pq_gap();
    let (raw_constant, full_sign) = identity_constants(space, sample_weights)?;

    let mut block_signs = vec![1];
    for size in 2..q {
        let sub = GrassmannianSpace::new(gap + size, size)?;
        let (_, s) = identity_constants(&sub, &default_calibration_weights(&sub))?;
        block_signs.push(s);
    }
    block_signs.push(full_sign);

    let sign = BigRational::from_integer(BigInt::from(sign_pow(q as u64 * (q as u64 - 1) / 2)));
    let factorial_form = sign.clone() / BigRational::from_integer(factorial(q - 1));
    let classical_den = (1..q).fold(BigInt::one(), |acc, k| acc * factorial(k));
    let classical = sign / BigRational::from_integer(classical_den);
    let c = c_pq(space);

    let minus_one_constant = if space.p() > q {
        let minus = -BigRational::one();
        let anchor = SphericalWeight::zero(q);
        let mut kappa: Option<BigRational> = None;
        for w in std::iter::once(&anchor).chain(sample_weights) {
            let phi = c.clone()
                * BigRational::from_integer(BigInt::from(full_sign))
                * blockwise_quotient(gap, w.n(), &[(minus.clone(), q as usize)])?
                / BigRational::from_integer(space.spacing_product(w));
            let mut k = phi;
            for &nj in w.n() {
                k *= value_at_one::<BigRational>(gap, nj);
            }
            if w.n_sum() % 2 == 1 {
                k = -k;
            }
            if let Some(prev) = &kappa {
                if *prev != k {
                    return Err(SphericalError::InconsistentCalibration(format!(
                        "closed-form constant {} at {w} differs from {}",
                        ratio_to_string(&k),
                        ratio_to_string(prev)
                    )));
                }
            }
            kappa = Some(k);
        }
        kappa
    } else {
        None
    };

    let matches_factorial = raw_constant == factorial_form;
    let matches_classical = raw_constant == classical;
    let resolution = format!(
        "calibrated constant {} on {} samples; (q-1)! form {} ({}); classical prod k! form {} ({})",
        ratio_to_string(&raw_constant),
        sample_weights.len(),
        ratio_to_string(&factorial_form),
        if matches_factorial { "matches" } else { "does not match" },
        ratio_to_string(&classical),
        if matches_classical { "matches" } else { "does not match" },
    );
    Ok(CalibrationRecord {
        p: space.p(),
        q,
        sample_count: sample_weights.len(),
        factorial_candidate_absorbs_c_pq: raw_constant.clone() * c.clone() == factorial_form,
        c_pq: c,
        raw_derivative_constant: raw_constant,
        factorial_candidate: factorial_form,
        classical_candidate: classical,
        matches_factorial_candidate: matches_factorial,
        matches_classical_candidate: matches_classical,
        block_signs,
        minus_one_constant,
        resolution,
    })
}

/// Evaluator bound to one space and its calibration record.
#[derive(Debug, Clone)]
pub struct SphericalEvaluator {
    space: GrassmannianSpace,
    calibration: CalibrationRecord,
    c_pq: f64,
}

impl SphericalEvaluator {
    pub fn new(space: GrassmannianSpace) -> Result<Self, SphericalError> {
        let calibration = calibrate_constants(&space, &default_calibration_weights(&space))?;
        Ok(Self::with_calibration(space, calibration))
    }

    pub fn with_calibration(space: GrassmannianSpace, calibration: CalibrationRecord) -> Self {
        let c_pq = calibration.c_pq.to_f64();
        Self { space, calibration, c_pq }
    }

    pub fn space(&self) -> &GrassmannianSpace {
        &self.space
    }

    pub fn calibration(&self) -> &CalibrationRecord {
        &self.calibration
    }

    fn check(&self, w: &SphericalWeight, point: &TorusPoint) -> Result<(), SphericalError> {
        check_rank(&self.space, w.q())?;
        check_rank(&self.space, point.angles().len())
    }

    fn spacing_f64(&self, w: &SphericalWeight) -> f64 {
        BigRational::from_integer(self.space.spacing_product(w)).to_f64()
    }

    pub fn evaluate(&self, req: &EvalRequest<'_>) -> Result<EvalResult, SphericalError> {
        match req.mode {
            EvalMode::Auto => self.eval_auto(req.weight, req.point),
            EvalMode::Generic => self.eval_generic(req.weight, req.point),
            EvalMode::Confluent => self.eval_confluent(req.weight, req.point),
            EvalMode::Oracle => {
                let exact = self.oracle_exact(req.weight, req.point)?;
                Ok(EvalResult {
                    value: exact.to_f64(),
                    path: EvalPath::Oracle,
                    condition_estimate: 0.0,
                    condition_warning: false,
                    generic_cross_check: None,
                })
            }
        }
    }

    /// Generic quotient at a point whose `cos 2t_k` are pairwise distinct.
    pub fn eval_generic(&self, w: &SphericalWeight, point: &TorusPoint) -> Result<EvalResult, SphericalError> {
        self.check(w, point)?;
        if !point.all_singletons() {
            return Err(SphericalError::ConfluentPoint);
        }
        self.eval_generic_nodes(w, point.cosines())
    }

    /// Generic quotient at explicit distinct nodes `x_k`.
    pub fn eval_generic_nodes(&self, w: &SphericalWeight, nodes: &[f64]) -> Result<EvalResult, SphericalError> {
        check_rank(&self.space, nodes.len())?;
        let mut min_gap = f64::INFINITY;
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                min_gap = min_gap.min((a - b).abs());
            }
        }
        if min_gap == 0.0 {
            return Err(SphericalError::ConfluentPoint);
        }
        let quotient = generic_quotient(self.space.pq_gap(), w.n(), nodes)?;
        Ok(EvalResult {
            value: self.c_pq * quotient / self.spacing_f64(w),
            path: EvalPath::Generic,
            condition_estimate: 1.0 / min_gap,
            condition_warning: min_gap < CONDITION_GAP,
            generic_cross_check: None,
        })
    }

    /// Block-confluent evaluation; total on every point.
    pub fn eval_confluent(&self, w: &SphericalWeight, point: &TorusPoint) -> Result<EvalResult, SphericalError> {
        self.check(w, point)?;
        let blocks: Vec<(f64, usize)> = point.blocks().iter().map(|b| (b.node, b.len())).collect();
        self.eval_confluent_blocks(w, &blocks)
    }

    /// Block-confluent evaluation on explicit `(node, multiplicity)` blocks.
    pub fn eval_confluent_blocks(
        &self,
        w: &SphericalWeight,
        blocks: &[(f64, usize)],
    ) -> Result<EvalResult, SphericalError> {
        check_rank(&self.space, w.q())?;
        check_rank(&self.space, blocks.iter().map(|b| b.1).sum())?;
        let value = self.confluent_value(w, blocks)?;
        let confluent = blocks.iter().any(|b| b.1 > 1);
        let mut min_gap = f64::INFINITY;
        for (i, a) in blocks.iter().enumerate() {
            for b in &blocks[i + 1..] {
                min_gap = min_gap.min((a.0 - b.0).abs());
            }
        }
        Ok(EvalResult {
            value,
            path: EvalPath::Confluent,
            condition_estimate: if confluent { f64::INFINITY } else { 1.0 / min_gap },
            condition_warning: min_gap < CONDITION_GAP,
            generic_cross_check: None,
        })
    }

    fn confluent_value<S: Scalar>(&self, w: &SphericalWeight, blocks: &[(S, usize)]) -> Result<S, SphericalError> {
        let quotient = blockwise_quotient(self.space.pq_gap(), w.n(), blocks)?;
        let sign: i32 = blocks.iter().map(|b| self.calibration.block_sign(b.1)).product();
        let c = S::from_bigint(self.calibration.c_pq.numer());
        let spacing = S::from_bigint(&self.space.spacing_product(w));
        Ok(S::from_i64(sign as i64) * c * quotient / spacing)
    }

    /// Exact block-confluent evaluation on rational nodes.
    pub fn confluent_exact(
        &self,
        w: &SphericalWeight,
        blocks: &[(BigRational, usize)],
    ) -> Result<BigRational, SphericalError> {
        check_rank(&self.space, w.q())?;
        check_rank(&self.space, blocks.iter().map(|b| b.1).sum())?;
        self.confluent_value(w, blocks)
    }

    /// Closed form at `cos 2t_k = -1` for all `k` (requires `p > q`).
    pub fn eval_minus_one_closed_form(
        &self,
        w: &SphericalWeight,
        point: &TorusPoint,
    ) -> Result<EvalResult, SphericalError> {
        self.check(w, point)?;
        if !point.all_minus_one() {
            return Err(SphericalError::NotMinusOnePoint);
        }
        let value = self.minus_one_exact(w)?.to_f64();
        Ok(EvalResult {
            value,
            path: EvalPath::MinusOneClosedForm,
            condition_estimate: f64::INFINITY,
            condition_warning: false,
            generic_cross_check: None,
        })
    }

    /// `kappa (-1)^{sum n_j} / prod_j binom(n_j + p - q, n_j)`, exact.
    pub fn minus_one_exact(&self, w: &SphericalWeight) -> Result<BigRational, SphericalError> {
        check_rank(&self.space, w.q())?;
        let kappa = self
            .calibration
            .minus_one_constant
            .clone()
            .ok_or(SphericalError::NormalizerPoint)?;
        let mut value = kappa;
        for &nj in w.n() {
            value /= value_at_one::<BigRational>(self.space.pq_gap(), nj);
        }
        Ok(if w.n_sum() % 2 == 1 { -value } else { value })
    }

    /// Dispatches to the generic, closed-form or confluent path.
    pub fn eval_auto(&self, w: &SphericalWeight, point: &TorusPoint) -> Result<EvalResult, SphericalError> {
        self.check(w, point)?;
        if point.all_singletons() {
            if point.min_node_gap() >= CONDITION_GAP {
                return self.eval_generic(w, point);
            }
            let generic = self.eval_generic(w, point)?;
            let collapsed = collapse_near_nodes(point.blocks(), CONDITION_GAP);
            let mut result = self.eval_confluent_blocks(w, &collapsed)?;
            result.condition_warning = true;
            result.generic_cross_check = Some(generic.value);
            return Ok(result);
        }
        if point.all_minus_one() && self.space.p() > self.space.q() {
            return self.eval_minus_one_closed_form(w, point);
        }
        if point.min_node_gap() < EXACT_FALLBACK_GAP && w.n()[0] <= EXACT_FALLBACK_DEGREE {
            let blocks = point
                .blocks()
                .iter()
                .map(|b| {
                    BigRational::from_float(b.node)
                        .map(|x| (x, b.len()))
                        .ok_or(SphericalError::NonFiniteNode)
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(EvalResult {
                value: self.confluent_exact(w, &blocks)?.to_f64(),
                path: EvalPath::Oracle,
                condition_estimate: 0.0,
                condition_warning: false,
                generic_cross_check: None,
            });
        }
        self.eval_confluent(w, point)
    }

    /// Exact value at a point whose `cos 2t_k` are all rational.
    pub fn oracle_exact(&self, w: &SphericalWeight, point: &TorusPoint) -> Result<RationalScalar, SphericalError> {
        self.check(w, point)?;
        let nodes = point
            .angles()
            .iter()
            .enumerate()
            .map(|(i, a)| a.exact_cos2().ok_or(SphericalError::IrrationalNode(i)))
            .collect::<Result<Vec<_>, _>>()?;
        self.oracle_exact_nodes(w, &nodes)
    }

    /// Exact value at explicit rational nodes (repeats allowed).
    pub fn oracle_exact_nodes(
        &self,
        w: &SphericalWeight,
        nodes: &[BigRational],
    ) -> Result<RationalScalar, SphericalError> {
        check_rank(&self.space, w.q())?;
        check_rank(&self.space, nodes.len())?;
        let quotient = divided_difference_quotient(self.space.pq_gap(), w.n(), nodes)?;
        Ok(self.calibration.c_pq.clone() * quotient
            / BigRational::from_integer(self.space.spacing_product(w)))
    }

    /// `|phi_lambda|` at the identity should be one; returns the worst
    /// deviation over all weights with `n_1 <= n_max` via the confluent path.
    pub fn identity_deviation(&self, n_max: u32) -> Result<f64, SphericalError> {
        let id = crate::space::identity_point(&self.space);
        let mut worst = 0.0f64;
        for w in enumerate_weights(&self.space, n_max) {
            let v = self.eval_confluent(&w, &id)?.value;
            worst = worst.max((v - 1.0).abs());
        }
        Ok(worst)
    }
}

/// Merges sorted neighbouring nodes closer than `gap` into blocks at their mean.
pub fn collapse_near_nodes(blocks: &[Block], gap: f64) -> Vec<(f64, usize)> {
    let mut items: Vec<(f64, usize)> = blocks.iter().map(|b| (b.node, b.len())).collect();
    items.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut out: Vec<(f64, usize, f64)> = Vec::new();
    for (x, len) in items {
        match out.last_mut() {
            Some(last) if (x - last.2).abs() < gap => {
                last.0 = (last.0 * last.1 as f64 + x * len as f64) / (last.1 + len) as f64;
                last.1 += len;
                last.2 = x;
            }
            _ => out.push((x, len, x)),
        }
    }
    out.into_iter().map(|(x, len, _)| (x, len)).collect()
}

impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.17e} via {}", self.value, self.path)?;
        if self.condition_warning {
            write!(f, " (condition warning, estimate {:e})", self.condition_estimate)?;
        }
        Ok(())
    }
}
