//! Self-check suites run by `grassmannian check`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::jacobi::{jacobi_derivative, jacobi_eval, value_at_one, JacobiParams};
use crate::scalar::{ratio_to_string, Scalar};
use crate::space::{classify_point, enumerate_weights, identity_point, pi_multiple, Angle, GrassmannianSpace};
use crate::spherical::{calibrate_constants, default_calibration_weights, SphericalError, SphericalEvaluator};

/// Spaces with `2 <= q <= p <= 4`.
pub const CHECK_SPACES: [(u32, u32); 6] = [(2, 2), (3, 2), (3, 3), (4, 2), (4, 3), (4, 4)];

pub const SEED: u64 = 0x5eed_2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Normalization,
    Boundedness,
    Oracle,
    Calibration,
    Jacobi,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Normalization, Suite::Boundedness, Suite::Oracle, Suite::Calibration, Suite::Jacobi];

    pub fn as_str(&self) -> &'static str {
        match self {
            Suite::Normalization => "normalization",
            Suite::Boundedness => "boundedness",
            Suite::Oracle => "oracle",
            Suite::Calibration => "calibration",
            Suite::Jacobi => "jacobi",
            Suite::All => "all",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown suite {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub passed: bool,
    pub cases: usize,
    /// Largest observed deviation in the suite's own measure.
    pub worst: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
    pub notes: Vec<String>,
}

impl SuiteResult {
    fn new(suite: Suite, tolerance: f64) -> Self {
        Self { suite, passed: true, cases: 0, worst: 0.0, tolerance, failures: Vec::new(), notes: Vec::new() }
    }

    fn record(&mut self, deviation: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        if deviation.is_nan() || deviation > self.tolerance {
            self.passed = false;
            if self.failures.len() < 20 {
                self.failures.push(format!("{} (deviation {deviation:e})", label()));
            }
        }
        if deviation.is_nan() {
            self.worst = f64::NAN;
        } else {
            self.worst = self.worst.max(deviation);
        }
    }

    fn fail(&mut self, msg: String) {
        self.cases += 1;
        self.passed = false;
        self.failures.push(msg);
    }
}

fn evaluator(p: u32, q: u32) -> Result<SphericalEvaluator, SphericalError> {
    SphericalEvaluator::new(GrassmannianSpace::new(p, q)?)
}

/// Relative error; absolute when the reference is exactly zero.
fn rel_err(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        (a - b).abs() / b.abs()
    }
}

pub fn run_suite(suite: Suite, n_max: u32) -> Result<Vec<SuiteResult>, SphericalError> {
    Ok(match suite {
        Suite::Normalization => vec![normalization(n_max, 8)?],
        Suite::Boundedness => vec![boundedness(n_max, 100, SEED)?],
        Suite::Oracle => vec![oracle_agreement(n_max, 25, SEED)?],
        Suite::Calibration => vec![calibration()?],
        Suite::Jacobi => vec![jacobi_ground_truth()?],
        Suite::All => {
            let mut out = Vec::new();
            for s in Suite::EACH {
                out.extend(run_suite(s, n_max)?);
            }
            out
        }
    })
}

/// `phi_lambda(identity) = 1`: confluent path to `1e-8` for `n_1 <= n_max`,
/// exactly for `n_1 <= exact_max`.
pub fn normalization(n_max: u32, exact_max: u32) -> Result<SuiteResult, SphericalError> {
    let mut res = SuiteResult::new(Suite::Normalization, 1e-8);
    let one = BigRational::one();
    for (p, q) in CHECK_SPACES {
        let e = evaluator(p, q)?;
        let id = identity_point(e.space());
        let nodes = vec![one.clone(); q as usize];
        for w in enumerate_weights(e.space(), n_max) {
            let v = e.eval_confluent(&w, &id)?.value;
            res.record((v - 1.0).abs(), || format!("({p},{q}) {w}: {v}"));
            if w.shell() <= exact_max {
                let exact = e.oracle_exact_nodes(&w, &nodes)?;
                if exact != one {
                    res.fail(format!("({p},{q}) {w}: oracle {}", ratio_to_string(&exact)));
                }
            }
        }
    }
    Ok(res)
}

/// Random torus point, half exact multiples of `pi`, half floats.
pub fn random_point_angles(rng: &mut ChaCha8Rng, q: usize, exact: bool) -> Vec<Angle> {
    (0..q)
        .map(|_| {
            if exact {
                let den = rng.gen_range(2..=12i64);
                pi_multiple(rng.gen_range(-den..=den), den)
            } else {
                Angle::Radians(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
            }
        })
        .collect()
}

/// `max |phi_lambda| <= 1 + 1e-8` over random points and `n_1 <= n_max`.
pub fn boundedness(n_max: u32, points: usize, seed: u64) -> Result<SuiteResult, SphericalError> {
    let mut res = SuiteResult::new(Suite::Boundedness, 1e-8);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, q) in CHECK_SPACES {
        let e = evaluator(p, q)?;
        let weights: Vec<_> = enumerate_weights(e.space(), n_max).collect();
        let mut worst = 0.0f64;
        for i in 0..points {
            let angles = random_point_angles(&mut rng, q as usize, i % 2 == 0);
            let pt = classify_point(e.space(), &angles)?;
            for w in &weights {
                let v = e.eval_auto(w, &pt)?.value.abs();
                worst = worst.max(v);
                res.record((v - 1.0).max(0.0), || format!("({p},{q}) {w} at {}: {v}", pt.label()));
            }
        }
        res.notes.push(format!("({p},{q}) max |phi| = {worst:.15}"));
    }
    Ok(res)
}

fn random_node(rng: &mut ChaCha8Rng) -> BigRational {
    let den = rng.gen_range(3..=40i64);
    BigRational::new(BigInt::from(rng.gen_range(-den + 1..den)), BigInt::from(den))
}

/// Distinct rational nodes at least `min_gap` apart.
pub fn random_distinct_nodes(rng: &mut ChaCha8Rng, count: usize, min_gap: f64) -> Vec<BigRational> {
    loop {
        let nodes: Vec<BigRational> = (0..count).map(|_| random_node(rng)).collect();
        let ok = (0..count).all(|i| (i + 1..count).all(|j| (nodes[i].to_f64() - nodes[j].to_f64()).abs() >= min_gap));
        if ok {
            return nodes;
        }
    }
}

/// Float paths against the exact oracle on rational nodes, `q <= 3`.
pub fn oracle_agreement(n_max: u32, configs: usize, seed: u64) -> Result<SuiteResult, SphericalError> {
    let mut res = SuiteResult::new(Suite::Oracle, 1e-9);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for (p, q) in CHECK_SPACES.into_iter().filter(|s| s.1 <= 3) {
        let e = evaluator(p, q)?;
        let weights: Vec<_> = enumerate_weights(e.space(), n_max).collect();
        for _ in 0..configs {
            let nodes = random_distinct_nodes(&mut rng, q as usize, 0.05);
            let floats: Vec<f64> = nodes.iter().map(|x| x.to_f64()).collect();
            for w in &weights {
                let exact = e.oracle_exact_nodes(w, &nodes)?.to_f64();
                let v = e.eval_generic_nodes(w, &floats)?.value;
                res.record(rel_err(v, exact), || format!("generic ({p},{q}) {w} at {floats:?}: {v} vs {exact}"));
            }
            // repeated-node configuration: first node doubled
            let mut rep = nodes.clone();
            rep[1] = rep[0].clone();
            let blocks = block_list(&rep);
            for w in &weights {
                let exact = e.oracle_exact_nodes(w, &rep)?.to_f64();
                let v = e.eval_confluent_blocks(w, &blocks)?.value;
                res.record(rel_err(v, exact), || format!("confluent ({p},{q}) {w} at {blocks:?}: {v} vs {exact}"));
            }
        }
    }
    Ok(res)
}

/// Groups equal rational nodes into `(node, multiplicity)` blocks.
pub fn block_list(nodes: &[BigRational]) -> Vec<(f64, usize)> {
    let mut out: Vec<(BigRational, usize)> = Vec::new();
    for x in nodes {
        match out.iter_mut().find(|b| b.0 == *x) {
            Some(b) => b.1 += 1,
            None => out.push((x.clone(), 1)),
        }
    }
    out.into_iter().map(|(x, n)| (x.to_f64(), n)).collect()
}

/// Calibration consistency for `q = 2, 3, 4` and the constant comparisons.
pub fn calibration() -> Result<SuiteResult, SphericalError> {
    let mut res = SuiteResult::new(Suite::Calibration, 0.0);
    for (p, q) in CHECK_SPACES {
        let space = GrassmannianSpace::new(p, q)?;
        let samples = default_calibration_weights(&space);
        if samples.len() < 5 {
            res.fail(format!("({p},{q}) only {} samples", samples.len()));
        }
        match calibrate_constants(&space, &samples) {
            Ok(rec) => {
                res.cases += 1;
                if q == 2 && rec.raw_derivative_constant.abs() != BigRational::one() {
                    res.fail(format!("({p},{q}) constant {}", ratio_to_string(&rec.raw_derivative_constant)));
                }
                res.notes.push(format!("({p},{q}) {}", rec.resolution));
            }
            Err(err) => res.fail(format!("({p},{q}) {err}")),
        }
    }
    Ok(res)
}

/// Endpoint identities (exact) and the derivative identity against
/// Richardson-extrapolated central differences.
pub fn jacobi_ground_truth() -> Result<SuiteResult, SphericalError> {
    let mut res = SuiteResult::new(Suite::Jacobi, 1e-6);
    let one = BigRational::one();
    for a in 0..=5u32 {
        for b in 0..=5u32 {
            for n in 0..=20u32 {
                let params = JacobiParams::new(a, b, n);
                let at_one = jacobi_eval(params, &one)?;
                let at_minus = jacobi_eval(params, &-one.clone())?;
                let mut expect_minus = value_at_one::<BigRational>(b, n);
                if n % 2 == 1 {
                    expect_minus = -expect_minus;
                }
                res.cases += 1;
                if at_one != value_at_one::<BigRational>(a, n) || at_minus != expect_minus {
                    res.fail(format!("endpoint identity a={a} b={b} n={n}"));
                }
            }
        }
    }
    for a in 0..=3u32 {
        for b in 0..=3u32 {
            for n in 1..=12u32 {
                for &x in &[-0.7, -0.2, 0.3, 0.85] {
                    let params = JacobiParams::new(a, b, n);
                    let f = |x: f64| jacobi_eval(params, &x).unwrap();
                    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
                    let fd = (4.0 * d(5e-4) - d(1e-3)) / 3.0;
                    let exact = jacobi_derivative(params, 1, &x)?;
                    let scale = exact.abs().max(1e-3);
                    res.record((fd - exact).abs() / scale, || format!("derivative a={a} b={b} n={n} x={x}"));
                }
            }
        }
    }
    Ok(res)
}
