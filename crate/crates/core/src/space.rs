//! The symmetric space `SU(p+q)/S(U(p)xU(q))`: restricted roots, spherical
//! weights, torus points and their confluence structure.
//!
//! Vectors in the `e`-basis of `R^q` are stored as integer coordinates. A
//! spherical weight `lambda = sum 2 m_j e_j` is therefore `(2 m_1, ..., 2 m_q)`
//! and `rho` is `(r + 2(q-1), ..., r + 2, r)` with `r = p - q + 1`.

use std::f64::consts::PI;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance on `cos 2t` used to group float angles.
pub const FLOAT_CONFLUENCE_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpaceError {
    #[error("invalid rank parameters: need p >= q >= 2, got p={p}, q={q}")]
    InvalidRank { p: u32, q: u32 },
    #[error("invalid weight: {0}")]
    InvalidWeight(String),
    #[error("point has {got} angles, the space has rank {expected}")]
    PointArity { expected: usize, got: usize },
    #[error("cannot parse angle {0:?}: expected num/den (multiple of pi) or a decimal with suffix f (radians)")]
    AngleParse(String),
}

/// A positive restricted root with its multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RestrictedRoot {
    pub coeffs: Vec<i64>,
    pub multiplicity: u32,
}

impl RestrictedRoot {
    pub fn pair(&self, v: &[i64]) -> i64 {
        self.coeffs.iter().zip(v).map(|(a, b)| a * b).sum()
    }
}

impl fmt::Display for RestrictedRoot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &c) in self.coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let sign = if c < 0 { "-" } else if first { "" } else { "+" };
            let mag = if c.abs() == 1 { String::new() } else { c.abs().to_string() };
            write!(f, "{sign}{mag}e{}", i + 1)?;
            first = false;
        }
        write!(f, " (x{})", self.multiplicity)
    }
}

/// Immutable descriptor of `SU(p+q)/S(U(p)xU(q))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrassmannianSpace {
    p: u32,
    q: u32,
    roots: Vec<RestrictedRoot>,
    rho: Vec<i64>,
}

impl GrassmannianSpace {
    pub fn new(p: u32, q: u32) -> Result<Self, SpaceError> {
        if q < 2 || p < q {
            return Err(SpaceError::InvalidRank { p, q });
        }
        let qu = q as usize;
        let unit = |i: usize, c: i64| {
            let mut v = vec![0i64; qu];
            v[i] = c;
            v
        };
        let mut roots = Vec::new();
        for k in 0..qu {
            roots.push(RestrictedRoot { coeffs: unit(k, 2), multiplicity: 1 });
            if p > q {
                roots.push(RestrictedRoot { coeffs: unit(k, 1), multiplicity: 2 * (p - q) });
            }
        }
        for i in 0..qu {
            for j in i + 1..qu {
                let mut minus = unit(i, 1);
                minus[j] = -1;
                let mut plus = unit(i, 1);
                plus[j] = 1;
                roots.push(RestrictedRoot { coeffs: minus, multiplicity: 2 });
                roots.push(RestrictedRoot { coeffs: plus, multiplicity: 2 });
            }
        }
        let mut twice_rho = vec![0i64; qu];
        for root in &roots {
            for (acc, c) in twice_rho.iter_mut().zip(&root.coeffs) {
                *acc += root.multiplicity as i64 * c;
            }
        }
        let rho = twice_rho.into_iter().map(|v| v / 2).collect();
        Ok(Self { p, q, roots, rho })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// `r = p - q + 1`.
    pub fn r(&self) -> u32 {
        self.p - self.q + 1
    }

    pub fn pq_gap(&self) -> u32 {
        self.p - self.q
    }

    pub fn rank(&self) -> u32 {
        self.q
    }

    pub fn dim(&self) -> u32 {
        2 * self.p * self.q
    }

    pub fn positive_roots(&self) -> &[RestrictedRoot] {
        &self.roots
    }

    /// Half the sum of positive roots (with multiplicity), `e`-basis.
    pub fn rho(&self) -> &[i64] {
        &self.rho
    }

    /// Coefficients of `rho` against `2 e_j`, i.e. `r/2 + q - j`.
    pub fn rho_2e_coefficients(&self) -> Vec<BigRational> {
        self.rho
            .iter()
            .map(|&v| BigRational::new(BigInt::from(v), BigInt::from(2)))
            .collect()
    }

    pub fn label(&self) -> String {
        format!("SU({})/S(U({})xU({}))", self.p + self.q, self.p, self.q)
    }

    pub fn weight_from_m(&self, m: &[u32]) -> Result<SphericalWeight, SpaceError> {
        self.check_len(m.len())?;
        SphericalWeight::from_m(m)
    }

    pub fn weight_from_n(&self, n: &[u32]) -> Result<SphericalWeight, SpaceError> {
        self.check_len(n.len())?;
        SphericalWeight::from_n(n)
    }

    fn check_len(&self, len: usize) -> Result<(), SpaceError> {
        if len != self.q as usize {
            return Err(SpaceError::InvalidWeight(format!(
                "expected {} entries, got {len}",
                self.q
            )));
        }
        Ok(())
    }

    /// `n_j (n_j + r)` for each row of the weight.
    pub fn spacing_values(&self, w: &SphericalWeight) -> Vec<i64> {
        let r = self.r() as i64;
        w.n.iter().map(|&n| n as i64 * (n as i64 + r)).collect()
    }

    /// `prod_{j<k} (n_j(n_j+r) - n_k(n_k+r))`, exact.
    pub fn spacing_product(&self, w: &SphericalWeight) -> BigInt {
        let vals = self.spacing_values(w);
        let mut acc = BigInt::one();
        for j in 0..vals.len() {
            for k in j + 1..vals.len() {
                acc *= BigInt::from(vals[j] - vals[k]);
            }
        }
        acc
    }
}

/// A highest spherical weight `lambda = sum_j 2 m_j e_j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SphericalWeight {
    m: Vec<u32>,
    n: Vec<u32>,
}

impl SphericalWeight {
    pub fn from_m(m: &[u32]) -> Result<Self, SpaceError> {
        if m.is_empty() {
            return Err(SpaceError::InvalidWeight("empty m-vector".into()));
        }
        if m.windows(2).any(|w| w[0] < w[1]) {
            return Err(SpaceError::InvalidWeight(format!("m must be non-increasing: {m:?}")));
        }
        let q = m.len() as u32;
        let n = m.iter().enumerate().map(|(j, &mj)| mj + q - 1 - j as u32).collect();
        Ok(Self { m: m.to_vec(), n })
    }

    pub fn from_n(n: &[u32]) -> Result<Self, SpaceError> {
        if n.is_empty() {
            return Err(SpaceError::InvalidWeight("empty n-vector".into()));
        }
        if n.windows(2).any(|w| w[0] <= w[1]) {
            return Err(SpaceError::InvalidWeight(format!("n must be strictly decreasing: {n:?}")));
        }
        let q = n.len() as u32;
        let m = n
            .iter()
            .enumerate()
            .map(|(j, &nj)| nj - (q - 1 - j as u32))
            .collect();
        Ok(Self { m, n: n.to_vec() })
    }

    pub fn zero(q: u32) -> Self {
        Self::from_m(&vec![0; q as usize]).expect("zero weight is valid")
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    pub fn n(&self) -> &[u32] {
        &self.n
    }

    pub fn q(&self) -> usize {
        self.n.len()
    }

    /// The shell index `n_1`.
    pub fn shell(&self) -> u32 {
        self.n[0]
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().all(|&v| v == 0)
    }

    /// `n_1 + ... + n_q`, the parity of endpoint values at `cos 2t = -1`.
    pub fn n_sum(&self) -> u64 {
        self.n.iter().map(|&v| v as u64).sum()
    }

    /// `lambda` in the `e`-basis.
    pub fn lambda(&self) -> Vec<i64> {
        self.m.iter().map(|&v| 2 * v as i64).collect()
    }
}

impl fmt::Display for SphericalWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[u32]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "m=({}) n=({})", join(&self.m), join(&self.n))
    }
}

/// Strictly decreasing tuples of fixed length with entries below a bound,
/// yielded in lexicographically decreasing order.
#[derive(Debug, Clone)]
pub struct DecreasingTuples {
    next: Option<Vec<u32>>,
}

impl DecreasingTuples {
    /// Tuples `(v_1 > ... > v_len >= 0)` with `v_1 < upper`.
    pub fn new(len: usize, upper: u32) -> Self {
        if len == 0 {
            return Self { next: Some(Vec::new()) };
        }
        if (upper as usize) < len {
            return Self { next: None };
        }
        let start = (0..len as u32).map(|i| upper - 1 - i).collect();
        Self { next: Some(start) }
    }

    /// Continue an enumeration from `state` (inclusive).
    pub fn resume(state: Vec<u32>) -> Self {
        Self { next: Some(state) }
    }
}

impl Iterator for DecreasingTuples {
    type Item = Vec<u32>;

    fn next(&mut self) -> Option<Vec<u32>> {
        let current = self.next.take()?;
        let len = current.len();
        // Rightmost slot that can drop by one while leaving room below it.
        let slot = (0..len).rev().find(|&i| current[i] > (len - 1 - i) as u32);
        if let Some(i) = slot {
            let mut succ = current.clone();
            succ[i] -= 1;
            for j in i + 1..len {
                succ[j] = succ[j - 1] - 1;
            }
            self.next = Some(succ);
        }
        Some(current)
    }
}

/// Every weight with `n_1 <= n_max`, lexicographically decreasing in `n`.
pub struct WeightIter {
    tuples: DecreasingTuples,
}

impl Iterator for WeightIter {
    type Item = SphericalWeight;

    fn next(&mut self) -> Option<SphericalWeight> {
        let n = self.tuples.next()?;
        Some(SphericalWeight::from_n(&n).expect("decreasing tuples are valid n-vectors"))
    }
}

pub fn enumerate_weights(space: &GrassmannianSpace, n_max: u32) -> WeightIter {
    WeightIter { tuples: DecreasingTuples::new(space.q() as usize, n_max + 1) }
}

/// Weights whose first entry is exactly `n1`, in enumeration order.
pub fn shell_weights(space: &GrassmannianSpace, n1: u32) -> Vec<SphericalWeight> {
    DecreasingTuples::new(space.q() as usize - 1, n1)
        .map(|tail| {
            let mut n = Vec::with_capacity(tail.len() + 1);
            n.push(n1);
            n.extend(tail);
            SphericalWeight::from_n(&n).expect("valid shell weight")
        })
        .collect()
}

/// `prod_alpha (<alpha, lambda+rho> / <alpha, rho>)^{m_alpha}`; equals 1 at `lambda = 0`.
pub fn degree_surrogate(space: &GrassmannianSpace, w: &SphericalWeight) -> BigRational {
    let shifted: Vec<i64> = w.lambda().iter().zip(space.rho()).map(|(l, r)| l + r).collect();
    let mut acc = BigRational::one();
    for root in space.positive_roots() {
        let ratio = BigRational::new(
            BigInt::from(root.pair(&shifted)),
            BigInt::from(root.pair(space.rho())),
        );
        for _ in 0..root.multiplicity {
            acc *= &ratio;
        }
    }
    acc
}

/// Casimir constant `<lambda + 2 rho, lambda>`.
pub fn casimir(space: &GrassmannianSpace, w: &SphericalWeight) -> BigRational {
    let lambda = w.lambda();
    let v: i64 = lambda.iter().zip(space.rho()).map(|(l, r)| (l + 2 * r) * l).sum();
    BigRational::from_integer(BigInt::from(v))
}

/// One torus coordinate `t_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// `t = c * pi` with `c` rational.
    PiMultiple(Rational64),
    Radians(f64),
}

impl Angle {
    pub fn radians(&self) -> f64 {
        match self {
            Angle::PiMultiple(c) => PI * (*c.numer() as f64 / *c.denom() as f64),
            Angle::Radians(t) => *t,
        }
    }

    /// `2t / pi` reduced to `[0, 2)`, for exact angles.
    fn double_turn(&self) -> Option<Rational64> {
        match self {
            Angle::PiMultiple(c) => Some(mod_floor(*c * 2, 2)),
            Angle::Radians(_) => None,
        }
    }

    /// `cos 2t` as an exact rational when it is one (Niven's values).
    pub fn exact_cos2(&self) -> Option<BigRational> {
        let u = self.double_turn()?;
        let (n, d) = (*u.numer(), *u.denom());
        let half = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        match (n, d) {
            (0, 1) => Some(half(1, 1)),
            (1, 1) => Some(half(-1, 1)),
            (1, 2) | (3, 2) => Some(half(0, 1)),
            (1, 3) | (5, 3) => Some(half(1, 2)),
            (2, 3) | (4, 3) => Some(half(-1, 2)),
            _ => None,
        }
    }

    pub fn cos2(&self) -> f64 {
        if let Some(c) = self.exact_cos2() {
            return c.to_f64().unwrap_or(f64::NAN);
        }
        match self.double_turn() {
            Some(u) => (PI * (*u.numer() as f64 / *u.denom() as f64)).cos(),
            None => (2.0 * self.radians()).cos(),
        }
    }

    pub fn negated(&self) -> Angle {
        match self {
            Angle::PiMultiple(c) => Angle::PiMultiple(-*c),
            Angle::Radians(t) => Angle::Radians(-t),
        }
    }

    pub fn shifted_by_pi(&self) -> Angle {
        match self {
            Angle::PiMultiple(c) => Angle::PiMultiple(*c + 1),
            Angle::Radians(t) => Angle::Radians(t + PI),
        }
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Angle::PiMultiple(c) if c.is_integer() => write!(f, "{}", c.numer()),
            Angle::PiMultiple(c) => write!(f, "{}/{}", c.numer(), c.denom()),
            Angle::Radians(t) => write!(f, "{t:?}f"),
        }
    }
}

fn mod_floor(x: Rational64, m: i64) -> Rational64 {
    let (n, d) = (*x.numer(), *x.denom());
    Rational64::new(n.mod_floor(&(m * d)), d)
}

/// Parses `"1/5,1/7"` (multiples of pi) or `"0.3f,1.1f"` (radians), mixed freely.
pub fn parse_angles(s: &str) -> Result<Vec<Angle>, SpaceError> {
    s.split(',').map(|tok| parse_angle(tok.trim())).collect()
}

fn parse_angle(tok: &str) -> Result<Angle, SpaceError> {
    let bad = || SpaceError::AngleParse(tok.to_string());
    if let Some(body) = tok.strip_suffix('f') {
        let t: f64 = body.parse().map_err(|_| bad())?;
        if !t.is_finite() {
            return Err(bad());
        }
        return Ok(Angle::Radians(t));
    }
    let ratio = match tok.split_once('/') {
        Some((n, d)) => {
            let n: i64 = n.trim().parse().map_err(|_| bad())?;
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Rational64::new(n, d)
        }
        None => Rational64::from_integer(tok.parse().map_err(|_| bad())?),
    };
    Ok(Angle::PiMultiple(ratio))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ClassifyWarning {
    /// Two float cosines were grouped although not bitwise equal.
    AmbiguousFloatConfluence { first: usize, second: usize, gap: f64 },
}

impl fmt::Display for ClassifyWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifyWarning::AmbiguousFloatConfluence { first, second, gap } => write!(
                f,
                "ambiguous float confluence: cos 2t_{} and cos 2t_{} differ by {gap:e}",
                first + 1,
                second + 1
            ),
        }
    }
}

/// A maximal group of coordinates sharing the same `cos 2t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Block {
    /// Zero-based coordinate indices, ascending.
    pub members: Vec<usize>,
    pub node: f64,
}

impl Block {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// A point `exp iX(t_1, ..., t_q)` of the torus with its confluence data.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint {
    angles: Vec<Angle>,
    cosines: Vec<f64>,
    blocks: Vec<Block>,
    is_regular: bool,
    in_normalizer: bool,
    all_minus_one: bool,
    all_plus_one: bool,
    warnings: Vec<ClassifyWarning>,
}

impl TorusPoint {
    pub fn angles(&self) -> &[Angle] {
        &self.angles
    }

    /// `cos 2t_k` per coordinate.
    pub fn cosines(&self) -> &[f64] {
        &self.cosines
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn is_regular(&self) -> bool {
        self.is_regular
    }

    pub fn in_normalizer(&self) -> bool {
        self.in_normalizer
    }

    pub fn all_minus_one(&self) -> bool {
        self.all_minus_one
    }

    pub fn all_plus_one(&self) -> bool {
        self.all_plus_one
    }

    pub fn warnings(&self) -> &[ClassifyWarning] {
        &self.warnings
    }

    pub fn all_singletons(&self) -> bool {
        self.blocks.iter().all(|b| b.len() == 1)
    }

    /// A single block whose node is not `+-1`.
    pub fn is_flat_interior(&self) -> bool {
        self.blocks.len() == 1 && self.blocks[0].len() >= 2 && self.blocks[0].node.abs() < 1.0
    }

    /// Exact `cos 2t_k` for every coordinate, when all are rational.
    pub fn exact_cosines(&self) -> Option<Vec<BigRational>> {
        self.angles.iter().map(|a| a.exact_cos2()).collect()
    }

    pub fn label(&self) -> String {
        self.angles.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",")
    }

    /// Smallest gap between distinct block nodes (infinite for one block).
    pub fn min_node_gap(&self) -> f64 {
        let mut gap = f64::INFINITY;
        for (i, a) in self.blocks.iter().enumerate() {
            for b in &self.blocks[i + 1..] {
                gap = gap.min((a.node - b.node).abs());
            }
        }
        gap
    }

    pub fn summary(&self) -> PointSummary {
        PointSummary {
            angles: self.label(),
            cosines: self.cosines.clone(),
            blocks: self.blocks.iter().map(|b| b.members.clone()).collect(),
            is_regular: self.is_regular,
            in_normalizer: self.in_normalizer,
            all_minus_one: self.all_minus_one,
            all_plus_one: self.all_plus_one,
            warnings: self.warnings.iter().map(|w| w.to_string()).collect(),
        }
    }
}

/// Serializable view of a [`TorusPoint`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSummary {
    pub angles: String,
    pub cosines: Vec<f64>,
    pub blocks: Vec<Vec<usize>>,
    pub is_regular: bool,
    pub in_normalizer: bool,
    pub all_minus_one: bool,
    pub all_plus_one: bool,
    pub warnings: Vec<String>,
}

fn near(a: f64, b: f64) -> bool {
    (a - b).abs() <= FLOAT_CONFLUENCE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// `t_j = +-t_k mod pi`, i.e. equal `cos 2t`.
fn same_class(a: &Angle, b: &Angle) -> bool {
    match (a, b) {
        (Angle::PiMultiple(x), Angle::PiMultiple(y)) => (x - y).is_integer() || (x + y).is_integer(),
        _ => near(a.cos2(), b.cos2()),
    }
}

/// Whether `sum c_i t_i = 0 mod pi`.
fn root_vanishes(root: &RestrictedRoot, angles: &[Angle]) -> bool {
    let exact: Option<Rational64> = root
        .coeffs
        .iter()
        .zip(angles)
        .filter(|(c, _)| **c != 0)
        .map(|(c, a)| match a {
            Angle::PiMultiple(v) => Some(*v * *c),
            Angle::Radians(_) => None,
        })
        .sum();
    match exact {
        Some(v) => v.is_integer(),
        None => {
            let x: f64 = root.coeffs.iter().zip(angles).map(|(c, a)| *c as f64 * a.radians()).sum();
            near((2.0 * x).cos(), 1.0)
        }
    }
}

fn cos2_is(angle: &Angle, target: i64) -> bool {
    match angle.exact_cos2() {
        Some(c) => c == BigRational::from_integer(BigInt::from(target)),
        None if matches!(angle, Angle::PiMultiple(_)) => false,
        None => near(angle.cos2(), target as f64),
    }
}

/// Builds the confluence classification of a torus point.
pub fn classify_point(space: &GrassmannianSpace, angles: &[Angle]) -> Result<TorusPoint, SpaceError> {
    let q = space.q() as usize;
    if angles.len() != q {
        return Err(SpaceError::PointArity { expected: q, got: angles.len() });
    }
    let cosines: Vec<f64> = angles.iter().map(|a| a.cos2()).collect();

    let mut parent: Vec<usize> = (0..q).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut root = i;
        while parent[root] != root {
            root = parent[root];
        }
        parent[i] = root;
        root
    }
    let mut warnings = Vec::new();
    for j in 0..q {
        for k in j + 1..q {
            if same_class(&angles[j], &angles[k]) {
                let exact = matches!((angles[j], angles[k]), (Angle::PiMultiple(_), Angle::PiMultiple(_)));
                if !exact && cosines[j] != cosines[k] {
                    warnings.push(ClassifyWarning::AmbiguousFloatConfluence {
                        first: j,
                        second: k,
                        gap: (cosines[j] - cosines[k]).abs(),
                    });
                }
                let (a, b) = (find(&mut parent, j), find(&mut parent, k));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut blocks: Vec<Block> = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; q];
    for i in 0..q {
        let root = find(&mut parent, i);
        match owner[root] {
            Some(b) => blocks[b].members.push(i),
            None => {
                owner[root] = Some(blocks.len());
                blocks.push(Block { members: vec![i], node: cosines[i] });
            }
        }
    }
    // Prefer an exactly representable node for mixed blocks.
    for block in &mut blocks {
        if let Some(&i) = block.members.iter().find(|&&i| angles[i].exact_cos2().is_some()) {
            block.node = cosines[i];
        }
    }

    let plus: Vec<bool> = angles.iter().map(|a| cos2_is(a, 1)).collect();
    let minus: Vec<bool> = angles.iter().map(|a| cos2_is(a, -1)).collect();
    let is_regular = blocks.iter().all(|b| b.len() == 1) && !plus.iter().chain(&minus).any(|&v| v);
    let in_normalizer = space.positive_roots().iter().all(|root| root_vanishes(root, angles));

    Ok(TorusPoint {
        angles: angles.to_vec(),
        cosines,
        blocks,
        is_regular,
        in_normalizer,
        all_minus_one: minus.iter().all(|&v| v),
        all_plus_one: plus.iter().all(|&v| v),
        warnings,
    })
}

/// Parses and classifies in one step.
pub fn parse_point(space: &GrassmannianSpace, s: &str) -> Result<TorusPoint, SpaceError> {
    classify_point(space, &parse_angles(s)?)
}

/// Identity coset `t = 0`.
pub fn identity_point(space: &GrassmannianSpace) -> TorusPoint {
    let zero = vec![Angle::PiMultiple(Rational64::zero()); space.q() as usize];
    classify_point(space, &zero).expect("arity matches")
}

/// Reports whether a root vanishes at the point; exposed for consistency checks.
pub fn root_vanishes_at(root: &RestrictedRoot, point: &TorusPoint) -> bool {
    root_vanishes(root, point.angles())
}

/// Signed `Rational64` helper for building exact angles.
pub fn pi_multiple(num: i64, den: i64) -> Angle {
    Angle::PiMultiple(Rational64::new(num, den))
}
