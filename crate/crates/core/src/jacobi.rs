//! Jacobi polynomials `P_n^{(a,b)}` with non-negative integer parameters.
//!
//! Values come from the three-term recurrence in the degree, which is stable
//! on `[-1, 1]`. Every routine is generic over [`Scalar`], so the same code
//! yields `f64` values and exact rationals.
//!
//! Derivatives use `d/dx P_n^{(a,b)} = (n+a+b+1)/2 * P_{n-1}^{(a+1,b+1)}`
//! applied `order` times; once the degree is exhausted the result is zero.

use thiserror::Error;

use crate::scalar::Scalar;

/// Degree cap applied by [`jacobi_eval`].
pub const DEFAULT_DEGREE_LIMIT: u32 = 100_000;

/// Largest degree for which exact rational evaluation stays practical
/// (coefficient growth makes larger degrees slow, not wrong).
pub const EXACT_PRACTICAL_DEGREE: u32 = 500;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JacobiError {
    #[error("degree limit: degree {degree} exceeds the configured maximum {limit}")]
    DegreeLimit { degree: u32, limit: u32 },
    #[error("argument {0} outside [-1, 1]; floating evaluation is restricted to the interval")]
    Domain(f64),
}

/// Parameters `(a, b)` and degree `n` of `P_n^{(a,b)}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JacobiParams {
    pub a: u32,
    pub b: u32,
    pub n: u32,
}

impl JacobiParams {
    pub fn new(a: u32, b: u32, n: u32) -> Self {
        Self { a, b, n }
    }
}

/// `P_n^{(a,b)}(x)`, capped at [`DEFAULT_DEGREE_LIMIT`].
pub fn jacobi_eval<S: Scalar>(params: JacobiParams, x: &S) -> Result<S, JacobiError> {
    jacobi_eval_with_limit(params, x, DEFAULT_DEGREE_LIMIT)
}

pub fn jacobi_eval_with_limit<S: Scalar>(
    params: JacobiParams,
    x: &S,
    limit: u32,
) -> Result<S, JacobiError> {
    let JacobiParams { a, b, n } = params;
    if n > limit {
        return Err(JacobiError::DegreeLimit { degree: n, limit });
    }
    if !x.in_jacobi_domain() {
        return Err(JacobiError::Domain(x.to_f64()));
    }
    let (a, b) = (a as i64, b as i64);
    // P_1 = (a+1) + (a+b+2)(x-1)/2
    let p1 = S::from_i64(a + 1) + S::from_ratio(a + b + 2, 2) * (x.clone() - S::one());
    if n == 0 {
        return Ok(S::one());
    }
    let mut prev = S::one();
    let mut curr = p1;
    for k in 2..=n as i64 {
        let s = 2 * k + a + b;
        let c1 = 2 * k * (k + a + b) * (s - 2);
        let c2 = (s - 1) * s * (s - 2);
        let c3 = (s - 1) * (a * a - b * b);
        let c4 = 2 * (k + a - 1) * (k + b - 1) * s;
        let next = ((S::from_i64(c2) * x.clone() + S::from_i64(c3)) * curr.clone()
            - S::from_i64(c4) * prev)
            / S::from_i64(c1);
        prev = curr;
        curr = next;
    }
    Ok(curr)
}

/// `binom(n + a, n)`, which is `P_n^{(a,b)}(1)`.
pub fn value_at_one<S: Scalar>(a: u32, n: u32) -> S {
    let mut acc = S::one();
    for i in 1..=a as i64 {
        acc = acc * S::from_ratio(n as i64 + i, i);
    }
    acc
}

/// `(x)(x+1)...(x+k-1)` as a scalar.
fn rising<S: Scalar>(x: i64, k: u32) -> S {
    let mut acc = S::one();
    for i in 0..k as i64 {
        acc = acc * S::from_i64(x + i);
    }
    acc
}

/// The `order`-th derivative of `P_n^{(a,b)}` at `x`.
pub fn jacobi_derivative<S: Scalar>(
    params: JacobiParams,
    order: u32,
    x: &S,
) -> Result<S, JacobiError> {
    let JacobiParams { a, b, n } = params;
    if order > n {
        if n > DEFAULT_DEGREE_LIMIT {
            return Err(JacobiError::DegreeLimit { degree: n, limit: DEFAULT_DEGREE_LIMIT });
        }
        return Ok(S::zero());
    }
    let shifted = jacobi_eval(JacobiParams::new(a + order, b + order, n - order), x)?;
    let mut scale: S = rising(n as i64 + a as i64 + b as i64 + 1, order);
    for _ in 0..order {
        scale = scale / S::from_i64(2);
    }
    Ok(scale * shifted)
}

/// `P~_n(x) = P_n^{(gap,0)}(x) / P_n^{(gap,0)}(1)` with `gap = p - q`.
pub fn normalized_jacobi<S: Scalar>(pq_gap: u32, n: u32, x: &S) -> Result<S, JacobiError> {
    let raw = jacobi_eval(JacobiParams::new(pq_gap, 0, n), x)?;
    Ok(raw / value_at_one::<S>(pq_gap, n))
}

/// The `order`-th derivative of [`normalized_jacobi`]:
/// `2^-order (n+gap+1)...(n+gap+order) P_{n-order}^{(gap+order, order)}(x) / P_n^{(gap,0)}(1)`.
pub fn normalized_jacobi_derivative<S: Scalar>(
    pq_gap: u32,
    n: u32,
    order: u32,
    x: &S,
) -> Result<S, JacobiError> {
    if order == 0 {
        return normalized_jacobi(pq_gap, n, x);
    }
    if order > n {
        return Ok(S::zero());
    }
    let shifted = jacobi_eval(JacobiParams::new(pq_gap + order, order, n - order), x)?;
    let mut scale: S = rising(n as i64 + pq_gap as i64 + 1, order);
    for _ in 0..order {
        scale = scale / S::from_i64(2);
    }
    Ok(scale * shifted / value_at_one::<S>(pq_gap, n))
}
