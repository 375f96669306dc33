use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::scalar::{to_f64, Scalar};

/// Depth cap for expansions of floating-point inputs.
pub const MAX_FLOAT_DEPTH: usize = 40;
/// A quotient with `log a_{n+1} / log q_n` at least this marks a Liouville suspect.
pub const LIOUVILLE_EXPONENT: f64 = 1.9;
/// Convergent denominators below this are ignored by the Liouville test.
pub const LIOUVILLE_MIN_DENOMINATOR: u128 = 8;

/// Continued fraction `[a₀; a₁, a₂, …]` with convergents `p_n/q_n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContinuedFraction {
    pub quotients: Vec<u128>,
    /// `(p_n, q_n)` for `n = 0..quotients.len()`.
    pub convergents: Vec<(u128, u128)>,
    /// `max log a_{n+1} / log q_n` over `q_n ≥ 2`; 0 when no such pair exists.
    pub score: f64,
    /// The expansion terminated: the input is rational to working precision.
    pub rational: bool,
    /// The expansion stopped because further quotients would be rounding noise.
    pub precision_exhausted: bool,
    pub liouville_suspect: bool,
}

impl ContinuedFraction {
    fn from_quotients(quotients: Vec<u128>, rational: bool, precision_exhausted: bool) -> Self {
        let mut convergents: Vec<(u128, u128)> = Vec::with_capacity(quotients.len());
        let (mut p2, mut q2, mut p1, mut q1) = (0u128, 1u128, 1u128, 0u128);
        let mut kept = Vec::with_capacity(quotients.len());
        let mut overflow = false;
        for &a in &quotients {
            let p = a.checked_mul(p1).and_then(|x| x.checked_add(p2));
            let q = a.checked_mul(q1).and_then(|x| x.checked_add(q2));
            match (p, q) {
                (Some(p), Some(q)) => {
                    convergents.push((p, q));
                    kept.push(a);
                    p2 = p1;
                    q2 = q1;
                    p1 = p;
                    q1 = q;
                }
                _ => {
                    overflow = true;
                    break;
                }
            }
        }
        let mut score = 0.0f64;
        let mut liouville = false;
        for n in 0..kept.len().saturating_sub(1) {
            let q = convergents[n].1;
            if q < 2 {
                continue;
            }
            let a = kept[n + 1];
            let e = (a as f64).ln() / (q as f64).ln();
            score = score.max(e);
            if q >= LIOUVILLE_MIN_DENOMINATOR && e >= LIOUVILLE_EXPONENT {
                liouville = true;
            }
        }
        Self {
            quotients: kept,
            convergents,
            score,
            rational: rational && !overflow,
            precision_exhausted: precision_exhausted || overflow,
            liouville_suspect: liouville,
        }
    }

    pub fn len(&self) -> usize {
        self.quotients.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quotients.is_empty()
    }
}

/// Gauss-map expansion of a floating-point number `α ≥ 0`.
///
/// Stops when the remainder is indistinguishable from zero (flagged rational),
/// when accumulated rounding would make the next quotient meaningless, or at
/// `min(depth, MAX_FLOAT_DEPTH)` quotients.
pub fn continued_fraction<T: Scalar>(alpha: T, depth: usize) -> Result<ContinuedFraction> {
    if !(alpha >= T::zero()) || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "continued fraction needs a finite nonnegative number, got {}",
            to_f64(alpha)
        )));
    }
    let cap = depth.clamp(1, MAX_FLOAT_DEPTH);
    let eps = T::epsilon();
    let scale = alpha.max(T::one());
    let a0 = alpha.floor();
    let mut x = alpha - a0;
    let mut quotients = vec![a0.to_u128().unwrap_or(0)];
    let (mut q_prev, mut q) = (0f64, 1f64);
    let mut rational = false;
    let mut exhausted = depth > MAX_FLOAT_DEPTH;
    while quotients.len() < cap {
        // the remainder after n steps carries an absolute error of about ε q_n² α
        let err = to_f64(eps * scale) * q * q * 8.0;
        if to_f64(x) <= err {
            rational = true;
            exhausted = false;
            break;
        }
        if err > 1e-3 {
            exhausted = true;
            break;
        }
        let y = T::one() / x;
        let a = y.floor();
        x = y - a;
        let a = a.to_u128().unwrap_or(u128::MAX);
        quotients.push(a);
        let qn = a as f64 * q + q_prev;
        q_prev = q;
        q = qn;
    }
    if quotients.len() >= cap && !rational && depth >= MAX_FLOAT_DEPTH {
        exhausted = true;
    }
    Ok(ContinuedFraction::from_quotients(quotients, rational, exhausted))
}

/// Exact Euclidean expansion of a nonnegative rational.
pub fn continued_fraction_exact(alpha: &BigRational, depth: usize) -> Result<ContinuedFraction> {
    if alpha.is_negative() {
        return Err(Error::InvalidArgument("continued fraction needs a nonnegative number".into()));
    }
    let mut num: BigInt = alpha.numer().clone();
    let mut den: BigInt = alpha.denom().clone();
    let mut quotients = Vec::new();
    let mut exhausted = false;
    while !den.is_zero() && quotients.len() < depth {
        let (a, r) = num.div_rem(&den);
        match a.to_u128() {
            Some(a) => quotients.push(a),
            None => {
                exhausted = true;
                break;
            }
        }
        num = den;
        den = r;
    }
    let rational = den.is_zero() && !exhausted;
    Ok(ContinuedFraction::from_quotients(quotients, rational, exhausted || !den.is_zero()))
}
