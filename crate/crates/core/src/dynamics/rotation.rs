use rayon::prelude::*;

use super::contfrac::continued_fraction;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryCurve, ChessBilliardMap, LambdaContext};
use crate::scalar::{frac, from_usize, lit, to_f64, Scalar};

/// A periodic orbit is accepted when `|𝐛^q(s) - s - p|` is at most this.
pub const LOCK_TOLERANCE: f64 = 1e-10;

/// Degree-one circle map given by an increasing lift.
pub trait CircleMap<T>: Sync {
    fn lift(&self, s: T) -> T;
}

impl<T: Scalar> CircleMap<T> for ChessBilliardMap<T> {
    fn lift(&self, s: T) -> T {
        ChessBilliardMap::lift(self, s)
    }
}

/// `s ↦ s + α`.
#[derive(Clone, Copy, Debug)]
pub struct RigidRotation<T>(pub T);

impl<T: Scalar> CircleMap<T> for RigidRotation<T> {
    fn lift(&self, s: T) -> T {
        s + self.0
    }
}

/// Circle map from a closure computing its lift.
pub struct LiftFn<F>(pub F);

impl<T: Scalar, F: Fn(T) -> T + Sync> CircleMap<T> for LiftFn<F> {
    fn lift(&self, s: T) -> T {
        (self.0)(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum RotationMethod {
    Birkhoff,
    PeriodicOrbitLocked { p: u64, q: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationNumberEstimate<T> {
    /// Rotation number in `[0, 1)`.
    pub value: T,
    pub iterations: usize,
    pub error_bound: T,
    pub method: RotationMethod,
}

impl<T: Scalar> RotationNumberEstimate<T> {
    pub fn locked(&self) -> Option<(u64, u64)> {
        match self.method {
            RotationMethod::PeriodicOrbitLocked { p, q } => Some((p, q)),
            RotationMethod::Birkhoff => None,
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RotationOptions<T> {
    /// Birkhoff iteration budget `M`.
    pub iterations: usize,
    /// Largest period tested for a periodic orbit.
    pub q_max: u64,
    /// Sample points for the sign-change search of `𝐛^q(s) - s - p`.
    pub lock_grid: usize,
    /// Initial point of the orbit.
    pub start: T,
}

impl<T: Scalar> Default for RotationOptions<T> {
    fn default() -> Self {
        Self { iterations: 1_000_000, q_max: 10_000, lock_grid: 128, start: T::zero() }
    }
}

/// Rotation number of a circle map: Birkhoff average refined by a search for
/// periodic orbits at the convergents of the estimate.
pub fn rotation_number<T: Scalar, M: CircleMap<T> + ?Sized>(
    map: &M,
    opts: &RotationOptions<T>,
) -> RotationNumberEstimate<T> {
    let m = opts.iterations.max(1);
    // integer and fractional parts are carried separately so long orbits keep full precision
    let mut y = frac(opts.start);
    let y0 = y;
    let mut turns = 0i64;
    for _ in 0..m {
        let next = map.lift(y);
        let k = next.floor();
        turns += k.to_i64().unwrap_or(0);
        y = next - k;
    }
    let mf = from_usize::<T>(m);
    let raw = (lit::<T>(turns as f64) + (y - y0)) / mf;
    let bound = T::one() / mf;
    let birkhoff = RotationNumberEstimate {
        value: frac(raw),
        iterations: m,
        error_bound: bound,
        method: RotationMethod::Birkhoff,
    };
    let est = frac(raw);
    let Ok(cf) = continued_fraction(est, 40) else {
        return birkhoff;
    };
    let mut candidates: Vec<(u64, u64)> = cf
        .convergents
        .iter()
        .filter_map(|&(p, q)| Some((u64::try_from(p).ok()?, u64::try_from(q).ok()?)))
        .filter(|&(_, q)| q >= 1 && q <= opts.q_max)
        .collect();
    // the next integer is also a convergent of numbers just below it
    candidates.push((1, 1));
    candidates.sort_by_key(|&(_, q)| q);
    candidates.dedup();
    for (p, q) in candidates {
        let pq = lit::<T>(p as f64) / lit::<T>(q as f64);
        // |est - r| < 1/M, so convergents farther away cannot be the rotation number
        if (est - pq).abs() > bound * lit::<T>(1.5) {
            continue;
        }
        let shift = raw.floor();
        let target = lit::<T>(p as f64) + shift * lit::<T>(q as f64);
        if periodic_orbit(map, p, q, target, opts).is_some() {
            return RotationNumberEstimate {
                value: frac(pq),
                iterations: m,
                error_bound: lit::<T>(LOCK_TOLERANCE) / lit::<T>(q as f64),
                method: RotationMethod::PeriodicOrbitLocked { p: p % q, q },
            };
        }
    }
    birkhoff
}

/// Finds `s` with `|𝐛^q(s) - s - target| ≤ LOCK_TOLERANCE`.
fn periodic_orbit<T: Scalar, M: CircleMap<T> + ?Sized>(
    map: &M,
    _p: u64,
    q: u64,
    target: T,
    opts: &RotationOptions<T>,
) -> Option<T> {
    let h = |s: T| {
        let mut y = s;
        for _ in 0..q {
            y = map.lift(y);
        }
        y - s - target
    };
    let tol = lit::<T>(LOCK_TOLERANCE);
    let g = opts.lock_grid.max(2);
    let gf = from_usize::<T>(g);
    let s0 = frac(opts.start);
    let mut prev_s = s0;
    let mut prev = h(s0);
    if prev.abs() <= tol {
        return Some(s0);
    }
    for i in 1..=g {
        let s = s0 + from_usize::<T>(i) / gf;
        let v = h(s);
        if v.abs() <= tol {
            return Some(s);
        }
        if (v > T::zero()) != (prev > T::zero()) {
            let (mut a, mut b) = (prev_s, s);
            let a_pos = prev > T::zero();
            for _ in 0..80 {
                let mid = (a + b) * lit::<T>(0.5);
                if mid <= a || mid >= b {
                    break;
                }
                let vm = h(mid);
                if vm.abs() <= tol {
                    return Some(mid);
                }
                if (vm > T::zero()) == a_pos {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            return None;
        }
        prev = v;
        prev_s = s;
    }
    None
}

#[derive(Clone, Debug)]
pub struct RotationCurvePoint<T> {
    pub lambda: T,
    /// `None` when the curve is not λ-simple (or λ is invalid).
    pub estimate: Option<RotationNumberEstimate<T>>,
    pub note: Option<String>,
}

/// Rotation numbers of the chess billiard of `curve` over a grid of
/// frequencies, computed in parallel; output order follows `lambdas`.
pub fn rotation_curve<T: Scalar>(
    curve: &BoundaryCurve<T>,
    lambdas: &[T],
    opts: &RotationOptions<T>,
) -> Vec<RotationCurvePoint<T>> {
    lambdas
        .par_iter()
        .map(|&lambda| {
            let map = LambdaContext::new(lambda).and_then(|ctx| ChessBilliardMap::new(curve, ctx));
            match map {
                Ok(map) => RotationCurvePoint {
                    lambda,
                    estimate: Some(rotation_number(&map, opts)),
                    note: None,
                },
                Err(e) => RotationCurvePoint { lambda, estimate: None, note: Some(e.to_string()) },
            }
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LambdaSearch<T> {
    pub lambda: T,
    pub rotation: T,
    /// The bisection assumption failed and a grid scan was used.
    pub scanned: bool,
}

/// Inverts a rotation-number function `λ ↦ r(λ)` (returning `None` where undefined)
/// by bisection, with a scan fallback when monotonicity fails.
pub fn find_lambda_for_rotation<T: Scalar, F: Fn(T) -> Option<T>>(
    rotation: F,
    target: T,
) -> Result<LambdaSearch<T>> {
    if !(target > T::zero() && target < T::one()) {
        return Err(Error::Unreachable(to_f64(target)));
    }
    let edge = lit::<T>(1e-6);
    let (mut lo, mut hi) = (edge, T::one() - edge);
    let (Some(mut r_lo), Some(mut r_hi)) = (rotation(lo), rotation(hi)) else {
        return scan(&rotation, target);
    };
    if !(r_lo <= target && target <= r_hi) {
        return scan(&rotation, target);
    }
    let mut best = if (r_lo - target).abs() < (r_hi - target).abs() { (lo, r_lo) } else { (hi, r_hi) };
    for _ in 0..200 {
        let mid = (lo + hi) * lit::<T>(0.5);
        if mid <= lo || mid >= hi {
            break;
        }
        let Some(r) = rotation(mid) else {
            return scan(&rotation, target);
        };
        if r < r_lo || r > r_hi {
            return scan(&rotation, target);
        }
        if (r - target).abs() < (best.1 - target).abs() {
            best = (mid, r);
        }
        if r == target {
            break;
        }
        if r < target {
            lo = mid;
            r_lo = r;
        } else {
            hi = mid;
            r_hi = r;
        }
    }
    Ok(LambdaSearch { lambda: best.0, rotation: best.1, scanned: false })
}

fn scan<T: Scalar, F: Fn(T) -> Option<T>>(rotation: &F, target: T) -> Result<LambdaSearch<T>> {
    let n = 256;
    let grid: Vec<T> = (1..n).map(|i| from_usize::<T>(i) / from_usize::<T>(n)).collect();
    let vals: Vec<Option<T>> = grid.iter().map(|&l| rotation(l)).collect();
    for i in 0..grid.len() - 1 {
        let (Some(a), Some(b)) = (vals[i], vals[i + 1]) else { continue };
        if (a - target) * (b - target) > T::zero() {
            continue;
        }
        let (mut lo, mut hi) = (grid[i], grid[i + 1]);
        let rising = b >= a;
        let mut best = if (a - target).abs() <= (b - target).abs() { (lo, a) } else { (hi, b) };
        for _ in 0..200 {
            let mid = (lo + hi) * lit::<T>(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            let Some(r) = rotation(mid) else { break };
            if (r - target).abs() < (best.1 - target).abs() {
                best = (mid, r);
            }
            if r == target {
                break;
            }
            if (r < target) == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        return Ok(LambdaSearch { lambda: best.0, rotation: best.1, scanned: true });
    }
    Err(Error::Unreachable(to_f64(target)))
}

/// [`find_lambda_for_rotation`] for the chess billiard of a boundary curve.
pub fn find_lambda_for_rotation_on_curve<T: Scalar>(
    curve: &BoundaryCurve<T>,
    target: T,
    opts: &RotationOptions<T>,
) -> Result<LambdaSearch<T>> {
    find_lambda_for_rotation(
        |lambda| {
            let ctx = LambdaContext::new(lambda).ok()?;
            let map = ChessBilliardMap::new(curve, ctx).ok()?;
            let est = rotation_number(&map, opts);
            // near λ → 1 the rotation number approaches 1 and may wrap
            let v = est.value;
            Some(if v < lit::<T>(0.25) && lambda > lit::<T>(0.9) { v + T::one() } else { v })
        },
        target,
    )
}
