use rayon::prelude::*;
use serde::Serialize;

use super::chebyshev::Chebyshev2;
use crate::cohomology::{solve_cohomological, FourierSeries};
use crate::dynamics::{conjugacy, CircleFunction, ConjugacyOptions};
use crate::error::Result;
use crate::geometry::{ell, ArcSide, BoundaryCurve, ChessBilliardMap, LambdaContext, Sign};
use crate::grid::GridFunction;
use crate::scalar::{from_usize, lit, to_f64, Scalar};

#[derive(Clone, Copy, Debug)]
pub struct RightInverseOptions<T> {
    pub conjugacy: ConjugacyOptions<T>,
    pub chebyshev_min: usize,
    pub chebyshev_max: usize,
    /// Trailing-coefficient tolerance for the Chebyshev fit of `f`.
    pub chebyshev_tolerance: T,
    pub boundary_samples_min: usize,
    pub boundary_samples_max: usize,
    /// Relative size of the top eighth of the boundary spectrum at which sampling stops refining.
    pub fourier_tolerance: T,
    /// Step of the mixed characteristic difference; `10⁻³ · diameter` when absent.
    pub fd_step: Option<T>,
    pub residual_factor: T,
    pub boundary_factor: T,
    pub arc_tolerance: T,
    pub zero_average_tolerance: T,
    /// Boundary points used for the boundary norm.
    pub boundary_checks: usize,
}

impl<T: Scalar> Default for RightInverseOptions<T> {
    fn default() -> Self {
        Self {
            conjugacy: ConjugacyOptions { tolerance: Some(lit(1e-6)), ..ConjugacyOptions::default() },
            chebyshev_min: 32,
            chebyshev_max: 512,
            chebyshev_tolerance: lit(1e-13),
            boundary_samples_min: 1024,
            boundary_samples_max: 1 << 14,
            fourier_tolerance: lit(1e-14),
            fd_step: None,
            residual_factor: lit(1e-4),
            boundary_factor: lit(1e-4),
            arc_tolerance: lit(1e-6),
            zero_average_tolerance: lit(1e-8),
            boundary_checks: 2048,
        }
    }
}

/// Verification record of one right-inverse solve.
#[derive(Clone, Debug, Serialize)]
pub struct RightInverseReport {
    pub residual: f64,
    pub boundary_norm: f64,
    pub lambda: f64,
    pub rotation_number: f64,
    pub verified: bool,
    pub tol_residual: f64,
    pub tol_boundary: f64,
    /// Tolerances were relaxed tenfold because the conjugacy is not the identity.
    pub relaxed: bool,
    /// `|∫ U₀∘γ∓ - U₀| / max|U₀|` for the two solves.
    pub zero_average: [f64; 2],
    pub arc_mismatch: f64,
    pub conjugacy_residual: f64,
    pub chebyshev_order: usize,
    pub chebyshev_converged: bool,
    pub boundary_samples: usize,
    pub min_divisor: f64,
    pub f_norm: f64,
    pub u_norm: f64,
    pub interior_points: usize,
}

/// `u = u₀ - v₊ - v₋` with `∂²u/∂y₊∂y₋ = f` and `u = 0` on the boundary.
#[derive(Clone)]
pub struct RightInverse<T> {
    map: ChessBilliardMap<T>,
    psi: CircleFunction<T>,
    u0: Chebyshev2<T>,
    /// `V₊`, `V₋` in the conjugated coordinate.
    v: [FourierSeries<T>; 2],
    u: GridFunction<T>,
    pub report: RightInverseReport,
}

impl<T: Scalar> RightInverse<T> {
    /// `(y₊, y₋) = (ℓ⁺/2, ℓ⁻/2)`.
    pub fn characteristic(&self, x: [T; 2]) -> [T; 2] {
        let ctx = self.map.context();
        [ell(x, ctx, Sign::Plus) / lit(2.0), ell(x, ctx, Sign::Minus) / lit(2.0)]
    }

    /// Inverse of [`characteristic`](Self::characteristic).
    pub fn physical(&self, y: [T; 2]) -> [T; 2] {
        let l = self.map.lambda();
        let c = (T::one() - l * l).sqrt();
        [l * (y[0] - y[1]), c * (y[0] + y[1])]
    }

    /// `v±` at the characteristic level `y±`, read off the rising arc.
    pub fn v_component(&self, sign: Sign, y: T) -> T {
        self.v_on_arc(sign, y, ArcSide::Rising)
    }

    fn v_on_arc(&self, sign: Sign, y: T, side: ArcSide) -> T {
        let s = self.map.arc_preimage(sign, y * lit(2.0), side);
        self.v[sign.index()].eval_real(self.psi.eval(s))
    }

    pub fn eval_characteristic(&self, y: [T; 2]) -> T {
        self.u0.eval(y) - self.v_component(Sign::Plus, y[0]) - self.v_component(Sign::Minus, y[1])
    }

    pub fn eval(&self, x: [T; 2]) -> T {
        self.eval_characteristic(self.characteristic(x))
    }

    /// `u` on the grid of the forcing.
    pub fn grid(&self) -> &GridFunction<T> {
        &self.u
    }

    pub fn conjugacy(&self) -> &CircleFunction<T> {
        &self.psi
    }

    pub fn boundary_data(&self) -> &[FourierSeries<T>; 2] {
        &self.v
    }

    /// `∂²u/∂y₊∂y₋` at `x` by a centred four-point difference of step `h`.
    pub fn mixed_difference(&self, x: [T; 2], h: T) -> T {
        let y = self.characteristic(x);
        let e = |a: T, b: T| self.eval_characteristic([y[0] + a, y[1] + b]);
        (e(h, h) - e(h, -h) - e(-h, h) + e(-h, -h)) / (lit::<T>(4.0) * h * h)
    }
}

/// Samples `values(θ_j)` on `θ_j = j/n` with `n` doubled until the top eighth of
/// the spectrum is below `tol` relative to the largest coefficient.
fn adaptive_boundary<T: Scalar>(
    min: usize,
    max: usize,
    tol: T,
    sample: impl Fn(usize) -> Vec<[T; 3]>,
) -> (usize, Vec<[T; 3]>) {
    let mut n = min.max(16);
    loop {
        let rows = sample(n);
        let resolved = (0..3).all(|c| {
            let col: Vec<T> = rows.iter().map(|r| r[c]).collect();
            let s = FourierSeries::from_samples(&col);
            let order = s.order() as i64;
            let big = (0..=order).fold(T::zero(), |m, k| m.max(s.coefficient(k).norm()));
            let top = ((7 * order) / 8..=order).fold(T::zero(), |m, k| m.max(s.coefficient(k).norm()));
            big == T::zero() || top <= tol * big
        });
        if resolved || n >= max {
            return (n, rows);
        }
        n *= 2;
    }
}

/// Solves `P(λ)u = f`, `u = 0` on the boundary, for λ-simple boundaries with
/// irrational rotation number, and verifies the result on the grid of `f`.
///
/// Verification failures are reported in [`RightInverseReport::verified`], not as errors.
pub fn right_inverse<T: Scalar>(
    curve: &BoundaryCurve<T>,
    ctx: LambdaContext<T>,
    f: &GridFunction<T>,
    opts: &RightInverseOptions<T>,
) -> Result<RightInverse<T>> {
    let map = ChessBilliardMap::new(curve, ctx)?;
    let conj = conjugacy(&map, &opts.conjugacy)?;
    let psi = conj.psi.clone();
    let r = conj.lift_rotation;

    // u₀ by double integration in characteristic coordinates
    let lambda = ctx.lambda();
    let cosl = (T::one() - lambda * lambda).sqrt();
    let mut lo = [T::zero(); 2];
    let mut hi = [T::zero(); 2];
    for sign in Sign::both() {
        let (a, b) = map.ell_range(sign);
        let pad = (b - a) * lit(0.01);
        lo[sign.index()] = a / lit(2.0) - pad;
        hi[sign.index()] = b / lit(2.0) + pad;
    }
    let to_x = |y: [T; 2]| [lambda * (y[0] - y[1]), cosl * (y[0] + y[1])];
    let f_tilde = |y: [T; 2]| f.value_at(to_x(y));
    let fcheb = Chebyshev2::interpolate_adaptive(
        &f_tilde,
        lo,
        hi,
        opts.chebyshev_min,
        opts.chebyshev_max,
        opts.chebyshev_tolerance,
    );
    let u0 = fcheb.integrate(0).integrate(1);
    let y_of = |x: [T; 2]| [ell(x, &ctx, Sign::Plus) / lit(2.0), ell(x, &ctx, Sign::Minus) / lit(2.0)];

    // boundary data in the conjugated coordinate: U₀, U₀∘γ⁻, U₀∘γ⁺
    let (n_theta, rows) = adaptive_boundary(opts.boundary_samples_min, opts.boundary_samples_max, opts.fourier_tolerance, |n| {
        (0..n)
            .into_par_iter()
            .map(|j| {
                let s = psi.inverse(from_usize::<T>(j) / from_usize::<T>(n));
                let here = u0.eval(y_of(curve.point(s)));
                let gm = u0.eval(y_of(curve.point(map.involution_exact(Sign::Minus, s))));
                let gp = u0.eval(y_of(curve.point(map.involution_exact(Sign::Plus, s))));
                [here, gm, gp]
            })
            .collect()
    });
    let col = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<T>>();
    let big_u0 = col(0);
    let u0_max = big_u0.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    let u0_series = FourierSeries::from_samples(&big_u0);
    let half_mean = u0_series.mean() / lit(2.0);
    let mut zero_average = [0.0; 2];
    let mut v = [FourierSeries::zeros(0), FourierSeries::zeros(0)];
    let mut min_divisor = f64::INFINITY;
    // V₊ against γ⁻ with rotation r, V₋ against γ⁺ with rotation -r
    for (slot, (other, alpha)) in [(1usize, r), (2usize, -r)].into_iter().enumerate() {
        let mut g: Vec<T> = big_u0.iter().zip(col(other)).map(|(&a, b)| a - b).collect();
        let mean = g.iter().fold(T::zero(), |a, &b| a + b) / from_usize::<T>(n_theta);
        zero_average[slot] = if u0_max > T::zero() { to_f64(mean.abs() / u0_max) } else { 0.0 };
        for x in g.iter_mut() {
            *x -= mean;
        }
        let mut gs = FourierSeries::from_samples(&g);
        gs.set(0, num_complex::Complex::new(T::zero(), T::zero()));
        let sol = solve_cohomological(&gs, alpha, half_mean)?;
        min_divisor = min_divisor.min(to_f64(sol.min_divisor));
        v[slot] = sol.v;
    }

    let periodic_amp = (1..=psi.periodic.order() as i64)
        .fold(T::zero(), |a, k| a + psi.periodic.coefficient(k).norm() * lit(2.0));
    let relaxed = periodic_amp > lit(1e-6);
    let relax = if relaxed { lit::<T>(10.0) } else { T::one() };

    let mut sol = RightInverse {
        map,
        psi,
        u0,
        v,
        u: f.clone(),
        report: RightInverseReport {
            residual: 0.0,
            boundary_norm: 0.0,
            lambda: to_f64(lambda),
            rotation_number: to_f64(conj.rotation),
            verified: false,
            tol_residual: 0.0,
            tol_boundary: 0.0,
            relaxed,
            zero_average,
            arc_mismatch: 0.0,
            conjugacy_residual: to_f64(conj.residual),
            chebyshev_order: fcheb.order()[0],
            chebyshev_converged: fcheb.converged(),
            boundary_samples: n_theta,
            min_divisor,
            f_norm: 0.0,
            u_norm: 0.0,
            interior_points: 0,
        },
    };
    sol.u = f.map_inside(|p| sol.eval(p));

    // verification on the interior grid points
    let h = opts.fd_step.unwrap_or(curve.diameter() * lit(1e-3));
    let interior = f.interior_indices();
    let checks: Vec<(T, T)> = interior
        .par_iter()
        .map(|&i| {
            let x = f.point_index(i);
            let res = (sol.mixed_difference(x, h) - f.values()[i]).abs();
            let y = sol.characteristic(x);
            let mut arc = T::zero();
            for (sign, yy) in [(Sign::Plus, y[0]), (Sign::Minus, y[1])] {
                let a = sol.v_on_arc(sign, yy, ArcSide::Rising);
                let b = sol.v_on_arc(sign, yy, ArcSide::Falling);
                arc = arc.max((a - b).abs());
            }
            (res, arc)
        })
        .collect();
    let residual = checks.iter().fold(T::zero(), |m, c| m.max(c.0));
    let arc = checks.iter().fold(T::zero(), |m, c| m.max(c.1));
    let nb = opts.boundary_checks.max(16);
    let boundary_norm = (0..nb)
        .into_par_iter()
        .map(|j| sol.eval(curve.point(from_usize::<T>(j) / from_usize::<T>(nb))).abs())
        .reduce(T::zero, T::max);
    let f_norm = f.max_abs_inside();
    let u_norm = sol.u.max_abs_inside();
    let tol_residual = opts.residual_factor * f_norm * relax;
    let tol_boundary = opts.boundary_factor * u_norm * relax;
    let zero_ok = zero_average.iter().all(|&z| z <= to_f64(opts.zero_average_tolerance));
    let rep = &mut sol.report;
    rep.residual = to_f64(residual);
    rep.boundary_norm = to_f64(boundary_norm);
    rep.arc_mismatch = to_f64(arc);
    rep.tol_residual = to_f64(tol_residual);
    rep.tol_boundary = to_f64(tol_boundary);
    rep.f_norm = to_f64(f_norm);
    rep.u_norm = to_f64(u_norm);
    rep.interior_points = interior.len();
    rep.verified = residual <= tol_residual
        && boundary_norm <= tol_boundary
        && arc <= opts.arc_tolerance * relax
        && zero_ok;
    Ok(sol)
}
