mod common;

use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use common::GOLDEN;
use internal_waves::dynamics::continued_fraction;
use internal_waves::spectra::{
    disk_lambda, disk_modes, map_ellipse, rectangle_modes, rectangle_rotation_number, spectral_measure, square_mode,
    square_modes, square_rotation_to_lambda, transported_disk_modes, EllipseTransport, Forcing,
    ProjectionOptions, SpectralKey,
};
use internal_waves::{EigenMode, Error, ModeSet};
use nalgebra::DMatrix;
use num_rational::Ratio;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `∂²₂u / Δu` from centered differences, an oracle for the eigenvalue of `∂²₂Δ⁻¹`.
fn fd_eigenvalue(mode: &EigenMode, x: [f64; 2]) -> f64 {
    let h = 1e-4;
    let u = |a: f64, b: f64| mode.u([a, b]);
    let d11 = (u(x[0] + h, x[1]) - 2.0 * u(x[0], x[1]) + u(x[0] - h, x[1])) / (h * h);
    let d22 = (u(x[0], x[1] + h) - 2.0 * u(x[0], x[1]) + u(x[0], x[1] - h)) / (h * h);
    d22 / (d11 + d22)
}

/// Max of the stationary residual over a 101×101 grid of the bounding box, relative to the Hessian scale.
fn grid_residual(mode: &EigenMode) -> f64 {
    let (lo, hi) = mode.bounding_box();
    let (mut worst, mut scale) = (0.0f64, 0.0f64);
    for i in 0..101 {
        for j in 0..101 {
            let x = [lo[0] + (hi[0] - lo[0]) * i as f64 / 100.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 100.0];
            if !mode.domain_contains(x) {
                continue;
            }
            let h = mode.jet(x).2;
            scale = scale.max(h[0].abs()).max(h[2].abs());
            worst = worst.max(mode.stationary_residual(x).abs());
        }
    }
    worst / scale
}

fn boundary_defect(mode: &EigenMode) -> f64 {
    let (lo, hi) = mode.bounding_box();
    let probe = [0.5 * (lo[0] + hi[0]) + 0.1 * (hi[0] - lo[0]), 0.5 * (lo[1] + hi[1]) + 0.07 * (hi[1] - lo[1])];
    let scale = mode.u(probe).abs().max(mode.gradient(probe)[0].abs()).max(1.0);
    (0..1000).map(|j| mode.u(mode.boundary_point(j as f64 / 1000.0)).abs()).fold(0.0, f64::max) / scale
}

#[test]
fn square_eigenvalues() {
    for (k1, k2, e) in [(1, 1, (1, 2)), (1, 2, (4, 5)), (2, 1, (1, 5))] {
        let m = square_mode::<f64>(k1, k2);
        assert_eq!(m.key, SpectralKey::Square(Ratio::new(e.0, e.1)));
        assert_eq!(m.key.exact_eigenvalue(), Some(Ratio::new(e.0, e.1)));
        let oracle = fd_eigenvalue(&m, [0.31, 0.17]);
        assert!((oracle - e.0 as f64 / e.1 as f64).abs() < 1e-6, "({k1},{k2}): {oracle}");
    }
}

#[test]
fn square_h_minus_one_normalization() {
    // κ = 1/‖φ‖_{H⁻¹} with ‖∇u‖² computed by a midpoint rule
    for (k1, k2) in [(1u32, 1u32), (2, 3), (5, 1)] {
        let m = square_mode::<f64>(k1, k2);
        let n = 400;
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                let g = m.gradient([(i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64]);
                e += (g[0] * g[0] + g[1] * g[1]) / (n * n) as f64;
            }
        }
        let kappa = m.kappa(e);
        let expected = 2.0 * PI * ((k1 * k1 + k2 * k2) as f64).sqrt();
        assert!((kappa - expected).abs() < 1e-8 * expected, "{kappa} vs {expected}");
    }
}

#[test]
fn disk_low_degree_closed_forms() {
    let modes = disk_modes::<f64>(3);
    let u12 = &modes[0];
    let u13 = &modes[1];
    assert_eq!(u12.index(), (1, 2));
    assert_eq!(u13.index(), (1, 3));
    assert!((u12.lambda() - SQRT_2 / 2.0).abs() < 1e-15);
    assert!((u13.lambda() - 0.5).abs() < 1e-15);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..200 {
        let x = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let r2 = x[0] * x[0] + x[1] * x[1];
        assert!((u12.u(x) - 2.0 * (r2 - 1.0)).abs() < 1e-14);
        assert!((u13.u(x) - 3.0 * 3f64.sqrt() * x[0] * (r2 - 1.0)).abs() < 1e-13);
        assert!(u13.stationary_residual(x).abs() < 1e-12);
    }
    // u_{1,3} = 3√3(x₁³ + x₁x₂² - x₁): u₁₁ = 18√3 x₁, u₂₂ = 6√3 x₁
    let x = [0.3, -0.4];
    let h = u13.jet(x).2;
    assert!((h[0] - 18.0 * 3f64.sqrt() * 0.3).abs() < 1e-13);
    assert!((h[2] - 6.0 * 3f64.sqrt() * 0.3).abs() < 1e-13);
}

fn degree_along_line(mode: &EigenMode, p: [f64; 2], d: [f64; 2]) -> usize {
    // the highest nonvanishing finite difference of t ↦ u(p + t d) on integer nodes
    let vals: Vec<f64> = (0..8).map(|t| mode.u([p[0] + 0.1 * t as f64 * d[0], p[1] + 0.1 * t as f64 * d[1]])).collect();
    let mut diffs = vals;
    let mut degree = 0;
    for order in 1..8 {
        diffs = diffs.windows(2).map(|w| w[1] - w[0]).collect();
        if diffs.iter().any(|v| v.abs() > 1e-10) {
            degree = order;
        }
    }
    degree
}

#[test]
fn degree_four_disk_modes_are_independent() {
    let modes: Vec<_> = disk_modes::<f64>(4).into_iter().filter(|m| m.index().1 == 4).collect();
    assert_eq!(modes.len(), 3);
    for m in &modes {
        assert_eq!(degree_along_line(m, [-0.3, -0.2], [0.6, 0.8]), 4);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let pts: Vec<[f64; 2]> = (0..20).map(|_| [rng.gen_range(-0.7..0.7), rng.gen_range(-0.7..0.7)]).collect();
    let v = DMatrix::from_fn(20, 3, |i, j| modes[j].u(pts[i]));
    let sv = v.singular_values();
    assert!(sv.min() > 1e-3 * sv.max());
}

/// `⟨∇u_i, ∇u_j⟩` over the unit disk by a polar midpoint rule.
fn midpoint_gram(modes: &[&EigenMode]) -> DMatrix<f64> {
    let (nr, nt) = (600, 256);
    let mut g = DMatrix::zeros(modes.len(), modes.len());
    for i in 0..nr {
        let r = (i as f64 + 0.5) / nr as f64;
        for j in 0..nt {
            let t = 2.0 * PI * j as f64 / nt as f64;
            let x = [r * t.cos(), r * t.sin()];
            let w = r / nr as f64 * 2.0 * PI / nt as f64;
            let grads: Vec<[f64; 2]> = modes.iter().map(|m| m.gradient(x)).collect();
            for a in 0..modes.len() {
                for b in 0..modes.len() {
                    g[(a, b)] += w * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
                }
            }
        }
    }
    g
}

#[test]
fn disk_degree_blocks_have_nonsingular_gram() {
    let all = disk_modes::<f64>(12);
    for n in 2..=12 {
        let block: Vec<&EigenMode> = all.iter().filter(|m| m.index().1 == n).collect();
        assert_eq!(block.len(), n as usize - 1);
        let g = midpoint_gram(&block);
        let sv = g.singular_values();
        let cond = sv.max() / sv.min();
        assert!(cond.is_finite() && cond < 1e8, "N = {n}: cond {cond:e}");
    }
}

#[test]
fn disk_gram_matches_independent_quadrature() {
    // modes with equal k/N form one group, e.g. (1,2), (2,4), (3,6)
    let set = ModeSet::new(disk_modes::<f64>(6));
    let group = set.groups().iter().find(|g| g.key == SpectralKey::Disk(Ratio::new(1, 2))).unwrap();
    assert_eq!(group.members.len(), 3);
    let members: Vec<&EigenMode> = group.members.iter().map(|&i| &set.modes()[i]).collect();
    let oracle = midpoint_gram(&members);
    for a in 0..3 {
        for b in 0..3 {
            let got = group.gram[a * 3 + b];
            assert!((got - oracle[(a, b)]).abs() < 1e-4 * oracle[(a, a)].abs(), "({a},{b}) {got} vs {}", oracle[(a, b)]);
        }
    }
}

#[test]
fn eigen_residuals_on_grid() {
    let mut modes = square_modes::<f64>(12);
    modes.extend(disk_modes::<f64>(12));
    modes.extend(rectangle_modes::<f64>(8, 2.0, 0.5).unwrap());
    let tilt = [[3f64.sqrt(), -0.5], [1.0, 3f64.sqrt() / 2.0]];
    modes.extend(transported_disk_modes(tilt, [0.2, -0.1], 8).unwrap());
    for m in &modes {
        assert!(grid_residual(m) <= 1e-9, "{} {:?}: {:e}", m.domain_tag(), m.index(), grid_residual(m));
        assert!(boundary_defect(m) <= 1e-10, "{} {:?}: {:e}", m.domain_tag(), m.index(), boundary_defect(m));
    }
}

#[test]
fn rectangle_eigenvalues_follow_the_scaled_ratio() {
    let (a, b) = (2.0, 0.5);
    for m in rectangle_modes::<f64>(6, a, b).unwrap() {
        let (k1, k2) = m.index();
        let (p, q) = (k1 as f64 / a, k2 as f64 / b);
        assert!((m.eigenvalue - q * q / (p * p + q * q)).abs() < 1e-14);
        assert!((fd_eigenvalue(&m, [0.37, 0.11]) - m.eigenvalue).abs() < 1e-5);
        // rotation number of the rectangle at this frequency is rational
        let r = rectangle_rotation_number(m.lambda(), a, b);
        let cf = continued_fraction(r, 20).unwrap();
        assert!(cf.rational);
    }
}

#[test]
fn ellipse_map_examples() {
    let id = [[1.0f64, 0.0], [0.0, 1.0]];
    let m = map_ellipse(id, [0.0, 0.0], 0.37).unwrap();
    assert!((m.sigma - 0.37).abs() < 1e-15 && (m.c - 1.0).abs() < 1e-15 && m.rotation_angle.abs() < 1e-15);

    let (a, b, l) = (2.0f64, 0.7, 0.45);
    let m = map_ellipse([[a, 0.0], [0.0, b]], [1.0, 1.0], l).unwrap();
    let c = l * l / (a * a) + (1.0 - l * l) / (b * b);
    assert!((m.c - c).abs() < 1e-13);
    assert!((m.sigma * m.sigma - l * l / (a * a) / c).abs() < 1e-14);
    assert!(m.rotation_angle.abs() < 1e-15);

    assert!(matches!(map_ellipse([[1.0, 2.0], [2.0, 4.0]], [0.0; 2], 0.5), Err(Error::SingularMatrix)));
}

#[test]
fn tilted_ellipse_modes() {
    let (s, c) = (PI / 6.0).sin_cos();
    let a = [[2.0 * c, -s], [2.0 * s, c]];
    let t = EllipseTransport::new(a, [0.0, 0.0]).unwrap();
    for (k, n) in [(1, 2), (1, 3), (2, 5)] {
        let m = t.mode(k, n).unwrap();
        assert!((t.sigma(m.lambda()) - disk_lambda::<f64>(k, n)).abs() < 1e-13);
        assert!(grid_residual(&m) < 1e-12);
        for j in 0..400 {
            let th = 2.0 * PI * j as f64 / 400.0;
            let x = [a[0][0] * th.cos() + a[0][1] * th.sin(), a[1][0] * th.cos() + a[1][1] * th.sin()];
            assert!(m.u(x).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ellipse_coefficients_reduce_the_operator(
        a11 in 0.5f64..2.0, a22 in 0.5f64..2.0, a12 in -0.4f64..0.4, a21 in -0.4f64..0.4, lambda in 0.05f64..0.95,
    ) {
        let a = [[a11, a12], [a21, a22]];
        let m = map_ellipse(a, [0.0; 2], lambda).unwrap();
        // J M Jᵀ with J = R A⁻¹ must equal c·diag(-σ², 1-σ²)
        let det = a11 * a22 - a12 * a21;
        let ai = [[a22 / det, -a12 / det], [-a21 / det, a11 / det]];
        let r = m.rotation;
        let j = [
            [r[0][0] * ai[0][0] + r[0][1] * ai[1][0], r[0][0] * ai[0][1] + r[0][1] * ai[1][1]],
            [r[1][0] * ai[0][0] + r[1][1] * ai[1][0], r[1][0] * ai[0][1] + r[1][1] * ai[1][1]],
        ];
        let diag = [-lambda * lambda, 1.0 - lambda * lambda];
        let b = |p: usize, q: usize| j[p][0] * diag[0] * j[q][0] + j[p][1] * diag[1] * j[q][1];
        let s2 = m.sigma * m.sigma;
        prop_assert!((b(0, 0) + m.c * s2).abs() < 1e-12 * m.c);
        prop_assert!((b(1, 1) - m.c * (1.0 - s2)).abs() < 1e-12 * m.c);
        prop_assert!(b(0, 1).abs() < 1e-12 * m.c);
        prop_assert!(m.rotation_angle.abs() <= FRAC_PI_4 * 2.0 + 1e-15);
    }
}

#[test]
fn spectral_measure_examples() {
    let pi2 = PI * PI;
    let set = ModeSet::new(square_modes::<f64>(8));
    let f = |p: [f64; 2]| (PI * p[0]).sin() * (PI * p[1]).sin();
    let h = spectral_measure(Forcing::Function(&f), &set, &Default::default()).unwrap();
    let heavy: Vec<_> = h.atoms.iter().filter(|a| a.mass > 1e-20).collect();
    assert_eq!(heavy.len(), 1);
    assert_eq!(heavy[0].exact_position(), Some(Ratio::new(1, 2)));
    assert!((heavy[0].mass - 1.0 / (8.0 * pi2)).abs() < 1e-14);
    assert!(h.interval_mass(0.5, 1e-9) >= heavy[0].mass);

    let zero = |_: [f64; 2]| 0.0;
    let h = spectral_measure(Forcing::Function(&zero), &set, &Default::default()).unwrap();
    assert!(h.is_empty() && h.total_mass == 0.0);

    let pair = ModeSet::new(vec![square_mode::<f64>(1, 1), square_mode(1, 2)]);
    let h = spectral_measure(Forcing::Coefficients(&[1.0, 1.0]), &pair, &Default::default()).unwrap();
    assert_eq!(h.atoms.len(), 2);
    assert!((h.atoms[0].position - 0.5).abs() < 1e-15 && (h.atoms[0].mass - 1.0 / (8.0 * pi2)).abs() < 1e-15);
    assert!((h.atoms[1].position - 0.8).abs() < 1e-15 && (h.atoms[1].mass - 1.0 / (20.0 * pi2)).abs() < 1e-15);
}

#[test]
fn square_total_mass_converges_to_the_h_minus_one_norm() {
    // f = -Δv with v = x₁(1-x₁)x₂(1-x₂), so ‖f‖²_{H⁻¹} = ‖∇v‖² = 1/45
    let f = |p: [f64; 2]| 2.0 * (p[0] * (1.0 - p[0]) + p[1] * (1.0 - p[1]));
    let exact = 1.0 / 45.0;
    let opts = ProjectionOptions { tail_tolerance: None, ..Default::default() };
    let mut prev = 0.0;
    for k in [4u32, 16, 64] {
        let h = spectral_measure(Forcing::Function(&f), &ModeSet::new(square_modes(k)), &opts).unwrap();
        assert!(h.atoms.iter().all(|a| a.mass >= 0.0));
        assert!(h.total_mass <= exact * (1.0 + 1e-12) && h.total_mass >= prev);
        prev = h.total_mass;
    }
    assert!(exact - prev < 1e-6, "{}", exact - prev);
}

#[test]
fn disk_total_mass_is_exact_for_polynomial_forcing() {
    // v = (1 - r²)² lies in the span of modes with N ≤ 4; f = -Δv = 8 - 16r², ‖∇v‖² = 4π/3
    let f = |p: [f64; 2]| 8.0 - 16.0 * (p[0] * p[0] + p[1] * p[1]);
    let h = spectral_measure(Forcing::Function(&f), &ModeSet::new(disk_modes(6)), &Default::default()).unwrap();
    assert!((h.total_mass - 4.0 * PI / 3.0).abs() < 1e-11, "{}", h.total_mass);
    // v is even in both variables, which only the k/N = 1/2 space and k/N = 1/4, 3/4 reach
    assert!(h.atoms.iter().filter(|a| a.mass > 1e-20).all(|a| {
        matches!(a.key, SpectralKey::Disk(r) if *r.denom() == 2 || *r.denom() == 4)
    }));
}

#[test]
fn ellipse_total_mass_matches_the_transported_oracle() {
    // v = (1 - |A⁻¹x|²)² on the ellipse A·D; ‖∇v‖² = |det A| ∫_D |A⁻ᵀ∇w|²
    let a = [[1.5, 0.3], [-0.2, 0.8]];
    let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
    let ai = [[a[1][1] / det, -a[0][1] / det], [-a[1][0] / det, a[0][0] / det]];
    let q = |x: [f64; 2]| [ai[0][0] * x[0] + ai[0][1] * x[1], ai[1][0] * x[0] + ai[1][1] * x[1]];
    // Δ_x of w(Bx) is tr(Bᵀ H_w B) with H_w = ∇²(1-|y|²)² = -4(1-|y|²)I + 8yyᵀ
    let f = move |x: [f64; 2]| {
        let y = q(x);
        let s = 1.0 - y[0] * y[0] - y[1] * y[1];
        let mut lap = 0.0;
        for col in 0..2 {
            let bc = [ai[0][col], ai[1][col]];
            let yb = y[0] * bc[0] + y[1] * bc[1];
            lap += -4.0 * s * (bc[0] * bc[0] + bc[1] * bc[1]) + 8.0 * yb * yb;
        }
        -lap
    };
    let mut oracle = 0.0;
    let (nr, nt) = (800, 256);
    for i in 0..nr {
        let r = (i as f64 + 0.5) / nr as f64;
        for j in 0..nt {
            let t = 2.0 * PI * j as f64 / nt as f64;
            let y = [r * t.cos(), r * t.sin()];
            let s = 1.0 - r * r;
            let gw = [-4.0 * s * y[0], -4.0 * s * y[1]];
            let gx = [ai[0][0] * gw[0] + ai[1][0] * gw[1], ai[0][1] * gw[0] + ai[1][1] * gw[1]];
            oracle += (gx[0] * gx[0] + gx[1] * gx[1]) * r / nr as f64 * 2.0 * PI / nt as f64 * det.abs();
        }
    }
    let set = ModeSet::new(transported_disk_modes(a, [0.0, 0.0], 6).unwrap());
    let h = spectral_measure(Forcing::Function(&f), &set, &Default::default()).unwrap();
    assert!((h.total_mass - oracle).abs() < 1e-5 * oracle, "{} vs {oracle}", h.total_mass);
}

#[test]
fn diophantine_denominator_bound_on_the_square() {
    let lambda = square_rotation_to_lambda(GOLDEN);
    assert!(continued_fraction(GOLDEN, 30).unwrap().score <= 0.1);
    let l2 = lambda * lambda;
    // running minima of the denominator over |k|
    let mut pts: Vec<(f64, f64)> = Vec::new();
    for k1 in 1..=200i64 {
        for k2 in 1..=200i64 {
            let norm = ((k1 * k1 + k2 * k2) as f64).sqrt();
            if norm <= 200.0 {
                pts.push((norm, (l2 * (k1 * k1) as f64 - (1.0 - l2) * (k2 * k2) as f64).abs()));
            }
        }
    }
    pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut best = f64::INFINITY;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &(n, d) in &pts {
        if d < best {
            best = d;
            xs.push(n.ln());
            ys.push(-d.ln());
        }
    }
    let (slope, _) = internal_waves::linalg::linear_fit(&xs, &ys).unwrap();
    let c = pts.iter().map(|&(n, d)| d * n.powf(slope)).fold(f64::INFINITY, f64::min);
    // 1 + β with β small, and a positive constant
    assert!(slope < 1.2, "{slope}");
    assert!(c > 1e-2, "{c}");
    assert!(pts.iter().all(|&(n, d)| d >= c / n.powf(slope) * (1.0 - 1e-12)));
}

#[test]
fn eigenvalues_are_dense() {
    let mut ev: Vec<f64> = square_modes::<f64>(100).iter().map(|m| m.eigenvalue).collect();
    for n in 2..=100u32 {
        for k in 1..n {
            ev.push(disk_lambda::<f64>(k, n).powi(2));
        }
    }
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev.dedup();
    let inner: Vec<f64> = ev.into_iter().filter(|&e| e > 0.0 && e < 1.0).collect();
    let mut gaps = inner.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    gaps = gaps.max(inner[0]).max(1.0 - inner[inner.len() - 1]);
    assert!(gaps < 0.01, "largest gap {gaps}");
}
