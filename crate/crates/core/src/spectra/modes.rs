use num_rational::Ratio;
use rayon::prelude::*;

use super::disk::chebyshev;
use crate::linalg::gauss_legendre_interval;
use crate::scalar::{from_usize, lit, tau, Scalar};

/// Exact label of an eigenvalue, used to aggregate coincident eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SpectralKey {
    /// Square mode: the eigenvalue `k₂²/|k|²` itself.
    Square(Ratio<u64>),
    /// Rectangle mode, labelled by the eigenvalue of the square mode with the same index ratio.
    Rectangle(Ratio<u64>),
    /// Disk mode, labelled by its rotation number `k/N`.
    Disk(Ratio<u64>),
    /// Transported disk mode, labelled by the rotation number `k/N` of the disk mode.
    Ellipse(Ratio<u64>),
}

impl SpectralKey {
    /// The eigenvalue as an exact fraction when it is rational.
    pub fn exact_eigenvalue(&self) -> Option<Ratio<u64>> {
        match *self {
            SpectralKey::Square(r) => Some(r),
            // sin²(πr/2) is rational only for r ∈ {1/3, 1/2, 2/3} inside (0, 1)
            SpectralKey::Disk(r) => match (*r.numer(), *r.denom()) {
                (1, 2) => Some(Ratio::new(1, 2)),
                (1, 3) => Some(Ratio::new(1, 4)),
                (2, 3) => Some(Ratio::new(3, 4)),
                _ => None,
            },
            SpectralKey::Rectangle(_) | SpectralKey::Ellipse(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModeShape<T> {
    /// `sin(πk₁x₁) sin(πk₂x₂)` on `[0, 1]²`.
    Square { k1: u32, k2: u32 },
    /// `sin(πk₁x₁/a) sin(πk₂x₂/b)` on `[0, a] × [0, b]`.
    Rectangle { k1: u32, k2: u32, width: T, height: T },
    /// `T_N(x₁ cos α + x₂ sin α) - (-1)^k T_N(x₁ cos α - x₂ sin α)`, `α = πk/(2N)`, on the unit disk.
    Disk { k: u32, n: u32 },
    /// Disk mode composed with `x ↦ J(x - v)`.
    Transported { k: u32, n: u32, jac: [[T; 2]; 2], shift: [T; 2], det_abs: T },
}

/// One eigenpair: `u` vanishes on the boundary and `(1-e)∂²₂u - e∂²₁u = 0`.
///
/// The forcing profile is `φ = -Δu / D`; for sine modes `φ = u`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenMode<T> {
    pub shape: ModeShape<T>,
    pub eigenvalue: T,
    pub key: SpectralKey,
    /// `D` with `φ = -Δu / D`.
    pub delta_scale: T,
    /// `‖∇u‖²_{L²}` when known in closed form.
    pub h10_norm_sq: Option<T>,
}

impl<T: Scalar> EigenMode<T> {
    /// `√eigenvalue`.
    pub fn lambda(&self) -> T {
        self.eigenvalue.sqrt()
    }

    /// `u`, `∇u` and the Hessian `[u₁₁, u₁₂, u₂₂]` at `x`.
    pub fn jet(&self, x: [T; 2]) -> (T, [T; 2], [T; 3]) {
        match &self.shape {
            ModeShape::Square { k1, k2 } => sine_jet(x, *k1, *k2, T::one(), T::one()),
            ModeShape::Rectangle { k1, k2, width, height } => sine_jet(x, *k1, *k2, *width, *height),
            ModeShape::Disk { k, n } => disk_jet(x, *k, *n),
            ModeShape::Transported { k, n, jac, shift, .. } => {
                let d = [x[0] - shift[0], x[1] - shift[1]];
                let y = [jac[0][0] * d[0] + jac[0][1] * d[1], jac[1][0] * d[0] + jac[1][1] * d[1]];
                let (u, g, h) = disk_jet(y, *k, *n);
                let gx = [
                    jac[0][0] * g[0] + jac[1][0] * g[1],
                    jac[0][1] * g[0] + jac[1][1] * g[1],
                ];
                // Jᵀ H J
                let hy = [[h[0], h[1]], [h[1], h[2]]];
                let mut hx = [[T::zero(); 2]; 2];
                for a in 0..2 {
                    for b in 0..2 {
                        let mut s = T::zero();
                        for i in 0..2 {
                            for j in 0..2 {
                                s += jac[i][a] * hy[i][j] * jac[j][b];
                            }
                        }
                        hx[a][b] = s;
                    }
                }
                (u, gx, [hx[0][0], hx[0][1], hx[1][1]])
            }
        }
    }

    pub fn u(&self, x: [T; 2]) -> T {
        self.jet(x).0
    }

    pub fn gradient(&self, x: [T; 2]) -> [T; 2] {
        self.jet(x).1
    }

    /// `w = Δu`, an eigenfunction of the zeroth-order operator.
    pub fn w(&self, x: [T; 2]) -> T {
        let h = self.jet(x).2;
        h[0] + h[2]
    }

    /// `φ = -Δu / D`, the profile in which forcing coefficients are expressed.
    pub fn forcing_profile(&self, x: [T; 2]) -> T {
        -self.w(x) / self.delta_scale
    }

    /// `(1 - e)∂²₂u - e∂²₁u` at `x`, which vanishes for an exact eigenpair.
    pub fn stationary_residual(&self, x: [T; 2]) -> T {
        let h = self.jet(x).2;
        (T::one() - self.eigenvalue) * h[2] - self.eigenvalue * h[0]
    }

    /// `(k₁, k₂)` or `(k, N)`.
    pub fn index(&self) -> (u32, u32) {
        match self.shape {
            ModeShape::Square { k1, k2 } | ModeShape::Rectangle { k1, k2, .. } => (k1, k2),
            ModeShape::Disk { k, n } | ModeShape::Transported { k, n, .. } => (k, n),
        }
    }

    pub fn domain_tag(&self) -> &'static str {
        match self.shape {
            ModeShape::Square { .. } => "square",
            ModeShape::Rectangle { .. } => "rectangle",
            ModeShape::Disk { .. } => "disk",
            ModeShape::Transported { .. } => "transported",
        }
    }

    /// Boundary point at parameter `s ∈ [0, 1)`, for boundary-vanishing checks.
    pub fn boundary_point(&self, s: T) -> [T; 2] {
        match &self.shape {
            ModeShape::Square { .. } => rectangle_boundary(s, T::one(), T::one()),
            ModeShape::Rectangle { width, height, .. } => rectangle_boundary(s, *width, *height),
            ModeShape::Disk { .. } => {
                let a = tau::<T>() * s;
                [a.cos(), a.sin()]
            }
            ModeShape::Transported { jac, shift, .. } => {
                let a = tau::<T>() * s;
                let y = [a.cos(), a.sin()];
                let inv = invert2(jac);
                [
                    inv[0][0] * y[0] + inv[0][1] * y[1] + shift[0],
                    inv[1][0] * y[0] + inv[1][1] * y[1] + shift[1],
                ]
            }
        }
    }

    /// Whether `x` lies in the closed domain of the mode.
    pub fn domain_contains(&self, x: [T; 2]) -> bool {
        match &self.shape {
            ModeShape::Square { .. } => in_box(x, T::one(), T::one()),
            ModeShape::Rectangle { width, height, .. } => in_box(x, *width, *height),
            ModeShape::Disk { .. } => x[0] * x[0] + x[1] * x[1] <= T::one(),
            ModeShape::Transported { jac, shift, .. } => {
                let d = [x[0] - shift[0], x[1] - shift[1]];
                let y = [jac[0][0] * d[0] + jac[0][1] * d[1], jac[1][0] * d[0] + jac[1][1] * d[1]];
                y[0] * y[0] + y[1] * y[1] <= T::one()
            }
        }
    }

    /// Bounding box of the domain.
    pub fn bounding_box(&self) -> ([T; 2], [T; 2]) {
        match &self.shape {
            ModeShape::Square { .. } => ([T::zero(); 2], [T::one(); 2]),
            ModeShape::Rectangle { width, height, .. } => ([T::zero(); 2], [*width, *height]),
            ModeShape::Disk { .. } => ([-T::one(); 2], [T::one(); 2]),
            ModeShape::Transported { jac, shift, .. } => {
                let inv = invert2(jac);
                let ex = (inv[0][0] * inv[0][0] + inv[0][1] * inv[0][1]).sqrt();
                let ey = (inv[1][0] * inv[1][0] + inv[1][1] * inv[1][1]).sqrt();
                ([shift[0] - ex, shift[1] - ey], [shift[0] + ex, shift[1] + ey])
            }
        }
    }

    /// `1/‖φ‖_{H⁻¹}`; for the square this is `2π|k|`.
    pub fn kappa(&self, h10_norm_sq: T) -> T {
        self.delta_scale / h10_norm_sq.sqrt()
    }
}

fn in_box<T: Scalar>(x: [T; 2], a: T, b: T) -> bool {
    x[0] >= T::zero() && x[0] <= a && x[1] >= T::zero() && x[1] <= b
}

fn rectangle_boundary<T: Scalar>(s: T, a: T, b: T) -> [T; 2] {
    let four = lit::<T>(4.0);
    let t = (s - s.floor()) * four;
    let side = t.floor();
    let f = t - side;
    match side.to_u8().unwrap_or(0) {
        0 => [a * f, T::zero()],
        1 => [a, b * f],
        2 => [a * (T::one() - f), b],
        _ => [T::zero(), b * (T::one() - f)],
    }
}

pub(crate) fn invert2<T: Scalar>(m: &[[T; 2]; 2]) -> [[T; 2]; 2] {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]]
}

fn sine_jet<T: Scalar>(x: [T; 2], k1: u32, k2: u32, a: T, b: T) -> (T, [T; 2], [T; 3]) {
    let w1 = T::PI() * lit::<T>(k1 as f64) / a;
    let w2 = T::PI() * lit::<T>(k2 as f64) / b;
    let (s1, c1) = (w1 * x[0]).sin_cos();
    let (s2, c2) = (w2 * x[1]).sin_cos();
    let u = s1 * s2;
    (u, [w1 * c1 * s2, w2 * s1 * c2], [-w1 * w1 * u, w1 * w2 * c1 * c2, -w2 * w2 * u])
}

fn disk_jet<T: Scalar>(x: [T; 2], k: u32, n: u32) -> (T, [T; 2], [T; 3]) {
    let alpha = T::PI() * lit::<T>(k as f64) / lit::<T>(2.0 * n as f64);
    let (sa, ca) = alpha.sin_cos();
    let sgn = if k.is_multiple_of(2) { T::one() } else { -T::one() };
    let xp = x[0] * ca + x[1] * sa;
    let xm = x[0] * ca - x[1] * sa;
    let (tp, dp, ddp) = chebyshev(n, xp);
    let (tm, dm, ddm) = chebyshev(n, xm);
    let u = tp - sgn * tm;
    let g = [ca * (dp - sgn * dm), sa * (dp + sgn * dm)];
    let h = [ca * ca * (ddp - sgn * ddm), ca * sa * (ddp + sgn * ddm), sa * sa * (ddp - sgn * ddm)];
    (u, g, h)
}

/// Modes sharing one eigenvalue, with the Gram matrix `⟨∇u_i, ∇u_j⟩` of its members.
#[derive(Clone, Debug)]
pub struct ModeGroup<T> {
    pub key: SpectralKey,
    pub position: T,
    pub members: Vec<usize>,
    /// Row-major `⟨∇u_i, ∇u_j⟩_{L²}` over `members`.
    pub gram: Vec<T>,
}

/// A list of modes grouped by eigenvalue, with the H¹₀ Gram matrix of every group.
#[derive(Clone, Debug)]
pub struct ModeSet<T> {
    modes: Vec<EigenMode<T>>,
    groups: Vec<ModeGroup<T>>,
}

/// Radial Gauss–Legendre nodes used for disk quadrature.
pub(crate) const DISK_RADIAL_NODES: usize = 64;

/// Polar quadrature on the unit disk: `(points, weights)`.
pub(crate) fn disk_quadrature<T: Scalar>(radial: usize, angular: usize) -> (Vec<[T; 2]>, Vec<T>) {
    let (r, wr) = gauss_legendre_interval::<T>(radial, T::zero(), T::one());
    let mut pts = Vec::with_capacity(radial * angular);
    let mut wts = Vec::with_capacity(radial * angular);
    let dtheta = tau::<T>() / from_usize::<T>(angular);
    for (&ri, &wi) in r.iter().zip(&wr) {
        for j in 0..angular {
            let a = dtheta * from_usize::<T>(j);
            pts.push([ri * a.cos(), ri * a.sin()]);
            wts.push(wi * ri * dtheta);
        }
    }
    (pts, wts)
}

impl<T: Scalar> ModeSet<T> {
    /// Groups `modes` by key and computes each group's Gram matrix
    /// (closed form for sine modes, polar quadrature otherwise).
    pub fn new(modes: Vec<EigenMode<T>>) -> Self {
        let mut order: Vec<usize> = (0..modes.len()).collect();
        order.sort_by(|&a, &b| modes[a].key.cmp(&modes[b].key).then(a.cmp(&b)));
        let mut buckets: Vec<Vec<usize>> = Vec::new();
        for idx in order {
            match buckets.last_mut() {
                Some(last) if modes[last[0]].key == modes[idx].key => last.push(idx),
                _ => buckets.push(vec![idx]),
            }
        }
        let max_degree = modes
            .iter()
            .filter_map(|m| match m.shape {
                ModeShape::Disk { n, .. } | ModeShape::Transported { n, .. } => Some(n as usize),
                _ => None,
            })
            .max()
            .unwrap_or(0);
        let quad = (max_degree > 0).then(|| disk_quadrature::<T>(DISK_RADIAL_NODES, (2 * max_degree + 4).max(128)));
        let groups = buckets
            .into_par_iter()
            .map(|members| {
                let m = members.len();
                let mut gram = vec![T::zero(); m * m];
                let closed: Option<Vec<T>> = members.iter().map(|&i| modes[i].h10_norm_sq).collect();
                if let Some(norms) = closed {
                    // sine modes are mutually orthogonal
                    for (i, v) in norms.into_iter().enumerate() {
                        gram[i * m + i] = v;
                    }
                } else {
                    let (pts, wts) = quad.as_ref().expect("quadrature for polynomial modes");
                    gram = polar_gram(&members.iter().map(|&i| &modes[i]).collect::<Vec<_>>(), pts, wts);
                }
                let first = &modes[members[0]];
                ModeGroup { key: first.key, position: first.eigenvalue, members, gram }
            })
            .collect();
        Self { modes, groups }
    }

    pub fn modes(&self) -> &[EigenMode<T>] {
        &self.modes
    }

    pub fn groups(&self) -> &[ModeGroup<T>] {
        &self.groups
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    /// `Σ_G aᵀ Gram_G a`, the squared H¹₀ norm of `Σ a_j u_j`.
    pub fn energy(&self, coeffs: &[T]) -> T {
        let mut e = T::zero();
        for g in &self.groups {
            let m = g.members.len();
            for (i, &a) in g.members.iter().enumerate() {
                let ca = coeffs[a];
                if ca == T::zero() {
                    continue;
                }
                for (j, &b) in g.members.iter().enumerate() {
                    e += ca * g.gram[i * m + j] * coeffs[b];
                }
            }
        }
        e
    }
}

/// Gram matrix of gradients over a disk-based quadrature, mapping back through
/// the transport for transported modes.
fn polar_gram<T: Scalar>(modes: &[&EigenMode<T>], pts: &[[T; 2]], wts: &[T]) -> Vec<T> {
    let m = modes.len();
    let mut gram = vec![T::zero(); m * m];
    for (p, &w) in pts.iter().zip(wts) {
        let grads: Vec<[T; 2]> = modes
            .iter()
            .map(|mode| match &mode.shape {
                ModeShape::Transported { k, n, jac, det_abs, .. } => {
                    // ∫_Ω ∇u_i·∇u_j dx = |det A| ∫_D (Jᵀg_i)·(Jᵀg_j) dy
                    let g = disk_jet(*p, *k, *n).1;
                    let s = det_abs.sqrt();
                    [
                        s * (jac[0][0] * g[0] + jac[1][0] * g[1]),
                        s * (jac[0][1] * g[0] + jac[1][1] * g[1]),
                    ]
                }
                _ => mode.gradient(*p),
            })
            .collect();
        for i in 0..m {
            for j in i..m {
                let v = w * (grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1]);
                gram[i * m + j] += v;
                if i != j {
                    gram[j * m + i] += v;
                }
            }
        }
    }
    gram
}
