use num_rational::Ratio;
use rayon::prelude::*;

use super::modes::{disk_quadrature, EigenMode, ModeSet, ModeShape, SpectralKey};
use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::linalg::{gauss_legendre_interval, linear_fit, lu_solve};
use crate::scalar::{lit, to_f64, Scalar};

/// Forcing data to be expanded in a mode set.
#[derive(Clone, Copy)]
pub enum Forcing<'a, T> {
    /// Coefficients `F_j` with `f = Σ F_j φ_j`, one per mode of the set.
    Coefficients(&'a [T]),
    /// A function on the domain, integrated by quadrature.
    Function(&'a (dyn Fn([T; 2]) -> T + Sync)),
    /// Grid samples (or the grid's evaluator), integrated by quadrature.
    Grid(&'a GridFunction<T>),
}

impl<T> Forcing<'_, T> {
    fn tag(&self) -> &'static str {
        match self {
            Forcing::Coefficients(_) => "coefficients",
            Forcing::Function(_) => "function",
            Forcing::Grid(_) => "grid",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProjectionOptions<T> {
    /// Quadrature nodes per direction; chosen from the mode cutoff when absent.
    pub nodes: Option<usize>,
    /// Largest admissible relative mass in the outer quarter of the cutoff.
    pub tail_tolerance: Option<T>,
}

/// Expansion `f ≈ Σ F_j φ_j` of a forcing in a mode set.
#[derive(Clone, Debug)]
pub struct Projection<T> {
    pub coefficients: Vec<T>,
    /// Squared H⁻¹ norm of the projection, per group in set order.
    pub group_mass: Vec<T>,
    pub total_mass: T,
    /// Relative mass carried by modes in the outer quarter of the index range.
    pub tail: T,
}

/// One atom of a spectral measure.
#[derive(Clone, Debug, PartialEq)]
pub struct Atom<T> {
    pub key: SpectralKey,
    pub position: T,
    pub mass: T,
}

impl<T: Scalar> Atom<T> {
    pub fn exact_position(&self) -> Option<Ratio<u64>> {
        self.key.exact_eigenvalue()
    }
}

/// Atoms of `μ_f` sorted by position, with the total mass and the cutoff used.
#[derive(Clone, Debug)]
pub struct SpectralMeasureHistogram<T> {
    pub atoms: Vec<Atom<T>>,
    pub total_mass: T,
    pub modes: usize,
    pub source: String,
    pub tail: T,
}

/// Interval masses over a range of half-widths and their log-log slope.
#[derive(Clone, Debug)]
pub struct EpsilonSweep<T> {
    pub center: T,
    pub epsilons: Vec<T>,
    pub masses: Vec<T>,
    /// Fitted slope of `log mass` against `log ε` over nonzero masses.
    pub slope: Option<T>,
}

fn index_level<T>(m: &EigenMode<T>) -> u32 {
    match m.shape {
        ModeShape::Square { k1, k2 } | ModeShape::Rectangle { k1, k2, .. } => k1.max(k2),
        ModeShape::Disk { n, .. } | ModeShape::Transported { n, .. } => n,
    }
}

/// `b_j = ∫ f u_j / D_j` for every mode, by tensor or polar quadrature.
fn load_vector<T: Scalar>(f: &(dyn Fn([T; 2]) -> T + Sync), modes: &[EigenMode<T>], nodes: Option<usize>) -> Result<Vec<T>> {
    let cutoff = modes.iter().map(index_level).max().unwrap_or(0) as usize;
    match modes[0].shape {
        ModeShape::Square { .. } | ModeShape::Rectangle { .. } => {
            let (w, h) = match modes[0].shape {
                ModeShape::Rectangle { width, height, .. } => (width, height),
                _ => (T::one(), T::one()),
            };
            let n = nodes.unwrap_or((2 * cutoff + 64).max(128));
            let (x, wx) = gauss_legendre_interval(n, T::zero(), w);
            let (y, wy) = gauss_legendre_interval(n, T::zero(), h);
            // weighted samples, row i ↔ x_i
            let fv: Vec<T> = (0..n * n)
                .into_par_iter()
                .map(|idx| {
                    let (i, j) = (idx / n, idx % n);
                    f([x[i], y[j]]) * wx[i] * wy[j]
                })
                .collect();
            let sines = |pts: &[T], len: T| -> Vec<T> {
                let mut s = vec![T::zero(); cutoff * n];
                for k in 1..=cutoff {
                    let om = T::PI() * lit::<T>(k as f64) / len;
                    for (i, &p) in pts.iter().enumerate() {
                        s[(k - 1) * n + i] = (om * p).sin();
                    }
                }
                s
            };
            let s1 = sines(&x, w);
            let s2 = sines(&y, h);
            // G = S1 · F, then C = G · S2ᵀ
            let g: Vec<Vec<T>> = (0..cutoff)
                .into_par_iter()
                .map(|k| {
                    let mut row = vec![T::zero(); n];
                    for i in 0..n {
                        let a = s1[k * n + i];
                        for j in 0..n {
                            row[j] += a * fv[i * n + j];
                        }
                    }
                    row
                })
                .collect();
            let c: Vec<Vec<T>> = g
                .par_iter()
                .map(|row| (0..cutoff).map(|k| (0..n).fold(T::zero(), |acc, j| acc + row[j] * s2[k * n + j])).collect())
                .collect();
            modes
                .iter()
                .map(|m| match m.shape {
                    ModeShape::Square { k1, k2 } | ModeShape::Rectangle { k1, k2, .. } => {
                        Ok(c[k1 as usize - 1][k2 as usize - 1] / m.delta_scale)
                    }
                    _ => Err(Error::UnsupportedDomain("mixed mode families".into())),
                })
                .collect()
        }
        ModeShape::Disk { .. } | ModeShape::Transported { .. } => {
            let (a, v, det) = match modes[0].shape {
                ModeShape::Transported { jac, shift, det_abs, .. } => {
                    let inv = super::modes::invert2(&jac);
                    (inv, shift, det_abs)
                }
                _ => ([[T::one(), T::zero()], [T::zero(), T::one()]], [T::zero(); 2], T::one()),
            };
            let radial = nodes.unwrap_or((cutoff + 48).max(64));
            let angular = (2 * radial).max(2 * cutoff + 64);
            let (pts, wts) = disk_quadrature::<T>(radial, angular);
            // the ellipse is the image of the disk under any J⁻¹ of the family
            let xs: Vec<[T; 2]> = pts
                .iter()
                .map(|z| [a[0][0] * z[0] + a[0][1] * z[1] + v[0], a[1][0] * z[0] + a[1][1] * z[1] + v[1]])
                .collect();
            let fw: Vec<T> = xs.par_iter().zip(&wts).map(|(&p, &w)| f(p) * w * det).collect();
            modes
                .par_iter()
                .map(|m| match m.shape {
                    ModeShape::Disk { .. } | ModeShape::Transported { .. } => {
                        let s = xs.iter().zip(&fw).fold(T::zero(), |acc, (&p, &w)| acc + w * m.u(p));
                        Ok(s / m.delta_scale)
                    }
                    _ => Err(Error::UnsupportedDomain("mixed mode families".into())),
                })
                .collect()
        }
    }
}

/// `Φ_ij = ⟨φ_i, φ_j⟩_{H⁻¹}` for a group.
fn group_metric<T: Scalar>(set: &ModeSet<T>, gi: usize) -> Vec<T> {
    let g = &set.groups()[gi];
    let m = g.members.len();
    let mut phi = g.gram.clone();
    for i in 0..m {
        for j in 0..m {
            let di = set.modes()[g.members[i]].delta_scale;
            let dj = set.modes()[g.members[j]].delta_scale;
            phi[i * m + j] /= di * dj;
        }
    }
    phi
}

/// Expands `forcing` in `set`; masses are squared H⁻¹ norms of each eigenspace component.
pub fn project<T: Scalar>(forcing: Forcing<'_, T>, set: &ModeSet<T>, opts: &ProjectionOptions<T>) -> Result<Projection<T>> {
    let modes = set.modes();
    if modes.is_empty() {
        return Ok(Projection { coefficients: vec![], group_mass: vec![], total_mass: T::zero(), tail: T::zero() });
    }
    let n = modes.len();
    let mut coefficients = vec![T::zero(); n];
    let mut group_mass = vec![T::zero(); set.groups().len()];
    let load = match forcing {
        Forcing::Coefficients(c) => {
            if c.len() != n {
                return Err(Error::InvalidArgument(format!("expected {n} coefficients, got {}", c.len())));
            }
            coefficients.copy_from_slice(c);
            None
        }
        Forcing::Function(f) => Some(load_vector(f, modes, opts.nodes)?),
        Forcing::Grid(g) => {
            let f = |p: [T; 2]| g.value_at(p);
            Some(load_vector(&f, modes, opts.nodes)?)
        }
    };
    for (gi, g) in set.groups().iter().enumerate() {
        let phi = group_metric(set, gi);
        let m = g.members.len();
        match &load {
            Some(b) => {
                let bg: Vec<T> = g.members.iter().map(|&i| b[i]).collect();
                let fg = if m == 1 { vec![bg[0] / phi[0]] } else { lu_solve(&phi, &bg, m)? };
                group_mass[gi] = bg.iter().zip(&fg).fold(T::zero(), |a, (&x, &y)| a + x * y);
                for (&i, &v) in g.members.iter().zip(&fg) {
                    coefficients[i] = v;
                }
            }
            None => {
                let fg: Vec<T> = g.members.iter().map(|&i| coefficients[i]).collect();
                group_mass[gi] = crate::linalg::quadratic_form(&phi, &fg);
            }
        }
    }
    let total_mass = group_mass.iter().fold(T::zero(), |a, &b| a + b);
    let cutoff = modes.iter().map(index_level).max().unwrap_or(0);
    let outer = (3 * cutoff) / 4;
    let mut tail_mass = T::zero();
    for (gi, g) in set.groups().iter().enumerate() {
        let phi = group_metric(set, gi);
        let m = g.members.len();
        for (i, &j) in g.members.iter().enumerate() {
            if index_level(&modes[j]) > outer {
                tail_mass += coefficients[j] * coefficients[j] * phi[i * m + i];
            }
        }
    }
    let tail = if total_mass > T::zero() { tail_mass / total_mass } else { T::zero() };
    if let Some(tol) = opts.tail_tolerance {
        if tail > tol {
            return Err(Error::UnresolvedForcing { tail: to_f64(tail), tolerance: to_f64(tol) });
        }
    }
    Ok(Projection { coefficients, group_mass, total_mass, tail })
}

/// Spectral measure of `forcing` restricted to the eigenspaces of `set`.
pub fn spectral_measure<T: Scalar>(
    forcing: Forcing<'_, T>,
    set: &ModeSet<T>,
    opts: &ProjectionOptions<T>,
) -> Result<SpectralMeasureHistogram<T>> {
    let proj = project(forcing, set, opts)?;
    Ok(SpectralMeasureHistogram::from_projection(set, &proj, forcing.tag()))
}

impl<T: Scalar> SpectralMeasureHistogram<T> {
    pub fn from_projection(set: &ModeSet<T>, proj: &Projection<T>, source: &str) -> Self {
        let mut atoms: Vec<Atom<T>> = set
            .groups()
            .iter()
            .zip(&proj.group_mass)
            .filter(|(_, &m)| m != T::zero())
            .map(|(g, &m)| Atom { key: g.key, position: g.position, mass: m.max(T::zero()) })
            .collect();
        atoms.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap_or(std::cmp::Ordering::Equal));
        Self { atoms, total_mass: proj.total_mass, modes: set.len(), source: source.to_string(), tail: proj.tail }
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `μ_f([center - ε, center + ε])`.
    pub fn interval_mass(&self, center: T, eps: T) -> T {
        let lo = self.atoms.partition_point(|a| a.position < center - eps);
        self.atoms[lo..]
            .iter()
            .take_while(|a| a.position <= center + eps)
            .fold(T::zero(), |s, a| s + a.mass)
    }

    pub fn epsilon_sweep(&self, center: T, epsilons: &[T]) -> EpsilonSweep<T> {
        let masses: Vec<T> = epsilons.iter().map(|&e| self.interval_mass(center, e)).collect();
        let (lx, ly): (Vec<T>, Vec<T>) = epsilons
            .iter()
            .zip(&masses)
            .filter(|(_, &m)| m > T::zero())
            .map(|(&e, &m)| (e.ln(), m.ln()))
            .unzip();
        EpsilonSweep { center, epsilons: epsilons.to_vec(), masses, slope: linear_fit(&lx, &ly).map(|f| f.0) }
    }
}
