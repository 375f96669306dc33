//! Sampled functions on a tensor grid over a planar region.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;

use crate::geometry::{polygon_contains, BoundaryCurve};
use crate::scalar::{from_usize, lit, Scalar};

/// Planar region with an inside test and a boundary distance.
#[derive(Clone, Debug)]
pub enum Region<T> {
    /// Axis-aligned rectangle `[lo₀, hi₀] × [lo₁, hi₁]`.
    Rectangle { lo: [T; 2], hi: [T; 2] },
    /// Interior of a closed boundary curve (tested against its sampled polygon).
    Curve(Box<BoundaryCurve<T>>),
}

impl<T: Scalar> Region<T> {
    pub fn unit_square() -> Self {
        Region::Rectangle { lo: [T::zero(); 2], hi: [T::one(); 2] }
    }

    pub fn curve(curve: BoundaryCurve<T>) -> Self {
        Region::Curve(Box::new(curve))
    }

    pub fn bounding_box(&self) -> ([T; 2], [T; 2]) {
        match self {
            Region::Rectangle { lo, hi } => (*lo, *hi),
            Region::Curve(c) => c.bounding_box(),
        }
    }

    fn polygon(&self) -> Option<Vec<[T; 2]>> {
        match self {
            Region::Rectangle { .. } => None,
            Region::Curve(c) => Some(c.sample(c.resolution().max(1024))),
        }
    }
}

fn inside_and_distance<T: Scalar>(region: &Region<T>, poly: Option<&[[T; 2]]>, p: [T; 2]) -> (bool, T) {
    match region {
        Region::Rectangle { lo, hi } => {
            let inside = p[0] > lo[0] && p[0] < hi[0] && p[1] > lo[1] && p[1] < hi[1];
            let d = (p[0] - lo[0])
                .abs()
                .min((hi[0] - p[0]).abs())
                .min((p[1] - lo[1]).abs())
                .min((hi[1] - p[1]).abs());
            (inside, d)
        }
        Region::Curve(_) => {
            let poly = poly.expect("polygon for curve region");
            let inside = polygon_contains(poly, p);
            let mut d = T::infinity();
            let n = poly.len();
            for i in 0..n {
                d = d.min(segment_distance(p, poly[i], poly[(i + 1) % n]));
            }
            (inside, d)
        }
    }
}

fn segment_distance<T: Scalar>(p: [T; 2], a: [T; 2], b: [T; 2]) -> T {
    let (dx, dy) = (b[0] - a[0], b[1] - a[1]);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > T::zero() {
        (((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let (qx, qy) = (a[0] + t * dx - p[0], a[1] + t * dy - p[1]);
    (qx * qx + qy * qy).sqrt()
}

pub type Evaluator<T> = Arc<dyn Fn([T; 2]) -> T + Send + Sync>;

/// Values on an `n × n` grid spanning the bounding box of a region.
///
/// Points are stored row-major with the first coordinate varying fastest.
/// Outside points hold zero.
#[derive(Clone)]
pub struct GridFunction<T> {
    origin: [T; 2],
    spacing: [T; 2],
    n: usize,
    values: Vec<T>,
    inside: Vec<bool>,
    boundary_adjacent: Vec<bool>,
    evaluator: Option<Evaluator<T>>,
}

impl<T: Scalar> fmt::Debug for GridFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridFunction")
            .field("origin", &self.origin)
            .field("spacing", &self.spacing)
            .field("n", &self.n)
            .field("has_evaluator", &self.evaluator.is_some())
            .finish()
    }
}

impl<T: Scalar> GridFunction<T> {
    /// Samples `f` at the inside points and keeps it as the analytic evaluator.
    pub fn from_fn(region: &Region<T>, n: usize, f: impl Fn([T; 2]) -> T + Send + Sync + 'static) -> Self {
        let f: Evaluator<T> = Arc::new(f);
        let mut g = Self::mask(region, n);
        let vals: Vec<T> = (0..n * n)
            .into_par_iter()
            .map(|i| if g.inside[i] { f(g.point_index(i)) } else { T::zero() })
            .collect();
        g.values = vals;
        g.evaluator = Some(f);
        g
    }

    /// Grid data without an evaluator; `values` must have `n²` entries.
    pub fn from_values(region: &Region<T>, n: usize, values: Vec<T>) -> Self {
        assert_eq!(values.len(), n * n, "grid needs n² values");
        let mut g = Self::mask(region, n);
        g.values = values
            .into_iter()
            .zip(&g.inside)
            .map(|(v, &ins)| if ins { v } else { T::zero() })
            .collect();
        g
    }

    fn mask(region: &Region<T>, n: usize) -> Self {
        assert!(n >= 2, "grid needs at least two points per side");
        let (lo, hi) = region.bounding_box();
        let nm1 = from_usize::<T>(n - 1);
        let spacing = [(hi[0] - lo[0]) / nm1, (hi[1] - lo[1]) / nm1];
        let h = spacing[0].max(spacing[1]);
        let poly = region.polygon();
        let flags: Vec<(bool, bool)> = (0..n * n)
            .into_par_iter()
            .map(|i| {
                let p = [
                    lo[0] + spacing[0] * from_usize::<T>(i % n),
                    lo[1] + spacing[1] * from_usize::<T>(i / n),
                ];
                let (ins, d) = inside_and_distance(region, poly.as_deref(), p);
                (ins, ins && d < h)
            })
            .collect();
        Self {
            origin: lo,
            spacing,
            n,
            values: vec![T::zero(); n * n],
            inside: flags.iter().map(|f| f.0).collect(),
            boundary_adjacent: flags.iter().map(|f| f.1).collect(),
            evaluator: None,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn spacing(&self) -> [T; 2] {
        self.spacing
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn inside(&self) -> &[bool] {
        &self.inside
    }

    pub fn boundary_adjacent(&self) -> &[bool] {
        &self.boundary_adjacent
    }

    pub fn evaluator(&self) -> Option<&Evaluator<T>> {
        self.evaluator.as_ref()
    }

    pub fn point(&self, i: usize, j: usize) -> [T; 2] {
        [
            self.origin[0] + self.spacing[0] * from_usize::<T>(i),
            self.origin[1] + self.spacing[1] * from_usize::<T>(j),
        ]
    }

    pub fn point_index(&self, idx: usize) -> [T; 2] {
        self.point(idx % self.n, idx / self.n)
    }

    /// Indices of inside points that are not boundary-adjacent.
    pub fn interior_indices(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.inside[i] && !self.boundary_adjacent[i]).collect()
    }

    /// Evaluator when present, otherwise bilinear interpolation of the grid values.
    pub fn value_at(&self, p: [T; 2]) -> T {
        if let Some(f) = &self.evaluator {
            return f(p);
        }
        let fx = ((p[0] - self.origin[0]) / self.spacing[0]).max(T::zero());
        let fy = ((p[1] - self.origin[1]) / self.spacing[1]).max(T::zero());
        let last = self.n - 2;
        let i = fx.floor().to_usize().unwrap_or(0).min(last);
        let j = fy.floor().to_usize().unwrap_or(0).min(last);
        let tx = (fx - from_usize::<T>(i)).min(T::one());
        let ty = (fy - from_usize::<T>(j)).min(T::one());
        let v = |a: usize, b: usize| self.values[b * self.n + a];
        let one = T::one();
        (one - tx) * (one - ty) * v(i, j)
            + tx * (one - ty) * v(i + 1, j)
            + (one - tx) * ty * v(i, j + 1)
            + tx * ty * v(i + 1, j + 1)
    }

    pub fn max_abs_inside(&self) -> T {
        self.values
            .iter()
            .zip(&self.inside)
            .filter(|(_, &ins)| ins)
            .fold(T::zero(), |m, (v, _)| m.max(v.abs()))
    }

    /// Same mask, new values computed from the inside points.
    pub fn map_inside(&self, f: impl Fn([T; 2]) -> T + Sync) -> Self {
        let values = (0..self.values.len())
            .into_par_iter()
            .map(|i| if self.inside[i] { f(self.point_index(i)) } else { T::zero() })
            .collect();
        Self { values, evaluator: None, ..self.clone() }
    }

    /// Half the smaller grid spacing; used as a finite-difference scale.
    pub fn half_spacing(&self) -> T {
        self.spacing[0].min(self.spacing[1]) * lit::<T>(0.5)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn disk_mask_counts() {
        let g = GridFunction::from_fn(&Region::curve(BoundaryCurve::<f64>::circle()), 101, |p| p[0] + p[1]);
        let inside = g.inside().iter().filter(|&&b| b).count();
        // lattice points strictly inside the unit circle at spacing 0.02
        let expected = (0..101 * 101)
            .filter(|&i| {
                let p = g.point_index(i);
                p[0] * p[0] + p[1] * p[1] < 1.0
            })
            .count();
        assert!((inside as i64 - expected as i64).abs() <= 8, "{inside} vs {expected}");
        assert!(g.boundary_adjacent().iter().any(|&b| b));
        assert!(g.interior_indices().len() < inside);
    }

    #[test]
    fn bilinear_reproduces_linear_data() {
        let r = Region::<f64>::unit_square();
        let n = 11;
        let vals: Vec<f64> = (0..n * n).map(|i| (i % n) as f64 * 0.1 + 2.0 * (i / n) as f64 * 0.1).collect();
        let g = GridFunction::from_values(&r, n, vals);
        assert!((g.value_at([0.33, 0.47]) - (0.33 + 0.94)).abs() < 1e-12);
        assert!(g.evaluator().is_none());
    }
}
