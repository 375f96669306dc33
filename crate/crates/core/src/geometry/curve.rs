use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::cholesky_solve;
use crate::scalar::{from_usize, lit, tau, to_f64, Scalar};

/// Smallest admissible sampling resolution.
pub const MIN_RESOLUTION: usize = 256;

/// Closed boundary curve `s ↦ (x₁(s), x₂(s))`, `s ∈ ℝ/ℤ`, stored as
/// truncated real Fourier series in `2πks`.
///
/// Coefficient arrays are indexed by mode number; `sin[0]` is always zero.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryCurve<T> {
    cos1: Vec<T>,
    sin1: Vec<T>,
    cos2: Vec<T>,
    sin2: Vec<T>,
    resolution: usize,
    orientation_corrected: bool,
}

/// Point and first three parameter derivatives of the curve.
#[derive(Clone, Copy, Debug)]
pub struct CurveJet<T> {
    pub x: [[T; 2]; 4],
}

#[derive(Serialize, Deserialize)]
struct BoundaryFile {
    cos1: Vec<f64>,
    sin1: Vec<f64>,
    cos2: Vec<f64>,
    sin2: Vec<f64>,
    resolution: usize,
}

impl<T: Scalar> BoundaryCurve<T> {
    /// Validates the series and flips the parametrization if it runs clockwise.
    pub fn new(
        cos1: Vec<T>,
        sin1: Vec<T>,
        cos2: Vec<T>,
        sin2: Vec<T>,
        resolution: usize,
    ) -> Result<Self> {
        let len = cos1.len();
        if len == 0 || sin1.len() != len || cos2.len() != len || sin2.len() != len {
            return Err(Error::Malformed(format!(
                "coefficient arrays must share a nonzero length, got {}/{}/{}/{}",
                cos1.len(),
                sin1.len(),
                cos2.len(),
                sin2.len()
            )));
        }
        if resolution < MIN_RESOLUTION {
            return Err(Error::Malformed(format!(
                "resolution {resolution} below minimum {MIN_RESOLUTION}"
            )));
        }
        if [&cos1, &sin1, &cos2, &sin2].iter().any(|v| v.iter().any(|x| !x.is_finite())) {
            return Err(Error::Malformed("non-finite coefficient".into()));
        }
        if sin1[0] != T::zero() || sin2[0] != T::zero() {
            return Err(Error::NotClosed(
                "sine coefficient at mode 0 would add a linear drift; it must be 0".into(),
            ));
        }
        let mut curve = Self { cos1, sin1, cos2, sin2, resolution, orientation_corrected: false };
        curve.check_immersion()?;
        if curve.signed_area() < T::zero() {
            for v in [&mut curve.sin1, &mut curve.sin2] {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            curve.orientation_corrected = true;
        }
        Ok(curve)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: BoundaryFile =
            serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
        let conv = |v: Vec<f64>| -> Result<Vec<T>> {
            v.into_iter()
                .map(|x| T::from_f64(x).ok_or_else(|| Error::Malformed("coefficient out of range".into())))
                .collect()
        };
        Self::new(conv(file.cos1)?, conv(file.sin1)?, conv(file.cos2)?, conv(file.sin2)?, file.resolution)
    }

    pub fn to_json(&self) -> String {
        let conv = |v: &[T]| v.iter().map(|&x| to_f64(x)).collect::<Vec<_>>();
        let file = BoundaryFile {
            cos1: conv(&self.cos1),
            sin1: conv(&self.sin1),
            cos2: conv(&self.cos2),
            sin2: conv(&self.sin2),
            resolution: self.resolution,
        };
        serde_json::to_string_pretty(&file).expect("boundary file serializes")
    }

    /// Unit circle `(cos 2πs, sin 2πs)`.
    pub fn circle() -> Self {
        Self::ellipse([[T::one(), T::zero()], [T::zero(), T::one()]], [T::zero(); 2])
            .expect("unit circle is a valid curve")
    }

    /// Image of the unit circle under `y ↦ A y + v`.
    pub fn ellipse(a: [[T; 2]; 2], v: [T; 2]) -> Result<Self> {
        let z = T::zero();
        Self::new(
            vec![v[0], a[0][0]],
            vec![z, a[0][1]],
            vec![v[1], a[1][0]],
            vec![z, a[1][1]],
            1024,
        )
    }

    /// Square of side `2 half_side` centred at the origin, smoothed by Gaussian
    /// blurring of its support-function curvature measure, then rotated by `tilt`.
    ///
    /// `smoothing` is the angular blur width in radians; the result is strictly convex.
    pub fn smoothed_square(half_side: T, tilt: T, smoothing: T, modes: usize) -> Result<Self> {
        let k_max = modes.max(4);
        let mut c1 = vec![T::zero(); k_max + 1];
        let mut s1 = vec![T::zero(); k_max + 1];
        let mut c2 = vec![T::zero(); k_max + 1];
        let mut s2 = vec![T::zero(); k_max + 1];
        // Each side contributes a point mass 2·half_side to the radius of curvature;
        // only normal-angle harmonics n ∈ 4ℤ survive.
        let base = lit::<T>(4.0) * half_side / T::PI();
        let (ct, st) = (tilt.cos(), tilt.sin());
        let half = lit::<T>(0.5);
        let mut n: i64 = -(k_max as i64 + 1);
        while n <= k_max as i64 {
            if n % 4 == 0 {
                let m = n + 1;
                if m.unsigned_abs() as usize <= k_max && m != 0 {
                    let nn = lit::<T>(n as f64);
                    let g = (-half * smoothing * smoothing * nn * nn).exp();
                    let amp = base * g / lit::<T>(m as f64);
                    // amplitude e^{i tilt} amp e^{imθ}
                    let (re, im) = (amp * ct, amp * st);
                    let k = m.unsigned_abs() as usize;
                    let sgn = if m > 0 { T::one() } else { -T::one() };
                    c1[k] += re;
                    s1[k] += -im * sgn;
                    c2[k] += im;
                    s2[k] += re * sgn;
                }
            }
            n += 1;
        }
        Self::new(c1, s1, c2, s2, 4096)
    }

    /// Least-squares Fourier fit of an ordered closed point list, parametrized by
    /// normalized cumulative chord length. A repeated closing point is dropped.
    pub fn fit_points(points: &[[T; 2]], modes: usize, resolution: usize) -> Result<Self> {
        let mut pts = points.to_vec();
        if pts.len() >= 2 {
            let (a, b) = (pts[0], pts[pts.len() - 1]);
            if a == b {
                pts.pop();
            }
        }
        let n = pts.len();
        if n < 2 * modes + 1 {
            return Err(Error::Malformed(format!(
                "{n} points cannot determine {modes} Fourier modes"
            )));
        }
        let dist = |a: [T; 2], b: [T; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        let mut steps: Vec<T> = (0..n).map(|i| dist(pts[i], pts[(i + 1) % n])).collect();
        let total = steps.iter().fold(T::zero(), |a, &b| a + b);
        let mut sorted = steps.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let median = sorted[n / 2];
        if steps[n - 1] > lit::<T>(10.0) * median {
            return Err(Error::NotClosed(format!(
                "closing gap {} exceeds ten times the median spacing {}",
                to_f64(steps[n - 1]),
                to_f64(median)
            )));
        }
        if total == T::zero() {
            return Err(Error::ZeroSpeed { s: 0.0 });
        }
        let mut params = Vec::with_capacity(n);
        let mut acc = T::zero();
        for st in steps.iter_mut() {
            params.push(acc / total);
            acc += *st;
        }
        let dim = 2 * modes + 1;
        let basis = |s: T| -> Vec<T> {
            let mut b = vec![T::one(); dim];
            for k in 1..=modes {
                let a = tau::<T>() * from_usize::<T>(k) * s;
                b[2 * k - 1] = a.cos();
                b[2 * k] = a.sin();
            }
            b
        };
        let mut ata = vec![T::zero(); dim * dim];
        let mut atb = [vec![T::zero(); dim], vec![T::zero(); dim]];
        for (p, &s) in pts.iter().zip(&params) {
            let b = basis(s);
            for i in 0..dim {
                for j in 0..dim {
                    ata[i * dim + j] += b[i] * b[j];
                }
                atb[0][i] += b[i] * p[0];
                atb[1][i] += b[i] * p[1];
            }
        }
        let c = [cholesky_solve(&ata, &atb[0], dim)?, cholesky_solve(&ata, &atb[1], dim)?];
        let split = |v: &[T]| {
            let mut cs = vec![v[0]];
            let mut sn = vec![T::zero()];
            for k in 1..=modes {
                cs.push(v[2 * k - 1]);
                sn.push(v[2 * k]);
            }
            (cs, sn)
        };
        let (c1, s1) = split(&c[0]);
        let (c2, s2) = split(&c[1]);
        Self::new(c1, s1, c2, s2, resolution)
    }

    pub fn modes(&self) -> usize {
        self.cos1.len() - 1
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn orientation_corrected(&self) -> bool {
        self.orientation_corrected
    }

    /// Coefficient arrays `(cos1, sin1, cos2, sin2)`.
    pub fn coefficients(&self) -> [&[T]; 4] {
        [&self.cos1, &self.sin1, &self.cos2, &self.sin2]
    }

    pub fn point(&self, s: T) -> [T; 2] {
        let (c, sn) = (&self.cos1, &self.sin1);
        let (c2, sn2) = (&self.cos2, &self.sin2);
        let mut x = [c[0], c2[0]];
        let step_c = (tau::<T>() * s).cos();
        let step_s = (tau::<T>() * s).sin();
        let (mut cc, mut ss) = (step_c, step_s);
        for k in 1..c.len() {
            x[0] += c[k] * cc + sn[k] * ss;
            x[1] += c2[k] * cc + sn2[k] * ss;
            let nc = cc * step_c - ss * step_s;
            ss = ss * step_c + cc * step_s;
            cc = nc;
        }
        x
    }

    /// Point and derivatives of order 1..=3 with respect to `s`.
    pub fn jet(&self, s: T) -> CurveJet<T> {
        let mut x = [[T::zero(); 2]; 4];
        x[0] = [self.cos1[0], self.cos2[0]];
        let step_c = (tau::<T>() * s).cos();
        let step_s = (tau::<T>() * s).sin();
        let (mut cc, mut ss) = (step_c, step_s);
        for k in 1..self.cos1.len() {
            let w = tau::<T>() * from_usize::<T>(k);
            let (w2, w3) = (w * w, w * w * w);
            for (d, (a, b)) in [(self.cos1[k], self.sin1[k]), (self.cos2[k], self.sin2[k])]
                .into_iter()
                .enumerate()
            {
                x[0][d] += a * cc + b * ss;
                x[1][d] += w * (b * cc - a * ss);
                x[2][d] -= w2 * (a * cc + b * ss);
                x[3][d] += w3 * (a * ss - b * cc);
            }
            let nc = cc * step_c - ss * step_s;
            ss = ss * step_c + cc * step_s;
            cc = nc;
        }
        CurveJet { x }
    }

    /// Enclosed signed area, positive for counterclockwise orientation.
    pub fn signed_area(&self) -> T {
        let mut a = T::zero();
        for k in 1..self.cos1.len() {
            a += from_usize::<T>(k) * (self.cos1[k] * self.sin2[k] - self.sin1[k] * self.cos2[k]);
        }
        T::PI() * a
    }

    /// Uniform samples `x(j / n)`.
    pub fn sample(&self, n: usize) -> Vec<[T; 2]> {
        (0..n).map(|j| self.point(from_usize::<T>(j) / from_usize::<T>(n))).collect()
    }

    /// Axis-aligned bounding box `([min x₁, min x₂], [max x₁, max x₂])` from the sample grid.
    pub fn bounding_box(&self) -> ([T; 2], [T; 2]) {
        let pts = self.sample(self.resolution.max(1024));
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for p in pts {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (lo, hi)
    }

    /// Diameter estimate: the diagonal of the bounding box.
    pub fn diameter(&self) -> T {
        let (lo, hi) = self.bounding_box();
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Winding-number test against the sampled polygon.
    pub fn contains(&self, p: [T; 2]) -> bool {
        let pts = self.sample(self.resolution);
        polygon_contains(&pts, p)
    }

    fn check_immersion(&self) -> Result<()> {
        let n = self.resolution;
        let mut speeds = Vec::with_capacity(n);
        for j in 0..n {
            let d = self.jet(from_usize::<T>(j) / from_usize::<T>(n)).x[1];
            speeds.push((d[0] * d[0] + d[1] * d[1]).sqrt());
        }
        let max = speeds.iter().fold(T::zero(), |a, &b| a.max(b));
        for (j, &v) in speeds.iter().enumerate() {
            if !(v > lit::<T>(1e-10) * max) {
                return Err(Error::ZeroSpeed { s: j as f64 / n as f64 });
            }
        }
        Ok(())
    }
}

/// Even-odd point-in-polygon test.
pub fn polygon_contains<T: Scalar>(poly: &[[T; 2]], p: [T; 2]) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0];
            if p[0] < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_area_and_point() {
        let c = BoundaryCurve::<f64>::circle();
        assert!((c.signed_area() - std::f64::consts::PI).abs() < 1e-15);
        let p = c.point(0.125);
        assert!((p[0] - 0.5f64.sqrt()).abs() < 1e-15 && (p[1] - 0.5f64.sqrt()).abs() < 1e-15);
        assert!(!c.orientation_corrected());
    }

    #[test]
    fn reversed_circle_is_corrected() {
        let c = BoundaryCurve::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, -1.0], 256).unwrap();
        assert!(c.orientation_corrected());
        assert!(c.signed_area() > 0.0);
    }

    #[test]
    fn degenerate_curve_has_zero_speed() {
        let r = BoundaryCurve::<f64>::new(vec![0.0], vec![0.0], vec![0.0], vec![0.0], 256);
        assert!(matches!(r, Err(Error::ZeroSpeed { .. })));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(
            BoundaryCurve::<f64>::new(vec![0.0, 1.0], vec![0.0], vec![0.0, 0.0], vec![0.0, 1.0], 256),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            BoundaryCurve::<f64>::new(vec![0.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], 100),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(BoundaryCurve::<f64>::from_json("{\"cos1\": 3}"), Err(Error::Malformed(_))));
        assert!(matches!(
            BoundaryCurve::<f64>::new(vec![0.0, 1.0], vec![0.5, 0.0], vec![0.0, 0.0], vec![0.0, 1.0], 256),
            Err(Error::NotClosed(_))
        ));
    }

    #[test]
    fn json_roundtrip() {
        let c = BoundaryCurve::<f64>::ellipse([[2.0, 0.0], [0.0, 1.0]], [0.1, -0.2]).unwrap();
        let d = BoundaryCurve::<f64>::from_json(&c.to_json()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn jet_matches_finite_differences() {
        let c = BoundaryCurve::<f64>::new(
            vec![0.1, 0.85, 0.1, -0.15],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.15, 0.1, -0.15],
            512,
        )
        .unwrap();
        let s = 0.3;
        let h = 1e-4;
        let j = c.jet(s);
        let jp = c.jet(s + h);
        let jm = c.jet(s - h);
        for order in 0..3 {
            for d in 0..2 {
                let fd = (jp.x[order][d] - jm.x[order][d]) / (2.0 * h);
                let scale = j.x[order + 1][d].abs().max(1.0);
                assert!((fd - j.x[order + 1][d]).abs() < 1e-5 * scale * (order as f64 + 1.0).powi(3) * 40.0);
            }
        }
        let p = c.point(s);
        assert!((p[0] - j.x[0][0]).abs() < 1e-15 && (p[1] - j.x[0][1]).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_ellipse() {
        let e = BoundaryCurve::<f64>::ellipse([[1.0, 0.0], [0.0, 1.0]], [0.3, 0.0]).unwrap();
        let pts = e.sample(200);
        let f = BoundaryCurve::fit_points(&pts, 4, 256).unwrap();
        for s in [0.0, 0.2, 0.7] {
            let (a, b) = (e.point(s), f.point(s));
            assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        }
    }

    #[test]
    fn open_polyline_rejected() {
        let pts: Vec<[f64; 2]> = (0..100).map(|i| [i as f64 / 100.0, 0.0]).collect();
        assert!(matches!(BoundaryCurve::fit_points(&pts, 3, 256), Err(Error::NotClosed(_))));
    }

    #[test]
    fn smoothed_square_is_square_like() {
        let q = BoundaryCurve::<f64>::smoothed_square(1.0, 0.0, 0.3, 64).unwrap();
        let area = q.signed_area();
        // Gaussian averaging of rotated copies grows the body slightly
        assert!(area > 4.0 && area < 5.0, "area {area}");
        assert!(q.contains([0.8, 0.8]));
        assert!(!q.contains([1.3, 0.0]));
    }
}
