use rayon::prelude::*;

use crate::scalar::{from_usize, lit, Scalar};

/// Tensor Chebyshev series `Σ c_ij T_i(ξ) T_j(η)` on a box.
#[derive(Clone, Debug)]
pub struct Chebyshev2<T> {
    lo: [T; 2],
    hi: [T; 2],
    n: [usize; 2],
    /// Row-major, `coeffs[i * n[1] + j]`.
    coeffs: Vec<T>,
    converged: bool,
}

fn cos_table<T: Scalar>(n: usize) -> Vec<T> {
    // cos(πj(k + 1/2)/n) at row j, column k
    let nf = from_usize::<T>(n);
    let mut t = vec![T::zero(); n * n];
    for j in 0..n {
        for k in 0..n {
            let a = T::PI() * from_usize::<T>(j) * (from_usize::<T>(k) + lit(0.5)) / nf;
            t[j * n + k] = a.cos();
        }
    }
    t
}

impl<T: Scalar> Chebyshev2<T> {
    /// Interpolates `f` at `n × n` Chebyshev–Gauss points of the box.
    pub fn interpolate(f: &(dyn Fn([T; 2]) -> T + Sync), lo: [T; 2], hi: [T; 2], n: usize) -> Self {
        let nf = from_usize::<T>(n);
        let nodes: Vec<T> = (0..n)
            .map(|k| (T::PI() * (from_usize::<T>(k) + lit(0.5)) / nf).cos())
            .collect();
        let map = |d: usize, t: T| (lo[d] + hi[d]) / lit(2.0) + (hi[d] - lo[d]) / lit(2.0) * t;
        let vals: Vec<T> = (0..n * n)
            .into_par_iter()
            .map(|idx| f([map(0, nodes[idx / n]), map(1, nodes[idx % n])]))
            .collect();
        let ct = cos_table::<T>(n);
        let scale = |j: usize| if j == 0 { T::one() / nf } else { lit::<T>(2.0) / nf };
        // along the second index
        let tmp: Vec<T> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                (0..n).fold(T::zero(), |a, k| a + ct[j * n + k] * vals[i * n + k]) * scale(j)
            })
            .collect();
        let coeffs: Vec<T> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (i, j) = (idx / n, idx % n);
                (0..n).fold(T::zero(), |a, k| a + ct[i * n + k] * tmp[k * n + j]) * scale(i)
            })
            .collect();
        Self { lo, hi, n: [n, n], coeffs, converged: true }
    }

    /// Doubles the order from `n_min` until the trailing coefficients fall below
    /// `rel_tol` of the largest one, or `n_max` is reached.
    pub fn interpolate_adaptive(
        f: &(dyn Fn([T; 2]) -> T + Sync),
        lo: [T; 2],
        hi: [T; 2],
        n_min: usize,
        n_max: usize,
        rel_tol: T,
    ) -> Self {
        let mut n = n_min.max(4);
        loop {
            let mut c = Self::interpolate(f, lo, hi, n);
            let tail = c.trailing_ratio(4);
            if tail <= rel_tol || n >= n_max {
                c.converged = tail <= rel_tol;
                return c;
            }
            n *= 2;
        }
    }

    /// Largest coefficient with an index in the last `w` rows or columns, relative to the largest overall.
    pub fn trailing_ratio(&self, w: usize) -> T {
        let [n0, n1] = self.n;
        let mut big = T::zero();
        let mut tail = T::zero();
        for i in 0..n0 {
            for j in 0..n1 {
                let a = self.coeffs[i * n1 + j].abs();
                big = big.max(a);
                if i + w >= n0 || j + w >= n1 {
                    tail = tail.max(a);
                }
            }
        }
        if big == T::zero() {
            T::zero()
        } else {
            tail / big
        }
    }

    pub fn order(&self) -> [usize; 2] {
        self.n
    }

    pub fn converged(&self) -> bool {
        self.converged
    }

    /// Antiderivative in `axis`, vanishing on the lower face of the box.
    pub fn integrate(&self, axis: usize) -> Self {
        let [n0, n1] = self.n;
        let half = (self.hi[axis] - self.lo[axis]) / lit(2.0);
        let m = self.n[axis];
        let other = self.n[1 - axis];
        let mut out_n = self.n;
        out_n[axis] = m + 1;
        let mut out = vec![T::zero(); out_n[0] * out_n[1]];
        let get = |k: usize, o: usize| -> T {
            if k >= m {
                return T::zero();
            }
            if axis == 0 {
                self.coeffs[k * n1 + o]
            } else {
                self.coeffs[o * n1 + k]
            }
        };
        for o in 0..other {
            let mut b = vec![T::zero(); m + 1];
            for k in 1..=m {
                b[k] = if k == 1 {
                    get(0, o) - get(2, o) / lit(2.0)
                } else {
                    (get(k - 1, o) - get(k + 1, o)) / (lit::<T>(2.0) * from_usize::<T>(k))
                };
            }
            // F(-1) = 0
            let mut s = T::zero();
            for (k, &bk) in b.iter().enumerate().skip(1) {
                s += if k % 2 == 0 { bk } else { -bk };
            }
            b[0] = -s;
            for (k, &bk) in b.iter().enumerate() {
                let idx = if axis == 0 { k * out_n[1] + o } else { o * out_n[1] + k };
                out[idx] = bk * half;
            }
        }
        let _ = n0;
        Self { lo: self.lo, hi: self.hi, n: out_n, coeffs: out, converged: self.converged }
    }

    pub fn eval(&self, p: [T; 2]) -> T {
        let t = |d: usize| {
            let mid = (self.lo[d] + self.hi[d]) / lit(2.0);
            let half = (self.hi[d] - self.lo[d]) / lit(2.0);
            (p[d] - mid) / half
        };
        let (x, y) = (t(0), t(1));
        let [n0, n1] = self.n;
        let row: Vec<T> = (0..n0).map(|i| clenshaw(&self.coeffs[i * n1..(i + 1) * n1], y)).collect();
        clenshaw(&row, x)
    }
}

fn clenshaw<T: Scalar>(c: &[T], x: T) -> T {
    let two_x = x + x;
    let (mut b1, mut b2) = (T::zero(), T::zero());
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + two_x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c.first().copied().unwrap_or(T::zero()) + x * b1 - b2
}
