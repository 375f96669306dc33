use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use rustfft::FftPlanner;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::scalar::{from_i64, from_usize, lit, tau, Scalar};

/// Truncated Fourier series `Σ_{|k| ≤ K} c_k e^{2πikθ}` on ℝ/ℤ.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierSeries<T> {
    coeffs: Vec<Complex<T>>,
    order: usize,
}

impl<T: Scalar> FourierSeries<T> {
    pub fn zeros(order: usize) -> Self {
        Self {
            coeffs: vec![Complex::new(T::zero(), T::zero()); 2 * order + 1],
            order,
        }
    }

    pub fn constant(c: T) -> Self {
        let mut s = Self::zeros(0);
        s.coeffs[0] = Complex::new(c, T::zero());
        s
    }

    /// Builds a series from coefficients ordered `c_{-K}, …, c_0, …, c_K`.
    pub fn from_coefficients(coeffs: Vec<Complex<T>>) -> Result<Self> {
        if coeffs.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "Fourier coefficient vector must have odd length, got {}",
                coeffs.len()
            )));
        }
        let order = coeffs.len() / 2;
        Ok(Self { coeffs, order })
    }

    /// Real series `a_0 + Σ a_k cos 2πkθ + b_k sin 2πkθ`; `sin[0]` is ignored.
    pub fn from_real(cos: &[T], sin: &[T]) -> Self {
        let order = cos.len().max(sin.len()).saturating_sub(1);
        let mut s = Self::zeros(order);
        let half = lit::<T>(0.5);
        for k in 0..=order {
            let a = cos.get(k).copied().unwrap_or_else(T::zero);
            let b = if k == 0 { T::zero() } else { sin.get(k).copied().unwrap_or_else(T::zero) };
            if k == 0 {
                s.set(0, Complex::new(a, T::zero()));
            } else {
                s.set(k as i64, Complex::new(a * half, -b * half));
                s.set(-(k as i64), Complex::new(a * half, b * half));
            }
        }
        s
    }

    /// Interpolates uniform samples `values[j] = g(j/n)` by FFT.
    ///
    /// The returned order is `(n - 1) / 2`; for even `n` the Nyquist term is dropped.
    pub fn from_samples(values: &[T]) -> Self {
        let n = values.len();
        if n == 0 {
            return Self::zeros(0);
        }
        let mut buf: Vec<Complex<T>> = values.iter().map(|&v| Complex::new(v, T::zero())).collect();
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
        let inv = T::one() / from_usize::<T>(n);
        let order = (n - 1) / 2;
        let mut s = Self::zeros(order);
        for k in -(order as i64)..=(order as i64) {
            let idx = k.rem_euclid(n as i64) as usize;
            s.set(k, buf[idx] * inv);
        }
        s
    }

    /// Like [`from_samples`](Self::from_samples), truncated to the smallest order whose
    /// tail energy is below `rel_tol` times the total energy.
    pub fn from_samples_adaptive(values: &[T], rel_tol: T) -> Self {
        let full = Self::from_samples(values);
        let k = full.adaptive_order(rel_tol);
        full.truncated(k)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Coefficients ordered `c_{-K}, …, c_K`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn coefficient(&self, k: i64) -> Complex<T> {
        if k.unsigned_abs() as usize > self.order {
            Complex::new(T::zero(), T::zero())
        } else {
            self.coeffs[(k + self.order as i64) as usize]
        }
    }

    /// Sets `c_k`; panics if `|k| > K`.
    pub fn set(&mut self, k: i64, c: Complex<T>) {
        let idx = k + self.order as i64;
        assert!(idx >= 0 && (idx as usize) < self.coeffs.len(), "mode {k} outside order {}", self.order);
        self.coeffs[idx as usize] = c;
    }

    pub fn mean(&self) -> T {
        self.coeffs[self.order].re
    }

    /// `L²(ℝ/ℤ)` norm, `(Σ |c_k|²)^{1/2}`.
    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |a, c| a + c.norm_sqr()).sqrt()
    }

    /// `H^s` norm with weights `(1 + k²)^s`.
    pub fn sobolev_norm(&self, s: T) -> T {
        let mut acc = T::zero();
        for k in -(self.order as i64)..=(self.order as i64) {
            let w = (T::one() + from_i64::<T>(k * k)).powf(s);
            acc += w * self.coefficient(k).norm_sqr();
        }
        acc.sqrt()
    }

    /// Energy carried by modes with `|k| > m`.
    pub fn tail_energy(&self, m: usize) -> T {
        let mut acc = T::zero();
        for k in (m + 1)..=self.order {
            acc += self.coefficient(k as i64).norm_sqr() + self.coefficient(-(k as i64)).norm_sqr();
        }
        acc
    }

    /// Smallest order whose tail energy is at most `rel_tol` times the total energy.
    pub fn adaptive_order(&self, rel_tol: T) -> usize {
        let total = self.l2_norm().powi(2);
        if total == T::zero() {
            return 0;
        }
        let mut tail = T::zero();
        for k in (1..=self.order).rev() {
            let add = self.coefficient(k as i64).norm_sqr() + self.coefficient(-(k as i64)).norm_sqr();
            if tail + add > rel_tol * total {
                return k;
            }
            tail += add;
        }
        0
    }

    pub fn truncated(&self, order: usize) -> Self {
        let mut s = Self::zeros(order);
        for k in -(order as i64)..=(order as i64) {
            s.set(k, self.coefficient(k));
        }
        s
    }

    /// Re-expresses the series with at least `order` modes (zero padded).
    pub fn padded(&self, order: usize) -> Self {
        self.truncated(order.max(self.order))
    }

    pub fn eval(&self, theta: T) -> Complex<T> {
        let mut acc = self.coeffs[self.order];
        if self.order == 0 {
            return acc;
        }
        let step = Complex::from_polar(T::one(), tau::<T>() * theta);
        let mut z = step;
        for k in 1..=self.order {
            if k % 32 == 0 {
                // re-anchor the power recurrence to keep the phase accurate
                z = Complex::from_polar(T::one(), tau::<T>() * from_usize::<T>(k) * theta);
            }
            acc = acc + self.coefficient(k as i64) * z + self.coefficient(-(k as i64)) * z.conj();
            z = z * step;
        }
        acc
    }

    pub fn eval_real(&self, theta: T) -> T {
        self.eval(theta).re
    }

    pub fn derivative(&self) -> Self {
        let mut s = Self::zeros(self.order);
        for k in -(self.order as i64)..=(self.order as i64) {
            let f = Complex::new(T::zero(), tau::<T>() * from_i64::<T>(k));
            s.set(k, self.coefficient(k) * f);
        }
        s
    }

    /// Series of `θ ↦ g(θ + α)`.
    pub fn rotated(&self, alpha: T) -> Self {
        let mut s = self.clone();
        for k in -(self.order as i64)..=(self.order as i64) {
            s.set(k, self.coefficient(k) * phase(k, alpha));
        }
        s
    }

    /// Series of `θ ↦ g(c - θ)`.
    pub fn reflected(&self, c: T) -> Self {
        let mut s = Self::zeros(self.order);
        for k in -(self.order as i64)..=(self.order as i64) {
            s.set(k, self.coefficient(-k) * phase(-k, c));
        }
        s
    }

    pub fn scaled(&self, a: T) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * a).collect(),
            order: self.order,
        }
    }

    /// Values on the uniform grid `j/n`, `n ≥ 2K + 1`, via inverse FFT.
    pub fn sample(&self, n: usize) -> Vec<T> {
        self.sample_complex(n).into_iter().map(|c| c.re).collect()
    }

    pub fn sample_complex(&self, n: usize) -> Vec<Complex<T>> {
        assert!(n > 2 * self.order, "grid of {n} points aliases order {}", self.order);
        let mut buf = vec![Complex::new(T::zero(), T::zero()); n];
        for k in -(self.order as i64)..=(self.order as i64) {
            buf[k.rem_euclid(n as i64) as usize] = self.coefficient(k);
        }
        FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
        buf
    }

    /// Largest violation of `c_{-k} = conj(c_k)`.
    pub fn hermitian_defect(&self) -> T {
        let mut d = self.coefficient(0).im.abs();
        for k in 1..=self.order as i64 {
            d = d.max((self.coefficient(-k) - self.coefficient(k).conj()).norm());
        }
        d
    }

    /// Real cosine/sine coefficient arrays (index = mode number).
    pub fn to_real(&self) -> (Vec<T>, Vec<T>) {
        let two = lit::<T>(2.0);
        let mut cos = vec![T::zero(); self.order + 1];
        let mut sin = vec![T::zero(); self.order + 1];
        cos[0] = self.mean();
        for k in 1..=self.order {
            let c = (self.coefficient(k as i64) + self.coefficient(-(k as i64)).conj()) * lit::<T>(0.5);
            cos[k] = two * c.re;
            sin[k] = -two * c.im;
        }
        (cos, sin)
    }

    /// JSON object `{"cos": [...], "sin": [...]}` matching the boundary file layout.
    pub fn to_json(&self) -> Value {
        let (c, s) = self.to_real();
        json!({
            "cos": c.iter().map(|&x| crate::scalar::to_f64(x)).collect::<Vec<_>>(),
            "sin": s.iter().map(|&x| crate::scalar::to_f64(x)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(value: &Value) -> Result<Self> {
        let read = |key: &str| -> Result<Vec<T>> {
            value
                .get(key)
                .and_then(Value::as_array)
                .ok_or_else(|| Error::Malformed(format!("missing array \"{key}\"")))?
                .iter()
                .map(|v| {
                    v.as_f64()
                        .and_then(T::from_f64)
                        .ok_or_else(|| Error::Malformed(format!("non-numeric entry in \"{key}\"")))
                })
                .collect()
        };
        Ok(Self::from_real(&read("cos")?, &read("sin")?))
    }
}

/// `e^{2πikα}`, with `kα` reduced before the trigonometric call.
pub(crate) fn phase<T: Scalar>(k: i64, alpha: T) -> Complex<T> {
    let x = from_i64::<T>(k) * alpha;
    let f = x - x.round();
    Complex::from_polar(T::one(), tau::<T>() * f)
}

impl<T: Scalar> Add for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn add(self, rhs: Self) -> FourierSeries<T> {
        let order = self.order.max(rhs.order);
        let mut s = FourierSeries::zeros(order);
        for k in -(order as i64)..=(order as i64) {
            s.set(k, self.coefficient(k) + rhs.coefficient(k));
        }
        s
    }
}

impl<T: Scalar> Sub for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn sub(self, rhs: Self) -> FourierSeries<T> {
        let order = self.order.max(rhs.order);
        let mut s = FourierSeries::zeros(order);
        for k in -(order as i64)..=(order as i64) {
            s.set(k, self.coefficient(k) - rhs.coefficient(k));
        }
        s
    }
}

impl<T: Scalar> Mul<T> for &FourierSeries<T> {
    type Output = FourierSeries<T>;
    fn mul(self, rhs: T) -> FourierSeries<T> {
        self.scaled(rhs)
    }
}
