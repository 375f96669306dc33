use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::linear_fit;
use crate::scalar::{from_usize, lit, Scalar};
use crate::spectra::{project, square_modes, Forcing, ModeSet, ProjectionOptions};

/// Below this gap `|λ² - e|` a mode is treated as resonant.
pub const RESONANCE_GAP: f64 = 1e-12;
/// Envelope slope (log-log) above which a trace is flagged as growing.
pub const GROWTH_SLOPE: f64 = 0.5;

/// `a(t)` solving `a'' + ω²a = -cos(λt)`, `a(0) = a'(0) = 0`.
///
/// Written as `-t sin((λ+ω)t/2) sinc((λ-ω)t/2) / (λ+ω)`, which stays accurate
/// near resonance; at `|λ² - ω²| < 1e-12` the secular limit `-t sin(λt)/(2λ)` is used.
pub fn mode_response<T: Scalar>(lambda: T, eigenvalue: T, t: T) -> T {
    let gap = lambda * lambda - eigenvalue;
    if gap.abs() < lit(RESONANCE_GAP) {
        return -t * (lambda * t).sin() / (lit::<T>(2.0) * lambda);
    }
    let omega = eigenvalue.max(T::zero()).sqrt();
    let sum = lambda + omega;
    let half_diff = gap / sum * t / lit(2.0);
    let sinc = if half_diff.abs() < lit(1e-8) {
        T::one() - half_diff * half_diff / lit(6.0)
    } else {
        half_diff.sin() / half_diff
    };
    -t * (sum * t / lit(2.0)).sin() * sinc / sum
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions<T> {
    /// Store coefficient snapshots every this many time samples (the last sample is always kept).
    pub snapshot_stride: Option<usize>,
    /// Modes with `|F_j| < trim · max |F|` are dropped.
    pub trim: T,
}

impl<T: Scalar> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self { snapshot_stride: None, trim: lit(1e-13) }
    }
}

/// Envelope fit of the energy trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthDiagnostics<T> {
    /// Log-log slope of windowed maxima of the energy against time.
    pub envelope_slope: Option<T>,
    pub growing: bool,
}

#[derive(Clone, Debug)]
pub struct EvolutionTrace<T> {
    pub lambda: T,
    pub times: Vec<T>,
    /// `‖u(t)‖²_{H¹₀}`.
    pub energy_h10: Vec<T>,
    /// `‖w(t)‖_{H⁻¹}` with `w = Δu`.
    pub norm_hminus1: Vec<T>,
    pub snapshots: Vec<(T, Vec<T>)>,
    pub growth: GrowthDiagnostics<T>,
    /// Relative truncation tail reported by the projection (zero for modal input).
    pub tail: T,
    pub active_modes: usize,
}

impl<T: Scalar> EvolutionTrace<T> {
    /// `sup_{t ≤ t_max} energy`.
    pub fn sup_energy(&self, t_max: T) -> T {
        self.times
            .iter()
            .zip(&self.energy_h10)
            .take_while(|(&t, _)| t <= t_max)
            .fold(T::zero(), |m, (_, &e)| m.max(e))
    }

    /// `sup_{t ≤ long} energy / sup_{t ≤ short} energy`.
    pub fn sup_ratio(&self, short: T, long: T) -> T {
        self.sup_energy(long) / self.sup_energy(short)
    }
}

/// Squared H¹₀ norm of `Σ a_j u_j`.
pub fn energy_h10<T: Scalar>(set: &ModeSet<T>, coeffs: &[T]) -> T {
    set.energy(coeffs)
}

/// Evolves the forced problem mode by mode: with `f = Σ F_j φ_j`, the coefficient of
/// `u_j` is `(F_j / D_j) · mode_response(λ, e_j, t)`.
pub fn evolve_modal<T: Scalar>(
    coeffs: &[T],
    lambda: T,
    set: &ModeSet<T>,
    times: &[T],
    opts: &EvolveOptions<T>,
) -> Result<EvolutionTrace<T>> {
    let modes = set.modes();
    if coeffs.len() != modes.len() {
        return Err(Error::InvalidArgument(format!("expected {} coefficients, got {}", modes.len(), coeffs.len())));
    }
    if !(lambda > T::zero() && lambda < T::one()) {
        return Err(Error::LambdaOutOfRange(crate::scalar::to_f64(lambda)));
    }
    if times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument("times must be strictly increasing".into()));
    }
    let fmax = coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()));
    let active: Vec<usize> = (0..modes.len()).filter(|&j| coeffs[j].abs() > opts.trim * fmax && fmax > T::zero()).collect();
    let scale: Vec<T> = active.iter().map(|&j| coeffs[j] / modes[j].delta_scale).collect();
    let eig: Vec<T> = active.iter().map(|&j| modes[j].eigenvalue).collect();
    let stride = opts.snapshot_stride.unwrap_or(usize::MAX);
    let last = times.len().saturating_sub(1);
    let rows: Vec<(T, Option<Vec<T>>)> = times
        .par_iter()
        .enumerate()
        .map_init(
            || vec![T::zero(); modes.len()],
            |buf, (i, &t)| {
                for (k, &j) in active.iter().enumerate() {
                    buf[j] = scale[k] * mode_response(lambda, eig[k], t);
                }
                let e = set.energy(buf);
                let snap = (i % stride == 0 || i == last).then(|| buf.clone());
                (e, snap)
            },
        )
        .collect();
    let mut energy = Vec::with_capacity(times.len());
    let mut snapshots = Vec::new();
    for (i, (e, snap)) in rows.into_iter().enumerate() {
        energy.push(e.max(T::zero()));
        if let Some(s) = snap {
            snapshots.push((times[i], s));
        }
    }
    let norm_hminus1 = energy.iter().map(|e| e.sqrt()).collect();
    let growth = growth_diagnostics(times, &energy);
    Ok(EvolutionTrace {
        lambda,
        times: times.to_vec(),
        energy_h10: energy,
        norm_hminus1,
        snapshots,
        growth,
        tail: T::zero(),
        active_modes: active.len(),
    })
}

/// Windowed-maximum envelope over 24 log-spaced windows of `(t_max/1000, t_max]`.
pub fn growth_diagnostics<T: Scalar>(times: &[T], energy: &[T]) -> GrowthDiagnostics<T> {
    let Some(&t_max) = times.last() else {
        return GrowthDiagnostics { envelope_slope: None, growing: false };
    };
    if t_max <= T::zero() {
        return GrowthDiagnostics { envelope_slope: None, growing: false };
    }
    let windows = 24usize;
    let t0 = t_max / lit(1000.0);
    let ratio = (t_max / t0).ln() / from_usize::<T>(windows);
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for w in 0..windows {
        let a = t0 * (ratio * from_usize::<T>(w)).exp();
        let b = t0 * (ratio * from_usize::<T>(w + 1)).exp();
        let m = times
            .iter()
            .zip(energy)
            .filter(|(&t, _)| t > a && t <= b)
            .fold(T::zero(), |m, (_, &e)| m.max(e));
        if m > T::zero() {
            lx.push(b.ln());
            ly.push(m.ln());
        }
    }
    let envelope_slope = if lx.len() >= 4 { linear_fit(&lx, &ly).map(|f| f.0) } else { None };
    GrowthDiagnostics { envelope_slope, growing: envelope_slope.is_some_and(|s| s > lit(GROWTH_SLOPE)) }
}

/// Projects `f` onto the sine modes of `[0, 1]²` and evolves it.
///
/// Fails with [`Error::UnresolvedForcing`] when more than `tail_tolerance` of the
/// H⁻¹ mass sits in the outer quarter of the cutoff.
pub fn evolve_square<T: Scalar>(
    f: Forcing<'_, T>,
    lambda: T,
    times: &[T],
    k_max: u32,
    tail_tolerance: T,
    opts: &EvolveOptions<T>,
) -> Result<EvolutionTrace<T>> {
    let set = ModeSet::new(square_modes::<T>(k_max));
    let proj = project(f, &set, &ProjectionOptions { nodes: None, tail_tolerance: Some(tail_tolerance) })?;
    let mut trace = evolve_modal(&proj.coefficients, lambda, &set, times, opts)?;
    trace.tail = proj.tail;
    Ok(trace)
}

/// `n` uniformly spaced times in `[0, t_max]`.
pub fn uniform_times<T: Scalar>(t_max: T, n: usize) -> Vec<T> {
    let d = t_max / from_usize::<T>(n.max(2) - 1);
    (0..n.max(2)).map(|i| d * from_usize::<T>(i)).collect()
}

/// `0` followed by `per_decade` log-spaced points per decade from `t_min` to `t_max`.
pub fn log_times<T: Scalar>(t_min: T, t_max: T, per_decade: usize) -> Vec<T> {
    let decades = (t_max / t_min).log10();
    let n = (decades * from_usize::<T>(per_decade)).ceil().to_usize().unwrap_or(1).max(1);
    let mut out = vec![T::zero()];
    for i in 0..=n {
        out.push(t_min * (decades * from_usize::<T>(i) / from_usize::<T>(n) * T::LN_10()).exp());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectra::square_mode;

    #[test]
    fn response_matches_two_cosine_form() {
        let (l, e) = (0.6f64, 0.5f64);
        for &t in &[0.0, 0.3, 7.0, 123.0] {
            let direct = ((l * t).cos() - (e.sqrt() * t).cos()) / (l * l - e);
            assert!((mode_response(l, e, t) - direct).abs() < 1e-10 * (1.0 + direct.abs()));
        }
    }

    #[test]
    fn response_continuous_at_resonance() {
        let l = 0.5f64.sqrt();
        for &t in &[1.0, 50.0] {
            let a = mode_response(l, 0.5, t);
            let b = mode_response(l, 0.5 + 1e-11, t);
            assert!((a - b).abs() < 1e-6 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn single_mode_closed_form() {
        let set = ModeSet::new(vec![square_mode::<f64>(1, 1)]);
        let pi2 = std::f64::consts::PI.powi(2);
        let times = [0.0, 1.0, 2.5];
        let tr = evolve_modal(&[1.0], 0.6, &set, &times, &Default::default()).unwrap();
        assert_eq!(tr.energy_h10[0], 0.0);
        for (k, &t) in times.iter().enumerate() {
            let a = ((0.6 * t).cos() - (t / 2f64.sqrt()).cos()) / (-0.28 * pi2);
            assert!((tr.energy_h10[k] - a * a * pi2 / 2.0).abs() < 1e-14);
        }
    }
}
