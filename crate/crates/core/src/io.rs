//! CSV export of curves, measures, traces and mode grids.
//!
//! Every file starts with `#`-prefixed header lines supplied by the caller;
//! floats use 17 significant digits.

use std::io::Write;

use crate::dynamics::{RotationCurvePoint, RotationMethod};
use crate::error::Result;
use crate::scalar::{to_f64, Scalar};
use crate::solver::EvolutionTrace;
use crate::spectra::{EigenMode, EpsilonSweep, SpectralMeasureHistogram};

/// Round-trip formatting with 17 significant digits.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn header(out: &mut impl Write, lines: &[String]) -> Result<()> {
    for l in lines {
        writeln!(out, "# {l}")?;
    }
    Ok(())
}

/// Columns `lambda,rotation,error,locked,q`; skipped points get empty fields and a header note.
pub fn write_rotation_curve<T: Scalar>(
    out: &mut impl Write,
    head: &[String],
    rows: &[RotationCurvePoint<T>],
) -> Result<()> {
    header(out, head)?;
    for p in rows.iter().filter(|p| p.estimate.is_none()) {
        let note = p.note.as_deref().unwrap_or("skipped");
        writeln!(out, "# skipped lambda={}: {note}", fmt_float(to_f64(p.lambda)))?;
    }
    writeln!(out, "lambda,rotation,error,locked,q")?;
    for p in rows {
        match &p.estimate {
            Some(e) => {
                let (locked, q) = match e.method {
                    RotationMethod::PeriodicOrbitLocked { q, .. } => (1, q),
                    RotationMethod::Birkhoff => (0, 0),
                };
                writeln!(
                    out,
                    "{},{},{},{locked},{q}",
                    fmt_float(to_f64(p.lambda)),
                    fmt_float(to_f64(e.value)),
                    fmt_float(to_f64(e.error_bound))
                )?;
            }
            None => writeln!(out, "{},,,,", fmt_float(to_f64(p.lambda)))?,
        }
    }
    Ok(())
}

/// Closed-form rotation curve rows `lambda,rotation,error,locked,q` with zero error.
pub fn write_rotation_closed_form(out: &mut impl Write, head: &[String], rows: &[(f64, f64)]) -> Result<()> {
    header(out, head)?;
    writeln!(out, "lambda,rotation,error,locked,q")?;
    for &(l, r) in rows {
        writeln!(out, "{},{},{},0,0", fmt_float(l), fmt_float(r), fmt_float(0.0))?;
    }
    Ok(())
}

/// Columns `eigenvalue_num,eigenvalue_den,position,mass`; the fraction is empty when irrational.
pub fn write_histogram<T: Scalar>(out: &mut impl Write, head: &[String], h: &SpectralMeasureHistogram<T>) -> Result<()> {
    header(out, head)?;
    writeln!(out, "eigenvalue_num,eigenvalue_den,position,mass")?;
    for a in &h.atoms {
        let (n, d) = match a.exact_position() {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(out, "{n},{d},{},{}", fmt_float(to_f64(a.position)), fmt_float(to_f64(a.mass)))?;
    }
    Ok(())
}

/// Columns `epsilon,mass`.
pub fn write_sweep<T: Scalar>(out: &mut impl Write, head: &[String], s: &EpsilonSweep<T>) -> Result<()> {
    header(out, head)?;
    writeln!(out, "epsilon,mass")?;
    for (e, m) in s.epsilons.iter().zip(&s.masses) {
        writeln!(out, "{},{}", fmt_float(to_f64(*e)), fmt_float(to_f64(*m)))?;
    }
    Ok(())
}

/// Columns `t,energy_h10,norm_hminus1`.
pub fn write_trace<T: Scalar>(out: &mut impl Write, head: &[String], tr: &EvolutionTrace<T>) -> Result<()> {
    header(out, head)?;
    writeln!(out, "t,energy_h10,norm_hminus1")?;
    for i in 0..tr.times.len() {
        writeln!(
            out,
            "{},{},{}",
            fmt_float(to_f64(tr.times[i])),
            fmt_float(to_f64(tr.energy_h10[i])),
            fmt_float(to_f64(tr.norm_hminus1[i]))
        )?;
    }
    Ok(())
}

/// Samples `u` of a mode on an `n × n` grid over its bounding box.
/// Columns `x1,x2,inside,u`; points outside the domain have `u` empty.
pub fn write_mode_grid<T: Scalar>(out: &mut impl Write, head: &[String], mode: &EigenMode<T>, n: usize) -> Result<()> {
    header(out, head)?;
    writeln!(out, "x1,x2,inside,u")?;
    let (lo, hi) = mode.bounding_box();
    let step = |d: usize| (to_f64(hi[d]) - to_f64(lo[d])) / (n.max(2) - 1) as f64;
    for j in 0..n {
        for i in 0..n {
            let x = [to_f64(lo[0]) + step(0) * i as f64, to_f64(lo[1]) + step(1) * j as f64];
            let xt = [T::from_f64(x[0]).unwrap(), T::from_f64(x[1]).unwrap()];
            if mode.domain_contains(xt) {
                writeln!(out, "{},{},1,{}", fmt_float(x[0]), fmt_float(x[1]), fmt_float(to_f64(mode.u(xt))))?;
            } else {
                writeln!(out, "{},{},0,", fmt_float(x[0]), fmt_float(x[1]))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for &x in &[0.1, 1.0 / 3.0, 6.02e23, -2.5e-300] {
            assert_eq!(fmt_float(x).parse::<f64>().unwrap(), x);
        }
    }
}
