use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;

use internal_waves::geometry::LambdaContext;
use internal_waves::grid::Region;
use internal_waves::io::{
    fmt_float, write_histogram, write_mode_grid, write_rotation_closed_form, write_rotation_curve, write_sweep,
    write_trace,
};
use internal_waves::dynamics::{rotation_curve, RotationOptions};
use internal_waves::solver::{evolve_modal, right_inverse, uniform_times, RightInverseOptions};
use internal_waves::spectra::{
    disk_modes, project, rectangle_modes, rectangle_rotation_number, spectral_measure, square_modes,
    square_rotation_number, transported_disk_modes, Forcing, ProjectionOptions,
};
use internal_waves::{EigenMode, GridFunction, ModeSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{logspace, parse_range, Domain, RunConfig};
use crate::Failure;

type Profile = Box<dyn Fn([f64; 2]) -> f64 + Send + Sync>;

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn bump(z: f64) -> f64 {
    if z.abs() < 1.0 {
        (-1.0 / (1.0 - z * z)).exp()
    } else {
        0.0
    }
}

/// The forcing named in the config, scaled to the bounding box `(lo, hi)` where relevant.
fn forcing(cfg: &RunConfig, lo: [f64; 2], hi: [f64; 2], default: &str) -> Result<Profile, Failure> {
    let c = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let r = [0.45 * (hi[0] - lo[0]), 0.45 * (hi[1] - lo[1])];
    match cfg.forcing.as_deref().unwrap_or(default) {
        "one" => Ok(Box::new(|_| 1.0)),
        "bump" => Ok(Box::new(move |x| bump((x[0] - c[0]) / r[0]) * bump((x[1] - c[1]) / r[1]))),
        "random" => {
            // cubic polynomial in coordinates centred on the box
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0));
            let coef: Vec<(i32, i32, f64)> = (0..4)
                .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
                .map(|(i, j)| (i, j, rng.gen_range(-1.0..1.0)))
                .collect();
            Ok(Box::new(move |x| {
                let y = [(x[0] - c[0]) / r[0], (x[1] - c[1]) / r[1]];
                coef.iter().map(|&(i, j, a)| a * y[0].powi(i) * y[1].powi(j)).sum()
            }))
        }
        other => Err(Failure::config(format!("unknown forcing {other:?}; expected one, bump or random"))),
    }
}

/// Closed-form modes of a builtin domain.
fn modes(domain: &Domain, cfg: &RunConfig, kmax: u32, nmax: u32) -> Result<Vec<EigenMode>, Failure> {
    let kmax = RunConfig::positive("kmax", cfg.kmax, kmax)?;
    let nmax = RunConfig::positive("nmax", cfg.nmax, nmax)?;
    Ok(match domain {
        Domain::Square => square_modes(kmax),
        Domain::Rectangle { width, height } => rectangle_modes(kmax, *width, *height)?,
        Domain::Disk => disk_modes(nmax),
        Domain::Ellipse { a, v } => transported_disk_modes(*a, *v, nmax)?,
        Domain::File(p) => {
            return Err(internal_waves::Error::UnsupportedDomain(format!(
                "{} has no closed-form modes; use disk, square, rectangle or ellipse",
                p.display()
            ))
            .into())
        }
    })
}

fn mode_name(m: &EigenMode) -> String {
    let (a, b) = m.index();
    format!("mode_{}_{a}_{b}.csv", m.domain_tag())
}

pub fn rotnum(cfg: &RunConfig) -> Result<(), Failure> {
    let domain = cfg.domain()?;
    let lambdas = cfg.lambdas()?;
    let orbit = RunConfig::positive("orbit", cfg.orbit, 100_000)?;
    let out = cfg.out()?;
    let head = cfg.header();
    let closed = |r: &dyn Fn(f64) -> f64| -> Vec<(f64, f64)> { lambdas.iter().map(|&l| (l, r(l))).collect() };
    match domain {
        Domain::Square => {
            let rows = closed(&square_rotation_number);
            write_rotation_closed_form(&mut create(out)?, &head, &rows)?;
        }
        Domain::Rectangle { width, height } => {
            let rows = closed(&|l| rectangle_rotation_number(l, width, height));
            write_rotation_closed_form(&mut create(out)?, &head, &rows)?;
        }
        _ => {
            let curve = domain.curve()?;
            let opts = RotationOptions { iterations: orbit, ..RotationOptions::default() };
            let rows = rotation_curve(&curve, &lambdas, &opts);
            write_rotation_curve(&mut create(out)?, &head, &rows)?;
        }
    }
    Ok(())
}

pub fn eigs(cfg: &RunConfig) -> Result<(), Failure> {
    let domain = cfg.domain()?;
    let set = modes(&domain, cfg, 2, 5)?;
    let n = RunConfig::positive("grid", cfg.grid, 101)?;
    let dir = cfg.out()?;
    fs::create_dir_all(dir)?;
    let head = cfg.header();
    let mut index = create(&dir.join("index.csv"))?;
    for l in &head {
        writeln!(index, "# {l}")?;
    }
    writeln!(index, "file,i,j,lambda,eigenvalue,eigenvalue_num,eigenvalue_den")?;
    for m in &set {
        let name = mode_name(m);
        let (a, b) = m.index();
        let (num, den) = match m.key.exact_eigenvalue() {
            Some(r) => (r.numer().to_string(), r.denom().to_string()),
            None => (String::new(), String::new()),
        };
        writeln!(index, "{name},{a},{b},{},{},{num},{den}", fmt_float(m.lambda()), fmt_float(m.eigenvalue))?;
        let mut mh = head.clone();
        mh.push(format!("mode {} ({a}, {b}) lambda={}", m.domain_tag(), fmt_float(m.lambda())));
        write_mode_grid(&mut create(&dir.join(&name))?, &mh, m, n)?;
    }
    index.flush()?;
    Ok(())
}

pub fn specmeasure(cfg: &RunConfig) -> Result<(), Failure> {
    let domain = cfg.domain()?;
    let lambdas = cfg.lambdas()?;
    let set = ModeSet::new(modes(&domain, cfg, 100, 60)?);
    let (lo, hi) = set.modes()[0].bounding_box();
    let f = forcing(cfg, lo, hi, "bump")?;
    let (a, b, n) = parse_range(cfg.epsilon_sweep.as_deref().unwrap_or("1e-4:1e-1:31"))?;
    if !(a > 0.0 && b > a && n > 1) {
        return Err(Failure::config(format!("epsilon sweep needs 0 < a < b and n > 1, got {a}:{b}:{n}")));
    }
    let eps = logspace(a, b, n);
    let hist = spectral_measure(Forcing::Function(&f), &set, &ProjectionOptions::default())?;
    let dir = cfg.out()?;
    fs::create_dir_all(dir)?;
    let mut head = cfg.header();
    head.push(format!("total_mass={} tail={} modes={}", fmt_float(hist.total_mass), fmt_float(hist.tail), hist.modes));
    write_histogram(&mut create(&dir.join("histogram.csv"))?, &head, &hist)?;
    for (i, &l) in lambdas.iter().enumerate() {
        let sweep = hist.epsilon_sweep(l * l, &eps);
        let mut sh = head.clone();
        let slope = sweep.slope.map(fmt_float).unwrap_or_else(|| "none".into());
        sh.push(format!("lambda={} center={} slope={slope}", fmt_float(l), fmt_float(l * l)));
        write_sweep(&mut create(&dir.join(format!("sweep_{i:03}.csv")))?, &sh, &sweep)?;
    }
    Ok(())
}

pub fn evolve(cfg: &RunConfig) -> Result<(), Failure> {
    let domain = cfg.domain()?;
    let lambda = cfg.single_lambda()?;
    let set = ModeSet::new(modes(&domain, cfg, 64, 40)?);
    let (lo, hi) = set.modes()[0].bounding_box();
    let f = forcing(cfg, lo, hi, "bump")?;
    let tmax = RunConfig::positive("tmax", cfg.tmax, 1.0e4)?;
    let samples = RunConfig::positive("samples", cfg.samples, 100_001)?;
    let proj = project(Forcing::Function(&f), &set, &ProjectionOptions { nodes: None, tail_tolerance: Some(1e-3) })?;
    let times = uniform_times(tmax, samples);
    let mut trace = evolve_modal(&proj.coefficients, lambda, &set, &times, &Default::default())?;
    trace.tail = proj.tail;
    let mut head = cfg.header();
    let slope = trace.growth.envelope_slope.map(fmt_float).unwrap_or_else(|| "none".into());
    head.push(format!("growing={} envelope_slope={slope}", trace.growth.growing));
    head.push(format!("tail={} active_modes={}", fmt_float(trace.tail), trace.active_modes));
    write_trace(&mut create(cfg.out()?)?, &head, &trace)?;
    Ok(())
}

#[derive(Serialize)]
struct RightInverseOutput<'a, R> {
    header: Header<'a>,
    report: R,
}

#[derive(Serialize)]
struct Header<'a> {
    version: &'a str,
    config_hash: String,
    config: &'a RunConfig,
}

pub fn rightinv(cfg: &RunConfig) -> Result<(), Failure> {
    let domain = cfg.domain()?;
    let curve = domain.curve()?;
    let lambda = cfg.single_lambda()?;
    let n = RunConfig::positive("grid", cfg.grid, 61)?;
    let region = Region::curve(curve.clone());
    let (lo, hi) = region.bounding_box();
    let f = forcing(cfg, lo, hi, "one")?;
    let grid = GridFunction::from_fn(&region, n, f);
    let sol = right_inverse(&curve, LambdaContext::new(lambda)?, &grid, &RightInverseOptions::default())?;
    let doc = RightInverseOutput {
        header: Header { version: env!("CARGO_PKG_VERSION"), config_hash: cfg.hash(), config: cfg },
        report: &sol.report,
    };
    let mut out = create(cfg.out()?)?;
    serde_json::to_writer_pretty(&mut out, &doc).map_err(internal_waves::Error::from)?;
    writeln!(out)?;
    out.flush()?;
    if sol.report.verified {
        Ok(())
    } else {
        Err(Failure::numerical(format!(
            "right inverse not verified: residual {:e}, boundary norm {:e}",
            sol.report.residual, sol.report.boundary_norm
        )))
    }
}
