use std::path::{Path, PathBuf};

use internal_waves::BoundaryCurve;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::Failure;

/// Where the boundary comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Disk,
    Square,
    Rectangle { width: f64, height: f64 },
    Ellipse { a: [[f64; 2]; 2], v: [f64; 2] },
    File(PathBuf),
}

impl Domain {
    /// `disk`, `square`, `rectangle:a,b`, `ellipse:a11,a12,a21,a22[,v1,v2]`, or a path to a curve JSON file.
    pub fn parse(spec: &str) -> Result<Self, Failure> {
        let (head, tail) = spec.split_once(':').unwrap_or((spec, ""));
        let nums = || -> Result<Vec<f64>, Failure> {
            tail.split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|_| Failure::config(format!("bad number {s:?} in domain {spec:?}"))))
                .collect()
        };
        match head {
            "disk" if tail.is_empty() => Ok(Domain::Disk),
            "square" if tail.is_empty() => Ok(Domain::Square),
            "rectangle" => match nums()?[..] {
                [width, height] if width > 0.0 && height > 0.0 => Ok(Domain::Rectangle { width, height }),
                _ => Err(Failure::config(format!("rectangle needs two positive sides, got {tail:?}"))),
            },
            "ellipse" => {
                let n = nums()?;
                let v = match n.len() {
                    4 => [0.0, 0.0],
                    6 => [n[4], n[5]],
                    _ => return Err(Failure::config(format!("ellipse needs 4 or 6 numbers, got {}", n.len()))),
                };
                Ok(Domain::Ellipse { a: [[n[0], n[1]], [n[2], n[3]]], v })
            }
            _ => Ok(Domain::File(PathBuf::from(spec))),
        }
    }

    /// Boundary curve for the dynamical commands; square and rectangle have corners.
    pub fn curve(&self) -> Result<BoundaryCurve, Failure> {
        match self {
            Domain::Disk => Ok(BoundaryCurve::circle()),
            Domain::Ellipse { a, v } => Ok(BoundaryCurve::ellipse(*a, *v)?),
            Domain::File(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
                Ok(BoundaryCurve::from_json(&text)?)
            }
            Domain::Square | Domain::Rectangle { .. } => {
                Err(Failure::config("square and rectangle have no smooth boundary curve".to_string()))
            }
        }
    }
}

/// Parses `a:b:n`.
pub fn parse_range(spec: &str) -> Result<(f64, f64, usize), Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Failure::config(format!("expected a:b:n, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let a = parts[0].parse::<f64>().map_err(|_| bad())?;
    let b = parts[1].parse::<f64>().map_err(|_| bad())?;
    let n = parts[2].parse::<usize>().map_err(|_| bad())?;
    Ok((a, b, n))
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.log10(), b.log10(), n).into_iter().map(|e| 10f64.powf(e)).collect()
}

/// Fully resolved run configuration. Serializes to the canonical form that is hashed.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: String,
    pub domain: Option<String>,
    pub lambda: Option<Vec<f64>>,
    pub lambda_grid: Option<String>,
    pub orbit: Option<usize>,
    pub kmax: Option<u32>,
    pub nmax: Option<u32>,
    pub grid: Option<usize>,
    pub epsilon_sweep: Option<String>,
    pub forcing: Option<String>,
    pub tmax: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    #[serde(skip_serializing)]
    pub out: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident, $($field:ident),*) => {
        $( if $src.$field.is_some() { $dst.$field = $src.$field.clone(); } )*
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::config(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::config(format!("bad config {}: {e}", path.display())))
    }

    /// Values set in `flags` take precedence over `self`.
    pub fn overlay(mut self, flags: &RunConfig) -> Self {
        overlay!(self, flags, domain, lambda, lambda_grid, orbit, kmax, nmax, grid, epsilon_sweep, forcing, tmax, samples, seed, out);
        self.command = flags.command.clone();
        self
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Comment lines opening every output file.
    pub fn header(&self) -> Vec<String> {
        vec![
            format!("iwaves {}", env!("CARGO_PKG_VERSION")),
            format!("config-hash: {}", self.hash()),
            format!("config: {}", self.canonical_json()),
        ]
    }

    pub fn domain(&self) -> Result<Domain, Failure> {
        Domain::parse(self.domain.as_deref().unwrap_or("disk"))
    }

    /// The λ values requested through `lambda` and/or `lambda_grid`, each checked to lie in (0, 1).
    pub fn lambdas(&self) -> Result<Vec<f64>, Failure> {
        let mut out = self.lambda.clone().unwrap_or_default();
        if let Some(g) = &self.lambda_grid {
            let (a, b, n) = parse_range(g)?;
            out.extend(linspace(a, b, n));
        }
        if out.is_empty() {
            return Err(Failure::config("no lambda values given".to_string()));
        }
        if let Some(bad) = out.iter().find(|l| !(**l > 0.0 && **l < 1.0)) {
            return Err(Failure::config(format!("lambda {bad} outside (0, 1)")));
        }
        Ok(out)
    }

    pub fn single_lambda(&self) -> Result<f64, Failure> {
        match self.lambdas()?[..] {
            [l] => Ok(l),
            _ => Err(Failure::config("this command takes exactly one lambda".to_string())),
        }
    }

    pub fn positive<T: PartialOrd + Default + Copy + std::fmt::Display>(name: &str, v: Option<T>, default: T) -> Result<T, Failure> {
        let v = v.unwrap_or(default);
        if v > T::default() {
            Ok(v)
        } else {
            Err(Failure::config(format!("{name} must be positive, got {v}")))
        }
    }

    pub fn out(&self) -> Result<&Path, Failure> {
        self.out.as_deref().ok_or_else(|| Failure::config("--out is required".to_string()))
    }
}
