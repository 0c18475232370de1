//! Run configuration: TOML file plus flag overrides (flags win).
//!
//! Coefficients come either from a builtin name (`coeffs = "cosine"`) or
//! from a `[coefficients]` section with per-function kind and parameters:
//!
//! ```toml
//! coeffs = "custom"
//! [coefficients]
//! g     = { kind = "cosine",   params = [1.0, 0.5] }   # mean, amplitude
//! omega = { kind = "constant", params = [1.0] }
//! ```
//!
//! Kinds: `constant` (params `[value]`), `cosine` (`[mean, amplitude]`),
//! `fourier` (`[c0, a1, b1, a2, b2, ...]` for `c0 + Σ aₙcos(2πnx) +
//! bₙsin(2πnx)`), `table` (uniform samples over `[0,1)`, at least 64).
//!
//! Profiles are compact strings: `bump:k=2,q=2`,
//! `powerlaw:q=1,delta=0.05,k=96`, `point:center=20,width=0.2,q=1`.

use hfhom::bloch_synthesis::ProfileKind;
use hfhom::coefficients::PeriodicCoefficients;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt;

#[derive(Debug)]
pub enum ConfigError {
    Parse(String),
    Validation(Vec<String>),
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ConfigError::Validation(errs) => {
                writeln!(f, "invalid configuration:")?;
                for e in errs {
                    writeln!(f, "  - {e}")?;
                }
                Ok(())
            }
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct FunctionSpec {
    pub kind: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CoefficientsSection {
    pub g: FunctionSpec,
    pub omega: FunctionSpec,
}

/// The full run configuration as read from a file; every field optional so
/// flags can fill the gaps.
#[derive(Debug, Clone, Default, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub coeffs: Option<String>,
    pub coefficients: Option<CoefficientsSection>,
    pub s: Option<usize>,
    pub condition: Option<String>,
    #[serde(rename = "N")]
    pub n_modes: Option<usize>,
    pub kgrid: Option<usize>,
    pub points_per_cell: Option<usize>,
    pub lmax: Option<usize>,
    pub gap_tol: Option<f64>,
    pub eps: Option<Vec<f64>>,
    pub t: Option<f64>,
    pub t_list: Option<Vec<f64>>,
    pub equation: Option<String>,
    pub profile: Option<String>,
    pub profile_g: Option<String>,
    pub out: Option<String>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn from_path(path: &str) -> Result<FileConfig, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError::Parse(format!("{path}: {e}")))?;
        toml::from_str(&text).map_err(|e| ConfigError::Parse(format!("{path}: {e}")))
    }

    /// Overlay `other` (flag values) on top of `self`; `other` wins.
    pub fn overlaid(mut self, other: &FileConfig) -> FileConfig {
        macro_rules! take {
            ($($f:ident),*) => { $( if other.$f.is_some() { self.$f = other.$f.clone(); } )* };
        }
        take!(coeffs, coefficients, s, condition, n_modes, kgrid, points_per_cell, lmax,
              gap_tol, eps, t, t_list, equation, profile, profile_g, out, seed);
        self
    }
}

/// A validated configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub coeffs_name: String,
    pub coeffs: PeriodicCoefficients,
    pub s: usize,
    pub condition: Option<hfhom::Condition>,
    pub n_modes: usize,
    pub kgrid: usize,
    pub points_per_cell: usize,
    pub lmax: usize,
    pub gap_tol: f64,
    pub eps: Vec<f64>,
    pub t: f64,
    pub t_list: Vec<f64>,
    pub equation: hfhom::Equation,
    pub profile: (ProfileKind, f64),
    pub profile_g: Option<(ProfileKind, f64)>,
    pub out: String,
    pub seed: u64,
}

fn eval_spec(spec: &FunctionSpec, errs: &mut Vec<String>) -> Option<Box<dyn Fn(f64) -> f64>> {
    let p = spec.params.clone();
    match spec.kind.as_str() {
        "constant" => {
            if p.len() != 1 {
                errs.push("constant kind takes exactly one parameter".into());
                return None;
            }
            Some(Box::new(move |_| p[0]))
        }
        "cosine" => {
            if p.len() != 2 {
                errs.push("cosine kind takes [mean, amplitude]".into());
                return None;
            }
            Some(Box::new(move |x| p[0] + p[1] * (2.0 * PI * x).cos()))
        }
        "fourier" => {
            if p.is_empty() || p.len().is_multiple_of(2) {
                errs.push("fourier kind takes [c0, a1, b1, a2, b2, ...]".into());
                return None;
            }
            Some(Box::new(move |x| {
                let mut acc = p[0];
                for n in 0..(p.len() - 1) / 2 {
                    let w = 2.0 * PI * (n + 1) as f64 * x;
                    acc += p[2 * n + 1] * w.cos() + p[2 * n + 2] * w.sin();
                }
                acc
            }))
        }
        other => {
            errs.push(format!("unknown coefficient kind `{other}`"));
            None
        }
    }
}

fn build_coefficients(
    cfg: &FileConfig,
    errs: &mut Vec<String>,
) -> Option<(String, PeriodicCoefficients)> {
    let name = cfg.coeffs.clone().unwrap_or_else(|| "cosine".into());
    if let Some(section) = &cfg.coefficients {
        // `table` kind uses the parameter list as raw samples.
        let result = if section.g.kind == "table" || section.omega.kind == "table" {
            let expand = |sp: &FunctionSpec, errs: &mut Vec<String>| -> Option<Vec<f64>> {
                if sp.kind == "table" {
                    Some(sp.params.clone())
                } else {
                    let f = eval_spec(sp, errs)?;
                    let n = 4096;
                    Some((0..n).map(|j| f(j as f64 / n as f64)).collect())
                }
            };
            let g = expand(&section.g, errs)?;
            let w = expand(&section.omega, errs)?;
            let n = g.len().max(w.len()).max(4096);
            let resample = |v: Vec<f64>| -> Vec<f64> {
                let m = v.len();
                (0..n).map(|j| v[(j * m) / n]).collect()
            };
            PeriodicCoefficients::from_samples(resample(g), resample(w))
        } else {
            let g = eval_spec(&section.g, errs)?;
            let w = eval_spec(&section.omega, errs)?;
            PeriodicCoefficients::validate(g, w, 4096)
        };
        match result {
            Ok(c) => Some((name, c)),
            Err(e) => {
                errs.push(e.to_string());
                None
            }
        }
    } else {
        match PeriodicCoefficients::builtin(&name) {
            Ok(c) => Some((name, c)),
            Err(e) => {
                errs.push(e.to_string());
                None
            }
        }
    }
}

/// Parse a compact profile spec like `bump:k=2,q=2`. Returns the kind and
/// the Sobolev label.
pub fn parse_profile(s: &str) -> Result<(ProfileKind, f64), String> {
    let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
    let mut kv = std::collections::BTreeMap::new();
    for item in rest.split(',').filter(|p| !p.is_empty()) {
        let (k, v) = item
            .split_once('=')
            .ok_or_else(|| format!("bad profile parameter `{item}` (want key=value)"))?;
        let v: f64 = v.parse().map_err(|_| format!("bad number in `{item}`"))?;
        kv.insert(k.trim().to_string(), v);
    }
    let get = |key: &str, default: Option<f64>| -> Result<f64, String> {
        kv.get(key)
            .copied()
            .or(default)
            .ok_or_else(|| format!("profile `{s}` is missing `{key}=`"))
    };
    match kind {
        "bump" => {
            let k_max = get("k", Some(2.0))?;
            let q = get("q", Some(2.0))?;
            Ok((ProfileKind::Bump { k_max }, q))
        }
        "powerlaw" => {
            let q = get("q", None)?;
            let delta = get("delta", Some(0.05))?;
            let k_max = get("k", Some(96.0))?;
            Ok((ProfileKind::PowerLaw { q, delta, k_max }, q))
        }
        "point" => {
            let center = get("center", None)?;
            let width = get("width", Some(0.01 * center.abs().max(1.0)))?;
            let q = get("q", Some(1.0))?;
            Ok((ProfileKind::Point { center, width }, q))
        }
        other => Err(format!("unsupported profile kind `{other}`")),
    }
}

/// Validate and fill defaults; collects every violation before failing.
pub fn finalize(cfg: FileConfig) -> Result<RunConfig, ConfigError> {
    let mut errs = Vec::new();
    let coeffs = build_coefficients(&cfg, &mut errs);

    let s = cfg.s.unwrap_or(1);
    if s < 1 {
        errs.push("band index s must be ≥ 1".into());
    }
    let condition = match cfg.condition.as_deref() {
        None | Some("auto") => None,
        Some(c) => match hfhom::Condition::parse(c) {
            Some(c) => Some(c),
            None => {
                errs.push(format!("unknown condition `{c}` (want Cond1..Cond4 or auto)"));
                None
            }
        },
    };
    let n_modes = cfg.n_modes.unwrap_or(64);
    if n_modes < 8 {
        errs.push("N (Galerkin truncation) must be ≥ 8".into());
    }
    let kgrid = cfg.kgrid.unwrap_or(257);
    if kgrid < 3 || kgrid.is_multiple_of(2) {
        errs.push("kgrid must be an odd number ≥ 3".into());
    }
    let points_per_cell = cfg.points_per_cell.unwrap_or(8);
    if points_per_cell < 4 {
        errs.push("points_per_cell must be ≥ 4".into());
    }
    let lmax = cfg.lmax.unwrap_or_else(|| (s + 1).max(5));
    if lmax < s + 1 {
        errs.push(format!("lmax = {lmax} too small: need at least s+1 = {}", s + 1));
    }
    let eps = cfg.eps.clone().unwrap_or_else(|| vec![1.0 / 32.0]);
    if eps.is_empty() || eps.iter().any(|&e| !(e > 0.0 && e <= 1.0)) {
        errs.push("ε values must lie in (0, 1]".into());
    }
    if eps.windows(2).any(|w| w[1] >= w[0]) {
        errs.push("ε list must be strictly decreasing".into());
    }
    let t = cfg.t.unwrap_or(1.0);
    let t_list = cfg.t_list.clone().unwrap_or_else(|| vec![t]);
    if t_list.iter().any(|&tt| tt <= 0.0) {
        errs.push("time values must be positive".into());
    }
    let equation = match cfg.equation.as_deref() {
        None => hfhom::Equation::Schrodinger,
        Some(e) => match hfhom::Equation::parse(e) {
            Some(e) => e,
            None => {
                errs.push(format!("unknown equation `{e}`"));
                hfhom::Equation::Schrodinger
            }
        },
    };
    let profile = match parse_profile(cfg.profile.as_deref().unwrap_or("bump:k=2,q=2")) {
        Ok(p) => p,
        Err(e) => {
            errs.push(e);
            (ProfileKind::Bump { k_max: 2.0 }, 2.0)
        }
    };
    let profile_g = match cfg.profile_g.as_deref() {
        None => None,
        Some(sp) => match parse_profile(sp) {
            Ok(p) => Some(p),
            Err(e) => {
                errs.push(e);
                None
            }
        },
    };
    let out = cfg.out.clone().unwrap_or_else(|| "out".into());
    let seed = cfg.seed.unwrap_or(7);

    match (coeffs, errs.is_empty()) {
        (Some((coeffs_name, coeffs)), true) => Ok(RunConfig {
            coeffs_name,
            coeffs,
            s,
            condition,
            n_modes,
            kgrid,
            points_per_cell,
            lmax,
            gap_tol: cfg.gap_tol.unwrap_or(1e-6),
            eps,
            t,
            t_list,
            equation,
            profile,
            profile_g,
            out,
            seed,
        }),
        _ => Err(ConfigError::Validation(errs)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_flags_fill_defaults() {
        let cfg = FileConfig {
            coeffs: Some("cosine".into()),
            s: Some(1),
            condition: Some("Cond1".into()),
            eps: Some(vec![1.0 / 32.0]),
            t: Some(1.0),
            ..Default::default()
        };
        let rc = finalize(cfg).unwrap();
        assert_eq!(rc.n_modes, 64);
        assert_eq!(rc.kgrid, 257);
        assert_eq!(rc.points_per_cell, 8);
    }

    #[test]
    fn increasing_eps_list_is_rejected() {
        let cfg = FileConfig {
            coeffs: Some("cosine".into()),
            eps: Some(vec![1.0 / 16.0, 1.0 / 8.0]),
            ..Default::default()
        };
        match finalize(cfg) {
            Err(ConfigError::Validation(errs)) => {
                assert!(errs.iter().any(|e| e.contains("strictly decreasing")));
            }
            other => panic!("expected validation failure, got {other:?}"),
        }
    }

    #[test]
    fn toml_round_trip_is_identity() {
        let cfg = FileConfig {
            coeffs: Some("custom".into()),
            coefficients: Some(CoefficientsSection {
                g: FunctionSpec { kind: "cosine".into(), params: vec![1.0, 0.5] },
                omega: FunctionSpec { kind: "constant".into(), params: vec![1.0] },
            }),
            s: Some(1),
            condition: Some("Cond3".into()),
            n_modes: Some(48),
            kgrid: Some(129),
            points_per_cell: Some(16),
            lmax: Some(6),
            gap_tol: Some(1e-7),
            eps: Some(vec![0.0625, 0.03125]),
            t: Some(2.0),
            t_list: Some(vec![1.0, 2.0, 4.0]),
            equation: Some("wave".into()),
            profile: Some("bump:k=2,q=1.5".into()),
            profile_g: Some("powerlaw:q=0.5,delta=0.05,k=96".into()),
            out: Some("results".into()),
            seed: Some(42),
        };
        let text = toml::to_string(&cfg).unwrap();
        let back: FileConfig = toml::from_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn profile_specs_parse() {
        let (k, q) = parse_profile("bump:k=2,q=2").unwrap();
        assert!(matches!(k, ProfileKind::Bump { k_max } if (k_max - 2.0).abs() < 1e-12));
        assert_eq!(q, 2.0);
        let (k, q) = parse_profile("powerlaw:q=1,delta=0.05,k=96").unwrap();
        assert!(matches!(k, ProfileKind::PowerLaw { .. }));
        assert_eq!(q, 1.0);
        assert!(parse_profile("gauss:sigma=1").is_err());
    }

    #[test]
    fn table_kind_matches_closed_form() {
        let n = 512;
        let samples: Vec<f64> = (0..n)
            .map(|j| 1.0 + 0.5 * (2.0 * PI * j as f64 / n as f64).cos())
            .collect();
        let cfg = FileConfig {
            coeffs: Some("custom".into()),
            coefficients: Some(CoefficientsSection {
                g: FunctionSpec { kind: "table".into(), params: samples },
                omega: FunctionSpec { kind: "constant".into(), params: vec![1.0] },
            }),
            ..Default::default()
        };
        let rc = finalize(cfg).unwrap();
        assert!((rc.coeffs.alpha0 - 0.5).abs() < 1e-6);
        assert!((rc.coeffs.alpha1 - 1.5).abs() < 1e-6);
    }

    #[test]
    fn custom_fourier_coefficients_validate() {
        let cfg = FileConfig {
            coeffs: Some("custom".into()),
            coefficients: Some(CoefficientsSection {
                g: FunctionSpec { kind: "fourier".into(), params: vec![1.0, 0.3, 0.1] },
                omega: FunctionSpec { kind: "constant".into(), params: vec![1.0] },
            }),
            ..Default::default()
        };
        let rc = finalize(cfg).unwrap();
        assert!(rc.coeffs.alpha0 > 0.5 && rc.coeffs.alpha1 < 1.5);
    }
}
