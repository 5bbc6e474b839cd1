//! Flat `key = value` scenario files.
//!
//! Blank lines and lines starting with `#` are ignored. Every key may appear
//! at most once and unknown keys are rejected.
//!
//! | key | default | meaning |
//! |---|---|---|
//! | `mode` | command line | must match the command if given |
//! | `f`, `h` | `constant:0` | `constant:c`, `gaussian:c`, `rational:c`, `affine:slope,intercept` |
//! | `flow_table` | | CSV `y,f,h` (excludes `f`, `h`, `initial_data`) |
//! | `initial_data` | | CSV `y,B0,A0` (excludes `f`, `h`, `flow_table`) |
//! | `K`, `n` | `4`, `512` | window `s ∈ [1, K]` and grid size |
//! | `t` | `0,1,3,7,15,31` | times |
//! | `r_min`, `r_max`, `r_points` | `1`, `4`, `16` | radial grid `(r_min, r_max]` |
//! | `profile` | per command | `g2-cone`, `constant:a,b`, `linear:a,b`, `flow:t`, `random` |
//! | `quad_tol`, `root_tol`, `verify_tol` | `1e-10`, `1e-10`, `1e-8` | tolerances |
//! | `refine_tol`, `oracle_tol` | `1e-6`, `1e-6` | grid refinement and oracle agreement |
//! | `samples` | `100` | random profiles |
//! | `oracle_points`, `oracle_steps` | `16`, `2000` | characteristic cross-checks |
//! | `reduction` | `10` | required metric deviation reduction for `converge` |
//! | `metric_threshold` | | absolute final metric deviation instead of `reduction` |
//! | `format` | per command | `csv` or `json` |
//! | `out` | stdout | output path |
//! | `seed` | `1729` | random seed |
//! | `inject_sign_flip` | | test fixture: flip one closed-form `dφ` term, e.g. `4567` |

use std::collections::HashSet;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use thiserror::Error;

use crate::exterior::Blade;
use crate::flow::data::{Affine, Constant, GaussianBump, RationalDecay, SmoothFn};

pub const DEFAULT_SEED: u64 = 1729;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

fn line_err(line: usize, message: impl Into<String>) -> ConfigError {
    ConfigError::Line { line, message: message.into() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    VerifyAppendix,
    Solve,
    Converge,
    Torsion,
    CheckMetric,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyAppendix => "verify-appendix",
            Command::Solve => "solve",
            Command::Converge => "converge",
            Command::Torsion => "torsion",
            Command::CheckMetric => "check-metric",
        }
    }
}

impl FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Command::from_str_name(s).ok_or_else(|| format!("unknown mode {s:?}"))
    }
}

impl Command {
    fn from_str_name(s: &str) -> Option<Self> {
        Command::value_variants().iter().copied().find(|c| c.name() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

fn parse_number(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("expected a number, found {s:?}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected two numbers, found {s:?}"))?;
    Ok((parse_number(a)?, parse_number(b)?))
}

/// A built-in data function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FnSpec {
    Constant(f64),
    Gaussian(f64),
    Rational(f64),
    Affine { slope: f64, intercept: f64 },
}

impl FnSpec {
    pub fn build(self) -> Box<dyn SmoothFn> {
        match self {
            FnSpec::Constant(c) => Box::new(Constant(c)),
            FnSpec::Gaussian(c) => Box::new(GaussianBump(c)),
            FnSpec::Rational(c) => Box::new(RationalDecay(c)),
            FnSpec::Affine { slope, intercept } => Box::new(Affine { slope, intercept }),
        }
    }
}

impl FromStr for FnSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let (name, args) = s.split_once(':').ok_or_else(|| format!("expected name:args, found {s:?}"))?;
        match name.trim() {
            "constant" => Ok(FnSpec::Constant(parse_number(args)?)),
            "gaussian" => Ok(FnSpec::Gaussian(parse_number(args)?)),
            "rational" => Ok(FnSpec::Rational(parse_number(args)?)),
            "affine" => {
                let (slope, intercept) = parse_pair(args)?;
                Ok(FnSpec::Affine { slope, intercept })
            }
            other => Err(format!("unknown function {other:?}")),
        }
    }
}

impl fmt::Display for FnSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FnSpec::Constant(c) => write!(f, "constant:{c:?}"),
            FnSpec::Gaussian(c) => write!(f, "gaussian:{c:?}"),
            FnSpec::Rational(c) => write!(f, "rational:{c:?}"),
            FnSpec::Affine { slope, intercept } => write!(f, "affine:{slope:?},{intercept:?}"),
        }
    }
}

/// Profile for `torsion` and `check-metric`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileSpec {
    G2Cone,
    Constant { a: f64, b: f64 },
    Linear { a: f64, b: f64 },
    Flow { t: f64 },
    Random,
}

impl FromStr for ProfileSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        match s {
            "g2-cone" => return Ok(ProfileSpec::G2Cone),
            "random" => return Ok(ProfileSpec::Random),
            _ => {}
        }
        let (name, args) = s.split_once(':').ok_or_else(|| format!("unknown profile {s:?}"))?;
        match name {
            "constant" => parse_pair(args).map(|(a, b)| ProfileSpec::Constant { a, b }),
            "linear" => parse_pair(args).map(|(a, b)| ProfileSpec::Linear { a, b }),
            "flow" => {
                let t = parse_number(args)?;
                if t < 0.0 {
                    return Err(format!("flow time {t} must be nonnegative"));
                }
                Ok(ProfileSpec::Flow { t })
            }
            other => Err(format!("unknown profile {other:?}")),
        }
    }
}

impl fmt::Display for ProfileSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProfileSpec::G2Cone => write!(f, "g2-cone"),
            ProfileSpec::Constant { a, b } => write!(f, "constant:{a:?},{b:?}"),
            ProfileSpec::Linear { a, b } => write!(f, "linear:{a:?},{b:?}"),
            ProfileSpec::Flow { t } => write!(f, "flow:{t:?}"),
            ProfileSpec::Random => write!(f, "random"),
        }
    }
}

/// Where `(f, h)` come from.
#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Builtin { f: FnSpec, h: FnSpec },
    FlowTable(PathBuf),
    InitialData(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub mode: Option<Command>,
    pub data: DataSource,
    pub k: f64,
    pub n: usize,
    pub t: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub r_points: usize,
    pub profile: Option<ProfileSpec>,
    pub quad_tol: f64,
    pub root_tol: f64,
    pub verify_tol: f64,
    pub refine_tol: f64,
    pub oracle_tol: f64,
    pub samples: usize,
    pub oracle_points: usize,
    pub oracle_steps: usize,
    pub reduction: f64,
    pub metric_threshold: Option<f64>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub inject_sign_flip: Option<Blade>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            mode: None,
            data: DataSource::Builtin { f: FnSpec::Constant(0.0), h: FnSpec::Constant(0.0) },
            k: 4.0,
            n: 512,
            t: vec![0.0, 1.0, 3.0, 7.0, 15.0, 31.0],
            r_min: 1.0,
            r_max: 4.0,
            r_points: 16,
            profile: None,
            quad_tol: 1e-10,
            root_tol: 1e-10,
            verify_tol: 1e-8,
            refine_tol: 1e-6,
            oracle_tol: 1e-6,
            samples: 100,
            oracle_points: 16,
            oracle_steps: 2000,
            reduction: 10.0,
            metric_threshold: None,
            format: None,
            out: None,
            seed: DEFAULT_SEED,
            inject_sign_flip: None,
        }
    }
}

// Upper bounds keep a hostile config from requesting absurd work.
const MAX_GRID: usize = 1 << 22;
const MAX_SAMPLES: usize = 1 << 24;

fn positive(v: f64, what: &str) -> Result<f64, String> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{what} must be positive"))
    }
}

fn count(s: &str, min: usize, max: usize) -> Result<usize, String> {
    let v: usize = s.trim().parse().map_err(|_| format!("expected an integer, found {s:?}"))?;
    if v < min || v > max {
        return Err(format!("{v} outside {min}..={max}"));
    }
    Ok(v)
}

fn parse_blade(s: &str) -> Result<Blade, String> {
    let digits: Vec<u8> = s
        .trim()
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as u8).ok_or_else(|| format!("bad index {c:?}")))
        .collect::<Result<_, _>>()?;
    if digits.len() != 4 {
        return Err(format!("expected a 4-form term such as 4567, found {s:?}"));
    }
    match Blade::from_indices(&digits) {
        Ok(Some((blade, _))) => Ok(blade),
        Ok(None) => Err(format!("repeated index in {s:?}")),
        Err(e) => Err(e.to_string()),
    }
}

impl ScenarioConfig {
    /// Parses a scenario file. Relative paths stay relative; see [`Self::load`].
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = ScenarioConfig::default();
        let mut seen = HashSet::new();
        let (mut f, mut h) = (None, None);
        let mut table = None;
        let mut initial = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let trimmed = raw.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed
                .split_once('=')
                .ok_or_else(|| line_err(line, "expected key = value"))?;
            let (key, value) = (key.trim(), value.trim());
            if value.is_empty() {
                return Err(line_err(line, format!("empty value for {key}")));
            }
            if !seen.insert(key.to_string()) {
                return Err(line_err(line, format!("duplicate key {key}")));
            }
            let e = |m: String| line_err(line, format!("{key}: {m}"));
            match key {
                "mode" => cfg.mode = Some(value.parse().map_err(e)?),
                "f" => f = Some(value.parse::<FnSpec>().map_err(e)?),
                "h" => h = Some(value.parse::<FnSpec>().map_err(e)?),
                "flow_table" => table = Some(PathBuf::from(value)),
                "initial_data" => initial = Some(PathBuf::from(value)),
                "K" => {
                    let k = parse_number(value).map_err(e)?;
                    if !(k > 1.0) {
                        return Err(e("must exceed 1".into()));
                    }
                    cfg.k = k;
                }
                "n" => cfg.n = count(value, 2, MAX_GRID).map_err(e)?,
                "t" => {
                    let ts = value
                        .split(',')
                        .map(parse_number)
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(e)?;
                    if ts.iter().any(|t| *t < 0.0) {
                        return Err(e("times must be nonnegative".into()));
                    }
                    if ts.len() > MAX_GRID {
                        return Err(e("too many times".into()));
                    }
                    cfg.t = ts;
                }
                "r_min" => cfg.r_min = parse_number(value).map_err(e)?,
                "r_max" => cfg.r_max = parse_number(value).map_err(e)?,
                "r_points" => cfg.r_points = count(value, 1, MAX_GRID).map_err(e)?,
                "profile" => cfg.profile = Some(value.parse().map_err(e)?),
                "quad_tol" => cfg.quad_tol = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "root_tol" => cfg.root_tol = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "verify_tol" => cfg.verify_tol = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "refine_tol" => cfg.refine_tol = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "oracle_tol" => cfg.oracle_tol = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "samples" => cfg.samples = count(value, 1, MAX_SAMPLES).map_err(e)?,
                "oracle_points" => cfg.oracle_points = count(value, 0, MAX_SAMPLES).map_err(e)?,
                "oracle_steps" => cfg.oracle_steps = count(value, 1, MAX_SAMPLES).map_err(e)?,
                "reduction" => cfg.reduction = parse_number(value).and_then(|v| positive(v, key)).map_err(e)?,
                "metric_threshold" => {
                    cfg.metric_threshold = Some(parse_number(value).and_then(|v| positive(v, key)).map_err(e)?)
                }
                "format" => {
                    cfg.format = Some(match value {
                        "csv" => Format::Csv,
                        "json" => Format::Json,
                        _ => return Err(e(format!("expected csv or json, found {value:?}"))),
                    })
                }
                "out" => cfg.out = Some(PathBuf::from(value)),
                "seed" => cfg.seed = value.parse().map_err(|_| e(format!("expected an integer, found {value:?}")))?,
                "inject_sign_flip" => cfg.inject_sign_flip = Some(parse_blade(value).map_err(e)?),
                _ => return Err(line_err(line, format!("unknown key {key}"))),
            }
        }
        let builtin = f.is_some() || h.is_some();
        cfg.data = match (builtin, table, initial) {
            (_, Some(_), Some(_)) => {
                return Err(ConfigError::Invalid("flow_table and initial_data are exclusive".into()))
            }
            (true, Some(_), None) | (true, None, Some(_)) => {
                return Err(ConfigError::Invalid("f/h cannot be combined with a data table".into()))
            }
            (_, Some(p), None) => DataSource::FlowTable(p),
            (_, None, Some(p)) => DataSource::InitialData(p),
            (_, None, None) => DataSource::Builtin {
                f: f.unwrap_or(FnSpec::Constant(0.0)),
                h: h.unwrap_or(FnSpec::Constant(0.0)),
            },
        };
        if !(cfg.r_min >= 0.0 && cfg.r_min < cfg.r_max) {
            return Err(ConfigError::Invalid(format!(
                "need 0 <= r_min < r_max, got r_min = {}, r_max = {}",
                cfg.r_min, cfg.r_max
            )));
        }
        Ok(cfg)
    }

    /// Reads and parses a file, resolving data paths against its directory.
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        let resolve = |p: &PathBuf| if p.is_relative() { base.join(p) } else { p.clone() };
        cfg.data = match &cfg.data {
            DataSource::FlowTable(p) => DataSource::FlowTable(resolve(p)),
            DataSource::InitialData(p) => DataSource::InitialData(resolve(p)),
            other => other.clone(),
        };
        cfg.out = cfg.out.as_ref().map(resolve);
        Ok(cfg)
    }

    /// Radial grid `r_min + (r_max − r_min)·i/r_points`, `i = 1..=r_points`.
    pub fn r_grid(&self) -> Vec<f64> {
        (1..=self.r_points)
            .map(|i| self.r_min + (self.r_max - self.r_min) * i as f64 / self.r_points as f64)
            .collect()
    }

    /// Every setting after defaults, as strings in a fixed order.
    pub fn resolved(&self, command: Command) -> Vec<(&'static str, String)> {
        let list = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(",");
        let mut out = vec![("mode", command.name().to_string())];
        match &self.data {
            DataSource::Builtin { f, h } => {
                out.push(("f", f.to_string()));
                out.push(("h", h.to_string()));
            }
            DataSource::FlowTable(p) => out.push(("flow_table", p.display().to_string())),
            DataSource::InitialData(p) => out.push(("initial_data", p.display().to_string())),
        }
        out.extend([
            ("K", format!("{:?}", self.k)),
            ("n", self.n.to_string()),
            ("t", list(&self.t)),
            ("r_min", format!("{:?}", self.r_min)),
            ("r_max", format!("{:?}", self.r_max)),
            ("r_points", self.r_points.to_string()),
            ("profile", self.profile_for(command).map_or("none".into(), |p| p.to_string())),
            ("quad_tol", format!("{:e}", self.quad_tol)),
            ("root_tol", format!("{:e}", self.root_tol)),
            ("verify_tol", format!("{:e}", self.verify_tol)),
            ("refine_tol", format!("{:e}", self.refine_tol)),
            ("oracle_tol", format!("{:e}", self.oracle_tol)),
            ("samples", self.samples.to_string()),
            ("oracle_points", self.oracle_points.to_string()),
            ("oracle_steps", self.oracle_steps.to_string()),
            ("reduction", format!("{:?}", self.reduction)),
            (
                "metric_threshold",
                self.metric_threshold.map_or("none".into(), |v| format!("{v:e}")),
            ),
            ("format", match self.format_for(command) {
                Format::Csv => "csv".into(),
                Format::Json => "json".into(),
            }),
            ("seed", self.seed.to_string()),
        ]);
        if let Some(b) = self.inject_sign_flip {
            out.push(("inject_sign_flip", b.to_string()));
        }
        out
    }

    pub fn profile_for(&self, command: Command) -> Option<ProfileSpec> {
        match command {
            Command::Torsion => Some(self.profile.unwrap_or(ProfileSpec::G2Cone)),
            Command::CheckMetric => Some(self.profile.unwrap_or(ProfileSpec::Random)),
            _ => self.profile,
        }
    }

    pub fn format_for(&self, command: Command) -> Format {
        self.format.unwrap_or(match command {
            Command::VerifyAppendix | Command::Converge => Format::Json,
            _ => Format::Csv,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let cfg = ScenarioConfig::parse("").unwrap();
        assert_eq!(cfg, ScenarioConfig::default());
        assert_eq!(cfg.r_grid().len(), 16);
        assert_eq!(cfg.r_grid()[15], 4.0);
    }

    #[test]
    fn full_file() {
        let text = "# scenario\nmode = converge\nf = gaussian:0.1\nh = constant:-1\nK = 4\nn = 512\n\
                    t = 0, 1, 3\nseed = 7\nformat = csv\n";
        let cfg = ScenarioConfig::parse(text).unwrap();
        assert_eq!(cfg.mode, Some(Command::Converge));
        assert_eq!(cfg.data, DataSource::Builtin { f: FnSpec::Gaussian(0.1), h: FnSpec::Constant(-1.0) });
        assert_eq!(cfg.t, vec![0.0, 1.0, 3.0]);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.format, Some(Format::Csv));
    }

    #[test]
    fn rejects_unknown_and_duplicate_keys() {
        assert!(matches!(ScenarioConfig::parse("bogus = 1"), Err(ConfigError::Line { line: 1, .. })));
        assert!(ScenarioConfig::parse("n = 4\nn = 5").is_err());
        assert!(ScenarioConfig::parse("n").is_err());
        assert!(ScenarioConfig::parse("n =").is_err());
    }

    #[test]
    fn rejects_bad_values() {
        for text in [
            "K = 1", "K = nan", "n = 1", "n = -3", "t = 0,-1", "f = cubic:1", "f = constant:x",
            "profile = linear:1", "format = xml", "quad_tol = 0", "r_min = 5", "seed = -1",
            "inject_sign_flip = 456", "inject_sign_flip = 4466", "inject_sign_flip = 4568",
            "f = constant:0\nflow_table = a.csv", "flow_table = a.csv\ninitial_data = b.csv",
            "mode = fly",
        ] {
            assert!(ScenarioConfig::parse(text).is_err(), "{text}");
        }
    }

    #[test]
    fn spec_strings_round_trip() {
        for s in ["constant:0.5", "gaussian:0.1", "rational:2.0", "affine:1.0,0.0"] {
            assert_eq!(s.parse::<FnSpec>().unwrap().to_string(), s);
        }
        for s in ["g2-cone", "random", "constant:1.0,2.0", "linear:0.5,0.25", "flow:3.0"] {
            assert_eq!(s.parse::<ProfileSpec>().unwrap().to_string(), s);
        }
    }

    #[test]
    fn sign_flip_blade() {
        let cfg = ScenarioConfig::parse("inject_sign_flip = 4567").unwrap();
        assert_eq!(cfg.inject_sign_flip.unwrap().to_string(), "e^4567");
    }

    #[test]
    fn resolved_echo_is_complete() {
        let cfg = ScenarioConfig::default();
        let keys: Vec<_> = cfg.resolved(Command::Torsion).into_iter().map(|(k, _)| k).collect();
        assert!(keys.contains(&"profile") && keys.contains(&"seed") && keys.contains(&"f"));
    }
}
