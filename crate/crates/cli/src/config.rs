//! Run configuration: defaults, the flat key = value config file format
//! and command-line overrides.
//!
//! Config files are plain lines of `key = value`; `#` starts a comment,
//! nested competitor settings use dotted keys (`competitor.a`). Unknown
//! keys are rejected with a line diagnostic.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use capcone::simons::{CompetitorFamily, CompetitorSpec};

/// Input-side failure: maps to exit code 2.
#[derive(Debug, Clone)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    CheckSpectral,
    CheckJets,
    CheckBoundary,
    ScanRigidity,
    FullReport,
}

impl Command {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "check-spectral" => Ok(Command::CheckSpectral),
            "check-jets" => Ok(Command::CheckJets),
            "check-boundary" => Ok(Command::CheckBoundary),
            "scan-rigidity" => Ok(Command::ScanRigidity),
            "full-report" => Ok(Command::FullReport),
            other => Err(ConfigError(format!(
                "unknown command '{other}' (expected check-spectral, check-jets, check-boundary, scan-rigidity or full-report)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckSpectral => "check-spectral",
            Command::CheckJets => "check-jets",
            Command::CheckBoundary => "check-boundary",
            Command::ScanRigidity => "scan-rigidity",
            Command::FullReport => "full-report",
        }
    }
}

/// Residual tolerances; every default is pinned here and can be
/// overridden through `tolerance.*` keys.
#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    /// Jet constraint re-substitution and trace residuals.
    pub jet_closure: f64,
    /// Free-boundary curvature identity residuals.
    pub fb_identity: f64,
    /// Boundary derivative closures (direct vs closed form).
    pub boundary_identity: f64,
    /// Normalized interior-chain gaps (scaled by the cubic curvature scale).
    pub chain_gap: f64,
    /// Scan value vs reference constant.
    pub scan_match: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            jet_closure: 1e-12,
            fb_identity: 1e-12,
            boundary_identity: 1e-10,
            chain_gap: 1e-12,
            scan_match: 1e-6,
        }
    }
}

/// Fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub command: Command,
    pub n: usize,
    pub theta_degrees: f64,
    pub competitor_a: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    pub exact: bool,
    pub tolerances: Tolerances,
    pub out_path: Option<PathBuf>,
    /// Normalization notes collected while resolving the config.
    pub notices: Vec<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            command: Command::FullReport,
            n: 4,
            theta_degrees: 45.0,
            competitor_a: 4.0,
            alpha: 1.0 / 3.0,
            epsilon: 0.0,
            samples: 10_000,
            seed: 0,
            exact: false,
            tolerances: Tolerances::default(),
            out_path: None,
            notices: Vec::new(),
        }
    }
}

/// Optional command-line overrides, applied after the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<String>,
    pub n: Option<usize>,
    pub theta_degrees: Option<f64>,
    pub alpha: Option<f64>,
    pub competitor_a: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub exact: bool,
    pub out_path: Option<PathBuf>,
}

impl RunConfig {
    /// Reads a config file and folds it into self.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        self.apply_str(&text)
    }

    pub fn apply_str(&mut self, text: &str) -> Result<(), ConfigError> {
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError(format!("line {}: expected 'key = value', got '{raw}'", lineno + 1))
            })?;
            let key = key.trim();
            let value = value.trim();
            self.set_key(key, value)
                .map_err(|e| ConfigError(format!("line {}: {}", lineno + 1, e.0)))?;
        }
        Ok(())
    }

    fn set_key(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigError> {
            value
                .parse()
                .map_err(|_| ConfigError(format!("key '{key}': cannot parse '{value}'")))
        }
        match key {
            "command" => self.command = Command::parse(value)?,
            "n" => self.n = num(key, value)?,
            "theta_degrees" => self.theta_degrees = num(key, value)?,
            "samples" => self.samples = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "exact" => self.exact = num(key, value)?,
            "out" => self.out_path = Some(PathBuf::from(value)),
            "competitor.family" => match value {
                "split-quadratic" | "power-of-norm-a" => {
                    if value == "power-of-norm-a" {
                        self.competitor_a = 1.0;
                    }
                }
                other => {
                    return Err(ConfigError(format!(
                        "key 'competitor.family': unknown family '{other}'"
                    )))
                }
            },
            "competitor.a" => self.competitor_a = num(key, value)?,
            "competitor.alpha" => self.alpha = num(key, value)?,
            "competitor.epsilon" => self.epsilon = num(key, value)?,
            "tolerance.jet_closure" => self.tolerances.jet_closure = num(key, value)?,
            "tolerance.fb_identity" => self.tolerances.fb_identity = num(key, value)?,
            "tolerance.boundary_identity" => {
                self.tolerances.boundary_identity = num(key, value)?
            }
            "tolerance.chain_gap" => self.tolerances.chain_gap = num(key, value)?,
            "tolerance.scan_match" => self.tolerances.scan_match = num(key, value)?,
            other => return Err(ConfigError(format!("unknown key '{other}'"))),
        }
        Ok(())
    }

    pub fn apply_overrides(&mut self, ov: &Overrides) -> Result<(), ConfigError> {
        if let Some(cmd) = &ov.command {
            self.command = Command::parse(cmd)?;
        }
        if let Some(n) = ov.n {
            self.n = n;
        }
        if let Some(t) = ov.theta_degrees {
            self.theta_degrees = t;
        }
        if let Some(a) = ov.alpha {
            self.alpha = a;
        }
        if let Some(a) = ov.competitor_a {
            self.competitor_a = a;
        }
        if let Some(s) = ov.samples {
            self.samples = s;
        }
        if let Some(s) = ov.seed {
            self.seed = s;
        }
        if ov.exact {
            self.exact = true;
        }
        if let Some(p) = &ov.out_path {
            self.out_path = Some(p.clone());
        }
        Ok(())
    }

    /// Normalizes the contact angle and rejects out-of-range parameters.
    pub fn validate(&mut self) -> Result<(), ConfigError> {
        if !(self.theta_degrees > 0.0 && self.theta_degrees < 180.0) {
            return Err(ConfigError(format!(
                "theta_degrees {} outside (0, 180)",
                self.theta_degrees
            )));
        }
        if self.theta_degrees == 90.0 {
            return Err(ConfigError("theta_degrees = 90 is excluded".into()));
        }
        if self.theta_degrees > 90.0 {
            let new = 180.0 - self.theta_degrees;
            self.notices.push(format!(
                "theta_degrees {} normalized to {} by the reflection symmetry",
                self.theta_degrees, new
            ));
            self.theta_degrees = new;
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(ConfigError(format!(
                "competitor.alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if !(self.competitor_a > 0.0) {
            return Err(ConfigError(format!(
                "competitor.a {} must be positive",
                self.competitor_a
            )));
        }
        if !(self.epsilon >= 0.0) {
            return Err(ConfigError(format!(
                "competitor.epsilon {} must be non-negative",
                self.epsilon
            )));
        }
        if self.samples == 0 {
            return Err(ConfigError("samples must be at least 1".into()));
        }
        if !(2..=16).contains(&self.n) {
            return Err(ConfigError(format!("n {} outside 2..=16", self.n)));
        }
        Ok(())
    }

    pub fn theta_radians(&self) -> f64 {
        self.theta_degrees.to_radians()
    }

    pub fn competitor(&self) -> CompetitorSpec {
        CompetitorSpec::new(
            CompetitorFamily::SplitQuadratic {
                a: self.competitor_a,
            },
            self.alpha,
            self.epsilon,
        )
        .expect("validated at config time")
    }

    /// Echo in config-file syntax; feeding this back reproduces the run.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "command = {}", self.command.name());
        let _ = writeln!(s, "n = {}", self.n);
        let _ = writeln!(s, "theta_degrees = {}", self.theta_degrees);
        let _ = writeln!(s, "competitor.family = split-quadratic");
        let _ = writeln!(s, "competitor.a = {}", self.competitor_a);
        let _ = writeln!(s, "competitor.alpha = {}", self.alpha);
        let _ = writeln!(s, "competitor.epsilon = {}", self.epsilon);
        let _ = writeln!(s, "samples = {}", self.samples);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "exact = {}", self.exact);
        let t = &self.tolerances;
        let _ = writeln!(s, "tolerance.jet_closure = {:e}", t.jet_closure);
        let _ = writeln!(s, "tolerance.fb_identity = {:e}", t.fb_identity);
        let _ = writeln!(s, "tolerance.boundary_identity = {:e}", t.boundary_identity);
        let _ = writeln!(s, "tolerance.chain_gap = {:e}", t.chain_gap);
        let _ = writeln!(s, "tolerance.scan_match = {:e}", t.scan_match);
        s
    }
}
