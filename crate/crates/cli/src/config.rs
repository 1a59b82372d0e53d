//! Run configuration: defaults, a flat `key = value` file, and flag overrides.

use std::path::PathBuf;

use holodual_core::quadrature::Resolution;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub n: usize,
    pub radius: f64,
    pub r_max: u32,
    pub s_max: u32,
    pub q_max: u32,
    /// `AxBxC` for `n = 2`, a point count otherwise; empty means the default rule.
    pub resolution: String,
    pub tol_reproduction: f64,
    pub tol_pairing: f64,
    pub tol_jump: f64,
    pub seed: u64,
    pub strict: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 2,
            radius: 1.0,
            r_max: 6,
            s_max: 4,
            q_max: 3,
            resolution: String::new(),
            tol_reproduction: 1e-6,
            tol_pairing: 1e-8,
            tol_jump: 1e-2,
            seed: 20240611,
            strict: false,
            out: None,
        }
    }
}

/// Parses `"32x32x24"`, `"32×32×24"` or `"65536"`.
pub fn parse_resolution(n: usize, text: &str) -> Result<Resolution, CliError> {
    let parts: Vec<usize> = text
        .split(['x', 'X', '×'])
        .map(|t| t.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Config(format!("bad resolution {text:?}")))?;
    let res = match (n, parts.as_slice()) {
        (1, [points]) => Resolution::Circle { points: *points },
        (2, [a, b, c]) => Resolution::Hopf { phi1: *a, phi2: *b, eta: *c },
        (n, [points]) if n >= 3 => Resolution::Scattered { points: *points },
        (n, [a, b, c]) if n >= 3 => Resolution::Scattered { points: a * b * c },
        _ => return Err(CliError::Config(format!("resolution {text:?} does not fit n = {n}"))),
    };
    res.validate(n).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(res)
}

pub fn format_resolution(res: &Resolution) -> String {
    match res {
        Resolution::Circle { points } => points.to_string(),
        Resolution::Hopf { phi1, phi2, eta } => format!("{phi1}x{phi2}x{eta}"),
        Resolution::Scattered { points } => points.to_string(),
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("flat config always serializes")
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.display().to_string(), e))?;
        Self::from_toml(&text)
    }

    pub fn quadrature_resolution(&self) -> Result<Resolution, CliError> {
        if self.resolution.trim().is_empty() {
            Ok(Resolution::default_for(self.n))
        } else {
            parse_resolution(self.n, &self.resolution)
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.n == 0 {
            return bad("n must be at least 1".into());
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.radius));
        }
        for (name, t) in [
            ("tol_reproduction", self.tol_reproduction),
            ("tol_pairing", self.tol_pairing),
            ("tol_jump", self.tol_jump),
        ] {
            if !(t > 0.0 && t.is_finite()) {
                return bad(format!("{name} must be positive, got {t}"));
            }
        }
        if self.q_max == 0 {
            return bad("q_max must be at least 1".into());
        }
        self.quadrature_resolution().map(|_| ())
    }

    /// Canonical text used for input digests; excludes the output path.
    pub fn canonical(&self) -> String {
        RunConfig { out: None, strict: false, ..self.clone() }.to_toml()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let cfg = RunConfig {
            resolution: "16x16x12".into(),
            tol_jump: 0.005,
            out: Some("report.json".into()),
            ..RunConfig::default()
        };
        let back = RunConfig::from_toml(&cfg.to_toml()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn partial_file_uses_defaults() {
        let cfg = RunConfig::from_toml("n = 1\nseed = 7\n").unwrap();
        assert_eq!(cfg.n, 1);
        assert_eq!(cfg.seed, 7);
        assert_eq!(cfg.s_max, 4);
        assert!(RunConfig::from_toml("colour = 3\n").is_err());
    }

    #[test]
    fn resolutions() {
        assert_eq!(parse_resolution(2, "32×32×24").unwrap(), Resolution::Hopf { phi1: 32, phi2: 32, eta: 24 });
        assert_eq!(parse_resolution(1, "128").unwrap(), Resolution::Circle { points: 128 });
        assert!(parse_resolution(2, "2x2x2").is_err());
        assert!(parse_resolution(2, "axb").is_err());
        assert!(RunConfig { tol_pairing: 0.0, ..RunConfig::default() }.validate().is_err());
    }
}
