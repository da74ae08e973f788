//! Run configuration: a flat `key = value` file, one key per line, `#`
//! comments. Command-line flags override file values.
//!
//! | key | default |
//! |---|---|
//! | `band_limit` | 12 |
//! | `r_max_factor` | 50 (`R_max = r_max_factor · ξ`) |
//! | `tau_step` | 0.01 |
//! | `tau_max_factor` | 5 (`τ ∈ [0, tau_max_factor · ξ₀]`) |
//! | `tol_oracle` | 1e-6 |
//! | `tol_unobservability` | 1e-8 |
//! | `tol_jump` | 1e-2 |
//! | `seed` | 20240917 |
//! | `out_dir` | `out` |

use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub band_limit: usize,
    pub r_max_factor: f64,
    pub tau_step: f64,
    pub tau_max_factor: f64,
    pub tol_oracle: f64,
    pub tol_unobservability: f64,
    pub tol_jump: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            band_limit: 12,
            r_max_factor: 50.0,
            tau_step: 0.01,
            tau_max_factor: 5.0,
            tol_oracle: 1e-6,
            tol_unobservability: 1e-8,
            tol_jump: 1e-2,
            seed: 20240917,
            out_dir: PathBuf::from("out"),
        }
    }
}

pub const KEYS: [&str; 9] = [
    "band_limit",
    "r_max_factor",
    "tau_step",
    "tau_max_factor",
    "tol_oracle",
    "tol_unobservability",
    "tol_jump",
    "seed",
    "out_dir",
];

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value.parse().map_err(|_| Error::InvalidArgument(format!("{key}: cannot parse '{value}'")))
}

impl RunConfig {
    /// Named presets; `paper` is the acceptance configuration.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "paper" | "default" => Ok(Self::default()),
            _ => Err(Error::InvalidArgument(format!("unknown preset '{name}'"))),
        }
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key.trim() {
            "band_limit" => self.band_limit = parse_num(key, value)?,
            "r_max_factor" => self.r_max_factor = parse_num(key, value)?,
            "tau_step" => self.tau_step = parse_num(key, value)?,
            "tau_max_factor" => self.tau_max_factor = parse_num(key, value)?,
            "tol_oracle" => self.tol_oracle = parse_num(key, value)?,
            "tol_unobservability" => self.tol_unobservability = parse_num(key, value)?,
            "tol_jump" => self.tol_jump = parse_num(key, value)?,
            "seed" => self.seed = parse_num(key, value)?,
            "out_dir" => self.out_dir = PathBuf::from(value),
            other => return Err(Error::InvalidArgument(format!("unknown config key '{other}'"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines on top of `self`.
    pub fn merge_str(mut self, text: &str) -> Result<Self> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key = value", n + 1)))?;
            self.set(k, v).map_err(|e| Error::InvalidArgument(format!("line {}: {e}", n + 1)))?;
        }
        self.validate()?;
        Ok(self)
    }

    pub fn parse(text: &str) -> Result<Self> {
        Self::default().merge_str(text)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("r_max_factor", self.r_max_factor),
            ("tau_step", self.tau_step),
            ("tau_max_factor", self.tau_max_factor),
            ("tol_oracle", self.tol_oracle),
            ("tol_unobservability", self.tol_unobservability),
            ("tol_jump", self.tol_jump),
        ];
        for (k, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidArgument(format!("{k} must be positive, got {v}")));
            }
        }
        if self.r_max_factor <= 1.0 {
            return Err(Error::InvalidArgument("r_max_factor must exceed 1".into()));
        }
        Ok(())
    }

    /// `L ≥` the largest degree of an input.
    pub fn check_band(&self, degree: usize) -> Result<()> {
        if degree > self.band_limit {
            return Err(Error::BandLimit { required: degree, available: self.band_limit });
        }
        Ok(())
    }

    /// Serialized back to the file format, keys in fixed order.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "band_limit = {}", self.band_limit);
        let _ = writeln!(s, "r_max_factor = {:?}", self.r_max_factor);
        let _ = writeln!(s, "tau_step = {:?}", self.tau_step);
        let _ = writeln!(s, "tau_max_factor = {:?}", self.tau_max_factor);
        let _ = writeln!(s, "tol_oracle = {:e}", self.tol_oracle);
        let _ = writeln!(s, "tol_unobservability = {:e}", self.tol_unobservability);
        let _ = writeln!(s, "tol_jump = {:e}", self.tol_jump);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out_dir = {}", self.out_dir.display());
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = RunConfig::default();
        assert_eq!(c.tol_oracle, 1e-6);
        assert_eq!(c.tol_unobservability, 1e-8);
        assert_eq!(c.tol_jump, 1e-2);
        assert_eq!(c.tau_step, 0.01);
    }

    #[test]
    fn parse_with_comments_and_override() {
        let c = RunConfig::parse("# campaign\nband_limit = 4\n\nseed=7 # fixed\nout_dir = runs/a\n").unwrap();
        assert_eq!(c.band_limit, 4);
        assert_eq!(c.seed, 7);
        assert_eq!(c.out_dir, PathBuf::from("runs/a"));
        assert_eq!(c.tol_jump, 1e-2);
    }

    #[test]
    fn bad_input_is_rejected() {
        assert!(RunConfig::parse("colour = red").is_err());
        assert!(RunConfig::parse("tol_jump = -1").is_err());
        assert!(RunConfig::parse("band_limit").is_err());
        assert!(RunConfig::parse("seed = x").is_err());
        assert!(RunConfig::preset("fast").is_err());
    }

    #[test]
    fn text_round_trip() {
        let c = RunConfig { tol_oracle: 3e-7, band_limit: 5, ..RunConfig::default() };
        assert_eq!(RunConfig::parse(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn band_check() {
        let c = RunConfig::parse("band_limit = 3").unwrap();
        assert!(c.check_band(3).is_ok());
        assert!(matches!(c.check_band(4), Err(Error::BandLimit { .. })));
    }
}
