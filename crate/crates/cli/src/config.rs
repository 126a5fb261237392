//! Flat `key = value` run configuration.

use std::collections::BTreeSet;
use std::str::FromStr;

use quasivar::{CheckOptions, ExponentConfig, MountainPassParams};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: duplicate key `{key}`")]
    Duplicate { line: usize, key: String },
    #[error("line {line}: invalid value `{value}` for `{key}`")]
    Value {
        line: usize,
        key: String,
        value: String,
    },
    #[error("missing required key `{0}`")]
    Missing(&'static str),
    #[error("invalid configuration: {0}")]
    Invalid(String),
}

/// Every setting of a run; keys in the config file match the field names
/// (`N` is the theory dimension, `n` the nodes per grid axis).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    #[serde(rename = "N")]
    pub n_theory: u32,
    pub p1: f64,
    pub p2: f64,
    pub s1: f64,
    pub s2: f64,
    pub q1: f64,
    pub q2: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub c_star: f64,
    pub dimension: usize,
    pub n: usize,
    pub tol: f64,
    pub max_iters: usize,
    pub path_points: usize,
    pub stencil: usize,
    pub seeds: u64,
    pub count: usize,
    pub epsilon_reg: f64,
    pub exj01_literal: bool,
    pub r0: f64,
    pub n_samples: usize,
    pub samples: usize,
    pub nontrivial_floor: f64,
    pub dedup_tol: f64,
    pub eigen_tol: f64,
    pub eigen_max_iter: usize,
    pub fd_fields: usize,
    pub out: Option<String>,
}

const REQUIRED: [&str; 12] = [
    "N", "p1", "p2", "s1", "s2", "q1", "q2", "gamma1", "gamma2", "theta1", "theta2", "c_star",
];

impl Default for RunConfig {
    fn default() -> Self {
        let mp = MountainPassParams::default();
        Self {
            n_theory: 2,
            p1: f64::NAN,
            p2: f64::NAN,
            s1: f64::NAN,
            s2: f64::NAN,
            q1: f64::NAN,
            q2: f64::NAN,
            gamma1: f64::NAN,
            gamma2: f64::NAN,
            theta1: f64::NAN,
            theta2: f64::NAN,
            c_star: f64::NAN,
            dimension: 2,
            n: 65,
            tol: mp.tol,
            max_iters: mp.max_iters,
            path_points: mp.path_points,
            stencil: mp.stencil,
            seeds: 0,
            count: 4,
            epsilon_reg: quasivar::model::DEFAULT_EPSILON_REG,
            exj01_literal: false,
            r0: 0.1,
            n_samples: 256,
            samples: 100_000,
            nontrivial_floor: mp.nontrivial_floor,
            dedup_tol: mp.dedup_tol,
            eigen_tol: 1e-10,
            eigen_max_iter: 100_000,
            fd_fields: 5,
            out: None,
        }
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, ConfigError> {
    value.parse().map_err(|_| ConfigError::Value {
        line,
        key: key.to_string(),
        value: value.to_string(),
    })
}

/// Reals accept decimal literals and simple fractions such as `1/8`.
fn parse_real(line: usize, key: &str, value: &str) -> Result<f64, ConfigError> {
    let parsed = match value.split_once('/') {
        Some((a, b)) => {
            let a: f64 = parse_value(line, key, a.trim())?;
            let b: f64 = parse_value(line, key, b.trim())?;
            a / b
        }
        None => parse_value(line, key, value)?,
    };
    if parsed.is_finite() {
        Ok(parsed)
    } else {
        Err(ConfigError::Value {
            line,
            key: key.to_string(),
            value: value.to_string(),
        })
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = BTreeSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or(ConfigError::Syntax { line })?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            if !seen.insert(key.to_string()) {
                return Err(ConfigError::Duplicate {
                    line,
                    key: key.to_string(),
                });
            }
            let real = |v: &str| parse_real(line, key, v);
            match key {
                "N" => cfg.n_theory = parse_value(line, key, value)?,
                "p1" => cfg.p1 = real(value)?,
                "p2" => cfg.p2 = real(value)?,
                "s1" => cfg.s1 = real(value)?,
                "s2" => cfg.s2 = real(value)?,
                "q1" => cfg.q1 = real(value)?,
                "q2" => cfg.q2 = real(value)?,
                "gamma1" => cfg.gamma1 = real(value)?,
                "gamma2" => cfg.gamma2 = real(value)?,
                "theta1" => cfg.theta1 = real(value)?,
                "theta2" => cfg.theta2 = real(value)?,
                "c_star" => cfg.c_star = real(value)?,
                "dimension" => cfg.dimension = parse_value(line, key, value)?,
                "n" => cfg.n = parse_value(line, key, value)?,
                "tol" => cfg.tol = real(value)?,
                "max_iters" => cfg.max_iters = parse_value(line, key, value)?,
                "path_points" => cfg.path_points = parse_value(line, key, value)?,
                "stencil" => cfg.stencil = parse_value(line, key, value)?,
                "seeds" => cfg.seeds = parse_value(line, key, value)?,
                "count" => cfg.count = parse_value(line, key, value)?,
                "epsilon_reg" => cfg.epsilon_reg = real(value)?,
                "exj01_literal" => cfg.exj01_literal = parse_value(line, key, value)?,
                "r0" => cfg.r0 = real(value)?,
                "n_samples" => cfg.n_samples = parse_value(line, key, value)?,
                "samples" => cfg.samples = parse_value(line, key, value)?,
                "nontrivial_floor" => cfg.nontrivial_floor = real(value)?,
                "dedup_tol" => cfg.dedup_tol = real(value)?,
                "eigen_tol" => cfg.eigen_tol = real(value)?,
                "eigen_max_iter" => cfg.eigen_max_iter = parse_value(line, key, value)?,
                "fd_fields" => cfg.fd_fields = parse_value(line, key, value)?,
                "out" => cfg.out = Some(value.to_string()),
                _ => {
                    return Err(ConfigError::UnknownKey {
                        line,
                        key: key.to_string(),
                    })
                }
            }
        }
        if let Some(missing) = REQUIRED.iter().find(|k| !seen.contains(**k)) {
            return Err(ConfigError::Missing(missing));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), ConfigError> {
        self.exponents()
            .validate()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let bad = |msg: &str| Err(ConfigError::Invalid(msg.to_string()));
        if !(1..=2).contains(&self.dimension) {
            return bad("dimension must be 1 or 2");
        }
        if self.n < 3 {
            return bad("n must be at least 3");
        }
        if !(self.tol > 0.0) {
            return bad("tol must be > 0");
        }
        if self.path_points < 3 {
            return bad("path_points must be at least 3");
        }
        if !(self.epsilon_reg >= 0.0) {
            return bad("epsilon_reg must be >= 0");
        }
        if !(self.r0 > 0.0) {
            return bad("r0 must be > 0");
        }
        if !(self.eigen_tol > 0.0) {
            return bad("eigen_tol must be > 0");
        }
        Ok(())
    }

    pub fn exponents(&self) -> ExponentConfig {
        ExponentConfig {
            n: self.n_theory,
            p1: self.p1,
            p2: self.p2,
            s1: self.s1,
            s2: self.s2,
            q1: self.q1,
            q2: self.q2,
            gamma1: self.gamma1,
            gamma2: self.gamma2,
            theta1: self.theta1,
            theta2: self.theta2,
            c_star: self.c_star,
        }
    }

    pub fn check_options(&self) -> CheckOptions {
        CheckOptions {
            exj01_literal: self.exj01_literal,
        }
    }

    pub fn mp_params(&self, threads: usize) -> MountainPassParams {
        MountainPassParams {
            path_points: self.path_points,
            tol: self.tol,
            max_iters: self.max_iters,
            stencil: self.stencil,
            nontrivial_floor: self.nontrivial_floor,
            dedup_tol: self.dedup_tol,
            threads,
            ..MountainPassParams::default()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CFG_A: &str = "
        # reference configuration
        N = 2
        p1 = 1.5
        p2 = 1.5
        s1 = 1
        s2 = 1
        q1 = 8
        q2 = 8
        gamma1 = 4
        gamma2 = 4
        theta1 = 1/8   # fractions are accepted
        theta2 = 0.125
        c_star = 1
    ";

    #[test]
    fn parses_with_defaults() {
        let cfg = RunConfig::parse(CFG_A).unwrap();
        assert_eq!(cfg.theta1, 0.125);
        assert_eq!(cfg.n, 65);
        assert_eq!(cfg.path_points, 33);
        assert_eq!(cfg.exponents().p1, 1.5);
    }

    #[test]
    fn unknown_key_is_rejected() {
        let text = format!("{CFG_A}\np3 = 2\n");
        assert!(matches!(
            RunConfig::parse(&text),
            Err(ConfigError::UnknownKey { key, .. }) if key == "p3"
        ));
    }

    #[test]
    fn syntax_and_value_errors() {
        assert!(matches!(
            RunConfig::parse("p1 2"),
            Err(ConfigError::Syntax { line: 1 })
        ));
        let text = CFG_A.replace("q1 = 8", "q1 = eight");
        assert!(matches!(
            RunConfig::parse(&text),
            Err(ConfigError::Value { .. })
        ));
        let text = CFG_A.replace("c_star = 1", "");
        assert_eq!(RunConfig::parse(&text), Err(ConfigError::Missing("c_star")));
        let text = format!("{CFG_A}\nn = 9\nn = 10\n");
        assert!(matches!(
            RunConfig::parse(&text),
            Err(ConfigError::Duplicate { .. })
        ));
        let text = CFG_A.replace("p1 = 1.5", "p1 = 0.5");
        assert!(matches!(
            RunConfig::parse(&text),
            Err(ConfigError::Invalid(_))
        ));
    }
}
