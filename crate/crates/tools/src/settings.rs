//! Effective configuration: command-line flags over a config file over the
//! built-in defaults.

use std::path::Path;

use mss_core::Config;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ToolError};

macro_rules! config_fields {
    ($($name:ident: $ty:ty => $($field:ident).+;)*) => {
        /// Every setting of [`Config`], echoed into each report.
        #[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ConfigEcho {
            $(pub $name: $ty,)*
        }

        /// A config file; absent keys keep their defaults.
        #[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
        #[serde(deny_unknown_fields)]
        pub struct ConfigFile {
            $(
                #[serde(default, skip_serializing_if = "Option::is_none")]
                pub $name: Option<$ty>,
            )*
        }

        impl From<&Config> for ConfigEcho {
            fn from(cfg: &Config) -> Self {
                Self { $($name: cfg.$($field).+,)* }
            }
        }

        impl ConfigEcho {
            pub fn to_config(&self) -> Config {
                let mut cfg = Config::default();
                $(cfg.$($field).+ = self.$name;)*
                cfg
            }
        }

        impl ConfigFile {
            pub fn apply(&self, cfg: &mut Config) {
                $(if let Some(v) = self.$name { cfg.$($field).+ = v; })*
            }
        }
    };
}

config_fields! {
    eps_light: f64 => eps_light;
    contact_tol: f64 => contact_tol;
    gap_factor: f64 => gap_factor;
    grid_n: usize => grid_n;
    lightlike_grid: usize => lightlike_grid;
    root_tol: f64 => root_tol;
    refine_residual: f64 => refine_residual;
    tangency_grid: usize => tangency_grid;
    solver_tol: f64 => solver_tol;
    scan_steps: usize => scan_steps;
    scan_grid_n: usize => scan_grid_n;
    dedup_tol: f64 => dedup_tol;
    seed_factor: f64 => seed_factor;
    newton_max_iterations: usize => newton.max_iterations;
    newton_max_halvings: usize => newton.max_halvings;
    newton_max_condition: f64 => newton.max_condition;
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| ToolError::Parse { what: "config file", source })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| ToolError::Read { path: path.into(), source })?;
        Self::parse(&text)
    }
}

/// Values given on the command line.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    /// Trace grid; for scans, the grid of the per-step traces.
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridTarget {
    Trace,
    Scan,
}

pub fn resolve(file: Option<&ConfigFile>, overrides: &Overrides, target: GridTarget) -> Result<Config> {
    let mut cfg = Config::default();
    if let Some(f) = file {
        f.apply(&mut cfg);
    }
    if let Some(g) = overrides.grid {
        match target {
            GridTarget::Trace => cfg.grid_n = g,
            GridTarget::Scan => cfg.scan_grid_n = g,
        }
    }
    if let Some(t) = overrides.tol {
        cfg.contact_tol = t;
    }
    if let Some(s) = overrides.steps {
        cfg.scan_steps = s;
    }
    validate(&cfg)?;
    Ok(cfg)
}

fn validate(cfg: &Config) -> Result<()> {
    let positive = [
        ("eps_light", cfg.eps_light),
        ("contact_tol", cfg.contact_tol),
        ("gap_factor", cfg.gap_factor),
        ("root_tol", cfg.root_tol),
        ("refine_residual", cfg.refine_residual),
        ("solver_tol", cfg.solver_tol),
        ("dedup_tol", cfg.dedup_tol),
        ("seed_factor", cfg.seed_factor),
        ("newton_max_condition", cfg.newton.max_condition),
    ];
    for (name, v) in positive {
        if !(v.is_finite() && v > 0.0) {
            return Err(ToolError::Input(format!("{name} must be positive and finite, got {v}")));
        }
    }
    if cfg.gap_factor <= 1.0 {
        return Err(ToolError::Input("gap_factor must exceed 1".into()));
    }
    for (name, v, min) in [
        ("grid_n", cfg.grid_n, 64),
        ("scan_grid_n", cfg.scan_grid_n, 64),
        ("lightlike_grid", cfg.lightlike_grid, 8),
        ("tangency_grid", cfg.tangency_grid, 8),
        ("scan_steps", cfg.scan_steps, 2),
        ("newton_max_iterations", cfg.newton.max_iterations, 1),
    ] {
        if v < min {
            return Err(ToolError::Input(format!("{name} must be at least {min}, got {v}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigFile::parse(r#"{"grid_n": 300, "contact_tol": 1e-7, "scan_steps": 50}"#).unwrap();
        let over = Overrides { grid: Some(256), ..Default::default() };
        let cfg = resolve(Some(&file), &over, GridTarget::Trace).unwrap();
        assert_eq!(cfg.grid_n, 256);
        assert_eq!(cfg.contact_tol, 1e-7);
        assert_eq!(cfg.scan_steps, 50);
        assert_eq!(cfg.solver_tol, Config::default().solver_tol);
    }

    #[test]
    fn echo_round_trips_config() {
        let cfg = Config { grid_n: 200, ..Config::default() };
        assert_eq!(ConfigEcho::from(&cfg).to_config(), cfg);
    }

    #[test]
    fn rejects_bad_values_and_keys() {
        assert!(ConfigFile::parse(r#"{"grid": 4}"#).is_err());
        let file = ConfigFile::parse(r#"{"contact_tol": -1}"#).unwrap();
        assert!(resolve(Some(&file), &Overrides::default(), GridTarget::Trace).is_err());
    }
}
