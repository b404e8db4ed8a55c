//! Experiment configuration and its flat `key = value` file format.
//!
//! ```text
//! # comments start with '#'
//! runs = 200
//! dt = 1e-3
//! t_final = 20
//! seed = 42
//! controller = all          # or eqt, gt, nog, asym, or a comma list
//! inertia = 0.824 0 0.12  0 1.135 0  0.12 0 1.759
//! kp = 1 1 1                # three entries give a diagonal matrix
//! kd = 0.5 0.5 0.5
//! out = results.csv
//! ```

use std::path::{Path, PathBuf};

use eqtrack::control::{ControllerKind, Gains};
use eqtrack::lie_poisson::InertiaTensor;
use eqtrack::Mat3;

use crate::error::{Result, SimError};

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub runs: usize,
    pub dt: f64,
    pub t_final: f64,
    pub seed: u64,
    pub controllers: Vec<ControllerKind>,
    pub inertia: InertiaTensor,
    pub gains: Gains,
    pub output_path: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            runs: 200,
            dt: 1e-3,
            t_final: 20.0,
            seed: DEFAULT_SEED,
            controllers: ControllerKind::TRACKING.to_vec(),
            inertia: InertiaTensor::fixed_wing(),
            gains: Gains::reference(),
            output_path: PathBuf::from("results.csv"),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(SimError::InvalidConfig("runs must be at least 1".into()));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(SimError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_final >= self.dt) || !self.t_final.is_finite() {
            return Err(SimError::InvalidConfig(format!(
                "t_final must be at least dt, got t_final = {}, dt = {}",
                self.t_final, self.dt
            )));
        }
        if self.controllers.is_empty() {
            return Err(SimError::InvalidConfig("no controllers selected".into()));
        }
        Ok(())
    }

    /// Reads a config file on top of the defaults.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| SimError::Read { path: path.into(), source })?;
        let mut cfg = Self::default();
        cfg.apply_text(&text, &path.display().to_string())?;
        Ok(cfg)
    }

    /// Applies every `key = value` line of `text`; `origin` labels errors.
    pub fn apply_text(&mut self, text: &str, origin: &str) -> Result<()> {
        let mut kp = None;
        let mut kd = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |message: String| SimError::Config { path: origin.to_string(), line, message };
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "runs" => self.runs = value.parse().map_err(|e| err(format!("runs: {e}")))?,
                "dt" => self.dt = value.parse().map_err(|e| err(format!("dt: {e}")))?,
                "t_final" => self.t_final = value.parse().map_err(|e| err(format!("t_final: {e}")))?,
                "seed" => self.seed = value.parse().map_err(|e| err(format!("seed: {e}")))?,
                "controller" | "controllers" => self.controllers = parse_controllers(value).map_err(err)?,
                "inertia" => {
                    let m = parse_matrix(value).map_err(err)?;
                    self.inertia = InertiaTensor::constant(m).map_err(|e| err(e.to_string()))?;
                }
                "kp" => kp = Some(parse_matrix(value).map_err(err)?),
                "kd" => kd = Some(parse_matrix(value).map_err(err)?),
                "out" | "output" => self.output_path = PathBuf::from(value),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        if kp.is_some() || kd.is_some() {
            let kp = kp.unwrap_or(*self.gains.kp());
            let kd = kd.unwrap_or(*self.gains.kd());
            self.gains = Gains::new(kp, kd).map_err(|e| SimError::Config {
                path: origin.to_string(),
                line: 0,
                message: e.to_string(),
            })?;
        }
        Ok(())
    }
}

/// `all`, a single kind name, or a comma separated list of names.
pub fn parse_controllers(value: &str) -> std::result::Result<Vec<ControllerKind>, String> {
    if value.trim().eq_ignore_ascii_case("all") {
        return Ok(ControllerKind::TRACKING.to_vec());
    }
    let mut kinds = Vec::new();
    for name in value.split(',') {
        let kind: ControllerKind = name.parse().map_err(|e: eqtrack::Error| e.to_string())?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

/// Nine row-major entries, or three diagonal entries.
pub fn parse_matrix(value: &str) -> std::result::Result<Mat3, String> {
    let nums = value
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    match nums.len() {
        3 => Ok(Mat3::from_diagonal(&nalgebra::Vector3::new(nums[0], nums[1], nums[2]))),
        9 => Ok(Mat3::from_row_slice(&nums)),
        n => Err(format!("expected 3 or 9 numbers, got {n}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_reference_experiment() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.runs, 200);
        assert_eq!(cfg.dt, 1e-3);
        assert_eq!(cfg.t_final, 20.0);
        assert_eq!(cfg.controllers, ControllerKind::TRACKING.to_vec());
        assert_eq!(*cfg.gains.kp(), Mat3::identity());
        assert_eq!(*cfg.gains.kd(), Mat3::identity() * 0.5);
        assert!(cfg.validate().is_ok());
    }

    #[test]
    fn parses_every_key() {
        let mut cfg = ExperimentConfig::default();
        let text = "# header\nruns = 7\ndt=0.01\nt_final = 3 # trailing\nseed = 9\ncontroller = gt, eqt\n\
                    inertia = 1 0 0 0 2 0 0 0 3\nkp = 2 2 2\nkd = 1 1 1\nout = a.csv\n";
        cfg.apply_text(text, "test").unwrap();
        assert_eq!((cfg.runs, cfg.dt, cfg.t_final, cfg.seed), (7, 0.01, 3.0, 9));
        assert_eq!(cfg.controllers, vec![ControllerKind::GT, ControllerKind::EqT]);
        assert_eq!(cfg.inertia.base()[(2, 2)], 3.0);
        assert_eq!(*cfg.gains.kp(), Mat3::identity() * 2.0);
        assert_eq!(cfg.output_path, PathBuf::from("a.csv"));
    }

    #[test]
    fn reports_offending_line() {
        let mut cfg = ExperimentConfig::default();
        let err = cfg.apply_text("runs = 3\nbogus = 1\n", "f.cfg").unwrap_err();
        assert!(matches!(err, SimError::Config { line: 2, .. }), "{err}");
        let err = cfg.apply_text("dt = fast\n", "f.cfg").unwrap_err();
        assert!(matches!(err, SimError::Config { line: 1, .. }), "{err}");
    }

    #[test]
    fn rejects_invalid_values() {
        let cfg = ExperimentConfig { runs: 0, ..Default::default() };
        assert!(cfg.validate().is_err());
        let cfg = ExperimentConfig { dt: 1.0, t_final: 0.5, ..Default::default() };
        assert!(cfg.validate().is_err());
        let mut cfg = ExperimentConfig::default();
        assert!(cfg.apply_text("kd = 1 -1 1\n", "x").is_err());
        assert!(parse_matrix("1 2").is_err());
        assert!(parse_controllers("eqt,pid").is_err());
    }
}
