//! Experiment configuration: a strict TOML schema shared by every subcommand.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{DunklError, Result};
use crate::grid::GridSpec;
use crate::maximal::IndicatorMode;
use crate::multiplicity::{make_multiplicity, Multiplicity};
use crate::summability::{Family, DEFAULT_EPS_SCHEDULE};
use crate::testfn::{test_function, NAMES};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    /// Gauss-Jacobi order per axis for the intertwining and translation integrals.
    pub jacobi_order: usize,
    /// Gauss-Jacobi order per angular variable on the sphere.
    pub sphere_order: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelConfig {
    pub family: Family,
    /// t for heat, ε for Poisson, R for Bochner-Riesz.
    pub param: f64,
    /// Bochner-Riesz index.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleConfig {
    pub eps: Vec<f64>,
    pub p: Vec<f64>,
    /// Number of log-spaced ball radii for maximal functions.
    pub radius_count: usize,
    /// Weak-type levels; derived from `sup |f|` over two decades when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranslateConfig {
    pub shift: Vec<f64>,
    /// Number of sample points for route comparisons.
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dimension: usize,
    pub kappa: Vec<f64>,
    /// Space grid; `x_max` is the truncation radius.
    pub grid: GridSpec,
    pub frequency_grid: GridSpec,
    pub quadrature: QuadratureConfig,
    pub test_function: String,
    pub kernel: KernelConfig,
    pub schedules: ScheduleConfig,
    pub translate: TranslateConfig,
    pub indicator: IndicatorMode,
    pub output: OutputConfig,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dimension: 2,
            kappa: vec![0.5, 1.0],
            grid: GridSpec::new(9.0, 6, 12),
            frequency_grid: GridSpec::new(9.0, 6, 12),
            quadrature: QuadratureConfig { jacobi_order: 32, sphere_order: 24 },
            test_function: "gaussian".into(),
            kernel: KernelConfig { family: Family::Heat, param: 0.5, delta: 2.5 },
            schedules: ScheduleConfig { eps: DEFAULT_EPS_SCHEDULE.to_vec(), p: vec![1.0, 2.0, f64::INFINITY], radius_count: 40, levels: None },
            translate: TranslateConfig { shift: vec![0.8, -0.5], samples: 12 },
            indicator: IndicatorMode::Spectral { freq: GridSpec::new(9.0, 6, 12) },
            output: OutputConfig { dir: PathBuf::from("out") },
            seed: 20240601,
        }
    }
}

impl ExperimentConfig {
    /// Parses and validates; TOML errors carry line and column.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| DunklError::Format(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| DunklError::Format(e.to_string()))
    }

    /// SHA-256 of the canonical serialization.
    pub fn hash(&self) -> Result<String> {
        let digest = Sha256::digest(self.to_toml()?.as_bytes());
        Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
    }

    pub fn multiplicity(&self) -> Result<Multiplicity> {
        make_multiplicity(self.dimension, &self.kappa)
    }

    pub fn validate(&self) -> Result<()> {
        self.multiplicity()?;
        test_function(&self.test_function).map_err(|_| {
            DunklError::Format(format!("unknown test_function `{}`; expected one of {}", self.test_function, NAMES.join(", ")))
        })?;
        for (name, g) in [("grid", &self.grid), ("frequency_grid", &self.frequency_grid)] {
            if !(g.x_max > 0.0) || g.panels == 0 || g.per_panel == 0 {
                return Err(DunklError::Format(format!("{name} must have positive x_max, panels and per_panel")));
            }
        }
        if self.quadrature.jacobi_order == 0 || self.quadrature.sphere_order == 0 {
            return Err(DunklError::Format("quadrature orders must be positive".into()));
        }
        if !(self.kernel.param > 0.0) || !(self.kernel.delta >= 0.0) {
            return Err(DunklError::Format("kernel needs param > 0 and delta ≥ 0".into()));
        }
        if self.schedules.eps.is_empty() || self.schedules.eps.iter().any(|&e| !(e > 0.0)) {
            return Err(DunklError::Format("schedules.eps must be a non-empty list of positive numbers".into()));
        }
        if self.schedules.p.is_empty() || self.schedules.p.iter().any(|&p| !(p >= 1.0)) {
            return Err(DunklError::Format("schedules.p entries must be at least 1".into()));
        }
        if self.schedules.radius_count < 2 {
            return Err(DunklError::Format("schedules.radius_count must be at least 2".into()));
        }
        if let Some(levels) = &self.schedules.levels {
            if levels.is_empty() || levels.iter().any(|&a| !(a > 0.0)) {
                return Err(DunklError::Format("schedules.levels must be positive".into()));
            }
        }
        if self.translate.shift.len() != self.dimension {
            return Err(DunklError::Format(format!(
                "translate.shift has {} entries for dimension {}",
                self.translate.shift.len(),
                self.dimension
            )));
        }
        if self.translate.samples == 0 {
            return Err(DunklError::Format("translate.samples must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn default_round_trips_and_validates() {
        let c = ExperimentConfig::default();
        c.validate().unwrap();
        let text = c.to_toml().unwrap();
        assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
        assert_eq!(c.hash().unwrap().len(), 64);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut text = ExperimentConfig::default().to_toml().unwrap();
        text.push_str("\nsurprise = 1\n");
        assert!(matches!(ExperimentConfig::from_toml(&text), Err(DunklError::Format(_))));
        let nested = ExperimentConfig::default().to_toml().unwrap().replace("jacobi_order", "jacobi_ordr");
        assert!(ExperimentConfig::from_toml(&nested).is_err());
    }

    #[test]
    fn negative_kappa_is_rejected_with_a_line() {
        let text = ExperimentConfig::default().to_toml().unwrap().replace("kappa = [0.5, 1.0]", "kappa = [-0.5, 1.0]");
        assert!(text.contains("-0.5"));
        assert!(ExperimentConfig::from_toml(&text).is_err());
        let broken = "dimension = 2\nkappa = [0.5,\n";
        let msg = ExperimentConfig::from_toml(broken).unwrap_err().to_string();
        assert!(msg.contains("line"), "{msg}");
    }

    #[test]
    fn hash_tracks_content() {
        let a = ExperimentConfig::default();
        let mut b = a.clone();
        b.seed += 1;
        assert_ne!(a.hash().unwrap(), b.hash().unwrap());
    }

    proptest! {
        #[test]
        fn round_trip_is_lossless(
            k in proptest::collection::vec(0.0f64..5.0, 2),
            x_max in 0.5f64..40.0,
            eps in proptest::collection::vec(1e-4f64..10.0, 1..8),
            param in 1e-3f64..10.0,
            seed in any::<u64>(),
            levels in proptest::option::of(proptest::collection::vec(1e-6f64..1e3, 1..5)),
        ) {
            let mut c = ExperimentConfig::default();
            c.kappa = k;
            c.grid.x_max = x_max;
            c.schedules.eps = eps;
            c.schedules.levels = levels;
            c.kernel.param = param;
            c.seed = seed;
            let back = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
            prop_assert_eq!(back, c);
        }
    }
}
