use anyhow::{bail, Context};
use carleman::driver::DriverConfig;
use carleman::problems::ProblemId;
use carleman::qrm::QrmConfig;
use carleman::weight::CarlemanParams;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const DEFAULT_SEED: u64 = 2021;

/// Everything a run needs. Every field has a default, so an empty file is a
/// valid configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub n: usize,
    pub deltas: Vec<f64>,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub carleman: CarlemanParams,
    pub qrm: QrmConfig,
    pub driver: DriverConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            problem: ProblemId::Test1,
            n: 150,
            deltas: vec![0.0, 0.02, 0.05, 0.10],
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("out"),
            carleman: CarlemanParams::default(),
            qrm: QrmConfig::default(),
            driver: DriverConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        let cfg: Self = toml::from_str(text).context("malformed configuration")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("cannot read configuration {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("run configuration is always representable as TOML")
    }

    /// Checks that do not need a grid; the rest happen when the solver is built.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.n < 5 {
            bail!("n must be at least 5, got {}", self.n);
        }
        if self.deltas.is_empty() {
            bail!("deltas must list at least one noise level");
        }
        if let Some(d) = self.deltas.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
            bail!("noise levels must be finite and non-negative, got {d}");
        }
        self.qrm.validate()?;
        self.driver.validate()?;
        Ok(())
    }
}

/// The annotated example shipped with the crate.
pub const EXAMPLE_CONFIG: &str = include_str!("../run.example.toml");
