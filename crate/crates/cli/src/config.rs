//! JSON run configuration with per-module defaults.
//!
//! Unknown keys are rejected (naming the key); structural invariants are
//! enforced by the library constructors when the config is turned into grids
//! and integrator settings.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use skdv::dynamics::Scheme;
use skdv::soliton::SpeedConvention;
use skdv::stability::{PerturbationSpec, PerturbationTarget};

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub clifford: CliffordConfig,
    pub soliton: SolitonConfig,
    pub integrator: IntegratorConfig,
    pub perturbation: PerturbationConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(rename = "L", alias = "length")]
    pub length: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            n: 1024,
            length: 80.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CliffordConfig {
    pub k: usize,
}

impl Default for CliffordConfig {
    fn default() -> Self {
        CliffordConfig { k: 2 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolitonConfig {
    pub c: f64,
    pub a: f64,
    pub speed_convention: SpeedConvention,
}

impl Default for SolitonConfig {
    fn default() -> Self {
        SolitonConfig {
            c: 1.0,
            a: 0.0,
            speed_convention: SpeedConvention::Derived,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub t_end: f64,
    pub sample_every: usize,
    pub dealias: bool,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            dt: 1e-3,
            scheme: Scheme::IntegratingFactorRk4,
            t_end: 10.0,
            sample_every: 100,
            dealias: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbationConfig {
    pub seed: u64,
    pub amplitude: f64,
    pub n_bumps: usize,
    pub target: PerturbationTarget,
    pub zero_mean_xi: bool,
}

impl Default for PerturbationConfig {
    fn default() -> Self {
        PerturbationConfig {
            seed: 0,
            amplitude: 0.01,
            n_bumps: 3,
            target: PerturbationTarget::Both,
            zero_mean_xi: true,
        }
    }
}

impl PerturbationConfig {
    pub fn to_spec(&self) -> PerturbationSpec {
        PerturbationSpec {
            seed: self.seed,
            amplitude: self.amplitude,
            n_bumps: self.n_bumps,
            target: self.target,
            zero_mean_xi: self.zero_mean_xi,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub directory: PathBuf,
    pub emit_snapshots: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: PathBuf::from("out"),
            emit_snapshots: false,
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &std::path::Path) -> anyhow::Result<RunConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        RunConfig::from_str(&text)
    }

    pub fn from_str(text: &str) -> anyhow::Result<RunConfig> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        Ok(cfg)
    }

    /// Output directory after the SKDV_OUTPUT_DIR override.
    pub fn output_dir(&self) -> PathBuf {
        std::env::var_os("SKDV_OUTPUT_DIR")
            .map(PathBuf::from)
            .unwrap_or_else(|| self.output.directory.clone())
    }
}
