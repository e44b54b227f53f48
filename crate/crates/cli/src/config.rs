use std::path::{Path, PathBuf};

use lnmodal::devices::{ModeAnalyzerSpec, ModeRotatorSpec, PhasePlanInputs, TwoModeCouplerSpec};
use lnmodal::material::Material;
use lnmodal::modesolver::{ModeSolver, SolverGrid};
use lnmodal::{Polarization, Wavelength};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::{CliError, CliResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    /// Material TOML; the built-in lithium niobate data when absent.
    pub material: Option<PathBuf>,
    pub grid: SolverGrid,
    pub wavelength_um: f64,
    pub seed: u64,
    pub dispersion: DispersionConfig,
    pub coupler_evolution: EvolutionConfig,
    pub rotator: RotatorConfig,
    pub cnot: CnotConfig,
    pub phase_plan: PhasePlanConfig,
    pub selftest: SelftestConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            material: None,
            grid: SolverGrid::default(),
            wavelength_um: 0.812,
            seed: 0,
            dispersion: DispersionConfig::default(),
            coupler_evolution: EvolutionConfig::default(),
            rotator: RotatorConfig::default(),
            cnot: CnotConfig::default(),
            phase_plan: PhasePlanConfig::default(),
            selftest: SelftestConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DispersionConfig {
    pub pol: Polarization,
    pub from_um: f64,
    pub to_um: f64,
    pub step_um: f64,
    /// Mark the width whose even mode matches the odd mode of this guide.
    pub match_from_um: Option<f64>,
}

impl Default for DispersionConfig {
    fn default() -> Self {
        DispersionConfig { pol: Polarization::TM, from_um: 2.0, to_um: 8.0, step_um: 0.1, match_from_um: Some(5.6) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvolutionDevice {
    /// Two-mode EO coupler (four modes).
    #[default]
    Tmw,
    /// TMW/SMW mode analyzer (three modes).
    Analyzer,
    /// A bare two-guide coupler given by κ, Δβ, L.
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolutionConfig {
    pub device: EvolutionDevice,
    pub input: String,
    /// Samples along z, ends included.
    pub points: usize,
    /// TMW coupler; the optimizer retunes V and L₁ unless `optimize` is off.
    pub coupler: TwoModeCouplerSpec,
    pub optimize: bool,
    pub analyzer: Option<ModeAnalyzerSpec>,
    /// Custom coupler: κ and Δβ in rad/m, length in mm.
    pub kappa: f64,
    pub delta_beta: f64,
    pub length_mm: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            device: EvolutionDevice::Tmw,
            input: "TM-even".into(),
            points: 201,
            coupler: TwoModeCouplerSpec::default(),
            optimize: true,
            analyzer: None,
            kappa: 300.0,
            delta_beta: 0.0,
            length_mm: 5.236,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RotatorConfig {
    pub points: usize,
    pub spec: ModeRotatorSpec,
}

impl Default for RotatorConfig {
    fn default() -> Self {
        RotatorConfig { points: 51, spec: ModeRotatorSpec::default() }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CnotConfig {
    pub circuit: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanSource {
    /// Constants from the `inputs` table.
    #[default]
    Inputs,
    /// Constants from the solver-designed circuit.
    Solver,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhasePlanConfig {
    pub source: PlanSource,
    pub inputs: Option<PhasePlanInputs>,
    /// Solver source: minimum ℓ₁, ℓ₂, ℓ₃ in mm.
    pub min_lengths_mm: [f64; 3],
}

impl Default for PhasePlanConfig {
    fn default() -> Self {
        PhasePlanConfig { source: PlanSource::Inputs, inputs: None, min_lengths_mm: [1.0; 3] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelftestConfig {
    pub coupler_draws: usize,
    pub states: usize,
    pub plans: usize,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig { coupler_draws: 10_000, states: 100, plans: 100 }
    }
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("run config: {e}")))
    }

    /// Parse, then resolve relative paths against the file's directory.
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let fix = |p: &mut Option<PathBuf>| {
            if let Some(q) = p {
                if q.is_relative() {
                    *q = base.join(&*q);
                }
            }
        };
        fix(&mut cfg.material);
        fix(&mut cfg.cnot.circuit);
        Ok(cfg)
    }
}

/// Resolved configuration plus the shared solver.
pub struct Context {
    pub cfg: RunConfig,
    pub solver: ModeSolver,
    pub lambda: Wavelength,
    material_text: String,
}

impl Context {
    pub fn new(cfg: RunConfig) -> CliResult<Self> {
        let material_text = match &cfg.material {
            Some(p) => std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?,
            None => Material::default_toml().to_string(),
        };
        let material = Material::from_toml_str(&material_text)?;
        let solver = ModeSolver::with_grid(material, cfg.grid.clone())?;
        if !(cfg.wavelength_um > 0.0) {
            return Err(CliError::Config("wavelength_um must be > 0".into()));
        }
        let lambda = Wavelength::from_um(cfg.wavelength_um);
        Ok(Context { cfg, solver, lambda, material_text })
    }

    /// SHA-256 over the resolved config, the material data and any extra
    /// input the command reads.
    pub fn hash(&self, extra: &[u8]) -> String {
        let mut h = Sha256::new();
        h.update(serde_json::to_vec(&self.cfg).expect("config serializes"));
        h.update(self.material_text.as_bytes());
        h.update(extra);
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}
