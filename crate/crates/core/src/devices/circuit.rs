//! Declarative circuits: named device specs and an ordered list of stages.
//!
//! ```toml
//! wavelength_um = 0.812
//!
//! [specs.prep]
//! kind = "polarization-rotation"
//! theta = 1.5707963267948966
//!
//! [specs.gate]
//! kind = "cnot"
//! model = "solver"
//!
//! [[stages]]
//! spec = "prep"
//! [[stages]]
//! spec = "gate"
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{cis, C2, C4};
use crate::modesolver::ModeSolver;
use crate::quantum::{on_mode, on_polarization, JOINT_BASIS, MODAL_BASIS};
use crate::units::{Wavelength, MM};
use crate::{Error, Result};

use super::analyzer::ModeAnalyzerSpec;
use super::cnot::{design_cnot, CnotDesign, CnotGate};
use super::phase_plan::{PhasePlan, PhasePlanInputs};
use super::rotator::{ModeRotator, ModeRotatorSpec};
use super::sigma_z::sigma_z;
use super::tmw::{OptimizeOptions, TwoModeCouplerSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CnotModel {
    /// Constants given in `plan`, perfect coupler.
    #[default]
    Ideal,
    /// Constants from the mode solver, tuned coupler.
    Solver,
}

fn default_q() -> [u32; 3] {
    [1, 1, 1]
}

fn default_true() -> bool {
    true
}

fn default_min_lengths() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CnotSpec {
    #[serde(default)]
    pub model: CnotModel,
    /// Plan constants (SI) for the ideal model.
    #[serde(default)]
    pub plan: Option<PhasePlanInputs>,
    /// Solver model: q₁, q₃ (q₂ comes from the coupler optimizer).
    #[serde(default = "default_q")]
    pub q: [u32; 3],
    #[serde(default = "default_min_lengths")]
    pub min_lengths_mm: [f64; 3],
    /// Solve ℓ₁, ℓ₂, ℓ₃; otherwise `lengths_mm` is used as given.
    #[serde(default = "default_true")]
    pub equalize: bool,
    #[serde(default)]
    pub lengths_mm: Option<[f64; 3]>,
    #[serde(default)]
    pub phase_errors: [f64; 4],
    #[serde(default)]
    pub tm_analyzer: Option<ModeAnalyzerSpec>,
    #[serde(default)]
    pub te_analyzer: Option<ModeAnalyzerSpec>,
    #[serde(default)]
    pub coupler: Option<TwoModeCouplerSpec>,
}

impl CnotSpec {
    pub fn ideal(plan: PhasePlanInputs) -> Self {
        CnotSpec {
            model: CnotModel::Ideal,
            plan: Some(plan),
            q: default_q(),
            min_lengths_mm: default_min_lengths(),
            equalize: true,
            lengths_mm: None,
            phase_errors: [0.0; 4],
            tm_analyzer: None,
            te_analyzer: None,
            coupler: None,
        }
    }

    /// Gate plus, for the solver model, the derived design.
    pub fn build(&self, solver: &ModeSolver, lambda: Wavelength) -> Result<(CnotGate, Option<CnotDesign>)> {
        let (mut gate, design) = match self.model {
            CnotModel::Ideal => {
                let plan = self.plan.as_ref().ok_or_else(|| Error::config("ideal CNOT needs a [plan] table"))?;
                (CnotGate::ideal(plan)?, None)
            }
            CnotModel::Solver => {
                let tm = self.tm_analyzer.clone().unwrap_or_else(|| ModeAnalyzerSpec::new(crate::Polarization::TM));
                let te = self.te_analyzer.clone().unwrap_or_else(|| ModeAnalyzerSpec::new(crate::Polarization::TE));
                let coupler = self.coupler.clone().unwrap_or_default();
                let mins = self.min_lengths_mm.map(|l| l * MM);
                let d = design_cnot(solver, lambda, &tm, &te, &coupler, &OptimizeOptions::default(), self.q, mins)?;
                (d.gate()?, Some(d))
            }
        };
        if !self.equalize {
            let l = self.lengths_mm.ok_or_else(|| Error::config("equalize = false needs lengths_mm"))?;
            gate.plan = PhasePlan { inputs: gate.plan.inputs.clone(), lengths: l.map(|x| x * MM) };
        }
        Ok((gate.with_errors(self.phase_errors), design))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RotatorStage {
    pub theta: f64,
    #[serde(default)]
    pub rotator: ModeRotatorSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhaseModulatorStage {
    /// A joint basis label ("o,TM") or a mode label ("o") for both polarizations.
    pub target: String,
    pub phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolarizationRotationStage {
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DeviceSpec {
    Cnot(CnotSpec),
    Rotator(RotatorStage),
    PhaseModulator(PhaseModulatorStage),
    PolarizationRotation(PolarizationRotationStage),
    SigmaX,
    SigmaZ,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageRef {
    pub spec: String,
}

fn default_wavelength() -> f64 {
    0.812
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitFile {
    #[serde(default = "default_wavelength")]
    pub wavelength_um: f64,
    #[serde(default)]
    pub specs: BTreeMap<String, DeviceSpec>,
    pub stages: Vec<StageRef>,
}

/// Result of evaluating a circuit.
#[derive(Debug, Clone)]
pub struct CircuitEval {
    pub unitary: C4,
    /// CNOT stages in order, with their solver designs when derived.
    pub gates: Vec<(CnotGate, Option<CnotDesign>)>,
}

/// Real rotation on (TM, TE) by θ/2 in amplitude.
pub fn polarization_rotation(theta: f64) -> C2 {
    let (s, c) = (0.5 * theta).sin_cos();
    C2::new(Complex64::new(c, 0.0), Complex64::new(-s, 0.0), Complex64::new(s, 0.0), Complex64::new(c, 0.0))
}

/// [[0, 1], [1, 0]].
pub fn sigma_x() -> C2 {
    let z = Complex64::new(0.0, 0.0);
    let o = Complex64::new(1.0, 0.0);
    C2::new(z, o, o, z)
}

fn phase_modulator(st: &PhaseModulatorStage) -> Result<C4> {
    let mut u = C4::identity();
    if let Some(i) = JOINT_BASIS.iter().position(|b| *b == st.target) {
        u[(i, i)] = cis(st.phase);
    } else if let Some(m) = MODAL_BASIS.iter().position(|b| *b == st.target) {
        u[(m, m)] = cis(st.phase);
        u[(2 + m, 2 + m)] = cis(st.phase);
    } else {
        return Err(Error::config(format!("unknown phase-modulator target '{}'", st.target)));
    }
    Ok(u)
}

impl CircuitFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let c: CircuitFile = toml::from_str(text).map_err(|e| Error::config(format!("circuit: {e}")))?;
        for s in &c.stages {
            if !c.specs.contains_key(&s.spec) {
                return Err(Error::config(format!("stage refers to unknown spec '{}'", s.spec)));
            }
        }
        if !(c.wavelength_um > 0.0) {
            return Err(Error::config("circuit: wavelength_um must be > 0"));
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn wavelength(&self) -> Wavelength {
        Wavelength::from_um(self.wavelength_um)
    }

    /// Product of the stage unitaries, first stage acting first.
    pub fn evaluate(&self, solver: &ModeSolver) -> Result<CircuitEval> {
        let lambda = self.wavelength();
        let mut u = C4::identity();
        let mut gates = Vec::new();
        for stage in &self.stages {
            let m = match &self.specs[&stage.spec] {
                DeviceSpec::Cnot(spec) => {
                    let (gate, design) = spec.build(solver, lambda)?;
                    let m = gate.unitary();
                    gates.push((gate, design));
                    m
                }
                DeviceSpec::Rotator(st) => {
                    let rot = ModeRotator::from_solver(solver, &st.rotator, lambda)?;
                    on_mode(&rot.unitary(&rot.voltages(st.theta)?)?)
                }
                DeviceSpec::PhaseModulator(st) => phase_modulator(st)?,
                DeviceSpec::PolarizationRotation(st) => on_polarization(&polarization_rotation(st.theta)),
                DeviceSpec::SigmaX => on_mode(&sigma_x()),
                DeviceSpec::SigmaZ => on_mode(&sigma_z()),
            };
            u = m * u;
        }
        Ok(CircuitEval { unitary: u, gates })
    }
}
