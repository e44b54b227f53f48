//! Devices assembled from the mode solver and coupled-mode blocks.

pub mod analyzer;
pub mod circuit;
pub mod cnot;
pub mod phase_plan;
pub mod rotator;
pub mod sigma_z;
pub mod tmw;

pub use analyzer::{AnalyzerModes, AnalyzerOutput, ModeAnalyzer, ModeAnalyzerSpec, OutputParity};
pub use cnot::{design_cnot, CnotDesign, CnotGate};
pub use phase_plan::{phase_equalize, ComponentPhases, PhasePlan, PhasePlanInputs};
pub use rotator::{rotation, ModeRotator, ModeRotatorSpec, RotatorVoltages};
pub use sigma_z::{sigma_z, sigma_z_tmw_length, SigmaZCascade, SigmaZReport};
pub use tmw::{optimize_tmw_coupler, tmw_coupler_unitary, CouplerDesign, OptimizeOptions, TmwCoupler, TwoModeCouplerSpec};
