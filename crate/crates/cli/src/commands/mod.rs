pub mod cnot;
pub mod dispersion;
pub mod evolution;
pub mod phase_plan;
pub mod rotator;
pub mod selftest;
