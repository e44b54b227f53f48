//! Coupled-mode simulation of modal and polarization qubits in Ti:LiNbO₃
//! diffused-channel waveguide circuits.
//!
//! The crate is layered bottom-up:
//!
//! * [`material`]: Sellmeier dispersion, titanium indiffusion, Pockels shifts.
//! * [`modesolver`]: effective-index solver for diffused channel guides.
//! * [`coupling`]: coupled-mode transfer matrices and overlap integrals.
//! * [`devices`]: analyzer, σz, rotator, two-mode EO coupler, CNOT.
//! * [`quantum`]: modal and polarization⊗mode states, truth tables.
//!
//! All public quantities are SI (metres, volts, rad/m) unless a name says otherwise.

pub mod coupling;
pub mod devices;
pub mod error;
pub mod linalg;
pub mod material;
pub mod modesolver;
pub mod quantum;
pub mod root;
pub mod serial;
pub mod units;

pub use error::{Error, Result};
pub use units::{Polarization, Wavelength};
