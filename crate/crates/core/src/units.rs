//! Unit helpers and small shared value types.

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One micrometre in metres.
pub const UM: f64 = 1e-6;
/// One millimetre in metres.
pub const MM: f64 = 1e-3;
/// One picometre per volt in metres per volt.
pub const PM_PER_V: f64 = 1e-12;

/// Vacuum wavelength, stored in metres.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Wavelength(f64);

impl Wavelength {
    pub fn from_m(metres: f64) -> Self {
        Wavelength(metres)
    }

    pub fn from_um(micrometres: f64) -> Self {
        Wavelength(micrometres * UM)
    }

    pub fn m(self) -> f64 {
        self.0
    }

    pub fn um(self) -> f64 {
        self.0 / UM
    }

    /// Vacuum wavenumber 2π/λ in rad/m.
    pub fn k0(self) -> f64 {
        2.0 * PI / self.0
    }

    /// Propagation constant for an effective index, β = 2π·n/λ.
    pub fn beta(self, index: f64) -> f64 {
        2.0 * PI * index / self.0
    }
}

impl fmt::Display for Wavelength {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} µm", self.um())
    }
}

/// Guided-wave polarization. In z-cut LiNbO₃ TE sees n_o and TM sees n_e.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Polarization {
    TE,
    TM,
}

impl Polarization {
    pub fn other(self) -> Self {
        match self {
            Polarization::TE => Polarization::TM,
            Polarization::TM => Polarization::TE,
        }
    }
}

impl fmt::Display for Polarization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Polarization::TE => f.write_str("TE"),
            Polarization::TM => f.write_str("TM"),
        }
    }
}

impl std::str::FromStr for Polarization {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "TE" => Ok(Polarization::TE),
            "TM" => Ok(Polarization::TM),
            other => Err(crate::Error::config(format!("unknown polarization {other:?}"))),
        }
    }
}

/// Wrap a phase into (−π, π].
pub fn wrap_phase(phase: f64) -> f64 {
    let mut p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p -= 2.0 * PI;
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wavelength_round_trip() {
        let lambda = Wavelength::from_um(0.812);
        assert!((lambda.um() - 0.812).abs() / 0.812 < 1e-12);
        assert!((lambda.m() - 0.812e-6).abs() / 0.812e-6 < 1e-12);
    }

    #[test]
    fn wrap_phase_range() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!(wrap_phase(0.25).abs() - 0.25 < 1e-15);
        assert!((wrap_phase(-0.25) + 0.25).abs() < 1e-15);
    }
}
