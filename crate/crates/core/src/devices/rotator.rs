use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{cascade_decomposition, polar_form, t2, transfer_matrix, CouplerParams};
use crate::linalg::{cis, C2};
use crate::material::Material;
use crate::modesolver::{ModeSolver, WaveguideGeometry};
use crate::root;
use crate::units::{wrap_phase, Polarization, Wavelength, MM, UM};
use crate::{Error, Result};

/// |ΔβL| at which a π/2κ coupler transfers nothing.
pub const NULL_MISMATCH: f64 = 1.7320508075688772 * PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModeRotatorSpec {
    pub smw_width_um: f64,
    /// Directional coupler length, equal to π/2κ.
    pub coupler_length_mm: f64,
    pub coupler_gap_um: f64,
    pub modulator_length_mm: f64,
    pub modulator_gap_um: f64,
    pub pol: Polarization,
    /// Index used in the Pockels formulas; `None` takes the SMW n_eff.
    pub index: Option<f64>,
}

impl Default for ModeRotatorSpec {
    fn default() -> Self {
        ModeRotatorSpec {
            smw_width_um: 2.2,
            coupler_length_mm: 1.73,
            coupler_gap_um: 5.0,
            modulator_length_mm: 5.0,
            modulator_gap_um: 5.0,
            pol: Polarization::TM,
            index: None,
        }
    }
}

/// V₁ on the coupler, V₂ on the input modulator (odd arm), V₃ on the
/// output modulator (even arm).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatorVoltages {
    pub v1: f64,
    pub v2: f64,
    pub v3: f64,
}

/// Analyzer, EO directional coupler, combiner. Analyzer and combiner are
/// taken as ideal here; the arms are ordered (even, odd).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeRotator {
    pub lambda: Wavelength,
    pub index: f64,
    /// Pockels coefficient in m/V.
    pub r: f64,
    pub length: f64,
    pub gap: f64,
    pub modulator_length: f64,
    pub modulator_gap: f64,
}

/// R(θ) = [[cos θ/2, −j sin θ/2], [−j sin θ/2, cos θ/2]].
pub fn rotation(theta: f64) -> C2 {
    t2(theta)
}

/// θ for a π/2κ coupler with mismatch ΔβL = `x`.
pub fn theta_of_mismatch(x: f64) -> f64 {
    let p = CouplerParams { kappa: PI / 2.0, delta_beta: x, length: 1.0 };
    polar_form(&p).theta
}

/// Inverse of [`theta_of_mismatch`] on [0, √3π], where it decreases from π to 0.
pub fn mismatch_for_theta(theta: f64) -> Result<f64> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("rotation angle {theta} outside [0, π]")));
    }
    if theta == PI {
        return Ok(0.0);
    }
    if theta == 0.0 {
        return Ok(NULL_MISMATCH);
    }
    root::bisect(|x| theta_of_mismatch(x) - theta, 0.0, NULL_MISMATCH, 1e-16)
}

impl ModeRotator {
    pub fn new(spec: &ModeRotatorSpec, material: &Material, lambda: Wavelength, index: f64) -> Result<Self> {
        for (v, name) in [
            (spec.coupler_length_mm, "coupler_length_mm"),
            (spec.coupler_gap_um, "coupler_gap_um"),
            (spec.modulator_length_mm, "modulator_length_mm"),
            (spec.modulator_gap_um, "modulator_gap_um"),
            (index, "index"),
        ] {
            if !(v > 0.0) {
                return Err(Error::domain(format!("rotator {name} must be > 0")));
            }
        }
        Ok(ModeRotator {
            lambda,
            index,
            r: material.pockels.r(spec.pol),
            length: spec.coupler_length_mm * MM,
            gap: spec.coupler_gap_um * UM,
            modulator_length: spec.modulator_length_mm * MM,
            modulator_gap: spec.modulator_gap_um * UM,
        })
    }

    /// Takes n from the spec or from the SMW fundamental mode.
    pub fn from_solver(solver: &ModeSolver, spec: &ModeRotatorSpec, lambda: Wavelength) -> Result<Self> {
        let n = match spec.index {
            Some(n) => n,
            None => solver.effective_index(&WaveguideGeometry::from_um(spec.smw_width_um), lambda, spec.pol, 0)?.n_eff(),
        };
        Self::new(spec, solver.material(), lambda, n)
    }

    /// κ = π/2L by construction.
    pub fn kappa(&self) -> f64 {
        PI / (2.0 * self.length)
    }

    fn n3r(&self) -> f64 {
        self.index.powi(3) * self.r
    }

    /// Δβ produced by V₁ on the push-pull coupler electrodes.
    pub fn delta_beta(&self, v1: f64) -> f64 {
        2.0 * PI * self.n3r() * v1 / (self.lambda.m() * self.gap)
    }

    /// Phase Γ added by one modulator.
    pub fn modulator_phase(&self, v: f64) -> f64 {
        PI * self.n3r() * v * self.modulator_length / (self.lambda.m() * self.modulator_gap)
    }

    fn modulator_voltage(&self, gamma: f64) -> f64 {
        self.lambda.m() * self.modulator_gap * gamma / (PI * self.n3r() * self.modulator_length)
    }

    pub fn coupler(&self, v1: f64) -> Result<CouplerParams> {
        CouplerParams::new(self.kappa(), self.delta_beta(v1), self.length)
    }

    pub fn voltages(&self, theta: f64) -> Result<RotatorVoltages> {
        let x = mismatch_for_theta(theta)?;
        let dbeta = x / self.length;
        let v1 = self.lambda.m() * self.gap * dbeta / (2.0 * PI * self.n3r());
        let c = cascade_decomposition(&self.coupler(v1)?);
        Ok(RotatorVoltages {
            v1,
            v2: self.modulator_voltage(wrap_phase(c.gamma1)),
            v3: self.modulator_voltage(wrap_phase(c.gamma2)),
        })
    }

    /// P₃·T·P₂ on the (even, odd) arms.
    pub fn unitary(&self, v: &RotatorVoltages) -> Result<C2> {
        let t = transfer_matrix(&self.coupler(v.v1)?).0;
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let p2 = C2::new(one, zero, zero, cis(self.modulator_phase(v.v2)));
        let p3 = C2::new(cis(self.modulator_phase(v.v3)), zero, zero, one);
        Ok(p3 * t * p2)
    }

    pub fn rotation_angle(&self, v1: f64) -> Result<f64> {
        Ok(polar_form(&self.coupler(v1)?).theta)
    }
}
