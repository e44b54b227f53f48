use std::f64::consts::PI;

use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{reduce_to_blocks, CouplerParams};
use crate::linalg::{cis, phase_aligned_residual, C2};
use crate::modesolver::{ModeSolver, WaveguideGeometry};
use crate::root;
use crate::units::{wrap_phase, Polarization, Wavelength};
use crate::{Error, Result};

use super::analyzer::ModeAnalyzer;

/// diag(1, −1).
pub fn sigma_z() -> C2 {
    C2::new(
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(-1.0, 0.0),
    )
}

/// Length π/|β_e − β_o| of a single TMW that acts as σz.
pub fn sigma_z_tmw_length(beta_even: f64, beta_odd: f64) -> Result<f64> {
    let d = (beta_even - beta_odd).abs();
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::Design("β_e = β_o: σz needs an infinitely long guide".into()));
    }
    Ok(PI / d)
}

/// Same, with the propagation constants taken from the solver.
pub fn sigma_z_tmw_length_for(solver: &ModeSolver, width: f64, lambda: Wavelength, pol: Polarization) -> Result<f64> {
    let g = WaveguideGeometry::new(width);
    let e = solver.effective_index(&g, lambda, pol, 0)?;
    let o = solver.effective_index(&g, lambda, pol, 1)?;
    sigma_z_tmw_length(e.beta(), o.beta())
}

/// diag(e^{−jβ_e L}, e^{−jβ_o L}) of a plain TMW section.
pub fn tmw_section(beta_even: f64, beta_odd: f64, length: f64) -> C2 {
    C2::new(cis(-beta_even * length), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), cis(-beta_odd * length))
}

/// Analyzer, two separate paths, combiner. Three guided paths: TMW even,
/// TMW odd (whatever the analyzer leaves behind) and the SMW arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmaZCascade {
    pub beta_even: f64,
    pub beta_odd: f64,
    pub beta_arm: f64,
    /// TMW odd ↔ arm.
    pub kappa: f64,
    pub coupler_length: f64,
    /// TMW length between the two couplers.
    pub even_path: f64,
    /// Arm length between the two couplers.
    pub arm_path: f64,
    /// Fabrication phase error on the arm (rad).
    pub phase_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SigmaZReport {
    pub unitary: [[[f64; 2]; 2]; 2],
    /// arg(U_oo/U_ee) − π, wrapped.
    pub deviation: f64,
    /// Entrywise distance from σz after the best global phase.
    pub residual: f64,
    /// Modulator phase on the arm that minimizes the residual.
    pub compensation: f64,
    pub compensated_residual: f64,
}

impl SigmaZCascade {
    /// Perfectly phase-matched couplers of length qπ/2κ with the arm length
    /// chosen so both paths accumulate equal phase (mod 2π). `min_arm` is
    /// the shortest arm that fits the geometry.
    pub fn ideal(beta_even: f64, beta_odd: f64, kappa: f64, q: u32, even_path: f64, min_arm: f64) -> Result<Self> {
        if q.is_multiple_of(2) {
            return Err(Error::domain("q must be an odd positive integer"));
        }
        let coupler_length = CouplerParams::coupling_length(kappa, q);
        let arm_path = design_arm(beta_even, beta_odd, coupler_length, even_path, min_arm);
        Ok(SigmaZCascade {
            beta_even,
            beta_odd,
            beta_arm: beta_odd,
            kappa,
            coupler_length,
            even_path,
            arm_path,
            phase_error: 0.0,
        })
    }

    /// From a built analyzer; the combiner is the same device reversed.
    pub fn from_analyzer(an: &ModeAnalyzer, even_path: f64, min_arm: f64) -> Self {
        let m = an.modes(an.design_pol);
        SigmaZCascade {
            beta_even: m.beta_even,
            beta_odd: m.beta_odd,
            beta_arm: m.beta_smw,
            kappa: m.kappa_odd,
            coupler_length: an.length,
            even_path,
            arm_path: design_arm(m.beta_even, m.beta_smw, an.length, even_path, min_arm),
            phase_error: 0.0,
        }
    }

    fn coupler(&self) -> Result<Matrix3<Complex64>> {
        let betas = [self.beta_even, self.beta_odd, self.beta_arm];
        let red = reduce_to_blocks(&betas, &[(1, 2, self.kappa)], self.coupler_length)?;
        red.unitary::<3>()
    }

    /// TMW-to-TMW 2×2 block with an extra modulator phase on the arm.
    pub fn unitary_with(&self, compensation: f64) -> Result<C2> {
        let c = self.coupler()?;
        let mid = Matrix3::from_diagonal(&nalgebra::Vector3::new(
            cis(-self.beta_even * self.even_path),
            cis(-self.beta_odd * self.even_path),
            cis(-self.beta_arm * self.arm_path - self.phase_error - compensation),
        ));
        let u = c.transpose() * mid * c;
        Ok(u.fixed_view::<2, 2>(0, 0).into_owned())
    }

    pub fn unitary(&self) -> Result<C2> {
        self.unitary_with(0.0)
    }

    pub fn report(&self) -> Result<SigmaZReport> {
        let u = self.unitary()?;
        let deviation = wrap_phase((u[(1, 1)] / u[(0, 0)]).arg() - PI);
        let residual = phase_aligned_residual(&u, &sigma_z()).0;
        let cost = |g: f64| self.unitary_with(g).map_or(f64::INFINITY, |u| phase_aligned_residual(&u, &sigma_z()).0);
        // the arm phase enters the odd entry directly, so −deviation is
        // the first guess; refine in a window around it
        let (compensation, compensated_residual) = root::golden_min(cost, -deviation - 0.5, -deviation + 0.5, 1e-10);
        let mut m = [[[0.0; 2]; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = [u[(i, j)].re, u[(i, j)].im];
            }
        }
        Ok(SigmaZReport { unitary: m, deviation, residual, compensation: wrap_phase(compensation), compensated_residual })
    }
}

/// Shortest arm ≥ `min_arm` with β_arm(2L + arm) ≡ β_e(2L + even_path) (mod 2π).
fn design_arm(beta_even: f64, beta_arm: f64, coupler: f64, even_path: f64, min_arm: f64) -> f64 {
    let target = beta_even * (2.0 * coupler + even_path) - beta_arm * 2.0 * coupler;
    let period = 2.0 * PI / beta_arm;
    let base = target / beta_arm;
    let k = ((min_arm - base) / period).ceil();
    base + k * period
}
