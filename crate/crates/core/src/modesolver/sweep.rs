use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{FieldOrientation, ModeSolver, WaveguideGeometry};
use crate::root;
use crate::units::{Polarization, Wavelength, UM};
use crate::{Error, Result};

/// Two identical two-mode guides under a push-pull electrode pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerPair {
    /// Strip width in metres.
    pub width: f64,
    /// Electrode separation in metres.
    pub electrode_gap: f64,
    pub wg1: FieldOrientation,
    pub wg2: FieldOrientation,
}

impl CouplerPair {
    /// Voltage applied to WG2 with WG1 grounded: WG2 index raised, WG1 lowered.
    pub fn push_pull(width: f64, electrode_gap: f64) -> Self {
        CouplerPair { width, electrode_gap, wg1: FieldOrientation::Up, wg2: FieldOrientation::Down }
    }

    pub fn flipped(self) -> Self {
        CouplerPair { wg1: self.wg1.flipped(), wg2: self.wg2.flipped(), ..self }
    }

    pub fn guide(&self, which: usize, volts: f64) -> WaveguideGeometry {
        let o = if which == 1 { self.wg1 } else { self.wg2 };
        WaveguideGeometry::new(self.width).with_electrode(self.electrode_gap, o, volts)
    }
}

/// Propagation constants (rad/m) at one voltage; `None` where cut off.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairRow {
    pub volts: f64,
    pub even_wg1: Option<f64>,
    pub odd_wg1: Option<f64>,
    pub even_wg2: Option<f64>,
    pub odd_wg2: Option<f64>,
}

impl PairRow {
    /// β_even(WG1) − β_odd(WG2), when both exist.
    pub fn mismatch(&self) -> Option<f64> {
        Some(self.even_wg1? - self.odd_wg2?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSweep {
    pub rows: Vec<PairRow>,
    /// Set when some mode was cut off inside the grid.
    pub truncated: bool,
}

impl ModeSolver {
    fn beta_or_cutoff(&self, g: &WaveguideGeometry, lambda: Wavelength, pol: Polarization, m: usize) -> Result<Option<f64>> {
        match self.effective_index(g, lambda, pol, m) {
            Ok(mode) => Ok(Some(mode.beta())),
            Err(Error::NotGuided { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }

    pub fn pair_row(&self, pair: &CouplerPair, lambda: Wavelength, pol: Polarization, volts: f64) -> Result<PairRow> {
        let g1 = pair.guide(1, volts);
        let g2 = pair.guide(2, volts);
        Ok(PairRow {
            volts,
            even_wg1: self.beta_or_cutoff(&g1, lambda, pol, 0)?,
            odd_wg1: self.beta_or_cutoff(&g1, lambda, pol, 1)?,
            even_wg2: self.beta_or_cutoff(&g2, lambda, pol, 0)?,
            odd_wg2: self.beta_or_cutoff(&g2, lambda, pol, 1)?,
        })
    }

    /// β of {even, odd} × {WG1, WG2} over a voltage grid.
    pub fn voltage_sweep_pair(
        &self,
        pair: &CouplerPair,
        lambda: Wavelength,
        pol: Polarization,
        volts: &[f64],
    ) -> Result<PairSweep> {
        let at_zero = WaveguideGeometry::new(pair.width);
        if self.guided_count(&at_zero, lambda, pol)? < 2 {
            return Err(Error::NotGuided { order: 1, width_um: pair.width / UM });
        }
        let rows = volts
            .par_iter()
            .map(|&v| self.pair_row(pair, lambda, pol, v))
            .collect::<Result<Vec<_>>>()?;
        let truncated = rows
            .iter()
            .any(|r| r.even_wg1.is_none() || r.odd_wg1.is_none() || r.even_wg2.is_none() || r.odd_wg2.is_none());
        Ok(PairSweep { rows, truncated })
    }

    /// β_even(WG1) − β_odd(WG2) at one voltage.
    pub fn pair_mismatch(&self, pair: &CouplerPair, lambda: Wavelength, pol: Polarization, volts: f64) -> Result<f64> {
        let e1 = self.effective_index(&pair.guide(1, volts), lambda, pol, 0)?;
        let o2 = self.effective_index(&pair.guide(2, volts), lambda, pol, 1)?;
        Ok(e1.beta() - o2.beta())
    }

    /// Sweep then refine the even(WG1)/odd(WG2) crossing.
    pub fn crossing_voltage(
        &self,
        pair: &CouplerPair,
        lambda: Wavelength,
        pol: Polarization,
        volts: &[f64],
        tol_beta: f64,
    ) -> Result<f64> {
        let sweep = self.voltage_sweep_pair(pair, lambda, pol, volts)?;
        find_crossing_voltage(&sweep, |v| self.pair_mismatch(pair, lambda, pol, v), tol_beta)
    }
}

/// Locate the first sign change of `mismatch` in the sweep and refine it
/// with `diff(V)` until |Δβ| < `tol_beta`.
pub fn find_crossing_voltage<F>(sweep: &PairSweep, mut diff: F, tol_beta: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let lo_v = sweep.rows.first().map_or(0.0, |r| r.volts);
    let hi_v = sweep.rows.last().map_or(0.0, |r| r.volts);
    let no_crossing = || Error::NoCrossing { lo: lo_v, hi: hi_v };
    let mut bracket = None;
    for pair in sweep.rows.windows(2) {
        if let (Some(a), Some(b)) = (pair[0].mismatch(), pair[1].mismatch()) {
            if a == 0.0 {
                return Ok(pair[0].volts);
            }
            if a.signum() != b.signum() {
                bracket = Some((pair[0].volts, pair[1].volts));
                break;
            }
        }
    }
    if bracket.is_none() {
        if let Some(last) = sweep.rows.last() {
            if last.mismatch() == Some(0.0) {
                return Ok(last.volts);
            }
        }
    }
    let (a, b) = bracket.ok_or_else(no_crossing)?;
    // errors inside the closure are carried out through a side slot
    let mut failure = None;
    let v = root::brent(
        |v| match diff(v) {
            Ok(d) => d,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        a,
        b,
        1e-12 * a.abs().max(b.abs()).max(1.0),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let v = v?;
    let residual = diff(v)?.abs();
    if residual >= tol_beta {
        return Err(Error::Numeric { what: "crossing voltage refinement".into(), residual });
    }
    Ok(v)
}
