use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::coupling::{coupling_coefficient, reduce_to_blocks, BlockReduction, CouplerParams, ModeField};
use crate::linalg::C4;
use crate::modesolver::{CouplerPair, FieldOrientation, ModeSolver, CROSSING_TOL};
use crate::units::{Polarization, Wavelength, MM, UM};
use crate::{Error, Result};

/// Mode labels of the 4×4 coupler unitary.
pub const TMW_MODES: [&str; 4] = ["e1", "o1", "e2", "o2"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TwoModeCouplerSpec {
    pub width_um: f64,
    /// Edge-to-edge separation of the two guides.
    pub gap_um: f64,
    pub electrode_length_mm: f64,
    pub electrode_gap_um: f64,
    pub volts: f64,
    pub wg1: FieldOrientation,
    pub wg2: FieldOrientation,
}

impl Default for TwoModeCouplerSpec {
    fn default() -> Self {
        TwoModeCouplerSpec {
            width_um: 5.6,
            gap_um: 4.0,
            electrode_length_mm: 2.2,
            electrode_gap_um: 4.0,
            volts: 36.0,
            wg1: FieldOrientation::Up,
            wg2: FieldOrientation::Down,
        }
    }
}

impl TwoModeCouplerSpec {
    pub fn pair(&self) -> CouplerPair {
        CouplerPair { width: self.width_um * UM, electrode_gap: self.electrode_gap_um * UM, wg1: self.wg1, wg2: self.wg2 }
    }
}

/// Pair of identical TMWs under push-pull electrodes, one polarization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TmwCoupler {
    pub pol: Polarization,
    /// β of e1, o1, e2, o2 (rad/m).
    pub betas: [f64; 4],
    /// Cross-guide couplings (mode in WG1, mode in WG2, κ).
    pub kappas: Vec<(usize, usize, f64)>,
    pub length: f64,
    pub reduction: BlockReduction,
}

impl TmwCoupler {
    pub fn build(solver: &ModeSolver, spec: &TwoModeCouplerSpec, lambda: Wavelength, pol: Polarization) -> Result<Self> {
        let pair = spec.pair();
        let g1 = solver.solve(&pair.guide(1, spec.volts), lambda, pol)?;
        let g2 = solver.solve(&pair.guide(2, spec.volts), lambda, pol)?;
        for g in [&g1, &g2] {
            if g.modes.len() < 2 {
                return Err(Error::NotGuided { order: 1, width_um: spec.width_um });
            }
        }
        let betas = [
            lambda.beta(g1.modes[0].n_eff),
            lambda.beta(g1.modes[1].n_eff),
            lambda.beta(g2.modes[0].n_eff),
            lambda.beta(g2.modes[1].n_eff),
        ];
        let gap = spec.gap_um * UM;
        let mut kappas = Vec::with_capacity(4);
        for a in 0..2 {
            for b in 0..2 {
                let k = coupling_coefficient(&ModeField::from_solution(&g1, a)?, &ModeField::from_solution(&g2, b)?, gap)?;
                kappas.push((a, 2 + b, k));
            }
        }
        let length = spec.electrode_length_mm * MM;
        let reduction = reduce_to_blocks(&betas, &kappas, length)?;
        Ok(TmwCoupler { pol, betas, kappas, length, reduction })
    }

    pub fn kappa(&self, a: usize, b: usize) -> Option<f64> {
        self.kappas.iter().find(|&&(i, j, _)| (i, j) == (a, b) || (j, i) == (a, b)).map(|k| k.2)
    }

    pub fn unitary(&self) -> Result<C4> {
        self.reduction.unitary::<4>()
    }

    /// Power delivered from mode `from` into mode `to`.
    pub fn power(&self, from: usize, to: usize) -> Result<f64> {
        Ok(self.unitary()?[(to, from)].norm_sqr())
    }
}

pub fn tmw_coupler_unitary(solver: &ModeSolver, spec: &TwoModeCouplerSpec, lambda: Wavelength, pol: Polarization) -> Result<C4> {
    TmwCoupler::build(solver, spec, lambda, pol)?.unitary()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplerDesign {
    pub spec: TwoModeCouplerSpec,
    /// Crossing voltage V*.
    pub volts: f64,
    pub q: u32,
    pub kappa: f64,
    /// β_e1 − β_o2 left at V* (rad/m).
    pub delta_beta: f64,
    /// TM e1 → o2 power.
    pub tm_transfer: f64,
    /// Worst TE even self-transmission.
    pub te_passthrough: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub volts: Vec<f64>,
    pub max_q: u32,
    pub min_tm_transfer: f64,
    pub min_te_passthrough: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        OptimizeOptions {
            volts: (0..=10).map(|i| 10.0 * i as f64).collect(),
            max_q: 15,
            min_tm_transfer: 0.999,
            min_te_passthrough: 0.99,
        }
    }
}

/// Retune V to the TM crossing voltage and L₁ to qπ/2γ, taking the
/// smallest odd q whose TE even modes pass through.
pub fn optimize_tmw_coupler(
    solver: &ModeSolver,
    spec: &TwoModeCouplerSpec,
    lambda: Wavelength,
    opts: &OptimizeOptions,
) -> Result<CouplerDesign> {
    let pair = spec.pair();
    let volts = solver.crossing_voltage(&pair, lambda, Polarization::TM, &opts.volts, CROSSING_TOL)?;
    let mut tuned = TwoModeCouplerSpec { volts, ..spec.clone() };
    let tm = TmwCoupler::build(solver, &tuned, lambda, Polarization::TM)?;
    let kappa = tm.kappa(0, 3).unwrap_or(0.0);
    if !(kappa > 0.0) {
        return Err(Error::Design("no e1/o2 coupling at the crossing voltage".into()));
    }
    let delta_beta = tm.betas[0] - tm.betas[3];
    let gamma = CouplerParams::new(kappa, delta_beta, 1.0)?.gamma();
    let mut best: Option<CouplerDesign> = None;
    for q in (1..=opts.max_q).step_by(2) {
        tuned.electrode_length_mm = q as f64 * PI / (2.0 * gamma) / MM;
        let tm = TmwCoupler::build(solver, &tuned, lambda, Polarization::TM)?;
        let te = TmwCoupler::build(solver, &tuned, lambda, Polarization::TE)?;
        let tm_transfer = tm.power(0, 3)?;
        let te_passthrough = te.power(0, 0)?.min(te.power(2, 2)?);
        let design = CouplerDesign { spec: tuned.clone(), volts, q, kappa, delta_beta, tm_transfer, te_passthrough };
        if tm_transfer >= opts.min_tm_transfer && te_passthrough >= opts.min_te_passthrough {
            return Ok(design);
        }
        if best.as_ref().is_none_or(|b| te_passthrough > b.te_passthrough) {
            best = Some(design);
        }
    }
    let b = best.expect("at least one q tried");
    Err(Error::Infeasible(format!(
        "no odd q ≤ {} meets the targets; best q = {}: TM transfer {:.6}, TE passthrough {:.6}",
        opts.max_q, b.q, b.tm_transfer, b.te_passthrough
    )))
}
