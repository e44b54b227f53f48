use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{polar_form, transfer_matrix, CouplerParams};
use crate::linalg::{cis, C2, C4};
use crate::modesolver::{ModeSolver, WaveguideGeometry};
use crate::units::{Polarization, Wavelength, MM};
use crate::{Error, Result};

use super::analyzer::{ModeAnalyzer, ModeAnalyzerSpec};
use super::phase_plan::{phase_equalize, ComponentPhases, PhasePlan, PhasePlanInputs};
use super::tmw::{optimize_tmw_coupler, CouplerDesign, OptimizeOptions, TmwCoupler, TwoModeCouplerSpec};

/// Three-path CNOT: polarization-selective analyzers, the two-mode EO
/// coupler (TM e₁ ↔ o₂ block), combiners, and equalized path lengths.
///
/// Phases follow the path-length bookkeeping of [`PhasePlan`], accumulated
/// as e^{+jφ}; only relative phases matter for the gate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnotGate {
    pub plan: PhasePlan,
    /// TM coupler block, Δβ = β_e1 − β_o2.
    pub coupler: CouplerParams,
    /// Additive errors on (e,TM), (o,TM), (e,TE), (o,TE).
    pub phase_errors: [f64; 4],
    /// Amplitude the odd-TE component keeps through the TM analyzer and
    /// combiner (1 when they do not couple it at all).
    pub te_odd_through: f64,
}

impl CnotGate {
    /// Perfect coupler of length L_D = q₂π/2κ, equalized lengths.
    pub fn ideal(inputs: &PhasePlanInputs) -> Result<Self> {
        let plan = phase_equalize(inputs)?;
        let kappa = inputs.q[1] as f64 * PI / (2.0 * inputs.l_d);
        Ok(CnotGate {
            plan,
            coupler: CouplerParams::new(kappa, 0.0, inputs.l_d)?,
            phase_errors: [0.0; 4],
            te_odd_through: 1.0,
        })
    }

    pub fn with_errors(mut self, errors: [f64; 4]) -> Self {
        self.phase_errors = errors;
        self
    }

    /// Component phases including the additive errors.
    pub fn component_phases(&self) -> ComponentPhases {
        let p = self.plan.phases();
        let e = self.phase_errors;
        ComponentPhases { e_tm: p.e_tm + e[0], o_tm: p.o_tm + e[1], e_te: p.e_te + e[2], o_te: p.o_te + e[3] }
    }

    /// U = blockdiag(U_TM, U_TE) on (e,TM), (o,TM), (e,TE), (o,TE).
    /// Unitary unless `te_odd_through` < 1, in which case the lost power
    /// has left through the analyzer arm.
    pub fn unitary(&self) -> C4 {
        let inp = &self.plan.inputs;
        let [l1, l2, _] = self.plan.lengths;
        let q1 = inp.q[0] as f64;
        let zero = Complex64::new(0.0, 0.0);
        let d = C2::new(cis(inp.beta_e_tm * l1), zero, zero, cis(inp.beta_o_tm * l2 - q1 * PI));
        let x = transfer_matrix(&self.coupler).0 * cis(inp.beta_prime * inp.l_d);
        let e = self.phase_errors;
        let u_tm = d * x * d * C2::new(cis(e[0]), zero, zero, cis(e[1]));
        let p = self.plan.phases();
        let mut u = C4::zeros();
        u.fixed_view_mut::<2, 2>(0, 0).copy_from(&u_tm);
        u[(2, 2)] = cis(p.e_te + e[2]);
        u[(3, 3)] = cis(p.o_te + e[3]) * self.te_odd_through;
        u
    }
}

/// Circuit parameters derived from the mode solver.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CnotDesign {
    pub inputs: PhasePlanInputs,
    pub coupler: CouplerParams,
    pub coupler_design: CouplerDesign,
    pub tm_analyzer: ModeAnalyzer,
    pub te_analyzer: ModeAnalyzer,
    /// Odd-TE power kept through the TM analyzer and combiner.
    pub te_odd_through_power: f64,
}

/// Build analyzers and the tuned coupler, then collect the plan inputs.
pub fn design_cnot(
    solver: &ModeSolver,
    lambda: Wavelength,
    tm_spec: &ModeAnalyzerSpec,
    te_spec: &ModeAnalyzerSpec,
    coupler_spec: &TwoModeCouplerSpec,
    opts: &OptimizeOptions,
    q: [u32; 3],
    min_lengths: [f64; 3],
) -> Result<CnotDesign> {
    if tm_spec.pol != Polarization::TM || te_spec.pol != Polarization::TE {
        return Err(Error::config("CNOT needs a TM analyzer and a TE analyzer"));
    }
    let tm_analyzer = ModeAnalyzer::design(solver, tm_spec, lambda)?;
    let te_analyzer = ModeAnalyzer::design(solver, te_spec, lambda)?;
    let cd = optimize_tmw_coupler(solver, coupler_spec, lambda, opts)?;
    let l_d = cd.spec.electrode_length_mm * MM;
    let tm = TmwCoupler::build(solver, &cd.spec, lambda, Polarization::TM)?;
    let te = TmwCoupler::build(solver, &cd.spec, lambda, Polarization::TE)?;
    let kappa = tm.kappa(0, 3).unwrap_or(0.0);
    let coupler = CouplerParams::new(kappa, tm.betas[0] - tm.betas[3], l_d)?;
    let g = WaveguideGeometry::from_um(coupler_spec.width_um);
    let beta = |pol, m| solver.effective_index(&g, lambda, pol, m).map(|x| x.beta());
    // odd TE crosses the TM analyzer and combiner without being extracted
    let te_block = polar_form(&tm_analyzer.modes(Polarization::TE).odd_block(tm_analyzer.length)?);
    let phi_a = te_block.phi_a;
    let through = (0.5 * te_block.theta).cos().powi(2);
    let inputs = PhasePlanInputs {
        beta_e_tm: beta(Polarization::TM, 0)?,
        beta_o_tm: beta(Polarization::TM, 1)?,
        beta_e_te: beta(Polarization::TE, 0)?,
        beta_o_te: beta(Polarization::TE, 1)?,
        beta_prime: 0.5 * (tm.betas[0] + tm.betas[3]),
        beta_dprime: te.betas[0],
        l_d,
        phi_a,
        q: [q[0], cd.q, q[2]],
        min_lengths,
    };
    Ok(CnotDesign { inputs, coupler, coupler_design: cd, tm_analyzer, te_analyzer, te_odd_through_power: through * through })
}

impl CnotDesign {
    /// Gate with equalized lengths and the physical (possibly detuned) coupler.
    pub fn gate(&self) -> Result<CnotGate> {
        Ok(CnotGate {
            plan: phase_equalize(&self.inputs)?,
            coupler: self.coupler,
            phase_errors: [0.0; 4],
            te_odd_through: self.te_odd_through_power.sqrt(),
        })
    }
}
