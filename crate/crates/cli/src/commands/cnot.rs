use std::f64::consts::FRAC_1_SQRT_2;
use std::path::Path;

use lnmodal::devices::circuit::CircuitFile;
use lnmodal::linalg::C4;
use lnmodal::quantum::{concurrence, distance_up_to_phase, truth_table, JointState, ModalQubit, TruthTable};
use num_complex::Complex64;

use crate::config::Context;
use crate::{CliError, CliResult, Outcome, Table};

pub const CONCURRENCE_TOL: f64 = 1e-9;
pub const NO_FLIP_TOL: f64 = 1e-6;

/// Everything `cnot-verify` decides on.
#[derive(Debug, Clone)]
pub struct CnotReport {
    pub truth: TruthTable,
    /// Of U·[(|TM⟩+|TE⟩)/√2 ⊗ |e⟩].
    pub concurrence: f64,
    /// |TE⟩⊗|e⟩ and |TE⟩⊗|o⟩ come out unchanged up to phase.
    pub te_control_unchanged: bool,
}

impl CnotReport {
    pub fn passed(&self) -> bool {
        self.truth.is_cnot && (self.concurrence - 1.0).abs() <= CONCURRENCE_TOL && self.te_control_unchanged
    }
}

pub fn verify(u: &C4) -> lnmodal::Result<CnotReport> {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let bell_in = JointState::product(h, h, &ModalQubit::even())?;
    // a lossy gate is not unitary; apply it directly and renormalize
    let apply = |psi: &JointState| {
        let v = u * nalgebra::Vector4::from_column_slice(&psi.amplitudes());
        [v[0], v[1], v[2], v[3]]
    };
    let out = JointState::normalized(apply(&bell_in))?;
    let mut te_ok = true;
    for m in [ModalQubit::even(), ModalQubit::odd()] {
        let psi = JointState::product(zero, one, &m)?;
        let o = apply(&psi);
        let norm: f64 = o.iter().map(|z| z.norm_sqr()).sum();
        te_ok &= (norm - 1.0).abs() < NO_FLIP_TOL && distance_up_to_phase(&o, &psi.amplitudes()) < NO_FLIP_TOL;
    }
    Ok(CnotReport { truth: truth_table(u), concurrence: concurrence(&out), te_control_unchanged: te_ok })
}

pub fn run(ctx: &Context, circuit: Option<&Path>) -> CliResult<Outcome> {
    let path = circuit.ok_or_else(|| CliError::Config("cnot-verify needs --circuit or [cnot] circuit".into()))?;
    let text = std::fs::read(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    let file = CircuitFile::from_toml_str(&String::from_utf8_lossy(&text))?;
    let eval = file.evaluate(&ctx.solver)?;
    let rep = verify(&eval.unitary)?;

    let mut table = Table::new(
        "cnot-verify",
        &ctx.hash(&text),
        "magnitude [1]; phase_deviation [rad]",
        &["input", "expected", "magnitude", "phase_deviation_rad", "ok"],
    );
    table
        .meta("circuit", path.display())
        .meta("is_cnot", rep.truth.is_cnot)
        .meta("fidelity", format!("{:.11e}", rep.truth.fidelity))
        .meta("concurrence", format!("{:.11e}", rep.concurrence))
        .meta("te_control_unchanged", rep.te_control_unchanged);
    for (i, (gate, design)) in eval.gates.iter().enumerate() {
        let plan = &gate.plan;
        table.meta(&format!("gate{i}_plan_residual_rad"), format!("{:.11e}", plan.residual()));
        table.meta(
            &format!("gate{i}_lengths_mm"),
            plan.lengths.iter().map(|l| format!("{:.11e}", l * 1e3)).collect::<Vec<_>>().join(" "),
        );
        if let Some(d) = design {
            table.meta(&format!("gate{i}_te_odd_through_power"), format!("{:.11e}", d.te_odd_through_power));
        }
    }
    for r in &rep.truth.rows {
        table.push(vec![
            r.input.as_str().into(),
            r.expected.as_str().into(),
            r.magnitude.into(),
            r.phase_deviation.into(),
            r.ok.into(),
        ]);
    }
    let passed = rep.passed();
    let mut summary = format!(
        "cnot-verify: is_cnot {}, fidelity {:.9}, concurrence {:.9}, TE control unchanged {}",
        rep.truth.is_cnot, rep.truth.fidelity, rep.concurrence, rep.te_control_unchanged
    );
    if !passed {
        let bad = rep.truth.mismatches().join(", ");
        summary.push_str(&format!("; mismatched rows: [{bad}]"));
        for (i, (g, _)) in eval.gates.iter().enumerate() {
            summary.push_str(&format!("; gate {i} phase-plan residual {:.3e} rad", g.plan.residual()));
        }
    }
    Ok(Outcome { name: "cnot-verify", table, passed, summary })
}
