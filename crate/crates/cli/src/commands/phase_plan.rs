use lnmodal::devices::{design_cnot, phase_equalize, ModeAnalyzerSpec, OptimizeOptions, TwoModeCouplerSpec};
use lnmodal::units::{wrap_phase, MM};
use lnmodal::Polarization;

use crate::config::{Context, PlanSource};
use crate::{Cell, CliError, CliResult, Outcome, Table};

pub fn run(ctx: &Context) -> CliResult<Outcome> {
    let cfg = &ctx.cfg.phase_plan;
    let inputs = match cfg.source {
        PlanSource::Inputs => {
            cfg.inputs.clone().ok_or_else(|| CliError::Config("phase-plan needs [phase_plan.inputs]".into()))?
        }
        PlanSource::Solver => {
            design_cnot(
                &ctx.solver,
                ctx.lambda,
                &ModeAnalyzerSpec::new(Polarization::TM),
                &ModeAnalyzerSpec::new(Polarization::TE),
                &TwoModeCouplerSpec::default(),
                &OptimizeOptions::default(),
                [1, 1, 1],
                cfg.min_lengths_mm.map(|l| l * MM),
            )?
            .inputs
        }
    };
    let plan = phase_equalize(&inputs)?;
    let p = plan.phases();

    let mut table =
        Table::new("phase-plan", &ctx.hash(&[]), "length [m]; phase [rad]", &["quantity", "value", "deviation_rad"]);
    table.meta("q", format!("{:?}", inputs.q)).meta("l_d_m", format!("{:.11e}", inputs.l_d)).meta("phi_a_rad", format!("{:.11e}", inputs.phi_a));
    for (name, l) in ["l1_m", "l2_m", "l3_m"].iter().zip(plan.lengths) {
        table.push(vec![(*name).into(), l.into(), Cell::Empty]);
    }
    table.push(vec!["total_m".into(), plan.total_length().into(), Cell::Empty]);
    for (name, phi) in ["phi_e_tm", "phi_o_tm", "phi_e_te", "phi_o_te"].iter().zip(p.as_array()) {
        table.push(vec![(*name).into(), phi.into(), wrap_phase(phi - p.e_tm).into()]);
    }
    let residual = plan.residual();
    table.meta("residual_rad", format!("{residual:.11e}"));
    let l = plan.lengths.map(|x| x / MM);
    let summary = format!(
        "phase-plan: l1 {:.6} mm, l2 {:.6} mm, l3 {:.6} mm, residual {residual:.2e} rad",
        l[0], l[1], l[2]
    );
    Ok(Outcome { name: "phase-plan", table, passed: residual < 1e-9, summary })
}
