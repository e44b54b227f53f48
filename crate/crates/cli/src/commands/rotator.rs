use std::f64::consts::PI;

use lnmodal::devices::{rotation, ModeRotator};
use lnmodal::linalg::phase_aligned_residual;
use rayon::prelude::*;

use crate::config::{Context, RotatorConfig};
use crate::{CliError, CliResult, Outcome, Table};

/// Round-trip tolerance on the realized rotation.
pub const RESIDUAL_TOL: f64 = 1e-9;

pub fn theta_grid(points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![0.0],
        n => (0..n).map(|i| PI * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn run(ctx: &Context, r: &RotatorConfig) -> CliResult<Outcome> {
    if r.points == 0 {
        return Err(CliError::Config("rotator.points must be >= 1".into()));
    }
    let rot = ModeRotator::from_solver(&ctx.solver, &r.spec, ctx.lambda)?;
    let thetas = theta_grid(r.points);
    let rows = thetas
        .par_iter()
        .map(|&t| {
            let v = rot.voltages(t)?;
            let u = rot.unitary(&v)?;
            let res = phase_aligned_residual(&u, &rotation(t)).0;
            Ok((t, v, rot.rotation_angle(v.v1)?, res))
        })
        .collect::<lnmodal::Result<Vec<_>>>()?;

    let mut table = Table::new(
        "rotator-curve",
        &ctx.hash(&[]),
        "theta [rad]; v1, v2, v3 [V]; theta_check [rad]; residual [1]",
        &["theta_rad", "v1", "v2", "v3", "theta_check_rad", "residual"],
    );
    table
        .meta("index", format!("{:.11e}", rot.index))
        .meta("coupler_length_mm", r.spec.coupler_length_mm)
        .meta("coupler_gap_um", r.spec.coupler_gap_um)
        .meta("pol", r.spec.pol);
    let mut worst = 0.0f64;
    let mut monotone = true;
    for (i, (t, v, check, res)) in rows.iter().enumerate() {
        worst = worst.max(*res);
        if i > 0 && v.v1 >= rows[i - 1].1.v1 {
            monotone = false;
        }
        table.push(vec![(*t).into(), v.v1.into(), v.v2.into(), v.v3.into(), (*check).into(), (*res).into()]);
    }
    let passed = worst < RESIDUAL_TOL && monotone;
    let summary = format!(
        "rotator-curve: {} points, V1(0) = {:.4} V, max residual {worst:.2e}, V1 decreasing: {monotone}",
        rows.len(),
        rows[0].1.v1
    );
    Ok(Outcome { name: "rotator-curve", table, passed, summary })
}
