use lnmodal::modesolver::{WaveguideGeometry, PHASEMATCH_TOL};
use lnmodal::units::UM;
use rayon::prelude::*;

use crate::config::{Context, DispersionConfig};
use crate::{Cell, CliError, CliResult, Outcome, Table};

const COLUMNS: [&str; 9] =
    ["w_um", "neff_m0", "neff_m1", "beta_m0", "beta_m1", "beta_norm_m0", "beta_norm_m1", "mark", "status"];

/// Inclusive grid; empty when `to < from`.
pub fn widths(from: f64, to: f64, step: f64) -> CliResult<Vec<f64>> {
    if !(step > 0.0) || !from.is_finite() || !to.is_finite() {
        return Err(CliError::Config(format!("bad width range {from}..{to} step {step}")));
    }
    if to < from {
        return Ok(Vec::new());
    }
    let n = ((to - from) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| from + step * i as f64).collect())
}

pub fn run(ctx: &Context, d: &DispersionConfig) -> CliResult<Outcome> {
    let grid = widths(d.from_um, d.to_um, d.step_um)?;
    let lambda = ctx.lambda;
    let solver = &ctx.solver;
    let n_sub = solver.material().bulk_index(lambda, d.pol)?;

    let mut rows: Vec<Vec<Cell>> = grid
        .par_iter()
        .map(|&w| match solver.solve(&WaveguideGeometry::from_um(w), lambda, d.pol) {
            Ok(sol) => {
                let n = |m: usize| sol.modes.get(m).map(|x| x.n_eff);
                vec![
                    w.into(),
                    n(0).into(),
                    n(1).into(),
                    n(0).map(|x| lambda.beta(x)).into(),
                    n(1).map(|x| lambda.beta(x)).into(),
                    n(0).map(|x| x / n_sub).into(),
                    n(1).map(|x| x / n_sub).into(),
                    Cell::Empty,
                    format!("{} guided", sol.modes.len()).into(),
                ]
            }
            Err(e) => {
                let mut r = vec![Cell::Empty; COLUMNS.len()];
                r[0] = w.into();
                r[8] = e.to_string().into();
                r
            }
        })
        .collect();

    let mut table = Table::new(
        "dispersion",
        &ctx.hash(&[]),
        "w_um [µm]; neff [1]; beta [rad/m]; beta_norm = beta/beta_substrate = neff/n_substrate [1]",
        &COLUMNS,
    );
    table.meta("wavelength_um", lambda.um()).meta("pol", d.pol).meta("n_substrate", format!("{n_sub:.11e}"));

    let mut summary = format!("dispersion: {} widths, {}", grid.len(), d.pol);
    if let (Some(src), false) = (d.match_from_um, grid.is_empty()) {
        let mark = |rows: &mut Vec<Vec<Cell>>, w: f64, label: &str| {
            if let Some(i) = nearest(&grid, w) {
                rows[i][7] = label.into();
            }
        };
        let found = solver
            .effective_index(&WaveguideGeometry::from_um(src), lambda, d.pol, 1)
            .and_then(|odd| {
                let bracket = (d.from_um.min(src) * UM, src * UM);
                solver.find_phasematch_width(odd.beta(), lambda, d.pol, 0, bracket, PHASEMATCH_TOL)
            });
        match found {
            Ok(w2) => {
                let w2 = w2 / UM;
                table.meta("phase_match", format!("odd mode of w = {src} µm matches even mode at w = {w2:.6} µm"));
                mark(&mut rows, src, "odd_source");
                mark(&mut rows, w2, "even_match");
                summary.push_str(&format!(", phase match {src} -> {w2:.4} µm"));
            }
            Err(e) => {
                table.meta("phase_match", format!("none ({e})"));
            }
        }
    }
    for r in rows {
        table.push(r);
    }
    Ok(Outcome { name: "dispersion", table, passed: true, summary })
}

fn nearest(grid: &[f64], w: f64) -> Option<usize> {
    grid.iter().enumerate().min_by(|a, b| (a.1 - w).abs().total_cmp(&(b.1 - w).abs())).map(|(i, _)| i)
}
