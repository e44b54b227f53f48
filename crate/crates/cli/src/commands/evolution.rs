use lnmodal::coupling::{amplitude_evolution, reduce_to_blocks, BlockReduction, CouplerParams};
use lnmodal::devices::tmw::TMW_MODES;
use lnmodal::devices::{optimize_tmw_coupler, ModeAnalyzer, ModeAnalyzerSpec, OptimizeOptions, TmwCoupler};
use lnmodal::units::MM;
use lnmodal::Polarization;
use num_complex::Complex64;

use crate::config::{Context, EvolutionConfig, EvolutionDevice};
use crate::{Cell, CliError, CliResult, Outcome, Table};

/// Split "TM-odd" into polarization and mode part.
fn split_label(label: &str) -> CliResult<(Polarization, &str)> {
    let (p, m) = label
        .split_once('-')
        .ok_or_else(|| CliError::Config(format!("input '{label}' should look like TM-even")))?;
    let pol = p.parse::<Polarization>().map_err(|e| CliError::Config(e.to_string()))?;
    Ok((pol, m))
}

fn bad_input(label: &str, allowed: &str) -> CliError {
    CliError::Config(format!("unknown input '{label}' (expected {allowed})"))
}

/// |amplitude| of every mode at each z for a unit launch into `launch`.
fn evolve(red: &BlockReduction, launch: usize, z: &[f64]) -> CliResult<Vec<Vec<f64>>> {
    let n = red.betas.len();
    let mut out = vec![vec![0.0; n]; z.len()];
    match red.blocks.iter().find(|b| b.a == launch || b.b == launch) {
        Some(b) => {
            let one = Complex64::new(1.0, 0.0);
            let zero = Complex64::new(0.0, 0.0);
            let input = if b.a == launch { [one, zero] } else { [zero, one] };
            for (row, a) in out.iter_mut().zip(amplitude_evolution(&b.params, input, z)?) {
                row[b.a] = a[0].norm();
                row[b.b] = a[1].norm();
            }
        }
        None => out.iter_mut().for_each(|r| r[launch] = 1.0),
    }
    Ok(out)
}

fn z_grid(length: f64, points: usize) -> Vec<f64> {
    if points < 2 || length == 0.0 {
        return vec![0.0];
    }
    (0..points).map(|i| length * i as f64 / (points - 1) as f64).collect()
}

pub fn run(ctx: &Context, e: &EvolutionConfig) -> CliResult<Outcome> {
    let (labels, red, launch, mut meta): (Vec<String>, Option<BlockReduction>, usize, Vec<(String, String)>) =
        match e.device {
            EvolutionDevice::Tmw => {
                let (pol, m) = split_label(&e.input)?;
                let launch = match m {
                    "even" => 0,
                    "odd" => 3,
                    _ => TMW_MODES.iter().position(|x| *x == m).ok_or_else(|| bad_input(&e.input, "TM-even, TM-odd, TE-e1, ..."))?,
                };
                let spec = if e.optimize {
                    optimize_tmw_coupler(&ctx.solver, &e.coupler, ctx.lambda, &OptimizeOptions::default())?.spec
                } else {
                    e.coupler.clone()
                };
                let c = TmwCoupler::build(&ctx.solver, &spec, ctx.lambda, pol)?;
                let meta = vec![
                    ("volts".into(), format!("{:.11e}", spec.volts)),
                    ("electrode_length_mm".into(), format!("{:.11e}", spec.electrode_length_mm)),
                    ("pol".into(), pol.to_string()),
                ];
                (TMW_MODES.iter().map(|s| s.to_string()).collect(), Some(c.reduction), launch, meta)
            }
            EvolutionDevice::Analyzer => {
                let (pol, m) = split_label(&e.input)?;
                let launch = ["even", "odd", "smw"]
                    .iter()
                    .position(|x| *x == m)
                    .ok_or_else(|| bad_input(&e.input, "TM-even, TM-odd, TE-smw, ..."))?;
                let spec = e.analyzer.clone().unwrap_or_else(|| ModeAnalyzerSpec::new(Polarization::TM));
                let an = ModeAnalyzer::design(&ctx.solver, &spec, ctx.lambda)?;
                let md = an.modes(pol);
                let betas = [md.beta_even, md.beta_odd, md.beta_smw];
                let red = reduce_to_blocks(&betas, &[(1, 2, md.kappa_odd), (0, 2, md.kappa_even)], an.length)?;
                let meta = vec![
                    ("design_pol".into(), spec.pol.to_string()),
                    ("pol".into(), pol.to_string()),
                    ("smw_width_um".into(), format!("{:.11e}", an.smw_width / 1e-6)),
                ];
                (vec!["tmw_even".into(), "tmw_odd".into(), "smw".into()], Some(red), launch, meta)
            }
            EvolutionDevice::Custom => {
                let launch = match e.input.as_str() {
                    "1" => 0,
                    "2" => 1,
                    _ => return Err(bad_input(&e.input, "1 or 2")),
                };
                let red = if e.length_mm == 0.0 {
                    None
                } else {
                    let p = CouplerParams::new(e.kappa, e.delta_beta, e.length_mm * MM)?;
                    // one block regardless of mismatch: the user asked for this pair
                    Some(BlockReduction {
                        blocks: vec![lnmodal::coupling::CouplerBlock {
                            a: 0,
                            b: 1,
                            params: p,
                            kind: lnmodal::coupling::BlockKind::Partial,
                            beta_a: 0.5 * e.delta_beta,
                            beta_b: -0.5 * e.delta_beta,
                        }],
                        passthrough: vec![],
                        betas: vec![0.5 * e.delta_beta, -0.5 * e.delta_beta],
                        length: p.length,
                    })
                };
                let meta = vec![
                    ("kappa_per_m".into(), format!("{:.11e}", e.kappa)),
                    ("delta_beta_per_m".into(), format!("{:.11e}", e.delta_beta)),
                ];
                (vec!["1".into(), "2".into()], red, launch, meta)
            }
        };

    let (length, amps) = match &red {
        Some(r) => {
            let z = z_grid(r.length, e.points);
            (r.length, z.iter().copied().zip(evolve(r, launch, &z)?).collect::<Vec<_>>())
        }
        // zero length: the input comes straight back
        None => {
            let mut a = vec![0.0; labels.len()];
            a[launch] = 1.0;
            (0.0, vec![(0.0, a)])
        }
    };
    if let Some(r) = &red {
        for b in &r.blocks {
            meta.push((
                format!("block_{}_{}", labels[b.a], labels[b.b]),
                format!("kappa {:.11e} /m, delta_beta {:.11e} /m, {:?}", b.params.kappa, b.params.delta_beta, b.kind),
            ));
        }
    }

    let mut cols: Vec<String> = vec!["z_mm".into()];
    cols.extend(labels.iter().map(|l| format!("amp_{l}")));
    cols.push("power".into());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut table = Table::new("coupler-evolution", &ctx.hash(&[]), "z_mm [mm]; amp = |a| normalized [1]; power = sum |a|^2 [1]", &col_refs);
    table.meta("device", format!("{:?}", e.device).to_lowercase()).meta("input", &e.input).meta("length_mm", format!("{:.11e}", length / MM));
    for (k, v) in meta {
        table.meta(&k, v);
    }
    let last = amps.last().map(|(_, a)| a.clone()).unwrap_or_default();
    for (z, a) in amps {
        let mut row: Vec<Cell> = vec![(z / MM).into()];
        let p: f64 = a.iter().map(|x| x * x).sum();
        row.extend(a.into_iter().map(Cell::from));
        row.push(p.into());
        table.push(row);
    }
    let out: Vec<String> = labels.iter().zip(&last).map(|(l, a)| format!("{l} {:.4}", a * a)).collect();
    let summary = format!("coupler-evolution: {} -> output power {}", e.input, out.join(", "));
    Ok(Outcome { name: "coupler-evolution", table, passed: true, summary })
}
