//! Seeded property checks of the analytic layers. Draws are generated
//! sequentially from one ChaCha8 stream; evaluation runs in parallel but
//! only feeds max-reductions, so the artifact depends on the seed alone.

use std::f64::consts::PI;

use lnmodal::coupling::{cascade_decomposition, polar_form, transfer_matrix, CouplerParams};
use lnmodal::devices::{rotation, sigma_z, CnotGate, ModeRotator, PhasePlanInputs, SigmaZCascade};
use lnmodal::linalg::{max_abs_diff, phase_aligned_residual, J};
use lnmodal::quantum::{concurrence, distance_up_to_phase, truth_table, JointState, ModalQubit};
use lnmodal::units::MM;
use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::Context;
use crate::{Cell, CliResult, Outcome, Table};

struct Check {
    name: &'static str,
    value: f64,
    tol: f64,
    pass: bool,
}

impl Check {
    /// Passes when `value` < `tol`.
    fn below(name: &'static str, value: f64, tol: f64) -> Self {
        Check { name, value, tol, pass: value < tol }
    }
}

fn max(it: impl ParallelIterator<Item = f64>) -> f64 {
    it.reduce(|| 0.0, f64::max)
}

fn random_params(rng: &mut ChaCha8Rng) -> lnmodal::Result<CouplerParams> {
    CouplerParams::new(rng.gen_range(0.0..3000.0), rng.gen_range(-8000.0..8000.0), rng.gen_range(1e-5..1e-2))
}

pub fn random_plan(rng: &mut ChaCha8Rng) -> PhasePlanInputs {
    let mut b = || 2.0 * PI * rng.gen_range(2.13..2.27) / 0.812e-6;
    PhasePlanInputs {
        beta_e_tm: b(),
        beta_o_tm: b(),
        beta_e_te: b(),
        beta_o_te: b(),
        beta_prime: b(),
        beta_dprime: b(),
        l_d: rng.gen_range(1.0..6.0) * MM,
        phi_a: rng.gen_range(-PI..PI),
        q: [1, 2 * rng.gen_range(0..3) + 1, 2 * rng.gen_range(0..3) + 1],
        min_lengths: std::array::from_fn(|_| rng.gen_range(0.5..3.0) * MM),
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> lnmodal::Result<JointState> {
    JointState::normalized(std::array::from_fn(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
}

fn coupler_checks(rng: &mut ChaCha8Rng, draws: usize, out: &mut Vec<Check>) -> lnmodal::Result<()> {
    let ps = (0..draws).map(|_| random_params(rng)).collect::<lnmodal::Result<Vec<_>>>()?;
    let unit = max(ps.par_iter().map(|p| transfer_matrix(p).unitarity_residual()));
    let polar = max(ps.par_iter().map(|p| max_abs_diff(&polar_form(p).matrix(), &transfer_matrix(p).0)));
    let cascade = max(ps.par_iter().map(|p| max_abs_diff(&cascade_decomposition(p).matrix(), &transfer_matrix(p).0)));
    out.push(Check::below("coupler_unitarity", unit, 1e-12));
    out.push(Check::below("coupler_polar_reconstruction", polar, 1e-12));
    out.push(Check::below("coupler_cascade_reconstruction", cascade, 1e-12));
    Ok(())
}

fn special_cases(out: &mut Vec<Check>) -> lnmodal::Result<()> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let kappa = 800.0;
    let l = PI / (2.0 * kappa);
    let flip = transfer_matrix(&CouplerParams::new(kappa, 0.0, l)?).0;
    out.push(Check::below("flip_at_sync", max_abs_diff(&flip, &Matrix2::new(zero, -J, -J, zero)), 1e-12));

    // γL = pπ for a few detunings
    let mut diag = 0.0f64;
    for p in 1..=4 {
        for db in [0.0, 500.0, -1200.0] {
            let gamma = (kappa * kappa + 0.25 * db * db).sqrt();
            let t = transfer_matrix(&CouplerParams::new(kappa, db, p as f64 * PI / gamma)?);
            diag = diag.max(t.b().norm());
        }
    }
    out.push(Check::below("diagonal_at_full_turns", diag, 1e-12));

    let id = transfer_matrix(&CouplerParams::new(0.0, 3000.0, 2.0 * MM)?).0;
    out.push(Check::below("identity_at_zero_kappa", max_abs_diff(&id, &Matrix2::new(one, zero, zero, one)), 1e-12));

    let db = 3f64.sqrt() * PI / l;
    let null = transfer_matrix(&CouplerParams::new(kappa, db, l)?);
    out.push(Check::below("sqrt3pi_null", (1.0 - null.a().norm_sqr()).abs(), 1e-12));
    Ok(())
}

fn rotator_checks(ctx: &Context, out: &mut Vec<Check>) -> lnmodal::Result<()> {
    let rot = ModeRotator::from_solver(&ctx.solver, &ctx.cfg.rotator.spec, ctx.lambda)?;
    let thetas: Vec<f64> = (0..50).map(|i| PI * i as f64 / 49.0).collect();
    let vs = thetas.iter().map(|&t| rot.voltages(t)).collect::<lnmodal::Result<Vec<_>>>()?;
    let res = thetas
        .par_iter()
        .zip(&vs)
        .map(|(&t, v)| Ok(phase_aligned_residual(&rot.unitary(v)?, &rotation(t)).0))
        .collect::<lnmodal::Result<Vec<_>>>()?;
    out.push(Check::below("rotator_so2_residual", res.iter().copied().fold(0.0, f64::max), 1e-9));
    let steps = vs.windows(2).filter(|w| w[1].v1 >= w[0].v1).count();
    out.push(Check { name: "rotator_v1_non_decreasing_steps", value: steps as f64, tol: 0.0, pass: steps == 0 });
    let end = vs[vs.len() - 1];
    out.push(Check::below("rotator_v1_at_pi", end.v1.abs(), 1e-9));
    out.push(Check::below("rotator_v2_plus_v3_at_pi", (end.v2 + end.v3).abs(), 1e-9));

    let sx = rot.unitary(&end)?;
    out.push(Check::below("sigma_x_squared", phase_aligned_residual(&(sx * sx), &Matrix2::identity()).0, 1e-6));
    let b = ctx.lambda.k0();
    let sz = SigmaZCascade::ideal(b * 2.1843, b * 2.1790, 800.0, 1, 12.0 * MM, 12.0 * MM)?.unitary()?;
    out.push(Check::below("sigma_z_device", phase_aligned_residual(&sz, &sigma_z()).0, 1e-6));
    out.push(Check::below("sigma_z_squared", phase_aligned_residual(&(sz * sz), &Matrix2::identity()).0, 1e-6));
    Ok(())
}

fn cnot_checks(rng: &mut ChaCha8Rng, states: usize, out: &mut Vec<Check>) -> lnmodal::Result<()> {
    let u = CnotGate::ideal(&random_plan(rng))?.unitary();
    let t = truth_table(&u);
    out.push(Check { name: "cnot_fidelity", value: t.fidelity, tol: 1e-6, pass: t.is_cnot && t.fidelity >= 1.0 - 1e-6 });
    let psis = (0..states).map(|_| random_state(rng)).collect::<lnmodal::Result<Vec<_>>>()?;
    let perm = psis
        .par_iter()
        .map(|psi| {
            let [a1, a2, a3, a4] = psi.amplitudes();
            Ok(distance_up_to_phase(&psi.apply(&u)?.amplitudes(), &[a2, a1, a3, a4]))
        })
        .collect::<lnmodal::Result<Vec<f64>>>()?;
    out.push(Check::below("cnot_permutation", perm.iter().copied().fold(0.0, f64::max), 1e-9));
    let h = Complex64::new(0.5f64.sqrt(), 0.0);
    let c = concurrence(&JointState::product(h, h, &ModalQubit::even())?.apply(&u)?);
    out.push(Check::below("cnot_concurrence_deficit", (1.0 - c).abs(), 1e-9));
    Ok(())
}

fn plan_checks(rng: &mut ChaCha8Rng, plans: usize, out: &mut Vec<Check>) -> lnmodal::Result<()> {
    let inputs: Vec<PhasePlanInputs> = (0..plans).map(|_| random_plan(rng)).collect();
    let solved = inputs
        .par_iter()
        .map(|i| lnmodal::devices::phase_equalize(i).map(|p| (i.min_lengths, p)))
        .collect::<lnmodal::Result<Vec<_>>>()?;
    let res = solved.iter().map(|(_, p)| p.residual()).fold(0.0, f64::max);
    out.push(Check::below("phase_plan_plug_back", res, 1e-9));
    let short = solved.iter().filter(|(m, p)| p.lengths.iter().zip(m).any(|(l, m)| l < m)).count();
    out.push(Check { name: "phase_plan_below_minimum", value: short as f64, tol: 0.0, pass: short == 0 });
    Ok(())
}

pub fn run(ctx: &Context) -> CliResult<Outcome> {
    let s = &ctx.cfg.selftest;
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut checks = Vec::new();
    coupler_checks(&mut rng, s.coupler_draws, &mut checks)?;
    special_cases(&mut checks)?;
    rotator_checks(ctx, &mut checks)?;
    cnot_checks(&mut rng, s.states, &mut checks)?;
    plan_checks(&mut rng, s.plans, &mut checks)?;

    let mut table = Table::new("selftest", &ctx.hash(&[]), "value and tolerance in the unit of each check", &["check", "value", "tolerance", "pass"]);
    table
        .meta("seed", ctx.cfg.seed)
        .meta("coupler_draws", s.coupler_draws)
        .meta("states", s.states)
        .meta("plans", s.plans);
    for c in &checks {
        table.push(vec![c.name.into(), c.value.into(), Cell::Num(c.tol), c.pass.into()]);
    }
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name).collect();
    let summary = if failed.is_empty() {
        format!("selftest: {} checks passed (seed {})", checks.len(), ctx.cfg.seed)
    } else {
        format!("selftest: failed {}", failed.join(", "))
    };
    Ok(Outcome { name: "selftest", table, passed: failed.is_empty(), summary })
}
