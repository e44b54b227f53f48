use std::f64::consts::PI;
use std::sync::OnceLock;

use lnmodal::material::Material;
use lnmodal::modesolver::{
    find_crossing_voltage, CouplerPair, FieldOrientation, ModeSolver, PairRow, PairSweep, ProfileGrid, SolverGrid,
    WaveguideGeometry, CROSSING_TOL, PHASEMATCH_TOL,
};
use lnmodal::units::UM;
use lnmodal::{Error, Polarization, Wavelength};

const TM: Polarization = Polarization::TM;
const TE: Polarization = Polarization::TE;

fn solver() -> &'static ModeSolver {
    static S: OnceLock<ModeSolver> = OnceLock::new();
    S.get_or_init(|| ModeSolver::new(Material::lithium_niobate()))
}

fn lambda() -> Wavelength {
    Wavelength::from_um(0.812)
}

fn volts_grid() -> Vec<f64> {
    (0..=20).map(|i| -100.0 + 10.0 * i as f64).collect()
}

#[test]
fn profile_peak_is_bulk_plus_delta_n() {
    let s = solver();
    let m = s.material();
    for pol in [TM, TE] {
        let g = WaveguideGeometry::from_um(5.6);
        let p = s.build_profile(&g, lambda(), pol, &ProfileGrid::default()).unwrap();
        let expect = m.bulk_index(lambda(), pol).unwrap() + m.delta_n(5.6 * UM, lambda(), pol).unwrap();
        assert!((p.max() - expect).abs() < 1e-12);
        // far corner is bulk
        let bulk = m.bulk_index(lambda(), pol).unwrap();
        assert!((p.at(0, p.y.len() - 1) - bulk).abs() < 1e-9);
    }
}

#[test]
fn profile_peak_stable_under_refinement() {
    let s = solver();
    let g = WaveguideGeometry::from_um(4.0);
    let coarse = s.build_profile(&g, lambda(), TM, &ProfileGrid::default()).unwrap();
    let fine = ProfileGrid { step_um: 0.05, ..ProfileGrid::default() };
    let fine = s.build_profile(&g, lambda(), TM, &fine).unwrap();
    assert!((coarse.max() - fine.max()).abs() < 1e-6);
}

#[test]
fn profile_eo_shifts_channel_only() {
    let s = solver();
    let gap = 4.0 * UM;
    let g0 = WaveguideGeometry::from_um(5.6);
    let gv = g0.with_electrode(gap, FieldOrientation::Down, 36.0);
    let grid = ProfileGrid::default();
    let p0 = s.build_profile(&g0, lambda(), TM, &grid).unwrap();
    let pv = s.build_profile(&gv, lambda(), TM, &grid).unwrap();
    // Down with positive volts raises the index
    let eo = s.material().eo_shift(lambda(), TM, -36.0, gap).unwrap();
    assert!(eo > 0.0);
    let centre = p0.x.len() / 2;
    for iy in [0, 10, 50] {
        assert!((pv.at(centre, iy) - p0.at(centre, iy) - eo).abs() < 1e-12);
        assert_eq!(pv.at(0, iy), p0.at(0, iy));
    }
}

#[test]
fn coarse_profile_grid_rejected() {
    let s = solver();
    let grid = ProfileGrid { step_um: 1.0, ..ProfileGrid::default() };
    let e = s.build_profile(&WaveguideGeometry::from_um(4.0), lambda(), TM, &grid).unwrap_err();
    assert!(matches!(e, Error::Config(_)));
    let bad = SolverGrid { lateral_step_um: 0.5, ..SolverGrid::default() };
    assert!(matches!(ModeSolver::with_grid(Material::lithium_niobate(), bad), Err(Error::Config(_))));
}

#[test]
fn smw_is_single_mode() {
    let s = solver();
    for pol in [TM, TE] {
        assert_eq!(s.guided_count(&WaveguideGeometry::from_um(2.2), lambda(), pol).unwrap(), 1);
    }
    let e = s.effective_index(&WaveguideGeometry::from_um(2.2), lambda(), TM, 1).unwrap_err();
    assert!(matches!(e, Error::NotGuided { order: 1, .. }));
}

#[test]
fn tmw_is_two_mode_and_ordered() {
    let s = solver();
    let g = WaveguideGeometry::from_um(5.6);
    for pol in [TM, TE] {
        assert_eq!(s.guided_count(&g, lambda(), pol).unwrap(), 2);
        let e = s.effective_index(&g, lambda(), pol, 0).unwrap();
        let o = s.effective_index(&g, lambda(), pol, 1).unwrap();
        assert!(e.n_eff() > o.n_eff());
        let bulk = s.material().bulk_index(lambda(), pol).unwrap();
        let peak = bulk + s.material().delta_n(5.6 * UM, lambda(), pol).unwrap();
        assert!(o.n_eff() > bulk && e.n_eff() < peak);
    }
}

#[test]
fn beta_is_derived_exactly() {
    let m = solver().effective_index(&WaveguideGeometry::from_um(5.6), lambda(), TE, 0).unwrap();
    assert_eq!(m.beta(), 2.0 * PI * m.n_eff() / lambda().m());
    assert_eq!(m.beta(), lambda().beta(m.n_eff()));
}

#[test]
fn beta_increases_with_width() {
    let s = solver();
    for pol in [TM, TE] {
        let mut prev = [0.0f64; 2];
        for i in 0..=12 {
            let w = 4.0 + 0.2 * i as f64;
            let g = WaveguideGeometry::from_um(w);
            for m in 0..2 {
                let b = s.effective_index(&g, lambda(), pol, m).unwrap().beta();
                assert!(b > prev[m], "{pol} m={m} not increasing at {w} µm");
                prev[m] = b;
            }
        }
    }
}

#[test]
fn birefringence_everywhere() {
    let s = solver();
    for w in [2.2, 3.0, 4.0, 5.6, 6.0] {
        let g = WaveguideGeometry::from_um(w);
        let tm = s.effective_index(&g, lambda(), TM, 0).unwrap().n_eff();
        let te = s.effective_index(&g, lambda(), TE, 0).unwrap().n_eff();
        assert!(te - tm > 0.05);
    }
}

#[test]
fn n_eff_lipschitz_in_width() {
    // |dn_eff/dw| stays below 2e-3 per µm on this range
    const K: f64 = 2e-3;
    let s = solver();
    for w in [3.0, 4.0, 5.0, 5.6] {
        for pol in [TM, TE] {
            let a = s.effective_index(&WaveguideGeometry::from_um(w), lambda(), pol, 0).unwrap().n_eff();
            let b = s.effective_index(&WaveguideGeometry::from_um(w + 0.05), lambda(), pol, 0).unwrap().n_eff();
            assert!((b - a).abs() <= K * 0.05);
        }
    }
}

#[test]
fn grid_refinement_converges() {
    let fine = SolverGrid {
        depth_step_um: SolverGrid::default().depth_step_um / 2.0,
        lateral_step_um: SolverGrid::default().lateral_step_um / 2.0,
        ..SolverGrid::default()
    };
    let fine = ModeSolver::with_grid(Material::lithium_niobate(), fine).unwrap();
    let g = WaveguideGeometry::from_um(5.6);
    for pol in [TM, TE] {
        for m in 0..2 {
            let a = solver().effective_index(&g, lambda(), pol, m).unwrap().n_eff();
            let b = fine.effective_index(&g, lambda(), pol, m).unwrap().n_eff();
            assert!((a - b).abs() < 1e-6, "{pol} m={m}: {a} vs {b}");
        }
    }
}

#[test]
fn tm_analyzer_phase_match_width() {
    let s = solver();
    let odd = s.effective_index(&WaveguideGeometry::from_um(5.6), lambda(), TM, 1).unwrap();
    let w2 = s.find_phasematch_width(odd.beta(), lambda(), TM, 0, (1.0 * UM, 5.6 * UM), PHASEMATCH_TOL).unwrap();
    assert!((w2 / UM - 3.4).abs() <= 0.5, "w2 = {} µm", w2 / UM);
    let even = s.effective_index(&WaveguideGeometry::new(w2), lambda(), TM, 0).unwrap();
    assert!((even.beta() - odd.beta()).abs() < PHASEMATCH_TOL);
}

#[test]
fn te_analyzer_phase_match_width() {
    let s = solver();
    let odd = s.effective_index(&WaveguideGeometry::from_um(5.6), lambda(), TE, 1).unwrap();
    let w2 = s.find_phasematch_width(odd.beta(), lambda(), TE, 0, (1.0 * UM, 5.6 * UM), PHASEMATCH_TOL).unwrap();
    assert!((w2 / UM - 3.0).abs() <= 0.5, "w2 = {} µm", w2 / UM);
}

#[test]
fn unreachable_target_has_no_phase_match() {
    let s = solver();
    let even = s.effective_index(&WaveguideGeometry::from_um(5.6), lambda(), TM, 0).unwrap();
    let e = s.find_phasematch_width(even.beta() + 1e4, lambda(), TM, 0, (1.0 * UM, 5.6 * UM), PHASEMATCH_TOL);
    assert!(matches!(e, Err(Error::NoPhaseMatch { .. })));
}

#[test]
fn pair_symmetric_at_zero_volts() {
    let s = solver();
    let pair = CouplerPair::push_pull(5.6 * UM, 4.0 * UM);
    let row = s.pair_row(&pair, lambda(), TM, 0.0).unwrap();
    assert_eq!(row.even_wg1, row.even_wg2);
    assert_eq!(row.odd_wg1, row.odd_wg2);
}

#[test]
fn pair_curves_move_oppositely() {
    let s = solver();
    let pair = CouplerPair::push_pull(5.6 * UM, 4.0 * UM);
    let volts: Vec<f64> = (0..=4).map(|i| 10.0 * i as f64).collect();
    let sweep = s.voltage_sweep_pair(&pair, lambda(), TM, &volts).unwrap();
    assert!(!sweep.truncated);
    for w in sweep.rows.windows(2) {
        assert!(w[1].even_wg1 < w[0].even_wg1 && w[1].odd_wg1 < w[0].odd_wg1);
        assert!(w[1].even_wg2 > w[0].even_wg2 && w[1].odd_wg2 > w[0].odd_wg2);
    }
}

#[test]
fn crossing_exists_for_4um_pair() {
    let s = solver();
    let pair = CouplerPair::push_pull(4.0 * UM, 4.0 * UM);
    let v = s.crossing_voltage(&pair, lambda(), TM, &volts_grid(), CROSSING_TOL).unwrap();
    assert!(v.is_finite() && v > 0.0);
    assert!(s.pair_mismatch(&pair, lambda(), TM, v).unwrap().abs() < CROSSING_TOL);
}

#[test]
fn crossing_for_5p6um_pair_in_range_and_antisymmetric() {
    let s = solver();
    let pair = CouplerPair::push_pull(5.6 * UM, 4.0 * UM);
    let v = s.crossing_voltage(&pair, lambda(), TM, &volts_grid(), CROSSING_TOL).unwrap();
    assert!(v > 0.0 && v <= 100.0, "V* = {v}");
    let vf = s.crossing_voltage(&pair.flipped(), lambda(), TM, &volts_grid(), CROSSING_TOL).unwrap();
    assert!((v + vf).abs() < 1e-6 * v.abs(), "{v} vs {vf}");
}

#[test]
fn synthetic_linear_crossing() {
    let v0 = 17.345678;
    let slope = -3.2;
    let f = |v: f64| slope * (v - v0);
    let rows = (0..=10)
        .map(|i| {
            let v = 5.0 * i as f64;
            PairRow { volts: v, even_wg1: Some(f(v)), odd_wg1: None, even_wg2: None, odd_wg2: Some(0.0) }
        })
        .collect();
    let sweep = PairSweep { rows, truncated: true };
    let v = find_crossing_voltage(&sweep, |v| Ok(f(v)), 1e-9).unwrap();
    assert!(((v - v0) / v0).abs() < 1e-9);

    let flat = PairSweep { rows: vec![], truncated: false };
    assert!(matches!(find_crossing_voltage(&flat, |v| Ok(f(v)), 1e-9), Err(Error::NoCrossing { .. })));
}
