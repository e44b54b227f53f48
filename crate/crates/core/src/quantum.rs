//! Modal qubits and joint polarization⊗mode states.
//!
//! Basis order everywhere: (e,TM), (o,TM), (e,TE), (o,TE). Polarization is
//! the control qubit (|1⟩ ≡ TM), mode parity the target.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{cis, unitarity_residual, C2, C4};
use crate::units::wrap_phase;
use crate::{Error, Result};

pub const JOINT_BASIS: [&str; 4] = ["e,TM", "o,TM", "e,TE", "o,TE"];
pub const MODAL_BASIS: [&str; 2] = ["e", "o"];

pub const NORM_TOL: f64 = 1e-12;
pub const UNITARY_TOL: f64 = 1e-10;
/// Per-state phase deviation accepted by [`truth_table`].
pub const TRUTH_TOL: f64 = 1e-6;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

fn check_norm(v: &[Complex64]) -> Result<()> {
    let n = norm2(v);
    if (n - 1.0).abs() > NORM_TOL {
        return Err(Error::domain(format!("state norm² is {n}, expected 1")));
    }
    Ok(())
}

fn normalize<const N: usize>(mut v: [Complex64; N]) -> Result<[Complex64; N]> {
    let n = norm2(&v).sqrt();
    if !(n > 0.0) || !n.is_finite() {
        return Err(Error::domain("cannot normalize a zero state"));
    }
    v.iter_mut().for_each(|z| *z /= n);
    Ok(v)
}

/// Rotate so the first nonzero amplitude is real and nonnegative.
pub fn canonical_phase(v: &[Complex64]) -> Vec<Complex64> {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    match v.iter().find(|z| z.norm() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        Some(first) => {
            let r = cis(-first.arg());
            v.iter().map(|z| z * r).collect()
        }
        None => v.to_vec(),
    }
}

/// Largest amplitude difference after putting both states in canonical phase.
pub fn distance_up_to_phase(a: &[Complex64], b: &[Complex64]) -> f64 {
    let (a, b) = (canonical_phase(a), canonical_phase(b));
    a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// α₁|e⟩ + α₂|o⟩.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModalQubit {
    amps: [Complex64; 2],
}

impl ModalQubit {
    pub fn new(even: Complex64, odd: Complex64) -> Result<Self> {
        let amps = [even, odd];
        check_norm(&amps)?;
        Ok(ModalQubit { amps })
    }

    pub fn normalized(even: Complex64, odd: Complex64) -> Result<Self> {
        Ok(ModalQubit { amps: normalize([even, odd])? })
    }

    pub fn even() -> Self {
        ModalQubit { amps: [ONE, ZERO] }
    }

    pub fn odd() -> Self {
        ModalQubit { amps: [ZERO, ONE] }
    }

    pub fn amplitudes(&self) -> [Complex64; 2] {
        self.amps
    }

    pub fn apply(&self, u: &C2) -> Result<Self> {
        let r = unitarity_residual(u);
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        let out = u * nalgebra::Vector2::new(self.amps[0], self.amps[1]);
        Ok(ModalQubit { amps: [out[0], out[1]] })
    }
}

/// Σ αᵢ|i⟩ over [`JOINT_BASIS`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JointState {
    amps: [Complex64; 4],
}

impl JointState {
    pub fn new(amps: [Complex64; 4]) -> Result<Self> {
        check_norm(&amps)?;
        Ok(JointState { amps })
    }

    pub fn normalized(amps: [Complex64; 4]) -> Result<Self> {
        Ok(JointState { amps: normalize(amps)? })
    }

    pub fn basis(i: usize) -> Self {
        let mut amps = [ZERO; 4];
        amps[i] = ONE;
        JointState { amps }
    }

    /// (a_TM|TM⟩ + a_TE|TE⟩) ⊗ mode.
    pub fn product(tm: Complex64, te: Complex64, mode: &ModalQubit) -> Result<Self> {
        let [e, o] = mode.amps;
        Self::new([tm * e, tm * o, te * e, te * o])
    }

    pub fn amplitudes(&self) -> [Complex64; 4] {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        norm2(&self.amps)
    }

    pub fn apply(&self, u: &C4) -> Result<Self> {
        let r = unitarity_residual(u);
        if r > UNITARY_TOL {
            return Err(Error::NotUnitary(r));
        }
        let v = nalgebra::Vector4::from_column_slice(&self.amps);
        let out = u * v;
        Ok(JointState { amps: [out[0], out[1], out[2], out[3]] })
    }
}

/// Apply a dynamically sized operator, checking dimension and unitarity.
pub fn apply(u: &DMatrix<Complex64>, psi: &[Complex64]) -> Result<Vec<Complex64>> {
    if u.nrows() != u.ncols() || u.ncols() != psi.len() {
        return Err(Error::Dimension { op: u.ncols(), state: psi.len() });
    }
    let p = u.adjoint() * u;
    let r = (p - DMatrix::identity(u.nrows(), u.ncols())).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r > UNITARY_TOL {
        return Err(Error::NotUnitary(r));
    }
    let out = u * nalgebra::DVector::from_column_slice(psi);
    Ok(out.iter().copied().collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoincareCoords {
    /// 0 at |e⟩, π at |o⟩.
    pub polar: f64,
    /// arg(α₂/α₁).
    pub azimuth: f64,
}

pub fn poincare(q: &ModalQubit) -> PoincareCoords {
    let [a, b] = q.amps;
    let polar = 2.0 * b.norm().atan2(a.norm());
    let azimuth = if a.norm() > 0.0 && b.norm() > 0.0 { wrap_phase(b.arg() - a.arg()) } else { 0.0 };
    PoincareCoords { polar, azimuth }
}

impl PoincareCoords {
    /// cos(θ/2)|e⟩ + e^{jφ} sin(θ/2)|o⟩.
    pub fn state(&self) -> ModalQubit {
        let (s, c) = (0.5 * self.polar).sin_cos();
        ModalQubit { amps: [Complex64::new(c, 0.0), s * cis(self.azimuth)] }
    }
}

/// Two-qubit pure-state concurrence 2|α₁α₄ − α₂α₃|.
pub fn concurrence(psi: &JointState) -> f64 {
    let [a1, a2, a3, a4] = psi.amps;
    (2.0 * (a1 * a4 - a2 * a3).norm()).min(1.0)
}

/// Flips the mode iff the polarization is TM.
pub fn cnot() -> C4 {
    let mut u = C4::zeros();
    u[(1, 0)] = ONE;
    u[(0, 1)] = ONE;
    u[(2, 2)] = ONE;
    u[(3, 3)] = ONE;
    u
}

/// Embed a mode-space operator for both polarizations.
pub fn on_mode(m: &C2) -> C4 {
    let mut u = C4::zeros();
    for p in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                u[(2 * p + i, 2 * p + j)] = m[(i, j)];
            }
        }
    }
    u
}

/// Embed a polarization operator (rows TM, TE) acting on both modes.
pub fn on_polarization(p: &C2) -> C4 {
    let mut u = C4::zeros();
    for a in 0..2 {
        for b in 0..2 {
            for m in 0..2 {
                u[(2 * a + m, 2 * b + m)] = p[(a, b)];
            }
        }
    }
    u
}

/// |tr(U†·CNOT)|/4.
pub fn cnot_fidelity(u: &C4) -> f64 {
    (u.adjoint() * cnot()).trace().norm() / 4.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthRow {
    pub input: String,
    pub expected: String,
    /// |⟨expected|U|input⟩|.
    pub magnitude: f64,
    /// Phase relative to the global phase, wrapped to (−π, π].
    pub phase_deviation: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TruthTable {
    pub is_cnot: bool,
    pub fidelity: f64,
    pub global_phase: f64,
    pub rows: Vec<TruthRow>,
}

impl TruthTable {
    pub fn mismatches(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.ok).map(|r| r.input.as_str()).collect()
    }
}

/// Compare each basis column of `u` with the CNOT target.
pub fn truth_table(u: &C4) -> TruthTable {
    const TARGET: [usize; 4] = [1, 0, 2, 3];
    // reference phase from the first column with a usable target entry
    let global_phase = (0..4)
        .map(|i| u[(TARGET[i], i)])
        .find(|z| z.norm() > 0.5)
        .map_or(0.0, |z| z.arg());
    let rows: Vec<TruthRow> = (0..4)
        .map(|i| {
            let z = u[(TARGET[i], i)];
            let magnitude = z.norm();
            let phase_deviation = if magnitude > 0.0 { wrap_phase(z.arg() - global_phase) } else { PI };
            let ok = (1.0 - magnitude) < TRUTH_TOL && phase_deviation.abs() < TRUTH_TOL;
            TruthRow {
                input: JOINT_BASIS[i].to_string(),
                expected: JOINT_BASIS[TARGET[i]].to_string(),
                magnitude,
                phase_deviation,
                ok,
            }
        })
        .collect();
    TruthTable { is_cnot: rows.iter().all(|r| r.ok), fidelity: cnot_fidelity(u), global_phase, rows }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unnormalized_state_rejected() {
        assert!(ModalQubit::new(ONE, ONE).is_err());
    }

    #[test]
    fn dynamic_apply_checks_dimension() {
        let u = DMatrix::<Complex64>::identity(3, 3);
        assert!(matches!(apply(&u, &[ONE, ZERO]), Err(Error::Dimension { op: 3, state: 2 })));
    }

    #[test]
    fn non_unitary_rejected() {
        let u = C2::new(ONE, ONE, ZERO, ONE);
        assert!(matches!(ModalQubit::even().apply(&u), Err(Error::NotUnitary(_))));
    }

    #[test]
    fn canonical_phase_first_nonzero() {
        let v = canonical_phase(&[ZERO, Complex64::new(0.0, -2.0), ONE]);
        assert!((v[1] - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!((v[2] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }
}
