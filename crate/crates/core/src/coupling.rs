//! Coupled-mode transfer matrices between modes of adjacent guides.
//!
//! Sign conventions: modes evolve as e^{−jβz} and couple through
//! da/dz = −jβ_a a − jκ b. The envelope matrix [`transfer_matrix`] strips the
//! common propagation phase; [`CouplerBlock::physical`] restores it.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::{cis, unitarity_residual, C2, J};
use crate::modesolver::LateralSolution;
use crate::units::UM;
use crate::{Error, Result};

/// κ and Δβ in rad/m, L in m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerParams {
    pub kappa: f64,
    pub delta_beta: f64,
    pub length: f64,
}

impl CouplerParams {
    pub fn new(kappa: f64, delta_beta: f64, length: f64) -> Result<Self> {
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::domain(format!("coupling coefficient must be >= 0, got {kappa}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(Error::domain(format!("interaction length must be > 0, got {length}")));
        }
        if !delta_beta.is_finite() {
            return Err(Error::domain("phase mismatch must be finite"));
        }
        Ok(CouplerParams { kappa, delta_beta, length })
    }

    /// γ = √(κ² + Δβ²/4).
    pub fn gamma(&self) -> f64 {
        self.kappa.hypot(0.5 * self.delta_beta)
    }

    /// Length for complete transfer at Δβ = 0, qπ/2κ.
    pub fn coupling_length(kappa: f64, q: u32) -> f64 {
        q as f64 * PI / (2.0 * kappa)
    }
}

/// (sin γL / γ, cos γL) with the γ → 0 limit handled.
fn sinc_cos(gamma: f64, length: f64) -> (f64, f64) {
    let gl = gamma * length;
    if gl.abs() < 1e-8 {
        (length * (1.0 - gl * gl / 6.0), 1.0 - 0.5 * gl * gl)
    } else {
        ((gl).sin() / gamma, gl.cos())
    }
}

/// Unitary 2×2 coupler matrix [[A, −jB], [−jB*, A*]].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix(pub C2);

impl TransferMatrix {
    pub fn a(&self) -> Complex64 {
        self.0[(0, 0)]
    }

    pub fn b(&self) -> Complex64 {
        // T₀₁ = −jB
        self.0[(0, 1)] * J
    }

    pub fn unitarity_residual(&self) -> f64 {
        unitarity_residual(&self.0)
    }

    pub fn apply(&self, input: [Complex64; 2]) -> [Complex64; 2] {
        let m = &self.0;
        [
            m[(0, 0)] * input[0] + m[(0, 1)] * input[1],
            m[(1, 0)] * input[0] + m[(1, 1)] * input[1],
        ]
    }
}

pub fn transfer_matrix(p: &CouplerParams) -> TransferMatrix {
    let gamma = p.gamma();
    let (sg, cg) = sinc_cos(gamma, p.length);
    let e = cis(0.5 * p.delta_beta * p.length);
    let a = e * Complex64::new(cg, -0.5 * p.delta_beta * sg);
    let b = e * (p.kappa * sg);
    TransferMatrix(C2::new(a, -J * b, -J * b.conj(), a.conj()))
}

/// θ ∈ [0, π] with all sign information carried by the phases.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarForm {
    pub theta: f64,
    pub phi_a: f64,
    pub phi_b: f64,
}

impl PolarForm {
    pub fn matrix(&self) -> C2 {
        let (s, c) = (0.5 * self.theta).sin_cos();
        C2::new(
            c * cis(self.phi_a),
            -J * s * cis(self.phi_b),
            -J * s * cis(-self.phi_b),
            c * cis(-self.phi_a),
        )
    }
}

pub fn polar_form(p: &CouplerParams) -> PolarForm {
    let gamma = p.gamma();
    let (sg, cg) = sinc_cos(gamma, p.length);
    let s = p.kappa * sg;
    let phi_b0 = 0.5 * p.delta_beta * p.length;
    // θ = 2 sin⁻¹|s|, taken as an atan2 against |A| so it stays accurate
    // near full transfer; a negative s is folded into φ_B
    let theta = 2.0 * s.abs().atan2(cg.hypot(0.5 * p.delta_beta * sg));
    let phi_b = if s >= 0.0 { phi_b0 } else { phi_b0 + PI };
    let phi_a = phi_b0 + (-0.5 * p.delta_beta * sg).atan2(cg);
    PolarForm { theta, phi_a, phi_b }
}

/// T = e^{−jφ_B}·T₃(Γ₂)·T₂(θ)·T₁(Γ₁).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeForm {
    pub gamma1: f64,
    pub gamma2: f64,
    pub theta: f64,
    /// −φ_B.
    pub global_phase: f64,
}

/// T₁ = diag(1, e^{−jΓ₁}).
pub fn t1(gamma1: f64) -> C2 {
    C2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), cis(-gamma1))
}

/// T₂(θ) = [[cos θ/2, −j sin θ/2], [−j sin θ/2, cos θ/2]].
pub fn t2(theta: f64) -> C2 {
    let (s, c) = (0.5 * theta).sin_cos();
    C2::new(Complex64::new(c, 0.0), -J * s, -J * s, Complex64::new(c, 0.0))
}

/// T₃ = diag(e^{−jΓ₂}, 1).
pub fn t3(gamma2: f64) -> C2 {
    C2::new(cis(-gamma2), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0))
}

impl CascadeForm {
    pub fn matrix(&self) -> C2 {
        t3(self.gamma2) * t2(self.theta) * t1(self.gamma1) * cis(self.global_phase)
    }
}

pub fn cascade_decomposition(p: &CouplerParams) -> CascadeForm {
    let pf = polar_form(p);
    CascadeForm {
        gamma1: pf.phi_a - pf.phi_b,
        gamma2: -pf.phi_a - pf.phi_b,
        theta: pf.theta,
        global_phase: -pf.phi_b,
    }
}

/// Guide amplitudes T(κ, Δβ, z)·input at each z.
pub fn amplitude_evolution(p: &CouplerParams, input: [Complex64; 2], z: &[f64]) -> Result<Vec<[Complex64; 2]>> {
    z.iter()
        .map(|&zi| {
            if !(zi >= 0.0 && zi <= p.length * (1.0 + 1e-12)) {
                return Err(Error::domain(format!("z = {zi} outside [0, {}]", p.length)));
            }
            let at = CouplerParams { length: zi, ..*p };
            Ok(transfer_matrix(&at).apply(input))
        })
        .collect()
}

/// Lateral field of one mode sampled on a uniform grid, for overlap integrals.
#[derive(Debug, Clone)]
pub struct ModeField {
    /// Node positions (m), guide centred at 0.
    pub x: Vec<f64>,
    /// Field with ∫u² dx = 1.
    pub field: Vec<f64>,
    /// Depth-reduced index N(x) of the guide.
    pub index: Vec<f64>,
    pub n_cladding: f64,
    pub n_eff: f64,
    pub k0: f64,
    /// Strip width (m).
    pub width: f64,
}

impl ModeField {
    pub fn from_solution(sol: &LateralSolution, order: usize) -> Result<Self> {
        let m = sol.modes.get(order).ok_or(Error::NotGuided { order, width_um: sol.width / UM })?;
        Ok(ModeField {
            x: sol.x.clone(),
            field: m.field.clone(),
            index: sol.column_index.clone(),
            n_cladding: sol.n_cladding,
            n_eff: m.n_eff,
            k0: sol.k0,
            width: sol.width,
        })
    }

    fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }

    /// Linear interpolation of (field, N² − n_clad²) at `x`, zero outside.
    fn sample(&self, x: f64) -> (f64, f64) {
        let h = self.step();
        let t = (x - self.x[0]) / h;
        if t < 0.0 || t > (self.x.len() - 1) as f64 {
            return (0.0, 0.0);
        }
        let i = (t.floor() as usize).min(self.x.len() - 2);
        let f = t - i as f64;
        let lerp = |v: &[f64]| v[i] * (1.0 - f) + v[i + 1] * f;
        let n = lerp(&self.index);
        (lerp(&self.field), n * n - self.n_cladding * self.n_cladding)
    }
}

/// Overlap-integral coupling between mode `a` (centred at 0) and mode `b`
/// whose strip edge sits `gap` (m) beyond the edge of `a`. Returns the
/// geometric mean √|κ_ab·κ_ba| in rad/m.
pub fn coupling_coefficient(a: &ModeField, b: &ModeField, gap: f64) -> Result<f64> {
    if !(gap >= 0.0) {
        return Err(Error::domain(format!("gap must be >= 0, got {gap} m")));
    }
    let (ha, hb) = (a.step(), b.step());
    if (ha - hb).abs() > 1e-9 * ha || (a.k0 - b.k0).abs() > 1e-12 * a.k0 {
        return Err(Error::config("mode fields use different grids or wavelengths"));
    }
    let offset = 0.5 * a.width + gap + 0.5 * b.width;
    let lo = a.x[0].min(b.x[0] + offset);
    let hi = a.x[a.x.len() - 1].max(b.x[b.x.len() - 1] + offset);
    if b.x[0] + offset > a.x[a.x.len() - 1] {
        return Err(Error::config("mode grids do not overlap at this separation"));
    }
    let n = ((hi - lo) / ha).round() as usize + 1;
    let (mut ab, mut ba) = (0.0, 0.0);
    for i in 0..n {
        let x = lo + i as f64 * ha;
        let (fa, da) = a.sample(x);
        let (fb, db) = b.sample(x - offset);
        ab += db * fa * fb;
        ba += da * fa * fb;
    }
    let kab = a.k0 / (2.0 * a.n_eff) * ab * ha;
    let kba = b.k0 / (2.0 * b.n_eff) * ba * ha;
    Ok((kab * kba).abs().sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Matched,
    Partial,
}

/// A 2×2 interaction between modes `a` and `b` (indices into the mode list).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerBlock {
    pub a: usize,
    pub b: usize,
    pub params: CouplerParams,
    pub kind: BlockKind,
    pub beta_a: f64,
    pub beta_b: f64,
}

impl CouplerBlock {
    /// Envelope matrix with the mean propagation phase restored:
    /// diag(e^{−jβ_a L}, e^{−jβ_b L})·T.
    pub fn physical(&self) -> C2 {
        let l = self.params.length;
        let d = C2::new(cis(-self.beta_a * l), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), cis(-self.beta_b * l));
        d * transfer_matrix(&self.params).0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockReduction {
    pub blocks: Vec<CouplerBlock>,
    /// Modes with no partner; each picks up e^{−jβL}.
    pub passthrough: Vec<usize>,
    pub betas: Vec<f64>,
    pub length: f64,
}

/// |Δβ|L below this counts as phase matched.
pub const MATCHED_THRESHOLD: f64 = PI / 8.0;
/// |Δβ|L above this is treated as no interaction.
pub const PASSTHROUGH_THRESHOLD: f64 = 2.0 * PI;

/// Split a multi-mode coupler into 2×2 blocks. `pairs` lists candidate
/// interactions (mode a, mode b, κ). Δβ = β_a − β_b.
pub fn reduce_to_blocks(betas: &[f64], pairs: &[(usize, usize, f64)], length: f64) -> Result<BlockReduction> {
    let mut blocks: Vec<CouplerBlock> = Vec::new();
    let mut used: Vec<Vec<usize>> = vec![Vec::new(); betas.len()];
    for &(a, b, kappa) in pairs {
        if a >= betas.len() || b >= betas.len() || a == b {
            return Err(Error::config(format!("bad mode pair ({a}, {b})")));
        }
        if kappa == 0.0 {
            continue;
        }
        let delta_beta = betas[a] - betas[b];
        let mismatch = delta_beta.abs() * length;
        let kind = if mismatch < MATCHED_THRESHOLD {
            BlockKind::Matched
        } else if mismatch <= PASSTHROUGH_THRESHOLD {
            BlockKind::Partial
        } else {
            continue;
        };
        used[a].push(b);
        used[b].push(a);
        blocks.push(CouplerBlock {
            a,
            b,
            params: CouplerParams::new(kappa, delta_beta, length)?,
            kind,
            beta_a: betas[a],
            beta_b: betas[b],
        });
    }
    for (mode, partners) in used.iter().enumerate() {
        if partners.len() > 1 {
            return Err(Error::AmbiguousPairing { mode, partners: partners.clone() });
        }
    }
    let passthrough = (0..betas.len()).filter(|&m| used[m].is_empty()).collect();
    Ok(BlockReduction { blocks, passthrough, betas: betas.to_vec(), length })
}

impl BlockReduction {
    /// Assemble the full N×N unitary (N = number of modes, at most 4 here).
    pub fn unitary<const N: usize>(&self) -> Result<nalgebra::SMatrix<Complex64, N, N>> {
        if self.betas.len() != N {
            return Err(Error::Dimension { op: N, state: self.betas.len() });
        }
        let mut u = nalgebra::SMatrix::<Complex64, N, N>::zeros();
        for &m in &self.passthrough {
            u[(m, m)] = cis(-self.betas[m] * self.length);
        }
        for blk in &self.blocks {
            let p = blk.physical();
            let idx = [blk.a, blk.b];
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    u[(i, j)] = p[(r, c)];
                }
            }
        }
        Ok(u)
    }
}
