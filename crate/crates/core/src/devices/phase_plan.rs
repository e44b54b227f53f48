//! Path-length equalization for the three-path CNOT circuit.
//!
//! Component phases (rad):
//!
//! * φ_eTM = β_eTM ℓ₁ + β_oTM ℓ₂ + β′L_D − (2q₁ + q₂)π/2
//! * φ_oTM = φ_eTM
//! * φ_eTE = 2β_eTE ℓ₁ + β″L_D
//! * φ_oTE = 2β_oTE ℓ₃ − q₃π + 2φ_A
//!
//! Equalizing them mod 2π leaves two congruences: one fixes ℓ₂ given ℓ₁
//! (period 2π/β_oTM), the other fixes ℓ₃ given ℓ₁ (period π/β_oTE).

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::units::wrap_phase;
use crate::{Error, Result};

fn default_q() -> [u32; 3] {
    [1, 1, 1]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhasePlanInputs {
    pub beta_e_tm: f64,
    pub beta_o_tm: f64,
    pub beta_e_te: f64,
    pub beta_o_te: f64,
    /// TM coupler supermode constant.
    pub beta_prime: f64,
    /// TE even constant through the coupler.
    pub beta_dprime: f64,
    /// Electrode length (m).
    pub l_d: f64,
    /// Phase of the odd-TE component through the TM analyzer (rad).
    pub phi_a: f64,
    #[serde(default = "default_q")]
    pub q: [u32; 3],
    /// Lower bounds on ℓ₁, ℓ₂, ℓ₃ (m).
    #[serde(default)]
    pub min_lengths: [f64; 3],
}

/// The four component phases, unwrapped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComponentPhases {
    pub e_tm: f64,
    pub o_tm: f64,
    pub e_te: f64,
    pub o_te: f64,
}

impl ComponentPhases {
    pub fn as_array(&self) -> [f64; 4] {
        [self.e_tm, self.o_tm, self.e_te, self.o_te]
    }

    /// Largest |φᵢ − φ_eTM| mod 2π.
    pub fn spread(&self) -> f64 {
        self.as_array().iter().map(|p| wrap_phase(p - self.e_tm).abs()).fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub inputs: PhasePlanInputs,
    /// ℓ₁, ℓ₂, ℓ₃ (m).
    pub lengths: [f64; 3],
}

impl PhasePlanInputs {
    fn validate(&self) -> Result<()> {
        for (v, name) in [
            (self.beta_e_tm, "beta_e_tm"),
            (self.beta_o_tm, "beta_o_tm"),
            (self.beta_e_te, "beta_e_te"),
            (self.beta_o_te, "beta_o_te"),
            (self.beta_prime, "beta_prime"),
            (self.beta_dprime, "beta_dprime"),
            (self.l_d, "l_d"),
            (self.phi_a, "phi_a"),
        ] {
            if !v.is_finite() {
                return Err(Error::domain(format!("phase plan: {name} is not finite")));
            }
        }
        if self.q.iter().any(|&q| q % 2 == 0) {
            return Err(Error::domain("phase plan: q values must be odd positive integers"));
        }
        Ok(())
    }

    /// Evaluate the component phases for given lengths.
    pub fn phases(&self, l: [f64; 3]) -> ComponentPhases {
        let [q1, q2, q3] = self.q.map(f64::from);
        let e_tm = self.beta_e_tm * l[0] + self.beta_o_tm * l[1] + self.beta_prime * self.l_d - (2.0 * q1 + q2) * PI / 2.0;
        ComponentPhases {
            e_tm,
            o_tm: e_tm,
            e_te: 2.0 * self.beta_e_te * l[0] + self.beta_dprime * self.l_d,
            o_te: 2.0 * self.beta_o_te * l[2] - q3 * PI + 2.0 * self.phi_a,
        }
    }

    /// Residues r₂, r₃ such that ℓ₂ ≡ r₂(ℓ₁) (mod p₂) and ℓ₃ ≡ r₃(ℓ₁)
    /// (mod p₃), as affine maps c + s·ℓ₁.
    fn congruences(&self) -> [(f64, f64, f64); 2] {
        let [q1, q2, q3] = self.q.map(f64::from);
        // β_oTM ℓ₂ ≡ (2β_eTE − β_eTM)ℓ₁ + (β″ − β′)L_D + (2q₁ + q₂)π/2
        let c2 = ((self.beta_dprime - self.beta_prime) * self.l_d + (2.0 * q1 + q2) * PI / 2.0) / self.beta_o_tm;
        let s2 = (2.0 * self.beta_e_te - self.beta_e_tm) / self.beta_o_tm;
        // 2β_oTE ℓ₃ ≡ 2β_eTE ℓ₁ + β″L_D + q₃π − 2φ_A
        let c3 = (self.beta_dprime * self.l_d + q3 * PI - 2.0 * self.phi_a) / (2.0 * self.beta_o_te);
        let s3 = self.beta_e_te / self.beta_o_te;
        [(c2, s2, 2.0 * PI / self.beta_o_tm), (c3, s3, PI / self.beta_o_te)]
    }
}

/// Smallest value ≥ `min` congruent to `x` modulo `period`.
fn lift(x: f64, period: f64, min: f64) -> f64 {
    let y = x + ((min - x) / period).ceil() * period;
    // rounding can leave y a hair under the bound
    if y < min {
        y + period
    } else {
        y
    }
}

impl PhasePlan {
    pub fn phases(&self) -> ComponentPhases {
        self.inputs.phases(self.lengths)
    }

    pub fn residual(&self) -> f64 {
        self.phases().spread()
    }

    pub fn total_length(&self) -> f64 {
        self.lengths.iter().sum()
    }
}

/// Solve for (ℓ₁, ℓ₂, ℓ₃) ≥ minima with all four phases equal mod 2π,
/// choosing the smallest total length.
pub fn phase_equalize(inputs: &PhasePlanInputs) -> Result<PhasePlan> {
    inputs.validate()?;
    let mins = inputs.min_lengths;
    let congr = inputs.congruences();
    for (i, &(c, s, p)) in congr.iter().enumerate() {
        if !(p > 0.0) || !p.is_finite() || !c.is_finite() || !s.is_finite() {
            return Err(Error::Infeasible(format!(
                "congruence {} is degenerate (period {p:e}, offset {c:e}, slope {s:e})",
                i + 1
            )));
        }
    }
    if mins.iter().any(|m| !(*m >= 0.0) || !m.is_finite()) {
        return Err(Error::Infeasible(format!("minimum lengths must be finite and >= 0, got {mins:?}")));
    }
    // `pin` marks a wrap point: that length sits exactly on its minimum,
    // which the rounded ℓ₁ alone might miss by a full period
    let solve_at = |(l1, pin): (f64, Option<usize>)| -> [f64; 3] {
        let mut l = [l1, 0.0, 0.0];
        for (j, &(c, s, p)) in congr.iter().enumerate() {
            l[j + 1] = if pin == Some(j) { mins[j + 1] } else { lift(c + s * l1, p, mins[j + 1]) };
        }
        l
    };
    // Each of ℓ₂, ℓ₃ is a sawtooth in ℓ₁, so the total is piecewise linear
    // with its minimum at the left end or at a wrap point. Past
    // ℓ₁min + p₂ + p₃ the total can only be larger.
    let window = congr[0].2 + congr[1].2;
    let lo = mins[0];
    let hi = lo + window;
    let mut candidates = vec![(lo, None), (hi, None)];
    for (j, &(c, s, p)) in congr.iter().enumerate() {
        if s == 0.0 {
            continue;
        }
        // c + s·ℓ₁ − min ≡ 0 (mod p)
        let min_j = mins[j + 1];
        let k_at = |l1: f64| (c + s * l1 - min_j) / p;
        let (ka, kb) = (k_at(lo), k_at(hi));
        let (k0, k1) = (ka.min(kb).floor() as i64, ka.max(kb).ceil() as i64);
        for k in k0..=k1 {
            let l1 = (k as f64 * p + min_j - c) / s;
            if l1 >= lo && l1 <= hi {
                candidates.push((l1, Some(j)));
            }
        }
    }
    let best = candidates
        .into_iter()
        .map(solve_at)
        .min_by(|a, b| a.iter().sum::<f64>().total_cmp(&b.iter().sum::<f64>()))
        .expect("non-empty candidates");
    let plan = PhasePlan { inputs: inputs.clone(), lengths: best };
    let residual = plan.residual();
    if residual > 1e-9 {
        return Err(Error::Numeric { what: "phase plan plug-back".into(), residual });
    }
    Ok(plan)
}
