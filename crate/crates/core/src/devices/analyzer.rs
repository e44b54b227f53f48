use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::coupling::{coupling_coefficient, polar_form, reduce_to_blocks, CouplerParams, ModeField, PolarForm};
use crate::linalg::cis;
use crate::modesolver::{ModeSolver, WaveguideGeometry, PHASEMATCH_TOL};
use crate::quantum::ModalQubit;
use crate::units::{Polarization, Wavelength, MM, UM};
use crate::{Error, Result};

/// Where the extracted odd component is delivered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputParity {
    /// As the even mode of the SMW arm.
    #[default]
    Even,
    /// Coupled once more into the odd mode of a second TMW.
    Odd,
}

fn default_q() -> u32 {
    1
}

fn default_bend_length() -> f64 {
    10.0
}

fn default_port_separation() -> f64 {
    127.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeAnalyzerSpec {
    pub tmw_width_um: f64,
    /// `None` searches for the width phase matched to the TMW odd mode.
    #[serde(default)]
    pub smw_width_um: Option<f64>,
    pub gap_um: f64,
    /// `None` uses q·π/2κ.
    #[serde(default)]
    pub length_mm: Option<f64>,
    #[serde(default = "default_q")]
    pub q: u32,
    #[serde(default = "default_bend_length")]
    pub bend_length_mm: f64,
    /// Centre-to-centre distance between the bend output and the TMW.
    #[serde(default = "default_port_separation")]
    pub port_separation_um: f64,
    pub pol: Polarization,
    #[serde(default)]
    pub output: OutputParity,
}

impl ModeAnalyzerSpec {
    pub fn new(pol: Polarization) -> Self {
        ModeAnalyzerSpec {
            tmw_width_um: 5.6,
            smw_width_um: None,
            gap_um: 4.0,
            length_mm: None,
            q: 1,
            bend_length_mm: default_bend_length(),
            port_separation_um: default_port_separation(),
            pol,
            output: OutputParity::Even,
        }
    }
}

/// Propagation constants and couplings seen by one polarization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerModes {
    pub beta_even: f64,
    pub beta_odd: f64,
    pub beta_smw: f64,
    /// TMW odd ↔ SMW even.
    pub kappa_odd: f64,
    /// TMW even ↔ SMW even.
    pub kappa_even: f64,
}

impl AnalyzerModes {
    pub fn odd_block(&self, length: f64) -> Result<CouplerParams> {
        CouplerParams::new(self.kappa_odd, self.beta_odd - self.beta_smw, length)
    }
}

/// Arc length of a raised-cosine S-bend with lateral offset `offset`.
pub fn s_bend_path(length: f64, offset: f64) -> f64 {
    let n = 2000;
    let h = length / n as f64;
    let slope = offset * PI / (2.0 * length);
    let f = |z: f64| (1.0 + (slope * (PI * z / length).sin()).powi(2)).sqrt();
    let mut s = f(0.0) + f(length);
    for i in 1..n {
        s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}

/// A built analyzer, block level. Mode order of [`ModeAnalyzer::unitary`]:
/// TMW even, TMW odd, SMW arm, then (odd-output variant) second TMW odd.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeAnalyzer {
    pub design_pol: Polarization,
    pub smw_width: f64,
    pub length: f64,
    pub bend_path: f64,
    pub output: OutputParity,
    pub tm: AnalyzerModes,
    pub te: AnalyzerModes,
}

/// Amplitudes leaving the analyzer for one input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerOutput {
    pub kept_even: Complex64,
    pub kept_odd: Complex64,
    pub extracted: Complex64,
    /// Phase of the extracted amplitude beyond its propagation phase.
    pub extracted_phase: f64,
    /// Phase of the kept odd amplitude beyond e^{−jβ_o L}.
    pub kept_odd_phase: f64,
}

impl ModeAnalyzer {
    /// Solve the guides and check selectivity. Errors with `Design` if the
    /// design polarization is not phase matched or the other one is.
    pub fn design(solver: &ModeSolver, spec: &ModeAnalyzerSpec, lambda: Wavelength) -> Result<Self> {
        let w1 = spec.tmw_width_um * UM;
        let gap = spec.gap_um * UM;
        if spec.q.is_multiple_of(2) {
            return Err(Error::domain("analyzer q must be odd"));
        }
        let tmw = |pol| solver.solve(&WaveguideGeometry::new(w1), lambda, pol);
        let design_tmw = tmw(spec.pol)?;
        if design_tmw.modes.len() < 2 {
            return Err(Error::NotGuided { order: 1, width_um: spec.tmw_width_um });
        }
        let w2 = match spec.smw_width_um {
            Some(w) => w * UM,
            None => {
                let target = lambda.beta(design_tmw.modes[1].n_eff);
                solver.find_phasematch_width(target, lambda, spec.pol, 0, (0.2 * w1, w1), PHASEMATCH_TOL)?
            }
        };
        let modes = |pol| -> Result<AnalyzerModes> {
            let a = tmw(pol)?;
            let b = solver.solve(&WaveguideGeometry::new(w2), lambda, pol)?;
            let smw = ModeField::from_solution(&b, 0)?;
            Ok(AnalyzerModes {
                beta_even: lambda.beta(a.modes[0].n_eff),
                beta_odd: lambda.beta(a.modes.get(1).ok_or(Error::NotGuided { order: 1, width_um: spec.tmw_width_um })?.n_eff),
                beta_smw: lambda.beta(b.modes[0].n_eff),
                kappa_odd: coupling_coefficient(&ModeField::from_solution(&a, 1)?, &smw, gap)?,
                kappa_even: coupling_coefficient(&ModeField::from_solution(&a, 0)?, &smw, gap)?,
            })
        };
        let tm = modes(Polarization::TM)?;
        let te = modes(Polarization::TE)?;
        let own = if spec.pol == Polarization::TM { tm } else { te };
        let other = if spec.pol == Polarization::TM { te } else { tm };
        let length = match spec.length_mm {
            Some(l) => l * MM,
            None => CouplerParams::coupling_length(own.kappa_odd, spec.q),
        };
        let offset = spec.port_separation_um * UM - (0.5 * w1 + gap + 0.5 * w2);
        let an = ModeAnalyzer {
            design_pol: spec.pol,
            smw_width: w2,
            length,
            bend_path: s_bend_path(spec.bend_length_mm * MM, offset.max(0.0)),
            output: spec.output,
            tm,
            te,
        };
        let threshold = crate::coupling::MATCHED_THRESHOLD;
        let own_mis = (own.beta_odd - own.beta_smw).abs() * length;
        if own_mis >= threshold {
            return Err(Error::Design(format!(
                "{} analyzer not phase matched: |Δβ|L = {own_mis:.3} rad",
                spec.pol
            )));
        }
        let other_mis = (other.beta_odd - other.beta_smw).abs() * length;
        if other_mis < threshold {
            return Err(Error::Design(format!(
                "{} analyzer also phase matches {}: |Δβ|L = {other_mis:.3} rad",
                spec.pol,
                spec.pol.other()
            )));
        }
        Ok(an)
    }

    pub fn modes(&self, pol: Polarization) -> &AnalyzerModes {
        match pol {
            Polarization::TM => &self.tm,
            Polarization::TE => &self.te,
        }
    }

    /// Polar-form parameters of the odd-TMW/SMW block for `pol`.
    pub fn odd_polar_form(&self, pol: Polarization) -> Result<PolarForm> {
        Ok(polar_form(&self.modes(pol).odd_block(self.length)?))
    }

    fn coupler(&self, m: &AnalyzerModes, n: usize, smw: usize, tmw_odd: usize, tmw_even: Option<usize>) -> Result<DMatrix<Complex64>> {
        let mut betas = vec![0.0; n];
        betas[smw] = m.beta_smw;
        betas[tmw_odd] = m.beta_odd;
        let mut pairs = vec![(tmw_odd, smw, m.kappa_odd)];
        if let Some(e) = tmw_even {
            betas[e] = m.beta_even;
            pairs.push((e, smw, m.kappa_even));
        }
        let red = reduce_to_blocks(&betas, &pairs, self.length)?;
        let mut u = DMatrix::<Complex64>::identity(n, n);
        for &k in &red.passthrough {
            u[(k, k)] = cis(-betas[k] * self.length);
        }
        for b in &red.blocks {
            let p = b.physical();
            let idx = [b.a, b.b];
            for (r, &i) in idx.iter().enumerate() {
                for (c, &j) in idx.iter().enumerate() {
                    u[(i, j)] = p[(r, c)];
                }
            }
        }
        Ok(u)
    }

    /// Block-level unitary for `pol`.
    pub fn unitary(&self, pol: Polarization) -> Result<DMatrix<Complex64>> {
        let m = *self.modes(pol);
        match self.output {
            OutputParity::Even => self.coupler(&m, 3, 2, 1, Some(0)),
            OutputParity::Odd => {
                let first = self.coupler(&m, 4, 2, 1, Some(0))?;
                // TMW modes continue straight; the arm runs through the bend
                let mut bend = DMatrix::<Complex64>::identity(4, 4);
                bend[(0, 0)] = cis(-m.beta_even * self.bend_path);
                bend[(1, 1)] = cis(-m.beta_odd * self.bend_path);
                bend[(2, 2)] = cis(-m.beta_smw * self.bend_path);
                let mut second = self.coupler(&m, 4, 2, 3, None)?;
                second[(0, 0)] = cis(-m.beta_even * self.length);
                second[(1, 1)] = cis(-m.beta_odd * self.length);
                Ok(second * bend * first)
            }
        }
    }

    /// Reverse-direction operation. The device is reciprocal, so its
    /// scattering matrix is the transpose of the forward one.
    pub fn combiner(&self, pol: Polarization) -> Result<DMatrix<Complex64>> {
        Ok(self.unitary(pol)?.transpose())
    }

    pub fn action(&self, pol: Polarization, input: &ModalQubit) -> Result<AnalyzerOutput> {
        let u = self.unitary(pol)?;
        let n = u.nrows();
        let mut v = nalgebra::DVector::<Complex64>::zeros(n);
        let [e, o] = input.amplitudes();
        v[0] = e;
        v[1] = o;
        let out = &u * v;
        let m = self.modes(pol);
        let port = if self.output == OutputParity::Even { 2 } else { 3 };
        // propagation reference for each port
        let path = match self.output {
            OutputParity::Even => m.beta_smw * self.length,
            OutputParity::Odd => m.beta_smw * (self.length + self.bend_path) + m.beta_odd * self.length,
        };
        let odd_path = match self.output {
            OutputParity::Even => m.beta_odd * self.length,
            OutputParity::Odd => m.beta_odd * (2.0 * self.length + self.bend_path),
        };
        let rel = |z: Complex64, phase: f64| if z.norm() > 0.0 { crate::units::wrap_phase(z.arg() + phase) } else { 0.0 };
        Ok(AnalyzerOutput {
            kept_even: out[0],
            kept_odd: out[1],
            extracted: out[port],
            extracted_phase: rel(u[(port, 1)], path),
            kept_odd_phase: rel(u[(1, 1)], odd_path),
        })
    }
}
