//! Bulk and perturbed refractive indices of lithium niobate.
//!
//! Coefficients live in a TOML document (see `data/lithium_niobate.toml`);
//! [`Material::lithium_niobate`] loads the bundled copy.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use libm::erf;

use crate::units::{Polarization, Wavelength, PM_PER_V, UM};
use crate::{Error, Result};

const DEFAULT_TOML: &str = include_str!("../data/lithium_niobate.toml");

/// One Sellmeier branch, n² = 1 + Σ Bᵢλ²/(λ² − Cᵢ) with λ in µm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierSet {
    pub label: String,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub window_um: [f64; 2],
}

impl SellmeierSet {
    fn validate(&self, name: &str) -> Result<()> {
        if self.b.is_empty() || self.b.len() != self.c.len() {
            return Err(Error::config(format!(
                "sellmeier.{name}: b and c must be non-empty and of equal length"
            )));
        }
        let [lo, hi] = self.window_um;
        if !(lo > 0.0 && hi > lo) {
            return Err(Error::config(format!("sellmeier.{name}: bad window {lo}..{hi}")));
        }
        if self.c.iter().any(|&c| c >= lo * lo && c <= hi * hi) {
            return Err(Error::config(format!(
                "sellmeier.{name}: a pole lies inside the validity window"
            )));
        }
        Ok(())
    }

    pub fn index(&self, lambda: Wavelength) -> Result<f64> {
        let l = lambda.um();
        let [lo, hi] = self.window_um;
        if !(l >= lo && l <= hi) {
            return Err(Error::domain(format!(
                "wavelength {l} µm outside Sellmeier window [{lo}, {hi}] µm ({})",
                self.label
            )));
        }
        let l2 = l * l;
        let n2 = 1.0
            + self
                .b
                .iter()
                .zip(&self.c)
                .map(|(b, c)| b * l2 / (l2 - c))
                .sum::<f64>();
        Ok(n2.sqrt())
    }
}

/// How the ξ(λ) factor modifies the indiffusion index increase.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DispersionPolicy {
    Off,
    Multiplicative,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TiIndiffusion {
    pub film_thickness_um: f64,
    pub diffusion_length_um: f64,
    pub rho_ordinary: f64,
    pub rho_extraordinary: f64,
    pub xi_a: f64,
    pub xi_b: f64,
    pub dispersion: DispersionPolicy,
    pub xi_reference_um: f64,
}

impl TiIndiffusion {
    fn validate(&self) -> Result<()> {
        let checks = [
            (self.film_thickness_um > 0.0, "film_thickness_um must be > 0"),
            (self.diffusion_length_um > 0.0, "diffusion_length_um must be > 0"),
            (self.rho_ordinary > 0.0 && self.rho_ordinary < 1.0, "rho_ordinary must be in (0, 1)"),
            (
                self.rho_extraordinary > 0.0 && self.rho_extraordinary < 1.0,
                "rho_extraordinary must be in (0, 1)",
            ),
            (self.xi_a > 0.0 && self.xi_b >= 0.0, "xi coefficients must give xi > 0"),
            (self.xi_reference_um > 0.0, "xi_reference_um must be > 0"),
        ];
        for (ok, msg) in checks {
            if !ok {
                return Err(Error::config(format!("indiffusion: {msg}")));
            }
        }
        Ok(())
    }

    /// Diffusion length D in metres.
    pub fn diffusion_length(&self) -> f64 {
        self.diffusion_length_um * UM
    }

    pub fn rho(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::TE => self.rho_ordinary,
            Polarization::TM => self.rho_extraordinary,
        }
    }

    /// ξ(λ) = a + b/λ², λ in µm.
    pub fn xi(&self, lambda: Wavelength) -> f64 {
        let l = lambda.um();
        self.xi_a + self.xi_b / (l * l)
    }

    /// Factor applied to the base Δn under the configured policy.
    pub fn dispersion_scale(&self, lambda: Wavelength) -> f64 {
        match self.dispersion {
            DispersionPolicy::Off => 1.0,
            DispersionPolicy::Multiplicative => {
                self.xi(lambda) / self.xi(Wavelength::from_um(self.xi_reference_um))
            }
        }
    }

    /// Base surface index increase 2δρ·erf(w/2D)/(√π·D) without any ξ factor.
    pub fn delta_n_base(&self, width: f64, pol: Polarization) -> Result<f64> {
        if !(width >= 0.0) || !width.is_finite() {
            return Err(Error::domain(format!("strip width must be >= 0, got {width} m")));
        }
        let delta = self.film_thickness_um * UM;
        let d = self.diffusion_length();
        Ok(2.0 * delta * self.rho(pol) * erf(width / (2.0 * d)) / (PI.sqrt() * d))
    }

    /// Saturated (w → ∞) surface increase including the ξ policy.
    pub fn delta_n_saturated(&self, lambda: Wavelength, pol: Polarization) -> f64 {
        let delta = self.film_thickness_um * UM;
        let d = self.diffusion_length();
        2.0 * delta * self.rho(pol) / (PI.sqrt() * d) * self.dispersion_scale(lambda)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pockels {
    pub r13_pm_per_v: f64,
    pub r33_pm_per_v: f64,
}

impl Pockels {
    fn validate(&self) -> Result<()> {
        if !(self.r13_pm_per_v > 0.0 && self.r33_pm_per_v > self.r13_pm_per_v) {
            return Err(Error::config("pockels: need 0 < r13 < r33"));
        }
        Ok(())
    }

    /// Coefficient seen by a polarization, in m/V (TE: r13, TM: r33).
    pub fn r(&self, pol: Polarization) -> f64 {
        match pol {
            Polarization::TE => self.r13_pm_per_v * PM_PER_V,
            Polarization::TM => self.r33_pm_per_v * PM_PER_V,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SellmeierBranches {
    pub ordinary: SellmeierSet,
    pub extraordinary: SellmeierSet,
}

/// Complete material description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Material {
    pub sellmeier: SellmeierBranches,
    pub indiffusion: TiIndiffusion,
    pub pockels: Pockels,
}

impl Material {
    /// Bundled congruent LiNbO₃ parameters.
    pub fn lithium_niobate() -> Self {
        Self::from_toml_str(DEFAULT_TOML).expect("bundled material data is valid")
    }

    /// Text of the bundled material file.
    pub fn default_toml() -> &'static str {
        DEFAULT_TOML
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let m: Material =
            toml::from_str(text).map_err(|e| Error::config(format!("material file: {e}")))?;
        m.validate()?;
        Ok(m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.sellmeier.ordinary.validate("ordinary")?;
        self.sellmeier.extraordinary.validate("extraordinary")?;
        self.indiffusion.validate()?;
        self.pockels.validate()
    }

    pub fn sellmeier(&self, pol: Polarization) -> &SellmeierSet {
        match pol {
            Polarization::TE => &self.sellmeier.ordinary,
            Polarization::TM => &self.sellmeier.extraordinary,
        }
    }

    /// n_o for TE, n_e for TM.
    pub fn bulk_index(&self, lambda: Wavelength, pol: Polarization) -> Result<f64> {
        self.sellmeier(pol).index(lambda)
    }

    /// Surface index increase of a strip of width `width` (m), ξ policy applied.
    pub fn delta_n(&self, width: f64, lambda: Wavelength, pol: Polarization) -> Result<f64> {
        if !(lambda.m() > 0.0) {
            return Err(Error::domain("wavelength must be positive"));
        }
        Ok(self.indiffusion.delta_n_base(width, pol)? * self.indiffusion.dispersion_scale(lambda))
    }

    /// Pockels shift of the bulk index for a field `volts / gap` (gap in m).
    pub fn eo_shift(&self, lambda: Wavelength, pol: Polarization, volts: f64, gap: f64) -> Result<f64> {
        let n = self.bulk_index(lambda, pol)?;
        eo_index_shift(n, self.pockels.r(pol), volts, gap)
    }
}

/// Δn = −½·n³·r·V/d. `r` in m/V, `gap` in m.
pub fn eo_index_shift(n: f64, r: f64, volts: f64, gap: f64) -> Result<f64> {
    if !(gap > 0.0) {
        return Err(Error::domain(format!("electrode gap must be > 0, got {gap} m")));
    }
    Ok(-0.5 * n.powi(3) * r * volts / gap)
}
