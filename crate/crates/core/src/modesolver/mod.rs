//! Effective-index mode solver for Ti-indiffused channel waveguides.
//!
//! Each lateral column is reduced by a depth slab solve to a local effective
//! index N(x); a lateral slab solve on N(x)² then gives the channel modes.
//! TM (field along the optic axis, normal to the surface) uses the weighted
//! operator in depth and the scalar one laterally; TE is the other way round.

mod eim;
mod profile;
pub mod slab;
mod sweep;

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::material::Material;
use crate::units::{Polarization, Wavelength, UM};
use crate::{Error, Result};

pub use eim::LateralSolution;
pub use profile::{IndexProfile, ProfileGrid};
pub use sweep::{find_crossing_voltage, CouplerPair, PairRow, PairSweep};

/// Direction of the vertical field under an electrode. With positive volts,
/// `Up` lowers the index and `Down` raises it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldOrientation {
    Up,
    Down,
}

impl FieldOrientation {
    pub fn sign(self) -> f64 {
        match self {
            FieldOrientation::Up => 1.0,
            FieldOrientation::Down => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            FieldOrientation::Up => FieldOrientation::Down,
            FieldOrientation::Down => FieldOrientation::Up,
        }
    }
}

/// Electrode over a guide: uniform field volts/gap across the strip.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Electrode {
    /// Electrode separation in metres.
    pub gap: f64,
    pub orientation: FieldOrientation,
    pub volts: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveguideGeometry {
    /// Titanium strip width in metres.
    pub width: f64,
    pub electrode: Option<Electrode>,
}

impl WaveguideGeometry {
    pub fn new(width: f64) -> Self {
        WaveguideGeometry { width, electrode: None }
    }

    pub fn from_um(width_um: f64) -> Self {
        Self::new(width_um * UM)
    }

    pub fn with_electrode(mut self, gap: f64, orientation: FieldOrientation, volts: f64) -> Self {
        self.electrode = Some(Electrode { gap, orientation, volts });
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::domain(format!("waveguide width must be > 0, got {} m", self.width)));
        }
        if let Some(e) = self.electrode {
            if !(e.gap > 0.0) {
                return Err(Error::domain(format!("electrode gap must be > 0, got {} m", e.gap)));
            }
        }
        Ok(())
    }

    /// Signed field-equivalent voltage (orientation folded in) and gap.
    fn eo_drive(&self) -> Option<(f64, f64)> {
        self.electrode
            .filter(|e| e.volts != 0.0)
            .map(|e| (e.orientation.sign() * e.volts, e.gap))
    }
}

/// A guided mode of a channel waveguide.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GuidedMode {
    pol: Polarization,
    order: usize,
    n_eff: f64,
    beta: f64,
    lambda: Wavelength,
}

impl GuidedMode {
    pub fn new(pol: Polarization, order: usize, n_eff: f64, lambda: Wavelength) -> Self {
        GuidedMode { pol, order, n_eff, beta: lambda.beta(n_eff), lambda }
    }

    pub fn pol(&self) -> Polarization {
        self.pol
    }

    /// Mode number: 0 even, 1 odd.
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn n_eff(&self) -> f64 {
        self.n_eff
    }

    /// Propagation constant in rad/m.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn wavelength(&self) -> Wavelength {
        self.lambda
    }
}

/// Discretization settings, lengths in µm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverGrid {
    pub depth_step_um: f64,
    /// Air layer kept above the surface.
    pub depth_air_um: f64,
    /// Crystal depth below the surface.
    pub depth_um: f64,
    pub lateral_step_um: f64,
    /// Cladding kept on each side beyond the strip edge.
    pub lateral_margin_um: f64,
    pub min_samples_per_d: f64,
    /// Lateral modes searched per solve.
    pub max_modes: usize,
}

impl Default for SolverGrid {
    fn default() -> Self {
        SolverGrid {
            depth_step_um: 0.0125,
            depth_air_um: 0.5,
            depth_um: 15.0,
            lateral_step_um: 0.05,
            lateral_margin_um: 15.0,
            min_samples_per_d: 10.0,
            max_modes: 3,
        }
    }
}

impl SolverGrid {
    fn validate(&self, diffusion_length_um: f64) -> Result<()> {
        for (v, name) in [
            (self.depth_step_um, "depth_step_um"),
            (self.depth_um, "depth_um"),
            (self.lateral_step_um, "lateral_step_um"),
            (self.lateral_margin_um, "lateral_margin_um"),
        ] {
            if !(v > 0.0) {
                return Err(Error::config(format!("grid: {name} must be > 0")));
            }
        }
        if !(self.depth_air_um >= 0.0) {
            return Err(Error::config("grid: depth_air_um must be >= 0"));
        }
        let coarsest = self.depth_step_um.max(self.lateral_step_um);
        if diffusion_length_um / coarsest < self.min_samples_per_d {
            return Err(Error::config(format!(
                "grid: {:.2} samples per diffusion length, need at least {}",
                diffusion_length_um / coarsest,
                self.min_samples_per_d
            )));
        }
        if self.max_modes == 0 {
            return Err(Error::config("grid: max_modes must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct CacheKey {
    width: u64,
    lambda: u64,
    pol: Polarization,
    drive: u64,
    gap: u64,
}

impl CacheKey {
    fn new(geom: &WaveguideGeometry, lambda: Wavelength, pol: Polarization) -> Self {
        let (drive, gap) = geom.eo_drive().unwrap_or((0.0, 0.0));
        CacheKey {
            width: geom.width.to_bits(),
            lambda: lambda.m().to_bits(),
            pol,
            drive: drive.to_bits(),
            gap: gap.to_bits(),
        }
    }
}

/// Effective-index solver bound to a material and grid. Results are memoized.
#[derive(Debug)]
pub struct ModeSolver {
    material: Material,
    grid: SolverGrid,
    cache: RwLock<HashMap<CacheKey, Arc<LateralSolution>>>,
}

impl ModeSolver {
    pub fn new(material: Material) -> Self {
        Self::with_grid(material, SolverGrid::default()).expect("default grid is valid")
    }

    pub fn with_grid(material: Material, grid: SolverGrid) -> Result<Self> {
        grid.validate(material.indiffusion.diffusion_length_um)?;
        Ok(ModeSolver { material, grid, cache: RwLock::new(HashMap::new()) })
    }

    pub fn material(&self) -> &Material {
        &self.material
    }

    pub fn grid(&self) -> &SolverGrid {
        &self.grid
    }

    /// Full lateral solution (index columns, all guided modes and fields).
    pub fn solve(
        &self,
        geom: &WaveguideGeometry,
        lambda: Wavelength,
        pol: Polarization,
    ) -> Result<Arc<LateralSolution>> {
        geom.validate()?;
        let key = CacheKey::new(geom, lambda, pol);
        if let Some(hit) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let sol = Arc::new(eim::solve(&self.material, &self.grid, geom, lambda, pol)?);
        self.cache.write().expect("cache lock").insert(key, sol.clone());
        Ok(sol)
    }

    pub fn effective_index(
        &self,
        geom: &WaveguideGeometry,
        lambda: Wavelength,
        pol: Polarization,
        order: usize,
    ) -> Result<GuidedMode> {
        let sol = self.solve(geom, lambda, pol)?;
        match sol.modes.get(order) {
            Some(m) => Ok(GuidedMode::new(pol, order, m.n_eff, lambda)),
            None => Err(Error::NotGuided { order, width_um: geom.width / UM }),
        }
    }

    /// Number of guided lateral modes (capped at the grid's `max_modes`).
    pub fn guided_count(&self, geom: &WaveguideGeometry, lambda: Wavelength, pol: Polarization) -> Result<usize> {
        Ok(self.solve(geom, lambda, pol)?.modes.len())
    }

    /// Width (m) in `bracket` at which mode `order` of `pol` reaches `target_beta`.
    /// Widths where the mode is cut off count as lying below the target.
    pub fn find_phasematch_width(
        &self,
        target_beta: f64,
        lambda: Wavelength,
        pol: Polarization,
        order: usize,
        bracket: (f64, f64),
        tol_beta: f64,
    ) -> Result<f64> {
        let (mut lo, mut hi) = bracket;
        let no_match = || Error::NoPhaseMatch { lo_um: bracket.0 / UM, hi_um: bracket.1 / UM };
        let diff = |w: f64| -> Result<Option<f64>> {
            match self.effective_index(&WaveguideGeometry::new(w), lambda, pol, order) {
                Ok(m) => Ok(Some(m.beta() - target_beta)),
                Err(Error::NotGuided { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let d_hi = diff(hi)?.ok_or_else(no_match)?;
        if d_hi < 0.0 {
            return Err(no_match());
        }
        if d_hi.abs() < tol_beta {
            return Ok(hi);
        }
        if let Some(d_lo) = diff(lo)? {
            if d_lo > 0.0 {
                return Err(no_match());
            }
            if d_lo.abs() < tol_beta {
                return Ok(lo);
            }
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            match diff(mid)? {
                Some(d) if d.abs() < tol_beta => return Ok(mid),
                Some(d) if d > 0.0 => hi = mid,
                _ => lo = mid,
            }
            if hi - lo < 1e-15 {
                break;
            }
        }
        Err(Error::Numeric { what: "phase-match bisection".into(), residual: (hi - lo) / UM })
    }

    pub fn build_profile(
        &self,
        geom: &WaveguideGeometry,
        lambda: Wavelength,
        pol: Polarization,
        grid: &ProfileGrid,
    ) -> Result<IndexProfile> {
        profile::build(&self.material, geom, lambda, pol, grid)
    }
}

/// Default phase-match tolerance on |Δβ| in rad/m.
pub const PHASEMATCH_TOL: f64 = 1.0;
/// Default crossing-voltage tolerance on |Δβ| in rad/m.
pub const CROSSING_TOL: f64 = 0.1;
