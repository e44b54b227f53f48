use serde::{Deserialize, Serialize};

use super::eim::lateral_shape;
use super::WaveguideGeometry;
use crate::material::Material;
use crate::units::{Polarization, Wavelength, UM};
use crate::{Error, Result};

/// Sampling of a 2D index map, lengths in µm. The surface row (y = 0) and the
/// centre column (x = 0) are always grid nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileGrid {
    pub step_um: f64,
    pub half_width_um: f64,
    pub depth_um: f64,
    pub min_samples_per_d: f64,
}

impl Default for ProfileGrid {
    fn default() -> Self {
        ProfileGrid { step_um: 0.1, half_width_um: 20.0, depth_um: 15.0, min_samples_per_d: 10.0 }
    }
}

/// Crystal index n(x, y) below the surface, row-major in y.
#[derive(Debug, Clone)]
pub struct IndexProfile {
    /// Lateral positions (m).
    pub x: Vec<f64>,
    /// Depth below the surface (m).
    pub y: Vec<f64>,
    pub values: Vec<f64>,
}

impl IndexProfile {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.x.len() + ix]
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}

pub(crate) fn build(
    material: &Material,
    geom: &WaveguideGeometry,
    lambda: Wavelength,
    pol: Polarization,
    grid: &ProfileGrid,
) -> Result<IndexProfile> {
    geom.validate()?;
    let d_um = material.indiffusion.diffusion_length_um;
    if !(grid.step_um > 0.0) || d_um / grid.step_um < grid.min_samples_per_d {
        return Err(Error::config(format!(
            "profile grid step {} µm resolves D = {} µm with fewer than {} samples",
            grid.step_um, d_um, grid.min_samples_per_d
        )));
    }
    let n_bulk = material.bulk_index(lambda, pol)?;
    let dn_sat = material.indiffusion.delta_n_saturated(lambda, pol);
    let eo = match geom.eo_drive() {
        Some((v, gap)) => material.eo_shift(lambda, pol, v, gap)?,
        None => 0.0,
    };
    let w_um = geom.width / UM;
    let nx = (grid.half_width_um / grid.step_um).round() as usize;
    let ny = (grid.depth_um / grid.step_um).round() as usize;
    let xs: Vec<f64> = (0..=2 * nx).map(|i| (i as f64 - nx as f64) * grid.step_um).collect();
    let ys: Vec<f64> = (0..=ny).map(|i| i as f64 * grid.step_um).collect();
    let half_w = 0.5 * w_um * (1.0 + 1e-12);
    let mut values = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        let depth = (-(y / d_um).powi(2)).exp();
        for &x in &xs {
            let shift = if x.abs() <= half_w { eo } else { 0.0 };
            values.push(n_bulk + shift + dn_sat * lateral_shape(x, w_um, d_um) * depth);
        }
    }
    Ok(IndexProfile {
        x: xs.iter().map(|x| x * UM).collect(),
        y: ys.iter().map(|y| y * UM).collect(),
        values,
    })
}
