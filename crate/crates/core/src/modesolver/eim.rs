use libm::erf;

use super::slab::{Operator, Slab};
use super::{SolverGrid, WaveguideGeometry};
use crate::material::Material;
use crate::units::{Polarization, Wavelength, UM};
use crate::Result;

/// One lateral mode: effective index and field u(x) with ∫u² dx = 1 (x in m).
#[derive(Debug, Clone)]
pub struct LateralMode {
    pub n_eff: f64,
    pub field: Vec<f64>,
}

/// Result of an effective-index solve for one guide.
#[derive(Debug, Clone)]
pub struct LateralSolution {
    /// Lateral node positions in metres, symmetric about the strip centre.
    pub x: Vec<f64>,
    /// Depth-reduced effective index N(x) per column.
    pub column_index: Vec<f64>,
    /// Lateral cladding index (N far from the strip).
    pub n_cladding: f64,
    /// Unperturbed bulk index.
    pub n_substrate: f64,
    pub k0: f64,
    pub width: f64,
    pub modes: Vec<LateralMode>,
}

impl LateralSolution {
    pub fn step(&self) -> f64 {
        self.x[1] - self.x[0]
    }
}

/// Lateral shape ½[erf((w/2+x)/D) + erf((w/2−x)/D)].
pub(crate) fn lateral_shape(x: f64, width: f64, d: f64) -> f64 {
    0.5 * (erf((0.5 * width + x) / d) + erf((0.5 * width - x) / d))
}

struct DepthModel {
    n_bulk: f64,
    step_um: f64,
    air_nodes: usize,
    crystal_nodes: usize,
    d_um: f64,
    k0_um: f64,
    op: Operator,
}

impl DepthModel {
    /// Local effective index for a column with surface increase `dn` and
    /// Pockels shift `eo` (applied to the whole crystal depth).
    fn column(&self, dn: f64, eo: f64) -> Result<f64> {
        let clad = self.n_bulk + eo;
        if dn <= 0.0 {
            return Ok(clad);
        }
        let n = self.air_nodes + self.crystal_nodes;
        let eps: Vec<f64> = (0..n)
            .map(|i| {
                let y = (i as f64 - self.air_nodes as f64 + 0.5) * self.step_um;
                if y < 0.0 {
                    1.0
                } else {
                    let r = y / self.d_um;
                    (clad + dn * (-r * r).exp()).powi(2)
                }
            })
            .collect();
        let eps_first = if self.air_nodes > 0 { 1.0 } else { eps[0] };
        let slab = Slab { eps, step: self.k0_um * self.step_um, op: self.op, eps_first, eps_last: clad * clad };
        Ok(match slab.solve(0)? {
            Some(m) => m.n2.sqrt(),
            None => clad,
        })
    }
}

pub(crate) fn solve(
    material: &Material,
    grid: &SolverGrid,
    geom: &WaveguideGeometry,
    lambda: Wavelength,
    pol: Polarization,
) -> Result<LateralSolution> {
    let n_bulk = material.bulk_index(lambda, pol)?;
    let dn_sat = material.indiffusion.delta_n_saturated(lambda, pol);
    let eo = match geom.eo_drive() {
        Some((v, gap)) => material.eo_shift(lambda, pol, v, gap)?,
        None => 0.0,
    };
    let d_um = material.indiffusion.diffusion_length_um;
    let k0_um = lambda.k0() * UM;
    let (depth_op, lateral_op) = match pol {
        Polarization::TM => (Operator::Weighted, Operator::Scalar),
        Polarization::TE => (Operator::Scalar, Operator::Weighted),
    };
    let depth = DepthModel {
        n_bulk,
        step_um: grid.depth_step_um,
        air_nodes: (grid.depth_air_um / grid.depth_step_um).round() as usize,
        crystal_nodes: (grid.depth_um / grid.depth_step_um).round() as usize,
        d_um,
        k0_um,
        op: depth_op,
    };

    let w_um = geom.width / UM;
    let h = grid.lateral_step_um;
    let c = ((0.5 * w_um + grid.lateral_margin_um) / h).ceil() as usize;
    let half_w = 0.5 * w_um * (1.0 + 1e-12);
    // columns for x >= 0; the structure is symmetric
    let mut half = Vec::with_capacity(c + 1);
    for i in 0..=c {
        let x = i as f64 * h;
        let dn = dn_sat * lateral_shape(x, w_um, d_um);
        let shift = if x <= half_w { eo } else { 0.0 };
        half.push(depth.column(dn, shift)?);
    }
    let nodes = 2 * c + 1;
    let column_index: Vec<f64> = (0..nodes)
        .map(|i| half[(i as isize - c as isize).unsigned_abs()])
        .collect();
    let x: Vec<f64> = (0..nodes).map(|i| (i as f64 - c as f64) * h * UM).collect();

    let n_cladding = half[c];
    let eps: Vec<f64> = column_index.iter().map(|n| n * n).collect();
    let clad2 = n_cladding * n_cladding;
    let slab = Slab { eps, step: k0_um * h, op: lateral_op, eps_first: clad2, eps_last: clad2 };
    let h_m = h * UM;
    let modes = slab
        .solve_all(grid.max_modes)?
        .into_iter()
        .map(|m| {
            let mut field = slab.field(&m);
            let s = 1.0 / h_m.sqrt();
            field.iter_mut().for_each(|u| *u *= s);
            // fix the sign: positive lobe on the x > 0 side
            let probe: f64 = field.iter().zip(&x).map(|(u, x)| u * x.signum().max(0.0)).sum();
            if probe < 0.0 {
                field.iter_mut().for_each(|u| *u = -*u);
            }
            LateralMode { n_eff: m.n2.sqrt(), field }
        })
        .collect();

    Ok(LateralSolution {
        x,
        column_index,
        n_cladding,
        n_substrate: n_bulk,
        k0: lambda.k0(),
        width: geom.width,
        modes,
    })
}
