//! JSON documents for unitaries and states. Complex numbers are `[re, im]`.

use nalgebra::SMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::linalg::cis;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UnitaryDoc {
    pub basis: Vec<String>,
    /// Removed from `matrix`: the stored body has its first nonzero entry
    /// (row-major) real and nonnegative.
    pub global_phase: f64,
    /// Row-major.
    pub matrix: Vec<Vec<[f64; 2]>>,
}

fn pair(z: Complex64) -> [f64; 2] {
    // keep the output free of negative zeros
    [z.re + 0.0, z.im + 0.0]
}

impl UnitaryDoc {
    pub fn from_matrix<const N: usize>(u: &SMatrix<Complex64, N, N>, basis: &[&str]) -> Self {
        let scale = u.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let pivot = (0..N * N).map(|k| (k / N, k % N)).find(|&ij| u[ij].norm() > 1e-12 * scale);
        let global_phase = pivot.map_or(0.0, |ij| u[ij].arg());
        let r = cis(-global_phase);
        let matrix = (0..N)
            .map(|i| {
                (0..N)
                    .map(|j| {
                        // the pivot is real by construction; store it exactly so
                        if pivot == Some((i, j)) {
                            [u[(i, j)].norm(), 0.0]
                        } else {
                            pair(u[(i, j)] * r)
                        }
                    })
                    .collect()
            })
            .collect();
        UnitaryDoc { basis: basis.iter().map(|s| s.to_string()).collect(), global_phase: global_phase + 0.0, matrix }
    }

    pub fn to_matrix<const N: usize>(&self) -> Result<SMatrix<Complex64, N, N>> {
        if self.matrix.len() != N || self.matrix.iter().any(|r| r.len() != N) {
            return Err(Error::config(format!("unitary document is not {N}×{N}")));
        }
        let g = cis(self.global_phase);
        Ok(SMatrix::from_fn(|i, j| {
            let [re, im] = self.matrix[i][j];
            Complex64::new(re, im) * g
        }))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateDoc {
    pub basis: Vec<String>,
    pub amplitudes: Vec<[f64; 2]>,
}

impl StateDoc {
    pub fn new(amps: &[Complex64], basis: &[&str]) -> Self {
        StateDoc {
            basis: basis.iter().map(|s| s.to_string()).collect(),
            amplitudes: amps.iter().map(|&z| pair(z)).collect(),
        }
    }

    pub fn amplitudes(&self) -> Vec<Complex64> {
        self.amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
    }
}
