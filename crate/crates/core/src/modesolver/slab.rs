//! Finite-difference 1D slab eigenproblem with transparent boundaries.
//!
//! Coordinates are normalized by k0, so the eigenvalue is n_eff² directly.
//! Two operators are supported:
//!
//! * scalar: u'' + ε u = n² u
//! * weighted: ε (u'/ε)' + ε u = n² u (field component whose normal
//!   derivative over ε is continuous at index steps)
//!
//! The weighted form is symmetrized with diag(√ε). Outside the grid the
//! field decays with the exact discrete decay factor of a uniform cladding,
//! which makes the matrix depend on the eigenvalue; the fixed point is
//! bracketed and refined with Brent's method.

use crate::linalg::SymTridiag;
use crate::root;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Operator {
    Scalar,
    Weighted,
}

#[derive(Debug, Clone)]
pub struct Slab {
    /// ε at the nodes.
    pub eps: Vec<f64>,
    /// Normalized spacing k0·h.
    pub step: f64,
    pub op: Operator,
    /// Cladding ε beyond the first and last node.
    pub eps_first: f64,
    pub eps_last: f64,
}

/// A converged slab eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct SlabMode {
    pub n2: f64,
    pub residual: f64,
}

const EIG_TOL: f64 = 2e-15;

impl Slab {
    fn cladding_max(&self) -> f64 {
        self.eps_first.max(self.eps_last)
    }

    /// Discrete decay factor r with r + 1/r = 2 + H²(n² − ε_c).
    fn decay(&self, n2: f64, eps_c: f64) -> f64 {
        let a = 0.5 * self.step * self.step * (n2 - eps_c).max(0.0);
        1.0 + a - (a * (2.0 + a)).sqrt()
    }

    /// Half-node weights w_{i+½}, i = -1..n-1 (length n+1).
    fn weights(&self) -> Vec<f64> {
        let n = self.eps.len();
        match self.op {
            Operator::Scalar => vec![1.0; n + 1],
            Operator::Weighted => {
                // harmonic mean of 1/ε keeps u'/ε continuous across steps
                let mut w = Vec::with_capacity(n + 1);
                w.push(2.0 / (self.eps_first + self.eps[0]));
                for i in 0..n - 1 {
                    w.push(2.0 / (self.eps[i] + self.eps[i + 1]));
                }
                w.push(2.0 / (self.eps[n - 1] + self.eps_last));
                w
            }
        }
    }

    /// Symmetric matrix for a trial eigenvalue (which sets the boundary decay).
    pub fn matrix(&self, n2: f64) -> SymTridiag {
        let n = self.eps.len();
        let h2 = self.step * self.step;
        let w = self.weights();
        let s: Vec<f64> = match self.op {
            Operator::Scalar => vec![1.0; n],
            Operator::Weighted => self.eps.clone(),
        };
        let r0 = self.decay(n2, self.eps_first);
        let r1 = self.decay(n2, self.eps_last);
        let mut diag = Vec::with_capacity(n);
        for i in 0..n {
            let mut wl = w[i];
            let mut wr = w[i + 1];
            if i == 0 {
                wl *= 1.0 - r0;
            }
            if i == n - 1 {
                wr *= 1.0 - r1;
            }
            diag.push(-s[i] * (wl + wr) / h2 + self.eps[i]);
        }
        let off = (0..n - 1)
            .map(|i| (s[i] * s[i + 1]).sqrt() * w[i + 1] / h2)
            .collect();
        SymTridiag::new(diag, off)
    }

    fn eig(&self, k: usize, n2: f64) -> f64 {
        let t = self.matrix(n2);
        let (lo, hi) = t.bounds();
        t.kth_largest_in(k, lo, hi, EIG_TOL * hi.abs().max(1.0))
    }

    fn eig_near(&self, k: usize, n2: f64, guess: f64, delta: f64) -> f64 {
        self.matrix(n2).kth_largest_near(k, guess, delta, EIG_TOL * guess.abs().max(1.0))
    }

    /// Solve for the k-th guided mode (k = 0 fundamental). `Ok(None)` when
    /// the mode is below cutoff.
    pub fn solve(&self, k: usize) -> Result<Option<SlabMode>> {
        if k >= self.eps.len() {
            return Ok(None);
        }
        let lo = self.cladding_max();
        let t_lo = self.matrix(lo);
        // guided iff the k-th largest eigenvalue at the cladding line exceeds it
        let edge = lo * (1.0 + 1e-14);
        if t_lo.count_below(edge) >= self.eps.len() - k {
            return Ok(None);
        }
        // the difference operator is negative semidefinite, so max ε bounds the spectrum
        let hi = self.eps.iter().copied().fold(edge, f64::max) * (1.0 + 1e-12);
        let mu_lo = t_lo.kth_largest_in(k, edge, hi, EIG_TOL * hi);
        let tol = 4.0 * EIG_TOL * mu_lo;
        // Fixed-point iteration converges fast when the tails are small at
        // the boundary; near cutoff it stalls and Brent takes over.
        let mut x = mu_lo;
        let mut last_step = f64::INFINITY;
        let mut converged = None;
        for _ in 0..30 {
            let delta = if last_step.is_finite() { (2.0 * last_step).max(1e-9) } else { 1e-4 };
            let y = self.eig_near(k, x, x, delta);
            let step = (y - x).abs();
            if step <= tol {
                converged = Some(y);
                break;
            }
            if step > 0.5 * last_step {
                break;
            }
            last_step = step;
            x = y;
        }
        let n2 = match converged {
            Some(v) => v,
            None => {
                // g is decreasing: g(lo) > 0, g(mu_lo) <= 0
                let g = |x: f64| self.eig(k, x) - x;
                if g(mu_lo) >= 0.0 {
                    mu_lo
                } else {
                    root::brent(g, lo, mu_lo, 1e-15 * mu_lo)?
                }
            }
        };
        let residual = (self.eig_near(k, n2, n2, 1e-9) - n2).abs();
        if residual > 1e-10 * n2 {
            return Err(Error::Numeric { what: "slab fixed point".into(), residual });
        }
        Ok(Some(SlabMode { n2, residual }))
    }

    /// Guided modes in descending order, at most `max_modes`.
    pub fn solve_all(&self, max_modes: usize) -> Result<Vec<SlabMode>> {
        let mut out = Vec::new();
        for k in 0..max_modes {
            match self.solve(k)? {
                Some(m) => out.push(m),
                None => break,
            }
        }
        Ok(out)
    }

    /// Physical field samples of a converged mode, scaled so Σu² = 1.
    pub fn field(&self, mode: &SlabMode) -> Vec<f64> {
        let t = self.matrix(mode.n2);
        let v = t.eigenvector(mode.n2);
        let mut u: Vec<f64> = match self.op {
            Operator::Scalar => v,
            Operator::Weighted => v.iter().zip(&self.eps).map(|(v, e)| v * e.sqrt()).collect(),
        };
        let norm = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        u.iter_mut().for_each(|x| *x /= norm);
        u
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Symmetric step slab, even-mode dispersion relation from the analytic
    /// continuous solution, evaluated on a fine grid.
    #[test]
    fn step_slab_matches_analytic() {
        let (n1, n2c) = (1.5f64, 1.45f64);
        let half = 2.0; // normalized half-width k0·a
        let h = 0.01;
        let extent = 6.0;
        let nodes = (2.0 * extent / h) as usize;
        let eps: Vec<f64> = (0..nodes)
            .map(|i| {
                let x = -extent + (i as f64 + 0.5) * h;
                if x.abs() < half { n1 * n1 } else { n2c * n2c }
            })
            .collect();
        let slab = Slab { eps, step: h, op: Operator::Scalar, eps_first: n2c * n2c, eps_last: n2c * n2c };
        let m = slab.solve(0).unwrap().unwrap();
        // analytic: kx tan(kx a) = p
        let f = |b: f64| {
            let kx = (n1 * n1 - b).sqrt();
            let p = (b - n2c * n2c).sqrt();
            kx * (kx * half).tan() - p
        };
        let exact = root::brent(f, n2c * n2c + 1e-9, n1 * n1 - 1e-9, 1e-15).unwrap();
        assert!((m.n2 - exact).abs() < 1e-5, "{} vs {}", m.n2, exact);
    }

    #[test]
    fn uniform_medium_has_no_guided_mode() {
        let slab = Slab { eps: vec![2.0; 50], step: 0.1, op: Operator::Scalar, eps_first: 2.0, eps_last: 2.0 };
        assert!(slab.solve(0).unwrap().is_none());
    }

    #[test]
    fn boundary_placement_is_transparent() {
        // same guide, two domain sizes: transparent tails make them agree
        let build = |extent: f64| {
            let h = 0.05;
            let nodes = (2.0 * extent / h).round() as usize;
            let eps: Vec<f64> = (0..nodes)
                .map(|i| {
                    let x = -extent + (i as f64 + 0.5) * h;
                    2.2f64.powi(2) + 0.05 * (-(x / 3.0).powi(2)).exp()
                })
                .collect();
            Slab { eps, step: h, op: Operator::Weighted, eps_first: 4.84, eps_last: 4.84 }
        };
        let a = build(20.0).solve(0).unwrap().unwrap().n2;
        let b = build(30.0).solve(0).unwrap().unwrap().n2;
        assert!((a - b).abs() < 1e-12);
    }
}
