//! Small dense and tridiagonal linear-algebra helpers.

use nalgebra::SMatrix;
use num_complex::Complex64;

pub type C2 = SMatrix<Complex64, 2, 2>;
pub type C4 = SMatrix<Complex64, 4, 4>;

pub const J: Complex64 = Complex64::new(0.0, 1.0);

/// e^{jφ}.
pub fn cis(phi: f64) -> Complex64 {
    Complex64::from_polar(1.0, phi)
}

/// max |(U†U − I)ᵢⱼ|.
pub fn unitarity_residual<const N: usize>(u: &SMatrix<Complex64, N, N>) -> f64 {
    let p = u.adjoint() * u;
    let mut worst = 0.0f64;
    for i in 0..N {
        for j in 0..N {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((p[(i, j)] - target).norm());
        }
    }
    worst
}

/// Smallest entrywise distance between `a` and e^{jφ}·`b` over φ.
///
/// Returns the residual together with the fitted phase.
pub fn phase_aligned_residual<const N: usize>(
    a: &SMatrix<Complex64, N, N>,
    b: &SMatrix<Complex64, N, N>,
) -> (f64, f64) {
    let overlap = (b.adjoint() * a).trace();
    let phi = if overlap.norm() > 0.0 { overlap.arg() } else { 0.0 };
    let d = a - b * cis(phi);
    (d.iter().map(|z| z.norm()).fold(0.0, f64::max), phi)
}

pub fn max_abs_diff<const N: usize>(a: &SMatrix<Complex64, N, N>, b: &SMatrix<Complex64, N, N>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Real symmetric tridiagonal matrix.
#[derive(Debug, Clone)]
pub struct SymTridiag {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiag {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len());
        SymTridiag { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: f64) -> usize {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.diag.len() {
            if i > 0 {
                let e = self.off[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval containing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut r = 0.0;
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Sturm count below `x` together with the Newton step −f/f' for
    /// f(x) = det(T − xI), from the same LDLᵀ recurrence.
    fn count_and_step(&self, x: f64) -> (usize, f64) {
        let tiny = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        let mut dq = -1.0;
        let mut logd = 0.0;
        for i in 0..self.diag.len() {
            if i > 0 {
                let e2 = self.off[i - 1] * self.off[i - 1];
                let r = e2 / q;
                dq = -1.0 + r * dq / q;
                q = self.diag[i] - x - r;
            }
            if q == 0.0 {
                q = -tiny;
            }
            if q < 0.0 {
                count += 1;
            }
            logd += dq / q;
        }
        (count, -1.0 / logd)
    }

    /// The k-th largest eigenvalue (k = 0 is the largest) inside `[lo, hi]`,
    /// which must contain it, to an absolute accuracy `tol`. Newton steps on
    /// the characteristic polynomial, safeguarded by Sturm bisection.
    pub fn kth_largest_in(&self, k: usize, lo: f64, hi: f64, tol: f64) -> f64 {
        self.kth_largest_from(k, lo, hi, 0.5 * (lo + hi), tol)
    }

    fn kth_largest_from(&self, k: usize, mut lo: f64, mut hi: f64, start: f64, tol: f64) -> f64 {
        let n = self.len();
        // eigenvalue index from the bottom
        let target = n - 1 - k;
        let mut x = start;
        // a Newton step must at least halve the previous one, otherwise the
        // next point is a bisection (guards against slow far-field steps)
        let mut prev_step = f64::INFINITY;
        for _ in 0..400 {
            if hi - lo <= tol {
                break;
            }
            let (count, step) = self.count_and_step(x);
            if count > target {
                hi = x;
            } else {
                lo = x;
            }
            let next = x + step;
            if step.is_finite() && next > lo && next < hi && step.abs() < 0.5 * prev_step {
                if step.abs() <= tol {
                    // Newton may have locked onto a neighbour inside the bracket
                    let d = 2.0 * tol;
                    if self.count_below(next - d) <= target && self.count_below(next + d) > target {
                        return next;
                    }
                    prev_step = f64::INFINITY;
                    x = 0.5 * (lo + hi);
                    continue;
                }
                prev_step = step.abs();
                x = next;
            } else {
                prev_step = f64::INFINITY;
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                x = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Like [`Self::kth_largest_in`] but starts from a bracket of half-width
    /// `delta` around `guess`, falling back to Gershgorin bounds.
    pub fn kth_largest_near(&self, k: usize, guess: f64, delta: f64, tol: f64) -> f64 {
        let target = self.len() - 1 - k;
        let (lo, hi) = (guess - delta, guess + delta);
        if self.count_below(lo) <= target && self.count_below(hi) > target {
            self.kth_largest_from(k, lo, hi, guess, tol)
        } else {
            let (lo, hi) = self.bounds();
            self.kth_largest_from(k, lo, hi, guess.clamp(lo, hi), tol)
        }
    }

    pub fn kth_largest(&self, k: usize, tol: f64) -> f64 {
        let (lo, hi) = self.bounds();
        self.kth_largest_in(k, lo, hi, tol)
    }

    /// Eigenvector for a converged eigenvalue estimate, by inverse iteration.
    /// Normalized to unit Euclidean norm with a positive largest component.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let scale = self.diag.iter().map(|d| d.abs()).fold(1.0, f64::max);
        let shift = lambda + scale * 1e-13;
        let mut v = vec![1.0; n];
        for _ in 0..3 {
            v = self.solve_shifted(shift, &v);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= norm);
        }
        let imax = (0..n)
            .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).unwrap())
            .unwrap_or(0);
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }

    /// Solve (T − σI)x = b with partially pivoted Gaussian elimination.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - sigma;
            return vec![b[0] / if d == 0.0 { 1e-300 } else { d }];
        }
        // rows carry up to three nonzeros after pivoting: (d, u1, u2)
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - sigma).collect();
        let mut dl: Vec<f64> = self.off.clone();
        let mut du: Vec<f64> = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = 1e-300;
                }
                let f = dl[i] / d[i];
                d[i + 1] -= f * du[i];
                x[i + 1] -= f * x[i];
                if i < n - 2 {
                    du2[i] = 0.0;
                }
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                let tmp = d[i + 1];
                d[i + 1] = du[i] - f * tmp;
                du[i] = tmp;
                if i < n - 2 {
                    du2[i] = du[i + 1];
                    du[i + 1] = -f * du2[i];
                }
                x.swap(i, i + 1);
                x[i + 1] -= f * x[i];
            }
            dl[i] = 0.0;
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = 1e-300;
        }
        x[n - 1] /= d[n - 1];
        x[n - 2] = (x[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i];
        }
        x
    }
}
