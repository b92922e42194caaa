//! Symmetric tridiagonal matrices: products, Thomas elimination, Sturm-sequence
//! bisection, and inverse iteration.

use crate::error::{check_len, LabError, Result};

/// Symmetric tridiagonal matrix stored as its diagonal and single off-diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(LabError::InvalidInput("empty tridiagonal matrix".into()));
        }
        check_len(diag.len() - 1, off.len())?;
        Ok(Self { diag, off })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// `out = A x`.
    pub fn apply_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.dim();
        debug_assert_eq!(x.len(), n);
        debug_assert_eq!(out.len(), n);
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * x[i + 1];
            }
            out[i] = acc;
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.apply_into(x, &mut out);
        out
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots of `A - x I`).
    pub fn sturm_count(&self, x: f64) -> usize {
        let guard = f64::MIN_POSITIVE.sqrt();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let q_safe = if q.abs() < guard { guard.copysign(q) } else { q };
                q = (self.diag[i] - x) - self.off[i - 1] * self.off[i - 1] / q_safe;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
    pub fn bisect_eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = 1e-12 * (hi.abs() + lo.abs()).max(1.0);
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(f64::MIN_POSITIVE) {
                break;
            }
            if self.sturm_count(mid) <= k {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(alpha I + beta A) x = rhs` by Thomas elimination.
    pub fn solve_shifted(&self, alpha: f64, beta: f64, rhs: &[f64]) -> Result<Vec<f64>> {
        let n = self.dim();
        check_len(n, rhs.len())?;
        let mut c = vec![0.0; n];
        let mut x = vec![0.0; n];
        let mut denom = alpha + beta * self.diag[0];
        if denom == 0.0 || !denom.is_finite() {
            return Err(LabError::SingularSystem { row: 0 });
        }
        if n > 1 {
            c[0] = beta * self.off[0] / denom;
        }
        x[0] = rhs[0] / denom;
        for i in 1..n {
            let sub = beta * self.off[i - 1];
            denom = alpha + beta * self.diag[i] - sub * c[i - 1];
            if denom == 0.0 || !denom.is_finite() {
                return Err(LabError::SingularSystem { row: i });
            }
            if i + 1 < n {
                c[i] = beta * self.off[i] / denom;
            }
            x[i] = (rhs[i] - sub * x[i - 1]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] -= c[i] * x[i + 1];
        }
        Ok(x)
    }

    /// Eigenvector for an accurate eigenvalue estimate `lambda` by inverse
    /// iteration, orthogonalized against `previous` (Euclidean unit vectors
    /// belonging to nearby eigenvalues).
    pub fn inverse_iteration(&self, lambda: f64, previous: &[Vec<f64>]) -> Vec<f64> {
        let n = self.dim();
        let (lo, hi) = self.gershgorin();
        let scale = hi.abs().max(lo.abs()).max(1.0);
        let tiny = f64::EPSILON * scale;
        // deterministic, non-degenerate start vector
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.5 * ((i as f64 * 0.618_033_988_75).fract() - 0.5))
            .collect();
        normalize(&mut v);
        for _ in 0..4 {
            let mut w = shifted_solve_guarded(self, lambda, &v, tiny);
            for p in previous {
                let d = dot(&w, p);
                for (wi, pi) in w.iter_mut().zip(p) {
                    *wi -= d * pi;
                }
            }
            normalize(&mut w);
            v = w;
        }
        for p in previous {
            let d = dot(&v, p);
            for (vi, pi) in v.iter_mut().zip(p) {
                *vi -= d * pi;
            }
        }
        normalize(&mut v);
        // fix the sign so the largest-magnitude entry is positive
        let imax = v
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > v[best].abs() { i } else { best });
        if v[imax] < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        v
    }
}

/// Thomas elimination of `(A - shift I) x = rhs` with tiny pivots replaced by
/// `tiny`, as required when the shift is an eigenvalue.
fn shifted_solve_guarded(a: &SymTridiagonal, shift: f64, rhs: &[f64], tiny: f64) -> Vec<f64> {
    let n = a.dim();
    let guard = |d: f64| if d.abs() < tiny { tiny.copysign(d) } else { d };
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut denom = guard(a.diag[0] - shift);
    if n > 1 {
        c[0] = a.off[0] / denom;
    }
    x[0] = rhs[0] / denom;
    for i in 1..n {
        denom = guard(a.diag[i] - shift - a.off[i - 1] * c[i - 1]);
        if i + 1 < n {
            c[i] = a.off[i] / denom;
        }
        x[i] = (rhs[i] - a.off[i - 1] * x[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    x
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) {
    let n = dot(v, v).sqrt();
    if n > 0.0 && n.is_finite() {
        v.iter_mut().for_each(|x| *x /= n);
    }
}
