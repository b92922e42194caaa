//! Low end of the spectrum of a mode operator, and the fractional-power norms
//! built on it.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, LabError, Result};
use crate::grid::l2_inner;
use crate::spectral::ModeStack;
use crate::tridiag::{dot, SymTridiagonal};

use super::operator::ModeOperator;

/// The `k` smallest eigenpairs of a mode operator; eigenvectors are
/// orthonormal in the discrete L² product.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    pub h: f64,
    pub(crate) tri: SymTridiagonal,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn ground(&self) -> f64 {
        self.eigenvalues[0]
    }

    /// Is the whole spectrum resolved?
    pub fn complete(&self) -> bool {
        self.len() == self.tri.dim()
    }
}

/// Relative residual tolerance for every eigenpair.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// `k` smallest eigenpairs by Sturm bisection and inverse iteration.
pub fn eigendecompose(op: &ModeOperator, k: usize) -> Result<ModeSpectrum> {
    let n = op.dim();
    if k == 0 || k > n {
        return Err(LabError::InvalidInput(format!(
            "requested {k} eigenpairs of a {n}x{n} operator"
        )));
    }
    let tri = &op.tri;
    let h = op.grid.h;
    let eigenvalues: Vec<f64> = (0..k)
        .into_par_iter()
        .map(|j| tri.bisect_eigenvalue(j))
        .collect();
    let (lo, hi) = tri.gershgorin();
    // vectors of eigenvalues closer than this are re-orthogonalized
    let cluster = 1e-3 * hi.abs().max(lo.abs());
    let mut unit: Vec<Vec<f64>> = Vec::with_capacity(k);
    for (j, &lam) in eigenvalues.iter().enumerate() {
        let first = eigenvalues[..j].partition_point(|&mu| mu < lam - cluster);
        let v = tri.inverse_iteration(lam, &unit[first..]);
        let av = tri.apply(&v);
        let residual = av
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - lam * b).powi(2))
            .sum::<f64>()
            .sqrt();
        if !(residual <= RESIDUAL_TOL * lam.abs().max(1.0)) {
            return Err(LabError::NonConvergence { index: j, residual });
        }
        unit.push(v);
    }
    let scale = 1.0 / h.sqrt();
    let eigenvectors = unit
        .into_iter()
        .map(|v| v.into_iter().map(|x| x * scale).collect())
        .collect();
    Ok(ModeSpectrum {
        eigenvalues,
        eigenvectors,
        h,
        tri: tri.clone(),
    })
}

/// Default relative bound on the unresolved spectral tail.
pub const TAIL_TOL: f64 = 1e-8;

/// Squared contribution of one mode to `‖·‖²_{D(G^{s/2})}`, split into the
/// resolved head and a rigorous bound on the unresolved tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralSum {
    pub head: f64,
    pub tail: f64,
}

/// `Σ_k λ_k^s ⟨f, e_k⟩²` over the resolved pairs, plus the tail bound
/// `⟨r, G^m r⟩ λ_{k+1}^{s-m}` with `m = ⌈s⌉` and `r` the unresolved remainder.
pub fn spectral_sum(f: &[f64], s: f64, spec: &ModeSpectrum) -> Result<SpectralSum> {
    check_len(spec.tri.dim(), f.len())?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(LabError::InvalidInput(format!("s must be nonnegative, got {s}")));
    }
    let h = spec.h;
    let mut head = 0.0;
    let mut remainder = f.to_vec();
    for (lam, e) in spec.eigenvalues.iter().zip(&spec.eigenvectors) {
        let c = h * dot(f, e);
        head += lam.powf(s) * c * c;
        for (r, ei) in remainder.iter_mut().zip(e) {
            *r -= c * ei;
        }
    }
    if spec.complete() {
        return Ok(SpectralSum { head, tail: 0.0 });
    }
    let power = s.ceil() as u32;
    let energy = operator_energy(&spec.tri, &remainder, power) * h;
    let next = spec.tri.bisect_eigenvalue(spec.len());
    let tail = energy.max(0.0) * next.powf(s - power as f64);
    Ok(SpectralSum { head, tail })
}

/// Euclidean `⟨r, A^p r⟩`.
fn operator_energy(a: &SymTridiagonal, r: &[f64], p: u32) -> f64 {
    let mut left = r.to_vec();
    for _ in 0..p / 2 {
        left = a.apply(&left);
    }
    if p % 2 == 0 {
        dot(&left, &left)
    } else {
        dot(&left, &a.apply(&left))
    }
}

/// `‖u⁰‖_{D(G_γ^{s/2})}` by spectral calculus over the per-mode spectra
/// (`spectra[j]` belongs to `stack.n_indices[j]`).
pub fn fractional_norm(stack: &ModeStack, s: f64, spectra: &[ModeSpectrum]) -> Result<f64> {
    fractional_norm_with_tol(stack, s, spectra, TAIL_TOL)
}

pub fn fractional_norm_with_tol(
    stack: &ModeStack,
    s: f64,
    spectra: &[ModeSpectrum],
    tol: f64,
) -> Result<f64> {
    check_len(stack.modes.len(), spectra.len())?;
    let mut head = 0.0;
    let mut tail = 0.0;
    let mut worst = (0usize, 0.0f64);
    for ((&n, f), spec) in stack.n_indices.iter().zip(&stack.modes).zip(spectra) {
        let part = spectral_sum(f, s, spec)?;
        head += part.head;
        tail += part.tail;
        if part.tail > worst.1 {
            worst = (n, part.tail);
        }
    }
    if tail > tol * (head + tail) {
        return Err(LabError::InsufficientSpectralResolution {
            mode: worst.0,
            tail: tail / (head + tail),
            tolerance: tol,
        });
    }
    Ok(head.sqrt())
}

/// Fractional norm with per-mode spectra grown (doubling from `k0`) until the
/// tail bound passes; operators are indexed like `stack.n_indices`. Integer
/// `s` is evaluated as `⟨f, G^s f⟩`, which equals the full spectral sum.
pub fn fractional_norm_adaptive(
    stack: &ModeStack,
    s: f64,
    ops: &[ModeOperator],
    k0: usize,
) -> Result<f64> {
    check_len(stack.modes.len(), ops.len())?;
    if !(s >= 0.0 && s.is_finite()) {
        return Err(LabError::InvalidInput(format!("s must be nonnegative, got {s}")));
    }
    let mut head = 0.0;
    for (f, op) in stack.modes.iter().zip(ops) {
        check_len(op.dim(), f.len())?;
        if f.iter().all(|&v| v == 0.0) {
            continue;
        }
        if s.fract() == 0.0 {
            head += operator_energy(&op.tri, f, s as u32) * op.grid.h;
            continue;
        }
        let norm_sq = l2_inner(f, f, &op.grid)?;
        let mut k = k0.clamp(1, op.dim());
        loop {
            let spec = eigendecompose(op, k)?;
            let part = spectral_sum(f, s, &spec)?;
            let scale = part.head + part.tail;
            if part.tail <= TAIL_TOL * 0.5 * scale || spec.complete() || norm_sq == 0.0 {
                head += part.head;
                break;
            }
            k = (2 * k).min(op.dim());
        }
    }
    Ok(head.sqrt())
}
