//! Dirichlet sine basis on Ω₂ = (0, L₂) and the Fourier-mode split of fields
//! `v(x, y)` into components `v_n(x)`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, LabError, Result};

/// Eigenpairs `μ_n = (nπ/L₂)²`, `φ_n = √(2/L₂) sin(nπy/L₂)` of `-d²/dy²` with
/// Dirichlet conditions, sampled on a uniform trapezoid rule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralBasisY {
    pub l2: f64,
    pub n_max: usize,
    pub mu: Vec<f64>,
    /// `phi[n-1][q] = φ_n(y_q)`.
    pub phi: Vec<Vec<f64>>,
    pub y_nodes: Vec<f64>,
    pub y_weights: Vec<f64>,
}

pub fn build_basis(l2: f64, n_max: usize, n_y_quad: usize) -> Result<SpectralBasisY> {
    if !(l2 > 0.0 && l2.is_finite()) {
        return Err(LabError::InvalidInput(format!(
            "L2 must be positive, got {l2}"
        )));
    }
    if n_max == 0 {
        return Err(LabError::InvalidInput("N_max must be at least 1".into()));
    }
    let required = 4 * n_max;
    if n_y_quad < required {
        return Err(LabError::Aliasing {
            n_quad: n_y_quad,
            n_max,
            required,
        });
    }
    // trapezoid on n_y_quad cells; the endpoint samples vanish and are dropped
    let dy = l2 / n_y_quad as f64;
    let y_nodes: Vec<f64> = (1..n_y_quad).map(|q| q as f64 * dy).collect();
    let y_weights = vec![dy; y_nodes.len()];
    let amp = (2.0 / l2).sqrt();
    let mu = (1..=n_max).map(|n| (n as f64 * PI / l2).powi(2)).collect();
    let phi = (1..=n_max)
        .map(|n| {
            (1..n_y_quad)
                .map(|q| amp * (PI * (n * q) as f64 / n_y_quad as f64).sin())
                .collect()
        })
        .collect();
    Ok(SpectralBasisY {
        l2,
        n_max,
        mu,
        phi,
        y_nodes,
        y_weights,
    })
}

impl SpectralBasisY {
    /// Eigenvalue of mode `n` (1-based).
    pub fn mu_n(&self, n: usize) -> f64 {
        self.mu[n - 1]
    }

    pub fn phi_n(&self, n: usize) -> &[f64] {
        &self.phi[n - 1]
    }

    pub fn n_y(&self) -> usize {
        self.y_nodes.len()
    }

    fn check_mode(&self, n: usize) -> Result<()> {
        if n == 0 || n > self.n_max {
            return Err(LabError::InvalidInput(format!(
                "mode {n} outside 1..={}",
                self.n_max
            )));
        }
        Ok(())
    }
}

/// Samples on the tensor grid `x_i × y_q`, stored x-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Field2D {
    pub nx: usize,
    pub ny: usize,
    pub data: Vec<f64>,
}

impl Field2D {
    pub fn zeros(nx: usize, ny: usize) -> Self {
        Self {
            nx,
            ny,
            data: vec![0.0; nx * ny],
        }
    }

    pub fn from_fn(x: &[f64], y: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(x.len() * y.len());
        for &xi in x {
            for &yq in y {
                data.push(f(xi, yq));
            }
        }
        Self {
            nx: x.len(),
            ny: y.len(),
            data,
        }
    }

    pub fn get(&self, i: usize, q: usize) -> f64 {
        self.data[i * self.ny + q]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.ny..(i + 1) * self.ny]
    }
}

/// Fourier components `v_n(x)` for the retained indices `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeStack {
    pub basis: Arc<SpectralBasisY>,
    pub n_indices: Vec<usize>,
    pub modes: Vec<Vec<f64>>,
}

impl ModeStack {
    pub fn new(basis: Arc<SpectralBasisY>, n_indices: Vec<usize>, modes: Vec<Vec<f64>>) -> Result<Self> {
        check_len(n_indices.len(), modes.len())?;
        for &n in &n_indices {
            basis.check_mode(n)?;
        }
        if let Some(first) = modes.first() {
            for m in &modes {
                check_len(first.len(), m.len())?;
            }
        }
        Ok(Self {
            basis,
            n_indices,
            modes,
        })
    }

    /// Stack holding a single mode `n` with profile `f`.
    pub fn single(basis: Arc<SpectralBasisY>, n: usize, f: Vec<f64>) -> Result<Self> {
        Self::new(basis, vec![n], vec![f])
    }

    pub fn nx(&self) -> usize {
        self.modes.first().map_or(0, Vec::len)
    }

    /// Component of mode `n`, if retained.
    pub fn mode(&self, n: usize) -> Option<&[f64]> {
        self.n_indices
            .iter()
            .position(|&k| k == n)
            .map(|j| self.modes[j].as_slice())
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            basis: Arc::clone(&self.basis),
            n_indices: self.n_indices.clone(),
            modes: self
                .modes
                .iter()
                .map(|m| m.iter().map(|v| c * v).collect())
                .collect(),
        }
    }
}

/// `v_n(x_i) = Σ_q w_q v(x_i, y_q) φ_n(y_q)` for every `n` in `n_indices`.
pub fn project(v: &Field2D, basis: &Arc<SpectralBasisY>, n_indices: &[usize]) -> Result<ModeStack> {
    check_len(basis.n_y(), v.ny)?;
    for &n in n_indices {
        basis.check_mode(n)?;
    }
    let modes = n_indices
        .par_iter()
        .map(|&n| {
            let phi = basis.phi_n(n);
            (0..v.nx)
                .map(|i| {
                    v.row(i)
                        .iter()
                        .zip(phi)
                        .zip(&basis.y_weights)
                        .map(|((vq, pq), wq)| wq * vq * pq)
                        .sum()
                })
                .collect()
        })
        .collect();
    ModeStack::new(Arc::clone(basis), n_indices.to_vec(), modes)
}

/// Projection onto all modes `1..=N_max`.
pub fn project_all(v: &Field2D, basis: &Arc<SpectralBasisY>) -> Result<ModeStack> {
    let all: Vec<usize> = (1..=basis.n_max).collect();
    project(v, basis, &all)
}

/// Truncated eigen-expansion `v(x_i, y_q) = Σ_n v_n(x_i) φ_n(y_q)`.
pub fn synthesize(stack: &ModeStack) -> Result<Field2D> {
    if stack.modes.is_empty() {
        return Err(LabError::InvalidInput("cannot synthesize an empty stack".into()));
    }
    let basis = &stack.basis;
    let mut out = Field2D::zeros(stack.nx(), basis.n_y());
    for (&n, mode) in stack.n_indices.iter().zip(&stack.modes) {
        let phi = basis.phi_n(n);
        for (i, &a) in mode.iter().enumerate() {
            let row = &mut out.data[i * out.ny..(i + 1) * out.ny];
            for (r, p) in row.iter_mut().zip(phi) {
                *r += a * p;
            }
        }
    }
    Ok(out)
}
