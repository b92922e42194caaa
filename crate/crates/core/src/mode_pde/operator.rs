use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::error::{check_len, LabError, Result};
use crate::grid::Grid1D;
use crate::tridiag::SymTridiagonal;

/// Central-difference discretization of `-d²/dx² + μ_n |x|^{2γ} b(x)` with
/// homogeneous Dirichlet conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    pub grid: Grid1D,
    pub gamma: f64,
    pub mu_n: f64,
    /// Nodal potential `μ_n |x_i|^{2γ} b(x_i)`.
    pub potential: Vec<f64>,
    pub tri: SymTridiagonal,
}

/// Time-stepping scheme of the θ-family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    CrankNicolson,
    BackwardEuler,
}

impl Scheme {
    pub fn theta(self) -> f64 {
        match self {
            Scheme::CrankNicolson => 0.5,
            Scheme::BackwardEuler => 1.0,
        }
    }
}

/// `|x|^{2γ}`, with `0^{2γ} = 0`.
pub fn degeneracy_weight(x: f64, gamma: f64) -> f64 {
    x.abs().powf(2.0 * gamma)
}

pub fn assemble_operator(
    grid: &Grid1D,
    gamma: f64,
    mu_n: f64,
    coeff: &CoefficientField,
) -> Result<ModeOperator> {
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(LabError::InvalidInput(format!(
            "gamma must lie in (0, 1], got {gamma}"
        )));
    }
    if !(mu_n >= 0.0 && mu_n.is_finite()) {
        return Err(LabError::InvalidInput(format!(
            "mu_n must be nonnegative, got {mu_n}"
        )));
    }
    check_len(grid.len(), coeff.samples.len())?;
    let potential = grid
        .nodes
        .iter()
        .zip(&coeff.samples)
        .map(|(&x, &b)| mu_n * degeneracy_weight(x, gamma) * b)
        .collect();
    let mut op = ModeOperator::from_potential(grid, potential)?;
    op.gamma = gamma;
    op.mu_n = mu_n;
    Ok(op)
}

impl ModeOperator {
    /// `-d²/dx² + V` for an arbitrary nonnegative nodal potential `V`; used for
    /// control runs. `gamma` and `mu_n` are left at zero.
    pub fn from_potential(grid: &Grid1D, potential: Vec<f64>) -> Result<Self> {
        check_len(grid.len(), potential.len())?;
        if potential.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
            return Err(LabError::InvalidInput(
                "potential must be finite and nonnegative".into(),
            ));
        }
        let inv_h2 = 1.0 / (grid.h * grid.h);
        let diag = potential.iter().map(|v| 2.0 * inv_h2 + v).collect();
        let off = vec![-inv_h2; grid.len().saturating_sub(1)];
        Ok(Self {
            grid: grid.clone(),
            gamma: 0.0,
            mu_n: 0.0,
            potential,
            tri: SymTridiagonal::new(diag, off)?,
        })
    }

    /// Pure Dirichlet Laplacian `-d²/dx²` on `grid`.
    pub fn laplacian(grid: &Grid1D) -> Result<Self> {
        Self::from_potential(grid, vec![0.0; grid.len()])
    }

    pub fn dim(&self) -> usize {
        self.tri.dim()
    }

    pub fn diag(&self) -> &[f64] {
        &self.tri.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.tri.off
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.tri.apply(v)
    }

    /// Smallest eigenvalue by Sturm bisection.
    pub fn smallest_eigenvalue(&self) -> f64 {
        self.tri.bisect_eigenvalue(0)
    }
}
