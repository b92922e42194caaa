use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::error::{check_len, LabError, Result};
use crate::grid::{restrict_to, SubdomainSpec};
use crate::mode_pde::{assemble_operator, degeneracy_weight, ModeTrajectory};

/// Values of one mode and its time derivative at the snapshot time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSnapshot {
    pub u: Vec<f64>,
    pub du: Vec<f64>,
}

impl ModeSnapshot {
    /// Snapshot at the stored time closest to `t`.
    pub fn from_trajectory(traj: &ModeTrajectory, t: f64) -> Self {
        let j = traj.index_near(t);
        Self {
            u: traj.states[j].clone(),
            du: traj.dstates[j].clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Node indices of Ω₁'.
    pub start: usize,
    pub end: usize,
    /// Estimated `(b − b̃)(x)` on every grid node; zero outside Ω₁'.
    pub difference: Vec<f64>,
    /// `max |∂_t v + G̃ v + μ|x|^{2γ} (b−b̃) u|` over the whole grid with the
    /// estimate plugged in; nonzero only off Ω₁'.
    pub residual: f64,
}

/// Default relative denominator floor.
pub const DENOMINATOR_FLOOR: f64 = 1e-6;

/// Pointwise inversion of the mode-`N` difference equation written with the
/// known operator `G̃_N` (coefficient `b̃`):
/// `(b − b̃)(x) = −[∂_t v + G̃_N v](T₁, x) / (μ_N |x|^{2γ} u_N(T₁, x))` on Ω₁',
/// where `v = u − ũ`, `u` is measured and `ũ` solves the problem with `b̃`.
pub fn reconstruct_coefficient(
    measured: &ModeSnapshot,
    twin: &ModeSnapshot,
    btilde: &CoefficientField,
    mu_n: f64,
    gamma: f64,
    support: SubdomainSpec,
    eps_den: f64,
) -> Result<Reconstruction> {
    let grid = &btilde.grid;
    let n = grid.len();
    for v in [&measured.u, &measured.du, &twin.u, &twin.du] {
        check_len(n, v.len())?;
    }
    let op = assemble_operator(grid, gamma, mu_n, btilde)?;
    let v: Vec<f64> = measured.u.iter().zip(&twin.u).map(|(a, b)| a - b).collect();
    let gv = op.apply(&v);
    let numerator: Vec<f64> = (0..n)
        .map(|i| measured.du[i] - twin.du[i] + gv[i])
        .collect();

    let range = restrict_to(grid, support.interval());
    let u_max = measured.u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let floor = eps_den * u_max;
    let offending: Vec<usize> = range
        .clone()
        .filter(|&i| !(measured.u[i].abs() >= floor && measured.u[i] != 0.0))
        .collect();
    if !offending.is_empty() {
        let first_x = grid.nodes[offending[0]];
        return Err(LabError::DenominatorFloor {
            nodes: offending,
            first_x,
        });
    }

    let mut difference = vec![0.0; n];
    for i in range.clone() {
        let weight = mu_n * degeneracy_weight(grid.nodes[i], gamma);
        difference[i] = -numerator[i] / (weight * measured.u[i]);
    }
    let residual = (0..n)
        .map(|i| {
            let weight = mu_n * degeneracy_weight(grid.nodes[i], gamma);
            (numerator[i] + weight * difference[i] * measured.u[i]).abs()
        })
        .fold(0.0, f64::max);
    Ok(Reconstruction {
        start: range.start,
        end: range.end,
        difference,
        residual,
    })
}
