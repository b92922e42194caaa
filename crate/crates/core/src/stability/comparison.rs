use serde::{Deserialize, Serialize};

use crate::error::{check_len, LabError, Result};
use crate::grid::{restrict_to, Grid1D, SubdomainSpec};
use crate::mode_pde::{degeneracy_weight, heat_history, ModeTrajectory, Scheme};

/// Lower-bound margin `min (ũ_N − ν_N)` over stored times and Ω₁' nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub min_margin: f64,
    pub worst_time: f64,
    /// `max |ũ_N|` over the trajectory.
    pub scale: f64,
    /// Damping rate `μ_N δ^{2γ} m` of the sub-solution.
    pub rate: f64,
    pub certified: bool,
}

/// Relative tolerance used for the comparison certificate.
pub const COMPARISON_TOL: f64 = 1e-8;

/// Compares a backward-Euler trajectory `ũ_N` with the sub-solution
/// `ν_N(t) = e^{-μ_N δ^{2γ} m t} e^{tΔ_{Ω₁'}} u⁰_N`, stepped with the same `dt`.
pub fn comparison_lower_bound(
    utilde: &ModeTrajectory,
    u0_n: &[f64],
    mu_n: f64,
    m: f64,
    gamma: f64,
    grid: &Grid1D,
    support: SubdomainSpec,
) -> Result<ComparisonReport> {
    if utilde.scheme != Scheme::BackwardEuler {
        return Err(LabError::SchemeNotPositive);
    }
    check_len(grid.len(), u0_n.len())?;
    if u0_n.iter().any(|&v| v < 0.0) {
        return Err(LabError::InvalidInput(
            "comparison needs nonnegative initial data".into(),
        ));
    }
    let range = restrict_to(grid, support.interval());
    let sub = grid.subgrid(range.clone())?;
    let rate = mu_n * degeneracy_weight(support.delta, gamma) * m;
    let t_final = utilde.times[utilde.len() - 1];
    let heat = heat_history(&u0_n[range.clone()], t_final, utilde.dt, &sub)?;
    check_len(utilde.len(), heat.len())?;

    let mut min_margin = f64::INFINITY;
    let mut worst_time = 0.0;
    let mut scale: f64 = 0.0;
    for ((state, flowed), &t) in utilde.states.iter().zip(&heat).zip(&utilde.times) {
        scale = state.iter().fold(scale, |acc, v| acc.max(v.abs()));
        let damp = (-rate * t).exp();
        for (u, w) in state[range.clone()].iter().zip(flowed) {
            let margin = u - damp * w;
            if margin < min_margin {
                min_margin = margin;
                worst_time = t;
            }
        }
    }
    Ok(ComparisonReport {
        min_margin,
        worst_time,
        scale,
        rate,
        certified: min_margin >= -COMPARISON_TOL * scale,
    })
}
