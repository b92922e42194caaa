//! Dirichlet heat flow on the interior subdomain, advanced by backward Euler.

use crate::error::{check_len, LabError, Result};
use crate::grid::Grid1D;

use super::evolution::{integrate_mode, step_plan, Source};
use super::operator::{ModeOperator, Scheme};

/// Largest backward-Euler substep used by [`heat_semigroup_subdomain`].
pub const DEFAULT_HEAT_DT: f64 = 1e-4;

/// `e^{tΔ}φ₀` on `subgrid` with Dirichlet conditions, using backward-Euler
/// substeps of at most `max_dt`.
pub fn heat_semigroup_subdomain(
    phi0: &[f64],
    t: f64,
    subgrid: &Grid1D,
    max_dt: f64,
) -> Result<Vec<f64>> {
    check_len(subgrid.len(), phi0.len())?;
    if t < 0.0 || !t.is_finite() {
        return Err(LabError::InvalidInput(format!(
            "heat flow time must be nonnegative, got {t}"
        )));
    }
    if t == 0.0 {
        return Ok(phi0.to_vec());
    }
    let op = ModeOperator::laplacian(subgrid)?;
    let dt = max_dt.min(t);
    let mut last = phi0.to_vec();
    integrate_mode(phi0, Source::Zero, &op, t, dt, Scheme::BackwardEuler, |_, _, u, _| {
        last.copy_from_slice(u);
    })?;
    Ok(last)
}

/// Heat-flow history `e^{t_jΔ}φ₀` at `t_j = j dt`, `j = 0..=n_steps`, with a
/// fixed backward-Euler step; used where the stepping must match another run.
pub fn heat_history(phi0: &[f64], t_final: f64, dt: f64, subgrid: &Grid1D) -> Result<Vec<Vec<f64>>> {
    check_len(subgrid.len(), phi0.len())?;
    step_plan(t_final, dt)?;
    let op = ModeOperator::laplacian(subgrid)?;
    let mut out = Vec::new();
    integrate_mode(phi0, Source::Zero, &op, t_final, dt, Scheme::BackwardEuler, |_, _, u, _| {
        out.push(u.to_vec());
    })?;
    Ok(out)
}
