use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{restrict_to, Grid1D, Interval};
use crate::mode_pde::ModeTrajectory;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackReport {
    pub t1: f64,
    pub t_late: f64,
    pub v: Interval,
    pub inf_late: f64,
    pub sup_early: f64,
    /// `inf_late / sup_early`; `+∞` (serialized as null) when `sup_early = 0`.
    pub ratio: f64,
    pub sup_vanishes: bool,
}

/// Empirical Harnack constant `inf_V u(T₁) / sup_V u(t₁)` of a caloric
/// trajectory stored on `grid` (the domain U).
pub fn harnack_ratio(
    traj: &ModeTrajectory,
    grid: &Grid1D,
    v: Interval,
    t1: f64,
    t_late: f64,
) -> Result<HarnackReport> {
    if !(t1 > 0.0 && t1 <= t_late) {
        return Err(LabError::InvalidInput(format!(
            "need 0 < t1 <= T1, got t1 = {t1}, T1 = {t_late}"
        )));
    }
    if !(v.lo > grid.a && v.hi < grid.b) {
        return Err(LabError::InvalidInput(
            "V must be compactly contained in U".into(),
        ));
    }
    let range = restrict_to(grid, v);
    if range.is_empty() {
        return Err(LabError::InvalidInput("V contains no grid nodes".into()));
    }
    let early = &traj.states[traj.index_near(t1)][range.clone()];
    let late = &traj.states[traj.index_near(t_late)][range];
    let sup_early = early.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let inf_late = late.iter().copied().fold(f64::INFINITY, f64::min);
    let sup_vanishes = sup_early <= 0.0;
    let ratio = if sup_vanishes {
        f64::INFINITY
    } else {
        inf_late / sup_early
    };
    Ok(HarnackReport {
        t1,
        t_late,
        v,
        inf_late,
        sup_early,
        ratio,
        sup_vanishes,
    })
}
