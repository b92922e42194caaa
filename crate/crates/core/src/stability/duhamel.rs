use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{l2_norm, Grid1D};

/// Bound on the source norm `‖g(τ)‖ ≤ c₀ e^{-rate τ}` in the Duhamel tail.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SourceBound {
    None,
    Exponential { c0: f64, rate: f64 },
}

impl SourceBound {
    /// `∫_t^{T₁} e^{-λ(T₁-τ)} c₀ e^{-rate τ} dτ`.
    pub fn tail(&self, lambda: f64, t: f64, t_snap: f64) -> f64 {
        match *self {
            SourceBound::None => 0.0,
            SourceBound::Exponential { c0, rate } => {
                let k = lambda - rate;
                let span = t_snap - t;
                let integral = if (k * span).abs() < 1e-12 {
                    span
                } else {
                    ((k * t_snap).exp() - (k * t).exp()) / k
                };
                c0 * (-lambda * t_snap).exp() * integral
            }
        }
    }
}

/// Smallest `c₀` with `‖g(τ_j)‖ ≤ c₀ e^{-rate τ_j}` on the samples.
pub fn measure_source_bound(norms: &[f64], times: &[f64], rate: f64) -> SourceBound {
    let c0 = norms
        .iter()
        .zip(times)
        .map(|(n, t)| n * (rate * t).exp())
        .fold(0.0, f64::max);
    SourceBound::Exponential { c0, rate }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub t_snap: f64,
    pub lambda: f64,
    pub bound: SourceBound,
    /// `max_j (lhs − rhs_j)/rhs_j`; positive values are violations.
    pub worst_margin: f64,
    pub worst_time: f64,
    pub checks: usize,
}

impl DuhamelReport {
    pub fn holds_within(&self, slack: f64) -> bool {
        self.worst_margin <= slack
    }
}

/// Checks `‖w(T₁)‖ ≤ e^{-λ(T₁-t_j)}‖w(t_j)‖ + tail(t_j)` for every stored
/// `t_j < T₁`, where `states` samples `w = ∂_t v_N` at `times`.
pub fn duhamel_bound_check(
    states: &[Vec<f64>],
    times: &[f64],
    grid: &Grid1D,
    lambda: f64,
    t_snap: f64,
    bound: SourceBound,
) -> Result<DuhamelReport> {
    if states.len() != times.len() || states.is_empty() {
        return Err(LabError::InvalidInput("states and times must align".into()));
    }
    let j_snap = times
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - t_snap).abs().total_cmp(&(b.1 - t_snap).abs()))
        .map(|(j, _)| j)
        .unwrap_or(0);
    let t_snap = times[j_snap];
    let norms = states
        .iter()
        .map(|w| l2_norm(w, grid))
        .collect::<Result<Vec<f64>>>()?;
    let lhs = norms[j_snap];
    let mut worst_margin = 0.0f64;
    let mut worst_time = 0.0;
    let mut checks = 0;
    for j in 0..j_snap {
        let t = times[j];
        let rhs = (-lambda * (t_snap - t)).exp() * norms[j] + bound.tail(lambda, t, t_snap);
        checks += 1;
        let margin = if rhs > 0.0 {
            (lhs - rhs) / rhs
        } else if lhs > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if j == 0 || margin > worst_margin {
            worst_margin = margin;
            worst_time = t;
        }
    }
    Ok(DuhamelReport {
        t_snap,
        lambda,
        bound,
        worst_margin,
        worst_time,
        checks,
    })
}
