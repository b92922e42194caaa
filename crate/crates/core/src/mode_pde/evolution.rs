//! θ-scheme integration of `∂_t u + G u = g` for one Fourier mode.

use crate::error::{check_len, LabError, Result};
use crate::grid::l2_norm;

use super::operator::{ModeOperator, Scheme};

/// Right-hand side `g(t, x)` of a mode equation.
#[derive(Clone, Copy)]
pub enum Source<'a> {
    Zero,
    /// Closed-form `g(t, x)`.
    Fn(&'a (dyn Fn(f64, f64) -> f64 + Sync)),
    /// Samples at the step times `t_j = j dt`, `j = 0..=n_steps`.
    Samples(&'a [Vec<f64>]),
}

impl Source<'_> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }

    fn fill(&self, j: usize, t: f64, nodes: &[f64], out: &mut [f64]) -> Result<()> {
        match self {
            Source::Zero => out.iter_mut().for_each(|v| *v = 0.0),
            Source::Fn(f) => {
                for (o, &x) in out.iter_mut().zip(nodes) {
                    *o = f(t, x);
                }
            }
            Source::Samples(s) => {
                let row = s.get(j).ok_or_else(|| {
                    LabError::InvalidInput(format!("source has no sample for step {j}"))
                })?;
                check_len(out.len(), row.len())?;
                out.copy_from_slice(row);
            }
        }
        Ok(())
    }
}

/// Stored states of one mode; `dstates` holds the semi-discrete time
/// derivative `-G u_j + g_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeTrajectory {
    pub dt: f64,
    pub scheme: Scheme,
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub dstates: Vec<Vec<f64>>,
    pub source: Option<Vec<Vec<f64>>>,
}

impl ModeTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the stored time closest to `t`.
    pub fn index_near(&self, t: f64) -> usize {
        let mut best = 0;
        for (j, &tj) in self.times.iter().enumerate() {
            if (tj - t).abs() < (self.times[best] - t).abs() {
                best = j;
            }
        }
        best
    }

    pub fn last_state(&self) -> &[f64] {
        &self.states[self.states.len() - 1]
    }
}

/// One θ-step: `(I + θ dt G) u⁺ = (I - (1-θ) dt G) u + dt (θ g⁺ + (1-θ) g)`.
pub fn step_mode(
    state: &[f64],
    op: &ModeOperator,
    g_now: &[f64],
    g_next: &[f64],
    dt: f64,
    scheme: Scheme,
) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(LabError::InvalidInput(format!("dt must be positive, got {dt}")));
    }
    let n = op.dim();
    check_len(n, state.len())?;
    check_len(n, g_now.len())?;
    check_len(n, g_next.len())?;
    let theta = scheme.theta();
    let mut rhs = state.to_vec();
    if theta < 1.0 {
        let au = op.apply(state);
        for (r, a) in rhs.iter_mut().zip(&au) {
            *r -= (1.0 - theta) * dt * a;
        }
    }
    for i in 0..n {
        rhs[i] += dt * (theta * g_next[i] + (1.0 - theta) * g_now[i]);
    }
    let next = op.tri.solve_shifted(1.0, theta * dt, &rhs)?;
    if next.iter().any(|v| !v.is_finite()) {
        return Err(LabError::InvalidInput("non-finite state after step".into()));
    }
    Ok(next)
}

/// Step count and effective step for horizon `t_final` and nominal step `dt`.
pub fn step_plan(t_final: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(LabError::InvalidInput(format!(
            "horizon must be positive, got {t_final}"
        )));
    }
    if !(dt > 0.0 && dt <= t_final) {
        return Err(LabError::InvalidInput(format!(
            "need 0 < dt <= T, got dt = {dt}, T = {t_final}"
        )));
    }
    let n = (t_final / dt - 1e-9).ceil().max(1.0) as usize;
    Ok((n, t_final / n as f64))
}

/// Integrates from `u0` to `t_final`, calling `visit(j, t_j, u_j, g_j)` at
/// every step including `j = 0`.
pub fn integrate_mode(
    u0: &[f64],
    source: Source<'_>,
    op: &ModeOperator,
    t_final: f64,
    dt: f64,
    scheme: Scheme,
    mut visit: impl FnMut(usize, f64, &[f64], &[f64]),
) -> Result<f64> {
    check_len(op.dim(), u0.len())?;
    let (n_steps, dt) = step_plan(t_final, dt)?;
    let nodes = &op.grid.nodes;
    let mut g_now = vec![0.0; u0.len()];
    let mut g_next = vec![0.0; u0.len()];
    source.fill(0, 0.0, nodes, &mut g_now)?;
    let mut state = u0.to_vec();
    visit(0, 0.0, &state, &g_now);
    for j in 1..=n_steps {
        let t = j as f64 * dt;
        source.fill(j, t, nodes, &mut g_next)?;
        state = step_mode(&state, op, &g_now, &g_next, dt, scheme)?;
        visit(j, t, &state, &g_next);
        std::mem::swap(&mut g_now, &mut g_next);
    }
    Ok(dt)
}

/// Full trajectory on `[0, t_final]` with time derivatives filled in.
pub fn solve_mode(
    u0: &[f64],
    source: Source<'_>,
    op: &ModeOperator,
    t_final: f64,
    dt: f64,
    scheme: Scheme,
) -> Result<ModeTrajectory> {
    let keep_source = !source.is_zero();
    let mut times = Vec::new();
    let mut states = Vec::new();
    let mut sources = Vec::new();
    let dt = integrate_mode(u0, source, op, t_final, dt, scheme, |_, t, u, g| {
        times.push(t);
        states.push(u.to_vec());
        if keep_source {
            sources.push(g.to_vec());
        }
    })?;
    let mut traj = ModeTrajectory {
        dt,
        scheme,
        times,
        states,
        dstates: Vec::new(),
        source: keep_source.then_some(sources),
    };
    traj.dstates = time_derivative(&traj, op)?;
    Ok(traj)
}

/// `∂_t u_j = -G u_j + g_j`, the semi-discrete derivative along the trajectory.
pub fn time_derivative(traj: &ModeTrajectory, op: &ModeOperator) -> Result<Vec<Vec<f64>>> {
    if let Some(src) = &traj.source {
        check_len(traj.states.len(), src.len())?;
    }
    traj.states
        .iter()
        .enumerate()
        .map(|(j, u)| {
            check_len(op.dim(), u.len())?;
            let mut d = op.apply(u);
            d.iter_mut().for_each(|v| *v = -*v);
            if let Some(src) = &traj.source {
                for (di, gi) in d.iter_mut().zip(&src[j]) {
                    *di += gi;
                }
            }
            Ok(d)
        })
        .collect()
}

/// Solves the differentiated problem `∂_t w + G w = ∂_t g`, `w(0) = -G u₀ + g(0)`
/// with the trajectory's scheme and returns `max_j ‖w_j - dstates_j‖_{L²}`.
pub fn time_derivative_discrepancy(
    traj: &ModeTrajectory,
    op: &ModeOperator,
    dsource: Source<'_>,
) -> Result<f64> {
    if traj.dstates.is_empty() {
        return Err(LabError::InvalidInput("trajectory has no derivatives".into()));
    }
    let t_final = traj.times[traj.len() - 1];
    let w0 = traj.dstates[0].clone();
    let mut worst: f64 = 0.0;
    let mut failure = None;
    integrate_mode(&w0, dsource, op, t_final, traj.dt, traj.scheme, |j, _, w, _| {
        match traj.dstates.get(j) {
            Some(d) => {
                let diff: Vec<f64> = w.iter().zip(d).map(|(a, b)| a - b).collect();
                worst = worst.max(l2_norm(&diff, &op.grid).unwrap_or(f64::INFINITY));
            }
            None => failure = Some(j),
        }
    })?;
    if let Some(j) = failure {
        return Err(LabError::InvalidInput(format!(
            "differentiated solve produced step {j} beyond the trajectory"
        )));
    }
    Ok(worst)
}
