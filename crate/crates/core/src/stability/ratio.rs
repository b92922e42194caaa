use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::eigen_analysis::carleman_exponent;
use crate::error::{check_len, LabError, Result};
use crate::grid::{restrict_to, Interval, SubdomainSpec};
use crate::mode_pde::{
    assemble_operator, degeneracy_weight, step_mode, step_plan, Scheme,
};
use crate::spectral::ModeStack;

use super::membership::{check_class_membership, initial_data_norm, ClassMembershipReport, ClassParams};

/// Class constants enforced on `ũ⁰` before a ratio is computed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassCheck {
    pub k1: f64,
    pub t1: f64,
}

/// One twin experiment: `(b, u⁰)` against `(b̃, ũ⁰)`.
#[derive(Debug, Clone)]
pub struct StabilityInput<'a> {
    pub b: &'a CoefficientField,
    pub btilde: &'a CoefficientField,
    pub u0: &'a ModeStack,
    pub u0tilde: &'a ModeStack,
    pub support: SubdomainSpec,
    pub n: usize,
    pub t_final: f64,
    pub t_snap: f64,
    pub omega1: Interval,
    pub gamma: f64,
    pub s: f64,
    pub dt: f64,
    pub scheme: Scheme,
    pub class: Option<ClassCheck>,
    pub seed: u64,
}

/// Both sides of the Lipschitz stability estimate for one experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub n: usize,
    pub gamma: f64,
    pub t_final: f64,
    pub t_snap: f64,
    /// `∫_{Ω₁'} (b − b̃)²`.
    pub lhs: f64,
    /// `∫_{Ω₁'} |x|^{4γ} (b − b̃)²`.
    pub lhs_weighted: f64,
    /// `∫₀ᵀ ∫_ω |∂_t(u − ũ)|²`.
    pub obs_term: f64,
    /// `∫_{Ω₁'×Ω₂} |G_γ(u − ũ)(T₁)|²` with the operator of `b`.
    pub snapshot_term: f64,
    /// `‖ũ⁰‖²_{D(G_γ^{s/2})}`.
    pub norm_sq: f64,
    /// `‖u⁰‖²_{D(G_γ^{s/2})}`, logged for comparison.
    pub norm_sq_u0: f64,
    pub ratio: f64,
    pub lambda_n: f64,
    pub p_gamma: f64,
    pub seed: u64,
    pub membership: Option<ClassMembershipReport>,
}

struct ModeTerms {
    obs: f64,
    snapshot: f64,
}

/// Runs both systems mode by mode and evaluates the terms of the estimate.
/// The observation integral collapses to a mode sum because `ω = ω₁ × Ω₂`.
pub fn stability_ratio(input: &StabilityInput<'_>) -> Result<StabilityReport> {
    let grid = &input.b.grid;
    check_len(grid.len(), input.btilde.samples.len())?;
    if !(input.t_snap > 0.0 && input.t_snap < input.t_final) {
        return Err(LabError::InvalidInput(format!(
            "need 0 < T1 < T, got T1 = {}, T = {}",
            input.t_snap, input.t_final
        )));
    }
    let basis = &input.u0tilde.basis;

    let membership = match input.class {
        Some(check) => {
            let params = ClassParams {
                n: input.n,
                k1: check.k1,
                t1: check.t1,
                t_snap: input.t_snap,
                s: input.s,
                m: input.btilde.m,
                gamma: input.gamma,
            };
            let report = check_class_membership(input.u0tilde, input.btilde, input.support, &params)?;
            if !report.member {
                return Err(LabError::NotInClass(format!(
                    "mode {}: sup of heat flow {:e} < required {:e} (K1_max = {:e})",
                    input.n, report.lhs, report.rhs, report.k1_max
                )));
            }
            Some(report)
        }
        None => None,
    };

    let diff = input.b.difference(input.btilde)?;
    let sub = restrict_to(grid, input.support.interval());
    let lhs = grid.h * sub.clone().map(|i| diff[i] * diff[i]).sum::<f64>();
    let lhs_weighted = grid.h
        * sub
            .clone()
            .map(|i| degeneracy_weight(grid.nodes[i], 2.0 * input.gamma) * diff[i] * diff[i])
            .sum::<f64>();

    let norm_sq = initial_data_norm(input.u0tilde, input.btilde, input.gamma, input.s)?.powi(2);
    let norm_sq_u0 = initial_data_norm(input.u0, input.b, input.gamma, input.s)?.powi(2);

    let modes: Vec<usize> = input
        .u0
        .n_indices
        .iter()
        .chain(&input.u0tilde.n_indices)
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let terms = modes
        .par_iter()
        .map(|&n| mode_terms(input, n))
        .collect::<Result<Vec<Option<ModeTerms>>>>()?;
    let (obs_term, snapshot_term) = terms
        .iter()
        .flatten()
        .fold((0.0, 0.0), |(o, s), t| (o + t.obs, s + t.snapshot));

    let rhs = obs_term + snapshot_term;
    let ratio = if lhs == 0.0 {
        0.0
    } else if rhs > 0.0 {
        lhs * norm_sq / rhs
    } else {
        return Err(LabError::StabilityViolationCandidate { lhs });
    };

    let op_n = assemble_operator(grid, input.gamma, basis.mu_n(input.n), input.b)?;
    Ok(StabilityReport {
        n: input.n,
        gamma: input.gamma,
        t_final: input.t_final,
        t_snap: input.t_snap,
        lhs,
        lhs_weighted,
        obs_term,
        snapshot_term,
        norm_sq,
        norm_sq_u0,
        ratio,
        lambda_n: op_n.smallest_eigenvalue(),
        p_gamma: carleman_exponent(input.gamma),
        seed: input.seed,
        membership,
    })
}

fn mode_terms(input: &StabilityInput<'_>, n: usize) -> Result<Option<ModeTerms>> {
    let grid = &input.b.grid;
    let zero = vec![0.0; grid.len()];
    let u0 = input.u0.mode(n).unwrap_or(&zero);
    let ut0 = input.u0tilde.mode(n).unwrap_or(&zero);
    if u0.iter().chain(ut0).all(|&v| v == 0.0) {
        return Ok(None);
    }
    let mu = input.u0tilde.basis.mu_n(n);
    let op_b = assemble_operator(grid, input.gamma, mu, input.b)?;
    let op_bt = assemble_operator(grid, input.gamma, mu, input.btilde)?;
    let (n_steps, dt) = step_plan(input.t_final, input.dt)?;
    let j_snap = ((input.t_snap / dt).round() as usize).clamp(1, n_steps);
    let omega = restrict_to(grid, input.omega1);
    let sub = restrict_to(grid, input.support.interval());

    let mut u = u0.to_vec();
    let mut ut = ut0.to_vec();
    let mut obs = 0.0;
    let mut snapshot = 0.0;
    for j in 0..=n_steps {
        if j > 0 {
            u = step_mode(&u, &op_b, &zero, &zero, dt, input.scheme)?;
            ut = step_mode(&ut, &op_bt, &zero, &zero, dt, input.scheme)?;
        }
        let gu = op_b.apply(&u);
        let gut = op_bt.apply(&ut);
        // ∂_t(u − ũ) = −G u + G̃ ũ
        let window: f64 = omega.clone().map(|i| (gut[i] - gu[i]).powi(2)).sum();
        let w = if j == 0 || j == n_steps { 0.5 } else { 1.0 };
        obs += w * dt * grid.h * window;
        if j == j_snap {
            let v: Vec<f64> = u.iter().zip(&ut).map(|(a, b)| a - b).collect();
            let gv = op_b.apply(&v);
            snapshot = grid.h * sub.clone().map(|i| gv[i] * gv[i]).sum::<f64>();
        }
    }
    Ok(Some(ModeTerms { obs, snapshot }))
}
