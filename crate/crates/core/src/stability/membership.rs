use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::error::{LabError, Result};
use crate::grid::{restrict_to, SubdomainSpec};
use crate::mode_pde::{
    assemble_operator, degeneracy_weight, fractional_norm_adaptive, heat_semigroup_subdomain,
    ModeOperator, DEFAULT_HEAT_DT,
};
use crate::spectral::ModeStack;

/// Parameters of the admissible class of initial data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    /// Mode index `N`.
    pub n: usize,
    pub k1: f64,
    /// Heat-flow time `t₁`.
    pub t1: f64,
    /// Observation snapshot time `T₁`.
    pub t_snap: f64,
    pub s: f64,
    pub m: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMembershipReport {
    pub n: usize,
    pub k1: f64,
    pub t1: f64,
    pub t_snap: f64,
    pub s: f64,
    pub nonneg_ok: bool,
    /// `sup_{Ω₁'} e^{t₁Δ} u⁰_N`.
    pub lhs: f64,
    /// `K₁ e^{δ^{2γ} m T₁ μ_N} ‖u⁰‖_{D(G^{s/2})}`.
    pub rhs: f64,
    pub k1_max: f64,
    pub norm: f64,
    pub growth_factor: f64,
    pub member: bool,
}

/// Starting spectrum size for adaptive fractional norms.
pub(crate) const NORM_K0: usize = 32;

/// Mode operators for every index of `stack` under coefficient `coeff`.
pub(crate) fn stack_operators(
    stack: &ModeStack,
    coeff: &CoefficientField,
    gamma: f64,
) -> Result<Vec<ModeOperator>> {
    stack
        .n_indices
        .iter()
        .map(|&n| assemble_operator(&coeff.grid, gamma, stack.basis.mu_n(n), coeff))
        .collect()
}

/// `‖u⁰‖_{D(G_γ^{s/2})}` with the mode operators built from `coeff`.
pub fn initial_data_norm(
    stack: &ModeStack,
    coeff: &CoefficientField,
    gamma: f64,
    s: f64,
) -> Result<f64> {
    let ops = stack_operators(stack, coeff, gamma)?;
    fractional_norm_adaptive(stack, s, &ops, NORM_K0)
}

/// Decides whether `u0` lies in the class for mode `N`; the norm is taken
/// with the operators of `coeff`. Zero data are never members.
pub fn check_class_membership(
    u0: &ModeStack,
    coeff: &CoefficientField,
    support: SubdomainSpec,
    params: &ClassParams,
) -> Result<ClassMembershipReport> {
    if !(params.t1 > 0.0 && params.t1 < params.t_snap) {
        return Err(LabError::InvalidInput(format!(
            "need 0 < t1 < T1, got t1 = {}, T1 = {}",
            params.t1, params.t_snap
        )));
    }
    let grid = &coeff.grid;
    let zero = vec![0.0; grid.len()];
    let u0_n = u0.mode(params.n).unwrap_or(&zero);
    let nonneg_ok = u0_n.iter().all(|&v| v >= 0.0);
    let norm = initial_data_norm(u0, coeff, params.gamma, params.s)?;
    let mu_n = u0.basis.mu_n(params.n);
    let growth_factor =
        (degeneracy_weight(support.delta, params.gamma) * params.m * params.t_snap * mu_n).exp();

    let range = restrict_to(grid, support.interval());
    let lhs = if range.is_empty() {
        0.0
    } else {
        let sub = grid.subgrid(range.clone())?;
        let flowed =
            heat_semigroup_subdomain(&u0_n[range], params.t1, &sub, DEFAULT_HEAT_DT)?;
        flowed.into_iter().fold(f64::NEG_INFINITY, f64::max)
    };
    let (rhs, k1_max, member) = if norm == 0.0 {
        (0.0, 0.0, false)
    } else {
        let rhs = params.k1 * growth_factor * norm;
        (rhs, lhs / (growth_factor * norm), nonneg_ok && lhs >= rhs)
    };
    Ok(ClassMembershipReport {
        n: params.n,
        k1: params.k1,
        t1: params.t1,
        t_snap: params.t_snap,
        s: params.s,
        nonneg_ok,
        lhs,
        rhs,
        k1_max,
        norm,
        growth_factor,
        member,
    })
}
