//! Dissipation speed of the Fourier modes: the growth `λ_{n,γ} ~ μ_n^{1/(1+γ)}`
//! of the ground eigenvalue and decay rates measured on trajectories.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficient::CoefficientField;
use crate::error::{LabError, Result};
use crate::grid::Grid1D;
use crate::mode_pde::{assemble_operator, eigendecompose, ModeTrajectory};
use crate::spectral::SpectralBasisY;

/// Exponent in the bound `c_* μ^{1/(1+γ)} ≤ λ_{n,γ} ≤ c^* μ^{1/(1+γ)}`.
pub fn scaling_exponent(gamma: f64) -> f64 {
    1.0 / (1.0 + gamma)
}

/// Exponent `p(γ)` of the observability cost `e^{C μ_N^{p(γ)}}`.
pub fn carleman_exponent(gamma: f64) -> f64 {
    if gamma >= 0.5 {
        0.5
    } else {
        2.0 / 3.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingFitReport {
    pub gamma: f64,
    pub n_list: Vec<usize>,
    pub mu_list: Vec<f64>,
    pub lambda_list: Vec<f64>,
    /// Least-squares slope of `log λ` against `log μ`; `None` for a single point.
    pub slope: Option<f64>,
    pub slope_theory: f64,
    pub c_star_lo: f64,
    pub c_star_hi: f64,
    pub p_gamma: f64,
    pub r_squared: Option<f64>,
}

impl ScalingFitReport {
    pub fn ratios(&self) -> Vec<f64> {
        self.mu_list
            .iter()
            .zip(&self.lambda_list)
            .map(|(mu, lam)| lam / mu.powf(self.slope_theory))
            .collect()
    }

    /// Width factor `c^*/c_*` of the ratio band.
    pub fn band_factor(&self) -> f64 {
        self.c_star_hi / self.c_star_lo
    }

    /// CSV with columns `n,mu_n,lambda_n,ratio`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,mu_n,lambda_n,ratio\n");
        for (((n, mu), lam), r) in self
            .n_list
            .iter()
            .zip(&self.mu_list)
            .zip(&self.lambda_list)
            .zip(self.ratios())
        {
            out.push_str(&format!("{n},{mu:e},{lam:e},{r:e}\n"));
        }
        out
    }
}

/// Resolution figure `h μ^{1/(2(1+γ))}` of the ground state of mode `μ`.
pub fn ground_state_resolution(h: f64, mu: f64, gamma: f64) -> f64 {
    h * mu.powf(0.5 * scaling_exponent(gamma))
}

pub fn lambda_sweep(
    gamma: f64,
    coeff: &CoefficientField,
    basis: &SpectralBasisY,
    n_list: &[usize],
    grid: &Grid1D,
) -> Result<ScalingFitReport> {
    if n_list.is_empty() {
        return Err(LabError::InvalidInput("empty mode list".into()));
    }
    if n_list.windows(2).any(|w| w[0] >= w[1]) {
        return Err(LabError::InvalidInput("mode list must be strictly ascending".into()));
    }
    if let Some(&n) = n_list.iter().find(|&&n| n == 0 || n > basis.n_max) {
        return Err(LabError::InvalidInput(format!(
            "mode {n} outside 1..={}",
            basis.n_max
        )));
    }
    for &n in n_list {
        let value = ground_state_resolution(grid.h, basis.mu_n(n), gamma);
        if value > 0.1 {
            return Err(LabError::UnderResolved { n, value });
        }
    }
    let mu_list: Vec<f64> = n_list.iter().map(|&n| basis.mu_n(n)).collect();
    let lambda_list = mu_list
        .par_iter()
        .map(|&mu| {
            let op = assemble_operator(grid, gamma, mu, coeff)?;
            Ok(eigendecompose(&op, 1)?.ground())
        })
        .collect::<Result<Vec<f64>>>()?;

    let slope_theory = scaling_exponent(gamma);
    let ratios: Vec<f64> = mu_list
        .iter()
        .zip(&lambda_list)
        .map(|(mu, lam)| lam / mu.powf(slope_theory))
        .collect();
    let c_star_lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let c_star_hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (slope, r_squared) = if n_list.len() >= 2 {
        let xs: Vec<f64> = mu_list.iter().map(|m| m.ln()).collect();
        let ys: Vec<f64> = lambda_list.iter().map(|l| l.ln()).collect();
        let fit = linear_fit(&xs, &ys);
        (Some(fit.slope), Some(fit.r_squared))
    } else {
        (None, None)
    };

    Ok(ScalingFitReport {
        gamma,
        n_list: n_list.to_vec(),
        mu_list,
        lambda_list,
        slope,
        slope_theory,
        c_star_lo,
        c_star_hi,
        p_gamma: carleman_exponent(gamma),
        r_squared,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
}

/// Ordinary least squares `y ≈ slope x + intercept`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> LinearFit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
        syy += (y - my) * (y - my);
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    LinearFit {
        slope,
        intercept,
        r_squared,
    }
}

/// Decay rate of a source-free trajectory: minus the least-squares slope of
/// `log ‖u(t_j)‖` over the second half of the stored times.
pub fn decay_rate_estimate(traj: &ModeTrajectory) -> Result<f64> {
    if traj.len() < 11 {
        return Err(LabError::InvalidInput(format!(
            "need at least 10 steps, got {}",
            traj.len().saturating_sub(1)
        )));
    }
    let norms: Vec<f64> = traj
        .states
        .iter()
        .map(|u| u.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    if norms[0] == 0.0 {
        return Err(LabError::InvalidInput("zero initial state".into()));
    }
    let start = traj.len() / 2;
    let tail = &norms[start..];
    if tail.iter().any(|&n| n < 1e-300) {
        return Err(LabError::NormUnderflow);
    }
    let xs = &traj.times[start..];
    let ys: Vec<f64> = tail.iter().map(|n| n.ln()).collect();
    Ok(-linear_fit(xs, &ys).slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mode_pde::Scheme;

    #[test]
    fn carleman_exponent_switches_at_half() {
        assert_eq!(carleman_exponent(1.0), 0.5);
        assert_eq!(carleman_exponent(0.5), 0.5);
        assert_eq!(carleman_exponent(0.49), 2.0 / 3.0);
        assert_eq!(carleman_exponent(0.1), 2.0 / 3.0);
        assert_eq!(scaling_exponent(0.25), 0.8);
    }

    #[test]
    fn fit_recovers_line() {
        let xs = [0.0, 1.0, 2.0, 3.0];
        let ys: Vec<f64> = xs.iter().map(|x| 0.5 * x - 2.0).collect();
        let f = linear_fit(&xs, &ys);
        assert!((f.slope - 0.5).abs() < 1e-14);
        assert!((f.intercept + 2.0).abs() < 1e-14);
        assert!((f.r_squared - 1.0).abs() < 1e-14);
    }

    #[test]
    fn decay_rate_of_exact_exponential() {
        let times: Vec<f64> = (0..21).map(|j| j as f64 * 0.01).collect();
        let states = times.iter().map(|t| vec![(-3.0 * t).exp(), 0.0]).collect();
        let traj = ModeTrajectory {
            dt: 0.01,
            scheme: Scheme::CrankNicolson,
            times,
            states,
            dstates: vec![],
            source: None,
        };
        assert!((decay_rate_estimate(&traj).unwrap() - 3.0).abs() < 1e-10);
    }

    #[test]
    fn decay_rate_rejects_short_or_empty() {
        let mk = |n: usize, v: f64| ModeTrajectory {
            dt: 0.1,
            scheme: Scheme::BackwardEuler,
            times: (0..n).map(|j| j as f64 * 0.1).collect(),
            states: vec![vec![v]; n],
            dstates: vec![],
            source: None,
        };
        assert!(decay_rate_estimate(&mk(5, 1.0)).is_err());
        assert!(decay_rate_estimate(&mk(20, 0.0)).is_err());
        let mut t = mk(20, 1.0);
        for s in t.states.iter_mut().skip(12) {
            s[0] = 0.0;
        }
        assert_eq!(decay_rate_estimate(&t).unwrap_err(), LabError::NormUnderflow);
    }
}
