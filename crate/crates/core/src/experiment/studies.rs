//! Multi-run studies shared by the CLI commands and the acceptance suite.

use std::f64::consts::PI;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coefficient::{make_coefficient, smooth_bump, CoefficientField, CoefficientProfile};
use crate::error::{LabError, Result};
use crate::grid::{build_grid, restrict_to, Grid1D, Interval, SubdomainSpec};
use crate::mode_pde::{
    assemble_operator, eigendecompose, integrate_mode, solve_mode, ModeOperator, Scheme, Source,
};
use crate::spectral::{build_basis, ModeStack, SpectralBasisY};
use crate::stability::{
    check_class_membership, harnack_ratio, reconstruct_coefficient, stability_ratio,
    ClassCheck, ClassMembershipReport, ClassParams, HarnackReport, ModeSnapshot,
    StabilityInput, StabilityReport, DENOMINATOR_FLOOR,
};

use super::config::{ExperimentConfig, InitialProfile};
use super::noise::{derive_seed, noise_inject, rng_for};

/// Grid, basis, and coefficient fields resolved from a configuration.
#[derive(Debug, Clone)]
pub struct Setup {
    pub config: ExperimentConfig,
    pub grid: Grid1D,
    pub support: SubdomainSpec,
    pub omega: Interval,
    pub basis: Arc<SpectralBasisY>,
    pub b: CoefficientField,
    pub btilde: CoefficientField,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        Self::with_cells(config, config.discretization.n_cells)
    }

    /// Same configuration on a grid with `n_cells` cells.
    pub fn with_cells(config: &ExperimentConfig, n_cells: usize) -> Result<Self> {
        let [a, b] = config.geometry.omega1;
        let grid = build_grid(a, b, n_cells)?;
        let support = config.subdomain();
        support.check_inside(&grid)?;
        let d = &config.discretization;
        let basis = Arc::new(build_basis(config.geometry.l2, d.n_max, d.n_y_quad)?);
        let b = coefficient_on(&grid, support, config, &config.coefficients.b)?;
        let btilde = coefficient_on(&grid, support, config, &config.coefficients.btilde)?;
        Ok(Self {
            config: config.clone(),
            grid,
            support,
            omega: config.observation(),
            basis,
            b,
            btilde,
        })
    }

    pub fn coefficient(&self, profile: &CoefficientProfile) -> Result<CoefficientField> {
        coefficient_on(&self.grid, self.support, &self.config, profile)
    }

    pub fn operator(&self, coeff: &CoefficientField, n: usize) -> Result<ModeOperator> {
        assemble_operator(&self.grid, self.config.physics.gamma, self.basis.mu_n(n), coeff)
    }

    /// Nodal samples of an initial profile for mode `n`.
    pub fn profile_samples(&self, profile: &InitialProfile, n: usize) -> Result<Vec<f64>> {
        let nodes = &self.grid.nodes;
        Ok(match *profile {
            InitialProfile::Zero => vec![0.0; nodes.len()],
            InitialProfile::Bump {
                center,
                width,
                amplitude,
            } => {
                if !(width > 0.0) {
                    return Err(LabError::InvalidInput(format!(
                        "bump width must be positive, got {width}"
                    )));
                }
                nodes
                    .iter()
                    .map(|&x| amplitude * smooth_bump((x - center) / width))
                    .collect()
            }
            InitialProfile::SubdomainSine { amplitude } => {
                let (lo, hi) = (self.support.lo, self.support.hi);
                nodes
                    .iter()
                    .map(|&x| {
                        if self.support.contains(x) {
                            amplitude * (PI * (x - lo) / (hi - lo)).sin()
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
            InitialProfile::GroundState { amplitude } => {
                let op = self.operator(&self.btilde, n)?;
                let spec = eigendecompose(&op, 1)?;
                spec.eigenvectors[0].iter().map(|v| amplitude * v).collect()
            }
        })
    }

    pub fn stack(&self, profile: &InitialProfile, modes: &[usize]) -> Result<ModeStack> {
        let data = modes
            .iter()
            .map(|&n| self.profile_samples(profile, n))
            .collect::<Result<Vec<_>>>()?;
        ModeStack::new(self.basis.clone(), modes.to_vec(), data)
    }

    /// `u⁰` and `ũ⁰` as configured.
    pub fn initial_stacks(&self) -> Result<(ModeStack, ModeStack)> {
        let modes = self.config.data_modes();
        let u0 = self.stack(&self.config.initial_data.profile, &modes)?;
        let u0tilde = match &self.config.initial_data.tilde {
            Some(p) => self.stack(p, &modes)?,
            None => u0.clone(),
        };
        Ok((u0, u0tilde))
    }

    pub fn class_check(&self) -> Option<ClassCheck> {
        let p = &self.config.protocol;
        p.enforce_class.then_some(ClassCheck {
            k1: p.k1,
            t1: p.t1,
        })
    }

    pub fn class_params(&self, n: usize, t_snap: f64) -> ClassParams {
        let p = &self.config.protocol;
        ClassParams {
            n,
            k1: p.k1,
            t1: p.t1,
            t_snap,
            s: self.config.physics.s,
            m: self.btilde.m,
            gamma: self.config.physics.gamma,
        }
    }

    fn stability_input<'a>(
        &'a self,
        b: &'a CoefficientField,
        u0: &'a ModeStack,
        u0tilde: &'a ModeStack,
        n: usize,
        t_snap: f64,
        t_final: f64,
        seed: u64,
    ) -> StabilityInput<'a> {
        StabilityInput {
            b,
            btilde: &self.btilde,
            u0,
            u0tilde,
            support: self.support,
            n,
            t_final,
            t_snap,
            omega1: self.omega,
            gamma: self.config.physics.gamma,
            s: self.config.physics.s,
            dt: self.config.discretization.dt,
            scheme: self.config.protocol.scheme,
            class: self.class_check(),
            seed,
        }
    }
}

fn coefficient_on(
    grid: &Grid1D,
    support: SubdomainSpec,
    config: &ExperimentConfig,
    profile: &CoefficientProfile,
) -> Result<CoefficientField> {
    let p = &config.physics;
    make_coefficient(grid, support, profile, p.m_lower, p.m_upper, config.blend())
}

fn uniform(rng: &mut impl Rng, range: [f64; 2]) -> f64 {
    if range[0] == range[1] {
        range[0]
    } else {
        rng.gen_range(range[0]..range[1])
    }
}

/// Run `index` of the stability ensemble: a random planted bump in `b` and a
/// random bump datum `u⁰ = ũ⁰` in mode `modes[index % len]`.
fn ensemble_run(setup: &Setup, index: usize) -> Result<StabilityReport> {
    let cfg = &setup.config;
    let e = &cfg.ensemble;
    let seed = derive_seed(e.master_seed, index as u64);
    let mut rng = rng_for(seed);
    let n = e.modes[index % e.modes.len()];
    let b = setup.coefficient(&CoefficientProfile::Bump {
        center: uniform(&mut rng, e.b_center),
        width: uniform(&mut rng, e.b_width),
        amplitude: uniform(&mut rng, e.b_amplitude),
    })?;
    let data = InitialProfile::Bump {
        center: uniform(&mut rng, e.data_center),
        width: uniform(&mut rng, e.data_width),
        amplitude: uniform(&mut rng, e.data_amplitude),
    };
    let u0 = setup.stack(&data, &[n])?;
    let p = &cfg.protocol;
    stability_ratio(&setup.stability_input(&b, &u0, &u0, n, p.t_snap, p.t_final, seed))
}

/// The seeded stability ensemble, in run-index order.
pub fn stability_ensemble(setup: &Setup) -> Result<Vec<StabilityReport>> {
    (0..setup.config.ensemble.count)
        .into_par_iter()
        .map(|i| ensemble_run(setup, i))
        .collect()
}

/// Ratios at one snapshot time across the ensemble modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub t_snap: f64,
    pub t_final: f64,
    pub reports: Vec<StabilityReport>,
    /// Class test of each datum at this `T₁` (recorded, not enforced).
    pub membership: Vec<ClassMembershipReport>,
    /// Largest ratio over the modes: the empirical constant at this `T₁`.
    pub max_ratio: f64,
}

/// Stability ratios of the configured `b` and initial profile over
/// `sweep.t_snap_list`, with `T = T₁ + sweep.horizon_margin`.
pub fn t_snap_sweep(setup: &Setup) -> Result<Vec<SweepPoint>> {
    let cfg = &setup.config;
    let modes = &cfg.ensemble.modes;
    let mut points = Vec::new();
    for &t_snap in &cfg.sweep.t_snap_list {
        let t_final = t_snap + cfg.sweep.horizon_margin;
        let results = modes
            .par_iter()
            .map(|&n| {
                let u0 = setup.stack(&cfg.initial_data.profile, &[n])?;
                let u0tilde = match &cfg.initial_data.tilde {
                    Some(p) => setup.stack(p, &[n])?,
                    None => u0.clone(),
                };
                let mut input =
                    setup.stability_input(&setup.b, &u0, &u0tilde, n, t_snap, t_final, 0);
                input.class = None;
                let report = stability_ratio(&input)?;
                let member = check_class_membership(
                    &u0tilde,
                    &setup.btilde,
                    setup.support,
                    &setup.class_params(n, t_snap),
                )?;
                Ok((report, member))
            })
            .collect::<Result<Vec<_>>>()?;
        let (reports, membership): (Vec<_>, Vec<_>) = results.into_iter().unzip();
        let max_ratio = reports.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
        points.push(SweepPoint {
            t_snap,
            t_final,
            reports,
            membership,
            max_ratio,
        });
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HarnackStudy {
    /// `U = Ω₁'` as the aligned subgrid interval and the middle half `V`.
    pub u: Interval,
    pub v: Interval,
    pub eigen: HarnackReport,
    pub eigen_closed_form: f64,
    pub eigen_rel_error: f64,
    pub ensemble: Vec<HarnackReport>,
    pub seeds: Vec<u64>,
    pub min_ratio: f64,
}

/// Harnack ratios of the heat flow on `U = Ω₁'` for the ground sine of `U`
/// and `count` seeded nonnegative bumps.
pub fn harnack_study(setup: &Setup, count: usize) -> Result<HarnackStudy> {
    let cfg = &setup.config;
    let p = &cfg.protocol;
    let range = restrict_to(&setup.grid, setup.support.interval());
    let sub = setup.grid.subgrid(range)?;
    let u = Interval::new(sub.a, sub.b)?;
    let quarter = 0.25 * (setup.support.hi - setup.support.lo);
    let v = Interval::new(setup.support.lo + quarter, setup.support.hi - quarter)?;
    let op = ModeOperator::laplacian(&sub)?;
    let run = |u0: &[f64]| -> Result<HarnackReport> {
        let traj = solve_mode(u0, Source::Zero, &op, p.t_snap, cfg.discretization.dt, p.scheme)?;
        harnack_ratio(&traj, &sub, v, p.t1, p.t_snap)
    };

    let width = sub.b - sub.a;
    let sine = |x: f64| (PI * (x - sub.a) / width).sin();
    let e0: Vec<f64> = sub.nodes.iter().map(|&x| sine(x)).collect();
    let eigen = run(&e0)?;
    let on_v: Vec<f64> = sub
        .nodes
        .iter()
        .filter(|&&x| v.contains(x))
        .map(|&x| sine(x))
        .collect();
    let inf_v = on_v.iter().copied().fold(f64::INFINITY, f64::min);
    let sup_v = on_v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lambda = (PI / width).powi(2);
    let eigen_closed_form = (-lambda * (p.t_snap - p.t1)).exp() * inf_v / sup_v;
    let eigen_rel_error = (eigen.ratio - eigen_closed_form).abs() / eigen_closed_form;

    let e = &cfg.ensemble;
    let seeds: Vec<u64> = (0..count)
        .map(|i| derive_seed(e.master_seed ^ 0x4841_524E, i as u64))
        .collect();
    let ensemble = seeds
        .par_iter()
        .map(|&seed| {
            let mut rng = rng_for(seed);
            let center = uniform(&mut rng, [v.lo, v.hi]);
            let w = uniform(&mut rng, [0.25 * width, 0.5 * width]);
            let amp = uniform(&mut rng, e.data_amplitude);
            let u0: Vec<f64> = sub
                .nodes
                .iter()
                .map(|&x| amp * smooth_bump((x - center) / w))
                .collect();
            run(&u0)
        })
        .collect::<Result<Vec<_>>>()?;
    let min_ratio = ensemble.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
    Ok(HarnackStudy {
        u,
        v,
        eigen,
        eigen_closed_form,
        eigen_rel_error,
        ensemble,
        seeds,
        min_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructionStudy {
    pub n: usize,
    pub n_cells: usize,
    pub data_n_cells: usize,
    pub t_snap: f64,
    pub noise_level: f64,
    pub sup_error: f64,
    pub l2_error: f64,
    pub residual: f64,
    /// Ω₁' nodes with the planted and the recovered `b - b̃`.
    pub x: Vec<f64>,
    pub planted: Vec<f64>,
    pub estimate: Vec<f64>,
}

/// State and semi-discrete derivative at exactly `t_snap`.
fn snapshot(u0: &[f64], op: &ModeOperator, t_snap: f64, dt: f64, scheme: Scheme) -> Result<ModeSnapshot> {
    let mut last = u0.to_vec();
    integrate_mode(u0, Source::Zero, op, t_snap, dt, scheme, |_, _, u, _| {
        last.copy_from_slice(u);
    })?;
    let du = op.apply(&last).into_iter().map(|v| -v).collect();
    Ok(ModeSnapshot { u: last, du })
}

/// Recovers `b - b̃` on Ω₁' from the mode-`N` snapshot at `T₁`. Data come
/// from a grid `data_factor` times finer (with the step divided likewise);
/// `data_factor = 1` is the inverse crime.
pub fn reconstruction_study(
    setup: &Setup,
    data_factor: usize,
    noise_level: f64,
    seed: u64,
) -> Result<ReconstructionStudy> {
    if data_factor == 0 {
        return Err(LabError::InvalidInput("data_factor must be at least 1".into()));
    }
    let cfg = &setup.config;
    let p = &cfg.protocol;
    let n = p.mode;
    let dt = cfg.discretization.dt;
    let fine = Setup::with_cells(cfg, setup.grid.n_cells * data_factor)?;
    let u0_fine = fine.profile_samples(&cfg.initial_data.profile, n)?;
    let measured_fine = snapshot(
        &u0_fine,
        &fine.operator(&fine.b, n)?,
        p.t_snap,
        dt / data_factor as f64,
        p.scheme,
    )?;
    let pick = |v: &[f64]| -> Vec<f64> {
        (0..setup.grid.len())
            .map(|i| v[(i + 1) * data_factor - 1])
            .collect()
    };
    let mut measured = ModeSnapshot {
        u: pick(&measured_fine.u),
        du: pick(&measured_fine.du),
    };
    if noise_level > 0.0 {
        measured.u = noise_inject(&measured.u, noise_level, derive_seed(seed, 0));
        measured.du = noise_inject(&measured.du, noise_level, derive_seed(seed, 1));
    }
    let ut0 = match &cfg.initial_data.tilde {
        Some(prof) => setup.profile_samples(prof, n)?,
        None => setup.profile_samples(&cfg.initial_data.profile, n)?,
    };
    let twin = snapshot(&ut0, &setup.operator(&setup.btilde, n)?, p.t_snap, dt, p.scheme)?;
    let rec = reconstruct_coefficient(
        &measured,
        &twin,
        &setup.btilde,
        setup.basis.mu_n(n),
        cfg.physics.gamma,
        setup.support,
        DENOMINATOR_FLOOR,
    )?;
    let planted_all = setup.b.difference(&setup.btilde)?;
    let range = rec.start..rec.end;
    let x = setup.grid.nodes[range.clone()].to_vec();
    let planted = planted_all[range.clone()].to_vec();
    let estimate = rec.difference[range].to_vec();
    let errs: Vec<f64> = planted.iter().zip(&estimate).map(|(a, b)| a - b).collect();
    let sup_error = errs.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let l2_error = (setup.grid.h * errs.iter().map(|e| e * e).sum::<f64>()).sqrt();
    Ok(ReconstructionStudy {
        n,
        n_cells: setup.grid.n_cells,
        data_n_cells: fine.grid.n_cells,
        t_snap: p.t_snap,
        noise_level,
        sup_error,
        l2_error,
        residual: rec.residual,
        x,
        planted,
        estimate,
    })
}
