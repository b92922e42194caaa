use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::eigen_analysis::{decay_rate_estimate, lambda_sweep};
use crate::grid::l2_norm;
use crate::mode_pde::{solve_mode, Source};
use crate::stability::{check_class_membership, ClassMembershipReport, StabilityReport};

use super::artifacts::{ArtifactSink, Manifest, SCHEMA_VERSION};
use super::config::{ExperimentConfig, Format};
use super::studies::{
    harnack_study, reconstruction_study, stability_ensemble, t_snap_sweep, HarnackStudy,
    ReconstructionStudy, Setup, SweepPoint,
};
use super::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Forward,
    EigenScaling,
    Reconstruct,
    StabilitySweep,
    CheckClass,
    Harnack,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Forward => "forward",
            Self::EigenScaling => "eigen-scaling",
            Self::Reconstruct => "reconstruct",
            Self::StabilitySweep => "stability-sweep",
            Self::CheckClass => "check-class",
            Self::Harnack => "harnack",
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'static str,
    master_seed: u64,
    #[serde(flatten)]
    body: &'a T,
}

/// Runs `command` and writes its artifacts, the resolved configuration, and
/// the manifest into `config.output.directory`.
pub fn run(config: &ExperimentConfig, command: Command) -> Result<Manifest, ExperimentError> {
    let violations = config.violations();
    if !violations.is_empty() {
        return Err(ExperimentError::Config(violations));
    }
    let setup = Setup::new(config)?;
    let mut sink = ArtifactSink::create(&config.output.directory)?;
    let resolved = toml::to_string(config)
        .map_err(|e| ExperimentError::Io(format!("serializing configuration: {e}")))?;
    sink.write("resolved_config.toml", resolved.as_bytes())?;

    let mut ctx = Ctx {
        setup: &setup,
        sink: &mut sink,
        command,
    };
    match command {
        Command::Forward => forward(&mut ctx)?,
        Command::EigenScaling => eigen_scaling(&mut ctx)?,
        Command::Reconstruct => reconstruct(&mut ctx)?,
        Command::StabilitySweep => stability_sweep(&mut ctx)?,
        Command::CheckClass => check_class(&mut ctx)?,
        Command::Harnack => harnack(&mut ctx)?,
    }
    sink.finish(command.name(), config.ensemble.master_seed)
}

struct Ctx<'a> {
    setup: &'a Setup,
    sink: &'a mut ArtifactSink,
    command: Command,
}

impl Ctx<'_> {
    fn json<T: Serialize>(&mut self, name: &str, body: &T) -> Result<(), ExperimentError> {
        if !self.setup.config.output.wants(Format::Json) {
            return Ok(());
        }
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command: self.command.name(),
            master_seed: self.setup.config.ensemble.master_seed,
            body,
        };
        self.sink.write_json(name, &env)
    }

    fn csv(&mut self, name: &str, text: &str) -> Result<(), ExperimentError> {
        if !self.setup.config.output.wants(Format::Csv) {
            return Ok(());
        }
        self.sink.write(name, text.as_bytes())
    }
}

#[derive(Serialize)]
struct ForwardMode {
    n: usize,
    mu_n: f64,
    lambda_n: f64,
    decay_rate: Option<f64>,
    initial_l2: f64,
    final_l2: f64,
}

#[derive(Serialize)]
struct ForwardBody {
    t_final: f64,
    dt: f64,
    modes: Vec<ForwardMode>,
}

/// forward.csv: `t,n,l2_norm,max_abs` every `stride` steps.
fn forward(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let cfg = &setup.config;
    let (u0, _) = setup.initial_stacks()?;
    let stride = cfg.output.stride;
    let results = u0
        .n_indices
        .par_iter()
        .zip(&u0.modes)
        .map(|(&n, f)| {
            let op = setup.operator(&setup.b, n)?;
            let traj = solve_mode(
                f,
                Source::Zero,
                &op,
                cfg.protocol.t_final,
                cfg.discretization.dt,
                cfg.protocol.scheme,
            )?;
            let mut rows = String::new();
            for (j, (t, u)) in traj.times.iter().zip(&traj.states).enumerate() {
                if j % stride == 0 || j + 1 == traj.len() {
                    let sup = u.iter().fold(0.0f64, |a, v| a.max(v.abs()));
                    let _ = writeln!(rows, "{t:e},{n},{:e},{sup:e}", l2_norm(u, &setup.grid)?);
                }
            }
            let mode = ForwardMode {
                n,
                mu_n: setup.basis.mu_n(n),
                lambda_n: op.smallest_eigenvalue(),
                decay_rate: decay_rate_estimate(&traj).ok(),
                initial_l2: l2_norm(f, &setup.grid)?,
                final_l2: l2_norm(traj.last_state(), &setup.grid)?,
            };
            Ok((mode, rows))
        })
        .collect::<crate::Result<Vec<_>>>()?;
    let mut csv = String::from("t,n,l2_norm,max_abs\n");
    let mut modes = Vec::new();
    for (m, rows) in results {
        csv.push_str(&rows);
        modes.push(m);
    }
    let body = ForwardBody {
        t_final: cfg.protocol.t_final,
        dt: cfg.discretization.dt,
        modes,
    };
    ctx.json("forward.json", &body)?;
    ctx.csv("forward.csv", &csv)
}

/// scaling.csv: `n,mu_n,lambda_n,ratio`.
fn eigen_scaling(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let cfg = &setup.config;
    let report = lambda_sweep(
        cfg.physics.gamma,
        &setup.b,
        &setup.basis,
        &cfg.sweep.eigen_modes,
        &setup.grid,
    )?;
    ctx.json("scaling.json", &report)?;
    ctx.csv("scaling.csv", &report.to_csv())
}

/// reconstruction.csv: `x,planted,estimate` on Ω₁'.
fn reconstruct(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let e = &setup.config.ensemble;
    let study: ReconstructionStudy = reconstruction_study(setup, 1, e.noise_level, e.master_seed)?;
    let mut csv = String::from("x,planted,estimate\n");
    for ((x, p), q) in study.x.iter().zip(&study.planted).zip(&study.estimate) {
        let _ = writeln!(csv, "{x:e},{p:e},{q:e}");
    }
    ctx.json("reconstruction.json", &study)?;
    ctx.csv("reconstruction.csv", &csv)
}

#[derive(Serialize)]
struct ModeSummary {
    n: usize,
    runs: usize,
    min_ratio: f64,
    max_ratio: f64,
}

#[derive(Serialize)]
struct StabilityBody<'a> {
    reports: &'a [StabilityReport],
    by_mode: Vec<ModeSummary>,
    /// `max_N (max ratio) / min_N (max ratio)`.
    max_ratio_spread: f64,
}

#[derive(Serialize)]
struct SweepBody<'a> {
    points: &'a [SweepPoint],
}

/// Per-mode extremes of the ensemble ratios.
fn summarize(reports: &[StabilityReport]) -> (Vec<ModeSummary>, f64) {
    let mut by: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for r in reports {
        by.entry(r.n).or_default().push(r.ratio);
    }
    let summary: Vec<ModeSummary> = by
        .into_iter()
        .map(|(n, v)| ModeSummary {
            n,
            runs: v.len(),
            min_ratio: v.iter().copied().fold(f64::INFINITY, f64::min),
            max_ratio: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();
    let hi = summary.iter().map(|s| s.max_ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = summary.iter().map(|s| s.max_ratio).fold(f64::INFINITY, f64::min);
    (summary, hi / lo)
}

/// stability.csv: `run,seed,n,lhs,obs_term,snapshot_term,norm_sq,ratio,lambda_n`;
/// t1_sweep.csv: `t_snap,t_final,n,ratio,k1_max`.
fn stability_sweep(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let reports = stability_ensemble(setup)?;
    let (by_mode, max_ratio_spread) = summarize(&reports);
    let mut csv = String::from("run,seed,n,lhs,obs_term,snapshot_term,norm_sq,ratio,lambda_n\n");
    for (i, r) in reports.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{},{},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.seed, r.n, r.lhs, r.obs_term, r.snapshot_term, r.norm_sq, r.ratio, r.lambda_n
        );
    }
    ctx.json(
        "stability.json",
        &StabilityBody {
            reports: &reports,
            by_mode,
            max_ratio_spread,
        },
    )?;
    ctx.csv("stability.csv", &csv)?;

    if !setup.config.sweep.t_snap_list.is_empty() {
        let points = t_snap_sweep(setup)?;
        let mut csv = String::from("t_snap,t_final,n,ratio,k1_max\n");
        for p in &points {
            for (r, m) in p.reports.iter().zip(&p.membership) {
                let _ = writeln!(
                    csv,
                    "{:e},{:e},{},{:e},{:e}",
                    p.t_snap, p.t_final, r.n, r.ratio, m.k1_max
                );
            }
        }
        ctx.json("t1_sweep.json", &SweepBody { points: &points })?;
        ctx.csv("t1_sweep.csv", &csv)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ClassBody {
    reports: Vec<ClassMembershipReport>,
}

/// Class test of `ũ⁰` for the protocol mode.
fn check_class(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let p = &setup.config.protocol;
    let (_, u0tilde) = setup.initial_stacks()?;
    let report = check_class_membership(
        &u0tilde,
        &setup.btilde,
        setup.support,
        &setup.class_params(p.mode, p.t_snap),
    )?;
    let csv = format!(
        "n,k1,lhs,rhs,k1_max,norm,member\n{},{:e},{:e},{:e},{:e},{:e},{}\n",
        report.n, report.k1, report.lhs, report.rhs, report.k1_max, report.norm, report.member
    );
    ctx.json("class.json", &ClassBody { reports: vec![report] })?;
    ctx.csv("class.csv", &csv)
}

/// harnack.csv: `case,seed,inf_late,sup_early,ratio`.
fn harnack(ctx: &mut Ctx<'_>) -> Result<(), ExperimentError> {
    let setup = ctx.setup;
    let study: HarnackStudy = harnack_study(setup, setup.config.ensemble.count)?;
    let mut csv = String::from("case,seed,inf_late,sup_early,ratio\n");
    let _ = writeln!(
        csv,
        "eigen,,{:e},{:e},{:e}",
        study.eigen.inf_late, study.eigen.sup_early, study.eigen.ratio
    );
    for (r, s) in study.ensemble.iter().zip(&study.seeds) {
        let _ = writeln!(csv, "bump,{s},{:e},{:e},{:e}", r.inf_late, r.sup_early, r.ratio);
    }
    ctx.json("harnack.json", &study)?;
    ctx.csv("harnack.csv", &csv)
}
