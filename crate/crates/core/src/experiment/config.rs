//! Experiment configuration: a TOML document with defaults for every key and
//! strict rejection of unknown keys.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::coefficient::{make_coefficient, BlendOptions, CoefficientProfile};
use crate::grid::{build_grid, Interval, SubdomainSpec, MIN_CELLS};
use crate::mode_pde::Scheme;

use super::ExperimentError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub geometry: Geometry,
    pub discretization: Discretization,
    pub physics: Physics,
    pub protocol: Protocol,
    pub coefficients: Coefficients,
    pub initial_data: InitialData,
    pub ensemble: Ensemble,
    pub sweep: Sweep,
    pub output: Output,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Geometry {
    /// Ω₁ = (a, b).
    pub omega1: [f64; 2],
    /// Ω₁' and its distance bound δ from the origin.
    pub subdomain: [f64; 2],
    pub delta: f64,
    /// Observation window ω₁.
    pub observation: [f64; 2],
    /// Ω₂ = (0, l2).
    pub l2: f64,
}

impl Default for Geometry {
    fn default() -> Self {
        Self {
            omega1: [-1.0, 1.0],
            subdomain: [0.3, 0.9],
            delta: 0.3,
            observation: [-0.9, -0.4],
            l2: PI,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Discretization {
    pub n_cells: usize,
    pub dt: f64,
    pub n_max: usize,
    pub n_y_quad: usize,
}

impl Default for Discretization {
    fn default() -> Self {
        Self {
            n_cells: 1024,
            dt: 1e-3,
            n_max: 64,
            n_y_quad: 256,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Physics {
    pub gamma: f64,
    /// Order of the initial-data norm `D(G^{s/2})`.
    pub s: f64,
    /// Lower and upper coefficient bounds `m`, `M`.
    pub m_lower: f64,
    pub m_upper: f64,
    /// Discrete Lipschitz cap on `b`.
    pub lipschitz: f64,
}

impl Default for Physics {
    fn default() -> Self {
        Self {
            gamma: 0.5,
            s: 2.0,
            m_lower: 0.5,
            m_upper: 2.0,
            lipschitz: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Protocol {
    /// Observation horizon `T`.
    pub t_final: f64,
    /// Snapshot time `T₁`.
    pub t_snap: f64,
    /// Heat-flow time `t₁` of the class test.
    pub t1: f64,
    pub k1: f64,
    /// Mode index `N`.
    pub mode: usize,
    pub scheme: Scheme,
    /// Enforce class membership of `ũ⁰` before computing ratios.
    pub enforce_class: bool,
}

impl Default for Protocol {
    fn default() -> Self {
        Self {
            t_final: 0.5,
            t_snap: 0.2,
            t1: 0.05,
            k1: 1e-8,
            mode: 1,
            scheme: Scheme::CrankNicolson,
            enforce_class: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Coefficients {
    /// The unknown coefficient `b`.
    pub b: CoefficientProfile,
    /// The reference coefficient `b̃`.
    pub btilde: CoefficientProfile,
    /// Ramp width at the support edges, as a fraction of the support width.
    pub margin_fraction: f64,
}

impl Default for Coefficients {
    fn default() -> Self {
        Self {
            b: CoefficientProfile::Bump {
                center: 0.6,
                width: 0.2,
                amplitude: 0.5,
            },
            btilde: CoefficientProfile::Constant { value: 1.0 },
            margin_fraction: BlendOptions::default().margin_fraction,
        }
    }
}

/// x-profile placed in each listed mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialProfile {
    Zero,
    /// `amplitude * smooth_bump((x - center)/width)`.
    Bump {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// First Dirichlet sine of Ω₁', zero elsewhere.
    SubdomainSine { amplitude: f64 },
    /// L²-normalized ground eigenvector of the mode operator with `b̃`.
    GroundState { amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialData {
    /// Profile of `u⁰`; `ũ⁰` is the same unless `tilde` is given.
    pub profile: InitialProfile,
    pub tilde: Option<InitialProfile>,
    /// Modes carrying the profile; empty means the protocol mode only.
    pub modes: Vec<usize>,
}

impl Default for InitialData {
    fn default() -> Self {
        Self {
            profile: InitialProfile::Bump {
                center: 0.55,
                width: 0.4,
                amplitude: 1.0,
            },
            tilde: None,
            modes: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ensemble {
    pub count: usize,
    pub master_seed: u64,
    /// Relative Gaussian noise on measured data (reconstruction only).
    pub noise_level: f64,
    /// Run `i` uses mode `modes[i % modes.len()]`.
    pub modes: Vec<usize>,
    /// Ranges for the random planted bump in `b`.
    pub b_center: [f64; 2],
    pub b_width: [f64; 2],
    pub b_amplitude: [f64; 2],
    /// Ranges for the random bump initial data.
    pub data_center: [f64; 2],
    pub data_width: [f64; 2],
    pub data_amplitude: [f64; 2],
}

impl Default for Ensemble {
    fn default() -> Self {
        Self {
            count: 50,
            master_seed: 20_240_917,
            noise_level: 0.0,
            modes: vec![1, 2, 4, 8, 16],
            b_center: [0.5, 0.7],
            b_width: [0.12, 0.18],
            b_amplitude: [0.2, 0.8],
            data_center: [0.45, 0.65],
            data_width: [0.25, 0.33],
            data_amplitude: [0.5, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Sweep {
    /// Modes of the eigenvalue scaling fit.
    pub eigen_modes: Vec<usize>,
    /// Snapshot times of the `T₁` sweep; empty disables it.
    pub t_snap_list: Vec<f64>,
    /// `T - T₁` used in the `T₁` sweep.
    pub horizon_margin: f64,
}

impl Default for Sweep {
    fn default() -> Self {
        Self {
            eigen_modes: (8..=64).collect(),
            t_snap_list: Vec::new(),
            horizon_margin: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Output {
    pub directory: PathBuf,
    pub formats: Vec<Format>,
    /// Store every `stride`-th time step in trajectory CSVs.
    pub stride: usize,
}

impl Default for Output {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            formats: vec![Format::Json, Format::Csv],
            stride: 10,
        }
    }
}

impl Output {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

impl ExperimentConfig {
    pub fn subdomain(&self) -> SubdomainSpec {
        let [lo, hi] = self.geometry.subdomain;
        SubdomainSpec {
            lo,
            hi,
            delta: self.geometry.delta,
        }
    }

    pub fn observation(&self) -> Interval {
        let [lo, hi] = self.geometry.observation;
        Interval { lo, hi }
    }

    pub fn blend(&self) -> BlendOptions {
        BlendOptions {
            margin_fraction: self.coefficients.margin_fraction,
            lipschitz: self.physics.lipschitz,
        }
    }

    /// Modes that carry initial data.
    pub fn data_modes(&self) -> Vec<usize> {
        if self.initial_data.modes.is_empty() {
            vec![self.protocol.mode]
        } else {
            self.initial_data.modes.clone()
        }
    }

    /// Every violated constraint, in a fixed order.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        let g = &self.geometry;
        let d = &self.discretization;
        let p = &self.physics;
        let pr = &self.protocol;

        let [a, b] = g.omega1;
        let domain_ok = a.is_finite() && b.is_finite() && a < b;
        if !domain_ok {
            v.push(format!("geometry: omega1 needs finite a < b, got [{a}, {b}]"));
        }
        if let Err(e) = SubdomainSpec::new(g.subdomain[0], g.subdomain[1], g.delta) {
            v.push(format!("geometry: subdomain: {e}"));
        } else if domain_ok && !(g.subdomain[0] > a && g.subdomain[1] < b) {
            v.push("geometry: subdomain not compactly inside omega1".into());
        }
        let [o_lo, o_hi] = g.observation;
        if !(o_lo < o_hi && (!domain_ok || (o_lo >= a && o_hi <= b))) {
            v.push(format!(
                "geometry: observation window [{o_lo}, {o_hi}] must be a nonempty part of omega1"
            ));
        }
        if !(g.l2 > 0.0 && g.l2.is_finite()) {
            v.push(format!("geometry: l2 must be positive, got {}", g.l2));
        }

        if d.n_cells < MIN_CELLS {
            v.push(format!("discretization: n_cells must be at least {MIN_CELLS}"));
        }
        if !(d.dt > 0.0 && d.dt.is_finite()) {
            v.push(format!("discretization: dt must be positive, got {}", d.dt));
        }
        if d.n_max == 0 {
            v.push("discretization: n_max must be at least 1".into());
        }
        if d.n_y_quad < 4 * d.n_max {
            v.push(format!(
                "discretization: n_y_quad = {} aliases {} modes (need at least {})",
                d.n_y_quad,
                d.n_max,
                4 * d.n_max
            ));
        }

        if !(p.gamma > 0.0 && p.gamma <= 1.0) {
            v.push(format!("physics: gamma out of (0,1]: {}", p.gamma));
        }
        if !(p.s > 0.5 && p.s.is_finite()) {
            v.push(format!("physics: s must exceed 1/2, got {}", p.s));
        }
        if !(p.m_lower > 0.0 && p.m_lower <= 1.0 && p.m_upper >= 1.0 && p.m_upper.is_finite()) {
            v.push(format!(
                "physics: need 0 < m_lower <= 1 <= m_upper, got {} and {}",
                p.m_lower, p.m_upper
            ));
        }
        if !(p.lipschitz > 0.0) {
            v.push(format!("physics: lipschitz must be positive, got {}", p.lipschitz));
        }

        if !(pr.t1 > 0.0 && pr.t1 < pr.t_snap && pr.t_snap < pr.t_final && pr.t_final.is_finite()) {
            v.push(format!(
                "protocol ordering: need 0 < t1 < t_snap < t_final, got {} < {} < {}",
                pr.t1, pr.t_snap, pr.t_final
            ));
        }
        if d.dt > pr.t1 {
            v.push(format!("protocol: dt = {} exceeds t1 = {}", d.dt, pr.t1));
        }
        if !(pr.k1 >= 0.0 && pr.k1.is_finite()) {
            v.push(format!("protocol: k1 must be nonnegative, got {}", pr.k1));
        }
        check_modes(&mut v, "protocol: mode", &[pr.mode], d.n_max);
        check_modes(&mut v, "initial_data: modes", &self.initial_data.modes, d.n_max);

        self.check_coefficients(&mut v);

        let e = &self.ensemble;
        if e.count == 0 {
            v.push("ensemble: count must be at least 1".into());
        }
        if e.modes.is_empty() {
            v.push("ensemble: modes must not be empty".into());
        }
        check_modes(&mut v, "ensemble: modes", &e.modes, d.n_max);
        if !(e.noise_level >= 0.0 && e.noise_level.is_finite()) {
            v.push(format!("ensemble: noise_level must be nonnegative, got {}", e.noise_level));
        }
        for (name, r) in [
            ("b_center", e.b_center),
            ("b_width", e.b_width),
            ("b_amplitude", e.b_amplitude),
            ("data_center", e.data_center),
            ("data_width", e.data_width),
            ("data_amplitude", e.data_amplitude),
        ] {
            if !(r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]) {
                v.push(format!("ensemble: {name} needs lo <= hi, got [{}, {}]", r[0], r[1]));
            }
        }
        if !(e.b_width[0] > 0.0 && e.data_width[0] > 0.0) {
            v.push("ensemble: bump widths must be positive".into());
        }
        if e.b_center[0] - e.b_width[1] < g.subdomain[0] || e.b_center[1] + e.b_width[1] > g.subdomain[1] {
            v.push("ensemble: random bumps in b can leave the subdomain".into());
        }
        if e.data_center[0] - e.data_width[1] <= a || e.data_center[1] + e.data_width[1] >= b {
            v.push("ensemble: random initial bumps can leave omega1".into());
        }
        let peak = 1.0 + e.b_amplitude[0].min(0.0);
        let top = 1.0 + e.b_amplitude[1].max(0.0);
        if peak < p.m_lower || top > p.m_upper {
            v.push(format!(
                "ensemble: b_amplitude range leaves [m_lower, m_upper] = [{}, {}]",
                p.m_lower, p.m_upper
            ));
        }

        let s = &self.sweep;
        if s.eigen_modes.windows(2).any(|w| w[0] >= w[1]) {
            v.push("sweep: eigen_modes must be strictly ascending".into());
        }
        check_modes(&mut v, "sweep: eigen_modes", &s.eigen_modes, d.n_max);
        if let Some(t) = s.t_snap_list.iter().find(|&&t| !(t > pr.t1 && t.is_finite())) {
            v.push(format!("sweep: t_snap_list entry {t} must exceed t1 = {}", pr.t1));
        }
        if !(s.horizon_margin > 0.0) {
            v.push(format!("sweep: horizon_margin must be positive, got {}", s.horizon_margin));
        }

        if self.output.formats.is_empty() {
            v.push("output: formats must not be empty".into());
        }
        if self.output.stride == 0 {
            v.push("output: stride must be at least 1".into());
        }
        v
    }

    /// Builds both coefficient fields on a coarse probe of the configured grid
    /// so that bound violations surface as configuration errors.
    fn check_coefficients(&self, v: &mut Vec<String>) {
        let [a, b] = self.geometry.omega1;
        let Ok(support) = SubdomainSpec::new(
            self.geometry.subdomain[0],
            self.geometry.subdomain[1],
            self.geometry.delta,
        ) else {
            return;
        };
        let Ok(grid) = build_grid(a, b, self.discretization.n_cells.max(MIN_CELLS)) else {
            return;
        };
        if support.check_inside(&grid).is_err() {
            return;
        }
        let p = &self.physics;
        if !(p.m_lower > 0.0 && p.m_lower <= 1.0 && p.m_upper >= 1.0) {
            return;
        }
        if !(self.coefficients.margin_fraction > 0.0 && self.coefficients.margin_fraction < 0.5) {
            v.push(format!(
                "coefficients: margin_fraction must lie in (0, 1/2), got {}",
                self.coefficients.margin_fraction
            ));
            return;
        }
        for (name, profile) in [("b", &self.coefficients.b), ("btilde", &self.coefficients.btilde)] {
            if let Err(e) = make_coefficient(&grid, support, profile, p.m_lower, p.m_upper, self.blend()) {
                v.push(format!("coefficients: {name}: {e}"));
            }
        }
    }
}

fn check_modes(v: &mut Vec<String>, what: &str, modes: &[usize], n_max: usize) {
    if let Some(n) = modes.iter().find(|&&n| n == 0 || n > n_max) {
        v.push(format!("{what}: {n} outside 1..={n_max}"));
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ExperimentError> {
    let config: ExperimentConfig =
        toml::from_str(text).map_err(|e| ExperimentError::Config(vec![e.message().to_string()]))?;
    let violations = config.violations();
    if violations.is_empty() {
        Ok(config)
    } else {
        Err(ExperimentError::Config(violations))
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ExperimentError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ExperimentError::Io(format!("{}: {e}", path.display())))?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = parse_config("").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert_eq!(c.physics.gamma, 0.5);
        assert_eq!(c.data_modes(), vec![1]);
    }

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::default();
        let text = toml::to_string(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }

    #[test]
    fn protocol_ordering_reported() {
        let err = parse_config("[protocol]\nt1 = 0.3\nt_snap = 0.2\n").unwrap_err();
        let ExperimentError::Config(msgs) = err else { panic!() };
        assert!(msgs.iter().any(|m| m.contains("protocol ordering")));
    }

    #[test]
    fn gamma_out_of_range_reported() {
        let err = parse_config("[physics]\ngamma = 1.5\n").unwrap_err();
        let ExperimentError::Config(msgs) = err else { panic!() };
        assert!(msgs.iter().any(|m| m.contains("gamma out of (0,1]")));
    }

    #[test]
    fn all_violations_collected() {
        let text = "[physics]\ngamma = 0.0\ns = 0.25\n[protocol]\nt1 = 1.0\n";
        let ExperimentError::Config(msgs) = parse_config(text).unwrap_err() else { panic!() };
        assert!(msgs.len() >= 3, "{msgs:?}");
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(parse_config("[physics]\ngama = 0.5\n").is_err());
        assert!(parse_config("typo = 1\n").is_err());
        let text = "[coefficients.b]\nkind = \"constant\"\nvalue = 1.0\nextra = 2\n";
        assert!(parse_config(text).is_err());
    }

    #[test]
    fn coefficient_bounds_checked() {
        let text = "[coefficients.b]\nkind = \"bump\"\ncenter = 0.6\nwidth = 0.2\namplitude = 5.0\n";
        let ExperimentError::Config(msgs) = parse_config(text).unwrap_err() else { panic!() };
        assert!(msgs.iter().any(|m| m.starts_with("coefficients: b:")));
    }

    #[test]
    fn profile_variants_parse() {
        let text = "[initial_data]\nmodes = [1, 3]\n[initial_data.profile]\nkind = \"subdomain_sine\"\namplitude = 2.0\n";
        let c = parse_config(text).unwrap();
        assert_eq!(c.initial_data.profile, InitialProfile::SubdomainSine { amplitude: 2.0 });
        assert_eq!(c.data_modes(), vec![1, 3]);
    }
}
