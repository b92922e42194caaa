//! Admissible coefficient fields `b(x)`: bounded in `[m, M]`, identically one
//! outside the subdomain Ω₁', and Lipschitz on the grid.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::grid::{Grid1D, SubdomainSpec};

/// Raw shape of a coefficient before it is blended to one at the support edges.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientProfile {
    Constant {
        value: f64,
    },
    /// `1 + amplitude * exp(1 - 1/(1 - r^2))`, `r = (x - center)/width`.
    Bump {
        center: f64,
        width: f64,
        amplitude: f64,
    },
    /// Piecewise-linear interpolation of `(x, value)` pairs; one outside the table.
    Table {
        points: Vec<[f64; 2]>,
    },
}

/// Compactly supported C^∞ bump with peak value one at `r = 0`.
pub fn smooth_bump(r: f64) -> f64 {
    if r.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - r * r)).exp()
    }
}

/// C¹ cubic ramp from 0 at `t <= 0` to 1 at `t >= 1`.
pub fn smoothstep(t: f64) -> f64 {
    let t = t.clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

impl CoefficientProfile {
    pub fn raw(&self, x: f64) -> f64 {
        match self {
            Self::Constant { value } => *value,
            Self::Bump {
                center,
                width,
                amplitude,
            } => 1.0 + amplitude * smooth_bump((x - center) / width),
            Self::Table { points } => interpolate_table(points, x),
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            Self::Constant { value } if !value.is_finite() => Err(LabError::InvalidInput(
                "constant profile must be finite".into(),
            )),
            Self::Bump { width, .. } if !(*width > 0.0) => Err(LabError::InvalidInput(
                format!("bump width must be positive, got {width}"),
            )),
            Self::Table { points } => {
                if points.is_empty() {
                    return Err(LabError::InvalidInput("empty profile table".into()));
                }
                if points.windows(2).any(|w| !(w[0][0] < w[1][0])) {
                    return Err(LabError::InvalidInput(
                        "profile table abscissae must be strictly increasing".into(),
                    ));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

fn interpolate_table(points: &[[f64; 2]], x: f64) -> f64 {
    let first = points[0];
    let last = points[points.len() - 1];
    if x < first[0] || x > last[0] {
        return 1.0;
    }
    let k = points.partition_point(|p| p[0] <= x);
    if k == 0 {
        return first[1];
    }
    if k == points.len() {
        return last[1];
    }
    let [x0, y0] = points[k - 1];
    let [x1, y1] = points[k];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Blending and regularity settings for [`make_coefficient`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlendOptions {
    /// Ramp width as a fraction of the support width.
    pub margin_fraction: f64,
    /// Discrete Lipschitz cap `L_b`.
    pub lipschitz: f64,
}

impl Default for BlendOptions {
    fn default() -> Self {
        Self {
            margin_fraction: 0.05,
            lipschitz: 50.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientField {
    pub grid: Grid1D,
    pub samples: Vec<f64>,
    pub m: f64,
    pub big_m: f64,
    pub support: SubdomainSpec,
    pub lipschitz: f64,
}

pub fn make_coefficient(
    grid: &Grid1D,
    support: SubdomainSpec,
    profile: &CoefficientProfile,
    m: f64,
    big_m: f64,
    opts: BlendOptions,
) -> Result<CoefficientField> {
    check_bounds(m, big_m)?;
    profile.check()?;
    support.check_inside(grid)?;
    let margin = opts.margin_fraction * (support.hi - support.lo);
    if !(margin > 0.0) {
        return Err(LabError::InvalidInput(format!(
            "blend margin must be positive, got {margin}"
        )));
    }
    let mut samples = Vec::with_capacity(grid.len());
    for &x in &grid.nodes {
        if !support.contains(x) {
            samples.push(1.0);
            continue;
        }
        let raw = profile.raw(x);
        if !(raw >= m && raw <= big_m) {
            return Err(LabError::BoundViolation {
                x,
                value: raw,
                m,
                big_m,
            });
        }
        let ramp = smoothstep((x - support.lo).min(support.hi - x) / margin);
        samples.push(1.0 + ramp * (raw - 1.0));
    }
    let field = CoefficientField {
        grid: grid.clone(),
        samples,
        m,
        big_m,
        support,
        lipschitz: opts.lipschitz,
    };
    field.validate()?;
    Ok(field)
}

fn check_bounds(m: f64, big_m: f64) -> Result<()> {
    if !(m > 0.0 && m <= 1.0 && big_m >= 1.0 && big_m.is_finite()) {
        return Err(LabError::InvalidInput(format!(
            "coefficient bounds need 0 < m <= 1 <= M, got m = {m}, M = {big_m}"
        )));
    }
    Ok(())
}

impl CoefficientField {
    /// The identity coefficient `b ≡ 1`.
    pub fn ones(grid: &Grid1D, support: SubdomainSpec, m: f64, big_m: f64) -> Result<Self> {
        check_bounds(m, big_m)?;
        Ok(Self {
            grid: grid.clone(),
            samples: vec![1.0; grid.len()],
            m,
            big_m,
            support,
            lipschitz: BlendOptions::default().lipschitz,
        })
    }

    /// Node-by-node check of the three class invariants.
    pub fn validate(&self) -> Result<()> {
        check_bounds(self.m, self.big_m)?;
        if self.samples.len() != self.grid.len() {
            return Err(LabError::ShapeMismatch {
                expected: self.grid.len(),
                got: self.samples.len(),
            });
        }
        for (&x, &v) in self.grid.nodes.iter().zip(&self.samples) {
            if !(v >= self.m && v <= self.big_m) {
                return Err(LabError::InvalidCoefficient(format!(
                    "b({x}) = {v} outside [{}, {}]",
                    self.m, self.big_m
                )));
            }
            if !self.support.contains(x) && v != 1.0 {
                return Err(LabError::InvalidCoefficient(format!(
                    "b({x}) = {v} but must equal 1 outside the subdomain"
                )));
            }
        }
        for (i, w) in self.samples.windows(2).enumerate() {
            let slope = (w[1] - w[0]).abs() / self.grid.h;
            if slope > self.lipschitz {
                return Err(LabError::InvalidCoefficient(format!(
                    "slope {slope} between nodes {i} and {} exceeds L_b = {}",
                    i + 1,
                    self.lipschitz
                )));
            }
        }
        Ok(())
    }

    /// Nodewise `self - other`.
    pub fn difference(&self, other: &CoefficientField) -> Result<Vec<f64>> {
        crate::error::check_len(self.samples.len(), other.samples.len())?;
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a - b)
            .collect())
    }
}
