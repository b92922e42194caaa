//! Numerical laboratory for Grushin-type degenerate parabolic equations
//! `∂_t u - Δ_x u - |x|^{2γ} b(x) Δ_y u = 0` on `Ω₁ × Ω₂`, their Fourier-mode
//! reduction in `y`, and the inverse problem of recovering `b` from
//! interior observations.

pub mod coefficient;
pub mod eigen_analysis;
pub mod error;
pub mod experiment;
pub mod grid;
pub mod mode_pde;
pub mod spectral;
pub mod stability;
pub mod tridiag;

pub use error::{LabError, Result};
