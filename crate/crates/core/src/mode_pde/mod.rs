//! Mode operators `G_{n,γ}`, their time integration and spectra.

mod evolution;
mod heat;
mod operator;
mod spectrum;

pub use evolution::{
    integrate_mode, solve_mode, step_mode, step_plan, time_derivative,
    time_derivative_discrepancy, ModeTrajectory, Source,
};
pub use heat::{heat_history, heat_semigroup_subdomain, DEFAULT_HEAT_DT};
pub use operator::{assemble_operator, degeneracy_weight, ModeOperator, Scheme};
pub use spectrum::{
    eigendecompose, fractional_norm, fractional_norm_adaptive, fractional_norm_with_tol,
    spectral_sum, ModeSpectrum, SpectralSum, RESIDUAL_TOL, TAIL_TOL,
};
