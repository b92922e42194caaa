//! The stability argument as executable experiments: admissible-class test,
//! maximum-principle comparison, Harnack constant, Duhamel decay, pointwise
//! reconstruction of `b − b̃`, and the empirical stability ratio.

mod comparison;
mod duhamel;
mod harnack;
mod membership;
mod ratio;
mod reconstruct;

pub use comparison::{comparison_lower_bound, ComparisonReport, COMPARISON_TOL};
pub use duhamel::{duhamel_bound_check, measure_source_bound, DuhamelReport, SourceBound};
pub use harnack::{harnack_ratio, HarnackReport};
pub use membership::{
    check_class_membership, initial_data_norm, ClassMembershipReport, ClassParams,
};
pub use ratio::{stability_ratio, ClassCheck, StabilityInput, StabilityReport};
pub use reconstruct::{
    reconstruct_coefficient, ModeSnapshot, Reconstruction, DENOMINATOR_FLOOR,
};
