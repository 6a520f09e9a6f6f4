//! Moment constants and empirical family moments.

pub mod constants;
pub mod euler;
pub mod family;

pub use constants::{predicted_first_moment, predicted_second_moment_constant, MomentConstants};
pub use euler::{beta_function, sym_square_l1, z_alpha, zstar_halfhalf, EulerProductValue, WeightIndex};
pub use family::{
    engine_for, first_moment_run, moment_from_store, nonvanishing_count, nonvanishing_from_store, second_moment_run,
    FamilyKind, FamilySpec, JetStore, MomentKind, MomentReport, NonvanishingReport, RunStats,
};
