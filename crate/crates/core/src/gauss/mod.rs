//! Quadratic character sums, twisted Poisson summation and the smooth
//! weights used by the family sums.

pub mod bump;
pub mod poisson;
pub mod sums;

pub use bump::{bump_j, mellin_j, partition_g, window_v, BumpFunction, BumpKind};
pub use poisson::{fourier_cos_sin_transform, poisson_check, PoissonVariant};
pub use sums::{gauss_sum_closed, gauss_sum_direct, GaussSumValue};
