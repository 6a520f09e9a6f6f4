//! Exact integer arithmetic: reduction data of Weierstrass models, Hecke
//! coefficients, Kronecker symbols and fundamental discriminants.

pub mod bsgs;
pub mod cache;
pub mod coeffs;
pub mod curve;
pub mod discriminant;
pub mod kronecker;
pub mod primes;

pub use cache::TableCache;
pub use coeffs::{character_values, coefficient_table, twisted_coefficients, CoefficientTable};
pub use curve::{ap, count_points_mod_p, WeierstrassCurve};
pub use discriminant::{
    enumerate_fundamental_discriminants, is_fundamental_discriminant, twist_root_number, twisted_conductor,
    DiscriminantFilter, SignFilter, TwistDescriptor,
};
pub use kronecker::kronecker;
pub use primes::PrimeSieve;
