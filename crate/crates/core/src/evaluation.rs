//! Quadrature and potential-evaluation machinery: kernels, smooth far-field
//! quadrature, singular self-evaluation, direct and FFT-accelerated
//! near-singular evaluation, and the composite apply.

pub mod composite;
pub mod fft_near;
pub mod geometry;
pub mod kernels;
pub mod near;
pub mod quadrature;
pub mod traction_tables;

pub use composite::{composite_apply_scalar, composite_apply_vector, CompositeOptions, NearScheme};
pub use geometry::{well_separated, well_separated_targets, Sphere, Suspension, TargetBatch};
pub use quadrature::{DirectSum, FarFieldBackend, PointSources};
