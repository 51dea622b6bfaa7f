//! Boundary integral operators for the Laplace and Stokes equations on
//! suspensions of spheres, with spectrally accurate singular and
//! near-singular evaluation.
//!
//! The library is organized around the standard Gauss-Legendre x equispaced
//! spherical grid ([`grid::SphGrid`]), scalar and vector spherical harmonic
//! transforms ([`harmonics`]), closed-form layer-operator spectra
//! ([`spectra`]), Wigner rotations ([`rotation`]), quadrature and
//! near-singular evaluation ([`evaluation`]), GMRES-driven boundary integral
//! solvers ([`solver`]) and two multiphysics case studies ([`applications`]).

pub mod applications;
pub mod coeffs;
pub mod error;
pub mod evaluation;
pub mod grid;
pub mod harmonics;
pub mod legendre;
pub mod linalg;
pub mod rotation;
pub mod solver;
pub mod spectra;
pub mod synthetic;

pub use coeffs::{ScalarCoeffs, VectorCoeffsVWX, VectorCoeffsYGX};
pub use error::Error;
pub use grid::{GridSpec, SphGrid};
pub use spectra::OperatorKind;

pub type Complex = num_complex::Complex64;

/// Largest supported truncation order.
pub const P_MAX: usize = 256;
