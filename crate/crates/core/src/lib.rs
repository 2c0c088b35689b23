//! Penrose-transform spectral calculus for sharp Strichartz inequalities of
//! the wave equation.
//!
//! Solutions of the free wave equation on ℝ^{1+d} are lifted to the Einstein
//! cylinder ℝ×S^d, where they expand in spherical harmonics with explicit time
//! dependence. On top of that representation the crate evaluates Strichartz
//! norms and deficit functionals, certifies spectral gaps of the second
//! variation at the extremizer, computes the criticality integral I(d) exactly
//! and numerically, and estimates the distance to the extremizer manifold.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); exact identities
//! use arbitrary-precision rationals.

pub mod criticality;
pub mod deficit;
pub mod error;
pub mod harmonics;
pub mod legendre;
pub mod optim;
pub mod penrose;
pub mod quadform;
pub mod quadrature;
pub mod random;
pub mod report;
pub mod scalar;
pub mod spacetime;
pub mod trigpoly;

pub use error::{Error, Result};
pub use harmonics::{CoeffField, DataPair, MultiIndex, NormFamily, SphereGrid};
pub use penrose::{CylinderPoint, GroupParams};
pub use quadform::BandedQuadForm;
pub use scalar::Real;
pub use trigpoly::TrigPoly;

pub type CoeffField64 = CoeffField<f64>;
pub type CoeffField32 = CoeffField<f32>;
pub type DataPair64 = DataPair<f64>;
pub type DataPair32 = DataPair<f32>;
pub type SphereGrid64 = SphereGrid<f64>;
pub type GroupParams64 = GroupParams<f64>;
pub type CylinderPoint64 = CylinderPoint<f64>;
