//! Real spherical harmonics on S^d: indexing, evaluation, quadrature
//! transforms and coefficient-space products.

pub(crate) mod eval;
mod field;
mod grid;
mod index;
mod json;
mod ops;
pub(crate) mod plan;

pub use eval::{circle_harmonic, degree_components, eval_y, synthesize, zonal_rodrigues, NestedCoords};

pub use field::{CoeffField, DataPair};
pub use grid::{project, SphereGrid};
pub use index::{chains, harmonic_count, multi_indices, IndexTable, MultiIndex};
pub use json::{CoeffEntry, DataPairJson};
pub use ops::{apply_a, inner_h_half, inner_h_one, mult_by_x0, x0_form, NormFamily};
