//! Exact homological algebra over F2.

mod complex;
mod homology;
pub mod matrix;
mod ops;

pub use complex::{ChainMap, GradedComplex, Generator, MapKind, ValidationReport, Violation, EMPTY_ID};
pub use homology::{homology, homology_with, induced_map, induced_map_in, HomologyResult};
pub use matrix::SparseF2Matrix;
pub use ops::{
    derived_tensor, derived_tensor_complex, h_id, mapping_cone, mapping_cone_shifted, tensor, tensor_id,
    tensor_left_u, tensor_u_sum,
};
