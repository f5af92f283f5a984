//! Exact computations in the hyperspace of compact subsets of `[0,1]^d`:
//! Hausdorff distances, Hutchinson iteration, coded Cantor-like families,
//! and certified porosity constructions.
//!
//! All arithmetic is rational; floats appear only when rendering.

pub mod coded_family;
pub mod error;
pub mod formats;
pub mod hutchinson;
pub mod hyperspace;
pub mod maps;
pub mod scalar;
pub mod theorems;

pub use coded_family::{expand, Code, CodedSystem, NodeAddress};
pub use error::{Error, Result};
pub use formats::{parse_set, AnySet, SetFile};
pub use hutchinson::{hutchinson_apply, iterate_weak, solve_attractor, AttractorResult};
pub use hyperspace::{hausdorff_distance, hausdorff_distance_d, CompactSet1D, CompactSetD, Interval};
pub use maps::{ContractionMap, Ifs};
pub use scalar::Scalar;
