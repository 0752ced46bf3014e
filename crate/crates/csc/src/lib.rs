//! Executable countable second-countable (CSC) spaces.
//!
//! Spaces are generated by a family of sets; the basis is the family's finite
//! intersections, indexed by finite-set codes. On top of that the crate
//! provides separation checks, recognition of the five minimal topologies,
//! the extraction pipelines that find such subspaces, encodings of
//! combinatorial instances as spaces, a finite-injury construction simulator
//! and the constraint trees used in the separation argument.

pub mod classify;
pub mod coding;
pub mod encodings;
pub mod error;
pub mod families;
pub mod forcing;
pub mod functional;
pub mod gs;
pub mod opencode;
pub mod priority;
pub mod space;
pub mod truncation;

pub use error::{CscError, Result};
pub use space::{kbar, make_generated_space, BasisIndex, CscSpace, GenIndex, GeneratorFamily, Point, PointSet, Space, Subspace};
pub use truncation::{materialize, Shared, Truncation};
