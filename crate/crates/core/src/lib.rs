//! k-nearest-neighbour classification over general metric spaces, with the
//! geometry used to study when the rule is universally consistent.
//!
//! * [`metric_spaces`]: point types, distance families and labelled samplers.
//! * [`knn_rule`]: k-NN radius, tie-aware selection and the majority vote.
//! * [`nagata_geometry`]: ball families, dimension witnesses and counting lemmas.
//! * [`experiments`]: seeded Monte Carlo runners and CSV output.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod knn_rule;
pub mod metric_spaces;
pub mod nagata_geometry;
pub mod rng;

pub use error::{Error, Result};
