//! Lie algebroids, linear connections and controllability tests for
//! mechanical control systems.

pub mod algebroid;
pub mod connections;
pub mod controllability;
pub mod dynamics;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod model_file;
pub mod models;
pub mod morphisms;
pub mod prolongation;
pub mod report;
pub mod systems;

pub use algebroid::{CovectorSection, LieAlgebroid, Section, StructureEntry};
pub use error::{Error, Result};
pub use expr::{parse, Expr};
