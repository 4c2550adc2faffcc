//! Best-subset selection by splicing.
//!
//! Given a design matrix, a response and a model family, the engine finds the
//! support of a given size that minimizes the loss by repeatedly exchanging
//! active and inactive groups of predictors. On top of that sit support-size
//! selection by information criteria or cross-validation, a best-subset
//! sparse PCA, and a small benchmarking harness.
//!
//! - [`data`]: loading, validation, normalization, screening and folds
//! - [`engine`]: fixed-support-size splicing solves
//! - [`selection`]: warm-started paths, information criteria and CV
//! - [`spca`]: cardinality-constrained leading principal component
//! - [`bench`]: train/test benchmarking protocol and AUC
//! - [`estimator`]: a flat-array estimator surface for language bindings

pub mod bench;
pub mod data;
pub mod engine;
pub mod error;
pub mod estimator;
pub mod selection;
pub mod spca;
pub mod synthetic;

pub use data::{DesignMatrix, GroupStructure, ResponseVector};
pub use engine::{ActiveModel, Family, Problem, SplicingConfig};
pub use error::{Error, ErrorClass, Result};
pub use selection::{IcKind, SelectionReport};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
