//! Best-subset sparse PCA: the cardinality-constrained unit loading with the
//! largest explained variance, found by splicing over loading supports with
//! exact eigenvalue sacrifices.

pub mod covariance;
pub mod power;
pub mod splice;

pub use covariance::CovarianceView;
pub use power::{apply_sign_convention, leading_eig, EigenPair};
pub use splice::{spca_components, spca_fixed_support, spca_path, SparseLoading, SpcaConfig, SpcaPath};
