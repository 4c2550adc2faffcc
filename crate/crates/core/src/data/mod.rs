//! Data ingestion, validation, normalization, screening and fold assignment.

pub mod folds;
pub mod groups;
pub mod io;
pub mod matrix;
pub mod normalize;
pub mod response;
pub mod screen;

pub use folds::{make_folds, FoldAssignment};
pub use groups::GroupStructure;
pub use io::{
    load_csv, load_groups, load_matrix_csv, load_sparse, load_square_csv, write_csv, write_groups,
    write_sparse, Loaded, ResponseColumn,
};
pub use matrix::{CscMatrix, DesignMatrix, Storage};
pub use normalize::{normalize, BackTransform};
pub use response::ResponseVector;
pub use screen::{default_screen_size, sis_screen};
