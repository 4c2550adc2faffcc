//! The splicing engine: fixed-support-size best-subset solves for the
//! gaussian, logistic and poisson families.

pub mod config;
pub mod family;
pub mod fit;
pub mod model;
pub mod sacrifice;
pub mod splice;

pub use config::SplicingConfig;
pub use family::{family_loss_grad_weights, unpenalized_loss, Family, LossEval};
pub use fit::fit_on_active;
pub use model::{ActiveModel, Problem};
pub use sacrifice::{compute_sacrifices, SacrificeTable};
pub use splice::{solve_fixed_support, splice_once};
