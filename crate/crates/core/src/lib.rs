//! Bivariate means defined by intersections of Hermite interpolants.

pub mod cli;
pub mod divdiff;
pub mod error;
pub mod experiments;
pub mod funcmodel;
pub mod hermite;
pub mod identities;
pub mod mean;
pub mod real;

pub use error::{Error, Result};
pub use funcmodel::FunctionModel;
