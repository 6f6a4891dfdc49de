//! Flat partitions for weighted homogeneous bivariate phases, with
//! verification tools and an L4 decoupling estimator.

pub mod error;
pub mod interval;
pub mod polyalg;
pub mod geometry;
pub mod partition;
pub mod estimator;
pub mod cli;
