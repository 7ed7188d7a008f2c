//! Multiresolution flatness coefficients for curves in metric spaces.
//!
//! The crate samples a curve, builds nested dyadic nets over it and
//! measures how far each ball of the resulting family is from being a
//! geodesic piece. Per-ball work runs on rayon when the `parallel` feature
//! is on; reductions are always sequential and ordered, so results do not
//! depend on the number of workers.

pub mod par;

pub mod beta;
pub mod convexity;
pub mod cubes;
pub mod curve;
pub mod error;
pub mod metric;
pub mod net;
pub mod optim;
pub mod order;

pub use error::{Error, Result};
pub use metric::{MetricSpace, Point};
