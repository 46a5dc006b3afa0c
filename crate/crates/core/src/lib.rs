//! Exact polyhedral computation for projecting entropy cones onto network
//! coding rate regions, with optional exploitation of symmetry.

pub mod chm;
pub mod dd;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod netinfo;
pub mod lp;
pub mod polyhedra;
pub mod rational;
pub mod symchm;

pub use error::{Error, Result};
pub use rational::Q;
