//! Numerical laboratory for the Timoshenko beam limit of a family of
//! three-dimensional linear elastic problems with a second-gradient penalty.

pub mod axial;
pub mod energy;
pub mod error;
pub mod field;
pub mod harness;
pub mod kinematics;
pub mod linalg;
pub mod loads;
pub mod material;
pub mod poly;
pub mod section;
pub mod solver1d;
pub mod solver3d;

pub use error::{Error, Result};
