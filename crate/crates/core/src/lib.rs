//! Heat diffusion through a periodically cracked medium: a direct solver on
//! the exact cracked period cell and two solvers for the homogenized
//! two-domain model (Dirichlet–Neumann fixed point and a single-domain P1
//! weak form), together with the metrics used to compare them.

pub mod analysis;
pub mod direct;
pub mod error;
pub mod experiment;
pub mod fixed_point;
pub mod fv;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod params;
pub mod plot;
pub mod trajectory;
pub mod weak;

pub use error::{Error, Result};
