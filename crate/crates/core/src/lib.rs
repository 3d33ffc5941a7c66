pub mod cones;
pub mod dynamics;
pub mod error;
pub mod extreal;
pub mod groups;
pub mod linalg;
mod lp;
pub mod presets;
mod sampling;
pub mod solver;
pub mod timeform;
pub mod verify;

pub use error::{Error, Result};
pub use extreal::ExtReal;
pub use linalg::{Covector, Vector};
