pub mod angles;
pub mod circuits;
pub mod configuration;
pub mod derived;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod graph;
pub mod packing;
pub mod inscribability;
pub mod inscription;
pub mod rational;
pub mod simplex;
pub mod sphere;
pub mod surface;

pub use error::{Error, Result};
pub use graph::{PlanarGraph, ValidationReport};
