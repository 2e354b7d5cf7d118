//! Exact Hecke operator graphs for rank 2 and rank 3 vector bundles on
//! elliptic curves over F_2, F_3 and F_4.

pub mod bundle;
pub mod characters;
pub mod curve;
pub mod error;
pub mod field;
pub mod hall;
pub mod hecke;
pub mod places;
pub mod spectral;

pub use bundle::{BundleClass, Kind, Label};
pub use curve::{Curve, Point};
pub use error::{HeckeError, Result};
pub use places::{ClassPattern, Place, PlaceInfo};
