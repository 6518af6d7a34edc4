//! Exact constructions of axis-aligned box and straight-line families in R³
//! whose intersection graphs have large girth and large chromatic number,
//! together with the exact machinery that verifies every instance.
//!
//! - [`rat`] and [`geom`]: rational scalars and geometric predicates.
//! - [`gallai`]: certificates for sparse arithmetic Ramsey sets.
//! - [`graph`]: intersection graphs, girth, colouring.
//! - [`boxworld`] and [`lineworld`]: the two recursive constructions.
//! - [`scene`]: file formats.

// Errors carry the exact offending values; they are built once per failure.
#![allow(clippy::result_large_err)]

pub mod boxworld;
pub mod error;
pub mod gallai;
pub mod geom;
pub mod graph;
pub mod lineworld;
pub mod plucker;
pub mod rat;
pub mod scene;
pub mod structure;

pub use boxworld::BoxFamily;
pub use error::{BudgetExhausted, GeomError};
pub use gallai::{GallaiCertificate, GallaiError, GroundSet, HomotheticCopy, ProviderPolicy};
pub use geom::{AxisMap3, Box3, Dir3, Homothety1D, Homothety3D, Interval, Line3, Plane3, Point3};
pub use graph::{ChromaticOutcome, ColoringCertificate, GeoGraph};
pub use lineworld::{LineFamily, ShiftSystem};
pub use rat::Rat;
pub use scene::Scene;
