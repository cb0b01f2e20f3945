//! Complementation, switching, local complementation and pointed swaps on
//! simple binary matroids embedded in the projective geometry `PG(r-1, 2)`.
//!
//! A matroid is the restriction of `P_r` to a set of points; the set is a
//! [`GroundSet`] and doubles as the green half of a 2-colouring of `P_r`.

pub mod error;
pub mod matroid;
pub mod moves;
pub mod orbit;
pub mod properties;
pub mod space;
pub mod synthesis;

pub use error::{Error, Result};
pub use matroid::{named_matroid, ClassTable, LinearMap, Matroid};
pub use moves::{Move, MoveSequence, SwapKind, Trajectory};
pub use orbit::{coverage_report, orbit, reachable, CoverageReport, GeneratorSet, OrbitTable};
pub use space::{Element, Functional, GroundSet, Space};
