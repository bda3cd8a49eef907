//! Lattice Yang-Mills gauge fields on the dyadic 2-torus: Monte Carlo
//! sampling (Wilson and Villain actions, U(1) and SU(2)), axial and binary
//! Landau gauge fixing, and discrete Hölder/variation norms of the
//! resulting one-forms.

pub mod field;
pub mod gaugefix;
pub mod group;
pub mod lattice;
pub mod norms;
pub mod sampler;
pub mod snapshot;
pub mod stats;

pub use field::{AntiDevelopment, GaugeField, GaugeTransform, OneForm};
pub use group::{AlgebraVector, LieGroup, Su2, U1};
pub use lattice::{Axis, AxisSegment, Bond, Coord, Rect};
