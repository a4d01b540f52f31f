//! Numerical laboratory for circle homeomorphisms with break points.
//!
//! Rotation numbers and continued fractions, dynamical partitions built
//! from marked orbits, executable versions of the Denjoy, Finzi and
//! comparability estimates, and conjugacies between two-break maps.

pub mod cf;
pub mod circle;
pub mod conjugacy;
pub mod constants;
pub mod error;
pub mod exec;
pub mod partition;
pub mod pmap;
pub mod rotation;
pub mod sampling;
pub mod verify;

pub use cf::{cf_expand, convergents, BoundedTypeWitness, ContinuedFraction, ConvergentTable};
pub use circle::{ccw_distance, frac, sort_ccw, Arc, CirclePoint, PrecisionContext};
pub use constants::Constants;
pub use error::{Error, Result};
pub use exec::Execution;
pub use pmap::{build_moebius2, build_pl2, rotation, MapSpec, PiecewiseHomeo, Side};
pub use sampling::Sampler;
