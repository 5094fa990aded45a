//! Domains, fibers and distances.

mod csg;
mod disc;
mod domain;
pub mod shapes;

pub use csg::{Csg, Dist};
pub use disc::{disc_distance_check, AnalyticDisc, DiscDistanceReport};
pub use domain::{
    boundary_distance, fiber, fiber_distance, midpoint_closure_check, AffineFiberMap, CoordKind, Domain, FiberDomain,
};
