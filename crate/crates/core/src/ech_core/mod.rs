//! Orbits, orbit sets, action filtration and filtered towers.

mod class;
mod orbit;
mod tower;

pub use class::ClassLabel;
pub use orbit::{action, action_ties, enumerate_orbit_sets, enumerate_orbit_sets_below, enumerate_orbit_sets_with, Orbit, OrbitKind, OrbitSet};
pub use tower::{action_gap_thresholds, inclusion, truncate, FilteredTower, Stabilization};
