//! Local behaviour synthesis, verification and simulation for emergent
//! pattern formation in swarms of reactive agents on a square lattice.

pub mod behavior;
pub mod continuum;
pub mod error;
pub mod graphs;
pub mod grid;
pub mod io;
pub mod lattice;
pub mod patterns;
pub mod plot;
pub mod stats;
pub mod uniqueness;

pub use behavior::{Behavior, BehaviorSpec, Derivation, SafeActionMap, StateSet, StateSets};
pub use error::{Error, Result};
pub use lattice::{Cell, Direction, DirectionSet, LocalState, Pattern};
