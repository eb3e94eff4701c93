//! Combinatorial embedded contact homology: action-filtered F2 chain
//! complexes with U-maps, the connected-sum mapping cone, index formulas and
//! spectral invariants.

pub mod connect;
pub mod ech_core;
pub mod error;
pub mod homalg;
pub mod index;
pub mod io;
pub mod models;
pub mod par;
pub mod rational;
pub mod spectral;

pub use error::{Error, Result};
pub use rational::Rational;
