//! Categorical gluing over finite topological spaces.
//!
//! The crate is `no_std` and needs only `alloc`. Modules build on each other:
//! [`fintop`] (spaces and maps), [`glidx`] (the gluing index category),
//! [`gdata`] (gluing data and its functor), [`glue`] (the glued space and its
//! universal property), [`refine`] (refinements and composed gluings) and
//! [`cover`] (gluing coverings and the site axioms). [`fixtures`] holds the
//! standard small spaces and gluing data used across tests and the CLI.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod cover;
pub mod fintop;
pub mod fixtures;
pub mod gdata;
pub mod glidx;
pub mod glue;
#[cfg(test)]
pub(crate) mod oracle;
pub mod pointset;
pub mod refine;

pub use fintop::{FiniteSpace, MapReport, Space, SpaceMap, TopError, DEFAULT_BUDGET};
pub use pointset::PointSet;
