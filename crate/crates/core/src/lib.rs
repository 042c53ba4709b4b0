#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod carleman;
pub mod commutator;
pub mod convexity;
pub mod error;
pub mod evolve;
pub mod cli;
pub mod io;
pub mod lattice;
pub mod sparse;
pub mod specfun;
pub mod weights;

pub use error::{Error, Result};
pub use lattice::{Field, LatticeWindow, Site};
