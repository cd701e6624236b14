//! Random walks on trees: the polynomial system of crossing pairs, Green functions and
//! local-limit asymptotics `p^(dn+r)(x,y) ~ C·R^(-dn)·n^(-3/2)`.

#![allow(clippy::needless_range_loop)]

pub mod asymptotics;
pub mod cli;
pub mod curve_solver;
pub mod error;
pub mod green_eval;
pub mod markov_kernel;
pub mod numeric;
pub mod path_system;
pub mod perron;
pub mod tolerances;
pub mod tree_model;

pub use error::{Error, Result};
