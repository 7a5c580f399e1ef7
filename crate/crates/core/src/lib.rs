//! Conditional-independence statements, their redundancy with respect to
//! graphical models, and structure discovery that exploits it.

pub mod cimodel;
pub mod discovery;
pub mod citest;
pub mod error;
pub mod experiments;
pub mod graphoid;
pub mod graphs;
pub mod redundancy;
pub mod synth;

pub use error::{Error, Result};
