//! Exact-arithmetic toolkit for hom-Lie algebras and algebroids: axioms,
//! twisted connections and curvature, the Θ-compatible form complex,
//! representations up to homotopy and the extensions they induce.

pub mod algebroid;
pub mod connection;
pub mod error;
pub mod extension;
pub mod forms;
pub mod homlie;
pub mod io;
pub mod linalg;
pub mod report;
pub mod ruth;
pub mod sample;

pub use error::{Error, Result};
