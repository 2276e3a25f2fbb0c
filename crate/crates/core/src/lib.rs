//! Verification workbench for wrinkled fibrations and near-symplectic forms.
//!
//! The crate is layered bottom-up: [`symcalc`] supplies exact polynomials and
//! differential forms; [`models`] holds the catalog of local maps and forms;
//! [`singular`], [`nearsymp`], [`cover`] analyse them; [`homology`],
//! [`diagram`], [`moves`] handle the combinatorial side; [`jetstab`] decides
//! (1,1)-stability of the parametric families. [`acceptance`] bundles the
//! end-to-end checks shared by the CLI and the test suite.

pub mod acceptance;
pub mod cover;
pub mod diagram;
pub mod error;
pub mod homology;
pub mod jetstab;
pub mod linalg;
pub mod models;
pub mod moves;
pub mod nearsymp;
pub mod sampling;
pub mod singular;
pub mod symcalc;
pub mod tolerances;

pub use error::{Error, Result};
