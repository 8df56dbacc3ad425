//! Killing-Yano tensors on configuration and phase space.
//!
//! The crate is organized bottom-up:
//!
//! - [`expr`]: text expressions over chart coordinates with exact first and
//!   second derivatives (second-order dual numbers).
//! - [`geometry`]: metric catalog, Christoffel symbols, curvature and the dual
//!   (momentum-space) metric.
//! - [`kysym`]: antisymmetric tensor fields, Killing-Yano residuals, Killing
//!   tensors, symplectic forms, catalog fields and a linear-ansatz solver.
//! - [`dynamics`]: Poisson and Nambu brackets, geodesic integration and the
//!   unified Hamilton flow on the Killing-Yano vector phase space.
//! - [`multipole`]: multipole and dynamical-symmetry tensors in direct and
//!   Killing-Yano form, with a numeric identity suite.
//! - [`cli`]: the `kyano` command line driver.

// index loops mirror the tensor notation
#![allow(clippy::needless_range_loop)]

pub mod cli;
pub mod dynamics;
pub mod expr;
pub mod geometry;
pub mod io;
pub mod kysym;
pub mod multipole;
pub mod sampling;
pub mod tensor;

/// Schema tag carried by every file this crate reads or writes.
pub const SCHEMA: &str = "kyano/1";
