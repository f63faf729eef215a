//! Construction and numerical certification of a rank-(n-1) convex function
//! that is not quasiconvex with respect to divergence-free matrix fields.
//!
//! The crate is organised in three layers:
//!
//! * [`matcore`]: dense matrices, the three-generator subspace `L` for every
//!   `(n, m)`, the cubic `f` on `L` and its quartic extension `F`.
//! * [`convexity`]: numeric ranks, sphere scans of the generated pencil,
//!   line-convexity tests and the search for the penalty weight `k`.
//! * [`torus`]: periodic trigonometric matrix fields, exact quadrature and the
//!   quasiconvexity defect `∫F(B) − F(∫B)`.
//!
//! [`tartar`] ties the last two together for quadratic forms.

pub mod convexity;
mod error;
pub mod matcore;
pub mod optim;
pub mod tartar;
pub mod torus;

pub use error::{Error, Result};
pub use matcore::{
    CoordTriple, DiagRule, DiagSlot, Extension, ExtensionParams, Mat, SpanBasis,
};
