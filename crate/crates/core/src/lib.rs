//! Helix (constant-angle) surfaces in the Berger sphere S^3_ε.
//!
//! A helix surface is one whose unit normal makes a constant angle with the
//! Hopf vector field. Such surfaces are parametrized as `F(u, v) = A(v) β(u)`
//! where `β` is a geodesic of a flat torus in S^3 and `A(v)` a one-parameter
//! family of orthogonal matrices commuting with the complex structure `J1`.
//!
//! The crate builds these surfaces, samples them, checks every identity they
//! are expected to satisfy, and exports meshes through stereographic
//! projection.

// `!(x >= tol)` is used deliberately so that NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod berger;
pub mod error;
pub mod family;
pub mod helix;
pub mod io;
pub mod linalg;
pub mod profile;
pub mod surface;
pub mod verify;

pub use berger::{BergerParams, FrameTriple};
pub use error::{Error, Result};
pub use family::OrthoFamily;
pub use helix::{AuxFieldParams, HelixConstants};
pub use linalg::{Mat4, Vec4};
pub use profile::{ProfileFn, XiProfile};
pub use surface::{HelixSurface, SurfaceGrid};
pub use verify::{CheckEntry, CheckReport, VerifyConfig};
