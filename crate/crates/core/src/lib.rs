//! Minkowski symmetry sets of closed plane curves.
//!
//! The crate works in the Lorentz-Minkowski plane with pseudo-scalar product
//! `<u, v> = -u0 v0 + u1 v1`. It traces the symmetry set (the locus of centres
//! of pseudo-circles tangent to a curve at two or more points), labels its
//! singular points, and locates and classifies the transitions that occur in
//! 1-parameter families of curves.
//!
//! The crate is `no_std` and only needs `alloc`; file formats and the command
//! line live in the `mss-tools` crate.

#![no_std]

extern crate alloc;

pub mod config;
pub mod contact;
pub mod curve;
mod error;
pub mod linalg;
mod math;
pub mod minkowski;
pub mod mss;
pub mod newton;
pub mod transition;

pub use config::Config;
pub use contact::{ContactPoint, DistDerivs};
pub use curve::{CurveFamily, FamilySlice, FourierComponent, ParamCurve, Perturbation};
pub use error::{Error, Result};
pub use minkowski::{Branch, CausalType, CircleKind, MinkVec, PseudoCircle};
pub use mss::{MssBranch, MssLabel, MssPoint, MssTrace};
pub use transition::{EventKind, Subtype, TransitionEvent};
