//! Rotational stability and slip models for objects held in compliant
//! two-finger precision grasps.
//!
//! The fingers are lumped into a linear spring pair `(k_n, k_t)` acting at
//! radius `r` from the object's center of mass. From that model the crate
//! derives:
//!
//! - energies, restoring torque and contact forces as functions of the
//!   rotation angle ([`grasp`]),
//! - linearized stability, rest angle, slip angle and the critical preloads
//!   ([`stability`]),
//! - fixed-step time integration with event detection ([`dynamics`]),
//! - friction and stiffness identification from force traces ([`friction`],
//!   [`stiffness`]),
//! - grid search over measured stiffness maps ([`optim`]).
//!
//! Everything is in SI units. The crate is `no_std` and only needs `alloc`;
//! file formats and the command line live in the companion `softgrasp` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod math;

pub mod dynamics;
pub mod friction;
pub mod grasp;
pub mod optim;
pub mod stability;
pub mod stiffness;
pub mod synthetic;
pub mod units;

pub use error::{Error, Result, SegmentationFailure};
pub use grasp::{ContactForces, GraspConfig, InertiaShape, SystemState};
pub use stability::{analyze, StabilityReport};
