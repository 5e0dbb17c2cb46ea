//! Certified region-of-attraction estimation from fixed trajectory data.
//!
//! Learns a continuous piecewise-affine Lyapunov function for an unknown
//! Lipschitz dynamical system from a finite set of (state, velocity) samples.
//! The decrease condition is made robust to every dynamics consistent with the
//! data by a second-order cone program; a successful solve yields a stability
//! certificate and a sublevel-set region-of-attraction estimate.
//!
//! The crate is `no_std`-compatible (with `alloc`); file formats, the CLI and
//! plotting live in the companion `roacert-cli` crate.

#![cfg_attr(not(any(test, feature = "std")), no_std)]

extern crate alloc;

pub mod dataset;
pub mod geometry;
pub mod lyapunov;
pub mod math;
pub mod program;
pub mod rng;
pub mod solver;
pub mod verify;
