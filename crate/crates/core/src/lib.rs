//! Finite-element solver for the 2D incompressible Navier-Stokes equations in
//! the generic-projection / unconstrained pressure Poisson (GePUP) form.
//!
//! The evolved unknown is a non-solenoidal velocity `w`; the divergence-free
//! velocity `u` and the pressure `q` are recovered from it by two Neumann
//! Poisson solves. Time stepping uses additive ERK-ESDIRK Runge-Kutta pairs
//! with the viscous term implicit and everything else explicit.
//!
//! The crate is `no_std` (with `alloc`) when the default `std` feature is
//! disabled. File formats and the command line live in `gepup-cli`.

#![cfg_attr(not(any(feature = "std", test)), no_std)]

extern crate alloc;

pub mod bench;
pub mod error;
pub mod fem;
pub mod gepup;
pub mod imex;
pub mod linsolve;
pub mod math;
pub mod mesh;

pub use error::{Error, Result};
