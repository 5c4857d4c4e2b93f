//! Separable Stäckel (Benenti) systems, their reduction to stationary KdV,
//! and the band spectra of the resulting Hill operators.
//!
//! The chain runs Neumann system → separated ODEs → `w(x; μ)` and
//! `u = 2w₁` → explicit Hill eigenfunctions and band classification, with
//! an independent Cartesian integrator and a Floquet discriminant as cross
//! checks.

#![no_std]

extern crate alloc;

pub mod benenti;
pub mod defaults;
mod error;
pub mod fd;
pub mod hill;
pub mod kdv;
pub mod ode;
pub mod poly;
mod prelude;
pub mod separation;
pub mod systems;

pub use error::{Error, Result};
