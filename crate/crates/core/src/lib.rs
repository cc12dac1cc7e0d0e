#![cfg_attr(not(test), no_std)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Numerical core of a 1D quantum-hydrodynamics laboratory.
//!
//! The crate works in units ħ = 1, m = 1/2 (Hamiltonian `-∂ₓₓ + V`) and
//! covers four areas:
//!
//! - [`fields`]: periodic lattice, wavefunction and (ρ, J) containers, and
//!   the transform between them.
//! - [`schrodinger`]: Strang split-step spectral propagation and closed-form
//!   reference solutions.
//! - [`hydro`]: the quantum potential and a direct Madelung integrator,
//!   cross-validated against the spectral solver.
//! - [`instability`]: phase difference across a low-density region and its
//!   amplified response to a uniform current perturbation.
//! - [`quantization`]: series recurrences whose termination yields the
//!   harmonic spectrum and `λ = j(j+1)`.
//!
//! Everything is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! `qhlab` crate.

extern crate alloc;

pub mod error;
pub mod fft;
pub mod fields;
pub mod hydro;
pub mod instability;
pub mod numerics;
pub mod quantization;
pub mod schrodinger;

pub use error::{Error, Result};
pub use fields::{build_grid, from_hydro, gaussian_pair, norm, to_hydro, unwrap_phase, ComplexField, GaussianPairParams, Grid1D, HydroField};
pub use num_complex::Complex64;
