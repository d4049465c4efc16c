//! Simulation and numerical analysis for a kernel-based spatial SIR epidemic
//! on the discrete torus.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] and [`kernel`]: the periodic lattice, the discretised infection
//!   kernel and normalised convolution.
//! * [`particle`]: exact continuous-time simulation of the particle system.
//! * [`pde`]: the nonlocal hydrodynamic system integrated with classic RK4.
//! * [`meanfield`]: the space-homogeneous ODE, phase plane and final-size roots.
//! * [`final_density`]: the spatial final-survivor fixed point and the inverse
//!   problems (infer the infection strength, infer the initial infectors).
//! * [`experiments`]: config parsing, convergence and critical sweeps, output.

// `!(x >= a)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod experiments;
pub mod final_density;
pub mod grid;
pub mod kernel;
pub mod meanfield;
pub mod observables;
pub mod particle;
pub mod pde;
pub mod profile;
pub mod rng;
pub(crate) mod roots;

pub use error::{Error, Result};
pub use grid::TorusGrid;
pub use kernel::{DiscreteKernel, KernelShape, KernelSpec};
