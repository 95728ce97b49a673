//! Renormalized Riesz potentials and energies of curves and surfaces.
//!
//! The central objects are the renormalized `r^{-2}` potential of a closed
//! curve and the renormalized `r^{-4}` potential of a closed surface: the
//! singular pairwise kernel is integrated outside a chord-distance ball of
//! radius `eps`, the known divergent counterterms are subtracted, and the
//! constant term of the remaining expansion in `eps` is extracted.  For tori
//! of revolution the library carries the closed forms of the potential and
//! the energy alongside the numeric pipeline, so each side can check the
//! other; the energy is minimized over the family at the Clifford-torus
//! ratio `R = sqrt(2)`.
//!
//! The crate is `no_std`-compatible (with `alloc`); the `std` feature is on
//! by default and `parallel` adds deterministic rayon-backed evaluation of
//! independent work items.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod closed;
pub mod curve;
pub mod cutoff;
pub mod error;
pub mod fit;
pub mod math;
pub mod moebius;
pub mod quad;
pub mod renorm;
pub mod surface;
pub mod vec3;

mod linalg;
mod parallel;

pub use error::{Error, Result};
pub use fit::{AsymptoticFit, BasisTerm};
pub use quad::{CutoffSample, QuadratureConfig};
pub use renorm::{EnergyMethod, EnergyReport, RenormConfig, RenormPotentialResult};
pub use surface::{RevolutionTorus, Sphere, Surface, SurfacePointData};
pub use vec3::Vec3;
