//! Spectral tools for the Lagrangian-averaged Navier-Stokes (LANS-α) equations
//! on the periodic torus: Fourier operators, Littlewood-Paley blocks and Besov
//! norms, numerical checks of the harmonic-analysis inequalities, mild and
//! marched solvers, and a priori monitors.

pub mod apriori;
pub mod dynamics;
pub mod ensemble;
pub mod error;
mod fft;
pub mod field;
pub mod grid;
pub mod inequality;
pub mod io;
pub mod lp;
pub mod pipeline;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{Field, PhysicalField, ScalarField, SpectralVectorField, TensorField};
pub use grid::TorusGrid;
pub use lp::{BesovIndex, DyadicPartition, Profile};
