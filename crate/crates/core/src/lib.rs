//! Exact solution of the one-dimensional hydrogen atom with the deformed
//! commutator `[X, P] = i(1 + βP²)`, in units ħ = 2m = 1.
//!
//! The crate computes the bound-state spectrum by several independent routes
//! (closed form, Hermiticity-condition root finding, single-valuedness,
//! perturbative series, Bohr–Sommerfeld action), evaluates the momentum-space
//! eigenfunctions together with their consistency conditions, and transforms
//! them to quasiposition and coordinate space.
//!
//! ```
//! use gup_hydrogen::{spectrum, ModelParams};
//!
//! let params = ModelParams::new(1.0, 0.01).unwrap();
//! let ground = spectrum::energy_closed_form(&params, 1).unwrap();
//! assert!((ground.energy + 0.2277).abs() < 1e-4);
//! ```

pub mod error;
pub mod model;
pub mod numerics;
pub mod spectrum;
pub mod wavefunction;
pub mod localization;
pub mod coordinate;
pub mod semiclassical;
pub mod export;
pub mod verify;

pub use error::{Error, Result};
pub use model::{
    cumulative_integral, interval_half_width, AbscissaKind, EnergyLevel, Method, ModelParams,
    MomentumGrid, SampledWaveFunction, SpectrumTable, Tolerances,
};
