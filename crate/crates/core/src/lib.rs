//! Casimir free energies and forces for plane-parallel multilayer stacks.
//!
//! Everything is evaluated on the imaginary frequency axis in natural units
//! (ħ = c = k_B = 1): lengths in an arbitrary unit, energies per area in
//! inverse length cubed, forces per area in inverse length to the fourth.

pub mod cxmat;
pub mod error;
pub mod force;
pub mod materials;
pub mod quad;
pub mod spectral;
pub mod stack;
pub mod thermo;

pub use cxmat::{CMat, MatError};
pub use error::{Error, Result};
pub use force::{force_diagonal, force_general, force_on_body, ForceQuery};
pub use materials::{Basis, CoeffPair, EpsModel, Incidence, Material, WaveNumbers};
pub use spectral::{char_fn, tilde_char_fn, CharValue, TildeCharValue};
pub use stack::{LayerStack, Region, Segment, Side};
pub use thermo::{casimir_energy, work, ObservableResult, QuadratureSpec, ThermalSpec};

/// Crate version, recorded in CLI output headers.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
