//! Conserved one-photon density and current.
//!
//! The crate builds one-photon states from spectral amplitudes, evaluates the
//! photon density/current bilinears of their positive-frequency fields,
//! audits the continuity equation, evaluates band-limited localized densities
//! in one and three dimensions, and propagates single photons through linear
//! optical circuits with a photon-number ledger. A truncated Fock-space
//! algebra backs the single-photon circuit results.

pub mod circuit;
pub mod cli;
pub mod density;
pub mod error;
pub mod fock;
pub mod io;
pub mod localization;
pub mod numeric;
pub mod optics;
pub mod spectral;
pub mod units;

pub use error::{Error, Result};
pub use fock::{Helicity, ModeIndex};
pub use spectral::{KGrid1D, SpectralAmplitude};
pub use units::{UnitMode, Units};
