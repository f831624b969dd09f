use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Unit system for all physical constants used by the field code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum UnitMode {
    #[default]
    Natural,
    Si,
}

/// Speed of light, reduced Planck constant and vacuum permittivity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Units {
    pub mode: UnitMode,
    pub c: f64,
    pub hbar: f64,
    pub eps0: f64,
}

impl Units {
    pub const SPEED_OF_LIGHT_SI: f64 = 299_792_458.0;
    pub const HBAR_SI: f64 = 1.054_571_817e-34;
    pub const EPS0_SI: f64 = 8.854_187_812_8e-12;

    pub fn natural() -> Self {
        Units {
            mode: UnitMode::Natural,
            c: 1.0,
            hbar: 1.0,
            eps0: 1.0,
        }
    }

    pub fn si() -> Self {
        Units {
            mode: UnitMode::Si,
            c: Self::SPEED_OF_LIGHT_SI,
            hbar: Self::HBAR_SI,
            eps0: Self::EPS0_SI,
        }
    }

    pub fn from_mode(mode: UnitMode) -> Self {
        match mode {
            UnitMode::Natural => Self::natural(),
            UnitMode::Si => Self::si(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c", self.c), ("hbar", self.hbar), ("eps0", self.eps0)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Domain(format!("constant {name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &'static str {
        match self.mode {
            UnitMode::Natural => "natural",
            UnitMode::Si => "si",
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        Self::natural()
    }
}
