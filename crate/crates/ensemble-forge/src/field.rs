use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The division algebra a matrix lives over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldTag {
    Real,
    Complex,
    Quaternion,
}

impl FieldTag {
    /// Dyson index.
    pub fn beta(self) -> u32 {
        match self {
            FieldTag::Real => 1,
            FieldTag::Complex => 2,
            FieldTag::Quaternion => 4,
        }
    }

    pub fn from_beta(beta: u32) -> Result<Self> {
        match beta {
            1 => Ok(FieldTag::Real),
            2 => Ok(FieldTag::Complex),
            4 => Ok(FieldTag::Quaternion),
            other => Err(Error::Domain(format!("beta must be 1, 2 or 4, got {other}"))),
        }
    }

    /// Complex rows stored per logical row.
    pub fn embed(self) -> usize {
        match self {
            FieldTag::Quaternion => 2,
            _ => 1,
        }
    }
}
