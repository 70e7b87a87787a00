use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper limits on dense objects built from `(d, N)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeBudget {
    /// Largest allowed row or column count of a superoperator matrix.
    pub max_superop_side: usize,
    /// Largest allowed side of a Choi matrix.
    pub max_choi_side: usize,
    /// Largest allowed entry count of an embedding isometry.
    pub max_isometry_entries: usize,
}

impl Default for SizeBudget {
    fn default() -> Self {
        Self {
            max_superop_side: 10_000,
            max_choi_side: 1_000,
            max_isometry_entries: 20_000_000,
        }
    }
}

impl SizeBudget {
    pub(crate) fn check(what: &'static str, required: usize, allowed: usize) -> Result<()> {
        if required > allowed {
            return Err(Error::BudgetExceeded {
                what,
                required,
                allowed,
            });
        }
        Ok(())
    }
}

/// `base^exp` saturating at `usize::MAX`.
pub(crate) fn saturating_pow(base: usize, exp: usize) -> usize {
    (0..exp).fold(1usize, |acc, _| acc.saturating_mul(base))
}
