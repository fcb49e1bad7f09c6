//! Node/enumeration budget shared by the tree builders and orbit enumerators.
//!
//! The default of 10^6 expanded nodes keeps every desk-scale question cheap
//! while making runaway inputs fail loudly instead of thrashing.

use crate::error::{Error, Result};

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable that overrides the default budget.
pub const BUDGET_ENV: &str = "DIVHULL_BUDGET";

#[derive(Debug, Clone, Copy)]
pub struct Budget {
    limit: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::from_env()
    }
}

impl Budget {
    pub fn new(limit: u64) -> Self {
        Budget { limit }
    }

    /// Budget from `DIVHULL_BUDGET` if set and parseable, else the default.
    pub fn from_env() -> Self {
        match std::env::var(BUDGET_ENV) {
            Ok(s) => match s.trim().parse::<u64>() {
                Ok(v) if v > 0 => Budget::new(v),
                _ => Budget::new(DEFAULT_BUDGET),
            },
            Err(_) => Budget::new(DEFAULT_BUDGET),
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Errors if `count` does not fit the budget.
    pub fn charge(&self, count: u64, what: &str) -> Result<()> {
        if count > self.limit {
            Err(Error::budget(format!(
                "{what} needs {count} nodes, budget is {}",
                self.limit
            )))
        } else {
            Ok(())
        }
    }
}
