//! Exact analytics over the factor language of a level system.
//!
//! Every result is stamped with the depth it was computed at: factor sets
//! only grow with depth, so all dimensions are approximations from below of
//! the limit language.

mod dims;
mod factors;
mod forbidden;
pub mod invariants;
mod recurrence;

use serde::{Deserialize, Serialize};

use crate::construction::BuildError;

pub use dims::{
    check_growth_sandwich, check_nonperiodicity, dim_series, dims_up_to, entropy_bands, entropy_partial,
    sandwich_with_dim, DimRow, DimensionReport, EntropyBand, EntropyPoint, EntropyReport, NonperiodicityReport,
    SandwichReport, ENTROPY_DIGITS,
};
pub use factors::{
    default_budget, factor_set_bruteforce, factor_set_bruteforce_with_budget, factor_set_structural, FactorSet, Method,
    BUDGET_ENV, DEFAULT_BUDGET,
};
pub use forbidden::{minimal_forbidden_words, ForbiddenWords};
pub use recurrence::{scan_gaps, verify_recurrence_gaps, GapScan, RecurrenceEntry, RecurrenceReport};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzeError {
    #[error("brute-force expansion needs {required} letters, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("length {n} needs depth with 2^(D-1) >= {n}; system depth is {depth}")]
    DepthTooShallow { n: usize, depth: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Build(#[from] BuildError),
}

/// Largest factor length the structural method supports at this depth.
pub fn max_safe_length(depth: u32) -> usize {
    if depth == 0 {
        0
    } else {
        1usize << (depth - 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Verdict::Pass
    }
}
