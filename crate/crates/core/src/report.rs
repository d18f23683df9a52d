//! Outcome reporting for identity checks.
//!
//! Every checker in this crate returns a [`CheckReport`] rather than a bare
//! boolean: a failed check carries the exact location (one or more exponents,
//! or sample indices) and the rendered difference, so that a violation can be
//! reproduced and inspected without re-running the computation.
//!
//! Invariants:
//! - `status == Violated` implies `witness.is_some()` and the witness
//!   difference is a nonzero value.
//! - `checked` counts the coefficient positions (or sample instances) that
//!   were actually compared.

/// Verdict of a single check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    /// Every compared coefficient agreed exactly.
    Holds,
    /// At least one coefficient differed; see the witness.
    Violated,
}

/// The first offending position of a failed check.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    /// Exponents (or indices) locating the offending coefficient.
    pub location: Vec<crate::rat::Rat>,
    /// Rendering of the nonzero difference at that location.
    pub difference: String,
}

/// Result of comparing two exact expansions coefficient by coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub status: CheckStatus,
    /// Number of positions compared.
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl CheckReport {
    pub fn holds(checked: usize) -> Self {
        CheckReport {
            status: CheckStatus::Holds,
            checked,
            witness: None,
        }
    }

    pub fn violated(location: Vec<crate::rat::Rat>, difference: String, checked: usize) -> Self {
        CheckReport {
            status: CheckStatus::Violated,
            checked,
            witness: Some(Witness {
                location,
                difference,
            }),
        }
    }

    pub fn is_holds(&self) -> bool {
        self.status == CheckStatus::Holds
    }

    /// Folds another report in: counts accumulate, the first witness wins.
    pub fn merge(&mut self, other: CheckReport) {
        self.checked += other.checked;
        if self.status == CheckStatus::Holds && other.status == CheckStatus::Violated {
            self.status = CheckStatus::Violated;
            self.witness = other.witness;
        }
    }
}
