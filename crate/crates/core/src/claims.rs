//! Pass/fail records for the executable structural claims checked along the
//! pipeline, numbered 1 through 12.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of one claim over its whole quantifier domain.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimOutcome {
    pub passed: bool,
    /// Number of quantifier instances examined.
    pub checked: u64,
    /// First counterexample, if any.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Summary statistic (e.g. an observed maximum).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ClaimOutcome {
    pub fn status(&self) -> String {
        match &self.witness {
            None if self.passed => "pass".into(),
            Some(w) => format!("fail: {w}"),
            None => "fail".into(),
        }
    }
}

/// Accumulates the checks of one claim, keeping only the first counterexample.
#[derive(Debug, Default)]
pub(crate) struct ClaimCheck {
    checked: u64,
    witness: Option<String>,
    note: Option<String>,
}

impl ClaimCheck {
    pub(crate) fn new() -> Self {
        Self::default()
    }

    /// Records one instance; `witness` is only evaluated on the first failure.
    pub(crate) fn check(&mut self, ok: bool, witness: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
    }

    pub(crate) fn note(&mut self, note: String) {
        self.note = Some(note);
    }

    pub(crate) fn finish(self) -> ClaimOutcome {
        ClaimOutcome {
            passed: self.witness.is_none(),
            checked: self.checked,
            witness: self.witness,
            note: self.note,
        }
    }
}

/// Claim number to outcome.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claims: BTreeMap<u8, ClaimOutcome>,
}

impl ClaimReport {
    pub fn insert(&mut self, claim: u8, outcome: ClaimOutcome) {
        self.claims.insert(claim, outcome);
    }

    pub fn get(&self, claim: u8) -> Option<&ClaimOutcome> {
        self.claims.get(&claim)
    }

    pub fn passed(&self, claim: u8) -> bool {
        self.get(claim).is_some_and(|o| o.passed)
    }

    pub fn all_pass(&self) -> bool {
        self.claims.values().all(|o| o.passed)
    }

    pub fn first_failure(&self) -> Option<(u8, &ClaimOutcome)> {
        self.claims.iter().find(|(_, o)| !o.passed).map(|(&c, o)| (c, o))
    }

    pub fn extend(&mut self, other: ClaimReport) {
        self.claims.extend(other.claims);
    }

    /// Combines reports of independent pieces: a claim passes iff it passes
    /// everywhere; the first counterexample wins.
    pub fn merge(&mut self, other: &ClaimReport) {
        for (&claim, theirs) in &other.claims {
            match self.claims.get_mut(&claim) {
                None => {
                    self.claims.insert(claim, theirs.clone());
                }
                Some(mine) => {
                    mine.checked += theirs.checked;
                    if mine.passed && !theirs.passed {
                        mine.passed = false;
                        mine.witness = theirs.witness.clone();
                    }
                    if theirs.note.is_some() {
                        mine.note = theirs.note.clone();
                    }
                }
            }
        }
    }
}

impl fmt::Display for ClaimReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (claim, outcome) in &self.claims {
            writeln!(f, "claim ({claim}): {} [{} checked]", outcome.status(), outcome.checked)?;
        }
        Ok(())
    }
}
