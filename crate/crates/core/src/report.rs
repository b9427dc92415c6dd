//! Pass/fail bookkeeping shared by every cross-check.

use serde::Serialize;

use crate::algebra::{format_fraction, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Mismatch {
    pub label: String,
    pub expected: String,
    pub found: String,
}

/// Result of comparing a batch of exact values.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    pub mismatches: Vec<Mismatch>,
    pub notes: Vec<String>,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Self { name: name.into(), checked: 0, mismatches: Vec::new(), notes: Vec::new() }
    }

    pub fn compare(&mut self, label: impl FnOnce() -> String, expected: &Rational, found: &Rational) {
        self.checked += 1;
        if expected != found {
            self.mismatches.push(Mismatch {
                label: label(),
                expected: format_fraction(expected),
                found: format_fraction(found),
            });
        }
    }

    pub fn fail(&mut self, label: impl Into<String>, reason: impl Into<String>) {
        self.checked += 1;
        self.mismatches.push(Mismatch { label: label.into(), expected: String::new(), found: reason.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.checked > 0
    }

    pub fn absorb(&mut self, other: Check) {
        self.checked += other.checked;
        let prefix = other.name;
        self.mismatches.extend(other.mismatches.into_iter().map(|mut m| {
            m.label = format!("{prefix}: {}", m.label);
            m
        }));
        self.notes.extend(other.notes.into_iter().map(|n| format!("{prefix}: {n}")));
    }

    pub fn summary(&self) -> String {
        format!(
            "{} {} ({} checked, {} mismatches)",
            if self.passed() { "PASS" } else { "FAIL" },
            self.name,
            self.checked,
            self.mismatches.len()
        )
    }
}
