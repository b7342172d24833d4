//! Structured verdicts with witnesses.
//!
//! Every check in the kernel reports pass/fail/unknown together with enough
//! serialized data (elements, matrices, homotopies) for a third party to
//! re-verify the verdict without rerunning this code.

use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Unknown,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail => write!(f, "fail"),
            Verdict::Unknown => write!(f, "unknown"),
        }
    }
}

/// A serialized piece of evidence attached to a verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// A named element, rendered in the parseable monomial-string syntax.
    Element { label: String, value: String },
    /// A named generator or basis vector.
    Name { label: String, name: String },
    /// A matrix with element-string entries, row major.
    Matrix {
        label: String,
        entries: Vec<Vec<String>>,
    },
    /// A contracting-homotopy block `h: degree -> degree - 1`.
    Homotopy {
        degree: i64,
        entries: Vec<Vec<String>>,
    },
    /// A non-trivial cohomology class: a cocycle that is not a coboundary.
    CohomologyClass {
        degree: i64,
        weight: i64,
        representative: String,
    },
    /// A computed dimension, e.g. of a cohomology slice.
    Dimension {
        label: String,
        degree: i64,
        weight: i64,
        dim: usize,
    },
    Note(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    /// Name of the check that produced this report.
    pub check: String,
    pub verdict: Verdict,
    /// Human-readable notes, in order of discovery.
    pub details: Vec<String>,
    pub witnesses: Vec<Witness>,
}

impl VerificationReport {
    pub fn pass(check: &str) -> Self {
        VerificationReport {
            check: check.to_string(),
            verdict: Verdict::Pass,
            details: Vec::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn fail(check: &str, detail: impl Into<String>) -> Self {
        VerificationReport {
            check: check.to_string(),
            verdict: Verdict::Fail,
            details: vec![detail.into()],
            witnesses: Vec::new(),
        }
    }

    pub fn unknown(check: &str, detail: impl Into<String>) -> Self {
        VerificationReport {
            check: check.to_string(),
            verdict: Verdict::Unknown,
            details: vec![detail.into()],
            witnesses: Vec::new(),
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.details.push(detail.into());
        self
    }

    pub fn with_witness(mut self, w: Witness) -> Self {
        self.witnesses.push(w);
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[{}] {}", self.verdict, self.check)?;
        for d in &self.details {
            writeln!(f, "    {d}")?;
        }
        for w in &self.witnesses {
            match w {
                Witness::Element { label, value } => writeln!(f, "    {label} = {value}")?,
                Witness::Name { label, name } => writeln!(f, "    {label}: {name}")?,
                Witness::Matrix { label, entries } => {
                    writeln!(f, "    {label}:")?;
                    for row in entries {
                        writeln!(f, "      [{}]", row.join(", "))?;
                    }
                }
                Witness::Homotopy { degree, entries } => {
                    writeln!(f, "    h: degree {degree} -> {}", degree - 1)?;
                    for row in entries {
                        writeln!(f, "      [{}]", row.join(", "))?;
                    }
                }
                Witness::CohomologyClass {
                    degree,
                    weight,
                    representative,
                } => writeln!(
                    f,
                    "    class in H^{degree} (weight {weight}): {representative}"
                )?,
                Witness::Dimension {
                    label,
                    degree,
                    weight,
                    dim,
                } => writeln!(f, "    {label}[degree {degree}, weight {weight}] = {dim}")?,
                Witness::Note(n) => writeln!(f, "    note: {n}")?,
            }
        }
        Ok(())
    }
}
