use std::fmt;

use thiserror::Error;

/// Named netlist invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    InvalidCellId,
    DuplicateCellId,
    SourceWithLogicDelay,
    DanglingNetEndpoint,
    DuplicateNet,
    EdgeIntoSourceKind,
    EdgeFromSinkKind,
    FfPairUnknownCell,
    FfPairKindMismatch,
    DuplicateFfPair,
    CombinationalCycle,
}

impl Rule {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule::InvalidCellId => "invalid-cell-id",
            Rule::DuplicateCellId => "duplicate-cell-id",
            Rule::SourceWithLogicDelay => "source-with-logic-delay",
            Rule::DanglingNetEndpoint => "dangling-net-endpoint",
            Rule::DuplicateNet => "duplicate-net",
            Rule::EdgeIntoSourceKind => "edge-into-source-kind",
            Rule::EdgeFromSinkKind => "edge-from-sink-kind",
            Rule::FfPairUnknownCell => "ffpair-unknown-cell",
            Rule::FfPairKindMismatch => "ffpair-kind-mismatch",
            Rule::DuplicateFfPair => "duplicate-ffpair",
            Rule::CombinationalCycle => "combinational-cycle",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One broken invariant. `subjects` holds the offending cell ids or net keys
/// (`src->dst`); for a cycle it is the cycle itself, in edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub subjects: Vec<String>,
    pub message: String,
}

impl Violation {
    pub fn new(rule: Rule, subjects: Vec<String>, message: String) -> Self {
        Violation {
            rule,
            subjects,
            message,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.rule, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnnotationError {
    #[error("cell {cell}: malformed block label {label:?}: {reason}")]
    MalformedLabel {
        cell: String,
        label: String,
        reason: &'static str,
    },
}

/// Failure of an analysis over otherwise parsed inputs.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error("invalid netlist:\n{0}")]
    Invalid(#[from] ValidationReport),
    #[error(transparent)]
    Annotation(#[from] AnnotationError),
    #[error("registry references cell {0} which is not in the netlist")]
    RegistryMismatch(String),
    #[error("unknown block {0}")]
    UnknownBlock(String),
}
