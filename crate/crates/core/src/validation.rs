//! Machine-readable validation outcomes shared by profile and record checks.

use std::fmt;

use serde::{Deserialize, Serialize};

/// Stable violation codes. The serialized spelling is part of the output
/// contract.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ViolationCode {
    MissingMandatory,
    UnknownAttribute,
    TypeMismatch,
    EmptyValue,
    RepeatViolation,
    MultipleProfiles,
    NoProfile,
}

impl ViolationCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ViolationCode::MissingMandatory => "MissingMandatory",
            ViolationCode::UnknownAttribute => "UnknownAttribute",
            ViolationCode::TypeMismatch => "TypeMismatch",
            ViolationCode::EmptyValue => "EmptyValue",
            ViolationCode::RepeatViolation => "RepeatViolation",
            ViolationCode::MultipleProfiles => "MultipleProfiles",
            ViolationCode::NoProfile => "NoProfile",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    /// The offending record key. Usually an attribute PID, but may be any
    /// string when a record uses an untyped key.
    pub attribute_pid: Option<String>,
    pub detail: String,
}

impl Violation {
    pub fn new(code: ViolationCode, attribute: Option<&str>, detail: impl Into<String>) -> Self {
        Self { code, attribute_pid: attribute.map(str::to_owned), detail: detail.into() }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.attribute_pid {
            Some(attr) => write!(f, "{}:{} ({})", self.code, self.detail, attr),
            None => write!(f, "{}:{}", self.code, self.detail),
        }
    }
}

/// `valid` is true exactly when `violations` is empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

impl ValidationOutcome {
    /// Builds an outcome with violations in a deterministic order.
    pub fn from_violations(mut violations: Vec<Violation>) -> Self {
        violations.sort();
        violations.dedup();
        Self { valid: violations.is_empty(), violations }
    }

    pub fn ok() -> Self {
        Self::from_violations(Vec::new())
    }

    pub fn has(&self, code: ViolationCode) -> bool {
        self.violations.iter().any(|v| v.code == code)
    }

    pub fn codes(&self) -> Vec<ViolationCode> {
        self.violations.iter().map(|v| v.code).collect()
    }
}

impl fmt::Display for ValidationOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.valid {
            return f.write_str("valid");
        }
        f.write_str("invalid:")?;
        for v in &self.violations {
            write!(f, " {v};")?;
        }
        Ok(())
    }
}
