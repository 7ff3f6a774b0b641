//! Diagnostics shared by the checker, the passes and the pipeline.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Warning,
    /// Internal invariant violated while transforming a model.
    Critic,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Critic => "critic",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A diagnostic: severity, `file:line:col` location and a description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Problem {
    pub severity: Severity,
    pub location: String,
    pub description: String,
}

impl Problem {
    pub fn new(severity: Severity, location: impl Into<String>, description: impl Into<String>) -> Self {
        Problem { severity, location: location.into(), description: description.into() }
    }

    pub fn error(location: impl Into<String>, description: impl Into<String>) -> Self {
        Problem::new(Severity::Error, location, description)
    }

    pub fn warning(location: impl Into<String>, description: impl Into<String>) -> Self {
        Problem::new(Severity::Warning, location, description)
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

/// One line per problem: `severity file:line:col description`.
impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.severity, self.location, self.description)
    }
}

pub fn has_errors(problems: &[Problem]) -> bool {
    problems.iter().any(Problem::is_error)
}
