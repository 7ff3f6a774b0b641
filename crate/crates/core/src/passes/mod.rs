//! Pivot-to-pivot refactoring passes and the chain runner.
//!
//! Every pass is a pure function from a model to a [`PassOutput`]: the new
//! model, the [`NameMap`] relating its variables to the input's, and any
//! warnings raised along the way.

mod classes;
mod enums;
mod if_removal;
mod matrices;
mod names;
mod records;
mod simplify;
mod unroll;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::ir::PivotModel;
use crate::problem::{Problem, Severity};

pub use classes::flatten_classes;
pub use enums::remove_enums;
pub use if_removal::remove_if;
pub use matrices::flatten_matrices;
pub use names::{Cell, NameMap, NameStep};
pub use records::{flatten_records, flatten_records_with, RecordOptions};
pub use simplify::simplify_constants;
pub use unroll::unroll_loops;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PassId {
    FlattenClasses,
    FlattenRecords,
    RemoveEnums,
    RemoveIf,
    UnrollLoops,
    SimplifyConstants,
    FlattenMatrices,
}

impl PassId {
    pub const ALL: [PassId; 7] = [
        PassId::FlattenClasses,
        PassId::FlattenRecords,
        PassId::RemoveEnums,
        PassId::RemoveIf,
        PassId::UnrollLoops,
        PassId::SimplifyConstants,
        PassId::FlattenMatrices,
    ];

    /// Command-line and configuration spelling.
    pub fn token(self) -> &'static str {
        match self {
            PassId::FlattenClasses => "flatten-classes",
            PassId::FlattenRecords => "flatten-records",
            PassId::RemoveEnums => "remove-enums",
            PassId::RemoveIf => "remove-if",
            PassId::UnrollLoops => "unroll-loops",
            PassId::SimplifyConstants => "simplify",
            PassId::FlattenMatrices => "flatten-matrices",
        }
    }

    pub fn run(self, model: &PivotModel) -> Result<PassOutput, PassError> {
        match self {
            PassId::FlattenClasses => flatten_classes(model),
            PassId::FlattenRecords => flatten_records(model),
            PassId::RemoveEnums => remove_enums(model),
            PassId::RemoveIf => remove_if(model),
            PassId::UnrollLoops => unroll_loops(model),
            PassId::SimplifyConstants => simplify_constants(model),
            PassId::FlattenMatrices => flatten_matrices(model),
        }
    }
}

impl fmt::Display for PassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("unknown pass `{0}`")]
pub struct UnknownPass(pub String);

impl FromStr for PassId {
    type Err = UnknownPass;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PassId::ALL
            .into_iter()
            .find(|p| p.token() == s)
            .ok_or_else(|| UnknownPass(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PassError {
    #[error("{0}")]
    ChainOrder(String),
    #[error("{location}: unsupported: {reason}")]
    Unsupported { location: String, reason: String },
    #[error("{location}: loop bound does not fold to an integer constant")]
    NonConstantBound { location: String },
    #[error("{location}: integer division by zero")]
    DivisionByZero { location: String },
    #[error("{location}: internal invariant violated: {reason}")]
    InternalInvariant { location: String, reason: String },
}

impl PassError {
    pub fn unsupported(location: impl Into<String>, reason: impl Into<String>) -> Self {
        PassError::Unsupported { location: location.into(), reason: reason.into() }
    }

    pub fn to_problem(&self) -> Problem {
        let (severity, location, description) = match self {
            PassError::ChainOrder(msg) => (Severity::Error, "<chain>:0:0".to_string(), msg.clone()),
            PassError::Unsupported { location, reason } => {
                (Severity::Error, location.clone(), format!("unsupported: {reason}"))
            }
            PassError::NonConstantBound { location } => (
                Severity::Error,
                location.clone(),
                "loop bound does not fold to an integer constant".to_string(),
            ),
            PassError::DivisionByZero { location } => {
                (Severity::Error, location.clone(), "integer division by zero".to_string())
            }
            PassError::InternalInvariant { location, reason } => {
                (Severity::Critic, location.clone(), reason.clone())
            }
        };
        Problem::new(severity, location, description)
    }
}

/// Result of one pass.
#[derive(Clone, Debug)]
pub struct PassOutput {
    pub model: PivotModel,
    pub names: NameMap,
    pub problems: Vec<Problem>,
}

impl PassOutput {
    pub(crate) fn same_names(model: PivotModel) -> Self {
        PassOutput { model, names: NameMap::identity(), problems: Vec::new() }
    }
}

/// Result of a whole chain.
#[derive(Clone, Debug)]
pub struct ChainOutput {
    pub model: PivotModel,
    pub names: NameMap,
    pub problems: Vec<Problem>,
    pub timings: Vec<(PassId, Duration)>,
}

/// Rejects chains whose order cannot work.
pub fn validate_chain(chain: &[PassId]) -> Result<(), PassError> {
    let position = |p: PassId| chain.iter().position(|&q| q == p);
    if let (Some(records), Some(classes)) =
        (position(PassId::FlattenRecords), position(PassId::FlattenClasses))
    {
        if records < classes {
            return Err(PassError::ChainOrder(
                "flatten-records must come after flatten-classes".into(),
            ));
        }
    }
    if let (Some(unroll), Some(ifs)) = (position(PassId::UnrollLoops), position(PassId::RemoveIf)) {
        if unroll < ifs {
            return Err(PassError::ChainOrder("unroll-loops must come after remove-if".into()));
        }
    }
    Ok(())
}

/// Applies `chain` left to right, timing each pass.
pub fn run_chain(model: &PivotModel, chain: &[PassId]) -> Result<ChainOutput, PassError> {
    validate_chain(chain)?;
    let mut out = ChainOutput {
        model: model.clone(),
        names: NameMap::identity(),
        problems: Vec::new(),
        timings: Vec::new(),
    };
    for &pass in chain {
        if pass == PassId::FlattenRecords && out.model.has_classes() {
            return Err(PassError::ChainOrder(
                "flatten-records needs a class-free model; run flatten-classes first".into(),
            ));
        }
        let start = Instant::now();
        let step = pass.run(&out.model)?;
        out.timings.push((pass, start.elapsed()));
        out.model = step.model;
        out.names.extend(step.names);
        out.problems.extend(step.problems);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{inject, parse_data, parse_model};

    #[test]
    fn tokens_round_trip() {
        for p in PassId::ALL {
            assert_eq!(p.token().parse::<PassId>().unwrap(), p);
        }
        assert!("inline".parse::<PassId>().is_err());
    }

    #[test]
    fn empty_chain_is_identity() {
        let m = inject(
            &parse_model("main class M { int x in [1, 3]; }").unwrap(),
            &parse_data("int n := 2;").unwrap(),
        )
        .unwrap();
        let out = run_chain(&m, &[]).unwrap();
        assert_eq!(out.model, m);
        assert!(out.timings.is_empty());
    }

    #[test]
    fn flatten_records_on_classes_is_rejected() {
        let m = inject(&parse_model("main class M { int x in [1, 3]; }").unwrap(), &parse_data("").unwrap())
            .unwrap();
        assert!(matches!(run_chain(&m, &[PassId::FlattenRecords]), Err(PassError::ChainOrder(_))));
        assert!(matches!(
            run_chain(&m, &[PassId::FlattenRecords, PassId::FlattenClasses]),
            Err(PassError::ChainOrder(_))
        ));
        assert!(matches!(
            run_chain(&m, &[PassId::UnrollLoops, PassId::RemoveIf]),
            Err(PassError::ChainOrder(_))
        ));
    }
}
