//! Brute-force interpreter over pivot models.
//!
//! A model is instantiated into scalar cells (one per variable, array
//! element or object member), its statements are grounded into boolean
//! expressions over those cells, and every assignment of the finite domains
//! is tried. The resulting solution sets are exact and canonically ordered,
//! which makes them usable as a meaning-preservation oracle for passes.
//!
//! Semantics: zones are conjunctions, loops are conjunctions over their
//! range, arrays are 1-based, integer division truncates toward zero, and a
//! division by zero or an out-of-range index makes the candidate infeasible.

mod ground;
mod search;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::ir::eval::ConstEnv;
use crate::ir::PivotModel;
use crate::passes::{Cell, NameMap};

pub use ground::Grounded;

/// Constant overrides and enumeration limits.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub overrides: BTreeMap<String, i64>,
    /// Largest universe a set variable may range over.
    pub max_universe: usize,
    /// Largest number of values in one integer domain.
    pub max_width: u64,
    /// Largest number of candidate assignments.
    pub max_space: u128,
}

impl Default for Instance {
    fn default() -> Self {
        Instance {
            overrides: BTreeMap::new(),
            max_universe: 6,
            max_width: 10_000,
            max_space: 10_000_000,
        }
    }
}

impl Instance {
    pub fn with(mut self, name: &str, value: i64) -> Self {
        self.overrides.insert(name.to_string(), value);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    /// Enumeration literal with its 1-based position.
    Lit { pos: i64, name: String },
    Set(BTreeSet<i64>),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Bool(b) => write!(f, "{b}"),
            Value::Lit { name, .. } => f.write_str(name),
            Value::Set(s) => {
                let items: Vec<String> = s.iter().map(i64::to_string).collect();
                write!(f, "{{{}}}", items.join(","))
            }
        }
    }
}

pub type Assignment = BTreeMap<Cell, Value>;

/// Canonical text of one assignment: `cell=value` pairs separated by spaces.
pub fn format_assignment(a: &Assignment) -> String {
    let parts: Vec<String> = a.iter().map(|(c, v)| format!("{c}={v}")).collect();
    parts.join(" ")
}

/// Sorted, duplicate-free list of assignments.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SolutionSet(Vec<Assignment>);

impl SolutionSet {
    pub fn new(mut solutions: Vec<Assignment>) -> Self {
        solutions.sort();
        solutions.dedup();
        SolutionSet(solutions)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Assignment> {
        self.0.iter()
    }

    pub fn contains(&self, a: &Assignment) -> bool {
        self.0.binary_search(a).is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search space of {size} assignments exceeds the limit of {limit}")]
    SearchSpaceExceeded { size: u128, limit: u128 },
    #[error("variable `{0}` has no finite domain")]
    UnboundedDomain(String),
    #[error("variable `{0}` is real-valued")]
    RealVariable(String),
    #[error("{0}")]
    Unsupported(String),
}

/// Every assignment satisfying `model`, found by backtracking with
/// constraint checks as soon as their cells are assigned.
pub fn solutions(model: &PivotModel, inst: &Instance) -> Result<SolutionSet, OracleError> {
    let g = ground::ground(model, inst)?;
    Ok(search::backtrack(&g))
}

/// Same result as [`solutions`], by enumerating every full assignment and
/// filtering afterwards.
pub fn solutions_naive(model: &PivotModel, inst: &Instance) -> Result<SolutionSet, OracleError> {
    let g = ground::ground(model, inst)?;
    Ok(search::generate_and_test(&g))
}

/// Outcome of an equivalence check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equivalence {
    pub equal: bool,
    /// An assignment in exactly one of the two (translated) solution sets.
    pub witness: Option<Assignment>,
    pub left: usize,
    pub right: usize,
}

/// Compares `solutions(a)`, translated through `map`, with `solutions(b)`.
pub fn equivalent(
    a: &PivotModel,
    b: &PivotModel,
    map: &NameMap,
    inst: &Instance,
) -> Result<Equivalence, OracleError> {
    let left = solutions(a, inst)?;
    let right = solutions(b, inst)?;
    let mut env = ConstEnv::from_model(b);
    for (name, value) in &inst.overrides {
        env.override_int(name, *value);
    }
    let mut translated = BTreeSet::new();
    for sol in left.iter() {
        let mut out = Assignment::new();
        for (cell, value) in sol {
            let cell = map
                .translate(cell, &env)
                .map_err(|e| OracleError::Unsupported(format!("cannot translate `{cell}`: {e}")))?;
            let value = match value {
                Value::Lit { pos, .. } if map.maps_enums() => Value::Int(*pos),
                other => other.clone(),
            };
            out.insert(cell, value);
        }
        translated.insert(out);
    }
    let other: BTreeSet<Assignment> = right.iter().cloned().collect();
    let witness = translated.symmetric_difference(&other).next().cloned();
    Ok(Equivalence { equal: witness.is_none(), witness, left: left.len(), right: right.len() })
}
