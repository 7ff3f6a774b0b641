//! Run configuration, from the command line or a TOML file.
//!
//! ```toml
//! source = "corpus/golfers.scm"
//! data = "corpus/golfers.scd"
//! target = "eclipse"
//! chain = ["flatten-classes", "flatten-records", "remove-enums"]
//! out = "golfers.ecl"
//! report = "golfers.csv"
//! ```
//!
//! Relative paths are taken relative to the working directory.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Deserialize;

use crate::passes::PassId;

use super::PipelineError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Target {
    #[default]
    Eclipse,
    /// Pretty-printed pivot model, in source syntax.
    Pivot,
}

impl FromStr for Target {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "eclipse" => Ok(Target::Eclipse),
            "pivot" => Ok(Target::Pivot),
            other => Err(PipelineError::Usage(format!("unknown target `{other}` (expected eclipse or pivot)"))),
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Target::Eclipse => "eclipse",
            Target::Pivot => "pivot",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub source: PathBuf,
    pub data: Option<PathBuf>,
    pub target: Target,
    pub chain: Vec<PassId>,
    pub out: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    source: PathBuf,
    data: Option<PathBuf>,
    #[serde(default = "default_from")]
    from: String,
    #[serde(default = "default_target")]
    target: String,
    #[serde(default)]
    chain: Vec<String>,
    out: Option<PathBuf>,
    report: Option<PathBuf>,
}

fn default_from() -> String {
    "scomma".into()
}

fn default_target() -> String {
    "eclipse".into()
}

/// Parses a comma-separated list of pass names.
pub fn parse_chain(text: &str) -> Result<Vec<PassId>, PipelineError> {
    text.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<PassId>().map_err(|e| PipelineError::Usage(e.to_string())))
        .collect()
}

/// Only the object-oriented source language is read.
pub fn check_source_language(tag: &str) -> Result<(), PipelineError> {
    if tag == "scomma" {
        Ok(())
    } else {
        Err(PipelineError::Usage(format!("unknown source language `{tag}` (expected scomma)")))
    }
}

impl PipelineConfig {
    pub fn new(source: impl Into<PathBuf>) -> Self {
        PipelineConfig {
            source: source.into(),
            data: None,
            target: Target::Eclipse,
            chain: Vec::new(),
            out: None,
            report: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let raw: RawConfig =
            toml::from_str(text).map_err(|e| PipelineError::Usage(format!("invalid configuration: {e}")))?;
        check_source_language(&raw.from)?;
        let chain = raw
            .chain
            .iter()
            .map(|t| t.parse::<PassId>().map_err(|e| PipelineError::Usage(e.to_string())))
            .collect::<Result<_, _>>()?;
        Ok(PipelineConfig {
            source: raw.source,
            data: raw.data,
            target: raw.target.parse()?,
            chain,
            out: raw.out,
            report: raw.report,
        })
    }
}
