//! Source language front end: lexer, parser, injection into the pivot
//! model, and extraction back to source text.
//!
//! Sources come as two files: a data file (`.scd`) holding enumerations
//! and constants, and a model file (`.scm`) holding classes. Flattened
//! models, which have no classes, are also accepted and printed: their
//! features sit at the top level of the model file, and records print as
//! `record name[dims] { ... }`.

mod extract;
mod inject;
mod lexer;
mod parser;

use std::fmt;

use thiserror::Error;

use crate::ir::{Constant, EnumType, Feature, Loc, Span};

pub use extract::{extract_source, print_expr, ExtractedSource};
pub use inject::{inject, InjectError};
pub use parser::{parse_data, parse_data_file, parse_model, parse_model_file};

/// Data file contents.
#[derive(Clone, Debug, PartialEq)]
pub struct DataAst {
    pub model_name: Option<String>,
    pub decls: Vec<DataDecl>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataDecl {
    Enum(EnumType),
    Const(Constant),
}

/// Model file contents.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelAst {
    pub model_name: Option<String>,
    pub items: Vec<ModelItem>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelItem {
    Class(ClassDecl),
    Feature(Feature),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDecl {
    pub is_main: bool,
    pub is_abstract: bool,
    pub name: String,
    pub super_types: Vec<String>,
    pub features: Vec<Feature>,
    pub span: Span,
}

impl ModelAst {
    pub fn classes(&self) -> impl Iterator<Item = &ClassDecl> {
        self.items.iter().filter_map(|i| match i {
            ModelItem::Class(c) => Some(c),
            ModelItem::Feature(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub struct ParseError {
    pub loc: Loc,
    pub found: String,
    pub expected: Vec<String>,
}

impl ParseError {
    pub(crate) fn lexical(loc: Loc, message: &str) -> Self {
        ParseError { loc, found: message.to_string(), expected: Vec::new() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expected.is_empty() {
            write!(f, "{}: syntax error: {}", self.loc, self.found)
        } else {
            write!(
                f,
                "{}: syntax error: expected one of {}, found {}",
                self.loc,
                self.expected.join(", "),
                self.found
            )
        }
    }
}
