use thiserror::Error;

use crate::ir::scope::{resolve_model, IssueKind};
use crate::ir::{ClassType, Element, Feature, PivotModel};

use super::{DataAst, DataDecl, ModelAst, ModelItem};

#[derive(Clone, Debug, PartialEq, Error)]
pub enum InjectError {
    #[error("{loc}: unresolved name `{name}`")]
    UnresolvedName { name: String, loc: String },
    #[error("{loc}: duplicate name `{name}`")]
    DuplicateName { name: String, loc: String },
    #[error("{loc}: more than one main class (`{name}`)")]
    MultipleMain { name: String, loc: String },
}

/// Builds the pivot model from a parsed model file and its data file.
///
/// Data declarations come first, followed by the model items in source
/// order. Every name is resolved; bare references to enumeration literals
/// become literal nodes.
pub fn inject(model: &ModelAst, data: &DataAst) -> Result<PivotModel, Vec<InjectError>> {
    let mut errors = Vec::new();
    let mains: Vec<_> = model.classes().filter(|c| c.is_main).collect();
    for extra in mains.iter().skip(1) {
        errors.push(InjectError::MultipleMain { name: extra.name.clone(), loc: extra.span.describe() });
    }
    let name = mains
        .first()
        .map(|c| c.name.clone())
        .or_else(|| model.model_name.clone())
        .or_else(|| data.model_name.clone())
        .unwrap_or_default();

    let mut pivot = PivotModel::new(name);
    for decl in &data.decls {
        pivot.elements.push(match decl {
            DataDecl::Enum(e) => Element::Enum(e.clone()),
            DataDecl::Const(c) => Element::Feature(Feature::Constant(c.clone())),
        });
    }
    for item in &model.items {
        pivot.elements.push(match item {
            ModelItem::Class(c) => Element::Class(ClassType {
                name: c.name.clone(),
                is_main: c.is_main,
                is_abstract: c.is_abstract,
                super_types: c.super_types.clone(),
                features: c.features.clone(),
                span: c.span.clone(),
            }),
            ModelItem::Feature(f) => Element::Feature(f.clone()),
        });
    }

    for issue in resolve_model(&mut pivot) {
        let loc = issue.span.describe();
        errors.push(match issue.kind {
            IssueKind::Unresolved => InjectError::UnresolvedName { name: issue.name, loc },
            IssueKind::Duplicate => InjectError::DuplicateName { name: issue.name, loc },
        });
    }
    if errors.is_empty() {
        Ok(pivot)
    } else {
        Err(errors)
    }
}
