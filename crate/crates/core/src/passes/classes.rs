//! Classes and object variables to records.

use std::collections::HashSet;

use crate::ir::scope::class_features;
use crate::ir::{Element, Feature, PivotModel, Record, TypeRef};

use super::{PassError, PassOutput};

/// Deeper composition than this can only come from a cycle.
const MAX_DEPTH: usize = 64;

/// Replaces every object variable by a record holding copies of its
/// class's features (inherited ones first) and hoists the main class's
/// features to the top level. Class declarations disappear.
pub fn flatten_classes(model: &PivotModel) -> Result<PassOutput, PassError> {
    let mut out = PivotModel::new(model.name.clone());
    let top_level: HashSet<&str> = model
        .elements
        .iter()
        .filter(|e| !matches!(e, Element::Class(_)))
        .map(Element::name)
        .collect();
    for element in &model.elements {
        match element {
            Element::Class(c) if c.is_main => {
                for f in class_features(model, c) {
                    if top_level.contains(f.name()) {
                        return Err(PassError::unsupported(
                            f.span().describe(),
                            format!("main class feature `{}` shadows a top-level name", f.name()),
                        ));
                    }
                    out.elements.push(Element::Feature(lower_feature(model, f, 0)?));
                }
            }
            Element::Class(_) => {}
            Element::Feature(f) => out.elements.push(Element::Feature(lower_feature(model, f, 0)?)),
            other => out.elements.push(other.clone()),
        }
    }
    Ok(PassOutput::same_names(out))
}

fn lower_feature(model: &PivotModel, feature: &Feature, depth: usize) -> Result<Feature, PassError> {
    match feature {
        Feature::Variable(v) => {
            let TypeRef::Named(ty) = &v.ty else { return Ok(feature.clone()) };
            if model.find_enum(ty).is_some() {
                return Ok(feature.clone());
            }
            let location = v.span.describe();
            let Some(class) = model.find_class(ty) else {
                return Err(PassError::InternalInvariant {
                    location,
                    reason: format!("object variable `{}` has undeclared class `{ty}`", v.name),
                });
            };
            if v.is_set {
                return Err(PassError::unsupported(location, "sets of objects"));
            }
            if depth >= MAX_DEPTH {
                return Err(PassError::InternalInvariant {
                    location,
                    reason: format!("composition through `{ty}` does not terminate"),
                });
            }
            let features = class_features(model, class)
                .into_iter()
                .map(|f| lower_feature(model, f, depth + 1))
                .collect::<Result<_, _>>()?;
            Ok(Feature::Record(Record {
                name: v.name.clone(),
                array: v.array.clone(),
                features,
                span: v.span.clone(),
            }))
        }
        Feature::Record(r) => Ok(Feature::Record(Record {
            features: r
                .features
                .iter()
                .map(|f| lower_feature(model, f, depth + 1))
                .collect::<Result<_, _>>()?,
            ..r.clone()
        })),
        Feature::Constant(_) | Feature::Zone(_) => Ok(feature.clone()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{inject, parse_data, parse_model};
    use crate::ir::census;
    use crate::problem::Severity;

    fn model(src: &str) -> PivotModel {
        inject(&parse_model(src).unwrap(), &parse_data("int n := 2;").unwrap()).unwrap()
    }

    #[test]
    fn object_arrays_become_record_arrays() {
        let m = model(
            "main class S { W ws[n]; } class W { G gs[n]; constraint c { gs[1].x = 1; } } \
             class G { int x in [1, 2]; }",
        );
        let out = flatten_classes(&m).unwrap().model;
        assert_eq!(census(&out).classes, 0);
        let Element::Feature(Feature::Record(ws)) = &out.elements[1] else { panic!("{out:?}") };
        assert_eq!(ws.name, "ws");
        assert!(ws.array.is_some());
        let Feature::Record(gs) = &ws.features[0] else { panic!() };
        assert_eq!(gs.features[0].name(), "x");
        assert!(matches!(ws.features[1], Feature::Zone(_)));
    }

    #[test]
    fn inherited_features_come_first() {
        let m = model("main class M { A a; } class B { int x in [1, 2]; } class A extends B { int y in [1, 2]; }");
        let out = flatten_classes(&m).unwrap().model;
        let Element::Feature(Feature::Record(a)) = &out.elements[1] else { panic!() };
        let names: Vec<_> = a.features.iter().map(Feature::name).collect();
        assert_eq!(names, ["x", "y"]);
    }

    #[test]
    fn main_without_objects_is_unwrapped() {
        let m = model("main class M { int x in [1, 2]; constraint c { x > 1; } }");
        let out = flatten_classes(&m).unwrap().model;
        assert_eq!(out.elements.len(), 3);
        assert_eq!(out.elements[1].name(), "x");
        assert_eq!(out.elements[2].name(), "c");
    }

    #[test]
    fn undeclared_class_is_a_critic_problem() {
        let mut m = model("main class M { C c; } class C {}");
        m.elements.retain(|e| e.name() != "C");
        let err = flatten_classes(&m).unwrap_err();
        assert_eq!(err.to_problem().severity, Severity::Critic);
    }
}
