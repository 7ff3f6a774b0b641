//! Enumerations to integers.

use std::collections::HashMap;

use crate::ir::{Domain, Element, Expr, ExprKind, PivotModel, TypeRef};

use super::names::{NameMap, NameStep};
use super::{PassError, PassOutput};

/// Enumeration-typed variables become integers over `[1, N]` and literals
/// become their 1-based positions. Enumeration declarations are dropped.
pub fn remove_enums(model: &PivotModel) -> Result<PassOutput, PassError> {
    let sizes: HashMap<String, usize> =
        model.enums().map(|e| (e.name.clone(), e.literals.len())).collect();
    if sizes.is_empty() {
        return Ok(PassOutput::same_names(model.clone()));
    }
    let mut out = model.clone();
    out.elements.retain(|e| !matches!(e, Element::Enum(_)));
    out.for_each_variable_mut(&mut |v| {
        let TypeRef::Named(ty) = &v.ty else { return };
        let Some(&n) = sizes.get(ty) else { return };
        v.ty = TypeRef::Int;
        if v.domain.is_none() {
            v.domain = Some(Domain::Interval { lower: Expr::int(1), upper: Expr::int(n as i64) });
        }
    });
    let mut missing = None;
    out.for_each_expr_mut(&mut |e| {
        *e = crate::ir::rewrite_expr(e.clone(), &mut |x| match &x.kind {
            ExprKind::EnumLit { enum_name, literal } => {
                match model.find_enum(enum_name).and_then(|en| en.position(literal)) {
                    Some(p) => Expr::int(p).with_span(x.span.clone()),
                    None => {
                        missing.get_or_insert_with(|| (literal.clone(), x.span.describe()));
                        x
                    }
                }
            }
            _ => x,
        });
    });
    if let Some((literal, location)) = missing {
        return Err(PassError::InternalInvariant {
            location,
            reason: format!("literal `{literal}` has no enumeration"),
        });
    }
    let mut names = NameMap::identity();
    names.push(NameStep::EnumsToPositions);
    Ok(PassOutput { model: out, names, problems: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{extract_source, inject, parse_data, parse_model};
    use crate::ir::census;

    #[test]
    fn enum_set_variable_gets_interval_domain() {
        let m = inject(
            &parse_model("main class M { Name set p; Name x; constraint c { x != a; x != i; } }").unwrap(),
            &parse_data("enum Name := {a, b, c, d, e, f, g, h, i};").unwrap(),
        )
        .unwrap();
        let out = remove_enums(&m).unwrap();
        let c = census(&out.model);
        assert_eq!((c.enums, c.enum_literals), (0, 0));
        let text = extract_source(&out.model).model;
        assert!(text.contains("int set p in [1, 9];"), "{text}");
        assert!(text.contains("x != 1;"), "{text}");
        assert!(text.contains("x != 9;"), "{text}");
        assert!(out.names.maps_enums());
    }

    #[test]
    fn model_without_enums_is_unchanged() {
        let m = inject(&parse_model("main class M { int x in [1, 2]; }").unwrap(), &parse_data("").unwrap())
            .unwrap();
        let out = remove_enums(&m).unwrap();
        assert_eq!(out.model, m);
        assert!(out.names.is_identity());
    }
}
