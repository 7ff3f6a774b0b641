//! Pivot model back to source text.
//!
//! Arithmetic prints compactly (`(w1-1)*g+g1`), comparisons and logical
//! operators with surrounding spaces, loops as `forall i in [lo,hi] { ... }`.

use std::fmt::Write;

use crate::ir::{
    BinOp, ClassType, Domain, Element, Expr, ExprKind, Feature, Literal, PivotModel, Statement,
    UnOp, Variable,
};

/// The two files of a model.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExtractedSource {
    pub data: String,
    pub model: String,
}

/// Renders `model` as a data file (leading enumerations and constants)
/// and a model file (everything else).
pub fn extract_source(model: &PivotModel) -> ExtractedSource {
    let mut out = ExtractedSource::default();
    if model.main_class().is_none() && !model.name.is_empty() {
        writeln!(out.data, "model {};", model.name).unwrap();
    }
    let split = model
        .elements
        .iter()
        .position(|e| !matches!(e, Element::Enum(_) | Element::Feature(Feature::Constant(_))))
        .unwrap_or(model.elements.len());
    for element in &model.elements[..split] {
        match element {
            Element::Enum(e) => writeln!(out.data, "enum {} := {{{}}};", e.name, e.literals.join(", ")).unwrap(),
            Element::Feature(f) => print_feature(&mut out.data, f, 0),
            _ => unreachable!(),
        }
    }
    let mut previous_was_class = false;
    for element in &model.elements[split..] {
        let is_class = matches!(element, Element::Class(_));
        if (is_class || previous_was_class) && !out.model.is_empty() {
            out.model.push('\n');
        }
        previous_was_class = is_class;
        match element {
            Element::Enum(e) => writeln!(out.model, "// enum {} follows the data section", e.name).unwrap(),
            Element::Class(c) => print_class(&mut out.model, c),
            Element::Feature(f) => print_feature(&mut out.model, f, 0),
            Element::Predicate(p) => writeln!(out.model, "// predicate {}", p.name).unwrap(),
        }
    }
    out
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

fn print_class(out: &mut String, class: &ClassType) {
    if class.is_main {
        out.push_str("main ");
    }
    if class.is_abstract {
        out.push_str("abstract ");
    }
    write!(out, "class {}", class.name).unwrap();
    if !class.super_types.is_empty() {
        write!(out, " extends {}", class.super_types.join(", ")).unwrap();
    }
    if class.features.is_empty() {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    for f in &class.features {
        print_feature(out, f, 1);
    }
    out.push_str("}\n");
}

fn print_literal(lit: &Literal) -> String {
    match lit {
        Literal::Int(v) => v.to_string(),
        Literal::Real(v) => format!("{v:?}"),
        Literal::Bool(v) => v.to_string(),
    }
}

fn print_dims(dims: &[&Expr]) -> String {
    let parts: Vec<_> = dims.iter().map(|e| print_expr(e)).collect();
    format!("[{}]", parts.join(", "))
}

pub(crate) fn print_variable(v: &Variable) -> String {
    let mut s = v.ty.to_string();
    if v.is_set {
        s.push_str(" set");
    }
    write!(s, " {}", v.name).unwrap();
    if let Some(dims) = &v.array {
        s.push_str(&print_dims(&dims.exprs()));
    }
    match &v.domain {
        Some(Domain::Interval { lower, upper }) => {
            write!(s, " in [{}, {}]", print_expr(lower), print_expr(upper)).unwrap()
        }
        Some(Domain::Set(values)) => {
            let parts: Vec<_> = values.iter().map(print_expr).collect();
            write!(s, " in {{{}}}", parts.join(", ")).unwrap()
        }
        None => {}
    }
    s
}

fn print_feature(out: &mut String, feature: &Feature, depth: usize) {
    indent(out, depth);
    match feature {
        Feature::Variable(v) => writeln!(out, "{};", print_variable(v)).unwrap(),
        Feature::Constant(c) => writeln!(out, "{} {} := {};", c.ty, c.name, print_literal(&c.value)).unwrap(),
        Feature::Zone(z) => {
            writeln!(out, "constraint {} {{", z.name).unwrap();
            print_body(out, &z.body, depth + 1);
            indent(out, depth);
            out.push_str("}\n");
        }
        Feature::Record(r) => {
            write!(out, "record {}", r.name).unwrap();
            if let Some(dims) = &r.array {
                out.push_str(&print_dims(&dims.exprs()));
            }
            out.push_str(" {\n");
            for f in &r.features {
                print_feature(out, f, depth + 1);
            }
            indent(out, depth);
            out.push_str("}\n");
        }
    }
}

fn print_body(out: &mut String, body: &[Statement], depth: usize) {
    for stmt in body {
        indent(out, depth);
        match stmt {
            Statement::Constraint { expr, .. } => writeln!(out, "{};", print_expr(expr)).unwrap(),
            Statement::Forall { index, lower, upper, body, .. } => {
                writeln!(out, "forall {} in [{},{}] {{", index, print_expr(lower), print_expr(upper)).unwrap();
                print_body(out, body, depth + 1);
                indent(out, depth);
                out.push_str("}\n");
            }
            Statement::If { cond, then_body, else_body, .. } => {
                writeln!(out, "if ({}) {{", print_expr(cond)).unwrap();
                print_body(out, then_body, depth + 1);
                indent(out, depth);
                match else_body {
                    Some(b) => {
                        out.push_str("} else {\n");
                        print_body(out, b, depth + 1);
                        indent(out, depth);
                        out.push_str("}\n");
                    }
                    None => out.push_str("}\n"),
                }
            }
        }
    }
}

const ATOM: u8 = 10;

fn binary_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => 1,
        BinOp::Or => 2,
        BinOp::And => 3,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
        BinOp::Add | BinOp::Sub => 7,
        BinOp::Mul | BinOp::Div => 8,
    }
}

/// Source rendering of an expression, parenthesized only where needed.
pub fn print_expr(expr: &Expr) -> String {
    render(expr).0
}

fn wrap(child: &Expr, min: u8) -> String {
    let (s, p) = render(child);
    if p < min {
        format!("({s})")
    } else {
        s
    }
}

fn render(expr: &Expr) -> (String, u8) {
    match &expr.kind {
        ExprKind::Int(v) => (v.to_string(), ATOM),
        ExprKind::Real(v) => (format!("{v:?}"), ATOM),
        ExprKind::Bool(v) => (v.to_string(), ATOM),
        ExprKind::EnumLit { literal, .. } => (literal.clone(), ATOM),
        ExprKind::Ref(path) => {
            let steps: Vec<String> = path
                .iter()
                .map(|s| {
                    if s.indices.is_empty() {
                        s.name.clone()
                    } else {
                        let idx: Vec<_> = s.indices.iter().map(print_expr).collect();
                        format!("{}[{}]", s.name, idx.join(", "))
                    }
                })
                .collect();
            (steps.join("."), ATOM)
        }
        ExprKind::Card(arg) => (format!("card({})", print_expr(arg)), ATOM),
        ExprKind::Unary(UnOp::Neg, arg) => {
            let inner = if matches!(arg.kind, ExprKind::Int(_) | ExprKind::Real(_)) {
                format!("({})", print_expr(arg))
            } else {
                wrap(arg, 9)
            };
            (format!("-{inner}"), 9)
        }
        ExprKind::Unary(UnOp::Not, arg) => (format!("not {}", wrap(arg, 4)), 4),
        ExprKind::Intersect(l, r) => (format!("{} intersect {}", wrap(l, 6), wrap(r, 7)), 6),
        ExprKind::Binary(op, l, r) => {
            let p = binary_prec(*op);
            let (lmin, rmin) = match op {
                BinOp::Implies => (p + 1, p),
                _ if op.is_comparison() => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            let (ls, rs) = (wrap(l, lmin), wrap(r, rmin));
            let text = if op.is_arithmetic() {
                let sep = if rs.starts_with('-') { " " } else { "" };
                format!("{ls}{}{sep}{rs}", op.symbol())
            } else {
                format!("{ls} {} {rs}", op.symbol())
            };
            (text, p)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_model;
    use crate::frontend::ModelItem;

    fn reparse(src: &str) -> Expr {
        let model = parse_model(&format!("constraint c {{ {src}; }}")).unwrap();
        let ModelItem::Feature(Feature::Zone(z)) = &model.items[0] else { panic!() };
        let Statement::Constraint { expr, .. } = &z.body[0] else { panic!() };
        expr.clone()
    }

    #[test]
    fn prints_linearized_index_compactly() {
        let e = reparse("x[(w1 - 1) * g + g1] <= 1");
        assert_eq!(print_expr(&e), "x[(w1-1)*g+g1] <= 1");
    }

    #[test]
    fn keeps_needed_parentheses() {
        for src in [
            "(x = 1) = 2",
            "a - (b - c)",
            "not (a and b)",
            "(a implies b) implies c",
            "a implies b implies c",
            "card(x intersect y) = 0",
            "-(3) + -x",
            "a - -3",
            "(a or not a) and b",
        ] {
            let e = reparse(src);
            let printed = print_expr(&e);
            assert_eq!(reparse(&printed), e, "{src} printed as {printed}");
        }
    }

    #[test]
    fn empty_model_extracts_to_empty_text() {
        let out = extract_source(&PivotModel::default());
        assert_eq!(out, ExtractedSource::default());
    }
}
