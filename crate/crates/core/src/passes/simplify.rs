//! Constant folding.
//!
//! Integer and boolean constants are inlined, integer and boolean
//! subexpressions are evaluated, and a few boolean identities over atomic
//! operands are applied. Real arithmetic is left alone.

use std::collections::{HashMap, HashSet};

use crate::ir::eval::{apply_binary, int_binary, ConstValue, EvalError};
use crate::ir::{
    AccessStep, BinOp, Domain, Element, Expr, ExprKind, Feature, Literal, PivotModel, Statement, UnOp,
};
use crate::problem::Problem;

use super::{PassError, PassOutput};

pub fn simplify_constants(model: &PivotModel) -> Result<PassOutput, PassError> {
    let mut nested = HashSet::new();
    for element in &model.elements {
        match element {
            Element::Class(c) => nested_names(&c.features, &mut nested),
            Element::Feature(Feature::Record(r)) => nested_names(&r.features, &mut nested),
            _ => {}
        }
    }
    let consts: HashMap<String, Expr> = model
        .constants()
        .filter(|c| !nested.contains(&c.name))
        .filter_map(|c| match c.value {
            Literal::Int(v) => Some((c.name.clone(), Expr::int(v))),
            Literal::Bool(v) => Some((c.name.clone(), Expr::boolean(v))),
            Literal::Real(_) => None,
        })
        .collect();
    let s = Simplifier { consts };

    let mut out = model.clone();
    let mut failure = None;
    out.for_each_variable_mut(&mut |v| {
        let mut exprs: Vec<&mut Expr> = Vec::new();
        if let Some(d) = &mut v.array {
            exprs.push(&mut d.n);
            exprs.extend(d.m.as_mut());
        }
        match &mut v.domain {
            Some(Domain::Interval { lower, upper }) => exprs.extend([lower, upper]),
            Some(Domain::Set(values)) => exprs.extend(values.iter_mut()),
            None => {}
        }
        for e in exprs {
            match s.expr(e, &[]) {
                Ok(x) => *e = x,
                Err(err) => {
                    failure.get_or_insert(err);
                }
            }
        }
    });
    let mut problems = Vec::new();
    out.for_each_body_mut(&mut |body| {
        if failure.is_none() {
            match s.body(body, &mut Vec::new(), &mut problems) {
                Ok(b) => *body = b,
                Err(e) => failure = Some(e),
            }
        }
    });
    fold_record_dims(&mut out, &s, &mut failure);
    match failure {
        Some(e) => Err(e),
        None => Ok(PassOutput { model: out, names: crate::passes::NameMap::identity(), problems }),
    }
}

fn nested_names(features: &[Feature], out: &mut HashSet<String>) {
    for f in features {
        out.insert(f.name().to_string());
        if let Feature::Record(r) = f {
            nested_names(&r.features, out);
        }
    }
}

fn fold_record_dims(model: &mut PivotModel, s: &Simplifier, failure: &mut Option<PassError>) {
    fn walk(features: &mut [Feature], s: &Simplifier, failure: &mut Option<PassError>) {
        for f in features {
            if let Feature::Record(r) = f {
                if let Some(d) = &mut r.array {
                    for e in std::iter::once(&mut d.n).chain(d.m.as_mut()) {
                        match s.expr(e, &[]) {
                            Ok(x) => *e = x,
                            Err(err) => {
                                failure.get_or_insert(err);
                            }
                        }
                    }
                }
                walk(&mut r.features, s, failure);
            }
        }
    }
    for element in &mut model.elements {
        match element {
            Element::Class(c) => walk(&mut c.features, s, failure),
            Element::Feature(f) => walk(std::slice::from_mut(f), s, failure),
            _ => {}
        }
    }
}

struct Simplifier {
    consts: HashMap<String, Expr>,
}

fn is_atomic(e: &Expr) -> bool {
    matches!(e.kind, ExprKind::Ref(_) | ExprKind::Bool(_))
}

fn negates(a: &Expr, b: &Expr) -> bool {
    matches!(&b.kind, ExprKind::Unary(UnOp::Not, inner) if is_atomic(a) && **inner == *a)
}

fn literal(v: ConstValue) -> Option<ExprKind> {
    match v {
        ConstValue::Int(i) => Some(ExprKind::Int(i)),
        ConstValue::Bool(b) => Some(ExprKind::Bool(b)),
        _ => None,
    }
}

impl Simplifier {
    fn body(
        &self,
        body: &[Statement],
        bound: &mut Vec<String>,
        problems: &mut Vec<Problem>,
    ) -> Result<Vec<Statement>, PassError> {
        let mut out = Vec::with_capacity(body.len());
        for stmt in body {
            match stmt {
                Statement::Constraint { expr, span } => {
                    let expr = self.expr(expr, bound)?;
                    match expr.kind {
                        ExprKind::Bool(true) => continue,
                        ExprKind::Bool(false) => problems.push(Problem::warning(
                            span.describe(),
                            "constraint simplifies to false",
                        )),
                        _ => {}
                    }
                    out.push(Statement::Constraint { expr, span: span.clone() });
                }
                Statement::Forall { index, lower, upper, body, span } => {
                    let lower = self.expr(lower, bound)?;
                    let upper = self.expr(upper, bound)?;
                    bound.push(index.clone());
                    let body = self.body(body, bound, problems);
                    bound.pop();
                    out.push(Statement::Forall {
                        index: index.clone(),
                        lower,
                        upper,
                        body: body?,
                        span: span.clone(),
                    });
                }
                Statement::If { cond, then_body, else_body, span } => {
                    let cond = self.expr(cond, bound)?;
                    let then_body = self.body(then_body, bound, problems)?;
                    let else_body = match else_body {
                        Some(b) => Some(self.body(b, bound, problems)?),
                        None => None,
                    };
                    out.push(Statement::If { cond, then_body, else_body, span: span.clone() });
                }
            }
        }
        Ok(out)
    }

    fn expr(&self, e: &Expr, bound: &[String]) -> Result<Expr, PassError> {
        let span = e.span.clone();
        let kind = match &e.kind {
            ExprKind::Ref(path) => {
                if let Some(name) = e.as_simple_name() {
                    if !bound.iter().any(|b| b == name) {
                        if let Some(v) = self.consts.get(name) {
                            return Ok(v.clone().with_span(span));
                        }
                    }
                }
                let mut steps = Vec::with_capacity(path.len());
                for step in path {
                    let indices =
                        step.indices.iter().map(|i| self.expr(i, bound)).collect::<Result<_, _>>()?;
                    steps.push(AccessStep { name: step.name.clone(), indices });
                }
                ExprKind::Ref(steps)
            }
            ExprKind::Unary(op, a) => {
                let a = self.expr(a, bound)?;
                match (op, &a.kind) {
                    (UnOp::Neg, ExprKind::Int(v)) if v.checked_neg().is_some() => ExprKind::Int(-v),
                    (UnOp::Not, ExprKind::Bool(b)) => ExprKind::Bool(!b),
                    _ => ExprKind::Unary(*op, Box::new(a)),
                }
            }
            ExprKind::Card(a) => ExprKind::Card(Box::new(self.expr(a, bound)?)),
            ExprKind::Intersect(l, r) => {
                ExprKind::Intersect(Box::new(self.expr(l, bound)?), Box::new(self.expr(r, bound)?))
            }
            ExprKind::Binary(op, l, r) => {
                let l = self.expr(l, bound)?;
                let r = self.expr(r, bound)?;
                return binary(*op, l, r, span);
            }
            other => other.clone(),
        };
        Ok(Expr { kind, span })
    }
}

fn binary(op: BinOp, l: Expr, r: Expr, span: crate::ir::Span) -> Result<Expr, PassError> {
    let folded = match (&l.kind, &r.kind) {
        (ExprKind::Int(a), ExprKind::Int(b)) => match int_binary(op, *a, *b) {
            Ok(v) => literal(v),
            Err(EvalError::DivisionByZero) => {
                return Err(PassError::DivisionByZero { location: span.describe() })
            }
            Err(_) => None,
        },
        (ExprKind::Bool(a), ExprKind::Bool(b)) => {
            apply_binary(op, ConstValue::Bool(*a), ConstValue::Bool(*b)).ok().and_then(literal)
        }
        _ => None,
    };
    if let Some(kind) = folded {
        return Ok(Expr { kind, span });
    }
    let lit = |e: &Expr| match e.kind {
        ExprKind::Bool(b) => Some(b),
        _ => None,
    };
    let keep = |l: Expr, r: Expr| Expr::binary(op, l, r).with_span(span.clone());
    let t = |v: bool| Expr::boolean(v).with_span(span.clone());
    Ok(match op {
        BinOp::And => match (lit(&l), lit(&r)) {
            (Some(false), _) | (_, Some(false)) => t(false),
            (Some(true), _) => r,
            (_, Some(true)) => l,
            _ if negates(&l, &r) || negates(&r, &l) => t(false),
            _ => keep(l, r),
        },
        BinOp::Or => match (lit(&l), lit(&r)) {
            (Some(true), _) | (_, Some(true)) => t(true),
            (Some(false), _) => r,
            (_, Some(false)) => l,
            _ if negates(&l, &r) || negates(&r, &l) => t(true),
            _ => keep(l, r),
        },
        BinOp::Implies => match (lit(&l), lit(&r)) {
            (Some(false), _) | (_, Some(true)) => t(true),
            (Some(true), _) => r,
            (_, Some(false)) => Expr::not(l).with_span(span.clone()),
            _ => keep(l, r),
        },
        _ => keep(l, r),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{extract_source, inject, parse_data, parse_model};
    use crate::ir::census;

    fn model(body: &str) -> PivotModel {
        let src = format!(
            "main class M {{ int x in [0, 9]; bool b; real r in [0, 1]; constraint c {{ {body} }} }}"
        );
        inject(&parse_model(&src).unwrap(), &parse_data("int n := 2;").unwrap()).unwrap()
    }

    fn text(body: &str) -> String {
        extract_source(&simplify_constants(&model(body)).unwrap().model).model
    }

    #[test]
    fn integer_arithmetic_folds() {
        assert!(text("x = 2+3;").contains("x = 5;"));
        assert!(text("x = n*n+1;").contains("x = 5;"));
        assert!(text("x = 7/2;").contains("x = 3;"));
    }

    #[test]
    fn excluded_middle_constraint_disappears() {
        let out = simplify_constants(&model("b or not b; x > 1;")).unwrap();
        assert_eq!(census(&out.model).constraints, 1);
    }

    #[test]
    fn contradiction_is_kept_with_a_warning() {
        let out = simplify_constants(&model("b and not b;")).unwrap();
        assert_eq!(census(&out.model).constraints, 1);
        assert_eq!(out.problems.len(), 1);
    }

    #[test]
    fn real_arithmetic_is_untouched() {
        assert!(text("r = 0.1 + 0.2;").contains("r = 0.1+0.2;"));
    }

    #[test]
    fn boolean_identities() {
        assert!(text("b and true;").contains("  b;\n"));
        assert!(text("x > 1 or false;").contains("x > 1;"));
        assert!(text("b implies false;").contains("not b;"));
    }

    #[test]
    fn loop_index_shadows_constant() {
        let t = text("forall(n in 1..n) { x > n; }");
        assert!(t.contains("forall n in [1,2] {"), "{t}");
        assert!(t.contains("x > n;"), "{t}");
    }

    #[test]
    fn division_by_zero_is_an_error() {
        let err = simplify_constants(&model("x = 1/0;")).unwrap_err();
        assert!(matches!(err, PassError::DivisionByZero { .. }));
    }

    #[test]
    fn second_run_changes_nothing() {
        let once = simplify_constants(&model("x = n+1 and (b or not b); b implies false; x > 2*n;"))
            .unwrap()
            .model;
        let twice = simplify_constants(&once).unwrap().model;
        assert_eq!(once, twice);
    }
}
