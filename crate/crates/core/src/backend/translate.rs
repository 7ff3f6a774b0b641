//! Flat pivot model to ECLiPSe atoms.

use std::collections::{BTreeMap, BTreeSet};

use crate::ir::eval::{ConstEnv, ConstValue};
use crate::ir::{
    fresh_name, Domain, Element, Expr, ExprKind, Feature, Literal, PivotModel, Span, Statement, TypeRef,
    UnOp, Variable, ZoneOrigin,
};

use super::{compute_params, BackendError, EclAtom, EclDomain, EclExpr, EclModel, EclPredicate};

const LIST: &str = "L";

fn unsupported(kind: impl Into<String>, span: &Span) -> BackendError {
    BackendError::UnsupportedConstruct { kind: kind.into(), location: span.describe() }
}

/// Target variable spelling: upper case, anything else becomes `_`.
fn upper(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() { c.to_ascii_uppercase() } else { '_' })
        .collect()
}

fn predicate_name(model: &str) -> String {
    let mut chars = model.chars();
    match chars.next() {
        Some(c) => c.to_lowercase().chain(chars).collect(),
        None => "model".to_string(),
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    Constant,
    Scalar,
    IntArray,
    SetArray,
}

struct Names {
    globals: BTreeMap<String, (String, Kind)>,
    iters: Vec<(String, String)>,
    taken: BTreeSet<String>,
    /// List holding the set-array elements, per set array.
    lists: BTreeMap<String, String>,
}

impl Names {
    fn new() -> Self {
        let mut taken = BTreeSet::new();
        taken.insert(LIST.to_string());
        Names { globals: BTreeMap::new(), iters: Vec::new(), taken, lists: BTreeMap::new() }
    }

    fn claim(&mut self, name: &str) -> String {
        let mut target = upper(name);
        if self.taken.contains(&target) {
            target = fresh_name(&target, &self.taken);
        }
        self.taken.insert(target.clone());
        target
    }

    fn global(&mut self, name: &str, kind: Kind) -> String {
        let target = self.claim(name);
        self.globals.insert(name.to_string(), (target.clone(), kind));
        target
    }

    fn lookup(&self, name: &str) -> Option<(&str, Kind)> {
        if let Some((_, t)) = self.iters.iter().rev().find(|(n, _)| n == name) {
            return Some((t, Kind::Scalar));
        }
        self.globals.get(name).map(|(t, k)| (t.as_str(), *k))
    }
}

/// Translates a flat model (no classes, records, enumerations, conditionals
/// or two-dimensional arrays) into a single predicate with parameter `L`.
pub fn to_eclipse(model: &PivotModel) -> Result<EclModel, BackendError> {
    let env = ConstEnv::from_model(model);
    let mut names = Names::new();
    let mut body = Vec::new();
    let mut decision = Vec::new();
    let mut zones = Vec::new();

    for element in &model.elements {
        match element {
            Element::Enum(e) => return Err(unsupported(format!("enumeration `{}`", e.name), &e.span)),
            Element::Class(c) => return Err(unsupported(format!("class `{}`", c.name), &c.span)),
            Element::Predicate(_) => {}
            Element::Feature(Feature::Record(r)) => {
                return Err(unsupported(format!("record `{}`", r.name), &r.span))
            }
            Element::Feature(Feature::Constant(c)) => {
                let target = names.global(&c.name, Kind::Constant);
                let value = match c.value {
                    Literal::Int(v) => EclExpr::Int(v),
                    Literal::Real(v) => EclExpr::Real(v),
                    Literal::Bool(v) => EclExpr::Int(v as i64),
                };
                body.push(EclAtom::ConstBind { name: target, value });
            }
            Element::Feature(Feature::Variable(v)) => decision.push(v),
            Element::Feature(Feature::Zone(z)) => zones.push(z),
        }
    }

    let has_sets = decision.iter().any(|v| v.is_set);
    if has_sets && decision.iter().any(|v| !v.is_set) {
        let v = decision.iter().find(|v| !v.is_set).unwrap();
        return Err(unsupported(
            format!("integer variable `{}` beside set variables", v.name),
            &v.span,
        ));
    }
    let mut targets = Vec::new();
    for v in &decision {
        let target = declare(v, &env, &mut names, &mut body)?;
        targets.push(target);
    }
    let direct = decision.len() == 1 && decision[0].is_set && decision[0].array.is_some();
    if direct {
        body.push(EclAtom::ListAlias { name: LIST.into(), target: targets[0].clone() });
        names.lists.insert(decision[0].name.clone(), LIST.into());
    } else if !targets.is_empty() {
        body.push(EclAtom::CollectVars { name: LIST.into(), targets: targets.clone() });
    }

    let declared = zones.iter().filter(|z| z.origin == ZoneOrigin::Declared);
    let dissolved = zones.iter().filter(|z| z.origin == ZoneOrigin::Record);
    for zone in declared.chain(dissolved) {
        for stmt in &zone.body {
            statement(stmt, &env, &mut names, &mut body)?;
        }
    }

    body.push(if has_sets || decision.is_empty() {
        EclAtom::LabelSets { list: LIST.into() }
    } else {
        EclAtom::Labeling { list: LIST.into() }
    });
    let mut out = EclModel {
        predicates: vec![EclPredicate { name: predicate_name(&model.name), params: vec![LIST.into()], body }],
    };
    compute_params(&mut out);
    Ok(out)
}

/// Folded integer when constant, translated expression otherwise.
fn number(e: &Expr, env: &ConstEnv, names: &Names) -> Result<EclExpr, BackendError> {
    match env.eval(e) {
        Ok(ConstValue::Int(v)) => Ok(EclExpr::Int(v)),
        Ok(ConstValue::Real(v)) => Ok(EclExpr::Real(v)),
        _ => expr(e, names),
    }
}

fn fold(e: &Expr, env: &ConstEnv, what: &str) -> Result<i64, BackendError> {
    env.eval_int(e)
        .map_err(|_| unsupported(format!("non-constant {what}"), &e.span))
}

fn declare(
    v: &Variable,
    env: &ConstEnv,
    names: &mut Names,
    body: &mut Vec<EclAtom>,
) -> Result<String, BackendError> {
    if let Some(dims) = &v.array {
        if dims.m.is_some() {
            return Err(unsupported(format!("two-dimensional array `{}`", v.name), &v.span));
        }
    }
    if let TypeRef::Named(n) = &v.ty {
        return Err(unsupported(format!("variable `{}` of type `{n}`", v.name), &v.span));
    }
    if v.is_set {
        let (lo, hi) = match &v.domain {
            Some(Domain::Interval { lower, upper }) => (fold(lower, env, "bound")?, fold(upper, env, "bound")?),
            _ => return Err(unsupported(format!("set variable `{}` without an interval", v.name), &v.span)),
        };
        let kind = if v.array.is_some() { Kind::SetArray } else { Kind::Scalar };
        let target = names.global(&v.name, kind);
        match &v.array {
            Some(dims) => {
                names.lists.insert(v.name.clone(), target.clone());
                let count = fold(&dims.n, env, "array size")?;
                body.push(EclAtom::IntsetsDecl { list_var: target.clone(), count, lo, hi });
            }
            None => body.push(EclAtom::IntsetDecl { var: target.clone(), lo, hi }),
        }
        return Ok(target);
    }
    let kind = if v.array.is_some() { Kind::IntArray } else { Kind::Scalar };
    let target = names.global(&v.name, kind);
    if let Some(dims) = &v.array {
        body.push(EclAtom::ArrayDecl { var: target.clone(), sizes: vec![number(&dims.n, env, names)?] });
    }
    let domain = match (&v.ty, &v.domain) {
        (TypeRef::Bool, _) => EclDomain::Interval(EclExpr::Int(0), EclExpr::Int(1)),
        (_, Some(Domain::Interval { lower, upper })) => {
            EclDomain::Interval(number(lower, env, names)?, number(upper, env, names)?)
        }
        (_, Some(Domain::Set(values))) => {
            EclDomain::Values(values.iter().map(|e| number(e, env, names)).collect::<Result<_, _>>()?)
        }
        (TypeRef::Real, None) => EclDomain::Reals,
        (_, None) => EclDomain::Integers,
    };
    body.push(EclAtom::DomainDecl { var: target.clone(), domain });
    Ok(target)
}

fn statement(
    stmt: &Statement,
    env: &ConstEnv,
    names: &mut Names,
    out: &mut Vec<EclAtom>,
) -> Result<(), BackendError> {
    match stmt {
        Statement::Constraint { expr: e, .. } => {
            let t = expr(e, names)?;
            let t = match t {
                EclExpr::Binary(op, ..) if op.is_comparison() || op.is_logical() => t,
                EclExpr::Not(_) => t,
                atomic => EclExpr::Binary(crate::ir::BinOp::Eq, Box::new(atomic), Box::new(EclExpr::Int(1))),
            };
            out.push(EclAtom::Constraint { expr: t });
        }
        Statement::Forall { index, lower, upper, body, .. } => {
            let from = expr(lower, names)?;
            let to = expr(upper, names)?;
            let iter = names.claim(index);
            names.iters.push((index.clone(), iter.clone()));
            let mut inner = Vec::new();
            let result = body.iter().try_for_each(|s| statement(s, env, names, &mut inner));
            names.iters.pop();
            names.taken.remove(&iter);
            result?;
            out.push(EclAtom::ForLoop { iter, from, to, params: Vec::new(), body: inner });
        }
        Statement::If { span, .. } => return Err(unsupported("conditional statement", span)),
    }
    Ok(())
}

fn expr(e: &Expr, names: &Names) -> Result<EclExpr, BackendError> {
    let boxed = |x: &Expr| expr(x, names).map(Box::new);
    Ok(match &e.kind {
        ExprKind::Int(v) => EclExpr::Int(*v),
        ExprKind::Real(v) => EclExpr::Real(*v),
        ExprKind::Bool(b) => EclExpr::Int(*b as i64),
        ExprKind::EnumLit { literal, .. } => {
            return Err(unsupported(format!("enumeration literal `{literal}`"), &e.span))
        }
        ExprKind::Ref(path) => {
            if path.len() != 1 {
                return Err(unsupported("member access", &e.span));
            }
            let step = &path[0];
            let Some((target, kind)) = names.lookup(&step.name) else {
                return Err(unsupported(format!("unresolved name `{}`", step.name), &e.span));
            };
            match (kind, step.indices.len()) {
                (_, 0) => EclExpr::var(target),
                (Kind::SetArray, 1) => EclExpr::SetElem {
                    list: names.lists[&step.name].clone(),
                    index: boxed(&step.indices[0])?,
                },
                (Kind::IntArray, 1) => EclExpr::Subscript(target.to_string(), vec![expr(&step.indices[0], names)?]),
                _ => return Err(unsupported(format!("indexing `{}`", step.name), &e.span)),
            }
        }
        ExprKind::Unary(UnOp::Neg, a) => EclExpr::Neg(boxed(a)?),
        ExprKind::Unary(UnOp::Not, a) => EclExpr::Not(boxed(a)?),
        ExprKind::Binary(op, l, r) => EclExpr::Binary(*op, boxed(l)?, boxed(r)?),
        ExprKind::Card(a) => EclExpr::Card(boxed(a)?),
        ExprKind::Intersect(l, r) => EclExpr::Intersect(boxed(l)?, boxed(r)?),
    })
}
