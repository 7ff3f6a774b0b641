//! Static checks run on injected models before any transformation.
//!
//! Type mismatches, non-constant or empty domains and composition or
//! inheritance cycles are errors; a singleton domain is a warning.

use std::collections::HashMap;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use crate::ir::eval::{ConstEnv, ConstValue};
use crate::ir::scope::{frame_of, Decl, Scopes};
use crate::ir::{
    BinOp, Domain, Element, Expr, ExprKind, Feature, PivotModel, Span, Statement, TypeRef, UnOp,
    Variable,
};
use crate::problem::Problem;

/// All problems of `model`: types, then domains, then cycles.
pub fn check(model: &PivotModel) -> Vec<Problem> {
    let mut out = check_types(model);
    out.extend(check_domains(model));
    out.extend(check_cycles(model));
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Ty {
    Int,
    Real,
    Bool,
    Enum(String),
    Set,
    /// Already reported, or not a value (arrays, objects).
    Unknown,
}

impl Ty {
    fn numeric(&self) -> bool {
        matches!(self, Ty::Int | Ty::Real)
    }

    fn describe(&self) -> String {
        match self {
            Ty::Int => "int".into(),
            Ty::Real => "real".into(),
            Ty::Bool => "bool".into(),
            Ty::Enum(name) => name.clone(),
            Ty::Set => "set".into(),
            Ty::Unknown => "unknown".into(),
        }
    }
}

fn of_type(ty: &TypeRef, scopes: &Scopes) -> Ty {
    match ty {
        TypeRef::Int => Ty::Int,
        TypeRef::Real => Ty::Real,
        TypeRef::Bool => Ty::Bool,
        TypeRef::Named(n) if !scopes.is_class(n) => Ty::Enum(n.clone()),
        TypeRef::Named(_) => Ty::Unknown,
    }
}

/// Operand and operator consistency.
pub fn check_types(model: &PivotModel) -> Vec<Problem> {
    let mut checker = TypeChecker { scopes: Scopes::new(model), problems: Vec::new() };
    for element in &model.elements {
        match element {
            Element::Class(c) => {
                checker.scopes.push_class(&c.name);
                checker.features(&c.features);
                checker.scopes.pop();
            }
            Element::Feature(f) => checker.features(std::slice::from_ref(f)),
            Element::Predicate(p) => checker.body(&p.body),
            Element::Enum(_) => {}
        }
    }
    checker.problems
}

struct TypeChecker {
    scopes: Scopes,
    problems: Vec<Problem>,
}

impl TypeChecker {
    fn report(&mut self, span: &Span, description: String) {
        self.problems.push(Problem::error(span.describe(), description));
    }

    fn features(&mut self, features: &[Feature]) {
        for f in features {
            match f {
                Feature::Zone(z) => self.body(&z.body),
                Feature::Record(r) => {
                    self.scopes.push_frame(frame_of(r.features.iter(), &mut Vec::new()));
                    self.features(&r.features);
                    self.scopes.pop();
                }
                Feature::Variable(_) | Feature::Constant(_) => {}
            }
        }
    }

    fn body(&mut self, body: &[Statement]) {
        for stmt in body {
            match stmt {
                Statement::Constraint { expr, .. } => self.expect(expr, Ty::Bool, "constraint"),
                Statement::Forall { index, lower, upper, body, .. } => {
                    self.expect(lower, Ty::Int, "loop bound");
                    self.expect(upper, Ty::Int, "loop bound");
                    self.scopes.push_index(index);
                    self.body(body);
                    self.scopes.pop();
                }
                Statement::If { cond, then_body, else_body, .. } => {
                    self.expect(cond, Ty::Bool, "condition");
                    self.body(then_body);
                    if let Some(b) = else_body {
                        self.body(b);
                    }
                }
            }
        }
    }

    fn expect(&mut self, expr: &Expr, want: Ty, role: &str) {
        let got = self.infer(expr);
        if got != Ty::Unknown && got != want {
            let msg = format!("{role} must be {}, found {}", want.describe(), got.describe());
            self.report(&expr.span, msg);
        }
    }

    fn infer(&mut self, expr: &Expr) -> Ty {
        match &expr.kind {
            ExprKind::Int(_) => Ty::Int,
            ExprKind::Real(_) => Ty::Real,
            ExprKind::Bool(_) => Ty::Bool,
            ExprKind::EnumLit { enum_name, .. } => Ty::Enum(enum_name.clone()),
            ExprKind::Ref(path) => {
                for step in path {
                    for i in &step.indices {
                        self.expect(i, Ty::Int, "index");
                    }
                }
                let indexed = path.last().is_some_and(|s| !s.indices.is_empty());
                match self.scopes.resolve(path) {
                    Ok(Decl::Variable { ty, is_set, rank }) => {
                        if rank > 0 && !indexed {
                            Ty::Unknown
                        } else if is_set {
                            Ty::Set
                        } else {
                            of_type(&ty, &self.scopes)
                        }
                    }
                    Ok(Decl::Constant { ty }) => of_type(&ty, &self.scopes),
                    Ok(Decl::Literal { enum_name, .. }) => Ty::Enum(enum_name),
                    Ok(Decl::Index) => Ty::Int,
                    _ => Ty::Unknown,
                }
            }
            ExprKind::Unary(UnOp::Neg, arg) => {
                let t = self.infer(arg);
                if t.numeric() || t == Ty::Unknown {
                    t
                } else {
                    self.report(&expr.span, format!("`-` applied to {}", t.describe()));
                    Ty::Unknown
                }
            }
            ExprKind::Unary(UnOp::Not, arg) => {
                self.expect(arg, Ty::Bool, "operand of `not`");
                Ty::Bool
            }
            ExprKind::Card(arg) => {
                self.expect(arg, Ty::Set, "operand of `card`");
                Ty::Int
            }
            ExprKind::Intersect(l, r) => {
                self.expect(l, Ty::Set, "operand of `intersect`");
                self.expect(r, Ty::Set, "operand of `intersect`");
                Ty::Set
            }
            ExprKind::Binary(op, l, r) => self.binary(expr, *op, l, r),
        }
    }

    fn binary(&mut self, expr: &Expr, op: BinOp, l: &Expr, r: &Expr) -> Ty {
        let is_eq = |e: &Expr| matches!(e.kind, ExprKind::Binary(BinOp::Eq, ..));
        if op == BinOp::Eq && (is_eq(l) || is_eq(r)) {
            self.report(&expr.span, "several equalities in one equality constraint".into());
            return Ty::Bool;
        }
        if op.is_logical() {
            let role = format!("operand of `{}`", op.symbol());
            self.expect(l, Ty::Bool, &role);
            self.expect(r, Ty::Bool, &role);
            return Ty::Bool;
        }
        let (lt, rt) = (self.infer(l), self.infer(r));
        if lt == Ty::Unknown || rt == Ty::Unknown {
            return if op.is_comparison() { Ty::Bool } else { Ty::Unknown };
        }
        let ok = match op {
            BinOp::Eq | BinOp::Ne => (lt.numeric() && rt.numeric()) || lt == rt,
            _ if op.is_comparison() => {
                (lt.numeric() && rt.numeric()) || (matches!(lt, Ty::Enum(_)) && lt == rt)
            }
            _ => lt.numeric() && rt.numeric(),
        };
        if !ok {
            let msg = format!(
                "operator `{}` does not apply to {} and {}",
                op.symbol(),
                lt.describe(),
                rt.describe()
            );
            self.report(&expr.span, msg);
            return if op.is_comparison() { Ty::Bool } else { Ty::Unknown };
        }
        if op.is_comparison() {
            Ty::Bool
        } else if lt == Ty::Real || rt == Ty::Real {
            Ty::Real
        } else {
            Ty::Int
        }
    }
}

/// Domains and array sizes must be constant; domains must be non-empty.
pub fn check_domains(model: &PivotModel) -> Vec<Problem> {
    let mut env = ConstEnv::from_model(model);
    let mut problems = Vec::new();
    for element in &model.elements {
        match element {
            Element::Class(c) => domains_in(&c.features, &mut env, &mut problems),
            Element::Feature(f) => domains_in(std::slice::from_ref(f), &mut env, &mut problems),
            _ => {}
        }
    }
    problems
}

fn domains_in(features: &[Feature], env: &mut ConstEnv, problems: &mut Vec<Problem>) {
    let mut bound = 0;
    for f in features {
        if let Feature::Constant(c) = f {
            env.bind(&c.name, crate::ir::eval::literal_value(&c.value));
            bound += 1;
        }
    }
    for f in features {
        match f {
            Feature::Variable(v) => variable_domain(v, env, problems),
            Feature::Record(r) => {
                if let Some(dims) = &r.array {
                    for d in dims.exprs() {
                        dimension(d, &r.name, &r.span, env, problems);
                    }
                }
                domains_in(&r.features, env, problems);
            }
            _ => {}
        }
    }
    for _ in 0..bound {
        env.unbind();
    }
}

fn as_number(v: ConstValue) -> Option<f64> {
    match v {
        ConstValue::Int(i) | ConstValue::Enum(i) => Some(i as f64),
        ConstValue::Real(r) => Some(r),
        ConstValue::Bool(_) => None,
    }
}

fn dimension(d: &Expr, owner: &str, span: &Span, env: &ConstEnv, problems: &mut Vec<Problem>) {
    let loc = if d.span.loc().is_some() { &d.span } else { span };
    match env.eval_int(d) {
        Ok(n) if n < 0 => {
            problems.push(Problem::error(loc.describe(), format!("negative size {n} for `{owner}`")))
        }
        Ok(_) => {}
        Err(e) => problems.push(Problem::error(
            loc.describe(),
            format!("size of `{owner}` must be a constant expression ({e})"),
        )),
    }
}

fn variable_domain(v: &Variable, env: &ConstEnv, problems: &mut Vec<Problem>) {
    let loc = v.span.describe();
    if let Some(dims) = &v.array {
        for d in dims.exprs() {
            dimension(d, &v.name, &v.span, env, problems);
        }
    }
    let constant = |e: &Expr, problems: &mut Vec<Problem>| match env.eval(e).map(as_number) {
        Ok(Some(x)) => Some(x),
        Ok(None) => {
            problems.push(Problem::error(&loc, format!("domain of `{}` must be numeric", v.name)));
            None
        }
        Err(e) => {
            problems.push(Problem::error(
                &loc,
                format!("domain of `{}` must be based on constant expressions ({e})", v.name),
            ));
            None
        }
    };
    match &v.domain {
        Some(Domain::Interval { lower, upper }) => {
            let lo = constant(lower, problems);
            let hi = constant(upper, problems);
            if let (Some(lo), Some(hi)) = (lo, hi) {
                if lo > hi {
                    problems.push(Problem::error(&loc, format!("empty domain for `{}`", v.name)));
                } else if lo == hi {
                    problems.push(Problem::warning(&loc, format!("singleton domain for `{}`", v.name)));
                }
            }
        }
        Some(Domain::Set(values)) => {
            if values.is_empty() {
                problems.push(Problem::error(&loc, format!("empty domain for `{}`", v.name)));
            }
            for value in values {
                constant(value, problems);
            }
        }
        None => {}
    }
}

/// No class may reach itself through `extends` or object-variable types.
/// Also reports duplicate class names.
pub fn check_cycles(model: &PivotModel) -> Vec<Problem> {
    let mut problems = Vec::new();
    let mut graph = DiGraph::<&str, ()>::new();
    let mut nodes: HashMap<&str, NodeIndex> = HashMap::new();
    let mut spans = Vec::new();
    for class in model.classes() {
        if nodes.contains_key(class.name.as_str()) {
            problems.push(Problem::error(
                class.span.describe(),
                format!("duplicate class `{}`", class.name),
            ));
            continue;
        }
        nodes.insert(&class.name, graph.add_node(&class.name));
        spans.push(&class.span);
    }
    for class in model.classes() {
        let from = nodes[class.name.as_str()];
        let mut targets: Vec<&str> = class.super_types.iter().map(String::as_str).collect();
        object_types(&class.features, &mut targets);
        for t in targets {
            if let Some(&to) = nodes.get(t) {
                graph.update_edge(from, to, ());
            }
        }
    }
    let mut cycles: Vec<Vec<NodeIndex>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|mut scc| {
            scc.sort();
            scc
        })
        .collect();
    cycles.sort();
    for scc in cycles {
        let names: Vec<&str> = scc.iter().map(|&n| graph[n]).collect();
        problems.push(Problem::error(
            spans[scc[0].index()].describe(),
            format!("composition or inheritance cycle through {}", names.join(", ")),
        ));
    }
    problems
}

fn object_types<'m>(features: &'m [Feature], out: &mut Vec<&'m str>) {
    for f in features {
        match f {
            Feature::Variable(Variable { ty: TypeRef::Named(n), .. }) => out.push(n),
            Feature::Record(r) => object_types(&r.features, out),
            _ => {}
        }
    }
}
