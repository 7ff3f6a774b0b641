//! Generic tree utilities shared by every pass.

use std::collections::BTreeSet;

use super::{
    AccessStep, Domain, Element, Expr, ExprKind, Feature, PivotModel, Statement,
};

/// Deep copy of a pivot node. Every call yields an independent value.
pub fn duplicate<T: Clone>(node: &T) -> T {
    node.clone()
}

/// Replacement of free occurrences of an index name.
pub trait Substitute: Sized {
    /// Replaces every free occurrence of `name` by `replacement`.
    /// Occurrences bound by an inner `forall` over the same name are left alone.
    fn substitute(&self, name: &str, replacement: &Expr) -> Self;
}

impl Substitute for Expr {
    fn substitute(&self, name: &str, replacement: &Expr) -> Self {
        let kind = match &self.kind {
            ExprKind::Ref(path) => {
                if path.len() == 1 && path[0].indices.is_empty() && path[0].name == name {
                    return replacement.clone();
                }
                ExprKind::Ref(
                    path.iter()
                        .map(|step| AccessStep {
                            name: step.name.clone(),
                            indices: step
                                .indices
                                .iter()
                                .map(|i| i.substitute(name, replacement))
                                .collect(),
                        })
                        .collect(),
                )
            }
            ExprKind::Unary(op, arg) => {
                ExprKind::Unary(*op, Box::new(arg.substitute(name, replacement)))
            }
            ExprKind::Binary(op, l, r) => ExprKind::Binary(
                *op,
                Box::new(l.substitute(name, replacement)),
                Box::new(r.substitute(name, replacement)),
            ),
            ExprKind::Card(arg) => ExprKind::Card(Box::new(arg.substitute(name, replacement))),
            ExprKind::Intersect(l, r) => ExprKind::Intersect(
                Box::new(l.substitute(name, replacement)),
                Box::new(r.substitute(name, replacement)),
            ),
            other => other.clone(),
        };
        Expr { kind, span: self.span.clone() }
    }
}

impl Substitute for Statement {
    fn substitute(&self, name: &str, replacement: &Expr) -> Self {
        match self {
            Statement::Constraint { expr, span } => Statement::Constraint {
                expr: expr.substitute(name, replacement),
                span: span.clone(),
            },
            Statement::Forall { index, lower, upper, body, span } => Statement::Forall {
                index: index.clone(),
                lower: lower.substitute(name, replacement),
                upper: upper.substitute(name, replacement),
                body: if index == name {
                    body.clone()
                } else {
                    body.substitute(name, replacement)
                },
                span: span.clone(),
            },
            Statement::If { cond, then_body, else_body, span } => Statement::If {
                cond: cond.substitute(name, replacement),
                then_body: then_body.substitute(name, replacement),
                else_body: else_body.as_ref().map(|b| b.substitute(name, replacement)),
                span: span.clone(),
            },
        }
    }
}

impl Substitute for Vec<Statement> {
    fn substitute(&self, name: &str, replacement: &Expr) -> Self {
        self.iter().map(|s| s.substitute(name, replacement)).collect()
    }
}

/// Names occurring free in a node.
pub trait FreeNames {
    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>);
}

impl FreeNames for Expr {
    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match &self.kind {
            ExprKind::Ref(path) => {
                if let Some(first) = path.first() {
                    if !bound.contains(&first.name) {
                        out.insert(first.name.clone());
                    }
                }
                for step in path {
                    for i in &step.indices {
                        i.collect_free(bound, out);
                    }
                }
            }
            ExprKind::Unary(_, a) | ExprKind::Card(a) => a.collect_free(bound, out),
            ExprKind::Binary(_, l, r) | ExprKind::Intersect(l, r) => {
                l.collect_free(bound, out);
                r.collect_free(bound, out);
            }
            ExprKind::Int(_) | ExprKind::Real(_) | ExprKind::Bool(_) | ExprKind::EnumLit { .. } => {}
        }
    }
}

impl FreeNames for Statement {
    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Statement::Constraint { expr, .. } => expr.collect_free(bound, out),
            Statement::Forall { index, lower, upper, body, .. } => {
                lower.collect_free(bound, out);
                upper.collect_free(bound, out);
                bound.push(index.clone());
                for s in body {
                    s.collect_free(bound, out);
                }
                bound.pop();
            }
            Statement::If { cond, then_body, else_body, .. } => {
                cond.collect_free(bound, out);
                for s in then_body.iter().chain(else_body.iter().flatten()) {
                    s.collect_free(bound, out);
                }
            }
        }
    }
}

impl FreeNames for [Statement] {
    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        for s in self {
            s.collect_free(bound, out);
        }
    }
}

/// The names occurring free in `node`; loop indices bound inside are excluded.
/// Only the head of an access path counts: in `a[i].b`, `b` is a member, not a name.
pub fn free_names<T: FreeNames + ?Sized>(node: &T) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    node.collect_free(&mut Vec::new(), &mut out);
    out
}

/// `prefix` followed by the smallest positive integer not in `taken`.
pub fn fresh_name(prefix: &str, taken: &BTreeSet<String>) -> String {
    (1u64..)
        .map(|k| format!("{prefix}{k}"))
        .find(|candidate| !taken.contains(candidate))
        .expect("unbounded counter")
}

/// Node-kind counts over a whole model.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Census {
    pub enums: usize,
    pub enum_literals: usize,
    pub classes: usize,
    pub records: usize,
    pub variables: usize,
    pub matrices: usize,
    pub constraints: usize,
    pub foralls: usize,
    pub ifs: usize,
}

pub fn census(model: &PivotModel) -> Census {
    let mut c = Census::default();
    fn expr(e: &Expr, c: &mut Census) {
        match &e.kind {
            ExprKind::EnumLit { .. } => c.enum_literals += 1,
            ExprKind::Ref(path) => path.iter().flat_map(|s| &s.indices).for_each(|i| expr(i, c)),
            ExprKind::Unary(_, a) | ExprKind::Card(a) => expr(a, c),
            ExprKind::Binary(_, l, r) | ExprKind::Intersect(l, r) => {
                expr(l, c);
                expr(r, c);
            }
            _ => {}
        }
    }
    fn stmts(body: &[Statement], c: &mut Census) {
        for s in body {
            match s {
                Statement::Constraint { expr: e, .. } => {
                    c.constraints += 1;
                    expr(e, c);
                }
                Statement::Forall { lower, upper, body, .. } => {
                    c.foralls += 1;
                    expr(lower, c);
                    expr(upper, c);
                    stmts(body, c);
                }
                Statement::If { cond, then_body, else_body, .. } => {
                    c.ifs += 1;
                    expr(cond, c);
                    stmts(then_body, c);
                    if let Some(b) = else_body {
                        stmts(b, c);
                    }
                }
            }
        }
    }
    fn features(fs: &[Feature], c: &mut Census) {
        for f in fs {
            match f {
                Feature::Variable(v) => {
                    c.variables += 1;
                    if v.array.as_ref().is_some_and(|d| d.m.is_some()) {
                        c.matrices += 1;
                    }
                    if let Some(Domain::Set(values)) = &v.domain {
                        values.iter().for_each(|e| expr(e, c));
                    }
                }
                Feature::Constant(_) => {}
                Feature::Zone(z) => stmts(&z.body, c),
                Feature::Record(r) => {
                    c.records += 1;
                    features(&r.features, c);
                }
            }
        }
    }
    for element in &model.elements {
        match element {
            Element::Enum(_) => c.enums += 1,
            Element::Class(class) => {
                c.classes += 1;
                features(&class.features, &mut c);
            }
            Element::Feature(f) => features(std::slice::from_ref(f), &mut c),
            Element::Predicate(p) => stmts(&p.body, &mut c),
        }
    }
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::BinOp;

    fn x_i_gt_0(index: &str) -> Expr {
        Expr::binary(BinOp::Gt, Expr::indexed("x", vec![Expr::name(index)]), Expr::int(0))
    }

    #[test]
    fn duplicate_is_structurally_equal() {
        let lit = Expr::int(5);
        assert_eq!(duplicate(&lit), lit);
        let forall = Statement::Forall {
            index: "i".into(),
            lower: Expr::int(1),
            upper: Expr::name("w"),
            body: vec![Statement::constraint(x_i_gt_0("i"))],
            span: Default::default(),
        };
        assert_eq!(duplicate(&forall), forall);
    }

    #[test]
    fn duplicates_are_independent() {
        let v = crate::ir::Variable {
            name: "players".into(),
            ty: crate::ir::TypeRef::Named("Name".into()),
            is_set: true,
            array: None,
            domain: None,
            span: Default::default(),
        };
        let mut a = duplicate(&v);
        let b = duplicate(&v);
        a.name.push_str("_x");
        assert_eq!(b, v);
        assert_ne!(a, b);
    }

    #[test]
    fn substitute_replaces_free_index() {
        let e = x_i_gt_0("i").substitute("i", &Expr::int(2));
        assert_eq!(
            e,
            Expr::binary(BinOp::Gt, Expr::indexed("x", vec![Expr::int(2)]), Expr::int(0))
        );
    }

    #[test]
    fn substitute_respects_shadowing() {
        let forall = Statement::Forall {
            index: "i".into(),
            lower: Expr::int(1),
            upper: Expr::int(3),
            body: vec![Statement::constraint(x_i_gt_0("i"))],
            span: Default::default(),
        };
        assert_eq!(forall.substitute("i", &Expr::int(1)), forall);
    }

    #[test]
    fn substitute_with_self_is_identity() {
        let e = x_i_gt_0("i");
        assert_eq!(e.substitute("i", &Expr::name("i")), e);
    }

    #[test]
    fn free_names_of_forall() {
        let forall = Statement::Forall {
            index: "i".into(),
            lower: Expr::int(1),
            upper: Expr::name("n"),
            body: vec![Statement::constraint(Expr::binary(
                BinOp::Gt,
                Expr::indexed("x", vec![Expr::name("i")]),
                Expr::name("k"),
            ))],
            span: Default::default(),
        };
        let names: Vec<_> = free_names(&forall).into_iter().collect();
        assert_eq!(names, vec!["k", "n", "x"]);
        let sum = Expr::binary(BinOp::Add, Expr::name("x"), Expr::name("y"));
        assert_eq!(free_names(&sum).into_iter().collect::<Vec<_>>(), vec!["x", "y"]);
    }

    #[test]
    fn fresh_names_count_up() {
        let mut taken = BTreeSet::new();
        assert_eq!(fresh_name("V", &taken), "V1");
        taken.insert("V1".to_string());
        assert_eq!(fresh_name("V", &taken), "V2");
        let taken: BTreeSet<String> = (1..=12).map(|k| format!("V{k}")).collect();
        assert_eq!(fresh_name("V", &taken), "V13");
    }
}
