//! Records to flat variables.
//!
//! Members are hoisted under names joined with `_` along the container
//! chain. Array records turn into loops indexed by the record's name, and
//! an array record's variables become one vector whose index linearizes the
//! container indices: `weeks[w1].groups[g1].players` becomes
//! `weeks_groups_players[(w1-1)*g+g1]`.

use std::collections::{BTreeSet, HashMap};

use crate::ir::{
    fresh_name, AccessStep, ArrayDims, BinOp, ConstraintZone, Domain, Element, Expr, ExprKind,
    Feature, PivotModel, Record, Span, Statement, Variable, ZoneOrigin,
};
use crate::problem::Problem;

use super::names::{NameMap, NameStep};
use super::{PassError, PassOutput};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RecordOptions {
    /// Deepest accepted nesting of array records.
    pub max_array_depth: usize,
}

impl Default for RecordOptions {
    fn default() -> Self {
        RecordOptions { max_array_depth: 2 }
    }
}

pub fn flatten_records(model: &PivotModel) -> Result<PassOutput, PassError> {
    flatten_records_with(model, &RecordOptions::default())
}

pub fn flatten_records_with(model: &PivotModel, opts: &RecordOptions) -> Result<PassOutput, PassError> {
    let mut taken = BTreeSet::new();
    for element in &model.elements {
        match element {
            Element::Feature(Feature::Record(_)) => {}
            Element::Enum(e) => {
                taken.insert(e.name.clone());
                taken.extend(e.literals.iter().cloned());
            }
            other => {
                taken.insert(other.name().to_string());
            }
        }
    }
    let mut f = Flattener {
        table: HashMap::new(),
        taken,
        indices: BTreeSet::new(),
        problems: Vec::new(),
        names: NameMap::identity(),
    };
    for element in &model.elements {
        if let Element::Feature(Feature::Record(r)) = element {
            f.register(&[], r, 0, opts)?;
        }
    }
    for element in &model.elements {
        if let Element::Feature(Feature::Record(r)) = element {
            f.sizes(&mut Vec::new(), r)?;
        }
    }

    let mut out = PivotModel::new(model.name.clone());
    for element in &model.elements {
        match element {
            Element::Feature(Feature::Record(r)) => {
                let mut decls = Vec::new();
                let body = f.dissolve(&mut Vec::new(), r, &[], &mut decls)?;
                out.elements.extend(decls.into_iter().map(Element::Feature));
                if !body.is_empty() {
                    let name = if f.taken.contains(&r.name) {
                        fresh_name(&r.name, &f.taken)
                    } else {
                        r.name.clone()
                    };
                    f.taken.insert(name.clone());
                    out.elements.push(Element::Feature(Feature::Zone(ConstraintZone {
                        name,
                        body,
                        origin: ZoneOrigin::Record,
                        span: r.span.clone(),
                    })));
                }
            }
            Element::Feature(Feature::Zone(z)) => {
                let body = f.body(&z.body, &[], &mut Vec::new())?;
                out.elements.push(Element::Feature(Feature::Zone(ConstraintZone { body, ..z.clone() })));
            }
            Element::Predicate(p) => {
                let mut p = p.clone();
                p.body = f.body(&p.body, &[], &mut Vec::new())?;
                out.elements.push(Element::Predicate(p));
            }
            other => out.elements.push(other.clone()),
        }
    }
    Ok(PassOutput { model: out, names: f.names, problems: f.problems })
}

#[derive(Clone, Debug)]
enum Node {
    Record { dims: Vec<Expr> },
    Leaf { flat: String, is_const: bool, dims: Vec<Expr> },
}

/// An enclosing record while walking its statements: its signature and
/// the loop indices standing for the current element.
#[derive(Clone, Debug)]
struct Level {
    sig: Vec<String>,
    indices: Vec<Expr>,
}

struct Flattener {
    table: HashMap<Vec<String>, Node>,
    taken: BTreeSet<String>,
    indices: BTreeSet<String>,
    problems: Vec<Problem>,
    names: NameMap,
}

fn extended(prefix: &[String], name: &str) -> Vec<String> {
    let mut sig = prefix.to_vec();
    sig.push(name.to_string());
    sig
}

fn dims_of(array: &Option<ArrayDims>) -> Vec<Expr> {
    array.as_ref().map_or_else(Vec::new, |d| d.exprs().into_iter().cloned().collect())
}

fn product(factors: &[Expr]) -> Expr {
    let mut it = factors.iter().cloned();
    let first = it.next().unwrap_or_else(|| Expr::int(1));
    it.fold(first, |acc, f| Expr::binary(BinOp::Mul, acc, f))
}

/// 1-based row-major linear index expression.
fn linear_index(items: &[(Expr, Expr)]) -> Expr {
    let mut acc = items[0].0.clone();
    for (index, size) in &items[1..] {
        let shifted = Expr::binary(BinOp::Sub, acc, Expr::int(1));
        acc = Expr::binary(BinOp::Add, Expr::binary(BinOp::Mul, shifted, size.clone()), index.clone());
    }
    acc
}

fn idents_in_expr(e: &Expr, out: &mut BTreeSet<String>) {
    match &e.kind {
        ExprKind::Ref(path) => {
            for step in path {
                out.insert(step.name.clone());
                step.indices.iter().for_each(|i| idents_in_expr(i, out));
            }
        }
        ExprKind::Unary(_, a) | ExprKind::Card(a) => idents_in_expr(a, out),
        ExprKind::Binary(_, l, r) | ExprKind::Intersect(l, r) => {
            idents_in_expr(l, out);
            idents_in_expr(r, out);
        }
        _ => {}
    }
}

fn idents_in_body(body: &[Statement], out: &mut BTreeSet<String>) {
    for s in body {
        match s {
            Statement::Constraint { expr, .. } => idents_in_expr(expr, out),
            Statement::Forall { index, lower, upper, body, .. } => {
                out.insert(index.clone());
                idents_in_expr(lower, out);
                idents_in_expr(upper, out);
                idents_in_body(body, out);
            }
            Statement::If { cond, then_body, else_body, .. } => {
                idents_in_expr(cond, out);
                idents_in_body(then_body, out);
                idents_in_body(else_body.as_deref().unwrap_or(&[]), out);
            }
        }
    }
}

fn idents_in_record(r: &Record, out: &mut BTreeSet<String>) {
    for f in &r.features {
        match f {
            Feature::Zone(z) => idents_in_body(&z.body, out),
            Feature::Record(inner) => idents_in_record(inner, out),
            _ => {}
        }
    }
}

impl Flattener {
    fn register(
        &mut self,
        prefix: &[String],
        r: &Record,
        array_depth: usize,
        opts: &RecordOptions,
    ) -> Result<(), PassError> {
        let depth = array_depth + usize::from(r.array.is_some());
        if depth > opts.max_array_depth {
            return Err(PassError::unsupported(
                r.span.describe(),
                format!(
                    "record arrays nested {depth} deep (limit {})",
                    opts.max_array_depth
                ),
            ));
        }
        let sig = extended(prefix, &r.name);
        self.table.insert(sig.clone(), Node::Record { dims: Vec::new() });
        for f in &r.features {
            match f {
                Feature::Variable(_) | Feature::Constant(_) => {
                    let leaf = extended(&sig, f.name());
                    let mut flat = leaf.join("_");
                    if self.taken.contains(&flat) {
                        let fresh = fresh_name(&flat, &self.taken);
                        self.problems.push(Problem::warning(
                            f.span().describe(),
                            format!("`{flat}` renamed to `{fresh}` to avoid a name clash"),
                        ));
                        flat = fresh;
                    }
                    self.taken.insert(flat.clone());
                    let is_const = matches!(f, Feature::Constant(_));
                    self.table.insert(leaf, Node::Leaf { flat, is_const, dims: Vec::new() });
                }
                Feature::Record(inner) => self.register(&sig, inner, depth, opts)?,
                Feature::Zone(_) => {}
            }
        }
        Ok(())
    }

    /// Rewrites every size expression once all flat names are known.
    fn sizes(&mut self, levels: &mut Vec<Level>, r: &Record) -> Result<(), PassError> {
        let prefix = levels.last().map_or(&[][..], |l| &l.sig[..]).to_vec();
        let sig = extended(&prefix, &r.name);
        let dims = self.exprs(&dims_of(&r.array), levels)?;
        self.table.insert(sig.clone(), Node::Record { dims });
        levels.push(Level { sig: sig.clone(), indices: Vec::new() });
        for f in &r.features {
            match f {
                Feature::Variable(v) => {
                    let dims = self.exprs(&dims_of(&v.array), levels)?;
                    if let Some(Node::Leaf { dims: slot, .. }) = self.table.get_mut(&extended(&sig, &v.name)) {
                        *slot = dims;
                    }
                }
                Feature::Record(inner) => self.sizes(levels, inner)?,
                _ => {}
            }
        }
        levels.pop();
        Ok(())
    }

    fn exprs(&self, exprs: &[Expr], levels: &[Level]) -> Result<Vec<Expr>, PassError> {
        exprs.iter().map(|e| self.expr(e, levels, &mut Vec::new())).collect()
    }

    fn record_dims(&self, sig: &[String]) -> Vec<Expr> {
        match self.table.get(sig) {
            Some(Node::Record { dims }) => dims.clone(),
            _ => Vec::new(),
        }
    }

    /// Hoists the declarations of `r` into `decls` and returns its statements,
    /// wrapped in loops when `r` is an array.
    fn dissolve(
        &mut self,
        levels: &mut Vec<Level>,
        r: &Record,
        containers: &[Expr],
        decls: &mut Vec<Feature>,
    ) -> Result<Vec<Statement>, PassError> {
        let prefix = levels.last().map_or(&[][..], |l| &l.sig[..]).to_vec();
        let sig = extended(&prefix, &r.name);
        let dims = self.record_dims(&sig);

        let mut avoid = self.taken.clone();
        avoid.extend(self.indices.iter().cloned());
        idents_in_record(r, &mut avoid);
        let mut index_names = Vec::new();
        for k in 0..dims.len() {
            let base = if k == 0 { r.name.clone() } else { format!("{}_{}", r.name, k + 1) };
            let name = if avoid.contains(&base) { fresh_name(&base, &avoid) } else { base };
            avoid.insert(name.clone());
            self.indices.insert(name.clone());
            index_names.push(name);
        }

        let mut inner_containers = containers.to_vec();
        inner_containers.extend(dims.iter().cloned());
        levels.push(Level {
            sig: sig.clone(),
            indices: index_names.iter().map(Expr::name).collect(),
        });
        let mut body = Vec::new();
        for f in &r.features {
            match f {
                Feature::Variable(v) => {
                    let Some(Node::Leaf { flat, dims: leaf_dims, .. }) =
                        self.table.get(&extended(&sig, &v.name)).cloned()
                    else {
                        unreachable!("registered leaf")
                    };
                    let array = if inner_containers.is_empty() {
                        v.array.as_ref().map(|_| ArrayDims {
                            n: leaf_dims[0].clone(),
                            m: leaf_dims.get(1).cloned(),
                        })
                    } else {
                        let mut factors = inner_containers.clone();
                        factors.extend(leaf_dims.first().cloned());
                        Some(ArrayDims { n: product(&factors), m: leaf_dims.get(1).cloned() })
                    };
                    let domain = match &v.domain {
                        Some(Domain::Interval { lower, upper }) => Some(Domain::Interval {
                            lower: self.expr(lower, levels, &mut Vec::new())?,
                            upper: self.expr(upper, levels, &mut Vec::new())?,
                        }),
                        Some(Domain::Set(values)) => Some(Domain::Set(self.exprs(values, levels)?)),
                        None => None,
                    };
                    self.names.push(NameStep::Flatten {
                        signature: extended(&sig, &v.name),
                        target: flat.clone(),
                        containers: inner_containers.clone(),
                        leaf_dims,
                    });
                    decls.push(Feature::Variable(Variable {
                        name: flat,
                        ty: v.ty.clone(),
                        is_set: v.is_set,
                        array,
                        domain,
                        span: v.span.clone(),
                    }));
                }
                Feature::Constant(c) => {
                    let Some(Node::Leaf { flat, .. }) = self.table.get(&extended(&sig, &c.name)) else {
                        unreachable!("registered leaf")
                    };
                    let mut c = c.clone();
                    c.name = flat.clone();
                    decls.push(Feature::Constant(c));
                }
                Feature::Record(inner) => {
                    body.extend(self.dissolve(levels, inner, &inner_containers, decls)?);
                }
                Feature::Zone(z) => body.extend(self.body(&z.body, levels, &mut Vec::new())?),
            }
        }
        levels.pop();

        if body.is_empty() {
            return Ok(body);
        }
        for (index, size) in index_names.iter().zip(&dims).rev() {
            body = vec![Statement::Forall {
                index: index.clone(),
                lower: Expr::int(1),
                upper: size.clone(),
                body,
                span: r.span.clone(),
            }];
        }
        Ok(body)
    }

    fn body(
        &self,
        body: &[Statement],
        levels: &[Level],
        bound: &mut Vec<String>,
    ) -> Result<Vec<Statement>, PassError> {
        body.iter().map(|s| self.statement(s, levels, bound)).collect()
    }

    fn statement(
        &self,
        stmt: &Statement,
        levels: &[Level],
        bound: &mut Vec<String>,
    ) -> Result<Statement, PassError> {
        Ok(match stmt {
            Statement::Constraint { expr, span } => Statement::Constraint {
                expr: self.expr(expr, levels, bound)?,
                span: span.clone(),
            },
            Statement::Forall { index, lower, upper, body, span } => {
                let lower = self.expr(lower, levels, bound)?;
                let upper = self.expr(upper, levels, bound)?;
                bound.push(index.clone());
                let body = self.body(body, levels, bound);
                bound.pop();
                Statement::Forall { index: index.clone(), lower, upper, body: body?, span: span.clone() }
            }
            Statement::If { cond, then_body, else_body, span } => Statement::If {
                cond: self.expr(cond, levels, bound)?,
                then_body: self.body(then_body, levels, bound)?,
                else_body: match else_body {
                    Some(b) => Some(self.body(b, levels, bound)?),
                    None => None,
                },
                span: span.clone(),
            },
        })
    }

    fn expr(&self, e: &Expr, levels: &[Level], bound: &mut Vec<String>) -> Result<Expr, PassError> {
        let sub = |x: &Expr, bound: &mut Vec<String>| self.expr(x, levels, bound).map(Box::new);
        let kind = match &e.kind {
            ExprKind::Ref(path) => {
                let mut steps = Vec::with_capacity(path.len());
                for step in path {
                    steps.push(AccessStep {
                        name: step.name.clone(),
                        indices: step
                            .indices
                            .iter()
                            .map(|i| self.expr(i, levels, bound))
                            .collect::<Result<_, _>>()?,
                    });
                }
                return self.reference(steps, levels, bound, &e.span);
            }
            ExprKind::Unary(op, a) => ExprKind::Unary(*op, sub(a, bound)?),
            ExprKind::Card(a) => ExprKind::Card(sub(a, bound)?),
            ExprKind::Binary(op, l, r) => ExprKind::Binary(*op, sub(l, bound)?, sub(r, bound)?),
            ExprKind::Intersect(l, r) => ExprKind::Intersect(sub(l, bound)?, sub(r, bound)?),
            other => other.clone(),
        };
        Ok(Expr { kind, span: e.span.clone() })
    }

    fn reference(
        &self,
        steps: Vec<AccessStep>,
        levels: &[Level],
        bound: &[String],
        span: &Span,
    ) -> Result<Expr, PassError> {
        let head = &steps[0].name;
        let unchanged = || Expr::new(ExprKind::Ref(steps.clone())).with_span(span.clone());
        if bound.contains(head) {
            return Ok(unchanged());
        }
        let owner = levels
            .iter()
            .rposition(|l| self.table.contains_key(&extended(&l.sig, head)));
        let full: Vec<AccessStep> = match owner {
            Some(k) => levels[..=k]
                .iter()
                .map(|l| AccessStep { name: l.sig.last().unwrap().clone(), indices: l.indices.clone() })
                .chain(steps.iter().cloned())
                .collect(),
            None if self.table.contains_key(&vec![head.clone()]) => steps.clone(),
            None => return Ok(unchanged()),
        };
        self.resolve(&full, span)
    }

    fn resolve(&self, full: &[AccessStep], span: &Span) -> Result<Expr, PassError> {
        let fail = |reason: String| Err(PassError::unsupported(span.describe(), reason));
        let mut sig = Vec::new();
        let mut containers: Vec<(&AccessStep, Vec<Expr>)> = Vec::new();
        for (k, step) in full.iter().enumerate() {
            sig.push(step.name.clone());
            let last = k + 1 == full.len();
            match self.table.get(&sig) {
                Some(Node::Record { dims }) => {
                    if last {
                        return fail(format!("record `{}` used as a value", step.name));
                    }
                    containers.push((step, dims.clone()));
                }
                Some(Node::Leaf { flat, is_const, dims }) => {
                    if !last {
                        return fail(format!("member access on non-record `{}`", step.name));
                    }
                    if *is_const {
                        return Ok(Expr::name(flat.clone()).with_span(span.clone()));
                    }
                    let mut items = Vec::new();
                    for (c, sizes) in &containers {
                        if c.indices.len() != sizes.len() {
                            return fail(format!("record `{}` needs {} index(es)", c.name, sizes.len()));
                        }
                        items.extend(c.indices.iter().cloned().zip(sizes.iter().cloned()));
                    }
                    if items.is_empty() {
                        return Ok(Expr::indexed(flat.clone(), step.indices.clone()).with_span(span.clone()));
                    }
                    if step.indices.len() != dims.len() {
                        return fail(format!("array `{}` used without all its indices", step.name));
                    }
                    let mut rest = step.indices.iter().cloned().zip(dims.iter().cloned());
                    items.extend(rest.next());
                    let mut indices = vec![linear_index(&items)];
                    indices.extend(rest.map(|(i, _)| i));
                    return Ok(Expr::indexed(flat.clone(), indices).with_span(span.clone()));
                }
                None => return fail(format!("unknown member `{}`", step.name)),
            }
        }
        unreachable!("non-empty path")
    }
}
