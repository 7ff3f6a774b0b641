//! Instantiation of a model into cells and ground constraints.

use std::collections::HashMap;

use crate::ir::scope::class_features;
use crate::ir::{
    BinOp, Domain, Element, Expr, ExprKind, Feature, Literal, PivotModel, Statement, TypeRef, UnOp,
    Variable,
};
use crate::passes::Cell;

use super::search::eval;
use super::{Instance, OracleError, Value};

/// Ground boolean expression over cells.
#[derive(Clone, Debug)]
pub(crate) enum CExpr {
    Const(Value),
    Var(usize),
    Unary(UnOp, Box<CExpr>),
    Binary(BinOp, Box<CExpr>, Box<CExpr>),
    Card(Box<CExpr>),
    Intersect(Box<CExpr>, Box<CExpr>),
    /// Array access with an index that depends on decision variables.
    Element { base: usize, dims: Vec<i64>, indices: Vec<CExpr> },
}

impl CExpr {
    pub(crate) fn max_var(&self) -> Option<usize> {
        match self {
            CExpr::Const(_) => None,
            CExpr::Var(v) => Some(*v),
            CExpr::Unary(_, a) | CExpr::Card(a) => a.max_var(),
            CExpr::Binary(_, l, r) | CExpr::Intersect(l, r) => l.max_var().max(r.max_var()),
            CExpr::Element { base, dims, indices } => {
                let last = base + dims.iter().product::<i64>().max(1) as usize - 1;
                indices.iter().filter_map(CExpr::max_var).max().max(Some(last))
            }
        }
    }
}

/// A model reduced to cells, their domains and ground constraints.
#[derive(Clone, Debug)]
pub struct Grounded {
    pub cells: Vec<Cell>,
    pub domains: Vec<Vec<Value>>,
    pub(crate) constraints: Vec<CExpr>,
}

impl Grounded {
    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }
}

#[derive(Clone, Debug)]
enum Member {
    Const(Value),
    Real,
    Var { dims: Vec<i64>, base: usize },
    Object { dims: Vec<i64>, scopes: Vec<usize> },
}

#[derive(Debug, Default)]
struct Scope {
    members: HashMap<String, Member>,
    parent: Option<usize>,
}

const GLOBAL: usize = 0;
const MAX_DEPTH: usize = 64;

fn unsupported<T>(msg: impl Into<String>) -> Result<T, OracleError> {
    Err(OracleError::Unsupported(msg.into()))
}

/// Row-major index tuples of an array with sizes `dims`; one empty tuple for a scalar.
fn tuples(dims: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &n in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (1..=n).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

pub(crate) fn ground(model: &PivotModel, inst: &Instance) -> Result<Grounded, OracleError> {
    let mut b = Builder {
        model,
        inst,
        scopes: vec![Scope::default()],
        cells: Vec::new(),
        domains: Vec::new(),
        bodies: Vec::new(),
    };
    for e in model.enums() {
        for (k, lit) in e.literals.iter().enumerate() {
            let value = Value::Lit { pos: k as i64 + 1, name: lit.clone() };
            b.scopes[GLOBAL].members.insert(lit.clone(), Member::Const(value));
        }
    }
    for c in model.constants() {
        let member = match (c.value.clone(), inst.overrides.get(&c.name)) {
            (Literal::Int(_), Some(&v)) => Member::Const(Value::Int(v)),
            (Literal::Int(v), None) => Member::Const(Value::Int(v)),
            (Literal::Bool(v), _) => Member::Const(Value::Bool(v)),
            (Literal::Real(_), _) => Member::Real,
        };
        b.scopes[GLOBAL].members.insert(c.name.clone(), member);
    }
    let top: Vec<&Feature> = model
        .elements
        .iter()
        .filter_map(|e| match e {
            Element::Feature(f) => Some(f),
            _ => None,
        })
        .collect();
    b.instantiate(&top, GLOBAL, &[], 0)?;
    if let Some(main) = model.main_class() {
        let scope = b.new_scope(Some(GLOBAL));
        b.instantiate(&class_features(model, main), scope, &[], 0)?;
    }

    let space = b
        .domains
        .iter()
        .fold(1u128, |acc, d| acc.saturating_mul(d.len() as u128));
    if space > inst.max_space {
        return Err(OracleError::SearchSpaceExceeded { size: space, limit: inst.max_space });
    }

    let mut constraints = Vec::new();
    for (scope, body) in std::mem::take(&mut b.bodies) {
        b.ground_body(body, scope, &mut Vec::new(), &mut constraints)?;
    }
    Ok(Grounded { cells: b.cells, domains: b.domains, constraints })
}

struct Builder<'m> {
    model: &'m PivotModel,
    inst: &'m Instance,
    scopes: Vec<Scope>,
    cells: Vec<Cell>,
    domains: Vec<Vec<Value>>,
    bodies: Vec<(usize, &'m [Statement])>,
}

type Path = [(String, Vec<i64>)];

fn extend(prefix: &Path, name: &str, index: Vec<i64>) -> Vec<(String, Vec<i64>)> {
    let mut p = prefix.to_vec();
    p.push((name.to_string(), index));
    p
}

impl<'m> Builder<'m> {
    fn new_scope(&mut self, parent: Option<usize>) -> usize {
        self.scopes.push(Scope { members: HashMap::new(), parent });
        self.scopes.len() - 1
    }

    fn instantiate(
        &mut self,
        features: &[&'m Feature],
        scope: usize,
        prefix: &Path,
        depth: usize,
    ) -> Result<(), OracleError> {
        if depth > MAX_DEPTH {
            return unsupported("composition does not terminate");
        }
        for f in features {
            if let Feature::Constant(c) = f {
                let member = match c.value {
                    Literal::Int(v) => Member::Const(Value::Int(v)),
                    Literal::Bool(v) => Member::Const(Value::Bool(v)),
                    Literal::Real(_) => Member::Real,
                };
                self.scopes[scope].members.entry(c.name.clone()).or_insert(member);
            }
        }
        for f in features {
            match f {
                Feature::Variable(v) => {
                    let dims = self.dims(v.array.as_ref().map(|d| d.exprs()), scope)?;
                    let class = match &v.ty {
                        TypeRef::Named(n) => self.model.find_class(n),
                        _ => None,
                    };
                    let member = if let Some(class) = class {
                        let features = class_features(self.model, class);
                        let mut scopes = Vec::new();
                        for t in tuples(&dims) {
                            let id = self.new_scope(Some(GLOBAL));
                            self.instantiate(&features, id, &extend(prefix, &v.name, t), depth + 1)?;
                            scopes.push(id);
                        }
                        Member::Object { dims, scopes }
                    } else {
                        let domain = self.domain(v, scope)?;
                        let base = self.cells.len();
                        for t in tuples(&dims) {
                            self.cells.push(Cell(extend(prefix, &v.name, t)));
                            self.domains.push(domain.clone());
                        }
                        Member::Var { dims, base }
                    };
                    self.scopes[scope].members.insert(v.name.clone(), member);
                }
                Feature::Record(r) => {
                    let dims = self.dims(r.array.as_ref().map(|d| d.exprs()), scope)?;
                    let inner: Vec<&Feature> = r.features.iter().collect();
                    let mut scopes = Vec::new();
                    for t in tuples(&dims) {
                        let id = self.new_scope(Some(scope));
                        self.instantiate(&inner, id, &extend(prefix, &r.name, t), depth + 1)?;
                        scopes.push(id);
                    }
                    self.scopes[scope].members.insert(r.name.clone(), Member::Object { dims, scopes });
                }
                Feature::Zone(z) => self.bodies.push((scope, &z.body)),
                Feature::Constant(_) => {}
            }
        }
        Ok(())
    }

    fn dims(&self, exprs: Option<Vec<&Expr>>, scope: usize) -> Result<Vec<i64>, OracleError> {
        exprs
            .unwrap_or_default()
            .into_iter()
            .map(|e| match self.constant(e, scope, &[])? {
                Value::Int(n) if n >= 0 => Ok(n),
                other => unsupported(format!("array size {other} is not a natural number")),
            })
            .collect()
    }

    fn constant(&self, e: &Expr, scope: usize, idx: &[(String, i64)]) -> Result<Value, OracleError> {
        let c = self.compile(e, scope, idx)?;
        if c.max_var().is_some() {
            return unsupported("expression is not constant");
        }
        eval(&c, &[]).ok_or_else(|| OracleError::Unsupported("constant evaluation failed".into()))
    }

    fn position(&self, e: &Expr, scope: usize) -> Result<i64, OracleError> {
        match self.constant(e, scope, &[])? {
            Value::Int(v) | Value::Lit { pos: v, .. } => Ok(v),
            other => unsupported(format!("domain value {other} is not an integer")),
        }
    }

    fn domain(&self, v: &Variable, scope: usize) -> Result<Vec<Value>, OracleError> {
        let enum_type = match &v.ty {
            TypeRef::Named(n) => Some(
                self.model
                    .find_enum(n)
                    .ok_or_else(|| OracleError::Unsupported(format!("unknown type `{n}`")))?,
            ),
            TypeRef::Real => return Err(OracleError::RealVariable(v.name.clone())),
            _ => None,
        };
        if v.ty == TypeRef::Bool && !v.is_set {
            return Ok(vec![Value::Bool(false), Value::Bool(true)]);
        }
        let mut base: Vec<i64> = match &v.domain {
            Some(Domain::Interval { lower, upper }) => {
                let (lo, hi) = (self.position(lower, scope)?, self.position(upper, scope)?);
                let width = (hi as i128 - lo as i128 + 1).max(0) as u128;
                if width > self.inst.max_width as u128 {
                    return Err(OracleError::SearchSpaceExceeded {
                        size: width,
                        limit: self.inst.max_width as u128,
                    });
                }
                (lo..=hi).collect()
            }
            Some(Domain::Set(values)) => {
                values.iter().map(|e| self.position(e, scope)).collect::<Result<_, _>>()?
            }
            None => match enum_type {
                Some(e) => (1..=e.literals.len() as i64).collect(),
                None => return Err(OracleError::UnboundedDomain(v.name.clone())),
            },
        };
        base.sort_unstable();
        base.dedup();
        if v.is_set {
            if base.len() > self.inst.max_universe {
                return Err(OracleError::SearchSpaceExceeded {
                    size: base.len() as u128,
                    limit: self.inst.max_universe as u128,
                });
            }
            return Ok((0u64..1 << base.len())
                .map(|mask| {
                    Value::Set(
                        base.iter()
                            .enumerate()
                            .filter(|(k, _)| mask >> k & 1 == 1)
                            .map(|(_, &x)| x)
                            .collect(),
                    )
                })
                .collect());
        }
        Ok(match enum_type {
            Some(e) => base
                .into_iter()
                .filter(|&p| p >= 1 && p as usize <= e.literals.len())
                .map(|pos| Value::Lit { pos, name: e.literals[pos as usize - 1].clone() })
                .collect(),
            None => base.into_iter().map(Value::Int).collect(),
        })
    }

    fn lookup(&self, scope: usize, name: &str) -> Option<&Member> {
        let mut current = Some(scope);
        while let Some(id) = current {
            if let Some(m) = self.scopes[id].members.get(name) {
                return Some(m);
            }
            current = self.scopes[id].parent;
        }
        None
    }

    fn ground_body(
        &self,
        body: &[Statement],
        scope: usize,
        idx: &mut Vec<(String, i64)>,
        out: &mut Vec<CExpr>,
    ) -> Result<(), OracleError> {
        for stmt in body {
            match stmt {
                Statement::Constraint { expr, .. } => out.push(self.compile(expr, scope, idx)?),
                Statement::Forall { index, lower, upper, body, .. } => {
                    let bound = |e: &Expr| match self.constant(e, scope, idx)? {
                        Value::Int(v) => Ok(v),
                        other => unsupported(format!("loop bound {other} is not an integer")),
                    };
                    let (lo, hi) = (bound(lower)?, bound(upper)?);
                    for k in lo..=hi {
                        idx.push((index.clone(), k));
                        let r = self.ground_body(body, scope, idx, out);
                        idx.pop();
                        r?;
                    }
                }
                Statement::If { cond, then_body, else_body, .. } => {
                    let cond = self.compile(cond, scope, idx)?;
                    let mut then = Vec::new();
                    self.ground_body(then_body, scope, idx, &mut then)?;
                    let mut other = Vec::new();
                    if let Some(b) = else_body {
                        self.ground_body(b, scope, idx, &mut other)?;
                    }
                    let conj = |parts: Vec<CExpr>| {
                        parts
                            .into_iter()
                            .reduce(|a, b| CExpr::Binary(BinOp::And, Box::new(a), Box::new(b)))
                            .unwrap_or(CExpr::Const(Value::Bool(true)))
                    };
                    let not = CExpr::Unary(UnOp::Not, Box::new(cond.clone()));
                    out.push(CExpr::Binary(
                        BinOp::And,
                        Box::new(CExpr::Binary(BinOp::Implies, Box::new(cond), Box::new(conj(then)))),
                        Box::new(CExpr::Binary(BinOp::Implies, Box::new(not), Box::new(conj(other)))),
                    ));
                }
            }
        }
        Ok(())
    }

    fn compile(&self, e: &Expr, scope: usize, idx: &[(String, i64)]) -> Result<CExpr, OracleError> {
        let sub = |x: &Expr| self.compile(x, scope, idx).map(Box::new);
        Ok(match &e.kind {
            ExprKind::Int(v) => CExpr::Const(Value::Int(*v)),
            ExprKind::Bool(v) => CExpr::Const(Value::Bool(*v)),
            ExprKind::Real(_) => return unsupported("real arithmetic"),
            ExprKind::EnumLit { enum_name, literal } => {
                let pos = self
                    .model
                    .find_enum(enum_name)
                    .and_then(|en| en.position(literal))
                    .ok_or_else(|| OracleError::Unsupported(format!("unknown literal `{literal}`")))?;
                CExpr::Const(Value::Lit { pos, name: literal.clone() })
            }
            ExprKind::Ref(path) => return self.reference(path, scope, idx),
            ExprKind::Unary(op, a) => CExpr::Unary(*op, sub(a)?),
            ExprKind::Binary(op, l, r) => CExpr::Binary(*op, sub(l)?, sub(r)?),
            ExprKind::Card(a) => CExpr::Card(sub(a)?),
            ExprKind::Intersect(l, r) => CExpr::Intersect(sub(l)?, sub(r)?),
        })
    }

    fn reference(
        &self,
        path: &[crate::ir::AccessStep],
        scope: usize,
        idx: &[(String, i64)],
    ) -> Result<CExpr, OracleError> {
        let head = &path[0];
        if path.len() == 1 && head.indices.is_empty() {
            if let Some((_, v)) = idx.iter().rev().find(|(n, _)| *n == head.name) {
                return Ok(CExpr::Const(Value::Int(*v)));
            }
        }
        let mut current = scope;
        for (k, step) in path.iter().enumerate() {
            let last = k + 1 == path.len();
            let member = if k == 0 {
                self.lookup(current, &step.name)
            } else {
                self.scopes[current].members.get(&step.name)
            };
            let Some(member) = member else {
                return unsupported(format!("unknown name `{}`", step.name));
            };
            let indices = step
                .indices
                .iter()
                .map(|i| self.compile(i, scope, idx))
                .collect::<Result<Vec<_>, _>>()?;
            match member {
                Member::Const(v) if last && indices.is_empty() => return Ok(CExpr::Const(v.clone())),
                Member::Real => return unsupported(format!("real constant `{}`", step.name)),
                Member::Var { dims, base } if last => {
                    if indices.len() != dims.len() {
                        return unsupported(format!("array `{}` used without all its indices", step.name));
                    }
                    let constant: Option<Vec<i64>> = indices
                        .iter()
                        .map(|c| match c {
                            CExpr::Const(Value::Int(v)) => Some(*v),
                            _ => None,
                        })
                        .collect();
                    return Ok(match constant {
                        Some(at) if at.iter().zip(dims).all(|(i, n)| (1..=*n).contains(i)) => {
                            CExpr::Var(base + offset(&at, dims))
                        }
                        _ => CExpr::Element { base: *base, dims: dims.clone(), indices },
                    });
                }
                Member::Object { dims, scopes } if !last => {
                    let at: Option<Vec<i64>> = indices
                        .iter()
                        .map(|c| match c {
                            CExpr::Const(Value::Int(v)) => Some(*v),
                            _ => None,
                        })
                        .collect();
                    let Some(at) = at.filter(|a| a.len() == dims.len()) else {
                        return unsupported(format!("`{}` needs constant indices", step.name));
                    };
                    if at.iter().zip(dims).any(|(i, n)| *i < 1 || i > n) {
                        return unsupported(format!("index out of range in `{}`", step.name));
                    }
                    current = scopes[offset(&at, dims)];
                }
                _ => return unsupported(format!("`{}` cannot be used here", step.name)),
            }
        }
        unreachable!("paths end in a value")
    }
}

/// 0-based row-major offset of a 1-based index tuple.
pub(crate) fn offset(at: &[i64], dims: &[i64]) -> usize {
    let mut acc = 0i64;
    for (i, n) in at.iter().zip(dims) {
        acc = acc * n + (i - 1);
    }
    acc as usize
}
