//! Pivot intermediate representation.
//!
//! A [`PivotModel`] is an ordered list of elements: enumeration types,
//! class types, features (variables, constants, constraint zones, records)
//! and predicates. All passes consume and produce this representation.
//!
//! Equality on pivot nodes is structural: source spans never take part in
//! comparisons, names always do.

pub mod eval;
pub mod scope;
pub mod tree;

use std::fmt;
use std::sync::Arc;

pub use tree::{census, duplicate, free_names, fresh_name, Census, Substitute};

/// Position of a node in its originating file.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Loc {
    pub file: Arc<str>,
    pub line: u32,
    pub col: u32,
}

impl fmt::Display for Loc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.col)
    }
}

/// Optional source location attached to a node. Always compares equal.
#[derive(Clone, Debug, Default)]
pub struct Span(pub Option<Loc>);

impl Span {
    pub fn none() -> Self {
        Span(None)
    }

    pub fn at(loc: Loc) -> Self {
        Span(Some(loc))
    }

    pub fn loc(&self) -> Option<&Loc> {
        self.0.as_ref()
    }

    /// `file:line:col`, or `<unknown>:0:0` when the node was synthesized.
    pub fn describe(&self) -> String {
        match &self.0 {
            Some(loc) => loc.to_string(),
            None => "<unknown>:0:0".to_string(),
        }
    }
}

impl PartialEq for Span {
    fn eq(&self, _other: &Self) -> bool {
        true
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
    Implies,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "and",
            BinOp::Or => "or",
            BinOp::Implies => "implies",
        }
    }

    pub fn is_arithmetic(self) -> bool {
        matches!(self, BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Div)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge
        )
    }

    pub fn is_logical(self) -> bool {
        matches!(self, BinOp::And | BinOp::Or | BinOp::Implies)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Neg,
    Not,
}

/// One step of an access path such as `weeks[w1].groups[g1].players`.
#[derive(Clone, Debug, PartialEq)]
pub struct AccessStep {
    pub name: String,
    pub indices: Vec<Expr>,
}

impl AccessStep {
    pub fn plain(name: impl Into<String>) -> Self {
        AccessStep { name: name.into(), indices: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Int(i64),
    Real(f64),
    Bool(bool),
    EnumLit { enum_name: String, literal: String },
    Ref(Vec<AccessStep>),
    Unary(UnOp, Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Card(Box<Expr>),
    Intersect(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, span: Span::none() }
    }

    pub fn with_span(mut self, span: Span) -> Self {
        self.span = span;
        self
    }

    pub fn int(v: i64) -> Self {
        Expr::new(ExprKind::Int(v))
    }

    pub fn boolean(v: bool) -> Self {
        Expr::new(ExprKind::Bool(v))
    }

    pub fn name(name: impl Into<String>) -> Self {
        Expr::new(ExprKind::Ref(vec![AccessStep::plain(name)]))
    }

    pub fn indexed(name: impl Into<String>, indices: Vec<Expr>) -> Self {
        Expr::new(ExprKind::Ref(vec![AccessStep { name: name.into(), indices }]))
    }

    pub fn binary(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)))
    }

    pub fn unary(op: UnOp, arg: Expr) -> Self {
        Expr::new(ExprKind::Unary(op, Box::new(arg)))
    }

    pub fn not(arg: Expr) -> Self {
        Expr::unary(UnOp::Not, arg)
    }

    /// The single name of a plain, unindexed reference.
    pub fn as_simple_name(&self) -> Option<&str> {
        match &self.kind {
            ExprKind::Ref(path) if path.len() == 1 && path[0].indices.is_empty() => {
                Some(&path[0].name)
            }
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self.kind {
            ExprKind::Int(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Interval { lower: Expr, upper: Expr },
    Set(Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ArrayDims {
    pub n: Expr,
    pub m: Option<Expr>,
}

impl ArrayDims {
    pub fn vector(n: Expr) -> Self {
        ArrayDims { n, m: None }
    }

    pub fn exprs(&self) -> Vec<&Expr> {
        let mut out = vec![&self.n];
        out.extend(self.m.as_ref());
        out
    }

    pub fn rank(&self) -> usize {
        if self.m.is_some() {
            2
        } else {
            1
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TypeRef {
    Int,
    Real,
    Bool,
    Named(String),
}

impl fmt::Display for TypeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeRef::Int => f.write_str("int"),
            TypeRef::Real => f.write_str("real"),
            TypeRef::Bool => f.write_str("bool"),
            TypeRef::Named(n) => f.write_str(n),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Literal {
    Int(i64),
    Real(f64),
    Bool(bool),
}

impl Literal {
    pub fn to_expr(&self) -> Expr {
        match *self {
            Literal::Int(v) => Expr::int(v),
            Literal::Real(v) => Expr::new(ExprKind::Real(v)),
            Literal::Bool(v) => Expr::boolean(v),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Statement {
    Constraint {
        expr: Expr,
        span: Span,
    },
    Forall {
        index: String,
        lower: Expr,
        upper: Expr,
        body: Vec<Statement>,
        span: Span,
    },
    If {
        cond: Expr,
        then_body: Vec<Statement>,
        else_body: Option<Vec<Statement>>,
        span: Span,
    },
}

impl Statement {
    pub fn constraint(expr: Expr) -> Self {
        let span = expr.span.clone();
        Statement::Constraint { expr, span }
    }

    pub fn span(&self) -> &Span {
        match self {
            Statement::Constraint { span, .. }
            | Statement::Forall { span, .. }
            | Statement::If { span, .. } => span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Variable {
    pub name: String,
    pub ty: TypeRef,
    pub is_set: bool,
    pub array: Option<ArrayDims>,
    pub domain: Option<Domain>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constant {
    pub name: String,
    pub ty: TypeRef,
    pub value: Literal,
    pub span: Span,
}

/// Where a constraint zone came from. Not part of structural equality.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ZoneOrigin {
    #[default]
    Declared,
    /// Produced by dissolving a record; holds the record's statements.
    Record,
}

#[derive(Clone, Debug)]
pub struct ConstraintZone {
    pub name: String,
    pub body: Vec<Statement>,
    pub origin: ZoneOrigin,
    pub span: Span,
}

impl PartialEq for ConstraintZone {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.body == other.body
    }
}

/// Untyped, possibly array-shaped bundle of features.
#[derive(Clone, Debug, PartialEq)]
pub struct Record {
    pub name: String,
    pub array: Option<ArrayDims>,
    pub features: Vec<Feature>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feature {
    Variable(Variable),
    Constant(Constant),
    Zone(ConstraintZone),
    Record(Record),
}

impl Feature {
    pub fn name(&self) -> &str {
        match self {
            Feature::Variable(v) => &v.name,
            Feature::Constant(c) => &c.name,
            Feature::Zone(z) => &z.name,
            Feature::Record(r) => &r.name,
        }
    }

    pub fn span(&self) -> &Span {
        match self {
            Feature::Variable(v) => &v.span,
            Feature::Constant(c) => &c.span,
            Feature::Zone(z) => &z.span,
            Feature::Record(r) => &r.span,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnumType {
    pub name: String,
    pub literals: Vec<String>,
    pub span: Span,
}

impl EnumType {
    /// 1-based position of a literal.
    pub fn position(&self, literal: &str) -> Option<i64> {
        self.literals.iter().position(|l| l == literal).map(|p| p as i64 + 1)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassType {
    pub name: String,
    pub is_main: bool,
    pub is_abstract: bool,
    pub super_types: Vec<String>,
    pub features: Vec<Feature>,
    pub span: Span,
}

/// Present for completeness of the concept hierarchy; no pass touches it.
#[derive(Clone, Debug, PartialEq)]
pub struct Predicate {
    pub name: String,
    pub body: Vec<Statement>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Element {
    Enum(EnumType),
    Class(ClassType),
    Feature(Feature),
    Predicate(Predicate),
}

impl Element {
    pub fn name(&self) -> &str {
        match self {
            Element::Enum(e) => &e.name,
            Element::Class(c) => &c.name,
            Element::Feature(f) => f.name(),
            Element::Predicate(p) => &p.name,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PivotModel {
    pub name: String,
    pub elements: Vec<Element>,
}

impl PivotModel {
    pub fn new(name: impl Into<String>) -> Self {
        PivotModel { name: name.into(), elements: Vec::new() }
    }

    pub fn enums(&self) -> impl Iterator<Item = &EnumType> {
        self.elements.iter().filter_map(|e| match e {
            Element::Enum(en) => Some(en),
            _ => None,
        })
    }

    pub fn classes(&self) -> impl Iterator<Item = &ClassType> {
        self.elements.iter().filter_map(|e| match e {
            Element::Class(c) => Some(c),
            _ => None,
        })
    }

    /// Top-level constants in element order.
    pub fn constants(&self) -> impl Iterator<Item = &Constant> {
        self.elements.iter().filter_map(|e| match e {
            Element::Feature(Feature::Constant(c)) => Some(c),
            _ => None,
        })
    }

    pub fn find_class(&self, name: &str) -> Option<&ClassType> {
        self.classes().find(|c| c.name == name)
    }

    pub fn find_enum(&self, name: &str) -> Option<&EnumType> {
        self.enums().find(|e| e.name == name)
    }

    pub fn main_class(&self) -> Option<&ClassType> {
        self.classes().find(|c| c.is_main)
    }

    pub fn has_classes(&self) -> bool {
        self.classes().next().is_some()
    }

    /// Calls `f` on every statement list of the model: zone bodies at any
    /// nesting depth and predicate bodies.
    pub fn for_each_body_mut(&mut self, f: &mut dyn FnMut(&mut Vec<Statement>)) {
        for element in &mut self.elements {
            match element {
                Element::Class(c) => features_bodies_mut(&mut c.features, f),
                Element::Feature(feat) => features_bodies_mut(std::slice::from_mut(feat), f),
                Element::Predicate(p) => f(&mut p.body),
                Element::Enum(_) => {}
            }
        }
    }

    /// Calls `f` on every variable declared anywhere in the model.
    pub fn for_each_variable_mut(&mut self, f: &mut dyn FnMut(&mut Variable)) {
        fn walk(features: &mut [Feature], f: &mut dyn FnMut(&mut Variable)) {
            for feat in features {
                match feat {
                    Feature::Variable(v) => f(v),
                    Feature::Record(r) => walk(&mut r.features, f),
                    _ => {}
                }
            }
        }
        for element in &mut self.elements {
            match element {
                Element::Class(c) => walk(&mut c.features, f),
                Element::Feature(feat) => walk(std::slice::from_mut(feat), f),
                _ => {}
            }
        }
    }

    /// Calls `f` on every expression in the model, including domains,
    /// array dimensions, loop bounds and conditions.
    pub fn for_each_expr_mut(&mut self, f: &mut dyn FnMut(&mut Expr)) {
        self.for_each_variable_mut(&mut |v| {
            if let Some(dims) = &mut v.array {
                f(&mut dims.n);
                if let Some(m) = &mut dims.m {
                    f(m);
                }
            }
            match &mut v.domain {
                Some(Domain::Interval { lower, upper }) => {
                    f(lower);
                    f(upper);
                }
                Some(Domain::Set(values)) => values.iter_mut().for_each(&mut *f),
                None => {}
            }
        });
        fn records(features: &mut [Feature], f: &mut dyn FnMut(&mut Expr)) {
            for feat in features {
                if let Feature::Record(r) = feat {
                    if let Some(dims) = &mut r.array {
                        f(&mut dims.n);
                        if let Some(m) = &mut dims.m {
                            f(m);
                        }
                    }
                    records(&mut r.features, f);
                }
            }
        }
        for element in &mut self.elements {
            match element {
                Element::Class(c) => records(&mut c.features, f),
                Element::Feature(feat) => records(std::slice::from_mut(feat), f),
                _ => {}
            }
        }
        self.for_each_body_mut(&mut |body| {
            for stmt in body.iter_mut() {
                stmt_exprs_mut(stmt, f);
            }
        });
    }
}

fn features_bodies_mut(features: &mut [Feature], f: &mut dyn FnMut(&mut Vec<Statement>)) {
    for feat in features {
        match feat {
            Feature::Zone(z) => f(&mut z.body),
            Feature::Record(r) => features_bodies_mut(&mut r.features, f),
            _ => {}
        }
    }
}

/// Top-level expressions of a statement tree (bounds, conditions,
/// constraint bodies), visited recursively through nested statements.
pub fn stmt_exprs_mut(stmt: &mut Statement, f: &mut dyn FnMut(&mut Expr)) {
    match stmt {
        Statement::Constraint { expr, .. } => f(expr),
        Statement::Forall { lower, upper, body, .. } => {
            f(lower);
            f(upper);
            for s in body {
                stmt_exprs_mut(s, f);
            }
        }
        Statement::If { cond, then_body, else_body, .. } => {
            f(cond);
            for s in then_body {
                stmt_exprs_mut(s, f);
            }
            for s in else_body.iter_mut().flatten() {
                stmt_exprs_mut(s, f);
            }
        }
    }
}

/// Bottom-up rewrite of an expression tree.
pub fn rewrite_expr(expr: Expr, f: &mut dyn FnMut(Expr) -> Expr) -> Expr {
    let Expr { kind, span } = expr;
    let kind = match kind {
        ExprKind::Ref(path) => ExprKind::Ref(
            path.into_iter()
                .map(|step| AccessStep {
                    name: step.name,
                    indices: step.indices.into_iter().map(|i| rewrite_expr(i, f)).collect(),
                })
                .collect(),
        ),
        ExprKind::Unary(op, arg) => ExprKind::Unary(op, Box::new(rewrite_expr(*arg, f))),
        ExprKind::Binary(op, l, r) => {
            ExprKind::Binary(op, Box::new(rewrite_expr(*l, f)), Box::new(rewrite_expr(*r, f)))
        }
        ExprKind::Card(arg) => ExprKind::Card(Box::new(rewrite_expr(*arg, f))),
        ExprKind::Intersect(l, r) => {
            ExprKind::Intersect(Box::new(rewrite_expr(*l, f)), Box::new(rewrite_expr(*r, f)))
        }
        other => other,
    };
    f(Expr { kind, span })
}
