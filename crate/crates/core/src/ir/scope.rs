//! Symbol tables and name resolution.
//!
//! Lookup searches the innermost frame first and falls back to the global
//! frame. A class frame holds the class's own features plus everything it
//! inherits through `extends`; a record frame holds the record's features.
//! Access paths continue through object variables and records.

use std::collections::{HashMap, HashSet};
use std::rc::Rc;

use super::{
    AccessStep, ClassType, Domain, Element, Expr, ExprKind, Feature, PivotModel, Span, Statement,
    TypeRef,
};

#[derive(Clone, Debug)]
pub enum Decl {
    EnumType,
    Literal { enum_name: String, position: i64 },
    Class,
    Variable { ty: TypeRef, is_set: bool, rank: usize },
    Constant { ty: TypeRef },
    Record { members: Rc<Frame>, rank: usize },
    Zone,
    Index,
}

pub type Frame = HashMap<String, Decl>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IssueKind {
    Unresolved,
    Duplicate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NameIssue {
    pub kind: IssueKind,
    pub name: String,
    pub span: Span,
}

/// Every feature visible in `class`: inherited ones first (depth-first over
/// supertypes), then its own. Safe on cyclic hierarchies.
pub fn class_features<'m>(model: &'m PivotModel, class: &'m ClassType) -> Vec<&'m Feature> {
    fn collect<'m>(
        model: &'m PivotModel,
        class: &'m ClassType,
        visited: &mut HashSet<&'m str>,
        out: &mut Vec<&'m Feature>,
    ) {
        if !visited.insert(&class.name) {
            return;
        }
        for sup in &class.super_types {
            if let Some(parent) = model.find_class(sup) {
                collect(model, parent, visited, out);
            }
        }
        out.extend(class.features.iter());
    }
    let mut out = Vec::new();
    collect(model, class, &mut HashSet::new(), &mut out);
    out
}

pub fn feature_decl(feature: &Feature, issues: &mut Vec<NameIssue>) -> Decl {
    match feature {
        Feature::Variable(v) => Decl::Variable {
            ty: v.ty.clone(),
            is_set: v.is_set,
            rank: v.array.as_ref().map_or(0, |d| d.rank()),
        },
        Feature::Constant(c) => Decl::Constant { ty: c.ty.clone() },
        Feature::Zone(_) => Decl::Zone,
        Feature::Record(r) => Decl::Record {
            members: Rc::new(frame_of(r.features.iter(), issues)),
            rank: r.array.as_ref().map_or(0, |d| d.rank()),
        },
    }
}

pub fn frame_of<'a>(
    features: impl Iterator<Item = &'a Feature>,
    issues: &mut Vec<NameIssue>,
) -> Frame {
    let mut frame = Frame::new();
    for f in features {
        let decl = feature_decl(f, issues);
        if frame.insert(f.name().to_string(), decl).is_some() {
            issues.push(NameIssue {
                kind: IssueKind::Duplicate,
                name: f.name().to_string(),
                span: f.span().clone(),
            });
        }
    }
    frame
}

/// Stack of symbol tables over one model.
#[derive(Clone, Debug)]
pub struct Scopes {
    globals: Frame,
    classes: HashMap<String, Rc<Frame>>,
    frames: Vec<Rc<Frame>>,
    issues: Vec<NameIssue>,
}

impl Scopes {
    pub fn new(model: &PivotModel) -> Self {
        let mut issues = Vec::new();
        let mut globals = Frame::new();
        let mut insert = |name: &str, decl: Decl, span: &Span, issues: &mut Vec<NameIssue>| {
            if globals.insert(name.to_string(), decl).is_some() {
                issues.push(NameIssue {
                    kind: IssueKind::Duplicate,
                    name: name.to_string(),
                    span: span.clone(),
                });
            }
        };
        let mut seen_classes = HashSet::new();
        for element in &model.elements {
            match element {
                Element::Enum(e) => {
                    insert(&e.name, Decl::EnumType, &e.span, &mut issues);
                    let mut distinct = HashSet::new();
                    for (i, lit) in e.literals.iter().enumerate() {
                        if !distinct.insert(lit) {
                            issues.push(NameIssue {
                                kind: IssueKind::Duplicate,
                                name: lit.clone(),
                                span: e.span.clone(),
                            });
                            continue;
                        }
                        let decl = Decl::Literal { enum_name: e.name.clone(), position: i as i64 + 1 };
                        insert(lit, decl, &e.span, &mut issues);
                    }
                }
                // Duplicate class names are left to the checker.
                Element::Class(c) => {
                    if seen_classes.insert(c.name.as_str()) {
                        insert(&c.name, Decl::Class, &c.span, &mut issues);
                    }
                }
                Element::Feature(f) => {
                    let decl = feature_decl(f, &mut issues);
                    insert(f.name(), decl, f.span(), &mut issues);
                }
                Element::Predicate(_) => {}
            }
        }
        let mut classes = HashMap::new();
        for class in model.classes() {
            if classes.contains_key(&class.name) {
                continue;
            }
            let frame = frame_of(class_features(model, class).into_iter(), &mut issues);
            classes.insert(class.name.clone(), Rc::new(frame));
        }
        Scopes { globals, classes, frames: Vec::new(), issues }
    }

    /// Duplicate-name issues found while building the tables.
    pub fn take_issues(&mut self) -> Vec<NameIssue> {
        std::mem::take(&mut self.issues)
    }

    pub fn push_class(&mut self, name: &str) {
        let frame = self.classes.get(name).cloned().unwrap_or_default();
        self.frames.push(frame);
    }

    pub fn push_frame(&mut self, frame: Frame) {
        self.frames.push(Rc::new(frame));
    }

    pub fn push_index(&mut self, name: &str) {
        let mut frame = Frame::new();
        frame.insert(name.to_string(), Decl::Index);
        self.frames.push(Rc::new(frame));
    }

    pub fn pop(&mut self) {
        self.frames.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<&Decl> {
        self.frames
            .iter()
            .rev()
            .find_map(|f| f.get(name))
            .or_else(|| self.globals.get(name))
    }

    pub fn is_class(&self, name: &str) -> bool {
        self.classes.contains_key(name)
    }

    pub fn class_frame(&self, name: &str) -> Option<&Frame> {
        self.classes.get(name).map(|f| f.as_ref())
    }

    /// Members reachable through a value of the given declaration.
    pub fn members<'a>(&'a self, decl: &'a Decl) -> Option<&'a Frame> {
        match decl {
            Decl::Variable { ty: TypeRef::Named(class), .. } => self.class_frame(class),
            Decl::Record { members, .. } => Some(members),
            _ => None,
        }
    }

    /// Resolves an access path; on failure returns the step that did not resolve.
    pub fn resolve(&self, path: &[AccessStep]) -> Result<Decl, String> {
        let first = path.first().ok_or_else(String::new)?;
        let mut current = self.lookup(&first.name).cloned().ok_or_else(|| first.name.clone())?;
        for step in &path[1..] {
            current = self
                .members(&current)
                .and_then(|m| m.get(&step.name))
                .cloned()
                .ok_or_else(|| step.name.clone())?;
        }
        Ok(current)
    }
}

/// Resolves every name in `model`, rewriting bare references to enumeration
/// literals into literal nodes. Returns the resolution issues in traversal order.
pub fn resolve_model(model: &mut PivotModel) -> Vec<NameIssue> {
    let mut scopes = Scopes::new(model);
    let mut issues = scopes.take_issues();
    let mut linker = Linker { scopes, issues: &mut issues };
    for element in &mut model.elements {
        match element {
            Element::Class(c) => {
                for sup in &c.super_types {
                    if !linker.scopes.is_class(sup) {
                        linker.unresolved(sup, &c.span);
                    }
                }
                linker.scopes.push_class(&c.name);
                linker.features(&mut c.features);
                linker.scopes.pop();
            }
            Element::Feature(f) => linker.features(std::slice::from_mut(f)),
            Element::Predicate(p) => linker.body(&mut p.body),
            Element::Enum(_) => {}
        }
    }
    issues
}

/// Unresolved-name events over a model, without modifying it.
pub fn unresolved_names(model: &PivotModel) -> Vec<NameIssue> {
    let mut copy = model.clone();
    resolve_model(&mut copy)
        .into_iter()
        .filter(|i| i.kind == IssueKind::Unresolved)
        .collect()
}

struct Linker<'a> {
    scopes: Scopes,
    issues: &'a mut Vec<NameIssue>,
}

impl Linker<'_> {
    fn unresolved(&mut self, name: &str, span: &Span) {
        self.issues.push(NameIssue {
            kind: IssueKind::Unresolved,
            name: name.to_string(),
            span: span.clone(),
        });
    }

    fn features(&mut self, features: &mut [Feature]) {
        for f in features {
            match f {
                Feature::Variable(v) => {
                    if let TypeRef::Named(ty) = &v.ty {
                        match self.scopes.lookup(ty) {
                            Some(Decl::EnumType | Decl::Class) => {}
                            _ => {
                                let (ty, span) = (ty.clone(), v.span.clone());
                                self.unresolved(&ty, &span);
                            }
                        }
                    }
                    if let Some(dims) = &mut v.array {
                        self.expr(&mut dims.n);
                        if let Some(m) = &mut dims.m {
                            self.expr(m);
                        }
                    }
                    match &mut v.domain {
                        Some(Domain::Interval { lower, upper }) => {
                            self.expr(lower);
                            self.expr(upper);
                        }
                        Some(Domain::Set(values)) => values.iter_mut().for_each(|e| self.expr(e)),
                        None => {}
                    }
                }
                Feature::Constant(_) => {}
                Feature::Zone(z) => self.body(&mut z.body),
                Feature::Record(r) => {
                    if let Some(dims) = &mut r.array {
                        self.expr(&mut dims.n);
                        if let Some(m) = &mut dims.m {
                            self.expr(m);
                        }
                    }
                    let frame = frame_of(r.features.iter(), &mut Vec::new());
                    self.scopes.push_frame(frame);
                    self.features(&mut r.features);
                    self.scopes.pop();
                }
            }
        }
    }

    fn body(&mut self, body: &mut [Statement]) {
        for stmt in body {
            match stmt {
                Statement::Constraint { expr, .. } => self.expr(expr),
                Statement::Forall { index, lower, upper, body, .. } => {
                    self.expr(lower);
                    self.expr(upper);
                    self.scopes.push_index(index);
                    self.body(body);
                    self.scopes.pop();
                }
                Statement::If { cond, then_body, else_body, .. } => {
                    self.expr(cond);
                    self.body(then_body);
                    if let Some(b) = else_body {
                        self.body(b);
                    }
                }
            }
        }
    }

    fn expr(&mut self, expr: &mut Expr) {
        match &mut expr.kind {
            ExprKind::Ref(path) => {
                match self.scopes.resolve(path) {
                    Ok(Decl::Literal { enum_name, .. }) if path.len() == 1 && path[0].indices.is_empty() => {
                        let literal = path[0].name.clone();
                        expr.kind = ExprKind::EnumLit { enum_name, literal };
                        return;
                    }
                    Ok(_) => {}
                    Err(name) => {
                        let span = expr.span.clone();
                        self.unresolved(&name, &span);
                    }
                }
                if let ExprKind::Ref(path) = &mut expr.kind {
                    for step in path.iter_mut() {
                        for i in step.indices.iter_mut() {
                            self.expr(i);
                        }
                    }
                }
            }
            ExprKind::Unary(_, a) | ExprKind::Card(a) => self.expr(a),
            ExprKind::Binary(_, l, r) | ExprKind::Intersect(l, r) => {
                self.expr(l);
                self.expr(r);
            }
            _ => {}
        }
    }
}
