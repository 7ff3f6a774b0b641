//! ECLiPSe target: abstract syntax, translation from flat pivot models,
//! local-variable introduction and text emission.
//!
//! A model becomes one clause `name(L):- atoms.` whose body binds the
//! problem dimensions, declares the decision variables, aliases them to
//! `L`, states the constraints and ends with a labeling call.

mod locals;
mod translate;

use std::fmt::Write;

use thiserror::Error;

use crate::ir::BinOp;

pub use locals::{compute_params, free_names, introduce_locals};
pub use translate::to_eclipse;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum BackendError {
    #[error("{location}: unsupported construct: {kind}")]
    UnsupportedConstruct { kind: String, location: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EclModel {
    pub predicates: Vec<EclPredicate>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EclPredicate {
    pub name: String,
    pub params: Vec<String>,
    pub body: Vec<EclAtom>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EclAtom {
    /// `S is 3`
    ConstBind { name: String, value: EclExpr },
    /// `intsets(X,12,1,9)`
    IntsetsDecl { list_var: String, count: i64, lo: i64, hi: i64 },
    /// `intset(X,1,9)`
    IntsetDecl { var: String, lo: i64, hi: i64 },
    /// `dim(Q,[5])`
    ArrayDecl { var: String, sizes: Vec<EclExpr> },
    /// `Q :: 1..5` or `Q :: [1,3]`
    DomainDecl { var: String, domain: EclDomain },
    /// `L = X`
    ListAlias { name: String, target: String },
    /// `term_variables([X,Y],L)`
    CollectVars { name: String, targets: Vec<String> },
    ForLoop { iter: String, from: EclExpr, to: EclExpr, params: Vec<String>, body: Vec<EclAtom> },
    /// `V is Expr`
    IsBind { var: String, expr: EclExpr },
    /// `nth(V,I,L)`
    NthCall { out: String, index: EclExpr, list: String },
    /// `#(S, V)`: `out` is the cardinality of `set`.
    CardBind { set: EclExpr, out: EclExpr },
    Constraint { expr: EclExpr },
    LabelSets { list: String },
    Labeling { list: String },
}

#[derive(Clone, Debug, PartialEq)]
pub enum EclDomain {
    Interval(EclExpr, EclExpr),
    Values(Vec<EclExpr>),
    Integers,
    Reals,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EclExpr {
    Int(i64),
    Real(f64),
    Var(String),
    /// Array subscript, `Q[I]`.
    Subscript(String, Vec<EclExpr>),
    /// Element of a list of set variables; replaced by an `nth` local.
    SetElem { list: String, index: Box<EclExpr> },
    Neg(Box<EclExpr>),
    Not(Box<EclExpr>),
    Binary(BinOp, Box<EclExpr>, Box<EclExpr>),
    Card(Box<EclExpr>),
    Intersect(Box<EclExpr>, Box<EclExpr>),
}

impl EclExpr {
    pub fn var(name: impl Into<String>) -> Self {
        EclExpr::Var(name.into())
    }

    pub fn is_atomic(&self) -> bool {
        matches!(self, EclExpr::Int(_) | EclExpr::Var(_))
    }

    /// Identifiers read by this expression.
    pub fn idents(&self, out: &mut Vec<String>) {
        match self {
            EclExpr::Int(_) | EclExpr::Real(_) => {}
            EclExpr::Var(v) => out.push(v.clone()),
            EclExpr::Subscript(name, idx) => {
                out.push(name.clone());
                idx.iter().for_each(|i| i.idents(out));
            }
            EclExpr::SetElem { list, index } => {
                out.push(list.clone());
                index.idents(out);
            }
            EclExpr::Neg(a) | EclExpr::Not(a) | EclExpr::Card(a) => a.idents(out),
            EclExpr::Binary(_, l, r) | EclExpr::Intersect(l, r) => {
                l.idents(out);
                r.idents(out);
            }
        }
    }
}

/// Target spelling of a pivot operator in a constraint.
fn op_text(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "//",
        BinOp::Eq => "#=",
        BinOp::Ne => "#\\=",
        BinOp::Lt => "#<",
        BinOp::Le => "#=<",
        BinOp::Gt => "#>",
        BinOp::Ge => "#>=",
        BinOp::And => "and",
        BinOp::Or => "or",
        BinOp::Implies => "=>",
    }
}

fn prec(op: BinOp) -> u8 {
    match op {
        BinOp::Implies => 1,
        BinOp::Or => 2,
        BinOp::And => 3,
        BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 5,
        BinOp::Add | BinOp::Sub => 7,
        BinOp::Mul | BinOp::Div => 8,
    }
}

const ATOM: u8 = 10;

fn render(e: &EclExpr) -> (String, u8) {
    let wrap = |child: &EclExpr, min: u8| {
        let (s, p) = render(child);
        if p < min {
            format!("({s})")
        } else {
            s
        }
    };
    match e {
        EclExpr::Int(v) => (v.to_string(), if *v < 0 { 9 } else { ATOM }),
        EclExpr::Real(v) => (format!("{v:?}"), if *v < 0.0 { 9 } else { ATOM }),
        EclExpr::Var(v) => (v.clone(), ATOM),
        EclExpr::Subscript(name, idx) => {
            let parts: Vec<String> = idx.iter().map(expr_text).collect();
            (format!("{name}[{}]", parts.join(",")), ATOM)
        }
        EclExpr::SetElem { list, index } => (format!("{list}[{}]", expr_text(index)), ATOM),
        EclExpr::Neg(a) => (format!("-{}", wrap(a, ATOM)), 9),
        EclExpr::Not(a) => (format!("neg {}", wrap(a, ATOM)), 4),
        EclExpr::Card(a) => (format!("#({})", expr_text(a)), ATOM),
        EclExpr::Intersect(l, r) => (format!("{} /\\ {}", wrap(l, 6), wrap(r, 7)), 6),
        EclExpr::Binary(op, l, r) => {
            let p = prec(*op);
            let (lmin, rmin) = match op {
                BinOp::Implies => (p + 1, p),
                _ if op.is_comparison() => (p + 1, p + 1),
                _ => (p, p + 1),
            };
            let (ls, rs) = (wrap(l, lmin), wrap(r, rmin));
            let text = if op.is_arithmetic() && *op != BinOp::Div {
                let sep = if rs.starts_with('-') { " " } else { "" };
                format!("{ls}{}{sep}{rs}", op_text(*op))
            } else {
                format!("{ls} {} {rs}", op_text(*op))
            };
            (text, p)
        }
    }
}

/// Target text of an expression.
pub fn expr_text(e: &EclExpr) -> String {
    render(e).0
}

fn domain_text(d: &EclDomain) -> String {
    match d {
        EclDomain::Interval(lo, hi) => format!("{}..{}", expr_text(lo), expr_text(hi)),
        EclDomain::Values(values) => {
            let parts: Vec<String> = values.iter().map(expr_text).collect();
            format!("[{}]", parts.join(","))
        }
        EclDomain::Integers | EclDomain::Reals => unreachable!("emitted as a call"),
    }
}

fn indent(out: &mut String, depth: usize) {
    out.extend(std::iter::repeat(' ').take(depth));
}

fn emit_atoms(out: &mut String, atoms: &[EclAtom], depth: usize) {
    for (k, atom) in atoms.iter().enumerate() {
        if k > 0 {
            out.push_str(",\n");
        }
        indent(out, depth);
        emit_atom(out, atom, depth);
    }
}

fn emit_atom(out: &mut String, atom: &EclAtom, depth: usize) {
    match atom {
        EclAtom::ConstBind { name, value } => write!(out, "{name} is {}", expr_text(value)).unwrap(),
        EclAtom::IntsetsDecl { list_var, count, lo, hi } => {
            write!(out, "intsets({list_var},{count},{lo},{hi})").unwrap()
        }
        EclAtom::IntsetDecl { var, lo, hi } => write!(out, "intset({var},{lo},{hi})").unwrap(),
        EclAtom::ArrayDecl { var, sizes } => {
            let parts: Vec<String> = sizes.iter().map(expr_text).collect();
            write!(out, "dim({var},[{}])", parts.join(",")).unwrap()
        }
        EclAtom::DomainDecl { var, domain } => match domain {
            EclDomain::Integers => write!(out, "integers({var})").unwrap(),
            EclDomain::Reals => write!(out, "reals({var})").unwrap(),
            _ => write!(out, "{var} :: {}", domain_text(domain)).unwrap(),
        },
        EclAtom::ListAlias { name, target } => write!(out, "{name} = {target}").unwrap(),
        EclAtom::CollectVars { name, targets } => {
            write!(out, "term_variables([{}],{name})", targets.join(",")).unwrap()
        }
        EclAtom::ForLoop { iter, from, to, params, body } => {
            write!(out, "(for({iter},{},{})", expr_text(from), expr_text(to)).unwrap();
            if !params.is_empty() {
                write!(out, ", param({})", params.join(",")).unwrap();
            }
            out.push_str(" do\n");
            if body.is_empty() {
                indent(out, depth + 1);
                out.push_str("true");
            } else {
                emit_atoms(out, body, depth + 1);
            }
            out.push('\n');
            indent(out, depth);
            out.push(')');
        }
        EclAtom::IsBind { var, expr } => write!(out, "{var} is {}", expr_text(expr)).unwrap(),
        EclAtom::NthCall { out: v, index, list } => {
            write!(out, "nth({v},{},{list})", expr_text(index)).unwrap()
        }
        EclAtom::CardBind { set, out: v } => {
            write!(out, "#({},{})", expr_text(set), expr_text(v)).unwrap()
        }
        EclAtom::Constraint { expr } => out.push_str(&expr_text(expr)),
        EclAtom::LabelSets { list } => write!(out, "label_sets({list})").unwrap(),
        EclAtom::Labeling { list } => write!(out, "labeling({list})").unwrap(),
    }
}

/// Program text: one clause per predicate, LF line endings.
pub fn emit(model: &EclModel) -> String {
    let mut out = String::new();
    for p in &model.predicates {
        write!(out, "{}({}):-", p.name, p.params.join(",")).unwrap();
        if p.body.len() == 1 && !matches!(p.body[0], EclAtom::ForLoop { .. }) {
            out.push(' ');
            emit_atom(&mut out, &p.body[0], 0);
        } else {
            out.push('\n');
            emit_atoms(&mut out, &p.body, 1);
        }
        out.push_str(".\n");
    }
    out
}

/// Counts of each atom kind, loops included, at any depth.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct AtomCensus {
    pub const_binds: usize,
    pub intsets: usize,
    pub aliases: usize,
    pub loops: usize,
    pub is_binds: usize,
    pub nth_calls: usize,
    pub card_binds: usize,
    pub constraints: usize,
    pub labelings: usize,
}

pub fn atom_census(atoms: &[EclAtom]) -> AtomCensus {
    let mut c = AtomCensus::default();
    fn walk(atoms: &[EclAtom], c: &mut AtomCensus) {
        for a in atoms {
            match a {
                EclAtom::ConstBind { .. } => c.const_binds += 1,
                EclAtom::IntsetsDecl { .. } => c.intsets += 1,
                EclAtom::ListAlias { .. } | EclAtom::CollectVars { .. } => c.aliases += 1,
                EclAtom::ForLoop { body, .. } => {
                    c.loops += 1;
                    walk(body, c);
                }
                EclAtom::IsBind { .. } => c.is_binds += 1,
                EclAtom::NthCall { .. } => c.nth_calls += 1,
                EclAtom::CardBind { .. } => c.card_binds += 1,
                EclAtom::Constraint { .. } => c.constraints += 1,
                EclAtom::LabelSets { .. } | EclAtom::Labeling { .. } => c.labelings += 1,
                EclAtom::IntsetDecl { .. } | EclAtom::ArrayDecl { .. } | EclAtom::DomainDecl { .. } => {}
            }
        }
    }
    walk(atoms, &mut c);
    c
}

/// Nesting depth of a loop atom: 1 for a loop without inner loops.
pub fn loop_depth(atom: &EclAtom) -> usize {
    match atom {
        EclAtom::ForLoop { body, .. } => 1 + body.iter().map(loop_depth).max().unwrap_or(0),
        _ => 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_body_is_a_single_line() {
        let m = EclModel {
            predicates: vec![EclPredicate {
                name: "p".into(),
                params: vec!["L".into()],
                body: vec![EclAtom::LabelSets { list: "L".into() }],
            }],
        };
        assert_eq!(emit(&m), "p(L):- label_sets(L).\n");
    }

    #[test]
    fn loops_indent_one_space_per_level() {
        let inner = EclAtom::Constraint {
            expr: EclExpr::Binary(BinOp::Le, Box::new(EclExpr::var("V5")), Box::new(EclExpr::Int(1))),
        };
        let m = EclModel {
            predicates: vec![EclPredicate {
                name: "p".into(),
                params: vec!["L".into()],
                body: vec![
                    EclAtom::ConstBind { name: "W".into(), value: EclExpr::Int(4) },
                    EclAtom::ForLoop {
                        iter: "W1".into(),
                        from: EclExpr::Int(1),
                        to: EclExpr::var("W"),
                        params: vec!["L".into(), "W".into()],
                        body: vec![inner],
                    },
                    EclAtom::LabelSets { list: "L".into() },
                ],
            }],
        };
        assert_eq!(
            emit(&m),
            "p(L):-\n W is 4,\n (for(W1,1,W), param(L,W) do\n  V5 #=< 1\n ),\n label_sets(L).\n"
        );
    }

    #[test]
    fn expressions_use_target_operators() {
        let idx = EclExpr::Binary(
            BinOp::Add,
            Box::new(EclExpr::Binary(
                BinOp::Mul,
                Box::new(EclExpr::Binary(BinOp::Sub, Box::new(EclExpr::var("W1")), Box::new(EclExpr::Int(1)))),
                Box::new(EclExpr::var("G")),
            )),
            Box::new(EclExpr::var("G1")),
        );
        assert_eq!(expr_text(&idx), "(W1-1)*G+G1");
        let set = EclExpr::Intersect(Box::new(EclExpr::var("V2")), Box::new(EclExpr::var("V4")));
        assert_eq!(expr_text(&set), "V2 /\\ V4");
        let ne = EclExpr::Binary(BinOp::Ne, Box::new(EclExpr::var("A")), Box::new(EclExpr::var("B")));
        assert_eq!(expr_text(&EclExpr::Not(Box::new(ne))), "neg (A #\\= B)");
    }
}

#[cfg(test)]
mod golden;
