//! Local variables for set elements and cardinalities, and loop parameters.
//!
//! ECLiPSe has no subscript syntax for lists of set variables, so every
//! element access becomes `Vk is Index, nth(Vm,Vk,L)` ahead of the
//! constraint using it, and every cardinality becomes `#(Set,Vn)`.
//! Loop bodies see only their iterator and what `param(...)` passes in.

use std::collections::BTreeSet;

use super::{EclAtom, EclExpr, EclModel};
use crate::ir::BinOp;

struct Fresh {
    next: u64,
    taken: BTreeSet<String>,
}

impl Fresh {
    fn take(&mut self) -> String {
        loop {
            let name = format!("V{}", self.next);
            self.next += 1;
            if self.taken.insert(name.clone()) {
                return name;
            }
        }
    }
}

fn collect_names(atoms: &[EclAtom], out: &mut BTreeSet<String>) {
    for a in atoms {
        let mut v = uses(a);
        v.extend(binds(a));
        if let EclAtom::ForLoop { iter, .. } = a {
            v.push(iter.clone());
        }
        out.extend(v);
    }
}

/// Per-constraint caches: index expressions and element accesses.
#[derive(Default)]
struct Cache {
    indices: Vec<(EclExpr, String)>,
    elements: Vec<((String, EclExpr), String)>,
}

fn localize(e: EclExpr, fresh: &mut Fresh, cache: &mut Cache, pre: &mut Vec<EclAtom>) -> EclExpr {
    let mut go = |x: Box<EclExpr>, pre: &mut Vec<EclAtom>| Box::new(localize(*x, fresh, cache, pre));
    match e {
        EclExpr::SetElem { list, index } => {
            let index = *go(index, pre);
            let key = (list.clone(), index.clone());
            if let Some((_, v)) = cache.elements.iter().find(|(k, _)| *k == key) {
                return EclExpr::var(v.clone());
            }
            let at = if index.is_atomic() {
                index
            } else if let Some((_, v)) = cache.indices.iter().find(|(k, _)| *k == index) {
                EclExpr::var(v.clone())
            } else {
                let v = fresh.take();
                pre.push(EclAtom::IsBind { var: v.clone(), expr: index.clone() });
                cache.indices.push((index, v.clone()));
                EclExpr::var(v)
            };
            let out = fresh.take();
            pre.push(EclAtom::NthCall { out: out.clone(), index: at, list });
            cache.elements.push((key, out.clone()));
            EclExpr::var(out)
        }
        EclExpr::Card(s) => {
            let set = *go(s, pre);
            let v = fresh.take();
            pre.push(EclAtom::CardBind { set, out: EclExpr::var(v.clone()) });
            EclExpr::var(v)
        }
        EclExpr::Subscript(name, idx) => {
            EclExpr::Subscript(name, idx.into_iter().map(|i| *go(Box::new(i), pre)).collect())
        }
        EclExpr::Neg(a) => EclExpr::Neg(go(a, pre)),
        EclExpr::Not(a) => EclExpr::Not(go(a, pre)),
        EclExpr::Binary(op, l, r) => {
            let l = go(l, pre);
            EclExpr::Binary(op, l, go(r, pre))
        }
        EclExpr::Intersect(l, r) => {
            let l = go(l, pre);
            EclExpr::Intersect(l, go(r, pre))
        }
        atomic => atomic,
    }
}

fn constraint(e: EclExpr, fresh: &mut Fresh, out: &mut Vec<EclAtom>) {
    let mut cache = Cache::default();
    // `card(S) = k` with a literal k is stated by `#(S,k)` alone.
    if let EclExpr::Binary(BinOp::Eq, l, r) = &e {
        let direct = match (&**l, &**r) {
            (EclExpr::Card(s), k @ EclExpr::Int(_)) | (k @ EclExpr::Int(_), EclExpr::Card(s)) => {
                Some(((**s).clone(), k.clone()))
            }
            _ => None,
        };
        if let Some((s, k)) = direct {
            let set = localize(s, fresh, &mut cache, out);
            out.push(EclAtom::CardBind { set, out: k });
            return;
        }
    }
    let e = localize(e, fresh, &mut cache, out);
    out.push(EclAtom::Constraint { expr: e });
}

fn rewrite(atoms: Vec<EclAtom>, fresh: &mut Fresh) -> Vec<EclAtom> {
    let mut out = Vec::with_capacity(atoms.len());
    for a in atoms {
        match a {
            EclAtom::Constraint { expr } => constraint(expr, fresh, &mut out),
            EclAtom::ForLoop { iter, from, to, params, body } => {
                out.push(EclAtom::ForLoop { iter, from, to, params, body: rewrite(body, fresh) })
            }
            other => out.push(other),
        }
    }
    out
}

/// Replaces set-element accesses and cardinalities by local variables
/// `V1, V2, ...` (numbered per predicate, skipping names already in use)
/// and recomputes loop parameters.
pub fn introduce_locals(model: &EclModel) -> EclModel {
    let mut out = model.clone();
    for p in &mut out.predicates {
        let mut taken: BTreeSet<String> = p.params.iter().cloned().collect();
        collect_names(&p.body, &mut taken);
        let mut fresh = Fresh { next: 1, taken };
        p.body = rewrite(std::mem::take(&mut p.body), &mut fresh);
    }
    compute_params(&mut out);
    out
}

fn expr_names(e: &EclExpr) -> Vec<String> {
    let mut v = Vec::new();
    e.idents(&mut v);
    v
}

/// Names an atom reads.
fn uses(a: &EclAtom) -> Vec<String> {
    match a {
        EclAtom::ConstBind { value, .. } => expr_names(value),
        EclAtom::IntsetsDecl { .. } | EclAtom::IntsetDecl { .. } => Vec::new(),
        EclAtom::ArrayDecl { sizes, .. } => sizes.iter().flat_map(expr_names).collect(),
        EclAtom::DomainDecl { domain, .. } => match domain {
            super::EclDomain::Interval(lo, hi) => [expr_names(lo), expr_names(hi)].concat(),
            super::EclDomain::Values(v) => v.iter().flat_map(expr_names).collect(),
            _ => Vec::new(),
        },
        EclAtom::ListAlias { target, .. } => vec![target.clone()],
        EclAtom::CollectVars { targets, .. } => targets.clone(),
        EclAtom::ForLoop { iter, from, to, body, .. } => {
            let mut v = [expr_names(from), expr_names(to)].concat();
            v.extend(free_names(body).into_iter().filter(|n| n != iter));
            v
        }
        EclAtom::IsBind { expr, .. } => expr_names(expr),
        EclAtom::NthCall { index, list, .. } => {
            let mut v = expr_names(index);
            v.push(list.clone());
            v
        }
        EclAtom::CardBind { set, out } => match out {
            EclExpr::Var(_) => expr_names(set),
            other => [expr_names(set), expr_names(other)].concat(),
        },
        EclAtom::Constraint { expr } => expr_names(expr),
        EclAtom::LabelSets { list } | EclAtom::Labeling { list } => vec![list.clone()],
    }
}

/// Names an atom binds for the atoms after it.
fn binds(a: &EclAtom) -> Vec<String> {
    match a {
        EclAtom::ConstBind { name, .. }
        | EclAtom::ListAlias { name, .. }
        | EclAtom::CollectVars { name, .. } => vec![name.clone()],
        EclAtom::IntsetsDecl { list_var, .. } => vec![list_var.clone()],
        EclAtom::IntsetDecl { var, .. }
        | EclAtom::ArrayDecl { var, .. }
        | EclAtom::DomainDecl { var, .. }
        | EclAtom::IsBind { var, .. } => vec![var.clone()],
        EclAtom::NthCall { out, .. } => vec![out.clone()],
        EclAtom::CardBind { out: EclExpr::Var(v), .. } => vec![v.clone()],
        _ => Vec::new(),
    }
}

/// Names read by a sequence of atoms before any of them binds them.
pub fn free_names(atoms: &[EclAtom]) -> BTreeSet<String> {
    let mut bound = BTreeSet::new();
    let mut free = BTreeSet::new();
    for a in atoms {
        for n in uses(a) {
            if !bound.contains(&n) {
                free.insert(n);
            }
        }
        bound.extend(binds(a));
    }
    free
}

fn params_in(atoms: &mut [EclAtom], visible: &mut Vec<String>) {
    let depth = visible.len();
    for a in atoms.iter_mut() {
        if let EclAtom::ForLoop { iter, params, body, .. } = a {
            let free = free_names(body);
            *params = visible.iter().filter(|n| free.contains(*n) && *n != iter).cloned().collect();
            let mut inner = params.clone();
            inner.push(iter.clone());
            params_in(body, &mut inner);
        }
        for b in binds(a) {
            if !visible.contains(&b) {
                visible.push(b);
            }
        }
    }
    visible.truncate(depth);
}

/// Fills every loop's `param(...)` list: the names its body reads that are
/// bound outside it, in binding order (clause head, then body order, then
/// enclosing iterators from outermost to innermost).
pub fn compute_params(model: &mut EclModel) {
    for p in &mut model.predicates {
        let mut visible = p.params.clone();
        params_in(&mut p.body, &mut visible);
    }
}
