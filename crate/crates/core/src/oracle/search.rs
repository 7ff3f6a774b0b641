//! Evaluation of ground constraints and exhaustive enumeration.

use crate::ir::eval::{int_binary, ConstValue};
use crate::ir::{BinOp, UnOp};

use super::ground::{offset, CExpr, Grounded};
use super::{Assignment, SolutionSet, Value};

/// Value of `e` under `asg`; `None` when the candidate is infeasible for
/// it (division by zero, overflow, index out of range, ill-typed operands).
pub(crate) fn eval(e: &CExpr, asg: &[Value]) -> Option<Value> {
    match e {
        CExpr::Const(v) => Some(v.clone()),
        CExpr::Var(k) => asg.get(*k).cloned(),
        CExpr::Unary(UnOp::Neg, a) => match eval(a, asg)? {
            Value::Int(v) => v.checked_neg().map(Value::Int),
            _ => None,
        },
        CExpr::Unary(UnOp::Not, a) => match eval(a, asg)? {
            Value::Bool(b) => Some(Value::Bool(!b)),
            _ => None,
        },
        CExpr::Card(a) => match eval(a, asg)? {
            Value::Set(s) => Some(Value::Int(s.len() as i64)),
            _ => None,
        },
        CExpr::Intersect(l, r) => match (eval(l, asg)?, eval(r, asg)?) {
            (Value::Set(a), Value::Set(b)) => Some(Value::Set(a.intersection(&b).copied().collect())),
            _ => None,
        },
        CExpr::Element { base, dims, indices } => {
            let mut at = Vec::with_capacity(indices.len());
            for (i, n) in indices.iter().zip(dims) {
                match eval(i, asg)? {
                    Value::Int(v) if (1..=*n).contains(&v) => at.push(v),
                    _ => return None,
                }
            }
            asg.get(base + offset(&at, dims)).cloned()
        }
        CExpr::Binary(op, l, r) if op.is_logical() => {
            let truth = |e: &CExpr| match eval(e, asg) {
                Some(Value::Bool(b)) => Some(b),
                _ => None,
            };
            let (a, b) = (truth(l), truth(r));
            let v = match op {
                BinOp::And => match (a, b) {
                    (Some(false), _) | (_, Some(false)) => Some(false),
                    (Some(true), Some(true)) => Some(true),
                    _ => None,
                },
                BinOp::Or => match (a, b) {
                    (Some(true), _) | (_, Some(true)) => Some(true),
                    (Some(false), Some(false)) => Some(false),
                    _ => None,
                },
                _ => match (a, b) {
                    (Some(false), _) | (_, Some(true)) => Some(true),
                    (Some(true), Some(false)) => Some(false),
                    _ => None,
                },
            };
            v.map(Value::Bool)
        }
        CExpr::Binary(op, l, r) => {
            let (a, b) = (eval(l, asg)?, eval(r, asg)?);
            let ordered = |x: i64, y: i64| match int_binary(*op, x, y).ok()? {
                ConstValue::Int(v) => Some(Value::Int(v)),
                ConstValue::Bool(v) => Some(Value::Bool(v)),
                _ => None,
            };
            match (a, b) {
                (Value::Int(x), Value::Int(y)) => ordered(x, y),
                (Value::Lit { pos: x, .. }, Value::Lit { pos: y, .. }) if op.is_comparison() => ordered(x, y),
                (a @ (Value::Bool(_) | Value::Set(_)), b) => match op {
                    BinOp::Eq => Some(Value::Bool(a == b)),
                    BinOp::Ne => Some(Value::Bool(a != b)),
                    _ => None,
                },
                _ => None,
            }
        }
    }
}

fn holds(c: &CExpr, asg: &[Value]) -> bool {
    eval(c, asg) == Some(Value::Bool(true))
}

fn assignment(g: &Grounded, values: &[Value]) -> Assignment {
    g.cells.iter().cloned().zip(values.iter().cloned()).collect()
}

/// Depth-first enumeration; each constraint is checked once its last cell is assigned.
pub(crate) fn backtrack(g: &Grounded) -> SolutionSet {
    let n = g.cells.len();
    let mut buckets: Vec<Vec<&CExpr>> = vec![Vec::new(); n];
    for c in &g.constraints {
        match c.max_var() {
            Some(k) => buckets[k].push(c),
            None if !holds(c, &[]) => return SolutionSet::default(),
            None => {}
        }
    }
    if g.domains.iter().any(Vec::is_empty) {
        return SolutionSet::default();
    }
    let mut found = Vec::new();
    let mut values: Vec<Value> = Vec::with_capacity(n);
    fn go(
        g: &Grounded,
        buckets: &[Vec<&CExpr>],
        values: &mut Vec<Value>,
        found: &mut Vec<Assignment>,
    ) {
        let k = values.len();
        if k == g.cells.len() {
            found.push(assignment(g, values));
            return;
        }
        for v in &g.domains[k] {
            values.push(v.clone());
            if buckets[k].iter().all(|c| holds(c, values)) {
                go(g, buckets, values, found);
            }
            values.pop();
        }
    }
    go(g, &buckets, &mut values, &mut found);
    SolutionSet::new(found)
}

/// Every full assignment, filtered afterwards.
pub(crate) fn generate_and_test(g: &Grounded) -> SolutionSet {
    if g.domains.iter().any(Vec::is_empty) {
        return SolutionSet::default();
    }
    let n = g.cells.len();
    let mut digits = vec![0usize; n];
    let mut found = Vec::new();
    loop {
        let values: Vec<Value> = digits.iter().zip(&g.domains).map(|(&d, dom)| dom[d].clone()).collect();
        if g.constraints.iter().all(|c| holds(c, &values)) {
            found.push(assignment(g, &values));
        }
        let mut k = n;
        loop {
            if k == 0 {
                return SolutionSet::new(found);
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < g.domains[k].len() {
                break;
            }
            digits[k] = 0;
        }
    }
}
