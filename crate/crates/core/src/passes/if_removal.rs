//! Conditional statements to implications.

use crate::ir::{BinOp, Expr, PivotModel, Statement};

use super::{PassError, PassOutput};

/// `if a { b } else { c }` becomes `(a implies b) and (not a implies c)`,
/// where `b` and `c` are the conjunctions of the branch constraints.
pub fn remove_if(model: &PivotModel) -> Result<PassOutput, PassError> {
    let mut out = model.clone();
    let mut failure = None;
    out.for_each_body_mut(&mut |body| {
        if failure.is_none() {
            if let Err(e) = rewrite_body(body) {
                failure = Some(e);
            }
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(PassOutput::same_names(out)),
    }
}

fn rewrite_body(body: &mut [Statement]) -> Result<(), PassError> {
    for stmt in body.iter_mut() {
        match stmt {
            Statement::Forall { body, .. } => rewrite_body(body)?,
            Statement::If { cond, then_body, else_body, span } => {
                let then = conjunction(then_body)?;
                let expr = match else_body {
                    Some(b) => {
                        let other = conjunction(b)?;
                        Expr::binary(
                            BinOp::And,
                            Expr::binary(BinOp::Implies, cond.clone(), then),
                            Expr::binary(BinOp::Implies, Expr::not(cond.clone()), other),
                        )
                    }
                    None => Expr::binary(BinOp::Implies, cond.clone(), then),
                };
                *stmt = Statement::Constraint { expr: expr.with_span(span.clone()), span: span.clone() };
            }
            Statement::Constraint { .. } => {}
        }
    }
    Ok(())
}

fn conjunction(branch: &mut [Statement]) -> Result<Expr, PassError> {
    rewrite_body(branch)?;
    let mut parts = Vec::new();
    for s in branch.iter() {
        match s {
            Statement::Constraint { expr, .. } => parts.push(expr.clone()),
            other => {
                return Err(PassError::unsupported(other.span().describe(), "loop inside a conditional branch"))
            }
        }
    }
    Ok(parts
        .into_iter()
        .reduce(|a, b| Expr::binary(BinOp::And, a, b))
        .unwrap_or_else(|| Expr::boolean(true)))
}
