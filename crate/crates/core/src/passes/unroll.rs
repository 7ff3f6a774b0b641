//! Loop unrolling.

use crate::ir::eval::ConstEnv;
use crate::ir::{Expr, PivotModel, Statement, Substitute};

use super::{PassError, PassOutput};

/// Largest number of statements one body may unroll into.
const MAX_STATEMENTS: usize = 10_000_000;

/// Replaces each loop by copies of its body, one per iteration, with the
/// index replaced by the iteration's integer. Index arithmetic is left for
/// `simplify` to fold.
pub fn unroll_loops(model: &PivotModel) -> Result<PassOutput, PassError> {
    let env = ConstEnv::from_model(model);
    let mut out = model.clone();
    let mut failure = None;
    out.for_each_body_mut(&mut |body| {
        if failure.is_some() {
            return;
        }
        let mut unrolled = Vec::new();
        match unroll_body(body, &env, &mut unrolled) {
            Ok(()) => *body = unrolled,
            Err(e) => failure = Some(e),
        }
    });
    match failure {
        Some(e) => Err(e),
        None => Ok(PassOutput::same_names(out)),
    }
}

fn unroll_body(body: &[Statement], env: &ConstEnv, out: &mut Vec<Statement>) -> Result<(), PassError> {
    for stmt in body {
        match stmt {
            Statement::Forall { index, lower, upper, body, span } => {
                let bound = |e: &Expr| {
                    env.eval_int(e).map_err(|_| PassError::NonConstantBound {
                        location: if e.span.loc().is_some() { e.span.describe() } else { span.describe() },
                    })
                };
                let (lo, hi) = (bound(lower)?, bound(upper)?);
                for k in lo..=hi {
                    // Outer indices are substituted first so inner bounds such as
                    // `i+1` become constant.
                    let copy = body.substitute(index, &Expr::int(k));
                    unroll_body(&copy, env, out)?;
                    if out.len() > MAX_STATEMENTS {
                        return Err(PassError::unsupported(span.describe(), "unrolled model is too large"));
                    }
                }
            }
            Statement::If { cond, then_body, else_body, span } => {
                let mut then = Vec::new();
                unroll_body(then_body, env, &mut then)?;
                let other = match else_body {
                    Some(b) => {
                        let mut v = Vec::new();
                        unroll_body(b, env, &mut v)?;
                        Some(v)
                    }
                    None => None,
                };
                out.push(Statement::If {
                    cond: cond.clone(),
                    then_body: then,
                    else_body: other,
                    span: span.clone(),
                });
            }
            Statement::Constraint { .. } => out.push(stmt.clone()),
        }
    }
    Ok(())
}
