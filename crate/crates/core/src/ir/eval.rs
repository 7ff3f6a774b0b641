//! Constant evaluation over model constants and bound loop indices.

use std::collections::HashMap;

use thiserror::Error;

use super::{BinOp, Element, Expr, ExprKind, Feature, Literal, PivotModel, UnOp};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ConstValue {
    Int(i64),
    Real(f64),
    Bool(bool),
    /// Enumeration literal, by 1-based position.
    Enum(i64),
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EvalError {
    #[error("`{0}` is not a constant")]
    NotConstant(String),
    #[error("integer division by zero")]
    DivisionByZero,
    #[error("integer overflow")]
    Overflow,
    #[error("ill-typed constant expression: {0}")]
    Type(&'static str),
}

/// Scoped table of constant values.
#[derive(Clone, Debug, Default)]
pub struct ConstEnv {
    values: Vec<(String, ConstValue)>,
    enums: HashMap<String, Vec<String>>,
}

impl ConstEnv {
    /// Top-level constants and enumeration types of `model`.
    pub fn from_model(model: &PivotModel) -> Self {
        let mut env = ConstEnv::default();
        for element in &model.elements {
            match element {
                Element::Feature(Feature::Constant(c)) => env.bind(&c.name, literal_value(&c.value)),
                Element::Enum(e) => {
                    env.enums.insert(e.name.clone(), e.literals.clone());
                }
                _ => {}
            }
        }
        env
    }

    pub fn bind(&mut self, name: &str, value: ConstValue) {
        self.values.push((name.to_string(), value));
    }

    pub fn bind_int(&mut self, name: &str, value: i64) {
        self.bind(name, ConstValue::Int(value));
    }

    /// Drops the most recent binding.
    pub fn unbind(&mut self) {
        self.values.pop();
    }

    pub fn lookup(&self, name: &str) -> Option<ConstValue> {
        self.values.iter().rev().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn override_int(&mut self, name: &str, value: i64) {
        for (n, v) in self.values.iter_mut() {
            if n == name {
                *v = ConstValue::Int(value);
            }
        }
    }

    pub fn eval(&self, expr: &Expr) -> Result<ConstValue, EvalError> {
        eval_const(expr, self)
    }

    pub fn eval_int(&self, expr: &Expr) -> Result<i64, EvalError> {
        match self.eval(expr)? {
            ConstValue::Int(v) => Ok(v),
            _ => Err(EvalError::Type("expected an integer")),
        }
    }
}

pub fn literal_value(lit: &Literal) -> ConstValue {
    match *lit {
        Literal::Int(v) => ConstValue::Int(v),
        Literal::Real(v) => ConstValue::Real(v),
        Literal::Bool(v) => ConstValue::Bool(v),
    }
}

pub fn eval_const(expr: &Expr, env: &ConstEnv) -> Result<ConstValue, EvalError> {
    use ConstValue::*;
    match &expr.kind {
        ExprKind::Int(v) => Ok(Int(*v)),
        ExprKind::Real(v) => Ok(Real(*v)),
        ExprKind::Bool(v) => Ok(Bool(*v)),
        ExprKind::EnumLit { enum_name, literal } => env
            .enums
            .get(enum_name)
            .and_then(|lits| lits.iter().position(|l| l == literal))
            .map(|p| Enum(p as i64 + 1))
            .ok_or_else(|| EvalError::NotConstant(literal.clone())),
        ExprKind::Ref(path) => match expr.as_simple_name() {
            Some(name) => env.lookup(name).ok_or_else(|| EvalError::NotConstant(name.to_string())),
            None => Err(EvalError::NotConstant(path[0].name.clone())),
        },
        ExprKind::Unary(UnOp::Neg, arg) => match eval_const(arg, env)? {
            Int(v) => v.checked_neg().map(Int).ok_or(EvalError::Overflow),
            Real(v) => Ok(Real(-v)),
            _ => Err(EvalError::Type("negation of a non-number")),
        },
        ExprKind::Unary(UnOp::Not, arg) => match eval_const(arg, env)? {
            Bool(b) => Ok(Bool(!b)),
            _ => Err(EvalError::Type("`not` of a non-boolean")),
        },
        ExprKind::Binary(op, l, r) => {
            let l = eval_const(l, env)?;
            let r = eval_const(r, env)?;
            apply_binary(*op, l, r)
        }
        ExprKind::Card(_) | ExprKind::Intersect(..) => {
            Err(EvalError::NotConstant("set expression".into()))
        }
    }
}

pub fn apply_binary(op: BinOp, l: ConstValue, r: ConstValue) -> Result<ConstValue, EvalError> {
    use ConstValue::*;
    match (l, r) {
        (Int(a), Int(b)) => int_binary(op, a, b),
        (Enum(a), Enum(b)) if op.is_comparison() => int_binary(op, a, b),
        (Bool(a), Bool(b)) => match op {
            BinOp::And => Ok(Bool(a && b)),
            BinOp::Or => Ok(Bool(a || b)),
            BinOp::Implies => Ok(Bool(!a || b)),
            BinOp::Eq => Ok(Bool(a == b)),
            BinOp::Ne => Ok(Bool(a != b)),
            _ => Err(EvalError::Type("arithmetic on booleans")),
        },
        (Int(_) | Real(_), Int(_) | Real(_)) => {
            let a = as_f64(l);
            let b = as_f64(r);
            Ok(match op {
                BinOp::Add => Real(a + b),
                BinOp::Sub => Real(a - b),
                BinOp::Mul => Real(a * b),
                BinOp::Div => Real(a / b),
                BinOp::Eq => Bool(a == b),
                BinOp::Ne => Bool(a != b),
                BinOp::Lt => Bool(a < b),
                BinOp::Le => Bool(a <= b),
                BinOp::Gt => Bool(a > b),
                BinOp::Ge => Bool(a >= b),
                _ => return Err(EvalError::Type("logical operator on numbers")),
            })
        }
        _ => Err(EvalError::Type("mismatched operand types")),
    }
}

fn as_f64(v: ConstValue) -> f64 {
    match v {
        ConstValue::Int(i) => i as f64,
        ConstValue::Real(r) => r,
        _ => f64::NAN,
    }
}

/// Integer semantics shared by folding and the oracle. Division truncates toward zero.
pub fn int_binary(op: BinOp, a: i64, b: i64) -> Result<ConstValue, EvalError> {
    use ConstValue::*;
    let checked = |v: Option<i64>| v.map(Int).ok_or(EvalError::Overflow);
    match op {
        BinOp::Add => checked(a.checked_add(b)),
        BinOp::Sub => checked(a.checked_sub(b)),
        BinOp::Mul => checked(a.checked_mul(b)),
        BinOp::Div => {
            if b == 0 {
                Err(EvalError::DivisionByZero)
            } else {
                checked(a.checked_div(b))
            }
        }
        BinOp::Eq => Ok(Bool(a == b)),
        BinOp::Ne => Ok(Bool(a != b)),
        BinOp::Lt => Ok(Bool(a < b)),
        BinOp::Le => Ok(Bool(a <= b)),
        BinOp::Gt => Ok(Bool(a > b)),
        BinOp::Ge => Ok(Bool(a >= b)),
        BinOp::And | BinOp::Or | BinOp::Implies => Err(EvalError::Type("logical operator on integers")),
    }
}
