//! Matrices to vectors.

use std::collections::{HashMap, HashSet};

use crate::ir::{rewrite_expr, ArrayDims, BinOp, Element, Expr, ExprKind, Feature, PivotModel};

use super::names::{NameMap, NameStep};
use super::{PassError, PassOutput};

fn times(a: &Expr, b: &Expr) -> Expr {
    match (a.as_int(), b.as_int()) {
        (Some(x), Some(y)) => Expr::int(x * y),
        _ => Expr::binary(BinOp::Mul, a.clone(), b.clone()),
    }
}

/// `m[i,j]` with `c` columns becomes `m[(i-1)*c+j]`; folded when all three are literals.
fn vector_index(i: &Expr, j: &Expr, cols: &Expr) -> Expr {
    if let (Some(i), Some(j), Some(c)) = (i.as_int(), j.as_int(), cols.as_int()) {
        return Expr::int((i - 1) * c + j);
    }
    let shifted = Expr::binary(BinOp::Sub, i.clone(), Expr::int(1));
    Expr::binary(BinOp::Add, Expr::binary(BinOp::Mul, shifted, cols.clone()), j.clone())
}

fn record_names(features: &[Feature], out: &mut HashSet<String>) {
    for f in features {
        if let Feature::Record(r) = f {
            out.insert(r.name.clone());
            record_names(&r.features, out);
        }
    }
}

/// Two-dimensional variables become vectors of `rows*cols` cells, accessed
/// row-major from 1.
pub fn flatten_matrices(model: &PivotModel) -> Result<PassOutput, PassError> {
    let mut out = model.clone();
    let mut cols: HashMap<String, Expr> = HashMap::new();
    let mut clash = None;
    out.for_each_variable_mut(&mut |v| {
        let Some(ArrayDims { n, m: Some(m) }) = &v.array else { return };
        if let Some(previous) = cols.get(&v.name) {
            if previous != m {
                clash.get_or_insert_with(|| (v.name.clone(), v.span.describe()));
            }
        }
        cols.insert(v.name.clone(), m.clone());
        v.array = Some(ArrayDims::vector(times(n, m)));
    });
    if cols.is_empty() {
        return Ok(PassOutput::same_names(out));
    }
    let mut records = HashSet::new();
    for element in &model.elements {
        match element {
            Element::Class(c) => record_names(&c.features, &mut records),
            Element::Feature(f) => record_names(std::slice::from_ref(f), &mut records),
            _ => {}
        }
    }
    if let Some(name) = cols.keys().find(|n| records.contains(*n)) {
        clash.get_or_insert_with(|| (name.clone(), "<unknown>:0:0".into()));
    }
    if let Some((name, location)) = clash {
        return Err(PassError::unsupported(location, format!("matrices named `{name}` differ in shape")));
    }

    out.for_each_expr_mut(&mut |e| {
        *e = rewrite_expr(e.clone(), &mut |mut x| {
            if let ExprKind::Ref(path) = &mut x.kind {
                for step in path.iter_mut() {
                    if let (Some(c), 2) = (cols.get(&step.name), step.indices.len()) {
                        step.indices = vec![vector_index(&step.indices[0], &step.indices[1], c)];
                    }
                }
            }
            x
        });
    });
    let mut names = NameMap::identity();
    let mut sorted: Vec<_> = cols.into_iter().collect();
    sorted.sort_by(|a, b| a.0.cmp(&b.0));
    for (name, cols) in sorted {
        names.push(NameStep::MatrixToVector { name, cols });
    }
    Ok(PassOutput { model: out, names, problems: Vec::new() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{extract_source, inject, parse_data, parse_model};

    fn run(src: &str) -> PassOutput {
        flatten_matrices(&inject(&parse_model(src).unwrap(), &parse_data("int c := 4;").unwrap()).unwrap())
            .unwrap()
    }

    #[test]
    fn literal_matrix_folds_size_and_index() {
        let out = run("main class M { int m[3, 4] in [0, 1]; constraint k { m[2, 3] = 1; } }");
        let text = extract_source(&out.model).model;
        assert!(text.contains("int m[12] in [0, 1];"), "{text}");
        assert!(text.contains("m[7] = 1;"), "{text}");
    }

    #[test]
    fn symbolic_index_keeps_formula() {
        let out = run("main class M { int m[2, c] in [0, 1]; constraint k { forall(i in 1..2) { m[i, 1] = 0; } } }");
        let text = extract_source(&out.model).model;
        assert!(text.contains("int m[2*c] in [0, 1];"), "{text}");
        assert!(text.contains("m[(i-1)*c+1] = 0;"), "{text}");
    }

    #[test]
    fn model_without_matrices_is_unchanged() {
        let src = "main class M { int v[3] in [0, 1]; constraint k { v[2] = 1; } }";
        let m = inject(&parse_model(src).unwrap(), &parse_data("").unwrap()).unwrap();
        let out = flatten_matrices(&m).unwrap();
        assert_eq!(out.model, m);
        assert!(out.names.is_identity());
    }
}
