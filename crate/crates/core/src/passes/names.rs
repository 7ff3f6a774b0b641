use std::fmt;

use crate::ir::eval::{ConstEnv, EvalError};
use crate::ir::Expr;

/// One scalar storage location: an access path with integer indices,
/// e.g. `weeks[1].groups[2].players` or `weeks_groups_players[4]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cell(pub Vec<(String, Vec<i64>)>);

impl Cell {
    pub fn scalar(name: &str) -> Self {
        Cell(vec![(name.to_string(), Vec::new())])
    }

    pub fn indexed(name: &str, indices: Vec<i64>) -> Self {
        Cell(vec![(name.to_string(), indices)])
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(n, _)| n.as_str())
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (name, indices)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(".")?;
            }
            f.write_str(name)?;
            if !indices.is_empty() {
                let idx: Vec<String> = indices.iter().map(i64::to_string).collect();
                write!(f, "[{}]", idx.join(","))?;
            }
        }
        Ok(())
    }
}

/// How one pass renamed variables.
#[derive(Clone, Debug, PartialEq)]
pub enum NameStep {
    /// A variable nested in records became a flat variable. `containers`
    /// holds one size per container index, outermost first; `leaf_dims`
    /// the variable's own sizes. The container indices and the first leaf
    /// index are linearized, 1-based and row-major.
    Flatten { signature: Vec<String>, target: String, containers: Vec<Expr>, leaf_dims: Vec<Expr> },
    /// Enumeration values became their 1-based positions.
    EnumsToPositions,
    /// A matrix became a vector: `m[i,j]` is `m[(i-1)*cols+j]`.
    MatrixToVector { name: String, cols: Expr },
}

/// Correspondence between the variables of a pass's input and output.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct NameMap {
    pub steps: Vec<NameStep>,
}

/// 1-based row-major position of `indices` within `sizes`.
pub fn linearize(indices: &[i64], sizes: &[i64]) -> i64 {
    let mut acc = 0;
    for (i, n) in indices.iter().zip(sizes) {
        acc = acc * n + (i - 1);
    }
    acc + 1
}

impl NameMap {
    pub fn identity() -> Self {
        NameMap::default()
    }

    pub fn push(&mut self, step: NameStep) {
        self.steps.push(step);
    }

    pub fn extend(&mut self, other: NameMap) {
        self.steps.extend(other.steps);
    }

    pub fn is_identity(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn maps_enums(&self) -> bool {
        self.steps.contains(&NameStep::EnumsToPositions)
    }

    /// The output-side cell for `cell`; sizes are evaluated in `env`.
    pub fn translate(&self, cell: &Cell, env: &ConstEnv) -> Result<Cell, EvalError> {
        let mut cell = cell.clone();
        for step in &self.steps {
            cell = apply(step, cell, env)?;
        }
        Ok(cell)
    }
}

fn apply(step: &NameStep, cell: Cell, env: &ConstEnv) -> Result<Cell, EvalError> {
    match step {
        NameStep::EnumsToPositions => Ok(cell),
        NameStep::MatrixToVector { name, cols } => {
            let Some((last, indices)) = cell.0.last() else { return Ok(cell) };
            if last != name || indices.len() != 2 {
                return Ok(cell);
            }
            let cols = env.eval_int(cols)?;
            let index = (indices[0] - 1) * cols + indices[1];
            let mut steps = cell.0;
            steps.last_mut().unwrap().1 = vec![index];
            Ok(Cell(steps))
        }
        NameStep::Flatten { signature, target, containers, leaf_dims } => {
            if !cell.names().eq(signature.iter().map(String::as_str)) {
                return Ok(cell);
            }
            let (leaf, outer) = cell.0.split_last().unwrap();
            let mut indices: Vec<i64> = outer.iter().flat_map(|(_, i)| i.iter().copied()).collect();
            if indices.len() != containers.len() || leaf.1.len() != leaf_dims.len() {
                return Ok(cell);
            }
            let mut sizes =
                containers.iter().map(|e| env.eval_int(e)).collect::<Result<Vec<_>, _>>()?;
            let mut rest = Vec::new();
            if let Some((first, others)) = leaf.1.split_first() {
                indices.push(*first);
                sizes.push(env.eval_int(&leaf_dims[0])?);
                rest.extend_from_slice(others);
            }
            let flat = if indices.is_empty() {
                Vec::new()
            } else {
                let mut v = vec![linearize(&indices, &sizes)];
                v.extend(rest);
                v
            };
            Ok(Cell(vec![(target.clone(), flat)]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linearization_is_one_based_row_major() {
        assert_eq!(linearize(&[1, 1], &[4, 3]), 1);
        assert_eq!(linearize(&[2, 3], &[3, 4]), 7);
        assert_eq!(linearize(&[4, 3], &[4, 3]), 12);
        assert_eq!(linearize(&[2, 1, 2], &[2, 2, 2]), 6);
    }

    #[test]
    fn flatten_step_translates_nested_cells() {
        let mut env = ConstEnv::default();
        env.bind_int("g", 3);
        let map = NameMap {
            steps: vec![NameStep::Flatten {
                signature: vec!["weeks".into(), "groups".into(), "players".into()],
                target: "weeks_groups_players".into(),
                containers: vec![Expr::int(4), Expr::name("g")],
                leaf_dims: vec![],
            }],
        };
        let cell = Cell(vec![
            ("weeks".into(), vec![2]),
            ("groups".into(), vec![3]),
            ("players".into(), vec![]),
        ]);
        assert_eq!(map.translate(&cell, &env).unwrap(), Cell::indexed("weeks_groups_players", vec![6]));
        let other = Cell::scalar("x");
        assert_eq!(map.translate(&other, &env).unwrap(), other);
    }

    #[test]
    fn cells_print_as_paths() {
        let cell = Cell(vec![("r".into(), vec![1]), ("m".into(), vec![2, 3])]);
        assert_eq!(cell.to_string(), "r[1].m[2,3]");
    }
}
