//! Generated instance families and the size sweep over them.

use std::str::FromStr;

use crate::passes::PassId;

use super::{run_sources, PipelineError, SourceText, StageReport, Target};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// Pairwise n-queens, one variable per column.
    NQueens,
    /// Social golfers with 3 groups of 3 over `size` weeks.
    Golfers,
}

impl FromStr for Family {
    type Err = PipelineError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "nqueens" | "queens" => Ok(Family::NQueens),
            "golfers" => Ok(Family::Golfers),
            other => Err(PipelineError::Usage(format!("unknown family `{other}` (expected nqueens or golfers)"))),
        }
    }
}

const QUEENS: &str = "\
main class Queens {
 int q[n] in [1, n];
 constraint noAttack {
  forall(i in 1..n) {
   forall(j in i+1..n) {
    q[i] != q[j];
    q[i] - q[j] != j - i;
    q[j] - q[i] != j - i;
   }
  }
 }
}
";

const GOLFERS: &str = include_str!("../../../../corpus/golfers.scm");

/// Source text of one instance.
pub fn generate(family: Family, size: u32) -> SourceText {
    match family {
        Family::NQueens => {
            SourceText::new("queens.scm", QUEENS, "queens.scd", &format!("int n := {size};\n"))
        }
        Family::Golfers => SourceText::new(
            "golfers.scm",
            GOLFERS,
            "golfers.scd",
            &format!(
                "enum Name := {{p1,p2,p3,p4,p5,p6,p7,p8,p9}};\nint s := 3;\nint w := {size};\nint g := 3;\n"
            ),
        ),
    }
}

fn row_name(family: Family, size: u32) -> String {
    match family {
        Family::NQueens => format!("{size}-Queens"),
        Family::Golfers => format!("{size}-Weeks-Golfers"),
    }
}

/// Runs `chain` on each size in order. For the ECLiPSe target the passes
/// that target needs are put in front of the chain when it lacks them.
pub fn bench(family: Family, sizes: &[u32], chain: &[PassId], target: Target) -> Result<Vec<StageReport>, PipelineError> {
    let mut full = Vec::new();
    if target == Target::Eclipse {
        for p in [PassId::FlattenClasses, PassId::FlattenRecords, PassId::RemoveEnums] {
            if !chain.contains(&p) {
                full.push(p);
            }
        }
    }
    full.extend_from_slice(chain);
    sizes
        .iter()
        .map(|&n| {
            let mut out = run_sources(&generate(family, n), target, &full)?;
            out.report.problem = row_name(family, n);
            Ok(out.report)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::table2_csv;

    #[test]
    fn queens_output_grows_quadratically() {
        let rows = bench(Family::NQueens, &[5, 10], &[PassId::RemoveIf, PassId::UnrollLoops], Target::Eclipse).unwrap();
        assert_eq!(rows.len(), 2);
        let ratio = rows[1].output_lines as f64 / rows[0].output_lines as f64;
        assert!((3.5..=4.5).contains(&ratio), "{ratio}");
        assert_eq!(rows[0].problem, "5-Queens");
    }

    #[test]
    fn empty_sweep_is_an_empty_table() {
        let rows = bench(Family::NQueens, &[], &[], Target::Eclipse).unwrap();
        assert!(rows.is_empty());
        assert_eq!(table2_csv(&rows).lines().count(), 1);
    }

    #[test]
    fn golfers_family_runs() {
        let rows = bench(Family::Golfers, &[2, 3], &[], Target::Eclipse).unwrap();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].output_lines, rows[1].output_lines);
    }
}
