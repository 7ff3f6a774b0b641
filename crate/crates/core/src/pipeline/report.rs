//! Per-stage timings and their CSV tables.

use std::fmt::Write;
use std::time::Duration;

use crate::passes::PassId;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    /// Source text to source syntax tree.
    Inject,
    /// Source syntax tree to checked pivot model.
    SourceToPivot,
    Pass(PassId),
    /// Pivot model to target syntax tree.
    PivotToTarget,
    /// Target syntax tree to text, written out.
    Extract,
}

impl Stage {
    pub fn label(self) -> &'static str {
        match self {
            Stage::Inject => "Inject",
            Stage::SourceToPivot => "s-to-P",
            Stage::Pass(p) => p.token(),
            Stage::PivotToTarget => "P-to-E",
            Stage::Extract => "Extract",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageReport {
    pub problem: String,
    pub input_lines: usize,
    pub output_lines: usize,
    pub stages: Vec<(Stage, Duration)>,
}

impl StageReport {
    pub fn total(&self) -> Duration {
        self.stages.iter().map(|(_, d)| *d).sum()
    }

    fn stage(&self, s: Stage) -> Option<Duration> {
        self.stages.iter().find(|(t, _)| *t == s).map(|(_, d)| *d)
    }

    /// Sum over the given passes, `None` when none of them ran.
    fn passes(&self, ids: &[PassId]) -> Option<Duration> {
        let found: Vec<Duration> = ids.iter().filter_map(|p| self.stage(Stage::Pass(*p))).collect();
        if found.is_empty() {
            None
        } else {
            Some(found.iter().sum())
        }
    }
}

fn secs(d: Option<Duration>) -> String {
    match d {
        Some(d) => format!("{:.3}", d.as_secs_f64()),
        None => "-".into(),
    }
}

const COMP: [PassId; 2] = [PassId::FlattenClasses, PassId::FlattenRecords];
const FORALL: [PassId; 2] = [PassId::RemoveIf, PassId::UnrollLoops];

pub const TABLE1_HEADER: &str = "Problems,Lines,Inject,s-to-P,Comp,Enum,P-to-E,Extract,Total,Lines";
pub const TABLE2_HEADER: &str = "Problems,Inject,s-to-P,Comp,Forall,P-to-E,Extract,Total,Lines,Total/Lines";

/// Chain timings with composition flattening (classes and records) and
/// enumeration removal broken out; `-` marks a pass that did not run.
pub fn table1_csv(reports: &[StageReport]) -> String {
    let mut out = format!("{TABLE1_HEADER}\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.input_lines,
            secs(r.stage(Stage::Inject)),
            secs(r.stage(Stage::SourceToPivot)),
            secs(r.passes(&COMP)),
            secs(r.passes(&[PassId::RemoveEnums])),
            secs(r.stage(Stage::PivotToTarget)),
            secs(r.stage(Stage::Extract)),
            secs(Some(r.total())),
            r.output_lines,
        )
        .unwrap();
    }
    out
}

/// Chain timings with loop unrolling (and conditional removal) broken out,
/// and the time spent per generated line.
pub fn table2_csv(reports: &[StageReport]) -> String {
    let mut out = format!("{TABLE2_HEADER}\n");
    for r in reports {
        let ratio = if r.output_lines == 0 {
            "-".to_string()
        } else {
            format!("{:.6}", r.total().as_secs_f64() / r.output_lines as f64)
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            secs(r.stage(Stage::Inject)),
            secs(r.stage(Stage::SourceToPivot)),
            secs(r.passes(&COMP)),
            secs(r.passes(&FORALL)),
            secs(r.stage(Stage::PivotToTarget)),
            secs(r.stage(Stage::Extract)),
            secs(Some(r.total())),
            r.output_lines,
            ratio,
        )
        .unwrap();
    }
    out
}
