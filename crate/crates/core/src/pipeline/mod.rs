//! End-to-end chains: parse, inject, check, refactor, translate, extract.
//!
//! [`run_sources`] works on in-memory text and is what the tests drive;
//! [`run`] adds file reading and writing around it.

mod bench;
mod config;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::backend::{emit, introduce_locals, to_eclipse, BackendError};
use crate::checker::check;
use crate::frontend::{extract_source, inject, parse_data_file, parse_model_file, InjectError, ParseError};
use crate::ir::PivotModel;
use crate::oracle::{solutions, Instance, OracleError, SolutionSet};
use crate::passes::{run_chain, PassError, PassId};
use crate::problem::Problem;

pub use bench::{bench, generate, Family};
pub use config::{check_source_language, parse_chain, PipelineConfig, Target};
pub use report::{table1_csv, table2_csv, Stage, StageReport, TABLE1_HEADER, TABLE2_HEADER};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    /// Syntax, injection or checker errors, with any warnings alongside.
    #[error("the model has errors")]
    Source(Vec<Problem>),
    #[error(transparent)]
    Pass(#[from] PassError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

impl PipelineError {
    /// Process exit status for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Usage(_) | PipelineError::Io { .. } => 64,
            PipelineError::Source(_) => 1,
            PipelineError::Pass(_) | PipelineError::Backend(_) | PipelineError::Oracle(_) => 2,
        }
    }
}

/// A model file and its (possibly empty) data file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceText {
    pub model_file: String,
    pub model: String,
    pub data_file: String,
    pub data: String,
}

impl SourceText {
    pub fn new(model_file: &str, model: &str, data_file: &str, data: &str) -> Self {
        SourceText {
            model_file: model_file.into(),
            model: model.into(),
            data_file: data_file.into(),
            data: data.into(),
        }
    }

    pub fn read(model: &Path, data: Option<&Path>) -> Result<Self, PipelineError> {
        let read = |p: &Path| {
            std::fs::read_to_string(p).map_err(|e| PipelineError::Io { path: p.to_path_buf(), message: e.to_string() })
        };
        Ok(SourceText {
            model_file: model.display().to_string(),
            model: read(model)?,
            data_file: data.map(|d| d.display().to_string()).unwrap_or_default(),
            data: match data {
                Some(d) => read(d)?,
                None => String::new(),
            },
        })
    }

    pub fn line_count(&self) -> usize {
        self.model.lines().count() + self.data.lines().count()
    }
}

fn strip_loc(text: String, loc: &str) -> String {
    text.strip_prefix(&format!("{loc}: ")).map(str::to_string).unwrap_or(text)
}

fn parse_problem(e: ParseError) -> Problem {
    let loc = e.loc.to_string();
    Problem::error(loc.clone(), strip_loc(e.to_string(), &loc))
}

fn inject_problem(e: InjectError) -> Problem {
    let loc = match &e {
        InjectError::UnresolvedName { loc, .. }
        | InjectError::DuplicateName { loc, .. }
        | InjectError::MultipleMain { loc, .. } => loc.clone(),
    };
    Problem::error(loc.clone(), strip_loc(e.to_string(), &loc))
}

/// Parses and injects; syntax and injection errors come back as problems.
fn load(src: &SourceText, report: &mut Vec<(Stage, std::time::Duration)>) -> Result<PivotModel, PipelineError> {
    let t = Instant::now();
    let model = parse_model_file(&src.model_file, &src.model).map_err(|e| PipelineError::Source(vec![parse_problem(e)]));
    let data = parse_data_file(&src.data_file, &src.data).map_err(|e| PipelineError::Source(vec![parse_problem(e)]));
    let (model, data) = (model?, data?);
    report.push((Stage::Inject, t.elapsed()));
    let t = Instant::now();
    let pivot = inject(&model, &data)
        .map_err(|errs| PipelineError::Source(errs.into_iter().map(inject_problem).collect()))?;
    report.push((Stage::SourceToPivot, t.elapsed()));
    Ok(pivot)
}

/// Every problem found by parsing, injecting and checking.
pub fn check_sources(src: &SourceText) -> Result<Vec<Problem>, PipelineError> {
    match load(src, &mut Vec::new()) {
        Ok(model) => Ok(check(&model)),
        Err(PipelineError::Source(problems)) => Ok(problems),
        Err(e) => Err(e),
    }
}

/// Loads and checks a model, failing on any error problem.
pub fn load_checked(src: &SourceText) -> Result<(PivotModel, Vec<Problem>), PipelineError> {
    let mut stages = Vec::new();
    let model = load(src, &mut stages)?;
    let problems = check(&model);
    if problems.iter().any(Problem::is_error) {
        return Err(PipelineError::Source(problems));
    }
    Ok((model, problems))
}

/// Solutions of the source model, as the oracle computes them.
pub fn solve_sources(src: &SourceText, inst: &Instance) -> Result<SolutionSet, PipelineError> {
    let (model, _) = load_checked(src)?;
    Ok(solutions(&model, inst)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutput {
    /// Emitted program, or the pivot model in source syntax.
    pub text: String,
    /// Data part of a pivot extraction; empty for programs.
    pub data: String,
    /// Warnings from the checker and the passes.
    pub problems: Vec<Problem>,
    pub report: StageReport,
}

/// One chain over in-memory sources.
pub fn run_sources(src: &SourceText, target: Target, chain: &[PassId]) -> Result<RunOutput, PipelineError> {
    let mut stages = Vec::new();
    let model = load(src, &mut stages)?;
    let t = Instant::now();
    let mut problems = check(&model);
    if let Some((_, d)) = stages.last_mut() {
        *d += t.elapsed();
    }
    if problems.iter().any(Problem::is_error) {
        return Err(PipelineError::Source(problems));
    }
    let out = run_chain(&model, chain)?;
    problems.extend(out.problems);
    stages.extend(out.timings.iter().map(|(p, d)| (Stage::Pass(*p), *d)));

    let (text, data) = match target {
        Target::Eclipse => {
            let t = Instant::now();
            let ecl = introduce_locals(&to_eclipse(&out.model)?);
            stages.push((Stage::PivotToTarget, t.elapsed()));
            let t = Instant::now();
            let text = emit(&ecl);
            stages.push((Stage::Extract, t.elapsed()));
            (text, String::new())
        }
        Target::Pivot => {
            let t = Instant::now();
            let x = extract_source(&out.model);
            stages.push((Stage::Extract, t.elapsed()));
            (x.model, x.data)
        }
    };
    let report = StageReport {
        problem: out.model.name.clone(),
        input_lines: src.line_count(),
        output_lines: text.lines().count(),
        stages,
    };
    Ok(RunOutput { text, data, problems, report })
}

fn write(path: &Path, text: &str) -> Result<(), PipelineError> {
    std::fs::write(path, text).map_err(|e| PipelineError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads the configured files, runs the chain and writes the output (and
/// report, when asked for). A pivot extraction with data writes the data
/// beside the output, with the `.scd` extension.
pub fn run(config: &PipelineConfig) -> Result<RunOutput, PipelineError> {
    let src = SourceText::read(&config.source, config.data.as_deref())?;
    let mut out = run_sources(&src, config.target, &config.chain)?;
    if let Some(path) = &config.out {
        let t = Instant::now();
        write(path, &out.text)?;
        if !out.data.is_empty() {
            write(&path.with_extension("scd"), &out.data)?;
        }
        if let Some((Stage::Extract, d)) = out.report.stages.last_mut() {
            *d += t.elapsed();
        }
    }
    if let Some(path) = &config.report {
        write(path, &table1_csv(std::slice::from_ref(&out.report)))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golfers() -> SourceText {
        SourceText::new(
            "golfers.scm",
            include_str!("../../../../corpus/golfers.scm"),
            "golfers.scd",
            include_str!("../../../../corpus/golfers.scd"),
        )
    }

    const GOLFERS_CHAIN: [PassId; 3] = [PassId::FlattenClasses, PassId::FlattenRecords, PassId::RemoveEnums];

    #[test]
    fn golfers_report_counts_lines() {
        let out = run_sources(&golfers(), Target::Eclipse, &GOLFERS_CHAIN).unwrap();
        assert_eq!(out.report.problem, "SocialGolfers");
        assert_eq!(out.report.input_lines, 42);
        assert_eq!(out.report.output_lines, 38);
        let labels: Vec<&str> = out.report.stages.iter().map(|(s, _)| s.label()).collect();
        assert_eq!(
            labels,
            ["Inject", "s-to-P", "flatten-classes", "flatten-records", "remove-enums", "P-to-E", "Extract"]
        );
    }

    #[test]
    fn records_before_classes_is_a_pass_error() {
        let err = run_sources(&golfers(), Target::Eclipse, &[PassId::FlattenRecords, PassId::FlattenClasses])
            .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("flatten-records"), "{err}");
    }

    #[test]
    fn incomplete_chain_is_a_backend_error() {
        let err = run_sources(&golfers(), Target::Eclipse, &[PassId::FlattenClasses]).unwrap_err();
        assert!(matches!(err, PipelineError::Backend(_)));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn checker_errors_stop_the_chain() {
        let src = SourceText::new("m.scm", "main class M { int x in [3, 1]; }", "d.scd", "");
        let err = run_sources(&src, Target::Pivot, &[]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        let PipelineError::Source(problems) = err else { panic!() };
        assert_eq!(problems.len(), 1);
        assert!(problems[0].location.starts_with("m.scm:1:"), "{:?}", problems[0]);
    }

    #[test]
    fn syntax_errors_are_problems_with_locations() {
        let src = SourceText::new("m.scm", "main class M {\n int x in [1, ; }", "d.scd", "");
        let problems = check_sources(&src).unwrap();
        assert_eq!(problems.len(), 1);
        assert!(problems[0].location.starts_with("m.scm:2:"), "{}", problems[0]);
        assert!(problems[0].description.starts_with("syntax error"), "{}", problems[0]);
    }

    #[test]
    fn pivot_target_with_empty_chain_reprints_the_source() {
        let out = run_sources(&golfers(), Target::Pivot, &[]).unwrap();
        assert!(out.data.contains("int w := 4;"), "{}", out.data);
        let again = SourceText::new("a.scm", &out.text, "a.scd", &out.data);
        let back = run_sources(&again, Target::Pivot, &[]).unwrap();
        assert_eq!((back.text, back.data), (out.text, out.data));
    }

    #[test]
    fn files_are_written() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("g.scm"), &golfers().model).unwrap();
        std::fs::write(dir.path().join("g.scd"), &golfers().data).unwrap();
        let mut config = PipelineConfig::new(dir.path().join("g.scm"));
        config.data = Some(dir.path().join("g.scd"));
        config.chain = GOLFERS_CHAIN.to_vec();
        config.out = Some(dir.path().join("g.ecl"));
        config.report = Some(dir.path().join("g.csv"));
        run(&config).unwrap();
        let ecl = std::fs::read_to_string(dir.path().join("g.ecl")).unwrap();
        assert!(ecl.starts_with("socialGolfers(L):-"));
        let csv = std::fs::read_to_string(dir.path().join("g.csv")).unwrap();
        assert!(csv.starts_with(TABLE1_HEADER));
        assert!(csv.lines().nth(1).unwrap().starts_with("SocialGolfers,42,"));
        assert!(csv.lines().nth(1).unwrap().ends_with(",38"));
    }

    #[test]
    fn missing_files_are_usage_errors() {
        let err = run(&PipelineConfig::new("/nonexistent/m.scm")).unwrap_err();
        assert_eq!(err.exit_code(), 64);
    }
}
