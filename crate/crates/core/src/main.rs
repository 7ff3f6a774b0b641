use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use cpforge::oracle::{format_assignment, Instance};
use cpforge::pipeline::{
    bench, check_source_language, check_sources, parse_chain, run, solve_sources, table2_csv, Family,
    PipelineConfig, PipelineError, SourceText, Target,
};
use cpforge::Problem;

#[derive(Parser)]
#[command(name = "cpforge", version, about = "Transpile object-oriented constraint models to ECLiPSe")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a pass chain and write the target program.
    Transform {
        /// TOML file with source, data, target, chain, out and report keys.
        #[arg(long, conflicts_with_all = ["model", "data", "to", "chain", "out", "report"])]
        config: Option<PathBuf>,
        #[arg(long, default_value = "scomma")]
        from: String,
        #[arg(long, required_unless_present = "config")]
        model: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// eclipse or pivot
        #[arg(long)]
        to: Option<String>,
        /// Comma-separated pass names, run in order.
        #[arg(long)]
        chain: Option<String>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Timing report, as CSV.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Parse, inject and check a model; list its problems.
    Check { model: PathBuf, data: Option<PathBuf> },
    /// Enumerate every solution of a small model.
    Solve {
        model: PathBuf,
        data: Option<PathBuf>,
        /// Largest number of candidate assignments to try.
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Time the chain on generated instances of increasing size.
    Bench {
        #[arg(long)]
        family: String,
        /// Comma-separated instance sizes.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<u32>,
        #[arg(long, default_value = "")]
        chain: String,
        #[arg(long, default_value = "eclipse")]
        to: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

fn print_problems(problems: &[Problem]) {
    for p in problems {
        eprintln!("{p}");
    }
}

fn execute(command: Command) -> Result<ExitCode, PipelineError> {
    match command {
        Command::Transform { config, from, model, data, to, chain, out, report } => {
            let config = match config {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| PipelineError::Io { path: path.clone(), message: e.to_string() })?;
                    PipelineConfig::from_toml(&text)?
                }
                None => {
                    check_source_language(&from)?;
                    PipelineConfig {
                        source: model.expect("required by clap"),
                        data,
                        target: to.as_deref().unwrap_or("eclipse").parse::<Target>()?,
                        chain: parse_chain(chain.as_deref().unwrap_or(""))?,
                        out,
                        report,
                    }
                }
            };
            let result = run(&config)?;
            print_problems(&result.problems);
            if config.out.is_none() {
                print!("{}", result.text);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { model, data } => {
            let problems = check_sources(&SourceText::read(&model, data.as_deref())?)?;
            for p in &problems {
                println!("{p}");
            }
            Ok(if problems.iter().any(Problem::is_error) { ExitCode::from(1) } else { ExitCode::SUCCESS })
        }
        Command::Solve { model, data, cap } => {
            let mut inst = Instance::default();
            if let Some(cap) = cap {
                inst.max_space = cap;
            }
            let found = solve_sources(&SourceText::read(&model, data.as_deref())?, &inst)?;
            for a in found.iter() {
                println!("{}", format_assignment(a));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Bench { family, sizes, chain, to, report } => {
            let rows = bench(family.parse::<Family>()?, &sizes, &parse_chain(&chain)?, to.parse()?)?;
            let csv = table2_csv(&rows);
            match report {
                Some(path) => std::fs::write(&path, csv)
                    .map_err(|e| PipelineError::Io { path: path.clone(), message: e.to_string() })?,
                None => print!("{csv}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(64),
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            match &e {
                PipelineError::Source(problems) => print_problems(problems),
                other => eprintln!("cpforge: {other}"),
            }
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
