use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use poisfol_cli::{bundled, Format, RunError, RunOptions};

#[derive(Parser)]
#[command(name = "poisfol", version, about = "Deformation calculus for regular Poisson structures on tori")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Text,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Text => Format::Text,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file or a bundled example and print its report.
    Run {
        /// Path to a scenario JSON file.
        #[arg(long, conflicts_with = "example", required_unless_present = "example")]
        scenario: Option<PathBuf>,
        /// Name of a bundled scenario (see `list-examples`).
        #[arg(long)]
        example: Option<String>,
        /// Fourier box bound used by exactness decisions.
        #[arg(long = "box", value_name = "N")]
        box_bound: Option<i32>,
        /// Run tasks concurrently; report order is unchanged.
        #[arg(long)]
        parallel: bool,
        /// Seed for randomized tasks, overriding the scenario.
        #[arg(long)]
        seed: Option<u64>,
        /// Decide exactness tasks without an explicit complex in the full complex.
        #[arg(long)]
        full_complex: bool,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        /// Write the report to a file instead of standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// List the bundled scenarios.
    ListExamples {
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

fn fail(e: RunError) -> ExitCode {
    eprintln!("poisfol: {e}");
    ExitCode::from(e.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match cli.command {
        Command::ListExamples { format } => {
            match format {
                FormatArg::Text => {
                    let width = bundled::SCENARIOS.iter().map(|b| b.name.len()).max().unwrap_or(0);
                    for b in bundled::SCENARIOS {
                        println!("{:<width$}  {}", b.name, b.description());
                    }
                }
                FormatArg::Json => {
                    let list: Vec<_> = bundled::SCENARIOS
                        .iter()
                        .map(|b| serde_json::json!({ "name": b.name, "description": b.description() }))
                        .collect();
                    println!("{}", serde_json::to_string_pretty(&list).expect("list serializes"));
                }
            }
            ExitCode::SUCCESS
        }
        Command::Run { scenario, example, box_bound, parallel, seed, full_complex, format, output } => {
            let text = match (scenario, example) {
                (Some(path), _) => match std::fs::read_to_string(&path) {
                    Ok(t) => t,
                    Err(e) => return fail(RunError::Usage(format!("cannot read {}: {e}", path.display()))),
                },
                (None, Some(name)) => match bundled::find(&name) {
                    Some(b) => b.source.to_string(),
                    None => return fail(RunError::Usage(format!("no bundled example named {name:?}"))),
                },
                (None, None) => return fail(RunError::Usage("one of --scenario or --example is required".into())),
            };
            let opts = RunOptions { box_bound, parallel, seed, full_complex };
            let report = match poisfol_cli::run_text(&text, &opts) {
                Ok(r) => r,
                Err(e) => return fail(e),
            };
            let rendered = report.render(format.into());
            match output {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, rendered) {
                        return fail(RunError::Usage(format!("cannot write {}: {e}", path.display())));
                    }
                }
                None => {
                    // A closed pipe on stdout is not an error worth reporting.
                    let _ = std::io::stdout().write_all(rendered.as_bytes());
                }
            }
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
