use std::process::ExitCode;

use clap::Parser;
use kp_cli::commands::{run_command, Cli, Command, Flags, InputError};
use kp_cli::corpus;
use kp_cli::document::Document;
use kp_cli::print;
use kp_cli::report::{Report, SCHEMA};
use serde::Serialize;

const INPUT_ERROR: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            if cli.json {
                let out = ErrorReport {
                    schema: SCHEMA,
                    command: cli.command.name(),
                    error: ErrorBody {
                        message: e.message,
                        line: e.span.map(|s| s.line),
                        column: e.span.map(|s| s.col),
                    },
                };
                println!("{}", serde_json::to_string_pretty(&out).expect("json"));
            } else {
                eprint!("{}", e.rendered);
            }
            ExitCode::from(INPUT_ERROR)
        }
    }
}

#[derive(Serialize)]
struct ErrorReport {
    schema: u32,
    command: &'static str,
    error: ErrorBody,
}

#[derive(Serialize)]
struct ErrorBody {
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    column: Option<usize>,
}

struct Failure {
    message: String,
    span: Option<kp_cli::syntax::Span>,
    rendered: String,
}

impl From<InputError> for Failure {
    fn from(e: InputError) -> Self {
        let rendered = format!("error: {}\n", e.message);
        Failure {
            message: e.message,
            span: e.span,
            rendered,
        }
    }
}

fn threads() -> Option<usize> {
    std::env::var("KPW_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .filter(|&n| n > 0)
}

fn run(cli: &Cli) -> Result<Report, Failure> {
    if let Command::Corpus = cli.command {
        return Ok(corpus::run(threads()));
    }
    let path = cli
        .command
        .file()
        .expect("every other command reads a file");
    let name = path.display().to_string();
    let src = std::fs::read_to_string(path)
        .map_err(|e| Failure::from(InputError::new(format!("{name}: {e}"))))?;
    let doc = Document::parse(&src).map_err(|d| Failure {
        message: d.message.clone(),
        span: Some(d.span),
        rendered: d.render(&src, &name),
    })?;
    let outcome = run_command(
        &doc,
        &cli.command,
        Flags {
            assume_poisson: cli.assume_poisson,
        },
    )?;
    let mut report = outcome.report;
    if let (Some(out), Some(doc)) = (cli.command.out(), &outcome.output) {
        std::fs::write(out, print::document(doc))
            .map_err(|e| Failure::from(InputError::new(format!("{}: {e}", out.display()))))?;
        report.document = None;
        report = report.note(format!("wrote {}", out.display()));
    }
    Ok(report)
}
