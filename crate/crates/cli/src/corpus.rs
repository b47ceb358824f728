//! Worked examples shipped with the tool, run as a regression suite.

use clap::Parser;
use rayon::prelude::*;

use crate::commands::{run_command, Cli, Flags};
use crate::document::Document;
use crate::report::{CorpusEntry, Report, Status};

/// Embedded example files by name.
pub const FILES: &[(&str, &str)] = &[
    ("trivial.kp", include_str!("../corpus/trivial.kp")),
    (
        "two_generators.kp",
        include_str!("../corpus/two_generators.kp"),
    ),
    (
        "change_of_generators.kp",
        include_str!("../corpus/change_of_generators.kp"),
    ),
    (
        "redundant_generator.kp",
        include_str!("../corpus/redundant_generator.kp"),
    ),
    (
        "subalgebra_three.kp",
        include_str!("../corpus/subalgebra_three.kp"),
    ),
    (
        "subalgebra_four.kp",
        include_str!("../corpus/subalgebra_four.kp"),
    ),
    ("direct_sum.kp", include_str!("../corpus/direct_sum.kp")),
    ("tensor.kp", include_str!("../corpus/tensor.kp")),
];

/// Command lines with the status each must produce.
pub const ENTRIES: &[(&str, Status)] = &[
    ("solve-eta trivial.kp --kp K", Status::Pass),
    ("verify trivial.kp --kp Wrong", Status::Fail),
    ("solve-eta two_generators.kp --kp K", Status::Pass),
    ("verify two_generators.kp --kp K", Status::Pass),
    (
        "tensors two_generators.kp --kp K --element x*y",
        Status::Pass,
    ),
    ("verify two_generators.kp --kp L", Status::Pass),
    ("verify change_of_generators.kp --kp Kp", Status::Pass),
    ("check-hom change_of_generators.kp --hom phi", Status::Pass),
    ("check-iso change_of_generators.kp --hom phi", Status::Pass),
    (
        "check-eta-transport change_of_generators.kp --hom phi",
        Status::Pass,
    ),
    ("image-sub change_of_generators.kp --hom phi", Status::Pass),
    ("check-iso change_of_generators.kp --hom bad", Status::Fail),
    ("verify redundant_generator.kp --kp Kr", Status::Pass),
    ("check-hom redundant_generator.kp --hom phi", Status::Pass),
    (
        "check-eta-transport redundant_generator.kp --hom phi",
        Status::Pass,
    ),
    ("verify subalgebra_three.kp --kp Kb", Status::Pass),
    (
        "check-sub subalgebra_three.kp --sub K --sup Kb",
        Status::Pass,
    ),
    (
        "check-sub subalgebra_three.kp --sub Kbad --sup Kb",
        Status::Fail,
    ),
    ("verify subalgebra_four.kp --kp Kb", Status::Pass),
    (
        "check-sub subalgebra_four.kp --sub K --sup Kb",
        Status::Pass,
    ),
    (
        "check-sub subalgebra_four.kp --sub Kbad --sup Kb",
        Status::Fail,
    ),
    ("check-poisson direct_sum.kp --algebra R", Status::Pass),
    ("dsum direct_sum.kp --left K --right S", Status::Pass),
    ("tprod tensor.kp --left K --right L", Status::Pass),
    ("tprod tensor.kp --left K --right N", Status::Unsupported),
];

pub fn source(file: &str) -> Option<&'static str> {
    FILES.iter().find(|(n, _)| *n == file).map(|(_, s)| *s)
}

fn run_entry(line: &str, expected: Status) -> CorpusEntry {
    let args: Vec<String> = line.split_whitespace().map(String::from).collect();
    let cli = Cli::try_parse_from(std::iter::once("kpw".to_string()).chain(args.iter().cloned()))
        .unwrap_or_else(|e| panic!("corpus entry `{line}` does not parse: {e}"));
    let file = cli
        .command
        .file()
        .expect("corpus entries read a file")
        .to_string_lossy()
        .into_owned();
    let src =
        source(&file).unwrap_or_else(|| panic!("corpus entry `{line}` names an unknown file"));
    let doc = Document::parse(src).unwrap_or_else(|d| panic!("{}", d.render(src, &file)));
    let flags = Flags {
        assume_poisson: cli.assume_poisson,
    };
    let mut report = run_command(&doc, &cli.command, flags)
        .unwrap_or_else(|e| panic!("corpus entry `{line}` failed on input: {e}"));
    report.report.document = None;
    let report = report.report;
    CorpusEntry {
        file,
        args,
        expected,
        ok: report.status == expected,
        report,
    }
}

/// Runs every entry, in parallel when `threads` allows, and reports them in
/// table order.
pub fn run(threads: Option<usize>) -> Report {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().expect("thread pool");
    let started = std::time::Instant::now();
    let entries: Vec<CorpusEntry> = pool.install(|| {
        ENTRIES
            .par_iter()
            .map(|(line, expected)| run_entry(line, *expected))
            .collect()
    });
    let mismatched: Vec<&CorpusEntry> = entries.iter().filter(|e| !e.ok).collect();
    let mut report = if mismatched.is_empty() {
        Report::pass()
    } else {
        let mut r = Report::new(Status::Fail);
        r.witness = mismatched.iter().find_map(|e| e.report.witness.clone());
        for e in &mismatched {
            r = r.note(format!(
                "{} {}: expected {}, got {}",
                e.file,
                e.args.join(" "),
                e.expected.as_str(),
                e.report.status.as_str()
            ));
        }
        r
    };
    report.command = "corpus".into();
    report = report.value(
        "entries",
        crate::report::Value::Text(format!(
            "{} of {} as expected",
            entries.len() - mismatched.len(),
            entries.len()
        )),
    );
    report.entries = Some(entries);
    report.timing.micros = started.elapsed().as_micros() as u64;
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_file_parses() {
        for (name, src) in FILES {
            Document::parse(src).unwrap_or_else(|d| panic!("{}", d.render(src, name)));
        }
    }

    #[test]
    fn corpus_matches_expectations() {
        let r = run(Some(2));
        let bad: Vec<String> = r
            .entries
            .as_ref()
            .unwrap()
            .iter()
            .filter(|e| !e.ok)
            .map(|e| e.report.to_text())
            .collect();
        assert!(bad.is_empty(), "{}", bad.join("\n"));
        assert_eq!(r.status, Status::Pass);
    }
}
