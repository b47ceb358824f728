//! Command reports: JSON wire format and human-readable text.

use std::fmt::Write;

use kp_core::ring::Matrix;
use kp_core::verdict::{Verdict, Witness};
use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Degenerate,
    Unsupported,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Pass | Status::Degenerate => 0,
            Status::Fail => 1,
            Status::Unsupported => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Degenerate => "degenerate",
            Status::Unsupported => "unsupported",
        }
    }
}

/// Counterexample location, 1-based, with the residual in canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessOut {
    pub indices: Vec<usize>,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<String>>>,
}

impl From<&Witness> for WitnessOut {
    fn from(w: &Witness) -> Self {
        WitnessOut {
            indices: w.one_based(),
            residual: w.residual.to_string(),
            matrix: w.matrix.as_ref().map(Matrix::to_strings),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Text(String),
    List(Vec<String>),
    Matrix(Vec<Vec<String>>),
}

impl From<&Matrix> for Value {
    fn from(m: &Matrix) -> Self {
        Value::Matrix(m.to_strings())
    }
}

/// Named values in insertion order, serialized as a JSON object.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Values(pub Vec<(String, Value)>);

impl Serialize for Values {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Timing {
    pub micros: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CorpusEntry {
    pub file: String,
    pub args: Vec<String>,
    pub expected: Status,
    pub ok: bool,
    pub report: Report,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub command: String,
    pub subject: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessOut>,
    pub values: Values,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub entries: Option<Vec<CorpusEntry>>,
    /// Printed output of construction commands.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub document: Option<String>,
    pub timing: Timing,
}

impl Report {
    pub fn new(status: Status) -> Self {
        Report {
            schema: SCHEMA,
            command: String::new(),
            subject: String::new(),
            status,
            eta: None,
            witness: None,
            values: Values::default(),
            notes: Vec::new(),
            entries: None,
            document: None,
            timing: Timing::default(),
        }
    }

    pub fn pass() -> Self {
        Self::new(Status::Pass)
    }

    pub fn fail(w: &Witness) -> Self {
        Self::new(Status::Fail).with_witness(w)
    }

    pub fn unsupported(note: impl Into<String>) -> Self {
        Self::new(Status::Unsupported).note(note)
    }

    pub fn from_verdict(v: &Verdict) -> Self {
        match v {
            Verdict::Pass => Self::pass(),
            Verdict::Fail(w) => Self::fail(w),
        }
    }

    pub fn with_witness(mut self, w: &Witness) -> Self {
        self.witness = Some(w.into());
        self
    }

    pub fn note(mut self, n: impl Into<String>) -> Self {
        self.notes.push(n.into());
        self
    }

    pub fn value(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.values.0.push((name.to_string(), v.into()));
        self
    }

    pub fn eta(mut self, e: impl ToString) -> Self {
        self.eta = Some(e.to_string());
        self
    }

    /// Later verdicts only matter while everything so far passed.
    pub fn and(mut self, v: &Verdict, label: &str) -> Self {
        if self.status == Status::Pass {
            if let Verdict::Fail(w) = v {
                self.status = Status::Fail;
                self.witness = Some(w.into());
                self.notes.push(format!("failed: {label}"));
            }
        }
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        self.write_text(&mut s, "");
        s
    }

    fn write_text(&self, s: &mut String, indent: &str) {
        let subject = if self.subject.is_empty() {
            String::new()
        } else {
            format!(" {}", self.subject)
        };
        let _ = writeln!(
            s,
            "{indent}{}{subject}: {}",
            self.command,
            self.status.as_str()
        );
        let ind = format!("{indent}  ");
        if let Some(e) = &self.eta {
            let _ = writeln!(s, "{ind}eta = {e}");
        }
        if let Some(w) = &self.witness {
            let at: Vec<String> = w.indices.iter().map(ToString::to_string).collect();
            let _ = writeln!(
                s,
                "{ind}witness at ({}): residual {}",
                at.join(","),
                w.residual
            );
        }
        for (k, v) in &self.values.0 {
            match v {
                Value::Text(t) => {
                    let _ = writeln!(s, "{ind}{k} = {t}");
                }
                Value::List(l) => {
                    let _ = writeln!(s, "{ind}{k} = ({})", l.join(", "));
                }
                Value::Matrix(rows) => {
                    let _ = writeln!(s, "{ind}{k} =");
                    for r in text_rows(rows) {
                        let _ = writeln!(s, "{ind}  {r}");
                    }
                }
            }
        }
        for n in &self.notes {
            let _ = writeln!(s, "{ind}note: {n}");
        }
        if let Some(entries) = &self.entries {
            for e in entries {
                let mark = if e.ok { "ok" } else { "MISMATCH" };
                let _ = writeln!(
                    s,
                    "{ind}[{mark}] {} (expected {})",
                    e.args.join(" "),
                    e.expected.as_str()
                );
                e.report.write_text(s, &format!("{ind}    "));
            }
        }
        if let Some(d) = &self.document {
            let _ = writeln!(s, "{ind}document:");
            for l in d.lines() {
                let _ = writeln!(s, "{ind}  {l}");
            }
        }
    }
}

fn text_rows(rows: &[Vec<String>]) -> Vec<String> {
    let cols = rows.first().map_or(0, Vec::len);
    let widths: Vec<usize> = (0..cols)
        .map(|j| rows.iter().map(|r| r[j].chars().count()).max().unwrap_or(0))
        .collect();
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}", w = *w))
                .collect();
            format!("[{}]", cells.join(", "))
        })
        .collect()
}
