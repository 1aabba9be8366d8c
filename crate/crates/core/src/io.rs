//! Line-oriented JSON for meanders and permutations.
//!
//! Each line is one object: `{"v":1,"n":N,"upper":[...],"lower":[...]}` for a
//! meander, `{"v":1,"perm":[...]}` for a permutation, both 1-based. Lines of
//! the form `{"report":{...}}` carry run summaries and are skipped by the
//! readers.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::meander::Meander;
use crate::permutation::Permutation;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeanderLine {
    v: u32,
    n: usize,
    upper: Vec<usize>,
    lower: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PermLine {
    v: u32,
    perm: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Record {
    Meander(Meander),
    Permutation(Permutation),
}

impl Record {
    /// The permutation a record stands for; a meander gives its meandric
    /// permutation.
    pub fn permutation(&self) -> Permutation {
        match self {
            Record::Meander(m) => m.meandric_permutation(),
            Record::Permutation(p) => p.clone(),
        }
    }
}

pub fn meander_to_json(m: &Meander) -> String {
    serde_json::to_string(&MeanderLine {
        v: FORMAT_VERSION,
        n: m.n(),
        upper: m.upper().to_one_based(),
        lower: m.lower().to_one_based(),
    })
    .expect("plain data serializes")
}

pub fn permutation_to_json(p: &Permutation) -> String {
    serde_json::to_string(&PermLine {
        v: FORMAT_VERSION,
        perm: p.values().to_vec(),
    })
    .expect("plain data serializes")
}

pub fn report_to_json<T: Serialize>(report: &T) -> String {
    serde_json::json!({ "report": report }).to_string()
}

/// Parses one line; blank and report lines give `None`.
pub fn parse_record(line: &str) -> Result<Option<Record>> {
    let line = line.trim();
    if line.is_empty() {
        return Ok(None);
    }
    let value: Value = serde_json::from_str(line).map_err(|e| Error::Parse(e.to_string()))?;
    let Value::Object(obj) = &value else {
        return Err(Error::Parse("expected a JSON object".into()));
    };
    if obj.contains_key("report") && obj.len() == 1 {
        return Ok(None);
    }
    match obj.get("v").and_then(Value::as_u64) {
        Some(v) if v == FORMAT_VERSION as u64 => {}
        Some(v) => return Err(Error::Parse(format!("unsupported format version {v}"))),
        None => return Err(Error::Parse("missing format version \"v\"".into())),
    }
    let decode = |e: serde_json::Error| Error::Parse(e.to_string());
    if obj.contains_key("perm") {
        let line: PermLine = serde_json::from_value(value).map_err(decode)?;
        return Ok(Some(Record::Permutation(Permutation::new(line.perm)?)));
    }
    let line: MeanderLine = serde_json::from_value(value).map_err(decode)?;
    if line.upper.len() != 2 * line.n || line.lower.len() != 2 * line.n {
        return Err(Error::Parse(format!(
            "n = {} needs {} points, got {} upper and {} lower",
            line.n,
            2 * line.n,
            line.upper.len(),
            line.lower.len()
        )));
    }
    Ok(Some(Record::Meander(Meander::from_partners(&line.upper, &line.lower)?)))
}

/// Reads every record; errors name the offending line.
pub fn read_records(reader: impl BufRead) -> Result<Vec<Record>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        match parse_record(&line) {
            Ok(Some(r)) => out.push(r),
            Ok(None) => {}
            Err(e) => return Err(Error::Parse(format!("line {}: {e}", i + 1))),
        }
    }
    Ok(out)
}

pub fn write_record(out: &mut impl Write, record: &Record) -> std::io::Result<()> {
    let line = match record {
        Record::Meander(m) => meander_to_json(m),
        Record::Permutation(p) => permutation_to_json(p),
    };
    writeln!(out, "{line}")
}
