//! Rendering of command results as versioned JSON or aligned text tables.
//!
//! JSON objects are emitted with sorted keys, so identical results always
//! produce identical bytes.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::admissible::Status;
use crate::error::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Table,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: String,
    pub body: Value,
    pub table: String,
    /// Some part of the result was cut short by a cap.
    pub partial: bool,
}

impl Report {
    pub fn new<T: Serialize>(command: &str, body: &T, table: String) -> Result<Self> {
        let body = serde_json::to_value(body).map_err(|e| Error::Internal(format!("serialization: {e}")))?;
        Ok(Report {
            command: command.to_string(),
            body,
            table,
            partial: false,
        })
    }

    pub fn with_partial(mut self, partial: bool) -> Self {
        self.partial = partial;
        self
    }

    /// The body's fields alongside `schema_version`, `command` and `partial`.
    pub fn to_value(&self) -> Value {
        let mut obj = Map::new();
        match &self.body {
            Value::Object(fields) => obj.extend(fields.clone()),
            other => {
                obj.insert("result".into(), other.clone());
            }
        }
        obj.insert("schema_version".into(), SCHEMA_VERSION.into());
        obj.insert("command".into(), self.command.clone().into());
        obj.insert("partial".into(), self.partial.into());
        Value::Object(obj)
    }

    pub fn json(&self) -> String {
        serde_json::to_string_pretty(&self.to_value()).expect("a Value always serializes")
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.json(),
            Format::Table => self.table.clone(),
        }
    }
}

/// Left-aligned columns separated by two spaces.
pub fn aligned(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(c, s)| format!("{s:<w$}", w = widths[c]))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

pub fn status_symbol(s: Status) -> &'static str {
    match s {
        Status::Yes => "Y",
        Status::No => "N",
        Status::Unknown => "?",
    }
}

/// The `(m, n)` grid of combined `A_1 x A_2` statuses, followed by a line
/// counting the excluded indices in each direction.
pub fn verdict_grid(a1: &[(usize, Status)], a2: &[(usize, Status)]) -> String {
    let mut rows = vec![std::iter::once("m\\n".to_string())
        .chain(a2.iter().map(|(n, _)| n.to_string()))
        .chain(std::iter::once("A1".to_string()))
        .collect::<Vec<_>>()];
    for &(m, s1) in a1 {
        let mut row = vec![m.to_string()];
        for &(_, s2) in a2 {
            let s = match (s1, s2) {
                (Status::No, _) | (_, Status::No) => Status::No,
                (Status::Yes, Status::Yes) => Status::Yes,
                _ => Status::Unknown,
            };
            row.push(status_symbol(s).into());
        }
        row.push(status_symbol(s1).into());
        rows.push(row);
    }
    rows.push(
        std::iter::once("A2".to_string())
            .chain(a2.iter().map(|(_, s)| status_symbol(*s).to_string()))
            .collect(),
    );
    let count = |v: &[(usize, Status)], s: Status| v.iter().filter(|(_, x)| *x == s).count();
    let mut out = aligned(&rows);
    out.push_str(&format!(
        "cofiniteness: A1 excludes {} (unknown {}) of {}, A2 excludes {} (unknown {}) of {}\n",
        count(a1, Status::No),
        count(a1, Status::Unknown),
        a1.len(),
        count(a2, Status::No),
        count(a2, Status::Unknown),
        a2.len()
    ));
    out
}

pub fn gleason_lines(results: &[(usize, bool)]) -> String {
    results.iter().map(|(n, s)| format!("n={n} squarefree={s}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct P {
        n: usize,
        m: usize,
    }

    #[test]
    fn json_is_sorted_and_versioned() {
        let r = Report::new("portrait", &P { n: 3, m: 0 }, String::new()).unwrap();
        let v: Value = serde_json::from_str(&r.json()).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!((v["m"].as_u64(), v["n"].as_u64()), (Some(0), Some(3)));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(r.json(), r.clone().json());
    }

    #[test]
    fn tables() {
        let t = aligned(&[vec!["a".into(), "bbb".into()], vec!["cc".into(), "d".into()]]);
        assert_eq!(t, "a   bbb\ncc  d\n");
        assert_eq!(
            gleason_lines(&[(1, true), (2, true)]),
            "n=1 squarefree=true\nn=2 squarefree=true\n"
        );
        let g = verdict_grid(
            &[(0, Status::No), (1, Status::Yes)],
            &[(1, Status::Yes), (2, Status::Unknown)],
        );
        assert!(g.contains("1    Y  ?  Y"), "{g}");
        assert!(g.ends_with("A1 excludes 1 (unknown 0) of 2, A2 excludes 0 (unknown 1) of 2\n"));
    }
}
