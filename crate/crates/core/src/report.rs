//! Versioned JSON/CSV reports.
//!
//! JSON keys are sorted, output is compact and every real is printed with 17
//! significant digits, so equal reports serialize to identical bytes.

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::error::{Error, Result};

pub const SCHEMA_VERSION: &str = "1.0.0";

/// Base directory for relative `--out` paths.
pub const OUT_DIR_ENV: &str = "ANTISYM_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Self::Pass
        } else {
            Self::Fail
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CommandEcho {
    pub name: String,
    pub params: Value,
}

/// Flat table used for CSV output.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// `key,value` rows for every scalar leaf of `v`, keys joined by `.`.
    pub fn flatten(v: &Value) -> Self {
        fn walk(prefix: &str, v: &Value, t: &mut Table) {
            let key = |k: &str| {
                if prefix.is_empty() {
                    k.to_string()
                } else {
                    format!("{prefix}.{k}")
                }
            };
            match v {
                Value::Object(map) => map.iter().for_each(|(k, v)| walk(&key(k), v, t)),
                Value::Array(items) => items.iter().enumerate().for_each(|(i, v)| walk(&key(&i.to_string()), v, t)),
                leaf => t.rows.push(vec![prefix.to_string(), scalar_text(leaf)]),
            }
        }
        let mut t = Table::new(["key", "value"]);
        walk("", v, &mut t);
        t
    }
}

fn scalar_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_f64() => fmt_real(n.as_f64().expect("f64")),
        other => other.to_string(),
    }
}

/// Seventeen significant digits in scientific notation.
pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: String,
    pub command: CommandEcho,
    pub timestamp: Option<String>,
    pub seed: Option<u64>,
    pub payload: Value,
    pub verdict: Option<Verdict>,
    #[serde(skip)]
    pub table: Option<Table>,
}

impl Report {
    pub fn new(name: &str, params: Value, payload: Value) -> Self {
        Self {
            schema_version: SCHEMA_VERSION.to_string(),
            command: CommandEcho {
                name: name.to_string(),
                params,
            },
            timestamp: None,
            seed: None,
            payload,
            verdict: None,
            table: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_verdict(mut self, ok: bool) -> Self {
        self.verdict = Some(Verdict::from_bool(ok));
        self
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    /// Stamps the current UTC time in RFC 3339.
    pub fn stamped(mut self) -> Self {
        let now = time::OffsetDateTime::now_utc();
        self.timestamp = now.format(&time::format_description::well_known::Rfc3339).ok();
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Some(Verdict::Fail)
    }

    pub fn to_json(&self) -> String {
        let mut buf = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, RealFormatter);
        self.serialize(&mut ser).expect("Value serialization is infallible");
        String::from_utf8(buf).expect("serde_json emits UTF-8")
    }

    /// The explicit table if one was attached, else the flattened payload.
    pub fn to_csv(&self) -> Result<String> {
        let table = self.table.clone().unwrap_or_else(|| Table::flatten(&self.payload));
        let mut w = csv::Writer::from_writer(Vec::new());
        let csv_err = |e: csv::Error| Error::Output {
            path: "<csv buffer>".into(),
            message: e.to_string(),
        };
        w.write_record(&table.header).map_err(csv_err)?;
        for row in &table.rows {
            w.write_record(row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Output {
            path: "<csv buffer>".into(),
            message: e.to_string(),
        })?;
        Ok(String::from_utf8(bytes).expect("UTF-8 fields"))
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Json => Ok(self.to_json() + "\n"),
            Format::Csv => self.to_csv(),
        }
    }
}

/// Compact JSON with `{:.16e}` reals.
#[derive(Clone, Copy, Debug, Default)]
pub struct RealFormatter;

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_real(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Resolves a relative destination against `ANTISYM_OUT_DIR` when it is set.
pub fn resolve_destination(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(base) if path.is_relative() && !base.is_empty() => PathBuf::from(base).join(path),
        _ => path.to_path_buf(),
    }
}

/// Writes the rendered report to `dest`, or to standard output when `None`.
pub fn emit_report(r: &Report, format: Format, dest: Option<&Path>) -> Result<()> {
    let text = r.render(format)?;
    match dest {
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| Error::Output {
                path: "<stdout>".into(),
                message: e.to_string(),
            })
        }
        Some(p) => {
            let path = resolve_destination(p);
            std::fs::write(&path, text).map_err(|e| Error::Output {
                path: path.display().to_string(),
                message: e.to_string(),
            })
        }
    }
}
