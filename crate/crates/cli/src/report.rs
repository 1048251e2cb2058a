use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = concat!("kakeya-lab ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Plain,
}

/// What a subcommand produced: the full JSON result, a flat table for CSV
/// and plain output, and whether a verified failure was found.
pub struct Output {
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    pub failed: bool,
    /// Preformatted plain text, used instead of the table when present.
    pub text: Option<String>,
}

impl Output {
    pub fn new(result: impl Serialize, header: Vec<&'static str>) -> Self {
        Output {
            result: serde_json::to_value(result).expect("results serialize"),
            header,
            rows: Vec::new(),
            failed: false,
            text: None,
        }
    }

    pub fn row(mut self, row: Vec<String>) -> Self {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
        self
    }

    pub fn failed_if(mut self, failed: bool) -> Self {
        self.failed |= failed;
        self
    }
}

pub fn render(out: &Output, format: Format, config: &Value, wall_ms: Option<u128>) -> String {
    let config_line = serde_json::to_string(config).expect("config serializes");
    match format {
        Format::Json => {
            let mut env = serde_json::Map::new();
            env.insert("version".into(), VERSION.into());
            env.insert("config".into(), config.clone());
            env.insert("result".into(), out.result.clone());
            if let Some(ms) = wall_ms {
                env.insert("wall_ms".into(), (ms as u64).into());
            }
            let mut s = serde_json::to_string_pretty(&Value::Object(env)).expect("report serializes");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = format!("# version {VERSION}\n# config {config_line}\n");
            if let Some(ms) = wall_ms {
                writeln!(s, "# wall_ms {ms}").unwrap();
            }
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.header).expect("in-memory write");
            for r in &out.rows {
                w.write_record(r).expect("in-memory write");
            }
            s.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
            s
        }
        Format::Plain => {
            let mut s = format!("# version {VERSION}\n# config {config_line}\n");
            if let Some(ms) = wall_ms {
                writeln!(s, "# wall_ms {ms}").unwrap();
            }
            if let Some(text) = &out.text {
                s.push_str(text);
            } else if out.rows.len() == 1 {
                let width = out.header.iter().map(|h| h.len()).max().unwrap_or(0);
                for (h, v) in out.header.iter().zip(&out.rows[0]) {
                    writeln!(s, "{h:<width$}  {v}").unwrap();
                }
            } else {
                writeln!(s, "{}", out.header.join("  ")).unwrap();
                for r in &out.rows {
                    writeln!(s, "{}", r.join("  ")).unwrap();
                }
            }
            s
        }
    }
}
