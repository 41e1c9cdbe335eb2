//! Versioned JSON/CSV envelopes for command output.

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub const SCHEMA_VERSION: &str = "1";

/// Every report embeds the resolved configuration, so its numbers can be regenerated.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: String,
    pub config: Value,
    pub result: Value,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize, result: impl Serialize) -> Result<Self> {
        Ok(Self {
            schema: SCHEMA_VERSION,
            command: command.into(),
            config: serde_json::to_value(config)?,
            result: serde_json::to_value(result)?,
        })
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable");
        s.push('\n');
        s
    }
}

/// Flat table with a header; the first two columns are always `schema` and `command`.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: vec![],
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self, command: &str) -> Result<String> {
        let mut w = csv::Writer::from_writer(vec![]);
        let mut header = vec!["schema".to_string(), "command".to_string()];
        header.extend(self.header.iter().cloned());
        w.write_record(&header)?;
        for r in &self.rows {
            let mut row = vec![SCHEMA_VERSION.to_string(), command.to_string()];
            row.extend(r.iter().cloned());
            w.write_record(&row)?;
        }
        let bytes = w.into_inner().map_err(|e| std::io::Error::other(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

/// Shortest round-trip formatting, as used in every CSV cell.
pub fn num(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        v.to_string()
    }
}
