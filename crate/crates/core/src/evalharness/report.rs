use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::aggregate::AggregateTable;
use super::records::StageRecord;
use super::EvalError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// Picks the format from a file extension; anything but `.json` is CSV.
    pub fn from_path(path: &Path) -> ReportFormat {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

/// JSON report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub table: AggregateTable,
    pub records: Vec<StageRecord>,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Header `group,count,<columns>`, then one line per row.
pub fn table_csv(table: &AggregateTable) -> String {
    let mut out = format!("group,count,{}\n", table.columns.join(","));
    for r in &table.rows {
        let cells: Vec<String> = r.percentages.iter().map(|p| p.fixed2()).collect();
        let _ = writeln!(out, "{},{},{}", csv_field(&r.group), r.count, cells.join(","));
    }
    out
}

pub fn render_report(table: &AggregateTable, records: &[StageRecord], format: ReportFormat) -> String {
    match format {
        ReportFormat::Csv => table_csv(table),
        ReportFormat::Json => {
            let body = EvalReport {
                table: table.clone(),
                records: records.to_vec(),
            };
            serde_json::to_string_pretty(&body).expect("reports serialize") + "\n"
        }
    }
}

pub fn emit_report(
    table: &AggregateTable,
    records: &[StageRecord],
    format: ReportFormat,
    path: impl AsRef<Path>,
) -> Result<(), EvalError> {
    let path = path.as_ref();
    std::fs::write(path, render_report(table, records, format)).map_err(|source| EvalError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Fixed-width text rendering with the shortest percentage form.
pub fn table_text(table: &AggregateTable) -> String {
    let mut header = vec!["group".to_string(), "count".to_string()];
    header.extend(table.columns.iter().cloned());
    let mut lines = vec![header];
    for r in &table.rows {
        let mut l = vec![r.group.clone(), r.count.to_string()];
        l.extend(r.percentages.iter().map(|p| p.to_string()));
        lines.push(l);
    }
    let widths: Vec<usize> = (0..lines[0].len())
        .map(|k| lines.iter().map(|l| l[k].len()).max().unwrap_or(0))
        .collect();
    lines
        .iter()
        .map(|l| {
            l.iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
                + "\n"
        })
        .collect()
}
