use std::fs;
use std::io::{self, Write};

use serde::Serialize;

use crate::args::Format;
use crate::config::Common;
use crate::CliError;

/// Writes `rows` as CSV or as an aligned table, to the output file or stdout.
pub fn emit<R: Serialize>(rows: &[R], common: &Common) -> Result<(), CliError> {
    let csv = prorata::io::to_csv_string(rows)?;
    let text = match common.format {
        Format::Csv => csv,
        Format::Table => render_table(&csv)?,
    };
    match &common.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Runtime(format!("cannot write to stdout: {e}")))
        }
    }
}

fn render_table(csv_text: &str) -> Result<String, CliError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .from_reader(csv_text.as_bytes());
    let rows: Vec<Vec<String>> = reader
        .records()
        .map(|r| r.map(|rec| rec.iter().map(str::to_owned).collect()))
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Runtime(format!("table rendering: {e}")))?;
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for row in &rows {
        let cells: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, &w)| format!("{cell:<w$}"))
            .collect();
        out.push_str(cells.join("  ").trim_end());
        out.push('\n');
    }
    Ok(out)
}
