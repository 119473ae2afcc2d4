//! Text renderings of a [`ThresholdTable`].

use std::fmt::Write;

use riskgame_core::analysis::ThresholdTable;
use serde::{Deserialize, Serialize};

use crate::document::{thresholds_grid, to_canonical_json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TableFormat {
    Ascii,
    Csv,
    Json,
}

/// The JSON form; `thresholds` has the same layout as the policy document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableDocument {
    pub n: u32,
    pub thresholds: Vec<Vec<u32>>,
}

impl TableDocument {
    pub fn new(table: &ThresholdTable) -> Self {
        TableDocument {
            n: table.n(),
            thresholds: thresholds_grid(table),
        }
    }
}

pub fn render(table: &ThresholdTable, format: TableFormat) -> String {
    match format {
        TableFormat::Ascii => ascii(table),
        TableFormat::Csv => csv(table),
        TableFormat::Json => to_canonical_json(&TableDocument::new(table)),
    }
}

/// Rows are the points player 1 needs, columns the points the opponent needs.
pub fn ascii(table: &ThresholdTable) -> String {
    let n = table.n();
    let width = n.to_string().len().max(2);
    let mut out = String::new();
    writeln!(out, "Coins to toss before banking").unwrap();
    writeln!(
        out,
        "rows: points player 1 needs, columns: points opponent needs"
    )
    .unwrap();
    write!(out, "{:>width$} |", "").unwrap();
    for s in 2..=n {
        write!(out, " {s:>width$}").unwrap();
    }
    out.push('\n');
    writeln!(
        out,
        "{}",
        "-".repeat(width + 2 + (n as usize - 1) * (width + 1))
    )
    .unwrap();
    for (r, row) in (2..=n).zip(table.rows()) {
        write!(out, "{r:>width$} |").unwrap();
        for t in row {
            write!(out, " {t:>width$}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn csv(table: &ThresholdTable) -> String {
    let n = table.n();
    let mut out = String::from("r\\s");
    for s in 2..=n {
        write!(out, ",{s}").unwrap();
    }
    out.push('\n');
    for (r, row) in (2..=n).zip(table.rows()) {
        write!(out, "{r}").unwrap();
        for t in row {
            write!(out, ",{t}").unwrap();
        }
        out.push('\n');
    }
    out
}

/// Reads the grid back out of [`ascii`] or [`csv`] output.
pub fn parse_grid(text: &str) -> Vec<Vec<u32>> {
    let boxed = text.contains('|');
    let mut rows = Vec::new();
    for line in text.lines() {
        let cells: Vec<&str> = if boxed {
            match line.split_once('|') {
                Some((label, rest)) if !label.trim().is_empty() => {
                    rest.split_whitespace().collect()
                }
                _ => continue,
            }
        } else if line.contains(',') && !line.starts_with("r\\s") {
            line.split(',').skip(1).collect()
        } else {
            continue;
        };
        rows.push(
            cells
                .iter()
                .map(|c| c.trim().parse().expect("numeric cell"))
                .collect(),
        );
    }
    rows
}
