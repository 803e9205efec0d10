use std::fs;
use std::path::Path;

use super::{Cell, Method, TableRow};
use crate::error::{NaveError, Result};
use crate::solver::SolveStatus;

pub const CSV_HEADER: [&str; 6] = ["label", "method", "error", "iterations", "time_ms", "status"];

/// Layout of the Markdown rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableKind {
    /// Error and iteration columns per method.
    Methods,
    /// Error, iteration and running-time columns per method.
    Ridge,
}

fn fmt_error(e: f64) -> String {
    if e.is_nan() {
        "NaN".into()
    } else {
        format!("{e}")
    }
}

pub fn render_csv(rows: &[TableRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| NaveError::NumericalFailure(format!("csv: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for row in rows {
        for c in &row.cells {
            w.write_record([
                row.label.clone(),
                c.method.to_string(),
                fmt_error(c.error),
                c.iterations.to_string(),
                format!("{}", c.time_ms),
                c.status.as_str().to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| NaveError::NumericalFailure(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_csv(rows: &[TableRow], path: &Path) -> Result<()> {
    fs::write(path, render_csv(rows)?).map_err(|e| NaveError::io(path, e))
}

/// Parses CSV produced by [`write_csv`]. Consecutive lines with the same
/// label form one row; solve reports are not stored and come back empty.
pub fn read_csv(path: &Path) -> Result<Vec<TableRow>> {
    let text = fs::read_to_string(path).map_err(|e| NaveError::io(path, e))?;
    parse_csv(&text)
}

pub(crate) fn parse_csv(text: &str) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| NaveError::Parse(format!("csv header: {e}")))?;
    if header.iter().ne(CSV_HEADER) {
        return Err(NaveError::Parse(format!("unexpected csv header {header:?}")));
    }
    let mut rows: Vec<TableRow> = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| NaveError::Parse(format!("csv record {}: {e}", line + 2)))?;
        let bad = |what: &str| NaveError::Parse(format!("csv record {}: bad {what}", line + 2));
        let cell = Cell {
            method: rec[1].parse().map_err(|_| bad("method"))?,
            error: rec[2].parse().map_err(|_| bad("error"))?,
            iterations: rec[3].parse().map_err(|_| bad("iterations"))?,
            time_ms: rec[4].parse().map_err(|_| bad("time_ms"))?,
            status: SolveStatus::parse(&rec[5]).ok_or_else(|| bad("status"))?,
        };
        match rows.last_mut() {
            Some(row) if row.label == rec[0] => {
                row.cells.push(cell);
                row.reports.push(Vec::new());
            }
            _ => rows.push(TableRow {
                label: rec[0].to_string(),
                cells: vec![cell],
                reports: vec![Vec::new()],
            }),
        }
    }
    Ok(rows)
}

fn methods_of(rows: &[TableRow]) -> Vec<Method> {
    let mut ms: Vec<Method> = Vec::new();
    for c in rows.iter().flat_map(|r| &r.cells) {
        if !ms.contains(&c.method) {
            ms.push(c.method);
        }
    }
    ms
}

fn md_error(c: Option<&Cell>) -> String {
    match c {
        Some(c) if c.error.is_nan() => "NaN".into(),
        Some(c) => format!("{:.1e}", c.error),
        None => "".into(),
    }
}

type CellFormatter = Box<dyn Fn(Option<&Cell>) -> String>;

/// Markdown table. Running times are shown in units of `1e-2 s`.
pub fn render_markdown(rows: &[TableRow], kind: TableKind) -> String {
    let ms = methods_of(rows);
    let mut groups: Vec<(&str, CellFormatter)> = vec![
        ("Error", Box::new(md_error)),
        ("Iterations", Box::new(|c: Option<&Cell>| c.map(|c| c.iterations.to_string()).unwrap_or_default())),
    ];
    if kind == TableKind::Ridge {
        groups.push((
            "Time (×1e-2 s)",
            Box::new(|c: Option<&Cell>| c.map(|c| format!("{:.2}", c.time_ms / 10.0)).unwrap_or_default()),
        ));
    }
    let mut out = String::from("| |");
    for (g, _) in &groups {
        for m in &ms {
            out.push_str(&format!(" {g} {} |", m.heading()));
        }
    }
    out.push_str("\n|---|");
    out.push_str(&"---|".repeat(groups.len() * ms.len()));
    out.push('\n');
    for row in rows {
        out.push_str(&format!("| {} |", row.label));
        for (_, f) in &groups {
            for m in &ms {
                out.push_str(&format!(" {} |", f(row.cell(*m))));
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_markdown(rows: &[TableRow], kind: TableKind, path: &Path) -> Result<()> {
    fs::write(path, render_markdown(rows, kind)).map_err(|e| NaveError::io(path, e))
}

/// Comma-separated plot data with a header line, e.g. `h,error`.
pub fn write_plot_data(path: &Path, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| NaveError::NumericalFailure(format!("csv: {e}"));
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        if r.len() != header.len() {
            return Err(NaveError::InvalidInput(format!(
                "plot row has {} values, header has {}",
                r.len(),
                header.len()
            )));
        }
        w.write_record(r.iter().map(|v| format!("{v}"))).map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| NaveError::NumericalFailure(format!("csv: {e}")))?;
    fs::write(path, bytes).map_err(|e| NaveError::io(path, e))
}
