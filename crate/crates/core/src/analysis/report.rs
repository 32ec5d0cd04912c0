//! CSV and Markdown convergence tables.

use std::fmt::Write as _;
use std::path::Path;

use crate::analysis::{ConvergenceReport, ReportRow};
use crate::error::{Error, Result};

pub const CSV_HEADER: [&str; 10] =
    ["M", "h", "tau", "err_p", "err_u", "err_c", "order_p", "order_u", "order_c", "seconds"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

impl ReportFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(ReportFormat::Csv),
            "md" | "markdown" => Some(ReportFormat::Markdown),
            _ => None,
        }
    }
}

fn num(x: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{x:e}")
}

pub fn to_csv(report: &ConvergenceReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    let orders = report.orders();
    for (i, row) in report.rows.iter().enumerate() {
        let o = if i == 0 { None } else { orders[i - 1] };
        let order = |k: usize| o.map_or(String::new(), |o| num(o[k]));
        w.write_record([
            row.m.to_string(),
            num(row.h),
            num(row.tau),
            num(row.err_p),
            num(row.err_u),
            num(row.err_c),
            order(0),
            order(1),
            order(2),
            row.seconds.map_or(String::new(), num),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

/// Rows and orders read back from a CSV report.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedReport {
    pub rows: Vec<ReportRow>,
    pub orders: Vec<Option<[f64; 3]>>,
}

/// Parses a CSV report. The header must match exactly; errors must be
/// finite and positive; the order and seconds fields may be empty.
pub fn parse_csv(text: &str) -> Result<ParsedReport> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(CSV_HEADER.iter().copied()) {
        return Err(Error::Parse(format!("unexpected header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut rows = Vec::new();
    let mut orders = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let field = |k: usize| record.get(k).unwrap_or("");
        let float = |k: usize| -> Result<f64> {
            let v: f64 = field(k)
                .parse()
                .map_err(|_| Error::Parse(format!("row {}: bad {} value {:?}", line + 1, CSV_HEADER[k], field(k))))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Parse(format!("row {}: non-finite {}", line + 1, CSV_HEADER[k])))
            }
        };
        let optional = |k: usize| -> Result<Option<f64>> {
            if field(k).is_empty() {
                Ok(None)
            } else {
                float(k).map(Some)
            }
        };
        let m: usize = field(0)
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad M {:?}", line + 1, field(0))))?;
        let row = ReportRow {
            m,
            h: float(1)?,
            tau: float(2)?,
            err_p: float(3)?,
            err_u: float(4)?,
            err_c: float(5)?,
            seconds: optional(9)?,
            max_divergence_residual: f64::NAN,
            max_transport_asymmetry: f64::NAN,
        };
        if row.errors().iter().any(|&e| e <= 0.0) {
            return Err(Error::Parse(format!("row {}: errors must be positive", line + 1)));
        }
        let o = [optional(6)?, optional(7)?, optional(8)?];
        let o = match o {
            [Some(a), Some(b), Some(c)] => Some([a, b, c]),
            [None, None, None] => None,
            _ => return Err(Error::Parse(format!("row {}: partial order fields", line + 1))),
        };
        if line > 0 {
            orders.push(o);
        } else if o.is_some() {
            return Err(Error::Parse("first row cannot carry orders".into()));
        }
        rows.push(row);
    }
    Ok(ParsedReport { rows, orders })
}

/// Markdown table with one row per mesh and a final row of mean orders.
pub fn to_markdown(report: &ConvergenceReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "Example {}, r = {}, tau rule `{}` (mixfem {})\n",
        report.example.id(),
        report.r,
        report.tau_rule.name(),
        report.version
    );
    s.push_str("| M | h | τ | Err_P | Err_U | Err_C |\n");
    s.push_str("|---|---|---|---|---|---|\n");
    for row in &report.rows {
        let _ = writeln!(
            s,
            "| {} | {:.4} | {:.3e} | {:.2e} | {:.2e} | {:.2e} |",
            row.m, row.h, row.tau, row.err_p, row.err_u, row.err_c
        );
    }
    if let Some(o) = report.mean_orders() {
        let _ = writeln!(s, "| order | | | {:.2} | {:.2} | {:.2} |", o[0], o[1], o[2]);
    }
    s
}

pub fn write_report(report: &ConvergenceReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = match format {
        ReportFormat::Csv => to_csv(report)?,
        ReportFormat::Markdown => to_markdown(report),
    };
    std::fs::write(path, text)?;
    Ok(())
}
