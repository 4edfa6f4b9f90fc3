//! The CSV output format: `sweep_value,method,value,stderr,elapsed_ms`.

use std::io::{Read, Write};

use anyhow::{bail, Context, Result};

pub const HEADER: [&str; 5] = ["sweep_value", "method", "value", "stderr", "elapsed_ms"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub sweep_value: f64,
    pub method: String,
    pub value: f64,
    /// Standard error; `None` for analytic values.
    pub stderr: Option<f64>,
    /// Wall-clock time; only recorded on request since it breaks
    /// byte-for-byte reproducibility.
    pub elapsed_ms: Option<f64>,
}

/// Shortest round-trip representation; exponent notation outside
/// [1e-5, 1e16) so that extreme values stay readable.
fn fmt(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || !v.is_finite() || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn num(x: Option<f64>) -> String {
    x.map(fmt).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[Row]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            fmt(r.sweep_value),
            r.method.clone(),
            fmt(r.value),
            num(r.stderr),
            num(r.elapsed_ms.map(|ms| (ms * 1e3).round() / 1e3)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Parses and validates a CSV produced by [`write_rows`]: exact header,
/// five columns per record, numeric fields parse, analytic rows leave
/// `stderr` empty.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<Row>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        bail!("unexpected header {header:?}");
    }
    let opt = |s: &str, what: &str, line: usize| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            Ok(Some(s.parse().with_context(|| format!("line {line}: {what} `{s}` is not a number"))?))
        }
    };
    let mut rows = Vec::new();
    for (i, rec) in rd.records().enumerate() {
        let line = i + 2;
        let rec = rec.with_context(|| format!("line {line}"))?;
        if rec.len() != HEADER.len() {
            bail!("line {line}: expected {} fields, found {}", HEADER.len(), rec.len());
        }
        if rec[1].is_empty() {
            bail!("line {line}: empty method");
        }
        rows.push(Row {
            sweep_value: rec[0].parse().with_context(|| format!("line {line}: sweep_value"))?,
            method: rec[1].to_string(),
            value: rec[2].parse().with_context(|| format!("line {line}: value"))?,
            stderr: opt(&rec[3], "stderr", line)?,
            elapsed_ms: opt(&rec[4], "elapsed_ms", line)?,
        });
    }
    Ok(rows)
}
