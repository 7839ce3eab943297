//! Trace tables in CSV form.
//!
//! One row per iterate `k = 0..=N` with columns
//! `k, x_0, ..., x_{d-1}, residual` and, when the solution is known,
//! `err_norm, log10_err`. Floats carry 17 significant digits so a table
//! read back reproduces the trace bit for bit.

use std::io::{Read, Write};

use crate::engine::Trace;
use crate::geometry::Point;

/// 17 significant digits; `log10(0)` prints as `-inf`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn header(dim: usize, with_errors: bool) -> Vec<String> {
    let mut h = vec!["k".to_string()];
    h.extend((0..dim).map(|i| format!("x_{i}")));
    h.push("residual".into());
    if with_errors {
        h.push("err_norm".into());
        h.push("log10_err".into());
    }
    h
}

pub fn write_trace_csv<W: Write>(out: W, trace: &Trace, solution: Option<&Point>) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let dim = trace.iterates[0].dim();
    w.write_record(header(dim, solution.is_some()))?;
    let residuals = trace.residuals_per_iterate();
    for (k, x) in trace.iterates.iter().enumerate() {
        let mut row = vec![k.to_string()];
        row.extend(x.coords().iter().map(|c| fmt_f64(*c)));
        row.push(fmt_f64(residuals[k]));
        if let Some(s) = solution {
            let e = x.distance(s);
            row.push(fmt_f64(e));
            row.push(fmt_f64(e.log10()));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// `k` followed by one `log10` error column per named series. Shorter series
/// leave their cells empty.
pub fn write_log_errors_csv<W: Write>(out: W, series: &[(&str, Vec<f64>)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut h = vec!["k".to_string()];
    h.extend(series.iter().map(|(n, _)| n.to_string()));
    w.write_record(&h)?;
    let rows = series.iter().map(|(_, v)| v.len()).max().unwrap_or(0);
    for k in 0..rows {
        let mut row = vec![k.to_string()];
        row.extend(
            series
                .iter()
                .map(|(_, v)| v.get(k).map(|e| fmt_f64(*e)).unwrap_or_default()),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// A parsed numeric table.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    /// Empty cells parse as `NaN`.
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

pub fn read_table<R: Read>(input: R) -> Result<Table, String> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r
        .headers()
        .map_err(|e| e.to_string())?
        .iter()
        .map(String::from)
        .collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let row = rec
            .iter()
            .map(|c| {
                if c.is_empty() {
                    Ok(f64::NAN)
                } else {
                    c.parse::<f64>().map_err(|e| format!("{c:?}: {e}"))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}
