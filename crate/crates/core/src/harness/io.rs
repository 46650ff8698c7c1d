//! Trace serialization.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::config::TraceFormat;
use crate::{IterationRecord, Result, Trace};

/// CSV header, in column order.
pub const TRACE_COLUMNS: [&str; 18] = [
    "k",
    "delta_exponent",
    "delta",
    "h_model_norm",
    "h_true_norm",
    "pred",
    "cred",
    "ared",
    "accepted",
    "gated",
    "n_model",
    "n_cred",
    "b_k",
    "cauchy_r",
    "f_plus_phi",
    "psi",
    "I_k",
    "J_k",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One CSV row; optional fields are empty when unavailable.
pub fn csv_row(r: &IterationRecord) -> [String; 18] {
    [
        r.k.to_string(),
        r.delta_exponent.to_string(),
        r.delta.to_string(),
        r.h_model_norm.to_string(),
        opt(r.h_true_norm),
        opt(r.pred),
        opt(r.cred),
        opt(r.ared),
        r.accepted.to_string(),
        r.gated.to_string(),
        r.n_model.to_string(),
        r.n_cred.to_string(),
        r.b_k.to_string(),
        opt(r.cauchy_r),
        opt(r.f_plus_phi),
        opt(r.psi),
        opt(r.i_k),
        opt(r.j_k),
    ]
}

pub fn write_trace_csv(path: impl AsRef<Path>, trace: &Trace) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(TRACE_COLUMNS)?;
    for r in &trace.records {
        w.write_record(csv_row(r))?;
    }
    w.flush()?;
    Ok(())
}

/// One JSON object per record, including the flags absent from the CSV.
pub fn write_trace_jsonl(path: impl AsRef<Path>, trace: &Trace) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for r in &trace.records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace(path: impl AsRef<Path>, trace: &Trace, format: TraceFormat) -> Result<()> {
    match format {
        TraceFormat::Csv => write_trace_csv(path, trace),
        TraceFormat::Jsonl => write_trace_jsonl(path, trace),
    }
}
