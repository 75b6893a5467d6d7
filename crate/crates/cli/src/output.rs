use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Value};

use crate::config::{Format, RunConfig};
use crate::error::Result;
use crate::run::{Emission, Table};

/// Run metadata. Kept apart from the report so that the report itself is
/// byte-identical across runs with the same configuration.
pub fn meta(cfg: &RunConfig, argv: &[String], elapsed_ms: u128) -> Value {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    json!({
        "tool": "jsrlab",
        "version": env!("CARGO_PKG_VERSION"),
        "argv": argv,
        "depth": cfg.depth,
        "budget": cfg.budget,
        "tol": cfg.tol,
        "seed": cfg.seed,
        "norm": cfg.norm_arg,
        "threads": cfg.threads,
        "parallel": cfg.parallel(),
        "dim": cfg.dim,
        "trials": cfg.trials,
        "tuple_len": cfg.tuple_len,
        "set_size": cfg.set_size,
        "finished_unix_ms": started.to_string(),
        "elapsed_ms": elapsed_ms.to_string(),
    })
}

/// Canonical serialization of a report.
pub fn report_json(report: &Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit<W: Write>(cfg: &RunConfig, emission: &Emission, meta: Value, mut out: W) -> Result<()> {
    match cfg.format {
        Format::Json => {
            let doc = json!({ "meta": meta, "report": emission.report });
            serde_json::to_writer_pretty(&mut out, &doc)?;
            writeln!(out)?;
        }
        Format::Csv => write_csv(&emission.table, &mut out)?,
    }
    out.flush()?;
    Ok(())
}
