//! CSV files written and read by the harness.
//!
//! Floats are written with 17 significant digits so a read reproduces the
//! written value exactly. Empty cells stand for absent optional values.

use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::balancer::{BalanceRecord, EventKind};
use crate::consensus::ConsensusRecord;
use crate::error::{Error, Result};
use crate::harness::monte_carlo::SeriesPoint;
use crate::harness::sweep::SweepRow;
use crate::numerics::SplitRule;

pub const SERIES_HEADER: [&str; 5] = ["k", "mean_imbalance", "se_imbalance", "mean_mse", "se_mse"];
pub const BALANCE_HEADER: [&str; 6] = ["k", "gamma", "imbalance_l1", "event", "n_senders", "U"];
pub const CONSENSUS_HEADER: [&str; 7] = ["k", "gamma", "alpha", "imbalance_l1", "mse", "sum_y_drift", "event"];
pub const SWEEP_HEADER: [&str; 7] = [
    "scheme",
    "total_bits",
    "bits_wb",
    "bits_cons",
    "iterations",
    "comm_cost",
    "converged",
];

/// Formats a float with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One row of a balancing trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct BalanceTraceRow {
    pub k: u64,
    pub gamma: f64,
    pub imbalance_l1: f64,
    pub event: EventKind,
    pub n_senders: usize,
    pub potential: Option<u128>,
}

impl From<&BalanceRecord> for BalanceTraceRow {
    fn from(r: &BalanceRecord) -> Self {
        Self {
            k: r.k,
            gamma: r.gamma,
            imbalance_l1: r.imbalance,
            event: r.event,
            n_senders: r.n_senders,
            potential: r.potential,
        }
    }
}

/// Creates `path` and any missing parent directories.
fn create(path: &Path) -> Result<std::fs::File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(std::fs::File::create(path)?)
}

fn write_rows_to<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<const N: usize, T>(
    path: &Path,
    header: [&str; N],
    mut parse: impl FnMut(&csv::StringRecord) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let err = |msg: String| Error::Parse {
        path: path.to_path_buf(),
        msg,
    };
    let mut r = csv::Reader::from_path(path)?;
    if r.headers()?.iter().ne(header.iter().copied()) {
        return Err(err(format!("expected header {}", header.join(","))));
    }
    let mut out = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        if rec.len() != N {
            return Err(err(format!("row {}: expected {N} fields, got {}", line + 1, rec.len())));
        }
        out.push(parse(&rec).map_err(|m| err(format!("row {}: {m}", line + 1)))?);
    }
    Ok(out)
}

fn field<T: FromStr>(rec: &csv::StringRecord, i: usize) -> std::result::Result<T, String>
where
    T::Err: std::fmt::Display,
{
    rec[i].parse().map_err(|e| format!("column {i} `{}`: {e}", &rec[i]))
}

fn optional<T: FromStr>(rec: &csv::StringRecord, i: usize) -> std::result::Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    if rec[i].is_empty() {
        Ok(None)
    } else {
        field(rec, i).map(Some)
    }
}

fn event(rec: &csv::StringRecord, i: usize) -> std::result::Result<EventKind, String> {
    EventKind::from_code(&rec[i]).ok_or_else(|| format!("unknown event code `{}`", &rec[i]))
}

pub fn write_series(path: &Path, series: &[SeriesPoint]) -> Result<()> {
    write_series_to(create(path)?, series)
}

pub fn write_series_to<W: Write>(out: W, series: &[SeriesPoint]) -> Result<()> {
    write_rows_to(
        out,
        SERIES_HEADER,
        series.iter().map(|p| {
            [
                p.k.to_string(),
                fmt_f64(p.mean_imbalance),
                fmt_f64(p.se_imbalance),
                fmt_f64(p.mean_mse),
                fmt_f64(p.se_mse),
            ]
        }),
    )
}

pub fn read_series(path: &Path) -> Result<Vec<SeriesPoint>> {
    read_rows(path, SERIES_HEADER, |r| {
        Ok(SeriesPoint {
            k: field(r, 0)?,
            mean_imbalance: field(r, 1)?,
            se_imbalance: field(r, 2)?,
            mean_mse: field(r, 3)?,
            se_mse: field(r, 4)?,
        })
    })
}

pub fn write_balance_trace(path: &Path, trace: &[BalanceRecord]) -> Result<()> {
    let rows: Vec<BalanceTraceRow> = trace.iter().map(Into::into).collect();
    write_balance_rows(path, &rows)
}

pub fn write_balance_trace_to<W: Write>(out: W, trace: &[BalanceRecord]) -> Result<()> {
    let rows: Vec<BalanceTraceRow> = trace.iter().map(Into::into).collect();
    write_balance_rows_to(out, &rows)
}

pub fn write_balance_rows(path: &Path, rows: &[BalanceTraceRow]) -> Result<()> {
    write_balance_rows_to(create(path)?, rows)
}

pub fn write_balance_rows_to<W: Write>(out: W, rows: &[BalanceTraceRow]) -> Result<()> {
    write_rows_to(
        out,
        BALANCE_HEADER,
        rows.iter().map(|r| {
            [
                r.k.to_string(),
                fmt_f64(r.gamma),
                fmt_f64(r.imbalance_l1),
                r.event.code().to_string(),
                r.n_senders.to_string(),
                r.potential.map(|u| u.to_string()).unwrap_or_default(),
            ]
        }),
    )
}

pub fn read_balance_trace(path: &Path) -> Result<Vec<BalanceTraceRow>> {
    read_rows(path, BALANCE_HEADER, |r| {
        Ok(BalanceTraceRow {
            k: field(r, 0)?,
            gamma: field(r, 1)?,
            imbalance_l1: field(r, 2)?,
            event: event(r, 3)?,
            n_senders: field(r, 4)?,
            potential: optional(r, 5)?,
        })
    })
}

pub fn write_consensus_trace(path: &Path, trace: &[ConsensusRecord]) -> Result<()> {
    write_consensus_trace_to(create(path)?, trace)
}

pub fn write_consensus_trace_to<W: Write>(out: W, trace: &[ConsensusRecord]) -> Result<()> {
    write_rows_to(
        out,
        CONSENSUS_HEADER,
        trace.iter().map(|r| {
            [
                r.k.to_string(),
                fmt_f64(r.gamma),
                fmt_f64(r.alpha),
                fmt_f64(r.imbalance),
                fmt_f64(r.mse),
                fmt_f64(r.sum_y_drift),
                r.event.code().to_string(),
            ]
        }),
    )
}

pub fn read_consensus_trace(path: &Path) -> Result<Vec<ConsensusRecord>> {
    read_rows(path, CONSENSUS_HEADER, |r| {
        Ok(ConsensusRecord {
            k: field(r, 0)?,
            gamma: field(r, 1)?,
            alpha: field(r, 2)?,
            imbalance: field(r, 3)?,
            mse: field(r, 4)?,
            sum_y_drift: field(r, 5)?,
            event: event(r, 6)?,
        })
    })
}

pub fn write_sweep(path: &Path, rows: &[SweepRow]) -> Result<()> {
    write_sweep_to(create(path)?, rows)
}

pub fn write_sweep_to<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    write_rows_to(
        out,
        SWEEP_HEADER,
        rows.iter().map(|r| {
            [
                r.scheme.name().to_string(),
                r.total_bits.to_string(),
                r.bits_wb.to_string(),
                r.bits_cons.to_string(),
                r.iterations.to_string(),
                r.comm_cost.to_string(),
                r.converged.to_string(),
            ]
        }),
    )
}

pub fn read_sweep(path: &Path) -> Result<Vec<SweepRow>> {
    read_rows(path, SWEEP_HEADER, |r| {
        Ok(SweepRow {
            scheme: field::<SplitRule>(r, 0)?,
            total_bits: field(r, 1)?,
            bits_wb: field(r, 2)?,
            bits_cons: field(r, 3)?,
            iterations: field(r, 4)?,
            comm_cost: field(r, 5)?,
            converged: field(r, 6)?,
        })
    })
}
