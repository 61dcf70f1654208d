//! CSV outputs: results, hop histograms, rank tables and SAND traces.

use std::io::{self, BufRead, Write};

use sand_core::{HopHistogram, MetricsSummary, RankTable, TraceEvent};
use thiserror::Error;

pub const RESULTS_HEADER: &str =
    "scheme,features,requests,successes,success_rate,avg_contacted,avg_hops";
pub const HISTOGRAM_HEADER: &str = "hops,count";
pub const RANK_HEADER: &str = "device,k,d,c,b,R";
pub const TRACE_HEADER: &str = "request,step,from,to,action,elapsed_ms";

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
}

/// Writes one row per summary, sorted by `(scheme, features)`.
pub fn emit_csv<W: Write>(summaries: &[MetricsSummary], mut out: W) -> io::Result<()> {
    let mut rows: Vec<&MetricsSummary> = summaries.iter().collect();
    rows.sort_by(|a, b| (&a.scheme, a.features).cmp(&(&b.scheme, b.features)));
    writeln!(out, "{RESULTS_HEADER}")?;
    for s in rows {
        writeln!(
            out,
            "{},{},{},{},{:.4},{:.4},{:.4}",
            s.scheme,
            s.features,
            s.requests,
            s.successes,
            s.success_rate,
            s.avg_contacted,
            s.avg_hops
        )?;
    }
    out.flush()
}

/// Reads a results file back. Histograms are not part of the file and come
/// back empty.
pub fn parse_results_csv<R: BufRead>(input: R) -> Result<Vec<MetricsSummary>, CsvError> {
    let mut out = Vec::new();
    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let bad = |msg: &str| CsvError::Malformed {
            line: lineno,
            msg: msg.to_owned(),
        };
        if idx == 0 {
            if line.trim_end() != RESULTS_HEADER {
                return Err(bad("unexpected header"));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.trim_end().split(',').collect();
        let [scheme, features, requests, successes, rate, contacted, hops] = cols[..] else {
            return Err(bad("expected 7 columns"));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad("invalid number"));
        let int = |s: &str| s.parse::<u64>().map_err(|_| bad("invalid count"));
        out.push(MetricsSummary {
            scheme: scheme.to_owned(),
            features: features.parse().map_err(|_| bad("invalid feature count"))?,
            requests: int(requests)?,
            successes: int(successes)?,
            success_rate: num(rate)?,
            avg_contacted: num(contacted)?,
            avg_hops: num(hops)?,
            hop_histogram: HopHistogram::default(),
        });
    }
    Ok(out)
}

pub fn emit_histogram_csv<W: Write>(hist: &HopHistogram, mut out: W) -> io::Result<()> {
    writeln!(out, "{HISTOGRAM_HEADER}")?;
    for (hops, count) in hist.counts().iter().enumerate() {
        writeln!(out, "{hops},{count}")?;
    }
    out.flush()
}

pub fn emit_rank_csv<W: Write>(table: &RankTable, mut out: W) -> io::Result<()> {
    writeln!(out, "{RANK_HEADER}")?;
    for e in table.entries() {
        writeln!(
            out,
            "{},{},{},{:.6},{:.6},{:.6}",
            e.device, e.k, e.d, e.c, e.b, e.rank
        )?;
    }
    out.flush()
}

pub fn write_trace_event<W: Write>(out: &mut W, request: usize, e: &TraceEvent) -> io::Result<()> {
    writeln!(
        out,
        "{request},{},{},{},{},{}",
        e.step, e.from, e.to, e.action, e.elapsed
    )
}
