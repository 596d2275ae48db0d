//! Steganalysis and run metrics.
//!
//! The detectability metric is the two-sample Kolmogorov-Smirnov distance
//! between magnitude samples, computed exactly on raw (unbinned) values.
//! Histograms exist only for PDF display output. Run metrics are
//! aggregated from the machine-parseable event log plus the counters a
//! simulation records alongside it.

use crate::constellation::IqSymbol;
use serde::{Deserialize, Serialize};
use std::io::{Read, Write};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("empty magnitude sample")]
    EmptySample,
    #[error("histogram needs at least 2 bins, got {0}")]
    BinCount(usize),
    #[error("malformed event log line {line_no}: {line:?}")]
    LogLine { line_no: usize, line: String },
    #[error("capture io: {0}")]
    Io(#[from] std::io::Error),
    #[error("capture file length {0} is not a whole number of I/Q pairs")]
    CaptureLength(u64),
    #[error("sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
}

/// Exact two-sample KS distance: the supremum of |ECDF_a - ECDF_b| over
/// the merged sample points.
pub fn ks_distance(a: &[f64], b: &[f64]) -> Result<f64, AnalysisError> {
    if a.is_empty() || b.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    let mut xs = a.to_vec();
    let mut ys = b.to_vec();
    xs.sort_by(|p, q| p.partial_cmp(q).unwrap());
    ys.sort_by(|p, q| p.partial_cmp(q).unwrap());

    let (na, nb) = (xs.len() as f64, ys.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut d_max = 0.0f64;
    while i < xs.len() && j < ys.len() {
        let x = xs[i].min(ys[j]);
        while i < xs.len() && xs[i] <= x {
            i += 1;
        }
        while j < ys.len() && ys[j] <= x {
            j += 1;
        }
        let d = (i as f64 / na - j as f64 / nb).abs();
        if d > d_max {
            d_max = d;
        }
    }
    Ok(d_max)
}

/// Normalized histogram: densities integrate to 1 over the sample range.
pub struct Histogram {
    pub edges: Vec<f64>,
    pub densities: Vec<f64>,
}

pub fn magnitude_histogram(sample: &[f64], bins: usize) -> Result<Histogram, AnalysisError> {
    if sample.is_empty() {
        return Err(AnalysisError::EmptySample);
    }
    if bins < 2 {
        return Err(AnalysisError::BinCount(bins));
    }
    let min = sample.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = sample.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Degenerate (constant) samples get a unit-width range so the density
    // still integrates to 1.
    let (lo, hi) = if max > min {
        (min, max)
    } else {
        (min - 0.5, min + 0.5)
    };
    let width = (hi - lo) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &v in sample {
        let mut idx = ((v - lo) / width) as usize;
        if idx >= bins {
            idx = bins - 1;
        }
        counts[idx] += 1;
    }
    let n = sample.len() as f64;
    let densities = counts.iter().map(|&c| c as f64 / (n * width)).collect();
    let edges = (0..=bins).map(|k| lo + k as f64 * width).collect();
    Ok(Histogram { edges, densities })
}

/// Counters a simulation records next to its event log.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunCounters {
    pub subframes: u64,
    pub packet_emissions: u64,
    pub retransmissions: u64,
    pub primary_opportunities: u64,
    pub primary_errored_opportunities: u64,
    pub primary_ok_bits: u64,
    pub dropped_opportunities: u64,
}

/// Aggregated per-run metrics.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub covert_tput_bps: f64,
    pub retx_pct: f64,
    pub primary_per: f64,
    pub primary_tput_bps: f64,
    pub delivered_bytes: u64,
}

/// Compute run metrics from an event log and the recorded counters. Every
/// log line must be `key=value` pairs separated by single spaces.
pub fn aggregate_metrics(log: &str, counters: &RunCounters) -> Result<RunMetrics, AnalysisError> {
    let mut delivered_bytes = 0u64;
    for (idx, line) in log.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let mut event = None;
        let mut bytes = None;
        for field in line.split(' ') {
            let (key, value) = field.split_once('=').ok_or_else(|| AnalysisError::LogLine {
                line_no: idx + 1,
                line: line.to_string(),
            })?;
            match key {
                "event" => event = Some(value),
                "bytes" => {
                    bytes = Some(value.parse::<u64>().map_err(|_| AnalysisError::LogLine {
                        line_no: idx + 1,
                        line: line.to_string(),
                    })?)
                }
                _ => {}
            }
        }
        let event = event.ok_or_else(|| AnalysisError::LogLine {
            line_no: idx + 1,
            line: line.to_string(),
        })?;
        if event == "data_delivered" {
            delivered_bytes += bytes.ok_or_else(|| AnalysisError::LogLine {
                line_no: idx + 1,
                line: line.to_string(),
            })?;
        }
    }
    let elapsed_s = counters.subframes as f64 * 1e-3;
    let covert_tput_bps = if elapsed_s > 0.0 {
        delivered_bytes as f64 * 8.0 / elapsed_s
    } else {
        0.0
    };
    let retx_pct = if counters.packet_emissions > 0 {
        counters.retransmissions as f64 / counters.packet_emissions as f64 * 100.0
    } else {
        0.0
    };
    let primary_per = if counters.primary_opportunities > 0 {
        counters.primary_errored_opportunities as f64 / counters.primary_opportunities as f64
    } else {
        0.0
    };
    let primary_tput_bps = if elapsed_s > 0.0 {
        counters.primary_ok_bits as f64 / elapsed_s
    } else {
        0.0
    };
    Ok(RunMetrics {
        covert_tput_bps,
        retx_pct,
        primary_per,
        primary_tput_bps,
        delivered_bytes,
    })
}

pub const CSV_HEADER: &str = "scenario,seed,snr_db,modulation,undetectable,covert_tput_bps,retx_pct,primary_per,primary_tput_bps,ks_vs_clean";

/// Render one metrics CSV row. `ks_vs_clean` is written as `na` when no
/// capture pair was taken.
#[allow(clippy::too_many_arguments)]
pub fn csv_row(
    scenario: &str,
    seed: u64,
    snr_db: Option<f64>,
    modulation: usize,
    undetectable: bool,
    metrics: &RunMetrics,
    ks_vs_clean: Option<f64>,
) -> String {
    let snr = match snr_db {
        Some(v) => format!("{v}"),
        None => "inf".to_string(),
    };
    let ks = match ks_vs_clean {
        Some(v) => format!("{v:.6}"),
        None => "na".to_string(),
    };
    format!(
        "{scenario},{seed},{snr},{modulation},{undetectable},{:.3},{:.4},{:.6},{:.3},{ks}",
        metrics.covert_tput_bps, metrics.retx_pct, metrics.primary_per, metrics.primary_tput_bps
    )
}

/// Sidecar metadata written next to each IQ capture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaptureMeta {
    pub sample_count: u64,
    pub seed: u64,
    pub scenario: String,
    pub snr_db: Option<f64>,
    pub modulation: usize,
    pub undetectable: bool,
}

/// Write a capture as little-endian f32 I/Q pairs plus a JSON sidecar at
/// `<path>.json`.
pub fn write_capture(
    path: &Path,
    symbols: &[IqSymbol],
    meta: &CaptureMeta,
) -> Result<(), AnalysisError> {
    let mut buf = Vec::with_capacity(symbols.len() * 8);
    for sym in symbols {
        buf.extend_from_slice(&(sym.i as f32).to_le_bytes());
        buf.extend_from_slice(&(sym.q as f32).to_le_bytes());
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(&buf)?;
    let sidecar = serde_json::to_string_pretty(meta)?;
    std::fs::write(path.with_extension("iq.json"), sidecar)?;
    Ok(())
}

/// Read a capture back as symbols.
pub fn read_capture(path: &Path) -> Result<Vec<IqSymbol>, AnalysisError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() % 8 != 0 {
        return Err(AnalysisError::CaptureLength(bytes.len() as u64));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|chunk| {
            let i = f32::from_le_bytes(chunk[0..4].try_into().unwrap());
            let q = f32::from_le_bytes(chunk[4..8].try_into().unwrap());
            IqSymbol::new(i as f64, q as f64)
        })
        .collect())
}

pub fn magnitudes(symbols: &[IqSymbol]) -> Vec<f64> {
    symbols.iter().map(|s| s.magnitude()).collect()
}
