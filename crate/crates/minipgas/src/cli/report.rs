//! Machine-readable run reports: a fixed-schema CSV row per kernel run plus
//! exact-equality verification helpers with bounded diff output.

use std::fmt::Display;
use std::io::{self, Write};

use crate::pgas::{CommStats, PredictedVolume, RankId};
use crate::spmv::Strategy;

/// Fixed CSV column order; inapplicable fields are empty strings.
pub const CSV_HEADER: &str = "kernel,strategy,P,B,grid,size,iters,wall_s,avg_step_s,gflops,\
                              bytes_measured,bytes_predicted,volume_match,verify_pass,seed";

/// One CSV row. Timing columns (`wall_s`, `avg_step_s`, `gflops`) are the
/// only ones that vary between identically-configured runs.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub kernel: &'static str,
    pub strategy: Option<Strategy>,
    pub ranks: usize,
    pub block: Option<usize>,
    pub grid: Option<String>,
    pub size: String,
    pub iters: usize,
    pub wall_s: f64,
    pub avg_step_s: f64,
    pub gflops: Option<f64>,
    pub bytes_measured: u64,
    pub bytes_predicted: u64,
    pub volume_match: bool,
    /// `None` when verification did not run.
    pub verify_pass: Option<bool>,
    /// Seed that generated the input; `None` for inputs without one.
    pub seed: Option<u64>,
}

fn opt<T: Display>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

impl ReportRow {
    pub fn to_csv_line(&self) -> String {
        let gflops = self
            .gflops
            .map(|g| format!("{g:.6}"))
            .unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{:.6},{:.6},{},{},{},{},{},{}",
            self.kernel,
            opt(&self.strategy),
            self.ranks,
            opt(&self.block),
            opt(&self.grid),
            self.size,
            self.iters,
            self.wall_s,
            self.avg_step_s,
            gflops,
            self.bytes_measured,
            self.bytes_predicted,
            self.volume_match,
            opt(&self.verify_pass),
            opt(&self.seed),
        )
    }
}

/// Write the header plus one line per row.
pub fn write_rows(out: &mut dyn Write, rows: &[ReportRow]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for row in rows {
        writeln!(out, "{}", row.to_csv_line())?;
    }
    Ok(())
}

/// Outcome of an exact element-wise comparison.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub pass: bool,
    /// First mismatches as `(index, actual, reference)`, at most [`MAX_REPORTED`].
    pub mismatches: Vec<(usize, f64, f64)>,
    pub total_mismatches: usize,
}

/// How many mismatching positions a failed verification lists.
pub const MAX_REPORTED: usize = 10;

/// Bitwise comparison of two float vectors (length differences count as a
/// single mismatch at the first out-of-range index).
pub fn verify_exact(actual: &[f64], reference: &[f64]) -> VerifyOutcome {
    let mut mismatches = Vec::new();
    let mut total = 0;
    for (i, (a, r)) in actual.iter().zip(reference).enumerate() {
        if a.to_bits() != r.to_bits() {
            total += 1;
            if mismatches.len() < MAX_REPORTED {
                mismatches.push((i, *a, *r));
            }
        }
    }
    if actual.len() != reference.len() {
        total += 1;
        if mismatches.len() < MAX_REPORTED {
            let i = actual.len().min(reference.len());
            mismatches.push((i, actual.get(i).copied().unwrap_or(f64::NAN), reference.get(i).copied().unwrap_or(f64::NAN)));
        }
    }
    VerifyOutcome {
        pass: total == 0,
        mismatches,
        total_mismatches: total,
    }
}

/// Print a failed verification: the first few mismatching positions with
/// both values.
pub fn print_mismatches(label: &str, outcome: &VerifyOutcome) {
    eprintln!(
        "verification failed ({label}): {} mismatching position(s)",
        outcome.total_mismatches
    );
    for (i, actual, reference) in &outcome.mismatches {
        eprintln!("  [{i}] got {actual:?}, expected {reference:?}");
    }
}

/// Print every ordered pair where measured and predicted counters disagree.
pub fn print_volume_diff(label: &str, measured: &CommStats, predicted: &PredictedVolume) {
    eprintln!("communication volume mismatch ({label}):");
    for s in 0..measured.ranks() {
        for d in 0..measured.ranks() {
            let got = measured.pair(RankId(s), RankId(d));
            let want = predicted.pair(RankId(s), RankId(d));
            if got != want {
                eprintln!(
                    "  {s}->{d}: measured {} msgs / {} bytes, predicted {} msgs / {} bytes",
                    got.messages, got.bytes, want.messages, want.bytes
                );
            }
        }
    }
    let local = measured.local_copies();
    if local.messages != 0 || local.bytes != 0 {
        eprintln!(
            "  local copies present: {} msgs / {} bytes (model expects none)",
            local.messages, local.bytes
        );
    }
}
