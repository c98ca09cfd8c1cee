//! Atomic CSV/JSON artifact writers.
//!
//! Files are staged in a temporary sibling and renamed into place, so a
//! crash never leaves a partial artifact. Floats are printed with 17
//! significant digits, which round-trips every f64 bit pattern.

use crate::experiments::{Report, SweepResult};
use std::io::Write;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("i/o error writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

/// `f64` with 17 significant digits; reparses to the exact value written.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), WriteError> {
    let io_err = |source| WriteError::Io { path: path.display().to_string(), source };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(d) => tempfile::NamedTempFile::new_in(d),
        None => tempfile::NamedTempFile::new_in("."),
    }
    .map_err(io_err)?;
    tmp.write_all(bytes).map_err(io_err)?;
    tmp.persist(path)
        .map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Serialize a report to pretty JSON at `path`, atomically.
pub fn write_report_json(report: &Report, path: &Path) -> Result<(), WriteError> {
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub const SWEEP_CSV_HEADER: &str =
    "lambda,measure,stderr,lambda_p_measure,target,envelope_lo,envelope_hi,pass";

/// Render a sweep as plot-ready CSV text (shared by the file writer and the
/// determinism check).
pub fn sweep_csv_string(sweep: &SweepResult) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for pt in &sweep.pairs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            fmt_float(pt.lambda),
            fmt_float(pt.measure),
            fmt_float(pt.stderr),
            fmt_float(pt.lambda_p_measure),
            fmt_float(sweep.analytic_target),
            fmt_float(pt.envelope_lo),
            fmt_float(pt.envelope_hi),
            pt.envelope_pass,
        ));
    }
    out
}

/// Write the sweep CSV at `path`, atomically.
pub fn write_sweep_csv(sweep: &SweepResult, path: &Path) -> Result<(), WriteError> {
    write_atomic(path, sweep_csv_string(sweep).as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{default_lambda_schedule, limit_sweep, verify_heart};
    use crate::TestFunction;

    fn small_sweep() -> SweepResult {
        let u = TestFunction::ball(1, 1.0, 1.0).unwrap();
        let z = TestFunction::zero(1).unwrap();
        limit_sweep(&u, &z, 1.0, &default_lambda_schedule()[..4], 10_000, 9).unwrap()
    }

    #[test]
    fn float_format_round_trips() {
        for x in [0.1, 1.0 / 3.0, 4.0, f64::MIN_POSITIVE, 1e300, -2.5066282746310002] {
            let s = fmt_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x, "{s}");
        }
    }

    #[test]
    fn csv_header_and_shape() {
        let text = sweep_csv_string(&small_sweep());
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), SWEEP_CSV_HEADER);
        let row = lines.next().unwrap();
        assert_eq!(row.split(',').count(), 8);
        // every numeric field reparses
        for field in row.split(',').take(7) {
            field.parse::<f64>().unwrap();
        }
    }

    #[test]
    fn csv_written_atomically_and_identically() {
        let dir = tempfile::tempdir().unwrap();
        let sweep = small_sweep();
        let path = dir.path().join("sweep.csv");
        write_sweep_csv(&sweep, &path).unwrap();
        let a = std::fs::read(&path).unwrap();
        write_sweep_csv(&sweep, &path).unwrap();
        let b = std::fs::read(&path).unwrap();
        assert_eq!(a, b);
        assert_eq!(String::from_utf8(a).unwrap(), sweep_csv_string(&sweep));
    }

    #[test]
    fn report_json_file_round_trips() {
        let dir = tempfile::tempdir().unwrap();
        let u = TestFunction::ball(1, 1.0, 1.0).unwrap();
        let report = verify_heart(&u, 1.0, &[1.0], 5_000, 7).unwrap();
        let path = dir.path().join("report.json");
        write_report_json(&report, &path).unwrap();
        let back: Report =
            serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(back.results, report.results);
        assert_eq!(back.verdicts.len(), report.verdicts.len());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let sweep = small_sweep();
        let err = write_sweep_csv(&sweep, Path::new("/nonexistent-dir/x.csv"));
        assert!(err.is_err());
    }
}
