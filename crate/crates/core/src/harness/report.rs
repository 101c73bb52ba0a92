use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Skipped points above this fraction of a check's samples fail it.
pub const MAX_SKIPPED_FRACTION: f64 = 0.2;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report has no checks")]
    Empty,
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// How a check turns its statistics into a verdict.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Mode {
    /// Every residual stays below `tol`.
    Below,
    /// At least `min_fraction` of the residuals exceed `tol`.
    Exceeds { min_fraction: f64 },
    /// Recorded only; always passes.
    Info,
}

/// Streaming max/rms statistics of residual magnitudes.
#[derive(Debug, Clone, Default)]
pub struct Accumulator {
    n: usize,
    max_abs: f64,
    sum_sq: f64,
    skipped: usize,
    values: Vec<f64>,
}

impl Accumulator {
    /// Non-finite values count as skipped.
    pub fn push(&mut self, x: f64) {
        let x = x.abs();
        if !x.is_finite() {
            self.skipped += 1;
            return;
        }
        self.n += 1;
        self.max_abs = self.max_abs.max(x);
        self.sum_sq += x * x;
        self.values.push(x);
    }

    pub fn skip(&mut self) {
        self.skipped += 1;
    }

    pub fn finish(self, name: String, tol: f64) -> CheckResult {
        self.finish_with(name, tol, Mode::Below)
    }

    pub fn finish_with(self, name: String, tol: f64, mode: Mode) -> CheckResult {
        let total = self.n + self.skipped;
        let skip_ok = total > 0 && (self.skipped as f64) <= MAX_SKIPPED_FRACTION * total as f64;
        let above = self.values.iter().filter(|&&x| x >= tol).count();
        let fraction_above = if self.n == 0 { 0.0 } else { above as f64 / self.n as f64 };
        let pass = match mode {
            Mode::Below => self.n > 0 && skip_ok && self.max_abs < tol,
            Mode::Exceeds { min_fraction } => self.n > 0 && skip_ok && fraction_above >= min_fraction,
            Mode::Info => true,
        };
        CheckResult {
            name,
            n: self.n,
            max_abs: self.max_abs,
            rms: if self.n == 0 { 0.0 } else { (self.sum_sq / self.n as f64).sqrt() },
            tol,
            pass,
            skipped: self.skipped,
            mode,
            fraction_above,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub n: usize,
    pub max_abs: f64,
    pub rms: f64,
    pub tol: f64,
    pub pass: bool,
    pub skipped: usize,
    pub mode: Mode,
    pub fraction_above: f64,
}

/// One sample point of a `scan`, with every recorded residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    /// `None` where the value could not be evaluated.
    pub values: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub suite: String,
    pub config_echo: serde_json::Value,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
    pub timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub landscape: Option<Vec<ScanRow>>,
}

impl ResidualReport {
    pub fn new(suite: String, config_echo: serde_json::Value, checks: Vec<CheckResult>) -> ResidualReport {
        let pass = !checks.is_empty() && checks.iter().all(|c| c.pass);
        let timestamp = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResidualReport { suite, config_echo, checks, pass, timestamp, landscape: None }
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            _ => Err(format!("unknown format `{s}`")),
        }
    }
}

pub const CSV_HEADER: &str = "suite,name,n,max_abs,rms,tol,pass,skipped,mode,fraction_above";

pub fn render(report: &ResidualReport, format: Format) -> Result<String, ReportError> {
    if report.checks.is_empty() {
        return Err(ReportError::Empty);
    }
    Ok(match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(report)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for c in &report.checks {
                let mode = match c.mode {
                    Mode::Below => "below",
                    Mode::Exceeds { .. } => "exceeds",
                    Mode::Info => "info",
                };
                s.push_str(&format!(
                    "{},{},{},{:e},{:e},{:e},{},{},{},{}\n",
                    report.suite, c.name, c.n, c.max_abs, c.rms, c.tol, c.pass, c.skipped, mode, c.fraction_above
                ));
            }
            s
        }
    })
}

/// Writes the report to `path`, or to stdout when `path` is `None`.
pub fn emit(report: &ResidualReport, format: Format, path: Option<&Path>) -> Result<(), ReportError> {
    let text = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(n: usize) -> ResidualReport {
        let checks = (0..n)
            .map(|k| {
                let mut a = Accumulator::default();
                a.push(1e-12 * k as f64);
                a.finish(format!("c{k}"), 1e-9)
            })
            .collect();
        ResidualReport::new("demo".into(), serde_json::json!({}), checks)
    }

    #[test]
    fn statistics() {
        let mut a = Accumulator::default();
        for x in [3.0, -4.0, f64::NAN] {
            a.push(x);
        }
        let c = a.finish("x".into(), 5.0);
        assert_eq!((c.n, c.skipped), (2, 1));
        assert_eq!(c.max_abs, 4.0);
        assert!((c.rms - 12.5f64.sqrt()).abs() < 1e-15);
        assert!(!c.pass, "1/3 skipped exceeds the cap");
    }

    #[test]
    fn exceeds_mode() {
        let mut a = Accumulator::default();
        for x in [1.0, 1.0, 1.0, 1e-9] {
            a.push(x);
        }
        let c = a.clone().finish_with("neg".into(), 1e-3, Mode::Exceeds { min_fraction: 0.75 });
        assert!(c.pass && c.fraction_above == 0.75);
        assert!(!a.finish_with("neg".into(), 1e-3, Mode::Exceeds { min_fraction: 0.9 }).pass);
    }

    #[test]
    fn empty_report_is_an_error() {
        assert!(matches!(render(&report(0), Format::Json), Err(ReportError::Empty)));
        assert!(!report(0).pass);
    }

    #[test]
    fn csv_rows() {
        let s = render(&report(3), Format::Csv).unwrap();
        assert_eq!(s.lines().count(), 4);
        assert_eq!(s.lines().next().unwrap(), CSV_HEADER);
    }
}
