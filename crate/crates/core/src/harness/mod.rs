//! Verification suites over sample grids, and their reports.

mod config;
mod report;
mod suites;

pub use config::{
    Axis, ConfigError, FamilyKind, FamilySpec, GridSpec, Suite, SuiteConfig, DEFAULT_CLOSED_TOL, DEFAULT_ORDER,
    DEFAULT_TOL,
};
pub use report::{
    emit, render, Accumulator, CheckResult, Format, Mode, ReportError, ResidualReport, ScanRow, CSV_HEADER,
    MAX_SKIPPED_FRACTION,
};
pub use suites::{run_suite, run_suite_with, ANSATZ_TOL, IMPLICIT_TOL, ROUND_TRIP_TOL};

/// How sample points are evaluated. Results come back in input order
/// either way, so reports do not depend on the choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    /// Falls back to sequential without the `parallel` feature.
    Parallel,
}

impl Default for Execution {
    fn default() -> Self {
        if cfg!(feature = "parallel") {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}

pub fn map_points<P, T, F>(exec: Execution, points: &[P], f: F) -> Vec<T>
where
    P: Sync,
    T: Send,
    F: Fn(&P) -> T + Sync + Send,
{
    match exec {
        #[cfg(feature = "parallel")]
        Execution::Parallel => {
            use rayon::prelude::*;
            points.par_iter().map(f).collect()
        }
        _ => points.iter().map(f).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_points_keeps_order() {
        let pts: Vec<u64> = (0..1000).collect();
        let seq = map_points(Execution::Sequential, &pts, |x| x * x);
        let par = map_points(Execution::Parallel, &pts, |x| x * x);
        assert_eq!(seq, par);
        assert_eq!(seq[999], 998001);
    }
}
