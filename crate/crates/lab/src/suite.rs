//! Runs checks over a corpus on a worker pool and merges the findings.

use std::time::Instant;

use graft_core::Limits;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::{find_check, run_checks, Check, Violation, CHECKS, SETUP};
use crate::generate::{generate, CorpusSpec};
use crate::{LabError, Result};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GRAFT_LAB_THREADS";

/// Violations kept per check; the total is still counted.
pub const MAX_RECORDED: usize = 100;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub id: String,
    pub grafts_tested: usize,
    pub violation_count: usize,
    pub violations: Vec<Violation>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub corpus: CorpusSpec,
    pub grafts: usize,
    pub elapsed_seconds: f64,
    pub checks: Vec<CheckReport>,
}

impl SuiteReport {
    pub fn total_violations(&self) -> usize {
        self.checks.iter().map(|c| c.violation_count).sum()
    }

    pub fn check(&self, id: &str) -> Option<&CheckReport> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Parses `all` or a comma-separated list of check ids.
pub fn select_checks(filter: &str) -> Result<Vec<&'static Check>> {
    if filter.trim() == "all" {
        return Ok(CHECKS.iter().collect());
    }
    filter
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(find_check)
        .collect()
}

fn thread_count() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .map(Some)
            .ok_or_else(|| LabError::Corpus(format!("{THREADS_ENV} must be a positive integer, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

pub fn run_suite(corpus: &CorpusSpec, checks: &[&Check], limits: &Limits) -> Result<SuiteReport> {
    let start = Instant::now();
    let generated = generate(corpus)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_count()? {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::Corpus(format!("cannot start worker pool: {e}")))?;
    let per_entry: Vec<Vec<Violation>> = pool.install(|| {
        generated
            .entries
            .par_iter()
            .map(|entry| entry.grafts().flat_map(|g| run_checks(&g, checks, limits)).collect())
            .collect()
    });
    let grafts = generated.graft_count();
    let mut reports: Vec<CheckReport> = std::iter::once(SETUP)
        .chain(checks.iter().map(|c| c.id))
        .map(|id| CheckReport {
            id: id.to_string(),
            grafts_tested: grafts,
            violation_count: 0,
            violations: Vec::new(),
        })
        .collect();
    for v in per_entry.into_iter().flatten() {
        let report = reports
            .iter_mut()
            .find(|r| r.id == v.check)
            .expect("violations come from selected checks");
        report.violation_count += 1;
        if report.violations.len() < MAX_RECORDED {
            report.violations.push(v);
        }
    }
    Ok(SuiteReport {
        corpus: corpus.clone(),
        grafts,
        elapsed_seconds: start.elapsed().as_secs_f64(),
        checks: reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_exhaustive_run_is_clean_and_deterministic() {
        let checks = select_checks("all").unwrap();
        let a = run_suite(&CorpusSpec::exhaustive(4), &checks, &Limits::default()).unwrap();
        assert_eq!(a.grafts, 1 + 2 + 3 * 4 + 19 * 8);
        assert_eq!(a.total_violations(), 0, "{:#?}", a.checks.iter().find(|c| c.violation_count > 0));
        let b = run_suite(&CorpusSpec::exhaustive(4), &checks, &Limits::default()).unwrap();
        assert_eq!(
            a.checks.iter().map(|c| (&c.id, c.violation_count)).collect::<Vec<_>>(),
            b.checks.iter().map(|c| (&c.id, c.violation_count)).collect::<Vec<_>>()
        );
    }

    #[test]
    fn check_selection() {
        assert_eq!(select_checks("all").unwrap().len(), CHECKS.len());
        let two = select_checks("cut-law, counts").unwrap();
        assert_eq!(two.iter().map(|c| c.id).collect::<Vec<_>>(), ["cut-law", "counts"]);
        assert!(select_checks("cut-law,bogus").is_err());
    }
}
