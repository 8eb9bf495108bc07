//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if
//! any criterion fails.

mod oracle;
mod properties;
mod snapshot;

use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

pub struct Outcome {
    pub pass: bool,
    pub detail: String,
}

impl Outcome {
    pub fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

type Check = fn() -> Outcome;

const CRITERIA: [(&str, Check); 14] = [
    ("metric oracles", properties::metric_oracles),
    ("OLS equivalence", properties::ols_equivalence),
    ("kNN correctness", properties::knn_correctness),
    ("tree-bag behaviour", properties::treebag_checks),
    ("ADF calibration", properties::adf_calibration),
    ("permutation property", properties::permutation_property),
    ("scenario grid engine", properties::grid_engine),
    ("VAR recovery", properties::var_recovery),
    ("3-param tree-bag performance bar", snapshot::performance_bar),
    ("importance ranking", snapshot::importance_ranking),
    ("ECB vs 3-param model family", snapshot::model_family_ordering),
    ("hold-out direction", snapshot::holdout_direction),
    ("benchmark: only ML predicts a decrease", snapshot::benchmark_claim),
    ("linear coefficient signs", snapshot::coefficient_signs),
];

fn main() -> ExitCode {
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    let mut ran = 0;
    for (i, (name, check)) in CRITERIA.iter().enumerate() {
        let id = format!("C{}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| *f == id || name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Outcome::new(false, format!("panicked: {msg}"))
        });
        if !outcome.pass {
            failed += 1;
        }
        println!(
            "{} {id:<3} {name}: {} [{:.1}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
