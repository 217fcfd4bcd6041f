//! Corpus evaluation: how often the expected tactic is recommended, and how
//! quickly recommendations come back.

use std::time::Duration;

use serde::Serialize;

use crate::frontend::{parse_theory, ParseOptions};
use crate::heuristics::HeuristicSet;
use crate::pipeline::{advise_with_budget, coincides_under, Config};

/// Ranks at which coincidence is reported.
pub const COINCIDENCE_KS: [usize; 4] = [1, 3, 5, 10];
/// Budgets, in milliseconds, at which return rates are reported.
pub const RETURN_TIMEOUTS_MS: [u64; 5] = [200, 500, 1000, 2000, 5000];

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GoalRecord {
    pub file: String,
    pub goal: String,
    pub expected: String,
    /// Rank of the first recommendation coinciding with the expectation.
    pub rank: Option<usize>,
    pub recommendations: usize,
    pub truncated: bool,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Rate<K> {
    pub at: K,
    pub rate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileSummary {
    pub file: String,
    pub evaluated: usize,
    pub skipped: usize,
    pub coincidence: Vec<Rate<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FileFailure {
    pub file: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EvalReport {
    pub budget_ms: u64,
    pub total_goals: usize,
    pub evaluated: usize,
    pub skipped: usize,
    pub failures: Vec<FileFailure>,
    pub coincidence: Vec<Rate<usize>>,
    pub return_rate: Vec<Rate<u64>>,
    pub median_ms: f64,
    pub files: Vec<FileSummary>,
    pub goals: Vec<GoalRecord>,
}

fn coincidence_rates(records: &[&GoalRecord]) -> Vec<Rate<usize>> {
    COINCIDENCE_KS
        .iter()
        .map(|&k| Rate {
            at: k,
            rate: fraction(records.iter().filter(|r| r.rank.is_some_and(|x| x <= k)).count(), records.len()),
        })
        .collect()
}

fn fraction(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        (xs[m - 1] + xs[m]) / 2.0
    }
}

/// Evaluates every annotated goal of every source. Each goal gets one run
/// under `budget`; a goal counts as returned within a shorter timeout when
/// that run completed with at least one recommendation in no more time.
pub fn evaluate(
    sources: &[(String, String)],
    hs: &HeuristicSet,
    config: &Config,
    opts: &ParseOptions,
    budget: Duration,
) -> EvalReport {
    let mut report = EvalReport {
        budget_ms: budget.as_millis() as u64,
        total_goals: 0,
        evaluated: 0,
        skipped: 0,
        failures: Vec::new(),
        coincidence: Vec::new(),
        return_rate: Vec::new(),
        median_ms: 0.0,
        files: Vec::new(),
        goals: Vec::new(),
    };
    for (file, text) in sources {
        let env = match parse_theory(text, opts) {
            Ok(env) => env,
            Err(e) => {
                report.failures.push(FileFailure {
                    file: file.clone(),
                    message: e.to_string(),
                });
                continue;
            }
        };
        let mut summary = FileSummary {
            file: file.clone(),
            evaluated: 0,
            skipped: 0,
            coincidence: Vec::new(),
        };
        let first = report.goals.len();
        for goal in &env.goals {
            report.total_goals += 1;
            let Some(expected) = &goal.expected else {
                summary.skipped += 1;
                continue;
            };
            summary.evaluated += 1;
            let advice = match advise_with_budget(&env, hs, &goal.name, config, budget) {
                Ok(a) => a,
                Err(e) => {
                    report.failures.push(FileFailure {
                        file: file.clone(),
                        message: format!("{}: {e}", goal.name),
                    });
                    continue;
                }
            };
            let rank = advice
                .recommendations
                .iter()
                .find(|r| coincides_under(&env, config, expected, &r.candidate))
                .map(|r| r.rank);
            report.goals.push(GoalRecord {
                file: file.clone(),
                goal: goal.name.clone(),
                expected: expected.to_string(),
                rank,
                recommendations: advice.recommendations.len(),
                truncated: advice.truncated,
                elapsed_ms: advice.elapsed.as_secs_f64() * 1000.0,
            });
        }
        let records: Vec<&GoalRecord> = report.goals[first..].iter().collect();
        summary.coincidence = coincidence_rates(&records);
        report.skipped += summary.skipped;
        report.evaluated += summary.evaluated;
        report.files.push(summary);
    }

    let records: Vec<&GoalRecord> = report.goals.iter().collect();
    report.coincidence = coincidence_rates(&records);
    report.return_rate = RETURN_TIMEOUTS_MS
        .iter()
        .map(|&t| Rate {
            at: t,
            rate: fraction(
                records
                    .iter()
                    .filter(|r| !r.truncated && r.recommendations > 0 && r.elapsed_ms <= t as f64)
                    .count(),
                records.len(),
            ),
        })
        .collect();
    report.median_ms = median(records.iter().map(|r| r.elapsed_ms).collect());
    report
}

impl EvalReport {
    /// The report with every wall-clock dependent field zeroed, for
    /// comparing runs.
    pub fn without_timing(&self) -> EvalReport {
        let mut r = self.clone();
        r.median_ms = 0.0;
        for g in &mut r.goals {
            g.elapsed_ms = 0.0;
        }
        for x in &mut r.return_rate {
            x.rate = 0.0;
        }
        r
    }

    /// Checks the report's internal consistency: rates lie in [0, 1],
    /// coincidence grows with k, return rate grows with the timeout, and
    /// skipped plus evaluated goals account for every goal.
    pub fn check_invariants(&self) -> Result<(), String> {
        let in_range = |x: f64| (0.0..=1.0).contains(&x);
        let mut series: Vec<(&str, Vec<f64>)> = vec![
            ("coincidence", self.coincidence.iter().map(|r| r.rate).collect()),
            ("return rate", self.return_rate.iter().map(|r| r.rate).collect()),
        ];
        for f in &self.files {
            series.push(("file coincidence", f.coincidence.iter().map(|r| r.rate).collect()));
        }
        for (name, xs) in series {
            if let Some(x) = xs.iter().find(|x| !in_range(**x)) {
                return Err(format!("{name} {x} outside [0, 1]"));
            }
            if xs.windows(2).any(|w| w[0] > w[1]) {
                return Err(format!("{name} is not monotone: {xs:?}"));
            }
        }
        if self.skipped + self.evaluated != self.total_goals {
            return Err(format!(
                "{} skipped + {} evaluated != {} goals",
                self.skipped, self.evaluated, self.total_goals
            ));
        }
        Ok(())
    }
}
