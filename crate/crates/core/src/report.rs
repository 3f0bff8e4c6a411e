//! Machine-readable solver output: the `--stats json` document, the
//! `--stats csv` table and bench rows.

use serde::Serialize;

use crate::net::PetriNet;
use crate::solver::{IterationStats, SolveResult, Verdict};

/// JSON Schema for [`SolveReport`], as published in `schema/`.
pub const SOLVE_REPORT_SCHEMA: &str = include_str!("../schema/solve-report.schema.json");

#[derive(Debug, Clone, Serialize)]
pub struct Totals {
    pub iterations: usize,
    pub extensions: usize,
    pub basis_final_size: usize,
    pub candidates: usize,
    pub pruned: usize,
    pub admitted: usize,
    pub lp_calls: u64,
    pub sign_checks: u64,
    pub steps: u64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub problem: String,
    pub target_index: usize,
    pub target: Vec<String>,
    pub invariant: String,
    pub preprocess: String,
    pub transitions_removed: Vec<String>,
    pub verdict: Verdict,
    pub target_in_invariant: bool,
    pub witness: Option<Vec<String>>,
    pub iterations: Vec<IterationStats>,
    pub totals: Totals,
}

pub struct ReportContext<'a> {
    pub problem: &'a str,
    pub target_index: usize,
    pub preprocess: &'a str,
    pub transitions_removed: Vec<String>,
    pub wall_time_ms: f64,
}

impl SolveReport {
    pub fn new(net: &PetriNet, target: &crate::net::Marking, r: &SolveResult, ctx: ReportContext<'_>) -> Self {
        let witness = r.witness.as_ref().map(|w| {
            w.iter()
                .map(|&t| net.transitions()[t.0].name.clone())
                .collect()
        });
        SolveReport {
            problem: ctx.problem.to_string(),
            target_index: ctx.target_index,
            target: target.counts().iter().map(ToString::to_string).collect(),
            invariant: r.invariant.clone(),
            preprocess: ctx.preprocess.to_string(),
            transitions_removed: ctx.transitions_removed,
            verdict: r.verdict,
            target_in_invariant: r.target_in_invariant,
            witness,
            iterations: r.stats.clone(),
            totals: Totals {
                iterations: r.iterations(),
                extensions: r.extensions(),
                basis_final_size: r.final_basis.len(),
                candidates: r.total_candidates(),
                pruned: r.total_pruned() + usize::from(!r.target_in_invariant),
                admitted: r.total_admitted(),
                lp_calls: r.counters.lp_calls,
                sign_checks: r.counters.sign_checks,
                steps: r.steps,
                wall_time_ms: ctx.wall_time_ms,
            },
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Per-iteration rows followed by a `total` row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(
            "iteration,basis_size,candidates_generated,new_after_antichain,pruned_by_invariant,kept,lp_calls,sign_checks,wall_time_ms\n",
        );
        for s in &self.iterations {
            out.push_str(&format!(
                "{},{},{},{},{},{},,,\n",
                s.iteration,
                s.basis_size,
                s.candidates_generated,
                s.new_after_antichain,
                s.pruned_by_invariant,
                s.kept
            ));
        }
        let t = &self.totals;
        let new: usize = self.iterations.iter().map(|s| s.new_after_antichain).sum();
        let kept: usize = self.iterations.iter().map(|s| s.kept).sum();
        out.push_str(&format!(
            "total,{},{},{},{},{},{},{},{:.3}\n",
            t.basis_final_size, t.candidates, new, t.pruned, kept, t.lp_calls, t.sign_checks, t.wall_time_ms
        ));
        out
    }
}

pub const BENCH_HEADER: &str =
    "name,config,verdict,iterations,basis_final_size,candidates,pruned,lp_calls,millis";

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub name: String,
    pub config: String,
    /// `COVERABLE`, `UNCOVERABLE`, `TIMEOUT` or `ERROR`.
    pub verdict: String,
    pub iterations: usize,
    pub basis_final_size: usize,
    pub candidates: usize,
    pub pruned: usize,
    pub lp_calls: u64,
    pub millis: u128,
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl BenchRow {
    pub fn from_result(name: &str, config: &str, r: &SolveResult, millis: u128) -> Self {
        BenchRow {
            name: name.to_string(),
            config: config.to_string(),
            verdict: match r.verdict {
                Verdict::Inconclusive => "TIMEOUT".to_string(),
                v => v.to_string(),
            },
            iterations: r.iterations(),
            basis_final_size: r.final_basis.len(),
            candidates: r.total_candidates(),
            pruned: r.total_pruned() + usize::from(!r.target_in_invariant),
            lp_calls: r.counters.lp_calls,
            millis,
        }
    }

    pub fn error(name: &str, config: &str) -> Self {
        BenchRow {
            name: name.to_string(),
            config: config.to_string(),
            verdict: "ERROR".to_string(),
            iterations: 0,
            basis_final_size: 0,
            candidates: 0,
            pruned: 0,
            lp_calls: 0,
            millis: 0,
        }
    }

    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            csv_field(&self.name),
            csv_field(&self.config),
            self.verdict,
            self.iterations,
            self.basis_final_size,
            self.candidates,
            self.pruned,
            self.lp_calls,
            self.millis
        )
    }
}
