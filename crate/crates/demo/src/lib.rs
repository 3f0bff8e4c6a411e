//! Browser bindings for coverlib.
//!
//! Every export takes the problem text and returns a JSON string; failures
//! come back as `{"error": "..."}` so the page never has to catch.

use coverlib::ingest::{emit_native, parse_mist_named, parse_native_named, Problem};
use coverlib::invariants::sign_sequence;
use coverlib::preprocess::{preprocess as run_preprocess, PreprocessOptions, PruneMode};
use coverlib::solver::{icover_with, SolveOptions};
use coverlib::{sign_analysis as run_sign, InvariantHandle, PetriNet, PlaceId};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Predecessor computations allowed per solve, so a runaway instance
/// answers INCONCLUSIVE instead of freezing the tab.
pub const STEP_BUDGET: u64 = 200_000;

#[derive(Serialize)]
struct ErrorOut {
    error: String,
}

fn to_json<T: Serialize>(r: Result<T, String>) -> String {
    match r {
        Ok(v) => serde_json::to_string(&v),
        Err(error) => serde_json::to_string(&ErrorOut { error }),
    }
    .expect("plain data serialises")
}

/// Native format, or the MIST subset when the text starts with `vars`.
fn parse(text: &str) -> Result<Problem, String> {
    let mist = text
        .lines()
        .map(|l| l.trim())
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("vars"));
    let res = if mist {
        parse_mist_named(text, "input")
    } else {
        parse_native_named(text, "input")
    };
    res.map_err(|e| e.to_string())
}

fn names(net: &PetriNet, ps: impl IntoIterator<Item = PlaceId>) -> Vec<String> {
    ps.into_iter().map(|p| net.places()[p.0].clone()).collect()
}

#[derive(Serialize)]
struct SolveOut {
    verdict: String,
    invariant: String,
    witness: Option<Vec<String>>,
    target: Vec<String>,
    iterations: usize,
    basis_final_size: usize,
    candidates: usize,
    pruned: usize,
    admitted: usize,
    lp_calls: u64,
    basis: Vec<Vec<String>>,
}

fn solve_inner(text: &str, target_index: usize, invariant: &str) -> Result<SolveOut, String> {
    let p = parse(text)?;
    let target = p
        .targets
        .get(target_index)
        .ok_or_else(|| format!("target {target_index} does not exist ({} target(s))", p.targets.len()))?;
    let inv = InvariantHandle::from_list(&p.net, invariant).map_err(|e| e.to_string())?;
    let opts = SolveOptions {
        step_budget: Some(STEP_BUDGET),
        ..SolveOptions::default()
    };
    let r = icover_with(&p.net, target, &inv, &opts).map_err(|e| e.to_string())?;
    Ok(SolveOut {
        verdict: r.verdict.to_string(),
        invariant: r.invariant.clone(),
        witness: r.witness.as_ref().map(|w| {
            w.iter()
                .map(|t| p.net.transitions()[t.0].name.clone())
                .collect()
        }),
        target: target.counts().iter().map(ToString::to_string).collect(),
        iterations: r.iterations(),
        basis_final_size: r.final_basis.len(),
        candidates: r.total_candidates(),
        pruned: r.total_pruned() + usize::from(!r.target_in_invariant),
        admitted: r.total_admitted(),
        lp_calls: r.counters.lp_calls,
        basis: r
            .final_basis
            .sorted_elements()
            .iter()
            .map(|m| m.counts().iter().map(ToString::to_string).collect())
            .collect(),
    })
}

/// Runs the pruned backward search on target `target_index`.
/// `invariant` is a comma-separated subset of `trivial,sign,state`.
#[wasm_bindgen]
pub fn solve(net_text: &str, target_index: usize, invariant: &str) -> String {
    to_json(solve_inner(net_text, target_index, invariant))
}

#[derive(Serialize)]
struct PreprocessOut {
    net: String,
    report: coverlib::preprocess::PreprocessReport,
}

fn preprocess_inner(text: &str, mode: &str) -> Result<PreprocessOut, String> {
    let p = parse(text)?;
    let mode: PruneMode = mode.parse()?;
    let opts = PreprocessOptions {
        mode,
        ..PreprocessOptions::default()
    };
    let pp = run_preprocess(&p.net, &p.targets, &opts);
    let reduced = Problem {
        name: p.name,
        net: pp.net,
        targets: pp.targets,
    };
    Ok(PreprocessOut {
        net: emit_native(&reduced),
        report: pp.report,
    })
}

/// Dead-transition pruning; `mode` is `once` or `fixpoint`.
#[wasm_bindgen]
pub fn preprocess(net_text: &str, mode: &str) -> String {
    to_json(preprocess_inner(net_text, mode))
}

#[derive(Serialize)]
struct SignOut {
    q: Vec<String>,
    z: Vec<String>,
    /// `Q_0, Q_1, …` up to the first repeat.
    rounds: Vec<Vec<String>>,
    dead: Vec<String>,
}

fn sign_inner(text: &str) -> Result<SignOut, String> {
    let p = parse(text)?;
    let net = &p.net;
    let s = run_sign(net);
    let inv = InvariantHandle::sign(net);
    let mut dead = Vec::new();
    for t in net.transition_ids() {
        let m_t = net.min_enabling_marking(t).map_err(|e| e.to_string())?;
        if !inv.member(&m_t).map_err(|e| e.to_string())? {
            dead.push(net.transitions()[t.0].name.clone());
        }
    }
    Ok(SignOut {
        q: names(net, s.q().iter().copied()),
        z: names(net, s.z().iter().copied()),
        rounds: sign_sequence(net)
            .into_iter()
            .map(|q| names(net, q))
            .collect(),
        dead,
    })
}

/// Places that may hold tokens (`q`), places that never do (`z`), and the
/// transitions that can therefore never fire.
#[wasm_bindgen]
pub fn sign_analysis(net_text: &str) -> String {
    to_json(sign_inner(net_text))
}
