//! Checks shared by the property tests and the acceptance run. Each returns
//! a description of the first problem found, or a count of violations.

use coverlib::invariants::sign_sequence;
use coverlib::preprocess::{preprocess, PreprocessOptions};
use coverlib::solver::{icover_with, SolveOptions, SolveResult};
use coverlib::{
    bounded_cover, reachable_markings, ExploreBound, InvariantHandle, Marking, OracleOutcome,
    PetriNet, PruneMode, TransitionId, Verdict,
};
use num_traits::ToPrimitive;

/// The invariant configurations every agreement check runs.
pub const CONFIGS: [&str; 4] = ["trivial", "sign", "state", "sign,state"];

/// Safety net on solver work; hitting it counts as a failure.
pub const STEP_CEILING: u64 = 2_000_000;

pub const CAP: u64 = 10;
pub const NODE_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Truth {
    Coverable,
    Uncoverable,
    /// The oracle ran out of box; only positive solver answers can be checked.
    Unknown,
}

pub fn truth(net: &PetriNet, target: &Marking) -> Truth {
    match bounded_cover(net, target, ExploreBound::new(CAP, NODE_CAP)) {
        OracleOutcome::Coverable(_) => Truth::Coverable,
        OracleOutcome::ExhaustedUncoverable => Truth::Uncoverable,
        OracleOutcome::BoundHit => Truth::Unknown,
    }
}

pub fn solve(net: &PetriNet, target: &Marking, config: &str, record: bool) -> SolveResult {
    let inv = InvariantHandle::from_list(net, config).unwrap();
    let opts = SolveOptions {
        step_budget: Some(STEP_CEILING),
        record_bases: record,
        ..SolveOptions::default()
    };
    icover_with(net, target, &inv, &opts).unwrap()
}

pub fn replay_covers(net: &PetriNet, seq: &[TransitionId], target: &Marking) -> bool {
    match net.replay(net.initial_marking(), seq) {
        Ok(Some(end)) => target.leq(&end).unwrap(),
        _ => false,
    }
}

/// Compares one solver run with the oracle's answer.
pub fn agrees(net: &PetriNet, target: &Marking, truth: &Truth, r: &SolveResult) -> Result<(), String> {
    match (r.verdict, truth) {
        (Verdict::Inconclusive, _) => Err("step ceiling reached".into()),
        (Verdict::Coverable, Truth::Uncoverable) => Err("solver COVERABLE, oracle exhausted".into()),
        (Verdict::Uncoverable, Truth::Coverable) => Err("solver UNCOVERABLE, oracle found a run".into()),
        (Verdict::Coverable, _) => {
            let w = r.witness.as_deref().ok_or("coverable without witness")?;
            if replay_covers(net, w, target) {
                Ok(())
            } else {
                Err(format!("witness {w:?} does not replay"))
            }
        }
        (Verdict::Uncoverable, _) => Ok(()),
    }
}

/// Runs every configuration and reports the first disagreement.
pub fn check_instance(net: &PetriNet, target: &Marking, truth: &Truth) -> Result<(), String> {
    for c in CONFIGS {
        let r = solve(net, target, c, false);
        agrees(net, target, truth, &r).map_err(|e| format!("[{c}] {e}"))?;
    }
    Ok(())
}

/// Reachable markings inside the oracle box that some invariant rejects.
pub fn soundness_violations(net: &PetriNet) -> usize {
    let ex = reachable_markings(net, ExploreBound::new(CAP, NODE_CAP));
    let invs = [
        InvariantHandle::sign(net),
        InvariantHandle::state(net),
        InvariantHandle::from_list(net, "sign,state").unwrap(),
    ];
    ex.markings()
        .iter()
        .map(|m| invs.iter().filter(|i| !i.member(m).unwrap()).count())
        .sum()
}

fn to_u64s(m: &Marking) -> Vec<u64> {
    m.counts().iter().map(|c| c.to_u64().unwrap()).collect()
}

fn geq(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// For each `m` in `ms` (entries at most `max_entry`), compares
/// `{u : fire(u,t) ≥ m}` with `↑cpre(t,m)` over the box
/// `[0, max_entry + max weight]^P`. Returns the number of disagreeing
/// `(m, u)` pairs.
pub fn cpre_box_violations(net: &PetriNet, t: TransitionId, ms: &[Marking], max_entry: u64) -> usize {
    let tr = net.transition(t).unwrap();
    let max_f = tr
        .pre
        .iter()
        .chain(&tr.post)
        .map(|k| k.to_u64().unwrap())
        .max()
        .unwrap_or(0);
    let side = max_entry + max_f + 1;
    let dim = net.num_places();
    let total = side.pow(dim as u32) as usize;

    // fire once per box point, reuse for every m
    let mut points = Vec::with_capacity(total);
    for code in 0..total {
        let mut c = code as u64;
        let u: Vec<u64> = (0..dim)
            .map(|_| {
                let d = c % side;
                c /= side;
                d
            })
            .collect();
        let fired = net
            .fire(&Marking::from_u64s(&u), t)
            .unwrap()
            .map(|m1| to_u64s(&m1));
        points.push((u, fired));
    }

    let mut bad = 0;
    for m in ms {
        let mv = to_u64s(m);
        let c = to_u64s(&net.cpre(t, m).unwrap());
        for (u, fired) in &points {
            let lhs = fired.as_ref().is_some_and(|f| geq(f, &mv));
            let rhs = geq(u, &c);
            if lhs != rhs {
                bad += 1;
            }
        }
    }
    bad
}

/// `↑B_k(pruned) ⊆ ↑B_k(trivial)` at every pass both runs reached.
pub fn containment(trivial: &SolveResult, pruned: &SolveResult) -> Result<(), String> {
    let (a, b) = (
        trivial.bases.as_ref().ok_or("no bases recorded")?,
        pruned.bases.as_ref().ok_or("no bases recorded")?,
    );
    for (k, (bt, bp)) in a.iter().zip(b).enumerate() {
        for e in bp.elements() {
            if !bt.contains_upward(e).unwrap() {
                return Err(format!("pass {k}: {e} not above the classical basis"));
            }
        }
    }
    Ok(())
}

/// Verdicts before and after pruning agree, for both modes and with and
/// without the state inequation.
pub fn preprocess_preserves(net: &PetriNet, target: &Marking) -> Result<(), String> {
    let before: Vec<Verdict> = CONFIGS.iter().map(|c| solve(net, target, c, false).verdict).collect();
    for mode in [PruneMode::Once, PruneMode::Fixpoint] {
        for use_state in [false, true] {
            let opts = PreprocessOptions {
                mode,
                use_state,
                drop_places: false,
            };
            let pp = preprocess(net, std::slice::from_ref(target), &opts);
            for (c, v) in CONFIGS.iter().zip(&before) {
                let after = solve(&pp.net, &pp.targets[0], c, false).verdict;
                if after != *v {
                    return Err(format!(
                        "{mode}/state={use_state} [{c}]: {v} before, {after} after"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// The sign sequence grows monotonically and repeats within `|P|` steps.
pub fn sign_stabilises(net: &PetriNet) -> Result<(), String> {
    let seq = sign_sequence(net);
    if seq.windows(2).any(|w| !w[0].is_subset(&w[1])) {
        return Err("Q_k decreased".into());
    }
    // Q_0 … Q_k with Q_k = Q_{k-1}: at most |P| strict steps
    if seq.len() > net.num_places() + 2 {
        return Err(format!("{} rounds for {} places", seq.len(), net.num_places()));
    }
    let fix = coverlib::sign_analysis(net);
    if seq.last() != Some(fix.q()) {
        return Err("worklist and literal fixpoint differ".into());
    }
    Ok(())
}
