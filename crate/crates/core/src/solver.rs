//! Backward coverability with invariant pruning.
//!
//! Starting from the target, the solver grows a basis `B` of the upward-closed
//! set of markings known to cover the target. Each round computes the covering
//! predecessors of `B`, drops those already in `↑B`, discards those outside the
//! invariant and merges the rest into `B`. The run answers "coverable" once the
//! initial marking lies in `↑B` and "uncoverable" when a round adds nothing.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::invariants::{InvariantError, InvariantHandle, MembershipCounters};
use crate::net::{cpre_unchecked, Marking, NetError, PetriNet, TransitionId};
use crate::upset::Basis;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Net(#[from] NetError),

    #[error(transparent)]
    Invariant(#[from] InvariantError),

    #[error("invariant handle was built for a different net")]
    ForeignInvariant,

    #[error("backward chain broken at node {0}")]
    BrokenChain(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Coverable,
    Uncoverable,
    /// Only produced when a step budget or deadline cut the run short.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Coverable => "COVERABLE",
            Verdict::Uncoverable => "UNCOVERABLE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Counters for one pass of the main loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IterationStats {
    pub iteration: usize,
    /// `|B|` when the pass starts.
    pub basis_size: usize,
    /// Raw number of covering predecessors computed.
    pub candidates_generated: usize,
    /// Distinct candidates outside `↑B`.
    pub new_after_antichain: usize,
    pub pruned_by_invariant: usize,
    /// Candidates merged into `B`.
    pub kept: usize,
}

/// A marking reached backwards, with the transition and parent it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackNode {
    pub marking: Marking,
    /// `(t, parent)` such that `marking = cpre(t, parent.marking)`.
    pub via: Option<(TransitionId, usize)>,
}

/// Every marking the backward search produced, linked to its successor.
#[derive(Debug, Clone, Default)]
pub struct BackGraph {
    nodes: Vec<BackNode>,
}

impl BackGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, node: BackNode) -> usize {
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[BackNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> Option<&BackNode> {
        self.nodes.get(i)
    }
}

/// Follows `via` links from `node` to its root and replays the transitions
/// from `start`. Firing `t` from any marking above `cpre(t, m)` lands above
/// `m`, so the replay ends above the root.
pub fn extract_witness(
    net: &PetriNet,
    graph: &BackGraph,
    node: usize,
    start: &Marking,
) -> Result<Vec<TransitionId>, SolveError> {
    let mut seq = Vec::new();
    let mut cur = node;
    let mut hops = 0;
    loop {
        let n = graph.node(cur).ok_or(SolveError::BrokenChain(cur))?;
        match n.via {
            None => break,
            Some((t, parent)) => {
                seq.push(t);
                cur = parent;
            }
        }
        hops += 1;
        if hops > graph.nodes.len() {
            return Err(SolveError::BrokenChain(cur));
        }
    }
    let root = &graph.nodes[cur].marking;
    match net.replay(start, &seq)? {
        Some(end) if root.leq(&end)? => Ok(seq),
        _ => Err(SolveError::BrokenChain(node)),
    }
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    /// Maximum number of covering-predecessor computations.
    pub step_budget: Option<u64>,
    pub deadline: Option<Instant>,
    /// Keep a copy of `B` at the start of every pass.
    pub record_bases: bool,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub verdict: Verdict,
    pub witness: Option<Vec<TransitionId>>,
    pub stats: Vec<IterationStats>,
    pub invariant: String,
    pub counters: MembershipCounters,
    /// Whether the target itself passed the invariant test.
    pub target_in_invariant: bool,
    pub final_basis: Basis,
    /// `B` at the start of each pass, when requested.
    pub bases: Option<Vec<Basis>>,
    pub steps: u64,
}

impl SolveResult {
    /// Number of passes through the main loop.
    pub fn iterations(&self) -> usize {
        self.stats.len()
    }

    /// Passes that added at least one marking to `B`.
    pub fn extensions(&self) -> usize {
        self.stats.iter().filter(|s| s.kept > 0).count()
    }

    pub fn total_candidates(&self) -> usize {
        self.stats.iter().map(|s| s.candidates_generated).sum()
    }

    pub fn total_pruned(&self) -> usize {
        self.stats.iter().map(|s| s.pruned_by_invariant).sum()
    }

    /// Markings admitted into `B` over the whole run, the initial target
    /// included.
    pub fn total_admitted(&self) -> usize {
        usize::from(self.target_in_invariant) + self.stats.iter().map(|s| s.kept).sum::<usize>()
    }
}

/// Decides whether `target` is coverable, pruning with `inv`.
pub fn icover(
    net: &PetriNet,
    target: &Marking,
    inv: &InvariantHandle,
) -> Result<SolveResult, SolveError> {
    icover_with(net, target, inv, &SolveOptions::default())
}

/// Backward search without pruning.
pub fn classical_backward(net: &PetriNet, target: &Marking) -> Result<SolveResult, SolveError> {
    icover(net, target, &InvariantHandle::trivial(net))
}

pub fn icover_with(
    net: &PetriNet,
    target: &Marking,
    inv: &InvariantHandle,
    opts: &SolveOptions,
) -> Result<SolveResult, SolveError> {
    net.check_marking(target)?;
    if !inv.is_for(net) {
        return Err(SolveError::ForeignInvariant);
    }
    let init = net.initial_marking();
    let mut counters = MembershipCounters::default();
    let mut graph = BackGraph::new();
    // node id of every marking admitted to B
    let mut node_of: HashMap<Marking, usize> = HashMap::new();
    let mut basis = Basis::empty();

    let target_in_invariant = inv.member_counted(target, &mut counters)?;
    if target_in_invariant {
        let id = graph.push(BackNode {
            marking: target.clone(),
            via: None,
        });
        node_of.insert(target.clone(), id);
        basis.insert(target.clone())?;
    }

    let mut stats = Vec::new();
    let mut bases = opts.record_bases.then(Vec::new);
    let mut steps: u64 = 0;

    let finish = |verdict, witness, stats, counters, basis, bases, steps| SolveResult {
        verdict,
        witness,
        stats,
        invariant: inv.describe(),
        counters,
        target_in_invariant,
        final_basis: basis,
        bases,
        steps,
    };

    loop {
        if let Some(bs) = bases.as_mut() {
            bs.push(basis.clone());
        }
        if let Some(hit) = basis.find_below(init)? {
            let node = node_of[hit];
            let witness = extract_witness(net, &graph, node, init)?;
            return Ok(finish(
                Verdict::Coverable,
                Some(witness),
                stats,
                counters,
                basis,
                bases,
                steps,
            ));
        }

        let mut iter = IterationStats {
            iteration: stats.len(),
            basis_size: basis.len(),
            candidates_generated: 0,
            new_after_antichain: 0,
            pruned_by_invariant: 0,
            kept: 0,
        };

        let mut seen: HashSet<Marking> = HashSet::new();
        let mut fresh: Vec<(Marking, TransitionId, usize)> = Vec::new();
        for t in net.transition_ids() {
            let tr = &net.transitions()[t.0];
            for x in basis.elements() {
                steps += 1;
                let out_of_budget = opts.step_budget.is_some_and(|b| steps > b)
                    || (steps.is_multiple_of(64) && opts.deadline.is_some_and(|d| Instant::now() >= d));
                if out_of_budget {
                    stats.push(iter);
                    return Ok(finish(
                        Verdict::Inconclusive,
                        None,
                        stats,
                        counters,
                        basis,
                        bases,
                        steps,
                    ));
                }
                iter.candidates_generated += 1;
                let c = cpre_unchecked(tr, x);
                if basis.covers_unchecked(&c) || !seen.insert(c.clone()) {
                    continue;
                }
                fresh.push((c, t, node_of[x]));
            }
        }
        iter.new_after_antichain = fresh.len();

        let mut kept = Vec::new();
        for (c, t, parent) in fresh {
            if inv.member_counted(&c, &mut counters)? {
                kept.push((c, t, parent));
            } else {
                iter.pruned_by_invariant += 1;
            }
        }
        iter.kept = kept.len();
        stats.push(iter);

        if kept.is_empty() {
            return Ok(finish(
                Verdict::Uncoverable,
                None,
                stats,
                counters,
                basis,
                bases,
                steps,
            ));
        }

        for (c, t, parent) in kept {
            if basis.insert(c.clone())? {
                let id = graph.push(BackNode {
                    marking: c.clone(),
                    via: Some((t, parent)),
                });
                node_of.insert(c, id);
            }
        }
        debug_assert!(basis.is_antichain());
    }
}
