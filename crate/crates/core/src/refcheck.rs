//! Brute-force forward exploration inside a bounded box.
//!
//! Used as a ground-truth oracle: when the breadth-first closure of the
//! initial marking never leaves the box, the explored set is exactly the
//! reachability set and negative coverability answers are exact.

use std::collections::{HashMap, VecDeque};

use num_traits::ToPrimitive;

use crate::net::{Marking, PetriNet, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExploreBound {
    /// Largest token count allowed in any place.
    pub per_place_cap: u64,
    /// Largest number of distinct markings to visit.
    pub node_cap: usize,
}

impl ExploreBound {
    pub fn new(per_place_cap: u64, node_cap: usize) -> Self {
        assert!(per_place_cap > 0 && node_cap > 0, "bounds must be positive");
        ExploreBound {
            per_place_cap,
            node_cap,
        }
    }
}

impl Default for ExploreBound {
    fn default() -> Self {
        ExploreBound::new(10, 200_000)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    /// Shortest firing sequence reaching a marking above the target.
    Coverable(Vec<TransitionId>),
    /// The whole reachability set was enumerated inside the box.
    ExhaustedUncoverable,
    /// Exploration was cut by a bound before reaching a verdict.
    BoundHit,
}

/// The explored part of the reachability set.
#[derive(Debug, Clone)]
pub struct Exploration {
    markings: Vec<Marking>,
    parent: Vec<Option<(usize, TransitionId)>>,
    /// Every reachable marking was visited without leaving the box.
    pub closed: bool,
}

impl Exploration {
    /// Markings in breadth-first order; the first is the initial marking.
    pub fn markings(&self) -> &[Marking] {
        &self.markings
    }

    /// Firing sequence from the initial marking to `markings()[i]`.
    pub fn path_to(&self, i: usize) -> Vec<TransitionId> {
        let mut seq = Vec::new();
        let mut cur = i;
        while let Some((p, t)) = self.parent[cur] {
            seq.push(t);
            cur = p;
        }
        seq.reverse();
        seq
    }
}

struct Dense {
    pre: Vec<Vec<u64>>,
    post: Vec<Vec<u64>>,
}

fn to_u64(m: &Marking) -> Option<Vec<u64>> {
    m.counts().iter().map(ToPrimitive::to_u64).collect()
}

fn densify(net: &PetriNet) -> Dense {
    // weights beyond u64 can never fire inside a u64 box; saturate them
    let conv = |v: &[num_bigint::BigUint]| -> Vec<u64> {
        v.iter().map(|k| k.to_u64().unwrap_or(u64::MAX)).collect()
    };
    Dense {
        pre: net.transitions().iter().map(|t| conv(&t.pre)).collect(),
        post: net.transitions().iter().map(|t| conv(&t.post)).collect(),
    }
}

/// Breadth-first search; `stop` is checked on every newly discovered marking.
fn explore(
    net: &PetriNet,
    b: ExploreBound,
    mut stop: impl FnMut(&[u64]) -> bool,
) -> (Exploration, Option<usize>) {
    let dense = densify(net);
    let cap = b.per_place_cap;
    let mut ex = Exploration {
        markings: Vec::new(),
        parent: Vec::new(),
        closed: false,
    };
    let init = match to_u64(net.initial_marking()) {
        Some(v) if v.iter().all(|&c| c <= cap) => v,
        _ => {
            let hit = to_u64(net.initial_marking()).is_some_and(|v| stop(&v));
            ex.markings.push(net.initial_marking().clone());
            ex.parent.push(None);
            return (ex, hit.then_some(0));
        }
    };

    let mut index: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut raw: Vec<Vec<u64>> = Vec::new();
    let mut queue = VecDeque::new();
    let mut left_box = false;

    index.insert(init.clone(), 0);
    raw.push(init.clone());
    ex.parent.push(None);
    if stop(&init) {
        ex.markings = raw.iter().map(|v| Marking::from_u64s(v)).collect();
        return (ex, Some(0));
    }
    queue.push_back(0);

    while let Some(i) = queue.pop_front() {
        for t in 0..dense.pre.len() {
            let cur = &raw[i];
            if cur.iter().zip(&dense.pre[t]).any(|(h, n)| h < n) {
                continue;
            }
            let next: Option<Vec<u64>> = cur
                .iter()
                .zip(dense.pre[t].iter().zip(&dense.post[t]))
                .map(|(h, (pre, post))| (h - pre).checked_add(*post).filter(|&v| v <= cap))
                .collect();
            let Some(next) = next else {
                left_box = true;
                continue;
            };
            if index.contains_key(&next) {
                continue;
            }
            if raw.len() >= b.node_cap {
                ex.markings = raw.iter().map(|v| Marking::from_u64s(v)).collect();
                return (ex, None);
            }
            let id = raw.len();
            index.insert(next.clone(), id);
            ex.parent.push(Some((i, TransitionId(t))));
            let found = stop(&next);
            raw.push(next);
            if found {
                ex.markings = raw.iter().map(|v| Marking::from_u64s(v)).collect();
                return (ex, Some(id));
            }
            queue.push_back(id);
        }
    }
    ex.closed = !left_box;
    ex.markings = raw.iter().map(|v| Marking::from_u64s(v)).collect();
    (ex, None)
}

/// Decides coverability of `target` by forward search inside the box.
pub fn bounded_cover(net: &PetriNet, target: &Marking, b: ExploreBound) -> OracleOutcome {
    // a target entry beyond u64 is beyond the box as well
    let want = to_u64(target);
    let (ex, hit) = explore(net, b, |m| {
        want.as_ref()
            .is_some_and(|w| m.iter().zip(w).all(|(have, need)| have >= need))
    });
    match hit {
        Some(i) => OracleOutcome::Coverable(ex.path_to(i)),
        None if ex.closed => OracleOutcome::ExhaustedUncoverable,
        None => OracleOutcome::BoundHit,
    }
}

/// Enumerates the reachable markings inside the box.
pub fn reachable_markings(net: &PetriNet, b: ExploreBound) -> Exploration {
    explore(net, b, |_| false).0
}
