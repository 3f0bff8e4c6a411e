//! Downward-closed invariants used to prune the backward search.
//!
//! Two generators are provided: sign analysis, which finds the places that
//! stay empty in every reachable marking, and the state inequation, which
//! keeps markings `m` for which some rational `λ ≥ 0` gives
//! `m_init + Σ λ(t)·Δ(t) ≥ m`.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::net::{Marking, NetError, PetriNet, PlaceId, TransitionId};
use crate::ratlp::{self, FeasibilityProblem};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error(transparent)]
    Net(#[from] NetError),

    #[error("invariant was built for a different net")]
    NetMismatch,

    #[error("intersection of an empty list of invariants")]
    EmptyIntersection,

    #[error("unknown invariant '{0}' (expected trivial, sign or state)")]
    UnknownKind(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InvariantKind {
    Trivial,
    Sign,
    State,
    Intersection,
}

impl InvariantKind {
    /// Rough membership cost, used to order intersection children.
    fn cost(self) -> u8 {
        match self {
            InvariantKind::Trivial => 0,
            InvariantKind::Sign => 1,
            InvariantKind::Intersection => 2,
            InvariantKind::State => 3,
        }
    }
}

impl fmt::Display for InvariantKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InvariantKind::Trivial => "trivial",
            InvariantKind::Sign => "sign",
            InvariantKind::State => "state",
            InvariantKind::Intersection => "intersection",
        })
    }
}

impl FromStr for InvariantKind {
    type Err = InvariantError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "trivial" => Ok(InvariantKind::Trivial),
            "sign" => Ok(InvariantKind::Sign),
            "state" => Ok(InvariantKind::State),
            other => Err(InvariantError::UnknownKind(other.to_string())),
        }
    }
}

/// The sign-analysis fixpoint: `q` may hold tokens, `z` is always empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignResult {
    q: BTreeSet<PlaceId>,
    z: BTreeSet<PlaceId>,
    zero_mask: Vec<bool>,
}

impl SignResult {
    pub fn q(&self) -> &BTreeSet<PlaceId> {
        &self.q
    }

    pub fn z(&self) -> &BTreeSet<PlaceId> {
        &self.z
    }

    pub fn num_places(&self) -> usize {
        self.zero_mask.len()
    }

    /// `m(p) = 0` for every `p ∈ Z`.
    pub fn member(&self, m: &Marking) -> Result<bool, NetError> {
        if m.len() != self.zero_mask.len() {
            return Err(NetError::DomainMismatch {
                expected: self.zero_mask.len(),
                found: m.len(),
            });
        }
        Ok(self
            .zero_mask
            .iter()
            .zip(m.counts())
            .all(|(&zero, c)| !zero || c.is_zero()))
    }
}

/// `prop_t(Q)`: the output places of `t` when every input place of `t` is in
/// `Q`, and the empty set otherwise.
pub fn prop_t(
    net: &PetriNet,
    t: TransitionId,
    q: &BTreeSet<PlaceId>,
) -> Result<BTreeSet<PlaceId>, NetError> {
    let tr = net.transition(t)?;
    let guard = net
        .place_ids()
        .filter(|p| !q.contains(p))
        .all(|p| tr.pre[p.0].is_zero());
    if !guard {
        return Ok(BTreeSet::new());
    }
    Ok(net
        .place_ids()
        .filter(|p| !tr.post[p.0].is_zero())
        .collect())
}

/// Least fixpoint of `Q ↦ Q ∪ ⋃_t prop_t(Q)` from the initially marked
/// places, computed with a per-transition countdown of missing inputs.
pub fn sign_analysis(net: &PetriNet) -> SignResult {
    let n = net.num_places();
    let mut in_q = vec![false; n];
    let mut missing: Vec<usize> = net
        .transitions()
        .iter()
        .map(|t| t.pre.iter().filter(|k| !k.is_zero()).count())
        .collect();
    // consumers[p] = transitions with an input arc from p
    let mut consumers = vec![Vec::new(); n];
    for (ti, t) in net.transitions().iter().enumerate() {
        for (p, k) in t.pre.iter().enumerate() {
            if !k.is_zero() {
                consumers[p].push(ti);
            }
        }
    }

    let mut work: Vec<usize> = Vec::new();
    let mut fired = vec![false; net.num_transitions()];
    let add_place = |p: usize, in_q: &mut Vec<bool>, work: &mut Vec<usize>, missing: &mut Vec<usize>| {
        if in_q[p] {
            return;
        }
        in_q[p] = true;
        for &t in &consumers[p] {
            missing[t] -= 1;
            if missing[t] == 0 {
                work.push(t);
            }
        }
    };

    for p in net.initial_marking().support() {
        add_place(p.0, &mut in_q, &mut work, &mut missing);
    }
    work.extend((0..net.num_transitions()).filter(|&t| missing[t] == 0));

    while let Some(t) = work.pop() {
        if fired[t] {
            continue;
        }
        fired[t] = true;
        let outputs: Vec<usize> = net.transitions()[t]
            .post
            .iter()
            .enumerate()
            .filter(|(_, k)| !k.is_zero())
            .map(|(p, _)| p)
            .collect();
        for p in outputs {
            add_place(p, &mut in_q, &mut work, &mut missing);
        }
    }

    let q = (0..n).filter(|&p| in_q[p]).map(PlaceId).collect();
    let z = (0..n).filter(|&p| !in_q[p]).map(PlaceId).collect();
    SignResult {
        q,
        z,
        zero_mask: in_q.iter().map(|&b| !b).collect(),
    }
}

/// The literal sequence `Q_0 ⊆ Q_1 ⊆ …` up to and including the first
/// repeated set.
pub fn sign_sequence(net: &PetriNet) -> Vec<BTreeSet<PlaceId>> {
    let mut seq = vec![net.initial_marking().support().collect::<BTreeSet<_>>()];
    loop {
        let cur = seq.last().expect("nonempty").clone();
        let mut next = cur.clone();
        for t in net.transition_ids() {
            next.extend(prop_t(net, t, &cur).expect("declared transition"));
        }
        let done = next == cur;
        seq.push(next);
        if done {
            return seq;
        }
    }
}

/// Precomputed state-inequation data: the displacement matrix (rows are
/// places, columns transitions) and the initial marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateInvariant {
    matrix: Vec<Vec<BigInt>>,
    init: Vec<BigInt>,
    transitions: usize,
}

impl StateInvariant {
    pub fn new(net: &PetriNet) -> Self {
        let columns: Vec<Vec<BigInt>> = net
            .transition_ids()
            .map(|t| net.displacement(t).expect("declared transition").deltas().to_vec())
            .collect();
        let matrix = (0..net.num_places())
            .map(|p| columns.iter().map(|c| c[p].clone()).collect())
            .collect();
        StateInvariant {
            matrix,
            init: net
                .initial_marking()
                .counts()
                .iter()
                .map(|c| BigInt::from(c.clone()))
                .collect(),
            transitions: net.num_transitions(),
        }
    }

    pub fn matrix(&self) -> &[Vec<BigInt>] {
        &self.matrix
    }

    /// The feasibility system `Σ λ(t)·Δ(t) ≥ m - m_init`.
    pub fn problem(&self, m: &Marking) -> Result<FeasibilityProblem, NetError> {
        if m.len() != self.init.len() {
            return Err(NetError::DomainMismatch {
                expected: self.init.len(),
                found: m.len(),
            });
        }
        let b = m
            .counts()
            .iter()
            .zip(&self.init)
            .map(|(c, i)| BigInt::from(c.clone()) - i)
            .collect();
        Ok(FeasibilityProblem::new(self.matrix.clone(), b, self.transitions)
            .expect("matrix dimensions fixed at construction"))
    }

    /// Membership, plus whether an LP had to be solved to decide it.
    fn member_inner(&self, m: &Marking) -> Result<(bool, bool), NetError> {
        let p = self.problem(m)?;
        if p.rhs().iter().all(|x| x <= &BigInt::zero()) {
            return Ok((true, false));
        }
        Ok((ratlp::feasible(&p).is_feasible(), true))
    }

    pub fn member(&self, m: &Marking) -> Result<bool, NetError> {
        Ok(self.member_inner(m)?.0)
    }
}

/// Counts of membership work done through a handle.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct MembershipCounters {
    pub lp_calls: u64,
    pub sign_checks: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    Trivial,
    Sign(SignResult),
    State(StateInvariant),
    Intersection(Vec<InvariantHandle>),
}

/// A downward-closed set of markings containing every reachable marking of
/// the net it was built for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantHandle {
    net: u64,
    places: usize,
    repr: Repr,
}

impl InvariantHandle {
    /// All markings.
    pub fn trivial(net: &PetriNet) -> Self {
        Self::wrap(net, Repr::Trivial)
    }

    pub fn sign(net: &PetriNet) -> Self {
        Self::wrap(net, Repr::Sign(sign_analysis(net)))
    }

    pub fn state(net: &PetriNet) -> Self {
        Self::wrap(net, Repr::State(StateInvariant::new(net)))
    }

    pub fn of_kind(net: &PetriNet, kind: InvariantKind) -> Result<Self, InvariantError> {
        match kind {
            InvariantKind::Trivial => Ok(Self::trivial(net)),
            InvariantKind::Sign => Ok(Self::sign(net)),
            InvariantKind::State => Ok(Self::state(net)),
            InvariantKind::Intersection => Err(InvariantError::UnknownKind("intersection".into())),
        }
    }

    /// Parses a comma-separated list such as `sign,state` into the
    /// intersection of the named invariants.
    pub fn from_list(net: &PetriNet, list: &str) -> Result<Self, InvariantError> {
        let kinds = list
            .split(',')
            .filter(|s| !s.trim().is_empty())
            .map(str::parse)
            .collect::<Result<Vec<InvariantKind>, _>>()?;
        let mut handles = kinds
            .into_iter()
            .map(|k| Self::of_kind(net, k))
            .collect::<Result<Vec<_>, _>>()?;
        if handles.len() == 1 {
            return Ok(handles.pop().expect("one handle"));
        }
        Self::intersect(handles)
    }

    fn wrap(net: &PetriNet, repr: Repr) -> Self {
        InvariantHandle {
            net: net.fingerprint(),
            places: net.num_places(),
            repr,
        }
    }

    /// Conjunction of the given handles. Children are evaluated cheapest
    /// first and the test stops at the first rejection.
    pub fn intersect(hs: Vec<InvariantHandle>) -> Result<Self, InvariantError> {
        let first = hs.first().ok_or(InvariantError::EmptyIntersection)?;
        let (net, places) = (first.net, first.places);
        if hs.iter().any(|h| h.net != net || h.places != places) {
            return Err(InvariantError::NetMismatch);
        }
        let mut hs = hs;
        hs.sort_by_key(|h| h.kind().cost());
        Ok(InvariantHandle {
            net,
            places,
            repr: Repr::Intersection(hs),
        })
    }

    pub fn kind(&self) -> InvariantKind {
        match self.repr {
            Repr::Trivial => InvariantKind::Trivial,
            Repr::Sign(_) => InvariantKind::Sign,
            Repr::State(_) => InvariantKind::State,
            Repr::Intersection(_) => InvariantKind::Intersection,
        }
    }

    pub fn is_for(&self, net: &PetriNet) -> bool {
        self.net == net.fingerprint() && self.places == net.num_places()
    }

    pub fn sign_result(&self) -> Option<&SignResult> {
        match &self.repr {
            Repr::Sign(s) => Some(s),
            _ => None,
        }
    }

    pub fn state_invariant(&self) -> Option<&StateInvariant> {
        match &self.repr {
            Repr::State(s) => Some(s),
            _ => None,
        }
    }

    pub fn children(&self) -> &[InvariantHandle] {
        match &self.repr {
            Repr::Intersection(hs) => hs,
            _ => &[],
        }
    }

    /// Short name such as `trivial` or `sign,state`.
    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::Intersection(hs) => hs
                .iter()
                .map(InvariantHandle::describe)
                .collect::<Vec<_>>()
                .join(","),
            _ => self.kind().to_string(),
        }
    }

    pub fn member(&self, m: &Marking) -> Result<bool, InvariantError> {
        self.member_counted(m, &mut MembershipCounters::default())
    }

    pub fn member_counted(
        &self,
        m: &Marking,
        counters: &mut MembershipCounters,
    ) -> Result<bool, InvariantError> {
        if m.len() != self.places {
            return Err(NetError::DomainMismatch {
                expected: self.places,
                found: m.len(),
            }
            .into());
        }
        match &self.repr {
            Repr::Trivial => Ok(true),
            Repr::Sign(s) => {
                counters.sign_checks += 1;
                Ok(s.member(m)?)
            }
            Repr::State(s) => {
                let (inside, solved) = s.member_inner(m)?;
                if solved {
                    counters.lp_calls += 1;
                }
                Ok(inside)
            }
            Repr::Intersection(hs) => {
                for h in hs {
                    if !h.member_counted(m, counters)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}
