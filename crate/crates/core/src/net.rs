//! Petri-net data model: places, transitions, markings and the firing rule.
//!
//! Places and transitions are interned to dense indices when a net is built,
//! so markings are plain vectors indexed by [`PlaceId`]. Token counts and arc
//! multiplicities are arbitrary-precision naturals.

use std::cmp::Ordering;
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;
use thiserror::Error;

/// Errors raised by the net model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("unknown transition index {0}")]
    UnknownTransition(usize),

    #[error("unknown transition '{0}'")]
    UnknownTransitionName(String),

    #[error("unknown place '{0}'")]
    UnknownPlace(String),

    #[error("marking has {found} places, expected {expected}")]
    DomainMismatch { expected: usize, found: usize },

    #[error("duplicate place '{0}'")]
    DuplicatePlace(String),

    #[error("duplicate transition '{0}'")]
    DuplicateTransition(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub usize);

/// Outcome of comparing two markings under the component-wise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarkingOrder {
    Less,
    Equal,
    Greater,
    Incomparable,
}

impl MarkingOrder {
    pub fn is_le(self) -> bool {
        matches!(self, MarkingOrder::Less | MarkingOrder::Equal)
    }

    pub fn is_ge(self) -> bool {
        matches!(self, MarkingOrder::Greater | MarkingOrder::Equal)
    }
}

/// A total map from places to token counts.
///
/// The derived `Ord` is lexicographic and only used to sort output; the
/// coverability order is [`Marking::compare`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(Vec<BigUint>);

impl Marking {
    pub fn zero(places: usize) -> Self {
        Marking(vec![BigUint::zero(); places])
    }

    pub fn new(counts: Vec<BigUint>) -> Self {
        Marking(counts)
    }

    pub fn from_u64s(counts: &[u64]) -> Self {
        Marking(counts.iter().map(|&c| BigUint::from(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, p: PlaceId) -> &BigUint {
        &self.0[p.0]
    }

    pub fn set(&mut self, p: PlaceId, value: BigUint) {
        self.0[p.0] = value;
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Place ids holding at least one token.
    pub fn support(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| PlaceId(i))
    }

    fn check_domain(&self, other: &Marking) -> Result<(), NetError> {
        if self.len() != other.len() {
            return Err(NetError::DomainMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    /// Compares component-wise in a single pass.
    pub fn compare(&self, other: &Marking) -> Result<MarkingOrder, NetError> {
        self.check_domain(other)?;
        Ok(self.compare_unchecked(other))
    }

    pub(crate) fn compare_unchecked(&self, other: &Marking) -> MarkingOrder {
        let mut less = false;
        let mut greater = false;
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.cmp(b) {
                Ordering::Less => less = true,
                Ordering::Greater => greater = true,
                Ordering::Equal => {}
            }
            if less && greater {
                return MarkingOrder::Incomparable;
            }
        }
        match (less, greater) {
            (false, false) => MarkingOrder::Equal,
            (true, false) => MarkingOrder::Less,
            (false, true) => MarkingOrder::Greater,
            (true, true) => MarkingOrder::Incomparable,
        }
    }

    pub(crate) fn le_unchecked(&self, other: &Marking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// `self ≤ other` component-wise.
    pub fn leq(&self, other: &Marking) -> Result<bool, NetError> {
        self.check_domain(other)?;
        Ok(self.le_unchecked(other))
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Per-place token change `F(t,p) - F(p,t)` of one transition.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Displacement(Vec<BigInt>);

impl Displacement {
    pub fn deltas(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub name: String,
    /// `F(p,t)` indexed by place.
    pub pre: Vec<BigUint>,
    /// `F(t,p)` indexed by place.
    pub post: Vec<BigUint>,
}

/// An immutable place/transition net with its initial marking.
#[derive(Debug, Clone)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    init: Marking,
    fingerprint: u64,
}

impl PartialEq for PetriNet {
    fn eq(&self, other: &Self) -> bool {
        self.places == other.places
            && self.transitions == other.transitions
            && self.init == other.init
    }
}

impl Eq for PetriNet {}

impl PetriNet {
    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn num_places(&self) -> usize {
        self.places.len()
    }

    pub fn num_transitions(&self) -> usize {
        self.transitions.len()
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.init
    }

    /// Structural hash used to tie invariant handles to the net they were
    /// computed for.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn place_ids(&self) -> impl Iterator<Item = PlaceId> {
        (0..self.places.len()).map(PlaceId)
    }

    pub fn place_id(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p == name).map(PlaceId)
    }

    pub fn transition_id(&self, name: &str) -> Result<TransitionId, NetError> {
        self.transitions
            .iter()
            .position(|t| t.name == name)
            .map(TransitionId)
            .ok_or_else(|| NetError::UnknownTransitionName(name.to_string()))
    }

    pub fn transition(&self, t: TransitionId) -> Result<&Transition, NetError> {
        self.transitions
            .get(t.0)
            .ok_or(NetError::UnknownTransition(t.0))
    }

    pub fn transition_name(&self, t: TransitionId) -> Result<&str, NetError> {
        Ok(&self.transition(t)?.name)
    }

    pub fn check_marking(&self, m: &Marking) -> Result<(), NetError> {
        if m.len() != self.places.len() {
            return Err(NetError::DomainMismatch {
                expected: self.places.len(),
                found: m.len(),
            });
        }
        Ok(())
    }

    /// `F(p,t)`.
    pub fn pre(&self, p: PlaceId, t: TransitionId) -> Result<&BigUint, NetError> {
        Ok(&self.transition(t)?.pre[p.0])
    }

    /// `F(t,p)`.
    pub fn post(&self, t: TransitionId, p: PlaceId) -> Result<&BigUint, NetError> {
        Ok(&self.transition(t)?.post[p.0])
    }

    pub fn enabled(&self, m: &Marking, t: TransitionId) -> Result<bool, NetError> {
        let tr = self.transition(t)?;
        self.check_marking(m)?;
        Ok(m.0.iter().zip(&tr.pre).all(|(have, need)| have >= need))
    }

    /// Fires `t` from `m`, or returns `None` when `t` is not enabled.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Option<Marking>, NetError> {
        if !self.enabled(m, t)? {
            return Ok(None);
        }
        let tr = &self.transitions[t.0];
        let next = m
            .0
            .iter()
            .zip(tr.pre.iter().zip(&tr.post))
            .map(|(have, (pre, post))| have - pre + post)
            .collect();
        Ok(Some(Marking(next)))
    }

    /// Replays a firing sequence from `start`; `None` if some step is disabled.
    pub fn replay(
        &self,
        start: &Marking,
        seq: &[TransitionId],
    ) -> Result<Option<Marking>, NetError> {
        let mut cur = start.clone();
        for &t in seq {
            match self.fire(&cur, t)? {
                Some(next) => cur = next,
                None => return Ok(None),
            }
        }
        Ok(Some(cur))
    }

    pub fn displacement(&self, t: TransitionId) -> Result<Displacement, NetError> {
        let tr = self.transition(t)?;
        Ok(Displacement(
            tr.pre
                .iter()
                .zip(&tr.post)
                .map(|(pre, post)| BigInt::from(post.clone()) - BigInt::from(pre.clone()))
                .collect(),
        ))
    }

    /// The least marking from which firing `t` covers `m`:
    /// `F(p,t) + max(0, m(p) - F(t,p))` in every place.
    pub fn cpre(&self, t: TransitionId, m: &Marking) -> Result<Marking, NetError> {
        let tr = self.transition(t)?;
        self.check_marking(m)?;
        Ok(cpre_unchecked(tr, m))
    }

    /// `m_t(p) = F(p,t)`: the least marking enabling `t`.
    pub fn min_enabling_marking(&self, t: TransitionId) -> Result<Marking, NetError> {
        Ok(Marking(self.transition(t)?.pre.clone()))
    }

    /// A copy of this net keeping only the transitions for which `keep`
    /// returns true. Place set and initial marking are unchanged.
    pub fn retain_transitions(&self, mut keep: impl FnMut(TransitionId) -> bool) -> PetriNet {
        let transitions = self
            .transitions
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(TransitionId(*i)))
            .map(|(_, t)| t.clone())
            .collect();
        PetriNet::from_parts(self.places.clone(), transitions, self.init.clone())
    }

    /// A copy of this net restricted to the places for which `keep` returns
    /// true. Arcs to dropped places are discarded.
    pub fn retain_places(&self, mut keep: impl FnMut(PlaceId) -> bool) -> PetriNet {
        let kept: Vec<usize> = (0..self.places.len())
            .filter(|&i| keep(PlaceId(i)))
            .collect();
        let places = kept.iter().map(|&i| self.places[i].clone()).collect();
        let project = |v: &[BigUint]| kept.iter().map(|&i| v[i].clone()).collect::<Vec<_>>();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                name: t.name.clone(),
                pre: project(&t.pre),
                post: project(&t.post),
            })
            .collect();
        PetriNet::from_parts(places, transitions, Marking(project(&self.init.0)))
    }

    fn from_parts(places: Vec<String>, transitions: Vec<Transition>, init: Marking) -> PetriNet {
        let mut hasher = DefaultHasher::new();
        places.hash(&mut hasher);
        transitions.hash(&mut hasher);
        init.hash(&mut hasher);
        PetriNet {
            places,
            transitions,
            init,
            fingerprint: hasher.finish(),
        }
    }
}

pub(crate) fn cpre_unchecked(tr: &Transition, m: &Marking) -> Marking {
    Marking(
        m.0.iter()
            .zip(tr.pre.iter().zip(&tr.post))
            .map(|(want, (pre, post))| {
                if want > post {
                    pre + (want - post)
                } else {
                    pre.clone()
                }
            })
            .collect(),
    )
}

type Arcs = Vec<(usize, BigUint)>;

/// Incremental construction of a [`PetriNet`] by name.
#[derive(Debug, Default, Clone)]
pub struct NetBuilder {
    places: Vec<String>,
    index: HashMap<String, usize>,
    transitions: Vec<(String, Arcs, Arcs)>,
    init: Arcs,
}

impl NetBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn place(mut self, name: &str) -> Result<Self, NetError> {
        self.add_place(name)?;
        Ok(self)
    }

    pub fn add_place(&mut self, name: &str) -> Result<PlaceId, NetError> {
        if self.index.contains_key(name) {
            return Err(NetError::DuplicatePlace(name.to_string()));
        }
        let id = self.places.len();
        self.places.push(name.to_string());
        self.index.insert(name.to_string(), id);
        Ok(PlaceId(id))
    }

    pub fn has_place(&self, name: &str) -> bool {
        self.index.contains_key(name)
    }

    fn lookup(&self, name: &str) -> Result<usize, NetError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| NetError::UnknownPlace(name.to_string()))
    }

    /// Adds a transition with `(place, multiplicity)` input and output arcs.
    /// Repeated places accumulate.
    pub fn add_transition<N: Into<BigUint> + Clone>(
        &mut self,
        name: &str,
        inputs: &[(&str, N)],
        outputs: &[(&str, N)],
    ) -> Result<TransitionId, NetError> {
        if self.transitions.iter().any(|(n, _, _)| n == name) {
            return Err(NetError::DuplicateTransition(name.to_string()));
        }
        let resolve = |arcs: &[(&str, N)]| -> Result<Vec<(usize, BigUint)>, NetError> {
            arcs.iter()
                .map(|(p, k)| Ok((self.lookup(p)?, k.clone().into())))
                .collect()
        };
        let pre = resolve(inputs)?;
        let post = resolve(outputs)?;
        self.transitions.push((name.to_string(), pre, post));
        Ok(TransitionId(self.transitions.len() - 1))
    }

    pub fn transition<N: Into<BigUint> + Clone>(
        mut self,
        name: &str,
        inputs: &[(&str, N)],
        outputs: &[(&str, N)],
    ) -> Result<Self, NetError> {
        self.add_transition(name, inputs, outputs)?;
        Ok(self)
    }

    pub fn set_initial(&mut self, place: &str, tokens: impl Into<BigUint>) -> Result<(), NetError> {
        let p = self.lookup(place)?;
        self.init.retain(|(q, _)| *q != p);
        self.init.push((p, tokens.into()));
        Ok(())
    }

    pub fn initial(mut self, place: &str, tokens: impl Into<BigUint>) -> Result<Self, NetError> {
        self.set_initial(place, tokens)?;
        Ok(self)
    }

    pub fn build(self) -> PetriNet {
        let n = self.places.len();
        let dense = |arcs: &[(usize, BigUint)]| {
            let mut v = vec![BigUint::zero(); n];
            for (p, k) in arcs {
                v[*p] += k;
            }
            v
        };
        let transitions = self
            .transitions
            .iter()
            .map(|(name, pre, post)| Transition {
                name: name.clone(),
                pre: dense(pre),
                post: dense(post),
            })
            .collect();
        let init = Marking(dense(&self.init));
        PetriNet::from_parts(self.places, transitions, init)
    }
}

/// The three-place example net: `t1: p1 -> p2`, `t2: p2 -> 2 p3`,
/// `t3: p3 -> 2 p2`, one token in `p1`.
pub fn example_net() -> PetriNet {
    NetBuilder::new()
        .place("p1")
        .and_then(|b| b.place("p2"))
        .and_then(|b| b.place("p3"))
        .and_then(|b| b.transition("t1", &[("p1", 1u32)], &[("p2", 1u32)]))
        .and_then(|b| b.transition("t2", &[("p2", 1u32)], &[("p3", 2u32)]))
        .and_then(|b| b.transition("t3", &[("p3", 1u32)], &[("p2", 2u32)]))
        .and_then(|b| b.initial("p1", 1u32))
        .expect("example net is well formed")
        .build()
}
