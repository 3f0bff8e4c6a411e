//! Dead-transition elimination.
//!
//! A transition `t` is enabled somewhere in a downward-closed set `D` iff
//! `m_t ∈ D`, where `m_t(p) = F(p,t)`. Transitions whose `m_t` falls outside
//! an invariant never fire and are dropped without changing which markings
//! are coverable.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::invariants::{sign_analysis, StateInvariant};
use crate::net::{Marking, PetriNet, PlaceId, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PruneMode {
    Once,
    Fixpoint,
}

impl FromStr for PruneMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "once" => Ok(PruneMode::Once),
            "fixpoint" => Ok(PruneMode::Fixpoint),
            other => Err(format!("unknown pre-processing mode '{other}'")),
        }
    }
}

impl fmt::Display for PruneMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PruneMode::Once => "once",
            PruneMode::Fixpoint => "fixpoint",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PreprocessOptions {
    pub mode: PruneMode,
    /// Also drop transitions whose `m_t` violates the state inequation.
    pub use_state: bool,
    /// Drop always-empty places that no surviving transition touches and
    /// that no target asks tokens from.
    pub drop_places: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            mode: PruneMode::Fixpoint,
            use_state: false,
            drop_places: false,
        }
    }
}

/// One analysis round: the always-empty places it found and the transitions
/// it removed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PruneRound {
    pub round: usize,
    pub z: Vec<String>,
    pub removed: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PreprocessReport {
    pub mode: PruneMode,
    pub places_kept: Vec<String>,
    pub places_dropped: Vec<String>,
    pub transitions_kept: Vec<String>,
    pub transitions_removed: Vec<String>,
    pub rounds: Vec<PruneRound>,
}

#[derive(Debug, Clone)]
pub struct Pruned {
    pub net: PetriNet,
    /// Removed transitions, as ids of the input net.
    pub removed: Vec<TransitionId>,
    pub report: PreprocessReport,
}

/// Removes transitions never enabled under sign analysis. In
/// [`PruneMode::Fixpoint`] the analysis is rerun on the reduced net until no
/// more transitions go.
pub fn prune_dead_transitions(net: &PetriNet, mode: PruneMode) -> Pruned {
    prune_with(
        net,
        &PreprocessOptions {
            mode,
            use_state: false,
            drop_places: false,
        },
    )
}

fn prune_with(net: &PetriNet, opts: &PreprocessOptions) -> Pruned {
    // original ids of the transitions still present in `cur`
    let mut alive: Vec<TransitionId> = net.transition_ids().collect();
    let mut cur = net.clone();
    let mut rounds = Vec::new();
    let mut removed = Vec::new();

    for round in 1..=net.num_transitions() + 1 {
        let sign = sign_analysis(&cur);
        let state = opts.use_state.then(|| StateInvariant::new(&cur));
        let dead: Vec<bool> = cur
            .transition_ids()
            .map(|t| {
                let mt = cur.min_enabling_marking(t).expect("declared transition");
                let in_sign = sign.member(&mt).expect("same places");
                let in_state = state
                    .as_ref()
                    .is_none_or(|s| s.member(&mt).expect("same places"));
                !(in_sign && in_state)
            })
            .collect();
        rounds.push(PruneRound {
            round,
            z: sign.z().iter().map(|p| cur.places()[p.0].clone()).collect(),
            removed: cur
                .transition_ids()
                .filter(|t| dead[t.0])
                .map(|t| cur.transitions()[t.0].name.clone())
                .collect(),
        });
        let any = dead.iter().any(|&d| d);
        if any {
            removed.extend(alive.iter().zip(&dead).filter(|(_, &d)| d).map(|(t, _)| *t));
            alive = alive
                .into_iter()
                .zip(&dead)
                .filter(|(_, &d)| !d)
                .map(|(t, _)| t)
                .collect();
            cur = cur.retain_transitions(|t| !dead[t.0]);
        }
        if !any || opts.mode == PruneMode::Once {
            break;
        }
    }
    removed.sort();

    let report = PreprocessReport {
        mode: opts.mode,
        places_kept: cur.places().to_vec(),
        places_dropped: Vec::new(),
        transitions_kept: cur.transitions().iter().map(|t| t.name.clone()).collect(),
        transitions_removed: removed
            .iter()
            .map(|t| net.transitions()[t.0].name.clone())
            .collect(),
        rounds,
    };
    Pruned {
        net: cur,
        removed,
        report,
    }
}

/// Result of [`preprocess`]: the reduced net and the targets over its places.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub net: PetriNet,
    pub targets: Vec<Marking>,
    pub removed: Vec<TransitionId>,
    pub report: PreprocessReport,
}

/// Transition pruning followed, when requested, by dropping idle empty
/// places.
pub fn preprocess(net: &PetriNet, targets: &[Marking], opts: &PreprocessOptions) -> Preprocessed {
    let pruned = prune_with(net, opts);
    let mut report = pruned.report;
    let mut reduced = pruned.net;
    let mut targets = targets.to_vec();

    if opts.drop_places {
        let sign = sign_analysis(&reduced);
        let droppable: Vec<bool> = reduced
            .place_ids()
            .map(|p| {
                sign.z().contains(&p)
                    && reduced
                        .transitions()
                        .iter()
                        .all(|t| t.pre[p.0] == 0u32.into() && t.post[p.0] == 0u32.into())
                    && targets.iter().all(|m| m.get(p) == &0u32.into())
            })
            .collect();
        report.places_dropped = reduced
            .place_ids()
            .filter(|p| droppable[p.0])
            .map(|p| reduced.places()[p.0].clone())
            .collect();
        targets = targets
            .iter()
            .map(|m| {
                Marking::new(
                    m.counts()
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| !droppable[*i])
                        .map(|(_, c)| c.clone())
                        .collect(),
                )
            })
            .collect();
        reduced = reduced.retain_places(|p: PlaceId| !droppable[p.0]);
        report.places_kept = reduced.places().to_vec();
    }

    Preprocessed {
        net: reduced,
        targets,
        removed: pruned.removed,
        report,
    }
}
