//! Coverability checking for Petri nets.
//!
//! The solver runs a backward reachability search over upward-closed sets of
//! markings and discards predecessors that fall outside a downward-closed
//! invariant. Two invariant generators are included (sign analysis and the
//! state inequation over the rationals), together with dead-transition
//! pre-processing and a bounded forward-search oracle for cross-checking.

pub mod cli;
pub mod ingest;
pub mod invariants;
pub mod net;
pub mod preprocess;
pub mod ratlp;
pub mod refcheck;
pub mod report;
pub mod solver;
pub mod upset;

pub use ingest::{emit_native, parse_mist, parse_native, ParseError, Problem};
pub use invariants::{sign_analysis, InvariantHandle, InvariantKind, SignResult};
pub use net::{Marking, MarkingOrder, NetBuilder, NetError, PetriNet, PlaceId, TransitionId};
pub use preprocess::{prune_dead_transitions, PruneMode};
pub use refcheck::{bounded_cover, reachable_markings, ExploreBound, OracleOutcome};
pub use solver::{classical_backward, icover, icover_with, SolveOptions, SolveResult, Verdict};
pub use upset::Basis;
