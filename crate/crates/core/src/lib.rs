//! Verification workbench for hierarchical timed Petri nets.
//!
//! The crate covers the whole pipeline: a net model with structural
//! validation ([`net`]), a textual definition language ([`dsl`]),
//! hierarchical refinement and flattening ([`hierarchy`]), explicit-state
//! untimed analyses ([`untimed`]), integer-time schedulability analysis
//! ([`timed`]) and the interval calculus over workflow patterns
//! ([`pattern`]).

pub mod dsl;
pub mod hierarchy;
pub mod interval;
pub mod net;
pub mod pattern;
pub mod timed;
pub mod untimed;

pub use hierarchy::{HierarchicalNet, TransitionRef};
pub use interval::TimeInterval;
pub use net::{Marking, Net, Place, PlaceRole, Transition};
pub use pattern::PatternExpr;
pub use untimed::{ExploreLimits, Verdict};
