//! Secure matching: predicate evaluation, match fetching, neighbor access and
//! the breadth-first driver that strings them together.

mod access;
mod eval;
mod fetch;
mod matching;
mod result;

pub use access::{sec_access, AccessCache};
pub use eval::{combine_predicates, eval_local, sec_eval, AnyMode};
pub use fetch::{sec_fetch_multi, sec_fetch_unique};
pub use matching::{sec_match, sec_match_local, sec_match_with_progress, EngineConfig, FetchCase, HopReport, PhaseCost, PhaseStats};
pub use result::{open_results, MatchResultSet, OpenedSubgraph, OpenedVertex, SlotSet};

#[cfg(test)]
mod tests;
