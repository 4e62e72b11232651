//! Strategyproof Pareto-stable matching for markets with weak preferences.
//!
//! Stable marriage and college admissions instances are reduced to iterated
//! unit-demand auctions with priorities, whose greedy maximum-weight
//! matchings are maintained by an incremental Hungarian method. The
//! [`oracles`] module holds exhaustive reference implementations used to
//! check the mechanisms on small instances.

pub mod caw;
pub mod error;
pub mod format;
pub mod gen;
pub mod iuap;
pub mod oracles;
pub mod order;
pub mod smiw;
pub mod uap;

pub use caw::{solve_caw, CawInstance, CawOutcome, College, GroupPreference};
pub use error::{Error, Result};
pub use iuap::{Iuap, Multibidder, RevelationPolicy};
pub use order::{Alternative, WeakOrder};
pub use smiw::{solve_smiw, MatchingOutcome, SmiwInstance, UtilityAssignment};
pub use uap::{greedy_mwm, threshold, Bidder, BidderId, ItemId, Matching, ThresholdPair, Uap};
