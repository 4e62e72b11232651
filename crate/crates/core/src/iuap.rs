//! Iterated unit-demand auctions with priorities.
//!
//! A multibidder is a sequence of fallback bidders sharing one priority. The
//! revelation procedure ([`to_uap`]) starts from an auction with no bidders
//! and repeatedly reveals the next bidder of some multibidder that currently
//! has no matched bidder, keeping a greedy MWM up to date after each
//! revelation. The final auction does not depend on the revelation order.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::uap::{
    self, greedy_mwm, Bidder, BidderId, GreedySolver, ItemId, Matching, Priority, ThresholdPair,
    Uap,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Multibidder {
    bidders: Vec<Bidder>,
    priority: Priority,
}

impl Multibidder {
    pub fn new(priority: Priority, bidders: Vec<Bidder>) -> Result<Self> {
        let mut ids = BTreeSet::new();
        for bidder in &bidders {
            if !ids.insert(bidder.id()) {
                return Err(Error::DuplicateBidder(bidder.id()));
            }
            if bidder.priority() != priority {
                return Err(Error::PriorityMismatch {
                    bidder: bidder.id(),
                    expected: priority,
                    found: bidder.priority(),
                });
            }
        }
        Ok(Self { bidders, priority })
    }

    pub fn priority(&self) -> Priority {
        self.priority
    }

    /// The bidder sequence, most preferred first.
    pub fn bidders(&self) -> &[Bidder] {
        &self.bidders
    }
}

/// Multibidders are kept sorted by priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Iuap {
    multibidders: Vec<Multibidder>,
    items: BTreeSet<ItemId>,
}

impl Iuap {
    pub fn new(
        items: impl IntoIterator<Item = ItemId>,
        multibidders: impl IntoIterator<Item = Multibidder>,
    ) -> Result<Self> {
        let items: BTreeSet<ItemId> = items.into_iter().collect();
        let mut multibidders: Vec<Multibidder> = multibidders.into_iter().collect();
        multibidders.sort_by_key(Multibidder::priority);
        for pair in multibidders.windows(2) {
            if pair[0].priority == pair[1].priority {
                return Err(Error::DuplicatePriority(pair[0].priority));
            }
        }
        let mut ids = BTreeSet::new();
        for bidder in multibidders.iter().flat_map(|t| t.bidders.iter()) {
            if !ids.insert(bidder.id()) {
                return Err(Error::DuplicateBidder(bidder.id()));
            }
            if let Some(item) = bidder.items().find(|v| !items.contains(v)) {
                return Err(Error::UnknownItem(item));
            }
        }
        Ok(Self {
            multibidders,
            items,
        })
    }

    pub fn empty(items: impl IntoIterator<Item = ItemId>) -> Self {
        Self {
            multibidders: Vec::new(),
            items: items.into_iter().collect(),
        }
    }

    pub fn multibidders(&self) -> &[Multibidder] {
        &self.multibidders
    }

    pub fn items(&self) -> &BTreeSet<ItemId> {
        &self.items
    }

    pub fn multibidder(&self, priority: Priority) -> Option<&Multibidder> {
        self.multibidders
            .binary_search_by_key(&priority, Multibidder::priority)
            .ok()
            .map(|at| &self.multibidders[at])
    }

    pub fn all_bidders(&self) -> impl Iterator<Item = &Bidder> {
        self.multibidders.iter().flat_map(|t| t.bidders.iter())
    }

    /// `B - t` for the multibidder with the given priority.
    pub fn without_multibidder(&self, priority: Priority) -> Self {
        let mut next = self.clone();
        next.multibidders.retain(|t| t.priority != priority);
        next
    }

    /// `B + u`: appends `newcomer` to the multibidder sharing its priority,
    /// or opens a new singleton multibidder.
    pub fn add_bidder(&self, newcomer: Bidder) -> Result<Self> {
        if self.all_bidders().any(|b| b.id() == newcomer.id()) {
            return Err(Error::DuplicateBidder(newcomer.id()));
        }
        if let Some(item) = newcomer.items().find(|v| !self.items.contains(v)) {
            return Err(Error::UnknownItem(item));
        }
        let mut next = self.clone();
        match next
            .multibidders
            .binary_search_by_key(&newcomer.priority(), Multibidder::priority)
        {
            Ok(at) => next.multibidders[at].bidders.push(newcomer),
            Err(at) => next.multibidders.insert(
                at,
                Multibidder {
                    priority: newcomer.priority(),
                    bidders: vec![newcomer],
                },
            ),
        }
        Ok(next)
    }

    fn max_priority(&self) -> Option<Priority> {
        self.multibidders.last().map(Multibidder::priority)
    }

    fn max_bidder_id(&self) -> Option<BidderId> {
        self.all_bidders().map(Bidder::id).max()
    }
}

/// Which ready bidder the revelation loop picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RevelationPolicy {
    /// The ready bidder whose multibidder has the lowest priority.
    #[default]
    LowestPriority,
    /// A uniformly random ready bidder, drawn from a seeded generator.
    Seeded(u64),
}

/// Result of running the revelation loop: the revealed auction, a greedy MWM
/// of it, and how many bidders of each multibidder were revealed.
#[derive(Debug, Clone)]
pub struct Unfolding {
    pub uap: Uap,
    pub matching: Matching,
    /// Parallel to [`Iuap::multibidders`].
    pub revealed: Vec<usize>,
}

/// Runs the revelation loop and returns the final auction with the greedy
/// MWM maintained along the way.
pub fn unfold(instance: &Iuap, policy: RevelationPolicy) -> Unfolding {
    let mut solver = GreedySolver::new(instance.items.iter().copied());
    let mut revealed = vec![0usize; instance.multibidders.len()];
    let mut rng = match policy {
        RevelationPolicy::Seeded(seed) => Some(ChaCha8Rng::seed_from_u64(seed)),
        RevelationPolicy::LowestPriority => None,
    };
    let mut ready = Vec::with_capacity(instance.multibidders.len());
    loop {
        ready.clear();
        ready.extend(
            instance
                .multibidders
                .iter()
                .enumerate()
                .filter(|(i, t)| {
                    revealed[*i] < t.bidders.len() && solver.matched_with_priority(t.priority) == 0
                })
                .map(|(i, _)| i),
        );
        let chosen = match (&mut rng, ready.first()) {
            (_, None) => break,
            (None, Some(&first)) => first,
            (Some(rng), Some(_)) => *ready.choose(rng).expect("ready is nonempty"),
        };
        let t = &instance.multibidders[chosen];
        solver.step(t.bidders[revealed[chosen]].clone());
        revealed[chosen] += 1;
    }
    let uap = Uap::new(
        instance.items.iter().copied(),
        solver.bidders().iter().cloned(),
    )
    .expect("revealed bidders come from a well-formed IUAP");
    Unfolding {
        uap,
        matching: solver.matching(),
        revealed,
    }
}

/// `uap(B)`: the auction produced by the revelation loop.
pub fn to_uap(instance: &Iuap, policy: RevelationPolicy) -> Uap {
    unfold(instance, policy).uap
}

/// Bidders matched in every greedy MWM of `uap(B)`.
pub fn winners(instance: &Iuap) -> BTreeSet<BidderId> {
    greedy_mwm(&to_uap(instance, RevelationPolicy::default())).matched_bidders()
}

/// Revealed bidders of `uap(B)` that are not winners.
pub fn losers(instance: &Iuap) -> BTreeSet<BidderId> {
    let uap = to_uap(instance, RevelationPolicy::default());
    let won = greedy_mwm(&uap).matched_bidders();
    uap.bidder_ids().difference(&won).copied().collect()
}

/// Priorities of the winners.
pub fn priorities(instance: &Iuap) -> BTreeSet<Priority> {
    let uap = to_uap(instance, RevelationPolicy::default());
    greedy_mwm(&uap)
        .matched_bidders()
        .into_iter()
        .filter_map(|id| uap.bidder(id).map(Bidder::priority))
        .collect()
}

/// `uap(B, v)`: the revealed bidders of `B` once a single-item bidder on `v`
/// that is certain to win has been added (and then removed again).
pub fn uap_for_item(instance: &Iuap, item: ItemId) -> Result<Uap> {
    if !instance.items.contains(&item) {
        return Err(Error::UnknownItem(item));
    }
    let weight = 1 + instance
        .all_bidders()
        .flat_map(|b| b.bid().values())
        .map(|w| w.abs())
        .sum::<i64>();
    let priority = instance.max_priority().map_or(1, |z| z + 1);
    let id = BidderId(instance.max_bidder_id().map_or(1, |id| id.0 + 1));
    let probe = Bidder::new(id, priority, [(item, weight)])?;
    let extended = instance.add_bidder(probe)?;
    let unfolded = unfold(&extended, RevelationPolicy::default());
    if !greedy_mwm(&unfolded.uap).is_matched(id) {
        return Err(Error::Internal(format!(
            "probe bid ({weight}, {priority}) on {item} did not win"
        )));
    }
    Ok(unfolded.uap.without_bidder(id))
}

/// Threshold of `item` in the iterated auction.
pub fn iuap_threshold(instance: &Iuap, item: ItemId) -> Result<ThresholdPair> {
    uap::threshold(&uap_for_item(instance, item)?, item)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExitEntry {
    pub priority: Priority,
    pub sequence_len: usize,
    pub revealed: usize,
    /// 1-based position of the matched bidder in the sequence, if any.
    pub matched_position: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExitViolation {
    /// A bidder other than the last revealed one is matched, or bidders
    /// after the matched one were revealed.
    MatchedNotLast {
        priority: Priority,
        matched_position: usize,
        revealed: usize,
    },
    /// No bidder of the multibidder is matched, yet part of its sequence is
    /// still hidden.
    UnmatchedButHidden {
        priority: Priority,
        revealed: usize,
        sequence_len: usize,
    },
    /// More than one bidder of the multibidder is matched.
    SeveralMatched { priority: Priority },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExitReport {
    pub entries: Vec<ExitEntry>,
    pub violations: Vec<ExitViolation>,
}

/// Checks, for every multibidder `(σ, z)`, that when `σ(k)` is matched in
/// `matching` exactly `σ(1..=k)` is revealed, and that when nothing is
/// matched all of `σ` is revealed.
pub fn exit_check(instance: &Iuap, matching: &Matching) -> ExitReport {
    let uap = to_uap(instance, RevelationPolicy::default());
    let mut report = ExitReport::default();
    for t in &instance.multibidders {
        let revealed_flags: Vec<bool> = t
            .bidders
            .iter()
            .map(|b| uap.bidder(b.id()).is_some())
            .collect();
        let revealed = revealed_flags.iter().filter(|&&r| r).count();
        let matched: Vec<usize> = t
            .bidders
            .iter()
            .enumerate()
            .filter(|(_, b)| matching.is_matched(b.id()))
            .map(|(k, _)| k + 1)
            .collect();
        if matched.len() > 1 {
            report.violations.push(ExitViolation::SeveralMatched {
                priority: t.priority,
            });
        }
        match matched.first() {
            Some(&k) => {
                let exact_prefix = revealed_flags
                    .iter()
                    .enumerate()
                    .all(|(i, &r)| r == (i < k));
                if !exact_prefix {
                    report.violations.push(ExitViolation::MatchedNotLast {
                        priority: t.priority,
                        matched_position: k,
                        revealed,
                    });
                }
            }
            None => {
                if revealed != t.bidders.len() {
                    report.violations.push(ExitViolation::UnmatchedButHidden {
                        priority: t.priority,
                        revealed,
                        sequence_len: t.bidders.len(),
                    });
                }
            }
        }
        report.entries.push(ExitEntry {
            priority: t.priority,
            sequence_len: t.bidders.len(),
            revealed,
            matched_position: matched.first().copied(),
        });
    }
    report
}

#[cfg(test)]
mod tests;
