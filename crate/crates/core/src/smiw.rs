//! Stable marriage with incomplete weak preferences.
//!
//! Men become multibidders (one bidder per indifference tier, priority equal
//! to the man's 1-based index), women become items weighted by a utility
//! function derived from the woman's preferences, and each man gets a
//! private dummy item standing for "unmatched". The greedy MWM of the
//! revealed auction decides the matching.

use crate::error::{Error, Result};
use crate::iuap::{iuap_threshold, unfold, Iuap, Multibidder, RevelationPolicy};
use crate::order::{Alternative, WeakOrder};
use crate::uap::{Bidder, BidderId, ItemId, Priority, ThresholdPair};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmiwInstance {
    men: Vec<WeakOrder>,
    women: Vec<WeakOrder>,
}

impl SmiwInstance {
    pub fn new(men: Vec<WeakOrder>, women: Vec<WeakOrder>) -> Result<Self> {
        if let Some(i) = men.iter().position(|o| o.agents() != women.len()) {
            return Err(Error::InvalidInput(format!(
                "man {} ranks {} women, expected {}",
                i + 1,
                men[i].agents(),
                women.len()
            )));
        }
        if let Some(j) = women.iter().position(|o| o.agents() != men.len()) {
            return Err(Error::InvalidInput(format!(
                "woman {} ranks {} men, expected {}",
                j + 1,
                women[j].agents(),
                men.len()
            )));
        }
        Ok(Self { men, women })
    }

    pub fn men(&self) -> &[WeakOrder] {
        &self.men
    }

    pub fn women(&self) -> &[WeakOrder] {
        &self.women
    }

    pub fn n_men(&self) -> usize {
        self.men.len()
    }

    pub fn n_women(&self) -> usize {
        self.women.len()
    }

    /// The same market with man `i` reporting `order` instead.
    pub fn with_man_order(&self, i: usize, order: WeakOrder) -> Result<Self> {
        let mut men = self.men.clone();
        men[i] = order;
        Self::new(men, self.women.clone())
    }

    /// Square version of the market: extra agents rank unmatched above
    /// everyone and sit in a new bottom tier of every real agent's order.
    pub fn padded(&self) -> Self {
        let n = self.n_men().max(self.n_women());
        let extra_men = n - self.n_men();
        let extra_women = n - self.n_women();
        let men = self
            .men
            .iter()
            .map(|o| o.padded(extra_women))
            .chain((0..extra_men).map(|_| WeakOrder::unwilling(n)))
            .collect();
        let women = self
            .women
            .iter()
            .map(|o| o.padded(extra_men))
            .chain((0..extra_women).map(|_| WeakOrder::unwilling(n)))
            .collect();
        Self { men, women }
    }

    pub fn is_individually_rational(&self, outcome: &MatchingOutcome) -> bool {
        self.men.iter().enumerate().all(|(i, order)| {
            outcome
                .partner_of_man(i)
                .is_none_or(|j| order.is_acceptable(j) && self.women[j].is_acceptable(i))
        })
    }

    /// Pairs `(man, woman)` that strictly prefer each other to their current
    /// partners.
    pub fn blocking_pairs(&self, outcome: &MatchingOutcome) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for (i, man) in self.men.iter().enumerate() {
            for (j, woman) in self.women.iter().enumerate() {
                if man.prefers(Some(j), outcome.partner_of_man(i))
                    && woman.prefers(Some(i), outcome.partner_of_woman(j))
                {
                    pairs.push((i, j));
                }
            }
        }
        pairs
    }

    pub fn is_weakly_stable(&self, outcome: &MatchingOutcome) -> bool {
        self.is_individually_rational(outcome) && self.blocking_pairs(outcome).is_empty()
    }

    /// Every agent weakly prefers `a` to `b`.
    pub fn weakly_better(&self, a: &MatchingOutcome, b: &MatchingOutcome) -> bool {
        self.men
            .iter()
            .enumerate()
            .all(|(i, o)| o.weakly_prefers(a.partner_of_man(i), b.partner_of_man(i)))
            && self
                .women
                .iter()
                .enumerate()
                .all(|(j, o)| o.weakly_prefers(a.partner_of_woman(j), b.partner_of_woman(j)))
    }

    /// `a` Pareto-dominates `b`.
    pub fn pareto_dominates(&self, a: &MatchingOutcome, b: &MatchingOutcome) -> bool {
        self.weakly_better(a, b) && !self.weakly_better(b, a)
    }
}

/// `ψ_q(p) = |{p' : p ⪰ p'}| - |{p' : ∅ ⪰ p'}|` over counterparts and `∅`.
/// Entry `i` is the utility of agent `i`; unmatched is worth 0.
pub fn canonical_utility(order: &WeakOrder) -> Vec<i64> {
    let tiers = order.tiers();
    // at_or_below[k] = number of alternatives in tiers k.. (worse or equal).
    let mut at_or_below = vec![0i64; tiers.len() + 1];
    for k in (0..tiers.len()).rev() {
        at_or_below[k] = at_or_below[k + 1] + tiers[k].len() as i64;
    }
    let unmatched = at_or_below[order.rank(None)];
    (0..order.agents())
        .map(|i| at_or_below[order.rank(Some(i))] - unmatched)
        .collect()
}

/// Checks that `utility` (indexed by counterpart, unmatched worth 0) orders
/// the alternatives exactly as `order` does.
pub fn utility_consistent(order: &WeakOrder, utility: &[i64]) -> bool {
    if utility.len() != order.agents() {
        return false;
    }
    let value = |alt: Alternative| alt.map_or(0, |i| utility[i]);
    let tier_values: Vec<Vec<i64>> = order
        .tiers()
        .iter()
        .map(|tier| tier.iter().map(|&a| value(a)).collect())
        .collect();
    tier_values.iter().all(|t| t.iter().all(|&x| x == t[0]))
        && tier_values.windows(2).all(|w| w[0][0] > w[1][0])
}

/// Per-woman utility functions over men; unmatched is worth 0.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UtilityAssignment {
    per_woman: Vec<Vec<i64>>,
}

impl UtilityAssignment {
    pub fn new(per_woman: Vec<Vec<i64>>) -> Self {
        Self { per_woman }
    }

    pub fn canonical(instance: &SmiwInstance) -> Self {
        Self {
            per_woman: instance.women.iter().map(canonical_utility).collect(),
        }
    }

    /// `ψ_{q_j}(p_i)`.
    pub fn utility(&self, woman: usize, man: usize) -> i64 {
        self.per_woman[woman][man]
    }

    pub fn per_woman(&self) -> &[Vec<i64>] {
        &self.per_woman
    }

    pub fn validate(&self, instance: &SmiwInstance) -> Result<()> {
        if self.per_woman.len() != instance.n_women() {
            return Err(Error::InvalidInput(format!(
                "utilities given for {} women, instance has {}",
                self.per_woman.len(),
                instance.n_women()
            )));
        }
        for (j, (order, utility)) in instance.women.iter().zip(&self.per_woman).enumerate() {
            if !utility_consistent(order, utility) {
                return Err(Error::InvalidInput(format!(
                    "utilities of woman {} disagree with her preferences",
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Utilities for [`SmiwInstance::padded`]: extra men get a value below
    /// every real alternative, extra women value every man at -1.
    fn padded(&self, real: &SmiwInstance, n: usize) -> Self {
        let extra_men = n - real.n_men();
        let mut per_woman: Vec<Vec<i64>> = self
            .per_woman
            .iter()
            .map(|u| {
                let floor = u.iter().copied().min().unwrap_or(0).min(0) - 1;
                u.iter()
                    .copied()
                    .chain(std::iter::repeat_n(floor, extra_men))
                    .collect()
            })
            .collect();
        per_woman.resize(n, vec![-1; n]);
        Self { per_woman }
    }
}

/// A one-to-one matching from men to women (or unmatched).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MatchingOutcome {
    assignment: Vec<Option<usize>>,
    women: usize,
}

impl MatchingOutcome {
    pub fn new(women: usize, assignment: Vec<Option<usize>>) -> Result<Self> {
        let mut taken = vec![false; women];
        for (i, partner) in assignment.iter().enumerate() {
            if let Some(j) = *partner {
                if j >= women {
                    return Err(Error::InvalidInput(format!(
                        "man {} is matched to unknown woman {}",
                        i + 1,
                        j + 1
                    )));
                }
                if std::mem::replace(&mut taken[j], true) {
                    return Err(Error::InvalidInput(format!(
                        "woman {} is matched more than once",
                        j + 1
                    )));
                }
            }
        }
        Ok(Self { assignment, women })
    }

    pub fn assignment(&self) -> &[Option<usize>] {
        &self.assignment
    }

    pub fn n_women(&self) -> usize {
        self.women
    }

    pub fn partner_of_man(&self, man: usize) -> Option<usize> {
        self.assignment[man]
    }

    pub fn partner_of_woman(&self, woman: usize) -> Option<usize> {
        self.assignment.iter().position(|&p| p == Some(woman))
    }

    /// Matched pairs as 0-based `(man, woman)`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignment
            .iter()
            .enumerate()
            .filter_map(|(i, p)| p.map(|j| (i, j)))
    }
}

fn woman_item(j: usize) -> ItemId {
    ItemId(j as u32 + 1)
}

fn dummy_item(n: usize, i: usize) -> ItemId {
    ItemId((n + i) as u32 + 1)
}

fn man_priority(i: usize) -> Priority {
    i as Priority + 1
}

/// Builds the iterated auction for a square instance: items `v_1..v_n` for
/// the women, dummy items `v_{n+1}..v_{2n}`, and for man `p_i` a multibidder
/// of priority `i` with one bidder per tier of his order over
/// `{q_1..q_n} ∪ {q_{n+i}}`, the dummy taking the place of unmatched.
pub fn build_iuap(instance: &SmiwInstance, utilities: &UtilityAssignment) -> Result<Iuap> {
    let n = instance.n_men();
    if instance.n_women() != n {
        return Err(Error::InvalidInput(format!(
            "expected a square instance, got {} men and {} women",
            n,
            instance.n_women()
        )));
    }
    utilities.validate(instance)?;
    let mut next_id = 1u32;
    let mut multibidders = Vec::with_capacity(n);
    for (i, order) in instance.men.iter().enumerate() {
        let priority = man_priority(i);
        let mut bidders = Vec::with_capacity(order.tiers().len());
        for tier in order.tiers() {
            let bid = tier.iter().map(|&alt| match alt {
                Some(j) => (woman_item(j), utilities.utility(j, i)),
                None => (dummy_item(n, i), 0),
            });
            bidders.push(Bidder::new(BidderId(next_id), priority, bid)?);
            next_id += 1;
        }
        multibidders.push(Multibidder::new(priority, bidders)?);
    }
    Iuap::new((1..=2 * n).map(|j| ItemId(j as u32)), multibidders)
}

struct Run {
    n: usize,
    padded: SmiwInstance,
    utilities: UtilityAssignment,
    iuap: Iuap,
    /// Matched item index `j` in `0..2n` per padded man.
    matched_item: Vec<usize>,
}

fn run(instance: &SmiwInstance, utilities: &UtilityAssignment) -> Result<Run> {
    utilities.validate(instance)?;
    let padded = instance.padded();
    let n = padded.n_men();
    let utilities = utilities.padded(instance, n);
    let iuap = build_iuap(&padded, &utilities)?;
    let unfolded = unfold(&iuap, RevelationPolicy::default());
    let mut matched_item = vec![usize::MAX; n];
    for (bidder, item) in unfolded.matching.edges() {
        let priority = unfolded
            .uap
            .bidder(bidder)
            .expect("matched bidder is revealed")
            .priority();
        let i = (priority - 1) as usize;
        if matched_item[i] != usize::MAX {
            return Err(Error::Internal(format!(
                "man {} has two matched bidders",
                i + 1
            )));
        }
        matched_item[i] = item.0 as usize - 1;
    }
    if let Some(i) = matched_item.iter().position(|&j| j == usize::MAX) {
        return Err(Error::Internal(format!(
            "man {} has no matched bidder",
            i + 1
        )));
    }
    Ok(Run {
        n,
        padded,
        utilities,
        iuap,
        matched_item,
    })
}

/// Runs the mechanism with canonical utilities.
pub fn solve_smiw(instance: &SmiwInstance) -> Result<MatchingOutcome> {
    solve_smiw_with(instance, &UtilityAssignment::canonical(instance))
}

/// Runs the mechanism with the given women's utilities.
pub fn solve_smiw_with(
    instance: &SmiwInstance,
    utilities: &UtilityAssignment,
) -> Result<MatchingOutcome> {
    let run = run(instance, utilities)?;
    let assignment = (0..instance.n_men())
        .map(|i| {
            let j = run.matched_item[i];
            (j < instance.n_women()).then_some(j)
        })
        .collect();
    MatchingOutcome::new(instance.n_women(), assignment)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdRelation {
    /// The man's bid on his match must reach the threshold.
    AtLeast,
    /// The man's bid on a strictly preferred woman must stay below it.
    Below,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdFact {
    /// 0-based man index.
    pub man: usize,
    /// Item in the iterated auction (`v_{n+i}` is the man's dummy).
    pub item: ItemId,
    /// The woman behind the item, `None` for the dummy.
    pub woman: Option<usize>,
    pub relation: ThresholdRelation,
    /// `(ψ_q(p_i), i)`.
    pub bid: ThresholdPair,
    /// Threshold of the item once the man's multibidder is removed.
    pub threshold: ThresholdPair,
    pub holds: bool,
}

/// For each man, compares his bids with the item thresholds of the market
/// without him: the matched item must be reached, every strictly preferred
/// item must not be.
pub fn smiw_threshold_report(instance: &SmiwInstance) -> Result<Vec<ThresholdFact>> {
    smiw_threshold_report_with(instance, &UtilityAssignment::canonical(instance))
}

pub fn smiw_threshold_report_with(
    instance: &SmiwInstance,
    utilities: &UtilityAssignment,
) -> Result<Vec<ThresholdFact>> {
    let run = run(instance, utilities)?;
    let n = run.n;
    let mut facts = Vec::new();
    for i in 0..instance.n_men() {
        let order = &run.padded.men()[i];
        let others = run.iuap.without_multibidder(man_priority(i));
        let alt_of = |j: usize| (j < n).then_some(j);
        let bid_of = |j: usize| {
            let w = if j < n {
                run.utilities.utility(j, i)
            } else {
                0
            };
            ThresholdPair::new(w, man_priority(i))
        };
        let j = run.matched_item[i];
        let matched_rank = order.rank(alt_of(j));
        let mut push = |j: usize, relation: ThresholdRelation| -> Result<()> {
            let item = ItemId(j as u32 + 1);
            let threshold = iuap_threshold(&others, item)?;
            let bid = bid_of(j);
            let holds = match relation {
                ThresholdRelation::AtLeast => bid >= threshold,
                ThresholdRelation::Below => bid < threshold,
            };
            facts.push(ThresholdFact {
                man: i,
                item,
                woman: alt_of(j).filter(|&q| q < instance.n_women()),
                relation,
                bid,
                threshold,
                holds,
            });
            Ok(())
        };
        push(j, ThresholdRelation::AtLeast)?;
        let candidates = (0..n).chain([n + i]);
        for jp in candidates {
            if order.rank(alt_of(jp)) < matched_rank {
                push(jp, ThresholdRelation::Below)?;
            }
        }
    }
    Ok(facts)
}

/// `threshold((T - t_i, V), v_j)` for the canonical-utility auction, with
/// 0-based `man` and 1-based item index `item` in `1..=2n`.
pub fn excluded_man_threshold(
    instance: &SmiwInstance,
    man: usize,
    item: usize,
) -> Result<ThresholdPair> {
    if man >= instance.n_men() {
        return Err(Error::InvalidInput(format!("no man {}", man + 1)));
    }
    let padded = instance.padded();
    let n = padded.n_men();
    if item == 0 || item > 2 * n {
        return Err(Error::InvalidInput(format!(
            "item {item} out of range 1..={}",
            2 * n
        )));
    }
    let utilities = UtilityAssignment::canonical(instance).padded(instance, n);
    let iuap = build_iuap(&padded, &utilities)?;
    iuap_threshold(
        &iuap.without_multibidder(man_priority(man)),
        ItemId(item as u32),
    )
}
