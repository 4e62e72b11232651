//! Brute-force reference implementations for small instances.
//!
//! Everything here enumerates exhaustively and refuses instances above a
//! fixed size instead of returning partial answers.

use std::collections::BTreeSet;
use std::fmt;

use crate::caw::{caw_weak_stability_check, CawInstance, CawOutcome};
use crate::error::{Error, Result};
use crate::order::WeakOrder;
use crate::smiw::{MatchingOutcome, SmiwInstance};
use crate::uap::{BidderId, ItemId, Matching, Uap};

/// Largest number of men, women, students, or colleges accepted by the
/// market enumerators.
pub const MARKET_LIMIT: usize = 6;
/// Largest number of bidders or items accepted by the auction enumerators.
pub const AUCTION_LIMIT: usize = 8;
/// Largest alternative set (counterparts plus unmatched) for misreport
/// search; 4 alternatives give 75 weak orders.
pub const MISREPORT_ALTERNATIVES_LIMIT: usize = 4;

/// A two-sided market whose proposing side (men or students) is protected
/// by strategyproofness.
pub trait Market: Sized {
    type Outcome: Clone + Ord + fmt::Debug;

    fn proposers(&self) -> usize;
    fn receivers(&self) -> usize;
    fn proposer_order(&self, i: usize) -> &WeakOrder;
    fn with_proposer_order(&self, i: usize, order: WeakOrder) -> Result<Self>;
    fn proposer_match(outcome: &Self::Outcome, i: usize) -> Option<usize>;
    /// All valid (capacity-respecting, possibly partial) matchings.
    fn enumerate_outcomes(&self) -> Result<Vec<Self::Outcome>>;
    fn is_weakly_stable(&self, outcome: &Self::Outcome) -> bool;
    fn pareto_dominates(&self, a: &Self::Outcome, b: &Self::Outcome) -> bool;
}

fn guard(what: &str, count: usize, limit: usize) -> Result<()> {
    if count > limit {
        return Err(Error::TooLarge(format!("{count} {what} (limit {limit})")));
    }
    Ok(())
}

impl Market for SmiwInstance {
    type Outcome = MatchingOutcome;

    fn proposers(&self) -> usize {
        self.n_men()
    }

    fn receivers(&self) -> usize {
        self.n_women()
    }

    fn proposer_order(&self, i: usize) -> &WeakOrder {
        &self.men()[i]
    }

    fn with_proposer_order(&self, i: usize, order: WeakOrder) -> Result<Self> {
        self.with_man_order(i, order)
    }

    fn proposer_match(outcome: &MatchingOutcome, i: usize) -> Option<usize> {
        outcome.partner_of_man(i)
    }

    fn enumerate_outcomes(&self) -> Result<Vec<MatchingOutcome>> {
        guard("men", self.n_men(), MARKET_LIMIT)?;
        guard("women", self.n_women(), MARKET_LIMIT)?;
        let women = self.n_women();
        let mut out = Vec::new();
        let mut assignment = vec![None; self.n_men()];
        let mut taken = vec![false; women];
        fn rec(
            i: usize,
            assignment: &mut Vec<Option<usize>>,
            taken: &mut Vec<bool>,
            out: &mut Vec<MatchingOutcome>,
        ) {
            if i == assignment.len() {
                out.push(
                    MatchingOutcome::new(taken.len(), assignment.clone())
                        .expect("enumeration keeps women distinct"),
                );
                return;
            }
            assignment[i] = None;
            rec(i + 1, assignment, taken, out);
            for j in 0..taken.len() {
                if !taken[j] {
                    taken[j] = true;
                    assignment[i] = Some(j);
                    rec(i + 1, assignment, taken, out);
                    taken[j] = false;
                }
            }
            assignment[i] = None;
        }
        rec(0, &mut assignment, &mut taken, &mut out);
        Ok(out)
    }

    fn is_weakly_stable(&self, outcome: &MatchingOutcome) -> bool {
        SmiwInstance::is_weakly_stable(self, outcome)
    }

    fn pareto_dominates(&self, a: &MatchingOutcome, b: &MatchingOutcome) -> bool {
        SmiwInstance::pareto_dominates(self, a, b)
    }
}

impl Market for CawInstance {
    type Outcome = CawOutcome;

    fn proposers(&self) -> usize {
        self.n_students()
    }

    fn receivers(&self) -> usize {
        self.n_colleges()
    }

    fn proposer_order(&self, i: usize) -> &WeakOrder {
        &self.students()[i]
    }

    fn with_proposer_order(&self, i: usize, order: WeakOrder) -> Result<Self> {
        self.with_student_order(i, order)
    }

    fn proposer_match(outcome: &CawOutcome, i: usize) -> Option<usize> {
        outcome.college_of(i)
    }

    fn enumerate_outcomes(&self) -> Result<Vec<CawOutcome>> {
        guard("students", self.n_students(), MARKET_LIMIT)?;
        guard("colleges", self.n_colleges(), MARKET_LIMIT)?;
        let mut remaining: Vec<usize> = self.colleges().iter().map(|c| c.capacity).collect();
        let mut assignment = vec![None; self.n_students()];
        let mut out = Vec::new();
        fn rec(
            instance: &CawInstance,
            i: usize,
            assignment: &mut Vec<Option<usize>>,
            remaining: &mut Vec<usize>,
            out: &mut Vec<CawOutcome>,
        ) {
            if i == assignment.len() {
                out.push(
                    CawOutcome::new(instance, assignment.clone())
                        .expect("enumeration respects capacities"),
                );
                return;
            }
            assignment[i] = None;
            rec(instance, i + 1, assignment, remaining, out);
            for j in 0..remaining.len() {
                if remaining[j] > 0 {
                    remaining[j] -= 1;
                    assignment[i] = Some(j);
                    rec(instance, i + 1, assignment, remaining, out);
                    remaining[j] += 1;
                }
            }
            assignment[i] = None;
        }
        rec(self, 0, &mut assignment, &mut remaining, &mut out);
        Ok(out)
    }

    fn is_weakly_stable(&self, outcome: &CawOutcome) -> bool {
        caw_weak_stability_check(self, outcome).is_empty()
    }

    /// Additive group preferences with each college's utility table.
    fn pareto_dominates(&self, a: &CawOutcome, b: &CawOutcome) -> bool {
        CawInstance::pareto_dominates(self, a, b)
    }
}

/// A set of matchings, kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingSet<O> {
    matchings: Vec<O>,
}

impl<O: Ord> MatchingSet<O> {
    pub fn new(mut matchings: Vec<O>) -> Self {
        matchings.sort();
        matchings.dedup();
        Self { matchings }
    }

    pub fn len(&self) -> usize {
        self.matchings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matchings.is_empty()
    }

    pub fn contains(&self, outcome: &O) -> bool {
        self.matchings.binary_search(outcome).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &O> {
        self.matchings.iter()
    }
}

pub fn enumerate_matchings<M: Market>(instance: &M) -> Result<MatchingSet<M::Outcome>> {
    instance.enumerate_outcomes().map(MatchingSet::new)
}

/// Individually rational matchings without a strongly blocking pair.
pub fn weakly_stable_set<M: Market>(instance: &M) -> Result<MatchingSet<M::Outcome>> {
    let all = instance.enumerate_outcomes()?;
    Ok(MatchingSet::new(
        all.into_iter()
            .filter(|o| instance.is_weakly_stable(o))
            .collect(),
    ))
}

/// Weakly stable matchings that no matching Pareto-dominates.
pub fn pareto_stable_set<M: Market>(instance: &M) -> Result<MatchingSet<M::Outcome>> {
    let all = instance.enumerate_outcomes()?;
    let stable = all
        .iter()
        .filter(|o| instance.is_weakly_stable(o))
        .filter(|o| !all.iter().any(|other| instance.pareto_dominates(other, o)))
        .cloned()
        .collect();
    Ok(MatchingSet::new(stable))
}

/// Some matching that Pareto-dominates `outcome`, if any.
pub fn dominating_matching<M: Market>(
    instance: &M,
    outcome: &M::Outcome,
) -> Result<Option<M::Outcome>> {
    Ok(instance
        .enumerate_outcomes()?
        .into_iter()
        .find(|other| instance.pareto_dominates(other, outcome)))
}

/// All matchings of `auction` as sorted edge lists.
fn auction_matchings(auction: &Uap) -> Result<Vec<Vec<(BidderId, ItemId)>>> {
    guard("bidders", auction.bidders().len(), AUCTION_LIMIT)?;
    guard("items", auction.items().len(), AUCTION_LIMIT)?;
    let mut out = Vec::new();
    let mut edges = Vec::new();
    let mut used = BTreeSet::new();
    fn rec(
        auction: &Uap,
        b: usize,
        edges: &mut Vec<(BidderId, ItemId)>,
        used: &mut BTreeSet<ItemId>,
        out: &mut Vec<Vec<(BidderId, ItemId)>>,
    ) {
        let Some(bidder) = auction.bidders().get(b) else {
            out.push(edges.clone());
            return;
        };
        rec(auction, b + 1, edges, used, out);
        for item in bidder.items() {
            if used.insert(item) {
                edges.push((bidder.id(), item));
                rec(auction, b + 1, edges, used, out);
                edges.pop();
                used.remove(&item);
            }
        }
    }
    rec(auction, 0, &mut edges, &mut used, &mut out);
    Ok(out)
}

/// Every matching of `auction`.
pub fn all_auction_matchings(auction: &Uap) -> Result<Vec<Matching>> {
    auction_matchings(auction)?
        .into_iter()
        .map(|edges| Matching::from_edges(auction, edges))
        .collect()
}

/// Every greedy MWM: all matchings maximizing `(weight, cardinality,
/// priority)` lexicographically.
pub fn brute_force_greedy_mwms(auction: &Uap) -> Result<Vec<Matching>> {
    let all = all_auction_matchings(auction)?;
    let best = all
        .iter()
        .map(Matching::objective)
        .max()
        .expect("the empty matching always exists");
    Ok(all.into_iter().filter(|m| m.objective() == best).collect())
}

/// The greedy MWM with the lexicographically smallest edge list.
pub fn brute_force_greedy_mwm(auction: &Uap) -> Result<Matching> {
    Ok(brute_force_greedy_mwms(auction)?
        .into_iter()
        .min_by(|a, b| a.edges().cmp(b.edges()))
        .expect("at least one greedy MWM"))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManipulationReport {
    pub agent: usize,
    pub misreport: WeakOrder,
    pub truthful_result: Option<usize>,
    pub misreport_result: Option<usize>,
    /// The misreport result is strictly better under the true order.
    pub improved: bool,
}

/// Runs `mechanism` once truthfully and once for every weak order `agent`
/// could report, judging results by the agent's true order.
pub fn manipulation_search<M, F>(
    instance: &M,
    agent: usize,
    mechanism: F,
) -> Result<Vec<ManipulationReport>>
where
    M: Market,
    F: Fn(&M) -> Result<M::Outcome>,
{
    if agent >= instance.proposers() {
        return Err(Error::InvalidInput(format!("no agent {}", agent + 1)));
    }
    guard(
        "alternatives",
        instance.receivers() + 1,
        MISREPORT_ALTERNATIVES_LIMIT,
    )?;
    let truth = instance.proposer_order(agent).clone();
    let truthful_result = M::proposer_match(&mechanism(instance)?, agent);
    WeakOrder::enumerate(instance.receivers())
        .into_iter()
        .map(|misreport| {
            let lied = instance.with_proposer_order(agent, misreport.clone())?;
            let misreport_result = M::proposer_match(&mechanism(&lied)?, agent);
            Ok(ManipulationReport {
                agent,
                improved: truth.prefers(misreport_result, truthful_result),
                misreport,
                truthful_result,
                misreport_result,
            })
        })
        .collect()
}

/// Only the reports where lying paid off.
pub fn improving_misreports<M, F>(
    instance: &M,
    agent: usize,
    mechanism: F,
) -> Result<Vec<ManipulationReport>>
where
    M: Market,
    F: Fn(&M) -> Result<M::Outcome>,
{
    Ok(manipulation_search(instance, agent, mechanism)?
        .into_iter()
        .filter(|r| r.improved)
        .collect())
}

/// Strict list obtained by breaking ties toward higher indices; unmatched
/// goes after the agents of its tier. Only entries above unmatched are kept.
fn acceptable_list(order: &WeakOrder) -> Vec<usize> {
    let mut list = Vec::new();
    for tier in order.tiers() {
        let mut agents: Vec<usize> = tier.iter().filter_map(|&a| a).collect();
        agents.sort_unstable_by(|a, b| b.cmp(a));
        list.extend(agents);
        if tier.contains(&None) {
            break;
        }
    }
    list
}

/// Man-proposing deferred acceptance after tie-breaking toward higher
/// indices.
pub fn tie_broken_deferred_acceptance(instance: &SmiwInstance) -> MatchingOutcome {
    let lists: Vec<Vec<usize>> = instance.men().iter().map(acceptable_list).collect();
    // woman_rank[j][i]: position of man i in woman j's strict list, or None
    // when he is not strictly above unmatched after tie-breaking.
    let woman_rank: Vec<Vec<Option<usize>>> = instance
        .women()
        .iter()
        .map(|o| {
            let list = acceptable_list(o);
            let mut rank = vec![None; instance.n_men()];
            for (pos, &i) in list.iter().enumerate() {
                rank[i] = Some(pos);
            }
            rank
        })
        .collect();
    let mut next = vec![0usize; instance.n_men()];
    let mut held: Vec<Option<usize>> = vec![None; instance.n_women()];
    let mut free: Vec<usize> = (0..instance.n_men()).rev().collect();
    while let Some(i) = free.pop() {
        let Some(&j) = lists[i].get(next[i]) else {
            continue;
        };
        next[i] += 1;
        let Some(rank) = woman_rank[j][i] else {
            free.push(i);
            continue;
        };
        match held[j] {
            None => held[j] = Some(i),
            Some(current) if woman_rank[j][current].is_some_and(|r| rank < r) => {
                held[j] = Some(i);
                free.push(current);
            }
            Some(_) => free.push(i),
        }
    }
    let mut assignment = vec![None; instance.n_men()];
    for (j, man) in held.iter().enumerate() {
        if let Some(i) = *man {
            assignment[i] = Some(j);
        }
    }
    MatchingOutcome::new(instance.n_women(), assignment).expect("DA is one-to-one")
}

/// Two-phase baseline: tie-broken deferred acceptance, then repeated Pareto
/// improvements (lexicographically least improving matching each time)
/// until none exists.
pub fn two_phase_baseline(instance: &SmiwInstance) -> Result<MatchingOutcome> {
    let all = instance.enumerate_outcomes()?;
    let mut current = tie_broken_deferred_acceptance(instance);
    loop {
        let improvement = all
            .iter()
            .filter(|o| instance.pareto_dominates(o, &current))
            .min()
            .cloned();
        match improvement {
            Some(better) => current = better,
            None => return Ok(current),
        }
    }
}
