//! Seeded random instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::caw::{CawInstance, College, GroupPreference};
use crate::iuap::{Iuap, Multibidder};
use crate::order::{Alternative, WeakOrder};
use crate::smiw::SmiwInstance;
use crate::uap::{Bidder, BidderId, ItemId, Uap};

/// Shuffles the alternatives, then lets each one join the tier of its
/// predecessor with probability `tie_prob`.
pub fn random_weak_order<R: Rng>(rng: &mut R, agents: usize, tie_prob: f64) -> WeakOrder {
    let mut alts: Vec<Alternative> = (0..agents).map(Some).chain([None]).collect();
    alts.shuffle(rng);
    let mut tiers: Vec<Vec<Alternative>> = Vec::new();
    for alt in alts {
        match tiers.last_mut() {
            Some(tier) if rng.gen_bool(tie_prob) => tier.push(alt),
            _ => tiers.push(vec![alt]),
        }
    }
    WeakOrder::new(agents, tiers).expect("a shuffled partition is a weak order")
}

pub fn random_smiw<R: Rng>(rng: &mut R, men: usize, women: usize, tie_prob: f64) -> SmiwInstance {
    let m = (0..men)
        .map(|_| random_weak_order(rng, women, tie_prob))
        .collect();
    let w = (0..women)
        .map(|_| random_weak_order(rng, men, tie_prob))
        .collect();
    SmiwInstance::new(m, w).expect("dimensions agree")
}

fn caw_from_capacities<R: Rng>(
    rng: &mut R,
    students: usize,
    capacities: Vec<usize>,
    tie_prob: f64,
) -> CawInstance {
    let s = (0..students)
        .map(|_| random_weak_order(rng, capacities.len(), tie_prob))
        .collect();
    let colleges = capacities
        .into_iter()
        .map(|capacity| College {
            order: random_weak_order(rng, students, tie_prob),
            capacity,
            utilities: None,
        })
        .collect();
    CawInstance::new(s, colleges, GroupPreference::MinimallyResponsive)
        .expect("generated instance is well-formed")
}

/// Capacities drawn uniformly from `1..=max_cap`.
pub fn random_caw<R: Rng>(
    rng: &mut R,
    students: usize,
    colleges: usize,
    max_cap: usize,
    tie_prob: f64,
) -> CawInstance {
    let capacities = (0..colleges).map(|_| rng.gen_range(1..=max_cap)).collect();
    caw_from_capacities(rng, students, capacities, tie_prob)
}

/// Adds colleges with capacities in `1..=max_cap` until the total capacity
/// is exactly `total_capacity` (the last one is trimmed).
pub fn random_caw_with_capacity<R: Rng>(
    rng: &mut R,
    students: usize,
    total_capacity: usize,
    max_cap: usize,
    tie_prob: f64,
) -> CawInstance {
    let mut capacities = Vec::new();
    let mut left = total_capacity;
    while left > 0 {
        let c = rng.gen_range(1..=max_cap).min(left);
        capacities.push(c);
        left -= c;
    }
    caw_from_capacities(rng, students, capacities, tie_prob)
}

fn random_bid<R: Rng>(rng: &mut R, items: usize, max_weight: i64) -> Vec<(ItemId, i64)> {
    let mut bid = Vec::new();
    for v in 1..=items as u32 {
        if rng.gen_bool(0.5) {
            bid.push((ItemId(v), rng.gen_range(0..=max_weight)));
        }
    }
    bid
}

/// Up to `max_bidders` bidders with distinct priorities over `1..=max_items`
/// items; each item enters a bid with probability one half.
pub fn random_uap<R: Rng>(
    rng: &mut R,
    max_bidders: usize,
    max_items: usize,
    max_weight: i64,
) -> Uap {
    let bidders = rng.gen_range(0..=max_bidders);
    let items = rng.gen_range(1..=max_items);
    let mut priorities: Vec<i64> = (1..=bidders as i64).collect();
    priorities.shuffle(rng);
    let list: Vec<Bidder> = priorities
        .into_iter()
        .enumerate()
        .map(|(k, z)| {
            Bidder::new(
                BidderId(k as u32 + 1),
                z,
                random_bid(rng, items, max_weight),
            )
            .expect("one weight per item")
        })
        .collect();
    Uap::new((1..=items as u32).map(ItemId), list).expect("ids are distinct")
}

pub fn random_iuap<R: Rng>(
    rng: &mut R,
    max_multibidders: usize,
    max_sequence: usize,
    max_items: usize,
    max_weight: i64,
) -> Iuap {
    let count = rng.gen_range(0..=max_multibidders);
    let items = rng.gen_range(1..=max_items);
    let mut priorities: Vec<i64> = (1..=count as i64).collect();
    priorities.shuffle(rng);
    let mut next_id = 1u32;
    let multibidders: Vec<Multibidder> = priorities
        .into_iter()
        .map(|z| {
            let len = rng.gen_range(1..=max_sequence);
            let bidders = (0..len)
                .map(|_| {
                    next_id += 1;
                    Bidder::new(BidderId(next_id - 1), z, random_bid(rng, items, max_weight))
                        .expect("one weight per item")
                })
                .collect();
            Multibidder::new(z, bidders).expect("shared priority")
        })
        .collect();
    Iuap::new((1..=items as u32).map(ItemId), multibidders).expect("well-formed")
}
