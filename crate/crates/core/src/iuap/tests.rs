use super::*;
use crate::gen::random_iuap;
use crate::oracles::brute_force_greedy_mwms;
use crate::uap::priority_histogram;
use proptest::prelude::*;
use rand::Rng;

fn bidder(id: u32, priority: i64, bid: &[(u32, i64)]) -> Bidder {
    Bidder::new(
        BidderId(id),
        priority,
        bid.iter().map(|&(v, w)| (ItemId(v), w)),
    )
    .unwrap()
}

fn ids(list: &[u32]) -> BTreeSet<BidderId> {
    list.iter().map(|&k| BidderId(k)).collect()
}

/// `t1 = (<u1>, 1)` bidding 5 on v1; `t2 = (<u2, u3>, 2)` with u2 bidding 4
/// on v1 and u3 bidding 1 on v2.
fn two_multibidders() -> Iuap {
    Iuap::new(
        [ItemId(1), ItemId(2)],
        [
            Multibidder::new(1, vec![bidder(1, 1, &[(1, 5)])]).unwrap(),
            Multibidder::new(2, vec![bidder(2, 2, &[(1, 4)]), bidder(3, 2, &[(2, 1)])]).unwrap(),
        ],
    )
    .unwrap()
}

#[test]
fn empty_instance_reveals_nothing() {
    let b = Iuap::empty([ItemId(1)]);
    assert!(to_uap(&b, RevelationPolicy::default()).bidders().is_empty());
    assert!(winners(&b).is_empty());
    assert!(losers(&b).is_empty());
    assert_eq!(
        iuap_threshold(&b, ItemId(1)).unwrap(),
        ThresholdPair::new(0, 0)
    );
    let report = exit_check(&b, &Matching::empty());
    assert!(report.entries.is_empty() && report.violations.is_empty());
}

#[test]
fn unopposed_multibidder_wins() {
    let b = Iuap::new(
        [ItemId(1)],
        [Multibidder::new(1, vec![bidder(1, 1, &[(1, 3)])]).unwrap()],
    )
    .unwrap();
    let uap = to_uap(&b, RevelationPolicy::default());
    assert_eq!(uap.bidder_ids(), ids(&[1]));
    assert_eq!(winners(&b), ids(&[1]));
    assert!(losers(&b).is_empty());
    let report = exit_check(&b, &greedy_mwm(&uap));
    assert_eq!(report.entries[0].revealed, 1);
    assert_eq!(report.entries[0].matched_position, Some(1));
    assert!(report.violations.is_empty());
}

#[test]
fn fallback_bidder_is_revealed() {
    let b = two_multibidders();
    assert_eq!(
        to_uap(&b, RevelationPolicy::default()).bidder_ids(),
        ids(&[1, 2, 3])
    );
    assert_eq!(winners(&b), ids(&[1, 3]));
    assert_eq!(losers(&b), ids(&[2]));
    assert_eq!(priorities(&b), [1, 2].into());
    let m = greedy_mwm(&to_uap(&b, RevelationPolicy::default()));
    assert_eq!(m.item_of(BidderId(1)), Some(ItemId(1)));
    assert_eq!(m.item_of(BidderId(3)), Some(ItemId(2)));
}

#[test]
fn threshold_of_single_bidder() {
    let b = Iuap::new(
        [ItemId(1)],
        [Multibidder::new(1, vec![bidder(1, 1, &[(1, 5)])]).unwrap()],
    )
    .unwrap();
    assert_eq!(
        iuap_threshold(&b, ItemId(1)).unwrap(),
        ThresholdPair::new(5, 1)
    );
    assert_eq!(
        iuap_threshold(&b.without_multibidder(1), ItemId(1)).unwrap(),
        ThresholdPair::new(0, 0)
    );
    assert_eq!(
        iuap_threshold(&b, ItemId(7)).unwrap_err(),
        Error::UnknownItem(ItemId(7))
    );
}

#[test]
fn add_bidder_appends_or_opens() {
    let b = Iuap::empty([ItemId(1)]);
    let one = b.add_bidder(bidder(1, 4, &[(1, 1)])).unwrap();
    assert_eq!(one.multibidders().len(), 1);
    let two = one.add_bidder(bidder(2, 4, &[(1, 2)])).unwrap();
    assert_eq!(two.multibidders().len(), 1);
    assert_eq!(two.multibidder(4).unwrap().bidders().len(), 2);
    assert_eq!(
        two.add_bidder(bidder(2, 5, &[])).unwrap_err(),
        Error::DuplicateBidder(BidderId(2))
    );
}

#[test]
fn rejects_malformed_multibidders() {
    assert!(matches!(
        Multibidder::new(1, vec![bidder(1, 2, &[])]),
        Err(Error::PriorityMismatch { .. })
    ));
    let t = || Multibidder::new(1, vec![bidder(1, 1, &[])]).unwrap();
    assert_eq!(
        Iuap::new([ItemId(1)], [t(), t()]).unwrap_err(),
        Error::DuplicatePriority(1)
    );
}

fn seeded(seed: u64) -> rand_chacha::ChaCha8Rng {
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}

/// Same instance with every priority doubled, leaving the odd values free.
fn spaced(b: &Iuap) -> Iuap {
    let multibidders = b.multibidders().iter().map(|t| {
        let z = 2 * t.priority();
        let bidders = t
            .bidders()
            .iter()
            .map(|u| Bidder::new(u.id(), z, u.bid().iter().map(|(&v, &w)| (v, w))).unwrap())
            .collect();
        Multibidder::new(z, bidders).unwrap()
    });
    Iuap::new(b.items().iter().copied(), multibidders).unwrap()
}

/// A bidder with a fresh ID whose priority is either an unused positive
/// value or, when `fresh_priority` is false, possibly an existing one.
fn random_newcomer(rng: &mut impl Rng, b: &Iuap, fresh_priority: bool) -> Bidder {
    let id = BidderId(b.max_bidder_id().map_or(1, |i| i.0 + 1));
    let existing: Vec<Priority> = b.multibidders().iter().map(Multibidder::priority).collect();
    let top = existing.last().copied().unwrap_or(0);
    let priority = if fresh_priority || existing.is_empty() || rng.gen_bool(0.5) {
        let free: Vec<Priority> = (1..=top + 1).filter(|z| !existing.contains(z)).collect();
        free[rng.gen_range(0..free.len())]
    } else {
        existing[rng.gen_range(0..existing.len())]
    };
    let mut bid = Vec::new();
    for &v in b.items() {
        if rng.gen_bool(0.5) {
            bid.push((v, rng.gen_range(0..=9)));
        }
    }
    Bidder::new(id, priority, bid).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn revelation_order_is_irrelevant(seed in any::<u64>()) {
        let b = random_iuap(&mut seeded(seed), 5, 3, 5, 9);
        let reference = to_uap(&b, RevelationPolicy::LowestPriority);
        for k in 0..20 {
            let other = to_uap(&b, RevelationPolicy::Seeded(seed ^ k));
            prop_assert_eq!(other.bidder_ids(), reference.bidder_ids());
        }
    }

    #[test]
    fn each_priority_matched_at_most_once(seed in any::<u64>()) {
        let b = random_iuap(&mut seeded(seed), 5, 3, 5, 9);
        let m = greedy_mwm(&to_uap(&b, RevelationPolicy::default()));
        prop_assert!(priority_histogram(&m).values().all(|&c| c <= 1));
    }

    #[test]
    fn greedy_mwms_agree_on_matched_bidders(seed in any::<u64>()) {
        let b = random_iuap(&mut seeded(seed), 4, 2, 4, 9);
        let uap = to_uap(&b, RevelationPolicy::default());
        let all = brute_force_greedy_mwms(&uap).unwrap();
        for m in &all {
            prop_assert_eq!(m.matched_bidders(), winners(&b));
        }
    }

    #[test]
    fn exit_conditions_hold(seed in any::<u64>()) {
        let b = random_iuap(&mut seeded(seed), 4, 3, 5, 9);
        let unfolded = unfold(&b, RevelationPolicy::default());
        let report = exit_check(&b, &unfolded.matching);
        prop_assert!(report.violations.is_empty(), "{:?}", report.violations);
        prop_assert_eq!(report.entries.len(), b.multibidders().len());
    }

    #[test]
    fn losers_stay_losers(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let b = spaced(&random_iuap(&mut rng, 5, 3, 5, 9));
        let u = random_newcomer(&mut rng, &b, false);
        let grown = b.add_bidder(u).unwrap();
        prop_assert!(losers(&b).is_subset(&losers(&grown)));
    }

    #[test]
    fn priorities_grow_by_at_most_the_newcomer(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let b = spaced(&random_iuap(&mut rng, 5, 3, 5, 9));
        let u = random_newcomer(&mut rng, &b, false);
        let z = u.priority();
        let before = priorities(&b);
        let after = priorities(&b.add_bidder(u).unwrap());
        prop_assert!(after.len() >= before.len());
        let mut allowed = before.clone();
        allowed.insert(z);
        prop_assert!(after.is_subset(&allowed));
    }

    #[test]
    fn thresholds_never_drop(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let b = spaced(&random_iuap(&mut rng, 4, 3, 4, 9));
        let u = random_newcomer(&mut rng, &b, false);
        let grown = b.add_bidder(u).unwrap();
        for &v in b.items() {
            prop_assert!(iuap_threshold(&b, v).unwrap() <= iuap_threshold(&grown, v).unwrap());
        }
    }

    #[test]
    fn single_item_probe_obeys_threshold(seed in any::<u64>(), x in 0i64..12) {
        let mut rng = seeded(seed);
        let b = spaced(&random_iuap(&mut rng, 4, 3, 4, 9));
        let v = ItemId(rng.gen_range(1..=b.items().len() as u32));
        let z = random_newcomer(&mut rng, &b, true).priority();
        let id = BidderId(b.max_bidder_id().map_or(1, |i| i.0 + 1));
        let grown = b.add_bidder(Bidder::new(id, z, [(v, x)]).unwrap()).unwrap();
        let t = iuap_threshold(&b, v).unwrap();
        let pair = ThresholdPair::new(x, z);
        if winners(&grown).contains(&id) {
            prop_assert!(pair > t, "{} won against {}", pair, t);
        } else {
            prop_assert!(losers(&grown).contains(&id));
            prop_assert!(pair < t, "{} lost against {}", pair, t);
        }
    }

    #[test]
    fn losing_newcomer_leaves_thresholds_alone(seed in any::<u64>()) {
        let mut rng = seeded(seed);
        let b = spaced(&random_iuap(&mut rng, 4, 3, 4, 9));
        let u = random_newcomer(&mut rng, &b, false);
        let id = u.id();
        let grown = b.add_bidder(u).unwrap();
        if losers(&grown).contains(&id) {
            for &w in b.items() {
                prop_assert_eq!(iuap_threshold(&grown, w).unwrap(), iuap_threshold(&b, w).unwrap());
            }
        }
    }

    #[test]
    fn matched_bid_meets_threshold_of_the_rest(seed in any::<u64>()) {
        let b = random_iuap(&mut seeded(seed), 4, 3, 4, 9);
        let m = greedy_mwm(&to_uap(&b, RevelationPolicy::default()));
        for t in b.multibidders() {
            let rest = b.without_multibidder(t.priority());
            let z = t.priority();
            let Some(k) = t.bidders().iter().position(|u| m.is_matched(u.id())) else {
                continue;
            };
            let matched = &t.bidders()[k];
            let v = m.item_of(matched.id()).unwrap();
            let bid = ThresholdPair::new(matched.weight(v).unwrap(), z);
            prop_assert!(bid >= iuap_threshold(&rest, v).unwrap());
            for earlier in &t.bidders()[..k] {
                for (&w, &x) in earlier.bid() {
                    prop_assert!(ThresholdPair::new(x, z) < iuap_threshold(&rest, w).unwrap());
                }
            }
        }
    }
}
