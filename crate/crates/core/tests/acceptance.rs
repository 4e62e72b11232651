//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::time::{Duration, Instant};

use paretomatch::caw::{caw_weak_stability_check, solve_caw_detailed};
use paretomatch::format::{parse_instance, Instance};
use paretomatch::gen::{
    random_caw, random_caw_with_capacity, random_iuap, random_smiw, random_uap,
};
use paretomatch::iuap::{iuap_threshold, losers, priorities, to_uap};
use paretomatch::oracles::{
    brute_force_greedy_mwm, improving_misreports, manipulation_search, pareto_stable_set,
    two_phase_baseline, weakly_stable_set, MatchingSet,
};
use paretomatch::smiw::{smiw_threshold_report, ThresholdRelation};
use paretomatch::uap::priority_histogram;
use paretomatch::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<(), String>;
type Criterion = (&'static str, fn() -> Check, Duration);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rng(criterion: u64, k: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(criterion << 32 | k)
}

const EXAMPLE_I: &str = "\
SMIW
men 3
women 3
man 1: 2 | 3 | 1 | _
man 2: 1 | 3 | 2 | _
man 3: 1 2 | 3 | _
woman 1: 3 | 1 | 2 | _
woman 2: 1 2 3 | _
woman 3: 3 | 2 | 1 | _
";

fn outcome(pairs: [(usize, usize); 3]) -> MatchingOutcome {
    let mut assignment = vec![None; 3];
    for (p, q) in pairs {
        assignment[p - 1] = Some(q - 1);
    }
    MatchingOutcome::new(3, assignment).unwrap()
}

fn worked_example() -> Check {
    let i = match parse_instance(EXAMPLE_I).map_err(|e| e.to_string())? {
        Instance::Smiw(x) => x,
        Instance::Caw(_) => return Err("fixture parsed as CAW".into()),
    };
    let lie = WeakOrder::strict(3, &[1, 0, 2]).unwrap();
    let ip = i.with_man_order(0, lie.clone()).unwrap();
    let m2 = outcome([(1, 1), (2, 3), (3, 2)]);
    let m4 = outcome([(1, 2), (2, 3), (3, 1)]);
    let m5 = outcome([(1, 3), (2, 1), (3, 2)]);
    let set = |v: Vec<MatchingOutcome>| MatchingSet::new(v);
    let e = |e: Error| e.to_string();

    ensure(
        weakly_stable_set(&i).map_err(e)? == set(vec![m2.clone(), m4.clone(), m5.clone()]),
        || "weakly stable set of I".into(),
    )?;
    ensure(
        pareto_stable_set(&i).map_err(e)? == set(vec![m4.clone(), m5.clone()]),
        || "Pareto-stable set of I".into(),
    )?;
    ensure(
        weakly_stable_set(&ip).map_err(e)? == set(vec![m2.clone(), m4.clone()]),
        || "weakly stable set of I'".into(),
    )?;
    ensure(
        pareto_stable_set(&ip).map_err(e)? == set(vec![m4.clone()]),
        || "Pareto-stable set of I'".into(),
    )?;
    ensure(two_phase_baseline(&i).map_err(e)? == m5, || {
        "baseline on I".into()
    })?;
    ensure(two_phase_baseline(&ip).map_err(e)? == m4, || {
        "baseline on I'".into()
    })?;
    let found = improving_misreports(&i, 0, two_phase_baseline).map_err(e)?;
    ensure(found.iter().any(|r| r.misreport == lie), || {
        "baseline manipulation by p1 not found".into()
    })?;
    for man in 0..3 {
        let reports = manipulation_search(&i, man, solve_smiw).map_err(e)?;
        ensure(
            reports.len() == 75 && reports.iter().all(|r| !r.improved),
            || format!("solve_smiw manipulable by p{}", man + 1),
        )?;
    }
    Ok(())
}

fn oracle_equivalence() -> Check {
    for k in 0..500 {
        let a = random_uap(&mut rng(2, k), 5, 5, 9);
        let fast = greedy_mwm(&a);
        let slow = brute_force_greedy_mwm(&a).map_err(|e| e.to_string())?;
        ensure(
            fast.weight() == slow.weight()
                && fast.cardinality() == slow.cardinality()
                && priority_histogram(&fast) == priority_histogram(&slow),
            || {
                format!(
                    "instance {k}: {:?} vs {:?}",
                    fast.objective(),
                    slow.objective()
                )
            },
        )?;
    }
    Ok(())
}

fn confluence() -> Check {
    for k in 0..100 {
        let mut r = rng(3, k);
        let b = random_iuap(&mut r, 5, 3, 5, 9);
        let reference = to_uap(&b, RevelationPolicy::LowestPriority).bidder_ids();
        for _ in 0..50 {
            let other = to_uap(&b, RevelationPolicy::Seeded(r.gen())).bidder_ids();
            ensure(other == reference, || {
                format!("instance {k}: {other:?} vs {reference:?}")
            })?;
        }
    }
    Ok(())
}

fn guarantees() -> Check {
    for k in 0..500 {
        let mut r = rng(4, k);
        let (men, women) = (r.gen_range(1..=4), r.gen_range(1..=4));
        let x = random_smiw(&mut r, men, women, 0.4);
        let out = solve_smiw(&x).map_err(|e| e.to_string())?;
        let valid = MatchingOutcome::new(x.n_women(), out.assignment().to_vec()).is_ok();
        ensure(
            valid
                && x.is_individually_rational(&out)
                && x.is_weakly_stable(&out)
                && pareto_stable_set(&x).unwrap().contains(&out),
            || format!("SMIW instance {k}"),
        )?;
    }
    for k in 0..200 {
        let mut r = rng(4, 1000 + k);
        let (students, colleges) = (r.gen_range(1..=5), r.gen_range(1..=3));
        let x = random_caw(&mut r, students, colleges, 2, 0.4);
        let (out, expansion, seats) = solve_caw_detailed(&x).map_err(|e| e.to_string())?;
        let valid = CawOutcome::new(&x, out.assignment().to_vec()).is_ok();
        let violations = caw_weak_stability_check(&x, &out);
        ensure(
            valid
                && violations.is_empty()
                && pareto_stable_set(&expansion.smiw).unwrap().contains(&seats),
            || format!("CAW instance {k}: {violations:?}"),
        )?;
    }
    Ok(())
}

fn strategyproofness() -> Check {
    for k in 0..200 {
        let x = random_smiw(&mut rng(5, k), 3, 3, 0.4);
        for man in 0..3 {
            let reports = manipulation_search(&x, man, solve_smiw).map_err(|e| e.to_string())?;
            ensure(reports.len() == 75, || {
                format!("instance {k}: {} reports", reports.len())
            })?;
            if let Some(r) = reports.iter().find(|r| r.improved) {
                return Err(format!(
                    "instance {k}: p{} gains with {}",
                    man + 1,
                    r.misreport
                ));
            }
        }
    }
    for k in 0..100 {
        let mut r = rng(5, 1000 + k);
        let students = r.gen_range(1..=4);
        let x = random_caw(&mut r, students, 2, 2, 0.4);
        for s in 0..students {
            let reports = manipulation_search(&x, s, solve_caw).map_err(|e| e.to_string())?;
            if let Some(r) = reports.iter().find(|r| r.improved) {
                return Err(format!(
                    "CAW instance {k}: s{} gains with {}",
                    s + 1,
                    r.misreport
                ));
            }
        }
    }
    Ok(())
}

/// Doubles every priority so odd values are free.
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

fn newcomer(r: &mut ChaCha8Rng, b: &Iuap) -> Bidder {
    let id = BidderId(b.all_bidders().map(|u| u.id().0).max().unwrap_or(0) + 1);
    let existing: Vec<i64> = b.multibidders().iter().map(Multibidder::priority).collect();
    let priority = if existing.is_empty() || r.gen_bool(0.5) {
        2 * r.gen_range(0..=existing.len() as i64) + 1
    } else {
        existing[r.gen_range(0..existing.len())]
    };
    let mut bid = Vec::new();
    for &v in b.items() {
        if r.gen_bool(0.5) {
            bid.push((v, r.gen_range(0..=9)));
        }
    }
    Bidder::new(id, priority, bid).unwrap()
}

fn threshold_statements() -> Check {
    for k in 0..200 {
        let mut r = rng(6, k);
        let (n, women) = (r.gen_range(1..=3), r.gen_range(1..=3));
        let x = random_smiw(&mut r, n, women, 0.4);
        let facts = smiw_threshold_report(&x).map_err(|e| e.to_string())?;
        if let Some(f) = facts.iter().find(|f| !f.holds) {
            return Err(format!("SMIW instance {k}: {f:?}"));
        }
        // Every man gets one fact for his match and one per strictly better
        // alternative in the padded market.
        let out = solve_smiw(&x).unwrap();
        let padded = x.padded();
        for (i, order) in padded.men().iter().enumerate().take(x.n_men()) {
            let own = order.rank(out.partner_of_man(i));
            let better = (0..padded.n_women())
                .map(Some)
                .chain([None])
                .filter(|&a| order.rank(a) < own)
                .count();
            let got = |rel| {
                facts
                    .iter()
                    .filter(|f| f.man == i && f.relation == rel)
                    .count()
            };
            ensure(
                got(ThresholdRelation::AtLeast) == 1 && got(ThresholdRelation::Below) == better,
                || format!("SMIW instance {k}: man {} fact count", i + 1),
            )?;
        }
    }
    for k in 0..200 {
        let mut r = rng(6, 1000 + k);
        let b = spaced(&random_iuap(&mut r, 4, 3, 4, 9));
        let u = newcomer(&mut r, &b);
        let (id, z) = (u.id(), u.priority());
        let grown = b.add_bidder(u).unwrap();
        ensure(losers(&b).is_subset(&losers(&grown)), || {
            format!("IUAP {k}: losers shrank")
        })?;
        let (before, after) = (priorities(&b), priorities(&grown));
        let mut allowed = before.clone();
        allowed.insert(z);
        ensure(
            after.len() >= before.len() && after.is_subset(&allowed),
            || format!("IUAP {k}: priorities {before:?} -> {after:?}"),
        )?;
        let lost = losers(&grown).contains(&id);
        for &v in b.items() {
            let (t0, t1) = (
                iuap_threshold(&b, v).unwrap(),
                iuap_threshold(&grown, v).unwrap(),
            );
            ensure(t0 <= t1, || format!("IUAP {k}: threshold of {v:?} dropped"))?;
            ensure(!lost || t0 == t1, || {
                format!("IUAP {k}: losing newcomer moved {v:?}")
            })?;
        }
    }
    Ok(())
}

fn timed_caw(n: usize, seed: u64) -> std::result::Result<Duration, String> {
    let mut r = rng(7, seed);
    let x = random_caw_with_capacity(&mut r, n / 2, n / 2, 5, 0.4);
    let start = Instant::now();
    let out = solve_caw(&x).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure(caw_weak_stability_check(&x, &out).is_empty(), || {
        format!("n = {n}: not stable")
    })?;
    Ok(took)
}

fn scale() -> Check {
    let small = timed_caw(100, 1)?;
    ensure(small < Duration::from_secs(10), || {
        format!("n = 100 took {small:?}")
    })?;
    let large = timed_caw(200, 2)?;
    ensure(large < Duration::from_secs(120), || {
        format!("n = 200 took {large:?}")
    })?;
    println!("    n = 100: {small:.2?}, n = 200: {large:.2?}");
    Ok(())
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("worked example", worked_example, Duration::from_secs(1)),
        (
            "oracle equivalence",
            oracle_equivalence,
            Duration::from_secs(10),
        ),
        ("confluence", confluence, Duration::from_secs(30)),
        ("mechanism guarantees", guarantees, Duration::MAX),
        (
            "strategyproofness sweep",
            strategyproofness,
            Duration::from_secs(300),
        ),
        ("threshold statements", threshold_statements, Duration::MAX),
        ("scale", scale, Duration::MAX),
    ];
    let mut failed = 0;
    for (k, (name, check, budget)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let mut result = check();
        let took = start.elapsed();
        if result.is_ok() && took >= budget {
            result = Err(format!("over budget of {budget:?}"));
        }
        match result {
            Ok(()) => println!("criterion {}: PASS  {name} ({took:.2?})", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({took:.2?}): {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
