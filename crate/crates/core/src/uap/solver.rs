//! Incremental Hungarian method with priority-aware path selection.
//!
//! The solver keeps a greedy MWM of the bidders processed so far, a potential
//! for every item and every matched bidder, and processes one newcomer per
//! [`GreedySolver::step`]. The residual digraph has bidder-to-item arcs of
//! cost `-w` for non-matching edges and item-to-bidder arcs of cost `w` for
//! matching edges; only matched bidders and the newcomer take part. The
//! dummy item is implicit: every bidder can finish a path on it at cost 0,
//! so the distance to the dummy is the least distance to any bidder.
//!
//! Potentials keep every reduced cost nonnegative so Dijkstra applies. After
//! a search with reduced distances `d'` towards a target at reduced distance
//! `D`, potentials grow by `min(d', D)`; this keeps the invariant on the
//! updated residual graph and makes the reversed path arcs tight.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap};

use super::{Bidder, BidderId, ItemId, Matching, Priority, Weight};

/// How a step changed the matching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StepKind {
    /// A shortest path reached an unmatched real item; cardinality grew.
    Grow { item: ItemId },
    /// No such path existed; the path ended at a minimum-priority candidate
    /// bidder, which is now unmatched. `released` may be the newcomer.
    Swap { released: BidderId },
}

#[derive(Debug, Clone, Copy)]
enum Node {
    Bidder(usize),
    Item(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct GreedySolver {
    item_ids: Vec<ItemId>,
    item_index: HashMap<ItemId, usize>,
    bidders: Vec<Bidder>,
    arcs: Vec<Vec<(usize, Weight)>>,
    bidder_item: Vec<Option<usize>>,
    item_owner: Vec<Option<usize>>,
    bidder_potential: Vec<i64>,
    item_potential: Vec<i64>,
    matched_per_priority: HashMap<Priority, usize>,
    weight: Weight,
}

impl GreedySolver {
    pub(crate) fn new(items: impl IntoIterator<Item = ItemId>) -> Self {
        let mut item_ids: Vec<ItemId> = items.into_iter().collect();
        item_ids.sort_unstable();
        item_ids.dedup();
        let item_index = item_ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let n = item_ids.len();
        Self {
            item_ids,
            item_index,
            bidders: Vec::new(),
            arcs: Vec::new(),
            bidder_item: Vec::new(),
            item_owner: vec![None; n],
            bidder_potential: Vec::new(),
            item_potential: vec![0; n],
            matched_per_priority: HashMap::new(),
            weight: 0,
        }
    }

    pub(crate) fn matched_with_priority(&self, priority: Priority) -> usize {
        self.matched_per_priority
            .get(&priority)
            .copied()
            .unwrap_or(0)
    }

    #[cfg(test)]
    pub(crate) fn weight(&self) -> Weight {
        self.weight
    }

    pub(crate) fn bidders(&self) -> &[Bidder] {
        &self.bidders
    }

    /// Processes `newcomer`, keeping the matching a greedy MWM of the
    /// extended auction. Bids on items unknown to the solver are ignored.
    pub(crate) fn step(&mut self, newcomer: Bidder) -> StepKind {
        let u = self.bidders.len();
        let arcs: Vec<(usize, Weight)> = newcomer
            .bid()
            .iter()
            .filter_map(|(item, &w)| self.item_index.get(item).map(|&v| (v, w)))
            .collect();
        let start_potential = arcs
            .iter()
            .map(|&(v, w)| self.item_potential[v] + w)
            .max()
            .unwrap_or(0);
        self.bidders.push(newcomer);
        self.arcs.push(arcs);
        self.bidder_item.push(None);
        self.bidder_potential.push(start_potential);

        let search = self.search(u);
        let true_bidder = |b: usize| {
            search.bidder_dist[b].map(|d| d - start_potential + self.bidder_potential[b])
        };
        let true_item =
            |v: usize| search.item_dist[v].map(|d| d - start_potential + self.item_potential[v]);

        let best_bidder = search
            .reached_bidders
            .iter()
            .filter_map(|&b| true_bidder(b))
            .min()
            .expect("the newcomer is always reached");
        let best_hole = (0..self.item_ids.len())
            .filter(|&v| self.item_owner[v].is_none())
            .filter_map(true_item)
            .min();
        let best = best_hole.map_or(best_bidder, |h| h.min(best_bidder));

        let hole = (0..self.item_ids.len())
            .find(|&v| self.item_owner[v].is_none() && true_item(v) == Some(best));
        let target = match hole {
            Some(v) => Node::Item(v),
            None => {
                let candidate = search
                    .reached_bidders
                    .iter()
                    .copied()
                    .filter(|&b| true_bidder(b) == Some(best))
                    .min_by_key(|&b| (self.bidders[b].priority(), self.bidders[b].id()))
                    .expect("a shortest path to the dummy item ends at some bidder");
                Node::Bidder(candidate)
            }
        };

        let cap = match target {
            Node::Item(v) => search.item_dist[v],
            Node::Bidder(b) => search.bidder_dist[b],
        }
        .expect("target was reached");
        for v in 0..self.item_ids.len() {
            self.item_potential[v] += search.item_dist[v].map_or(cap, |d| d.min(cap));
        }
        for b in 0..self.bidders.len() {
            if b == u || self.bidder_item[b].is_some() {
                self.bidder_potential[b] += search.bidder_dist[b].map_or(cap, |d| d.min(cap));
            }
        }

        self.weight -= best;
        *self
            .matched_per_priority
            .entry(self.bidders[u].priority())
            .or_insert(0) += 1;

        match target {
            Node::Item(v) => {
                self.augment_from(v, u, &search);
                StepKind::Grow {
                    item: self.item_ids[v],
                }
            }
            Node::Bidder(b) => {
                let released = self.bidders[b].id();
                let count = self
                    .matched_per_priority
                    .get_mut(&self.bidders[b].priority())
                    .expect("released bidder's priority is counted");
                *count -= 1;
                if b != u {
                    let v = self.bidder_item[b].take().expect("candidate is matched");
                    self.item_owner[v] = None;
                    self.augment_from(v, u, &search);
                }
                StepKind::Swap { released }
            }
        }
    }

    /// Flips the alternating path that ends at item `v` back to `u`.
    fn augment_from(&mut self, mut v: usize, u: usize, search: &Search) {
        loop {
            let b = search.item_pred[v].expect("path item has a predecessor");
            let previous = self.bidder_item[b];
            self.bidder_item[b] = Some(v);
            self.item_owner[v] = Some(b);
            if b == u {
                break;
            }
            v = previous.expect("interior path bidder was matched");
        }
    }

    fn search(&self, u: usize) -> Search {
        let n_items = self.item_ids.len();
        let n_bidders = self.bidders.len();
        let mut search = Search {
            bidder_dist: vec![None; n_bidders],
            item_dist: vec![None; n_items],
            item_pred: vec![None; n_items],
            reached_bidders: Vec::new(),
        };
        let mut done_bidder = vec![false; n_bidders];
        let mut done_item = vec![false; n_items];
        // Bidders are encoded as even keys and items as odd keys so the heap
        // order is total and deterministic.
        let mut heap = BinaryHeap::new();
        search.bidder_dist[u] = Some(0);
        heap.push(Reverse((0i64, 2 * u)));

        while let Some(Reverse((d, key))) = heap.pop() {
            if key % 2 == 0 {
                let b = key / 2;
                if done_bidder[b] {
                    continue;
                }
                done_bidder[b] = true;
                search.reached_bidders.push(b);
                for &(v, w) in &self.arcs[b] {
                    if self.bidder_item[b] == Some(v) || done_item[v] {
                        continue;
                    }
                    let reduced = -w + self.bidder_potential[b] - self.item_potential[v];
                    debug_assert!(reduced >= 0, "negative reduced cost {reduced}");
                    let next = d + reduced;
                    if search.item_dist[v].is_none_or(|old| next < old) {
                        search.item_dist[v] = Some(next);
                        search.item_pred[v] = Some(b);
                        heap.push(Reverse((next, 2 * v + 1)));
                    }
                }
            } else {
                let v = key / 2;
                if done_item[v] {
                    continue;
                }
                done_item[v] = true;
                if let Some(b) = self.item_owner[v] {
                    if done_bidder[b] {
                        continue;
                    }
                    let w = self.arc_weight(b, v);
                    let reduced = w + self.item_potential[v] - self.bidder_potential[b];
                    debug_assert!(reduced >= 0, "negative reduced cost {reduced}");
                    let next = d + reduced;
                    if search.bidder_dist[b].is_none_or(|old| next < old) {
                        search.bidder_dist[b] = Some(next);
                        heap.push(Reverse((next, 2 * b)));
                    }
                }
            }
        }
        search
    }

    fn arc_weight(&self, b: usize, v: usize) -> Weight {
        self.arcs[b]
            .iter()
            .find_map(|&(item, w)| (item == v).then_some(w))
            .expect("matching edge is a bid")
    }

    pub(crate) fn matching(&self) -> Matching {
        let mut edges = std::collections::BTreeMap::new();
        let mut priorities = Vec::new();
        for (b, slot) in self.bidder_item.iter().enumerate() {
            if let Some(v) = slot {
                edges.insert(self.bidders[b].id(), self.item_ids[*v]);
                priorities.push(self.bidders[b].priority());
            }
        }
        priorities.sort_unstable();
        let matching = Matching {
            edges,
            weight: self.weight,
            priority_sum: priorities.iter().sum(),
            priorities,
        };
        debug_assert_eq!(
            matching.weight,
            self.bidder_item
                .iter()
                .enumerate()
                .filter_map(|(b, v)| v.map(|v| self.arc_weight(b, v)))
                .sum::<Weight>()
        );
        matching
    }
}

struct Search {
    bidder_dist: Vec<Option<i64>>,
    item_dist: Vec<Option<i64>>,
    item_pred: Vec<Option<usize>>,
    reached_bidders: Vec<usize>,
}
