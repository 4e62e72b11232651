//! Unit-demand auctions with priorities.
//!
//! A [`Uap`] is a set of items together with a set of bidders; each bidder
//! carries a partial map from items to integer weights and an integer
//! priority. A *greedy* maximum-weight matching is a maximum-cardinality
//! maximum-weight matching whose matched bidders have maximum total
//! priority. [`greedy_mwm`] computes one with an incremental Hungarian
//! method, and [`threshold`] reports the lexicographic `(weight, priority)`
//! pair a single-item bid has to beat in order to win an item.

mod solver;

pub(crate) use solver::GreedySolver;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};

pub type Weight = i64;
pub type Priority = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BidderId(pub u32);

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for BidderId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u{}", self.0)
    }
}

/// A unit-demand bidder: an ID, a partial function from items to weights,
/// and a priority.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bidder {
    id: BidderId,
    bid: BTreeMap<ItemId, Weight>,
    priority: Priority,
}

impl Bidder {
    pub fn new(
        id: BidderId,
        priority: Priority,
        bid: impl IntoIterator<Item = (ItemId, Weight)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (item, weight) in bid {
            if map.insert(item, weight).is_some() {
                return Err(Error::DuplicateBid(id, item));
            }
        }
        Ok(Self {
            id,
            bid: map,
            priority,
        })
    }

    pub fn id(&self) -> BidderId {
        self.id
    }

    pub fn priority(&self) -> Priority {
        self.priority
    }

    pub fn bid(&self) -> &BTreeMap<ItemId, Weight> {
        &self.bid
    }

    pub fn items(&self) -> impl Iterator<Item = ItemId> + '_ {
        self.bid.keys().copied()
    }

    pub fn weight(&self, item: ItemId) -> Option<Weight> {
        self.bid.get(&item).copied()
    }
}

/// A unit-demand auction with priorities. Bidders are kept sorted by ID.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Uap {
    bidders: Vec<Bidder>,
    items: BTreeSet<ItemId>,
}

impl Uap {
    pub fn new(
        items: impl IntoIterator<Item = ItemId>,
        bidders: impl IntoIterator<Item = Bidder>,
    ) -> Result<Self> {
        let items: BTreeSet<ItemId> = items.into_iter().collect();
        let mut bidders: Vec<Bidder> = bidders.into_iter().collect();
        bidders.sort_by_key(Bidder::id);
        for pair in bidders.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(Error::DuplicateBidder(pair[0].id));
            }
        }
        for bidder in &bidders {
            if let Some(item) = bidder.items().find(|item| !items.contains(item)) {
                return Err(Error::UnknownItem(item));
            }
        }
        Ok(Self { bidders, items })
    }

    pub fn empty(items: impl IntoIterator<Item = ItemId>) -> Self {
        Self {
            bidders: Vec::new(),
            items: items.into_iter().collect(),
        }
    }

    pub fn bidders(&self) -> &[Bidder] {
        &self.bidders
    }

    pub fn items(&self) -> &BTreeSet<ItemId> {
        &self.items
    }

    pub fn bidder(&self, id: BidderId) -> Option<&Bidder> {
        self.bidders
            .binary_search_by_key(&id, Bidder::id)
            .ok()
            .map(|at| &self.bidders[at])
    }

    pub fn bidder_ids(&self) -> BTreeSet<BidderId> {
        self.bidders.iter().map(Bidder::id).collect()
    }

    /// `A + u`.
    pub fn with_bidder(&self, bidder: Bidder) -> Result<Self> {
        let at = match self.bidders.binary_search_by_key(&bidder.id, Bidder::id) {
            Ok(_) => return Err(Error::DuplicateBidder(bidder.id)),
            Err(at) => at,
        };
        if let Some(item) = bidder.items().find(|item| !self.items.contains(item)) {
            return Err(Error::UnknownItem(item));
        }
        let mut next = self.clone();
        next.bidders.insert(at, bidder);
        Ok(next)
    }

    pub fn without_bidder(&self, id: BidderId) -> Self {
        let mut next = self.clone();
        next.bidders.retain(|b| b.id != id);
        next
    }

    /// The auction restricted to matchings that leave `item` unmatched:
    /// the item is dropped from `V` and from every bid.
    pub fn without_item(&self, item: ItemId) -> Self {
        let mut next = self.clone();
        next.items.remove(&item);
        for bidder in &mut next.bidders {
            bidder.bid.remove(&item);
        }
        next
    }
}

/// A matching of a [`Uap`] together with its aggregates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    edges: BTreeMap<BidderId, ItemId>,
    weight: Weight,
    priority_sum: Priority,
    priorities: Vec<Priority>,
}

impl Matching {
    pub fn empty() -> Self {
        Self {
            edges: BTreeMap::new(),
            weight: 0,
            priority_sum: 0,
            priorities: Vec::new(),
        }
    }

    /// Builds a matching of `auction` from explicit edges, checking that each
    /// edge is a bid and that no bidder or item is used twice.
    pub fn from_edges(
        auction: &Uap,
        edges: impl IntoIterator<Item = (BidderId, ItemId)>,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        let mut used = BTreeSet::new();
        let mut weight = 0;
        let mut priorities = Vec::new();
        for (bidder_id, item) in edges {
            let bidder = auction.bidder(bidder_id).ok_or_else(|| {
                Error::InvalidInput(format!("bidder {bidder_id} is not in the auction"))
            })?;
            let w = bidder.weight(item).ok_or_else(|| {
                Error::InvalidInput(format!("bidder {bidder_id} does not bid on {item}"))
            })?;
            if map.insert(bidder_id, item).is_some() {
                return Err(Error::InvalidInput(format!(
                    "bidder {bidder_id} is matched twice"
                )));
            }
            if !used.insert(item) {
                return Err(Error::InvalidInput(format!("item {item} is matched twice")));
            }
            weight += w;
            priorities.push(bidder.priority());
        }
        priorities.sort_unstable();
        Ok(Self {
            edges: map,
            weight,
            priority_sum: priorities.iter().sum(),
            priorities,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = (BidderId, ItemId)> + '_ {
        self.edges.iter().map(|(&b, &v)| (b, v))
    }

    pub fn weight(&self) -> Weight {
        self.weight
    }

    pub fn cardinality(&self) -> usize {
        self.edges.len()
    }

    pub fn priority_sum(&self) -> Priority {
        self.priority_sum
    }

    /// Priorities of the matched bidders, ascending.
    pub fn matched_priorities(&self) -> &[Priority] {
        &self.priorities
    }

    pub fn item_of(&self, bidder: BidderId) -> Option<ItemId> {
        self.edges.get(&bidder).copied()
    }

    pub fn bidder_of(&self, item: ItemId) -> Option<BidderId> {
        self.edges
            .iter()
            .find_map(|(&b, &v)| (v == item).then_some(b))
    }

    pub fn is_matched(&self, bidder: BidderId) -> bool {
        self.edges.contains_key(&bidder)
    }

    pub fn matched_bidders(&self) -> BTreeSet<BidderId> {
        self.edges.keys().copied().collect()
    }

    /// The `(weight, cardinality, priority)` triple that greedy MWMs maximize
    /// lexicographically.
    pub fn objective(&self) -> (Weight, usize, Priority) {
        (self.weight, self.edges.len(), self.priority_sum)
    }
}

/// A lexicographically ordered `(weight, priority)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ThresholdPair {
    pub weight: Weight,
    pub priority: Priority,
}

impl ThresholdPair {
    pub fn new(weight: Weight, priority: Priority) -> Self {
        Self { weight, priority }
    }
}

impl fmt::Display for ThresholdPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.weight, self.priority)
    }
}

/// Computes a greedy MWM, processing bidders in ascending ID order.
pub fn greedy_mwm(auction: &Uap) -> Matching {
    let mut solver = GreedySolver::new(auction.items().iter().copied());
    for bidder in auction.bidders() {
        solver.step(bidder.clone());
    }
    solver.matching()
}

/// Number of matched bidders per priority.
pub fn priority_histogram(matching: &Matching) -> BTreeMap<Priority, usize> {
    let mut histogram = BTreeMap::new();
    for &z in matching.matched_priorities() {
        *histogram.entry(z).or_insert(0) += 1;
    }
    histogram
}

/// The threshold of `item`: `(W - W', Z - Z')` where `(W, Z)` are the weight
/// and priority of a greedy MWM of the auction, and `(W', Z')` those of a
/// greedy MWM among matchings that leave `item` unmatched.
pub fn threshold(auction: &Uap, item: ItemId) -> Result<ThresholdPair> {
    if !auction.items().contains(&item) {
        return Err(Error::UnknownItem(item));
    }
    let with = greedy_mwm(auction);
    let without = greedy_mwm(&auction.without_item(item));
    Ok(ThresholdPair::new(
        with.weight() - without.weight(),
        with.priority_sum() - without.priority_sum(),
    ))
}
