//! Weak preference orders over the opposite side of a market plus the
//! option of staying unmatched.
//!
//! Alternatives are `Option<usize>`: `Some(j)` is the 0-based index of an
//! agent on the other side and `None` stands for being unmatched.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};

pub type Alternative = Option<usize>;

/// A total preorder given as indifference tiers, best tier first.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WeakOrder {
    tiers: Vec<Vec<Alternative>>,
    /// `rank[j]` is the tier of agent `j`; `rank[n]` is the tier of `None`.
    rank: Vec<usize>,
}

impl WeakOrder {
    /// Builds an order over `agents` counterparts. The tiers must be nonempty
    /// and list every alternative, `None` included, exactly once.
    pub fn new(agents: usize, tiers: Vec<Vec<Alternative>>) -> Result<Self> {
        let mut rank = vec![usize::MAX; agents + 1];
        for (k, tier) in tiers.iter().enumerate() {
            if tier.is_empty() {
                return Err(Error::InvalidInput(format!("tier {} is empty", k + 1)));
            }
            for &alt in tier {
                let slot = match alt {
                    Some(j) if j >= agents => {
                        return Err(Error::InvalidInput(format!(
                            "alternative {} is out of range (only {agents} agents)",
                            j + 1
                        )))
                    }
                    Some(j) => j,
                    None => agents,
                };
                if rank[slot] != usize::MAX {
                    return Err(Error::InvalidInput(format!(
                        "alternative {} is listed twice",
                        display_alt(alt)
                    )));
                }
                rank[slot] = k;
            }
        }
        if let Some(missing) = rank.iter().position(|&r| r == usize::MAX) {
            let alt = (missing < agents).then_some(missing);
            return Err(Error::InvalidInput(format!(
                "alternative {} is missing",
                display_alt(alt)
            )));
        }
        let tiers = tiers
            .into_iter()
            .map(|mut tier| {
                tier.sort_by_key(|a| a.map_or(usize::MAX, |j| j));
                tier
            })
            .collect();
        Ok(Self { tiers, rank })
    }

    /// A strict order: `ranked` in order, then `None`, then every unlisted
    /// agent in one bottom tier.
    pub fn strict(agents: usize, ranked: &[usize]) -> Result<Self> {
        let mut tiers: Vec<Vec<Alternative>> = ranked.iter().map(|&j| vec![Some(j)]).collect();
        tiers.push(vec![None]);
        let listed: BTreeSet<usize> = ranked.iter().copied().collect();
        let rest: Vec<Alternative> = (0..agents)
            .filter(|j| !listed.contains(j))
            .map(Some)
            .collect();
        if !rest.is_empty() {
            tiers.push(rest);
        }
        Self::new(agents, tiers)
    }

    /// Every agent in one tier above `None`.
    pub fn indifferent_acceptable(agents: usize) -> Self {
        let mut tiers = Vec::new();
        if agents > 0 {
            tiers.push((0..agents).map(Some).collect());
        }
        tiers.push(vec![None]);
        Self::new(agents, tiers).expect("well-formed")
    }

    /// `None` strictly above every agent.
    pub fn unwilling(agents: usize) -> Self {
        let mut tiers = vec![vec![None]];
        if agents > 0 {
            tiers.push((0..agents).map(Some).collect());
        }
        Self::new(agents, tiers).expect("well-formed")
    }

    pub fn agents(&self) -> usize {
        self.rank.len() - 1
    }

    pub fn tiers(&self) -> &[Vec<Alternative>] {
        &self.tiers
    }

    /// 0-based tier index; smaller is better.
    pub fn rank(&self, alt: Alternative) -> usize {
        match alt {
            Some(j) => self.rank[j],
            None => self.rank[self.agents()],
        }
    }

    pub fn prefers(&self, a: Alternative, b: Alternative) -> bool {
        self.rank(a) < self.rank(b)
    }

    pub fn weakly_prefers(&self, a: Alternative, b: Alternative) -> bool {
        self.rank(a) <= self.rank(b)
    }

    pub fn is_acceptable(&self, j: usize) -> bool {
        self.weakly_prefers(Some(j), None)
    }

    /// Appends `extra` agents in a new bottom tier, strictly below every
    /// existing alternative.
    pub fn padded(&self, extra: usize) -> Self {
        if extra == 0 {
            return self.clone();
        }
        let n = self.agents();
        let mut tiers = self.tiers.clone();
        tiers.push((n..n + extra).map(Some).collect());
        Self::new(n + extra, tiers).expect("padding keeps the order well-formed")
    }

    /// Replaces each agent by a block of agents: agent `j` becomes the
    /// `sizes[j]` consecutive agents of its block, all in `j`'s tier.
    pub fn expanded(&self, sizes: &[usize]) -> Self {
        assert_eq!(sizes.len(), self.agents());
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut total = 0;
        for &size in sizes {
            offsets.push(total);
            total += size;
        }
        let tiers = self
            .tiers
            .iter()
            .map(|tier| {
                tier.iter()
                    .flat_map(|&alt| -> Vec<Alternative> {
                        match alt {
                            Some(j) => (offsets[j]..offsets[j] + sizes[j]).map(Some).collect(),
                            None => vec![None],
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|tier: &Vec<Alternative>| !tier.is_empty())
            .collect();
        Self::new(total, tiers).expect("expansion keeps the order well-formed")
    }

    /// All weak orders over `agents` counterparts plus `None`: the ordered set
    /// partitions of `agents + 1` alternatives (Fubini numbers).
    pub fn enumerate(agents: usize) -> Vec<Self> {
        let alts: Vec<Alternative> = (0..agents).map(Some).chain([None]).collect();
        let mut out = Vec::new();
        let mut assignment = vec![0usize; alts.len()];
        // Assign each alternative a tier label such that labels used form
        // 0..k with no gaps; every surjection onto 0..k is one ordered
        // partition.
        fn rec(
            pos: usize,
            alts: &[Alternative],
            assignment: &mut Vec<usize>,
            agents: usize,
            out: &mut Vec<WeakOrder>,
        ) {
            if pos == alts.len() {
                let k = assignment.iter().copied().max().map_or(0, |m| m + 1);
                let mut tiers = vec![Vec::new(); k];
                for (alt, &t) in alts.iter().zip(assignment.iter()) {
                    tiers[t].push(*alt);
                }
                if tiers.iter().all(|t| !t.is_empty()) {
                    out.push(WeakOrder::new(agents, tiers).expect("ordered partition"));
                }
                return;
            }
            for t in 0..alts.len() {
                assignment[pos] = t;
                rec(pos + 1, alts, assignment, agents, out);
            }
        }
        rec(0, &alts, &mut assignment, agents, &mut out);
        out.sort();
        out.dedup();
        out
    }
}

pub(crate) fn display_alt(alt: Alternative) -> String {
    match alt {
        Some(j) => (j + 1).to_string(),
        None => "_".to_string(),
    }
}

impl fmt::Display for WeakOrder {
    /// Tiers separated by ` | `, 1-based indices, `_` for unmatched.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, tier) in self.tiers.iter().enumerate() {
            if k > 0 {
                f.write_str(" | ")?;
            }
            let parts: Vec<String> = tier.iter().map(|&a| display_alt(a)).collect();
            f.write_str(&parts.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordered_bell_numbers() {
        let counts: Vec<usize> = (0..4).map(|n| WeakOrder::enumerate(n).len()).collect();
        assert_eq!(counts, vec![1, 3, 13, 75]);
    }

    #[test]
    fn rejects_missing_and_duplicate_alternatives() {
        assert!(WeakOrder::new(2, vec![vec![Some(0)], vec![None]]).is_err());
        assert!(WeakOrder::new(1, vec![vec![Some(0)], vec![Some(0), None]]).is_err());
        assert!(WeakOrder::new(1, vec![vec![Some(1)], vec![Some(0), None]]).is_err());
        assert!(WeakOrder::new(1, vec![vec![], vec![Some(0), None]]).is_err());
    }

    #[test]
    fn ranks_and_preferences() {
        let order =
            WeakOrder::new(3, vec![vec![Some(0), Some(1)], vec![Some(2)], vec![None]]).unwrap();
        assert!(order.prefers(Some(1), Some(2)));
        assert!(order.weakly_prefers(Some(0), Some(1)));
        assert!(!order.prefers(Some(0), Some(1)));
        assert!(order.is_acceptable(2));
        assert_eq!(order.to_string(), "1 2 | 3 | _");
    }

    #[test]
    fn expansion_keeps_blocks_tied() {
        let order = WeakOrder::strict(2, &[1, 0]).unwrap();
        let expanded = order.expanded(&[1, 3]);
        assert_eq!(expanded.to_string(), "2 3 4 | 1 | _");
        let padded = expanded.padded(2);
        assert_eq!(padded.to_string(), "2 3 4 | 1 | _ | 5 6");
    }
}
