use thiserror::Error;

use crate::uap::{BidderId, ItemId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bidder {0} bids on item {1} more than once")]
    DuplicateBid(BidderId, ItemId),
    #[error("bidder id {0} is used more than once")]
    DuplicateBidder(BidderId),
    #[error("item {0} is not part of the auction")]
    UnknownItem(ItemId),
    #[error("multibidder priority {0} is used more than once")]
    DuplicatePriority(i64),
    #[error("bidder {bidder} has priority {found}, expected the multibidder priority {expected}")]
    PriorityMismatch {
        bidder: BidderId,
        expected: i64,
        found: i64,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("internal consistency violation: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
