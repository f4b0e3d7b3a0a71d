//! Node budgets for the exhaustive searches.
//!
//! Every search with an exponential worst case counts the nodes it expands
//! against a cap and fails loudly on exhaustion. An exceeded budget is a
//! first-class outcome, never a silent wrong answer.

/// Default cap on expanded search nodes.
pub const DEFAULT_NODE_CAP: u64 = 10_000_000;

/// Raised when a search exceeds its node cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("search budget exhausted after {cap} nodes")]
pub struct Exhausted {
    pub cap: u64,
}

/// A mutable node counter checked against a fixed cap.
#[derive(Debug, Clone)]
pub struct Budget {
    cap: u64,
    used: u64,
}

impl Budget {
    pub fn new(cap: u64) -> Self {
        Budget { cap, used: 0 }
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn used(&self) -> u64 {
        self.used
    }

    /// Accounts for one expanded node.
    #[inline]
    pub fn tick(&mut self) -> Result<(), Exhausted> {
        self.used += 1;
        if self.used > self.cap {
            Err(Exhausted { cap: self.cap })
        } else {
            Ok(())
        }
    }
}
