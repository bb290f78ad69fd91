//! Communication accounting: per-pair message and payload-byte counters.

use crate::pgas::RankId;

/// Message count and payload bytes for one ordered rank pair (or a total).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct PairCounters {
    pub messages: u64,
    pub bytes: u64,
}

/// Snapshot of all communication counters of a world.
///
/// Counters are monotonically non-decreasing over the lifetime of a world.
/// Network traffic is kept per ordered `(source, destination)` pair with
/// `source != destination`; self-transfers move no network bytes and are
/// recorded under [`CommStats::local_copies`] instead.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommStats {
    ranks: usize,
    pairs: Vec<PairCounters>,
    local: PairCounters,
}

impl CommStats {
    pub(crate) fn new(ranks: usize) -> Self {
        Self {
            ranks,
            pairs: vec![PairCounters::default(); ranks * ranks],
            local: PairCounters::default(),
        }
    }

    /// Number of ranks in the world this snapshot came from.
    pub fn ranks(&self) -> usize {
        self.ranks
    }

    /// Counters for the ordered pair `src -> dst`.
    pub fn pair(&self, src: RankId, dst: RankId) -> PairCounters {
        self.pairs[src.0 * self.ranks + dst.0]
    }

    /// Counters for owner-to-self transfers (no network traffic).
    pub fn local_copies(&self) -> PairCounters {
        self.local
    }

    /// Network totals over all ordered pairs (local copies excluded).
    pub fn total(&self) -> PairCounters {
        let mut t = PairCounters::default();
        for p in &self.pairs {
            t.messages += p.messages;
            t.bytes += p.bytes;
        }
        t
    }

    /// All pairs with nonzero counters, ordered by (src, dst).
    pub fn nonzero_pairs(&self) -> Vec<((RankId, RankId), PairCounters)> {
        let mut out = Vec::new();
        for s in 0..self.ranks {
            for d in 0..self.ranks {
                let c = self.pairs[s * self.ranks + d];
                if c != PairCounters::default() {
                    out.push(((RankId(s), RankId(d)), c));
                }
            }
        }
        out
    }

    /// Counter increments accumulated since `base` was captured.
    ///
    /// Panics if the snapshots come from worlds of different sizes or if
    /// `base` is not an earlier snapshot of the same counters.
    pub fn delta_since(&self, base: &CommStats) -> CommStats {
        assert_eq!(self.ranks, base.ranks, "snapshots from different worlds");
        let pairs = self
            .pairs
            .iter()
            .zip(&base.pairs)
            .map(|(now, then)| PairCounters {
                messages: now.messages.checked_sub(then.messages).expect("non-monotonic counters"),
                bytes: now.bytes.checked_sub(then.bytes).expect("non-monotonic counters"),
            })
            .collect();
        CommStats {
            ranks: self.ranks,
            pairs,
            local: PairCounters {
                messages: self.local.messages - base.local.messages,
                bytes: self.local.bytes - base.local.bytes,
            },
        }
    }

    pub(crate) fn record_transfer(&mut self, src: RankId, dst: RankId, bytes: u64) {
        // Self-transfers carry no network payload; they are tallied apart so
        // network totals stay comparable with analytic models.
        if src == dst {
            self.local.messages += 1;
            self.local.bytes += bytes;
        } else {
            let p = &mut self.pairs[src.0 * self.ranks + dst.0];
            p.messages += 1;
            p.bytes += bytes;
        }
    }

    pub(crate) fn record_broadcast(&mut self, root: RankId, bytes: u64) {
        for dst in 0..self.ranks {
            if dst != root.0 {
                let p = &mut self.pairs[root.0 * self.ranks + dst];
                p.messages += 1;
                p.bytes += bytes;
            }
        }
    }
}

/// Analytic communication model: per ordered (source, destination) pair, the
/// messages and payload bytes one exchange moves. Kernels build one of these
/// from their data layout and compare it against a measured [`CommStats`]
/// delta over the same window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PredictedVolume {
    ranks: usize,
    pairs: Vec<PairCounters>,
}

impl PredictedVolume {
    pub(crate) fn new(ranks: usize) -> Self {
        Self {
            ranks,
            pairs: vec![PairCounters::default(); ranks * ranks],
        }
    }

    pub(crate) fn add(&mut self, src: RankId, dst: RankId, messages: u64, bytes: u64) {
        let p = &mut self.pairs[src.0 * self.ranks + dst.0];
        p.messages += messages;
        p.bytes += bytes;
    }

    pub fn ranks(&self) -> usize {
        self.ranks
    }

    pub fn pair(&self, src: RankId, dst: RankId) -> PairCounters {
        self.pairs[src.0 * self.ranks + dst.0]
    }

    pub fn total(&self) -> PairCounters {
        let mut t = PairCounters::default();
        for p in &self.pairs {
            t.messages += p.messages;
            t.bytes += p.bytes;
        }
        t
    }

    /// The model for `iters` back-to-back exchanges.
    pub fn scaled(&self, iters: u64) -> Self {
        Self {
            ranks: self.ranks,
            pairs: self
                .pairs
                .iter()
                .map(|p| PairCounters {
                    messages: p.messages * iters,
                    bytes: p.bytes * iters,
                })
                .collect(),
        }
    }

    /// Exact per-pair comparison against measured counters. Local copies must
    /// be absent: exchanges never move data a rank already owns.
    pub fn matches(&self, measured: &CommStats) -> bool {
        if measured.ranks() != self.ranks || measured.local_copies() != PairCounters::default() {
            return false;
        }
        (0..self.ranks).all(|s| {
            (0..self.ranks).all(|d| self.pair(RankId(s), RankId(d)) == measured.pair(RankId(s), RankId(d)))
        })
    }
}
