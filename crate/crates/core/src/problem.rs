//! The raven problem: worlds are the branches of the observation tree, coarse
//! grained by where (if anywhere) the first nonblack raven shows up.

use core::fmt;

/// A branch of the observation tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum World {
    /// Every observed raven is black (the limit branch).
    AllBlack,
    /// The first nonblack raven is the `k`-th one observed, `k >= 1`.
    FirstNonBlackAt(u64),
}

/// Answer to "Are all ravens black?".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Hypothesis {
    Yes,
    No,
}

/// A finite observation record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Evidence {
    /// `n` black ravens in a row.
    AllBlackPrefix(u64),
    /// Within `n` observations, the first nonblack one is at position `j`.
    NonBlackAt { j: u64, n: u64 },
}

impl World {
    pub fn true_hypothesis(self) -> Hypothesis {
        match self {
            World::AllBlack => Hypothesis::Yes,
            World::FirstNonBlackAt(_) => Hypothesis::No,
        }
    }

    pub fn satisfies(self, e: Evidence) -> bool {
        match (self, e) {
            (World::AllBlack, Evidence::AllBlackPrefix(_)) => true,
            (World::FirstNonBlackAt(k), Evidence::AllBlackPrefix(n)) => k > n,
            (World::FirstNonBlackAt(k), Evidence::NonBlackAt { j, .. }) => k == j,
            (World::AllBlack, Evidence::NonBlackAt { .. }) => false,
        }
    }

    /// The unique evidence of length `n` that is true in this world.
    pub fn evidence_prefix(self, n: u64) -> Evidence {
        match self {
            World::FirstNonBlackAt(k) if k <= n => Evidence::NonBlackAt { j: k, n },
            _ => Evidence::AllBlackPrefix(n),
        }
    }
}

impl Evidence {
    pub fn non_black_at(j: u64, n: u64) -> Option<Evidence> {
        (j >= 1 && j <= n).then_some(Evidence::NonBlackAt { j, n })
    }

    /// Number of observations recorded.
    pub fn len(self) -> u64 {
        match self {
            Evidence::AllBlackPrefix(n) | Evidence::NonBlackAt { n, .. } => n,
        }
    }

    pub fn is_empty(self) -> bool {
        self.len() == 0
    }

    pub fn is_well_formed(self) -> bool {
        match self {
            Evidence::AllBlackPrefix(_) => true,
            Evidence::NonBlackAt { j, n } => j >= 1 && j <= n,
        }
    }
}

/// Free-function form of [`World::true_hypothesis`].
pub fn true_hypothesis(w: World) -> Hypothesis {
    w.true_hypothesis()
}

/// Free-function form of [`World::satisfies`].
pub fn world_satisfies(w: World, e: Evidence) -> bool {
    w.satisfies(e)
}

/// Free-function form of [`World::evidence_prefix`].
pub fn evidence_prefix_of(w: World, n: u64) -> Evidence {
    w.evidence_prefix(n)
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            World::AllBlack => f.write_str("AllBlack"),
            World::FirstNonBlackAt(k) => write!(f, "FirstNonBlackAt({k})"),
        }
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Hypothesis::Yes => "Yes",
            Hypothesis::No => "No",
        })
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evidence::AllBlackPrefix(n) => write!(f, "AllBlackPrefix({n})"),
            Evidence::NonBlackAt { j, n } => write!(f, "NonBlackAt({j}, {n})"),
        }
    }
}
