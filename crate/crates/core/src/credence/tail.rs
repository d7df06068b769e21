//! Branch-mass sequences `p_1, p_2, ...` whose infinite tails can be summed
//! exactly (geometric families) or bounded (explicit heads).

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use super::hyperreal::{rat_pow, HyperReal, Rational};
use crate::error::{Error, Result};

/// An exact value, or an interval when only bounds are available.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ExactOrBounds<T> {
    Exact(T),
    Bounds { lower: T, upper: T },
}

impl<T> ExactOrBounds<T> {
    pub fn exact(self) -> Option<T> {
        match self {
            ExactOrBounds::Exact(v) => Some(v),
            ExactOrBounds::Bounds { .. } => None,
        }
    }

    pub fn as_exact(&self) -> Option<&T> {
        match self {
            ExactOrBounds::Exact(v) => Some(v),
            ExactOrBounds::Bounds { .. } => None,
        }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> ExactOrBounds<U> {
        match self {
            ExactOrBounds::Exact(v) => ExactOrBounds::Exact(f(v)),
            ExactOrBounds::Bounds { lower, upper } => {
                ExactOrBounds::Bounds { lower: f(lower), upper: f(upper) }
            }
        }
    }
}

/// `p_k = scale · ratio^k` for `k >= start`, zero before.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Geometric {
    scale: HyperReal,
    ratio: Rational,
    start: u64,
}

impl Geometric {
    pub fn new(scale: HyperReal, ratio: Rational, start: u64) -> Result<Self> {
        if scale.is_negative() {
            return Err(Error::InvalidPrior(format!("negative geometric scale {scale}")));
        }
        if !ratio.is_positive() || ratio >= Rational::one() {
            return Err(Error::InvalidPrior(format!("geometric ratio must lie in (0, 1), got {ratio}")));
        }
        if start == 0 {
            return Err(Error::InvalidPrior("branch indices start at 1".into()));
        }
        Ok(Geometric { scale, ratio, start })
    }

    /// The all-zero sequence.
    pub fn zero() -> Self {
        Geometric { scale: HyperReal::zero(), ratio: Rational::new(1.into(), 2.into()), start: 1 }
    }

    pub fn scale(&self) -> &HyperReal {
        &self.scale
    }

    pub fn ratio(&self) -> &Rational {
        &self.ratio
    }

    pub fn start(&self) -> u64 {
        self.start
    }

    fn term(&self, k: u64) -> HyperReal {
        if k < self.start {
            HyperReal::zero()
        } else {
            self.scale.scale(&rat_pow(&self.ratio, k))
        }
    }

    /// `Σ_{k >= from} p_k`.
    fn tail_sum(&self, from: u64) -> HyperReal {
        let m = from.max(self.start);
        let factor = rat_pow(&self.ratio, m) / (Rational::one() - &self.ratio);
        self.scale.scale(&factor)
    }
}

/// Where the nonzero terms of a sequence (or of their standard parts) end.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Support {
    /// All terms after this index vanish; `0` means every term is zero.
    Finite(u64),
    Infinite,
    Unknown,
}

/// Result of searching the sequence for a term with some property.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermSearch {
    Found(u64),
    NotFound,
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TailSequence {
    Geometric(Geometric),
    /// `head` gives `p_1..p_h`; `tail` must start after `h`.
    FiniteThenGeometric { head: Vec<HyperReal>, tail: Geometric },
    /// Known head; the unknown remainder sums to at most `tail_upper_bound`.
    Explicit { head: Vec<HyperReal>, tail_upper_bound: Rational },
}

impl TailSequence {
    pub fn geometric(scale: HyperReal, ratio: Rational, start: u64) -> Result<Self> {
        Geometric::new(scale, ratio, start).map(TailSequence::Geometric)
    }

    pub fn zero() -> Self {
        TailSequence::Geometric(Geometric::zero())
    }

    pub fn finite_then_geometric(head: Vec<HyperReal>, tail: Geometric) -> Result<Self> {
        check_head(&head)?;
        if tail.start <= head.len() as u64 {
            return Err(Error::InvalidPrior(format!(
                "geometric tail starts at {} inside a head of length {}",
                tail.start,
                head.len()
            )));
        }
        Ok(TailSequence::FiniteThenGeometric { head, tail })
    }

    pub fn explicit(head: Vec<HyperReal>, tail_upper_bound: Rational) -> Result<Self> {
        check_head(&head)?;
        if tail_upper_bound.is_negative() {
            return Err(Error::InvalidPrior("negative tail bound".into()));
        }
        Ok(TailSequence::Explicit { head, tail_upper_bound })
    }

    /// `p_k`, or `None` where an explicit sequence is unknown.
    pub fn term(&self, k: u64) -> Option<HyperReal> {
        match self {
            TailSequence::Geometric(g) => Some(g.term(k)),
            TailSequence::FiniteThenGeometric { head, tail } => Some(
                head_term(head, k).unwrap_or_else(|| tail.term(k)),
            ),
            TailSequence::Explicit { head, tail_upper_bound } => {
                head_term(head, k).or_else(|| tail_upper_bound.is_zero().then(HyperReal::zero))
            }
        }
    }

    pub fn is_exact(&self) -> bool {
        !matches!(self, TailSequence::Explicit { tail_upper_bound, .. } if !tail_upper_bound.is_zero())
    }

    /// `Σ_{k >= from} p_k`. Indices below 1 are treated as 1.
    pub fn tail_sum(&self, from: u64) -> ExactOrBounds<HyperReal> {
        let from = from.max(1);
        match self {
            TailSequence::Geometric(g) => ExactOrBounds::Exact(g.tail_sum(from)),
            TailSequence::FiniteThenGeometric { head, tail } => {
                ExactOrBounds::Exact(&head_partial(head, from) + &tail.tail_sum(from))
            }
            TailSequence::Explicit { head, tail_upper_bound } => {
                let lower = head_partial(head, from);
                if tail_upper_bound.is_zero() {
                    ExactOrBounds::Exact(lower)
                } else {
                    let upper = &lower + &HyperReal::real(tail_upper_bound.clone());
                    ExactOrBounds::Bounds { lower, upper }
                }
            }
        }
    }

    /// `Σ_{k <= n} p_k`, exact where the first `n` terms are known.
    pub fn prefix_sum(&self, n: u64) -> Option<HyperReal> {
        match self {
            TailSequence::Explicit { head, tail_upper_bound }
                if n > head.len() as u64 && !tail_upper_bound.is_zero() =>
            {
                None
            }
            TailSequence::Explicit { head, .. } => {
                let upto = (n as usize).min(head.len());
                Some(head[..upto].iter().sum())
            }
            _ => {
                let total = self.tail_sum(1).exact()?;
                let rest = self.tail_sum(n + 1).exact()?;
                Some(&total - &rest)
            }
        }
    }

    /// Support of the terms themselves.
    pub fn support(&self) -> Support {
        self.support_by(|x| !x.is_zero())
    }

    /// Support of the standard parts of the terms.
    pub fn standard_support(&self) -> Support {
        self.support_by(|x| !x.standard_part().is_zero())
    }

    fn support_by(&self, nonzero: impl Fn(&HyperReal) -> bool) -> Support {
        let last_in = |head: &[HyperReal]| {
            head.iter().rposition(&nonzero).map_or(0, |i| i as u64 + 1)
        };
        match self {
            TailSequence::Geometric(g) => {
                if nonzero(&g.scale) {
                    Support::Infinite
                } else {
                    Support::Finite(0)
                }
            }
            TailSequence::FiniteThenGeometric { head, tail } => {
                if nonzero(&tail.scale) {
                    Support::Infinite
                } else {
                    Support::Finite(last_in(head))
                }
            }
            TailSequence::Explicit { head, tail_upper_bound } => {
                if tail_upper_bound.is_zero() {
                    Support::Finite(last_in(head))
                } else {
                    Support::Unknown
                }
            }
        }
    }

    /// First index whose term is zero.
    pub fn first_zero_term(&self) -> TermSearch {
        match self {
            TailSequence::Geometric(g) => {
                if g.scale.is_zero() || g.start > 1 {
                    TermSearch::Found(1)
                } else {
                    TermSearch::NotFound
                }
            }
            TailSequence::FiniteThenGeometric { head, tail } => {
                if let Some(i) = head.iter().position(Zero::is_zero) {
                    TermSearch::Found(i as u64 + 1)
                } else if tail.scale.is_zero() || tail.start > head.len() as u64 + 1 {
                    TermSearch::Found(head.len() as u64 + 1)
                } else {
                    TermSearch::NotFound
                }
            }
            TailSequence::Explicit { head, tail_upper_bound } => {
                if let Some(i) = head.iter().position(Zero::is_zero) {
                    TermSearch::Found(i as u64 + 1)
                } else if tail_upper_bound.is_zero() {
                    TermSearch::Found(head.len() as u64 + 1)
                } else {
                    TermSearch::Unknown
                }
            }
        }
    }

    /// First index whose term is positive.
    pub fn first_positive_term(&self) -> TermSearch {
        let in_head = |head: &[HyperReal]| head.iter().position(HyperReal::is_positive);
        match self {
            TailSequence::Geometric(g) => {
                if g.scale.is_positive() {
                    TermSearch::Found(g.start)
                } else {
                    TermSearch::NotFound
                }
            }
            TailSequence::FiniteThenGeometric { head, tail } => match in_head(head) {
                Some(i) => TermSearch::Found(i as u64 + 1),
                None if tail.scale.is_positive() => TermSearch::Found(tail.start),
                None => TermSearch::NotFound,
            },
            TailSequence::Explicit { head, tail_upper_bound } => match in_head(head) {
                Some(i) => TermSearch::Found(i as u64 + 1),
                None if tail_upper_bound.is_zero() => TermSearch::NotFound,
                None => TermSearch::Unknown,
            },
        }
    }
}

fn check_head(head: &[HyperReal]) -> Result<()> {
    match head.iter().position(HyperReal::is_negative) {
        Some(i) => Err(Error::InvalidPrior(format!("negative branch mass at index {}", i + 1))),
        None => Ok(()),
    }
}

fn head_term(head: &[HyperReal], k: u64) -> Option<HyperReal> {
    if k >= 1 && k <= head.len() as u64 {
        Some(head[(k - 1) as usize].clone())
    } else {
        None
    }
}

fn head_partial(head: &[HyperReal], from: u64) -> HyperReal {
    let skip = (from.saturating_sub(1) as usize).min(head.len());
    head[skip..].iter().sum()
}

/// Free-function form of [`TailSequence::tail_sum`].
pub fn tail_sum(s: &TailSequence, from: u64) -> ExactOrBounds<HyperReal> {
    s.tail_sum(from)
}
