//! Conditionalization on the raven tree: exact posteriors, their limits,
//! and the least sample size after which the posterior stays above a
//! threshold.

use alloc::format;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::credence::{ExactOrBounds, HyperReal, Rational, RavenPrior, Support, TailSequence};
use crate::error::{Error, Result};
use crate::problem::{Evidence, Hypothesis, World};

/// `joint / evidence` with the two degenerate cases (`0` and certainty)
/// decided before dividing, so infinitesimal denominators still work there.
fn conditional(joint: &HyperReal, evidence: &HyperReal) -> Result<HyperReal> {
    if evidence.is_zero() {
        return Err(Error::ZeroEvidence);
    }
    if joint.is_zero() {
        Ok(HyperReal::zero())
    } else if joint == evidence {
        Ok(HyperReal::one())
    } else {
        joint.checked_div(evidence)
    }
}

/// `Pr(h | e)`.
pub fn posterior(p: &RavenPrior, e: Evidence, h: Hypothesis) -> Result<HyperReal> {
    let evidence = p.evidence_mass(e)?;
    let joint = match (e, h) {
        (Evidence::AllBlackPrefix(_), Hypothesis::Yes) => p.p_star().clone(),
        (Evidence::AllBlackPrefix(_), Hypothesis::No) => &evidence - p.p_star(),
        (Evidence::NonBlackAt { .. }, Hypothesis::Yes) => HyperReal::zero(),
        (Evidence::NonBlackAt { .. }, Hypothesis::No) => evidence.clone(),
    };
    conditional(&joint, &evidence)
}

/// `Pr(Yes | n black ravens in a row)`.
pub fn posterior_yes(p: &RavenPrior, n: u64) -> Result<HyperReal> {
    posterior(p, Evidence::AllBlackPrefix(n), Hypothesis::Yes)
}

/// `lim_n Pr(Yes | AllBlackPrefix(n))`.
///
/// When the limiting evidence mass is a pure infinitesimal while every
/// finite one has a positive standard part, each finite posterior is
/// infinitesimal and the limit reported is that of the standard parts, `0`.
pub fn posterior_limit(p: &RavenPrior) -> Result<ExactOrBounds<HyperReal>> {
    let p_star = p.p_star();
    let branches = p.branches();
    match branches.tail_sum(1) {
        ExactOrBounds::Exact(total) => {
            let limit_mass = &HyperReal::one() - &total;
            if p_star.is_zero() {
                if limit_mass.is_zero() && matches!(branches.support(), Support::Finite(_)) {
                    return Err(Error::ZeroEvidence);
                }
                return Ok(ExactOrBounds::Exact(HyperReal::zero()));
            }
            if !limit_mass.standard_part().is_zero() {
                return limit_mass_div(p_star, &limit_mass).map(ExactOrBounds::Exact);
            }
            match branches.standard_support() {
                Support::Infinite => Ok(ExactOrBounds::Exact(HyperReal::zero())),
                _ => Err(Error::DivisionByInfinitesimal),
            }
        }
        ExactOrBounds::Bounds { lower, upper } => {
            let mass_hi = &HyperReal::one() - &lower;
            let mass_lo = HyperReal::max(p_star.clone(), &HyperReal::one() - &upper);
            if p_star.is_zero() {
                if mass_lo.is_positive() {
                    return Ok(ExactOrBounds::Exact(HyperReal::zero()));
                }
                return Err(Error::Undetermined(
                    "cannot rule out a zero-probability evidence stream".into(),
                ));
            }
            if mass_lo.standard_part().is_zero() {
                return Err(Error::Undetermined("limiting evidence mass may be infinitesimal".into()));
            }
            let lo = limit_mass_div(p_star, &mass_hi)?;
            let hi = limit_mass_div(p_star, &mass_lo)?;
            Ok(if lo == hi { ExactOrBounds::Exact(lo) } else { ExactOrBounds::Bounds { lower: lo, upper: hi } })
        }
    }
}

fn limit_mass_div(p_star: &HyperReal, mass: &HyperReal) -> Result<HyperReal> {
    conditional(p_star, mass)
}

/// Outcome of the threshold search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Least `N` with `Pr(Yes | AllBlackPrefix(n)) > t` for every `n >= N`.
    At(u64),
    NoSuchN,
}

/// Least `N` after which the posterior of "Yes" stays strictly above `t`.
///
/// Relies on the posterior being nondecreasing in `n`, so the least `n`
/// exceeding `t` is found by doubling and bisection.
pub fn least_threshold_n(p: &RavenPrior, t: &Rational) -> Result<Threshold> {
    let t_h = HyperReal::real(t.clone());
    let exceeds = |n: u64| -> Result<bool> { Ok(posterior_yes(p, n)? > t_h) };
    if exceeds(0)? {
        return Ok(Threshold::At(0));
    }
    let limit = match posterior_limit(p)? {
        ExactOrBounds::Exact(l) => l,
        ExactOrBounds::Bounds { upper, .. } if upper <= t_h => return Ok(Threshold::NoSuchN),
        ExactOrBounds::Bounds { .. } => {
            return Err(Error::Undetermined("posterior limit bounds straddle the threshold".into()))
        }
    };
    if !eventually_exceeds(p.branches(), &limit, t) {
        return Ok(Threshold::NoSuchN);
    }
    let mut hi = 1u64;
    while !exceeds(hi)? {
        hi = hi.checked_mul(2).ok_or_else(|| Error::Undetermined("threshold beyond 2^64".into()))?;
    }
    let mut lo = hi / 2; // exceeds(lo) is false
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if exceeds(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(Threshold::At(hi))
}

/// Whether some finite posterior exceeds `t`, given the exact limit.
fn eventually_exceeds(branches: &TailSequence, limit: &HyperReal, t: &Rational) -> bool {
    let std = limit.standard_part();
    if std > t {
        return true;
    }
    if std < t || *limit <= HyperReal::real(t.clone()) {
        return false;
    }
    // the standard part converges to exactly t from below unless the
    // standard masses of the branches eventually vanish
    matches!(branches.standard_support(), Support::Finite(_))
}

/// Renormalized masses of the worlds compatible with some evidence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PosteriorView {
    /// Surviving worlds with positive mass: `AllBlack` and branches up to the depth.
    pub entries: Vec<(World, HyperReal)>,
    /// Everything not listed: deeper branches plus leaked mass.
    pub residual: HyperReal,
}

impl PosteriorView {
    pub fn total(&self) -> HyperReal {
        let listed: HyperReal = self.entries.iter().map(|(_, m)| m).sum();
        &listed + &self.residual
    }
}

/// Posterior over worlds listed up to branch `depth`, plus the exact residual.
pub fn posterior_distribution(p: &RavenPrior, e: Evidence, depth: u64) -> Result<PosteriorView> {
    let evidence = p.evidence_mass(e)?;
    if evidence.is_zero() {
        return Err(Error::ZeroEvidence);
    }
    let mut entries = Vec::new();
    let candidates: Vec<World> = match e {
        Evidence::AllBlackPrefix(n) => core::iter::once(World::AllBlack)
            .chain((n + 1..=depth).map(World::FirstNonBlackAt))
            .collect(),
        Evidence::NonBlackAt { j, .. } if j <= depth => alloc::vec![World::FirstNonBlackAt(j)],
        Evidence::NonBlackAt { .. } => Vec::new(),
    };
    let mut listed = HyperReal::zero();
    for w in candidates {
        let mass = p.world_mass(w).ok_or_else(|| {
            Error::Undetermined(format!("prior mass of {w} is not known"))
        })?;
        if mass.is_zero() {
            continue;
        }
        listed = &listed + &mass;
        entries.push((w, conditional(&mass, &evidence)?));
    }
    let residual = conditional(&(&evidence - &listed), &evidence)?;
    Ok(PosteriorView { entries, residual })
}

/// The prior after conditioning on `n` black ravens, as a new [`RavenPrior`].
pub fn condition_on_prefix(p: &RavenPrior, n: u64) -> Result<RavenPrior> {
    let evidence = p.evidence_mass(Evidence::AllBlackPrefix(n))?;
    if evidence.is_zero() {
        return Err(Error::ZeroEvidence);
    }
    let rescale = |x: &HyperReal| conditional(x, &evidence);
    let zero_first = |head: &[HyperReal]| -> Result<Vec<HyperReal>> {
        head.iter()
            .enumerate()
            .map(|(i, x)| if (i as u64) < n { Ok(HyperReal::zero()) } else { rescale(x) })
            .collect()
    };
    let rescale_geometric = |g: &crate::credence::Geometric| -> Result<crate::credence::Geometric> {
        crate::credence::Geometric::new(rescale(g.scale())?, g.ratio().clone(), g.start().max(n + 1))
    };
    let branches = match p.branches() {
        TailSequence::Geometric(g) => TailSequence::Geometric(rescale_geometric(g)?),
        TailSequence::FiniteThenGeometric { head, tail } => {
            TailSequence::finite_then_geometric(zero_first(head)?, rescale_geometric(tail)?)?
        }
        TailSequence::Explicit { head, tail_upper_bound } => {
            let bound = conditional(&HyperReal::real(tail_upper_bound.clone()), &evidence)?;
            if !bound.is_real() {
                return Err(Error::Undetermined("rescaled tail bound is not real".into()));
            }
            TailSequence::explicit(zero_first(head)?, bound.standard_part().clone())?
        }
    };
    RavenPrior::new(rescale(p.p_star())?, branches)
}
