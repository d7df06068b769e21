use alloc::format;
use alloc::vec;

use num_traits::{One, Zero};

use super::hyperreal::{rat, HyperReal};
use super::tail::{ExactOrBounds, Geometric, TailSequence};
use crate::error::{Error, Result};
use crate::problem::{Evidence, World};

/// Prior credences on the raven tree: `p_star` on the all-black branch and
/// `branches[k]` on the branch whose first nonblack raven is the `k`-th.
///
/// Total mass may fall short of 1. Evidence masses are always computed by
/// finite additivity, so `Pr(AllBlackPrefix(n)) = 1 - Σ_{k<=n} p_k` includes
/// any leaked mass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RavenPrior {
    p_star: HyperReal,
    branches: TailSequence,
}

impl RavenPrior {
    pub fn new(p_star: HyperReal, branches: TailSequence) -> Result<Self> {
        if p_star.is_negative() {
            return Err(Error::InvalidPrior(format!("negative mass {p_star} on AllBlack")));
        }
        let prior = RavenPrior { p_star, branches };
        let excess = match prior.total_mass() {
            ExactOrBounds::Exact(t) => t > HyperReal::one(),
            ExactOrBounds::Bounds { lower, .. } => lower > HyperReal::one(),
        };
        if excess {
            return Err(Error::InvalidPrior("total prior mass exceeds 1".into()));
        }
        Ok(prior)
    }

    pub fn p_star(&self) -> &HyperReal {
        &self.p_star
    }

    pub fn branches(&self) -> &TailSequence {
        &self.branches
    }

    /// True when no credence has an infinitesimal component.
    pub fn is_real_valued(&self) -> bool {
        let branches_real = match &self.branches {
            TailSequence::Geometric(g) => g.scale().is_real(),
            TailSequence::FiniteThenGeometric { head, tail } => {
                head.iter().all(HyperReal::is_real) && tail.scale().is_real()
            }
            TailSequence::Explicit { head, .. } => head.iter().all(HyperReal::is_real),
        };
        self.p_star.is_real() && branches_real
    }

    pub fn world_mass(&self, w: World) -> Option<HyperReal> {
        match w {
            World::AllBlack => Some(self.p_star.clone()),
            World::FirstNonBlackAt(k) => self.branches.term(k),
        }
    }

    /// `p* + Σ p_k`.
    pub fn total_mass(&self) -> ExactOrBounds<HyperReal> {
        self.branches.tail_sum(1).map(|s| &self.p_star + &s)
    }

    /// `1 - total_mass`, the mass lost under mere finite additivity.
    pub fn deficit(&self) -> ExactOrBounds<HyperReal> {
        match self.total_mass() {
            ExactOrBounds::Exact(t) => ExactOrBounds::Exact(&HyperReal::one() - &t),
            ExactOrBounds::Bounds { lower, upper } => ExactOrBounds::Bounds {
                lower: &HyperReal::one() - &upper,
                upper: &HyperReal::one() - &lower,
            },
        }
    }

    /// Prior probability of an evidence event.
    pub fn evidence_mass(&self, e: Evidence) -> Result<HyperReal> {
        match e {
            Evidence::AllBlackPrefix(n) => self
                .branches
                .prefix_sum(n)
                .map(|s| &HyperReal::one() - &s)
                .ok_or_else(|| unknown_terms(n)),
            Evidence::NonBlackAt { j, .. } => {
                self.branches.term(j).ok_or_else(|| unknown_terms(j))
            }
        }
    }
}

fn unknown_terms(n: u64) -> Error {
    Error::Undetermined(format!("branch masses up to index {n} are not all known"))
}

/// Free-function form of [`RavenPrior::total_mass`].
pub fn total_mass(p: &RavenPrior) -> ExactOrBounds<HyperReal> {
    p.total_mass()
}

/// Named priors used throughout tests, examples and the CLI.
pub mod presets {
    use super::*;

    fn halves_from(scale: HyperReal, start: u64) -> Geometric {
        Geometric::new(scale, rat(1, 2), start).expect("valid geometric family")
    }

    /// `p* = ε`, `p_1 = 1/2 - ε`, `p_k = 2^-k` for `k >= 2`: regular, total
    /// mass exactly 1, yet "Yes" never gets a standard posterior.
    pub fn infinitesimal_yes() -> RavenPrior {
        let head = vec![&HyperReal::from_ratio(1, 2) - &HyperReal::eps()];
        let branches = TailSequence::finite_then_geometric(head, halves_from(HyperReal::one(), 2))
            .expect("valid");
        RavenPrior::new(HyperReal::eps(), branches).expect("valid")
    }

    /// `p* = 1/2`, `p_k = 2^-(k+1)`: countably additive and convergent.
    pub fn countably_additive() -> RavenPrior {
        let branches = TailSequence::Geometric(halves_from(HyperReal::from_ratio(1, 2), 1));
        RavenPrior::new(HyperReal::from_ratio(1, 2), branches).expect("valid")
    }

    /// `p* = 1/4`, `p_k = 2^-(k+2)`: half the mass leaks away.
    pub fn leaky() -> RavenPrior {
        let branches = TailSequence::Geometric(halves_from(HyperReal::from_ratio(1, 4), 1));
        RavenPrior::new(HyperReal::from_ratio(1, 4), branches).expect("valid")
    }

    /// `p* = 0`, `p_k = 2^-k`.
    pub fn dogmatic_no() -> RavenPrior {
        let branches = TailSequence::Geometric(halves_from(HyperReal::one(), 1));
        RavenPrior::new(HyperReal::zero(), branches).expect("valid")
    }

    /// `p* = 1`, every branch zero.
    pub fn dogmatic_yes() -> RavenPrior {
        RavenPrior::new(HyperReal::one(), TailSequence::zero()).expect("valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credence::hyperreal::{pow2_inv, rat};

    #[test]
    fn total_mass_examples() {
        assert_eq!(presets::countably_additive().total_mass(), ExactOrBounds::Exact(HyperReal::one()));
        assert_eq!(presets::leaky().total_mass(), ExactOrBounds::Exact(HyperReal::from_ratio(1, 2)));
        assert_eq!(presets::leaky().deficit(), ExactOrBounds::Exact(HyperReal::from_ratio(1, 2)));
        let empty = RavenPrior::new(HyperReal::zero(), TailSequence::zero()).unwrap();
        assert_eq!(empty.total_mass(), ExactOrBounds::Exact(HyperReal::zero()));
        assert_eq!(presets::infinitesimal_yes().total_mass(), ExactOrBounds::Exact(HyperReal::one()));
    }

    #[test]
    fn infinitesimal_prior_evidence_masses() {
        let p = presets::infinitesimal_yes();
        assert!(!p.is_real_valued());
        assert_eq!(p.evidence_mass(Evidence::AllBlackPrefix(0)).unwrap(), HyperReal::one());
        for n in 1..30 {
            let expected = &HyperReal::real(pow2_inv(n)) + &HyperReal::eps();
            assert_eq!(p.evidence_mass(Evidence::AllBlackPrefix(n)).unwrap(), expected);
        }
    }

    #[test]
    fn overfull_prior_rejected() {
        let branches = TailSequence::geometric(HyperReal::one(), rat(1, 2), 1).unwrap();
        assert!(RavenPrior::new(HyperReal::from_ratio(1, 2), branches).is_err());
        assert!(RavenPrior::new(HyperReal::from(-1), TailSequence::zero()).is_err());
        // mass 1 + ε is also too much
        let branches = TailSequence::geometric(HyperReal::one(), rat(1, 2), 1).unwrap();
        assert!(RavenPrior::new(HyperReal::eps(), branches).is_err());
    }

    #[test]
    fn explicit_evidence_mass_beyond_head_is_undetermined() {
        let branches = TailSequence::explicit(vec![HyperReal::from_ratio(1, 4)], rat(1, 4)).unwrap();
        let p = RavenPrior::new(HyperReal::from_ratio(1, 4), branches).unwrap();
        assert_eq!(p.evidence_mass(Evidence::AllBlackPrefix(1)).unwrap(), HyperReal::from_ratio(3, 4));
        assert!(matches!(p.evidence_mass(Evidence::AllBlackPrefix(2)), Err(Error::Undetermined(_))));
    }
}
