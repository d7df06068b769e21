//! Norm checkers over raven priors and the backward-induction solver that
//! turns a convergence requirement into a constraint on the prior.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{One, Zero};

use crate::credence::{rat, ExactOrBounds, HyperReal, RavenPrior, Support, TailSequence, TermSearch};
use crate::error::{Error, Result};
use crate::problem::{Evidence, World};
use crate::update::{least_threshold_n, posterior_limit, posterior_yes, Threshold};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Norm {
    Regularity,
    OpenMindednessYes,
    OpenMindednessNo,
    SimpleConvergence,
    LocalCountableAdditivity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Holds,
    Fails,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Witness {
    Evidence(Evidence),
    World(World),
    /// A world whose evidence stream reaches probability zero.
    UndefinedConditioning(World),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormVerdict {
    pub norm: Norm,
    pub status: Status,
    pub witness: Option<Witness>,
    /// The condition the norm imposes on the prior.
    pub constraint: Option<String>,
    /// The computed quantity the verdict rests on (posterior, limit, mass).
    pub value: Option<ExactOrBounds<HyperReal>>,
    pub trace: Vec<String>,
}

impl NormVerdict {
    fn new(norm: Norm, status: Status) -> Self {
        NormVerdict { norm, status, witness: None, constraint: None, value: None, trace: Vec::new() }
    }

    fn witness(mut self, w: Witness) -> Self {
        self.witness = Some(w);
        self
    }

    fn constraint(mut self, c: &str) -> Self {
        self.constraint = Some(c.into());
        self
    }

    fn value(mut self, v: ExactOrBounds<HyperReal>) -> Self {
        self.value = Some(v);
        self
    }

    fn note(mut self, line: String) -> Self {
        self.trace.push(line);
        self
    }

    pub fn holds(&self) -> bool {
        self.status == Status::Holds
    }
}

/// Regularity: every world consistent with the (empty) evidence gets positive
/// credence. Infinitesimal credences count as positive.
pub fn check_regularity(p: &RavenPrior) -> NormVerdict {
    let base = |s| NormVerdict::new(Norm::Regularity, s).constraint("p* > 0 and p_k > 0 for every k >= 1");
    if !p.p_star().is_positive() {
        return base(Status::Fails)
            .witness(Witness::World(World::AllBlack))
            .note(format!("p* = {}", p.p_star()));
    }
    match p.branches().first_zero_term() {
        TermSearch::Found(k) => base(Status::Fails)
            .witness(Witness::World(World::FirstNonBlackAt(k)))
            .note(format!("p_{k} = 0")),
        TermSearch::NotFound => base(Status::Holds)
            .note(format!("p* = {} > 0", p.p_star()))
            .note("every branch term is positive by the family parameters".into()),
        TermSearch::Unknown => base(Status::Undetermined)
            .note("head terms are positive; the tail beyond the head is only bounded".into()),
    }
}

/// Open-Mindedness verdicts for both hypotheses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OpenMindedness {
    pub yes: NormVerdict,
    pub no: NormVerdict,
}

/// Open-Mindedness (local): each hypothesis gets posterior strictly above 1/2
/// on some possible evidence.
pub fn check_open_mindedness(p: &RavenPrior) -> OpenMindedness {
    OpenMindedness { yes: open_minded_yes(p), no: open_minded_no(p) }
}

fn open_minded_no(p: &RavenPrior) -> NormVerdict {
    let base = |s| NormVerdict::new(Norm::OpenMindednessNo, s).constraint("p_k > 0 for some k >= 1");
    match p.branches().first_positive_term() {
        TermSearch::Found(k) => base(Status::Holds)
            .witness(Witness::Evidence(Evidence::NonBlackAt { j: k, n: k }))
            .value(ExactOrBounds::Exact(HyperReal::one()))
            .note(format!("Pr(No | NonBlackAt({k}, {k})) = 1 since p_{k} > 0")),
        TermSearch::NotFound => base(Status::Fails)
            .note("every branch has mass 0, so refuting evidence has probability 0".into()),
        TermSearch::Unknown => base(Status::Undetermined)
            .note("known branch masses are 0 and the tail is only bounded".into()),
    }
}

fn open_minded_yes(p: &RavenPrior) -> NormVerdict {
    let base = |s| {
        NormVerdict::new(Norm::OpenMindednessYes, s)
            .constraint("p* / (1 - (p_1 + ... + p_n)) > 1/2 for some n")
    };
    if p.p_star().is_zero() {
        return base(Status::Fails)
            .value(ExactOrBounds::Exact(HyperReal::zero()))
            .note("p* = 0, so Pr(Yes | E) = 0 wherever it is defined".into());
    }
    let half = rat(1, 2);
    match least_threshold_n(p, &half) {
        Ok(Threshold::At(n)) => {
            let post = posterior_yes(p, n).expect("defined at the threshold");
            base(Status::Holds)
                .witness(Witness::Evidence(Evidence::AllBlackPrefix(n)))
                .note(format!("Pr(Yes | AllBlackPrefix({n})) = {post} > 1/2"))
                .value(ExactOrBounds::Exact(post))
        }
        Ok(Threshold::NoSuchN) => {
            let limit = posterior_limit(p).ok();
            let mut v = base(Status::Fails);
            if p.p_star().standard_part().is_zero()
                && p.branches().standard_support() == Support::Infinite
            {
                v = v.note(
                    "p* is infinitesimal while 1 - (p_1 + ... + p_n) keeps a positive standard part \
                     for every n, so every Pr(Yes | AllBlackPrefix(n)) is infinitesimal, hence < 1/2"
                        .into(),
                );
            } else {
                v = v.note("Pr(Yes | AllBlackPrefix(n)) is nondecreasing with limit <= 1/2".into());
            }
            if let Some(l) = limit {
                v = v.value(l);
            }
            v
        }
        Err(e) => base(Status::Undetermined).note(format!("{e}")),
    }
}

/// Simple Convergence: the posterior in the true hypothesis tends to 1 in
/// every world. Worlds whose evidence stream has probability zero count as
/// failures.
pub fn check_simple_convergence(p: &RavenPrior) -> NormVerdict {
    let base = |s| {
        NormVerdict::new(Norm::SimpleConvergence, s)
            .constraint("p* / (1 - Σ_k p_k) = 1 and p_k > 0 for every k >= 1")
    };
    let mut undetermined: Vec<String> = Vec::new();
    let limit = posterior_limit(p);
    let all_black_failure = match &limit {
        Ok(ExactOrBounds::Exact(l)) if l.is_one() => None,
        Ok(ExactOrBounds::Exact(l)) => Some(
            base(Status::Fails)
                .witness(Witness::World(World::AllBlack))
                .value(ExactOrBounds::Exact(l.clone()))
                .note(format!("in AllBlack, Pr(Yes | AllBlackPrefix(n)) -> {l} != 1")),
        ),
        Ok(b @ ExactOrBounds::Bounds { upper, .. }) => {
            if *upper < HyperReal::one() {
                Some(
                    base(Status::Fails)
                        .witness(Witness::World(World::AllBlack))
                        .value(b.clone())
                        .note(format!("in AllBlack the limit is at most {upper} < 1")),
                )
            } else {
                undetermined.push("limit bounds include 1".into());
                None
            }
        }
        Err(Error::ZeroEvidence) => Some(
            base(Status::Fails)
                .witness(Witness::UndefinedConditioning(World::AllBlack))
                .note("AllBlack's evidence stream reaches probability 0".into()),
        ),
        Err(e) => {
            undetermined.push(format!("{e}"));
            None
        }
    };
    if let Some(v) = all_black_failure {
        return v;
    }
    match p.branches().first_zero_term() {
        TermSearch::Found(k) => {
            let mut v = base(Status::Fails)
                .witness(Witness::UndefinedConditioning(World::FirstNonBlackAt(k)))
                .note(format!(
                    "p_{k} = 0: conditioning on NonBlackAt({k}, n) is undefined, so no convergence in FirstNonBlackAt({k})"
                ));
            if let Ok(l) = limit {
                v = v.value(l);
            }
            return v;
        }
        TermSearch::Unknown => undetermined.push("tail branch masses are only bounded".into()),
        TermSearch::NotFound => {}
    }
    if !undetermined.is_empty() {
        let mut v = base(Status::Undetermined);
        for u in undetermined {
            v = v.note(u);
        }
        return v;
    }
    base(Status::Holds)
        .value(limit.expect("limit computed"))
        .note("in AllBlack, Pr(Yes | AllBlackPrefix(n)) -> 1".into())
        .note("in FirstNonBlackAt(k), Pr(No | NonBlackAt(k, n)) = 1 for every n >= k".into())
}

/// Local Countable Additivity: `p* + Σ p_k = 1`.
pub fn check_local_countable_additivity(p: &RavenPrior) -> NormVerdict {
    let base = |s| NormVerdict::new(Norm::LocalCountableAdditivity, s).constraint("p* + Σ_k p_k = 1");
    match p.total_mass() {
        ExactOrBounds::Exact(t) if t.is_one() => {
            base(Status::Holds).value(ExactOrBounds::Exact(t)).note("total mass is exactly 1".into())
        }
        ExactOrBounds::Exact(t) => base(Status::Fails)
            .note(format!("total mass {t}, leaked {}", &HyperReal::one() - &t))
            .value(ExactOrBounds::Exact(t)),
        b @ ExactOrBounds::Bounds { .. } => {
            let ExactOrBounds::Bounds { upper, .. } = &b else { unreachable!() };
            let status = if *upper < HyperReal::one() { Status::Fails } else { Status::Undetermined };
            base(status).note("total mass known only within bounds".into()).value(b)
        }
    }
}

/// Solve Simple Convergence in the all-black world for `p*`: the unique
/// `p* = 1 - Σ p_k`.
///
/// Infeasible when that leaves `p*` with zero standard part: a zero `p*` has
/// an undefined limit and an infinitesimal one keeps every posterior
/// infinitesimal.
pub fn backward_induce_pstar(branches: &TailSequence) -> Result<HyperReal> {
    let total = branches
        .tail_sum(1)
        .exact()
        .ok_or_else(|| Error::Undetermined("branch total is only bounded".into()))?;
    if total > HyperReal::one() {
        return Err(Error::InvalidPrior(format!("branch masses sum to {total} > 1")));
    }
    let p_star = &HyperReal::one() - &total;
    if p_star.is_zero() {
        return Err(Error::Infeasible("branch masses sum to 1, forcing p* = 0".into()));
    }
    if p_star.standard_part().is_zero() {
        return Err(Error::Infeasible(format!(
            "branch masses sum to {total}, forcing an infinitesimal p* = {p_star}"
        )));
    }
    Ok(p_star)
}

/// One instance of "Simple Convergence implies local Countable Additivity".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImplicationReport {
    pub simple_convergence: NormVerdict,
    pub local_ca: NormVerdict,
    /// False only for a counterexample: convergence holds but additivity fails.
    pub implication_holds: bool,
}

pub fn derive_ca_from_convergence(p: &RavenPrior) -> ImplicationReport {
    let simple_convergence = check_simple_convergence(p);
    let local_ca = check_local_countable_additivity(p);
    let implication_holds =
        !(simple_convergence.status == Status::Holds && local_ca.status == Status::Fails);
    ImplicationReport { simple_convergence, local_ca, implication_holds }
}

/// Every norm verdict for one prior.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormReport {
    pub regularity: NormVerdict,
    pub open_mindedness: OpenMindedness,
    pub simple_convergence: NormVerdict,
    pub local_ca: NormVerdict,
    pub implication_holds: bool,
}

impl NormReport {
    pub fn verdicts(&self) -> Vec<&NormVerdict> {
        vec![
            &self.regularity,
            &self.open_mindedness.yes,
            &self.open_mindedness.no,
            &self.simple_convergence,
            &self.local_ca,
        ]
    }

    pub fn any_fails(&self) -> bool {
        self.verdicts().iter().any(|v| v.status == Status::Fails)
    }
}

pub fn check_all(p: &RavenPrior) -> NormReport {
    let implication = derive_ca_from_convergence(p);
    NormReport {
        regularity: check_regularity(p),
        open_mindedness: check_open_mindedness(p),
        simple_convergence: implication.simple_convergence,
        local_ca: implication.local_ca,
        implication_holds: implication.implication_holds,
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Regularity => "Regularity",
            Norm::OpenMindednessYes => "OpenMindedness(Yes)",
            Norm::OpenMindednessNo => "OpenMindedness(No)",
            Norm::SimpleConvergence => "SimpleConvergence",
            Norm::LocalCountableAdditivity => "LocalCA",
        })
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Holds => "Holds",
            Status::Fails => "Fails",
            Status::Undetermined => "Undetermined",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::credence::{presets, Geometric};
    use proptest::prelude::*;

    fn halves(scale: HyperReal) -> TailSequence {
        TailSequence::geometric(scale, rat(1, 2), 1).unwrap()
    }

    #[test]
    fn regularity_examples() {
        assert_eq!(check_regularity(&presets::infinitesimal_yes()).status, Status::Holds);
        let v = check_regularity(&presets::dogmatic_no());
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.witness, Some(Witness::World(World::AllBlack)));
        assert_eq!(check_regularity(&presets::countably_additive()).status, Status::Holds);
        let v = check_regularity(&presets::dogmatic_yes());
        assert_eq!(v.witness, Some(Witness::World(World::FirstNonBlackAt(1))));
    }

    #[test]
    fn open_mindedness_examples() {
        let om = check_open_mindedness(&presets::infinitesimal_yes());
        assert_eq!(om.yes.status, Status::Fails);
        assert_eq!(om.no.status, Status::Holds);
        assert_eq!(om.no.witness, Some(Witness::Evidence(Evidence::NonBlackAt { j: 1, n: 1 })));

        let om = check_open_mindedness(&presets::countably_additive());
        assert_eq!(om.yes.status, Status::Holds);
        assert_eq!(om.yes.witness, Some(Witness::Evidence(Evidence::AllBlackPrefix(1))));
        assert_eq!(om.yes.value, Some(ExactOrBounds::Exact(HyperReal::from_ratio(2, 3))));

        assert_eq!(check_open_mindedness(&presets::dogmatic_no()).yes.status, Status::Fails);
        assert_eq!(check_open_mindedness(&presets::dogmatic_yes()).no.status, Status::Fails);
    }

    #[test]
    fn open_mindedness_threshold_is_strict() {
        // limit exactly 1/2: p* = 1/4, p_k = 2^-(k+2) gives 1/3; use p* = 1/3, branches 1/3 total
        let branches = TailSequence::geometric(HyperReal::from_ratio(1, 3), rat(1, 2), 1).unwrap();
        let p = RavenPrior::new(HyperReal::from_ratio(1, 3), branches).unwrap();
        assert_eq!(posterior_limit(&p).unwrap(), ExactOrBounds::Exact(HyperReal::from_ratio(1, 2)));
        assert_eq!(check_open_mindedness(&p).yes.status, Status::Fails);
    }

    #[test]
    fn simple_convergence_examples() {
        let v = check_simple_convergence(&presets::countably_additive());
        assert_eq!(v.status, Status::Holds);
        assert_eq!(v.value, Some(ExactOrBounds::Exact(HyperReal::one())));

        let v = check_simple_convergence(&presets::leaky());
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.value, Some(ExactOrBounds::Exact(HyperReal::from_ratio(1, 3))));

        let v = check_simple_convergence(&presets::dogmatic_yes());
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.witness, Some(Witness::UndefinedConditioning(World::FirstNonBlackAt(1))));

        let v = check_simple_convergence(&presets::infinitesimal_yes());
        assert_eq!(v.status, Status::Fails);
    }

    #[test]
    fn countable_additivity_examples() {
        assert_eq!(check_local_countable_additivity(&presets::countably_additive()).status, Status::Holds);
        let v = check_local_countable_additivity(&presets::leaky());
        assert_eq!(v.status, Status::Fails);
        assert_eq!(v.value, Some(ExactOrBounds::Exact(HyperReal::from_ratio(1, 2))));
        assert_eq!(check_local_countable_additivity(&presets::dogmatic_yes()).status, Status::Holds);
    }

    #[test]
    fn bounded_tails_are_undetermined() {
        let branches = TailSequence::explicit(vec![HyperReal::from_ratio(1, 4)], rat(1, 4)).unwrap();
        let p = RavenPrior::new(HyperReal::from_ratio(1, 2), branches).unwrap();
        assert_eq!(check_local_countable_additivity(&p).status, Status::Undetermined);
        assert_eq!(check_simple_convergence(&p).status, Status::Undetermined);
        assert_eq!(check_regularity(&p).status, Status::Undetermined);
        assert!(matches!(backward_induce_pstar(p.branches()), Err(Error::Undetermined(_))));
    }

    #[test]
    fn backward_induction_examples() {
        assert_eq!(backward_induce_pstar(&halves(HyperReal::from_ratio(1, 2))), Ok(HyperReal::from_ratio(1, 2)));
        assert_eq!(backward_induce_pstar(&TailSequence::zero()), Ok(HyperReal::one()));
        let branches = halves(HyperReal::from_ratio(1, 4));
        let p_star = backward_induce_pstar(&branches).unwrap();
        assert_eq!(p_star, HyperReal::from_ratio(3, 4));
        let p = RavenPrior::new(p_star, branches).unwrap();
        assert_eq!(check_simple_convergence(&p).status, Status::Holds);
    }

    #[test]
    fn backward_induction_infeasible() {
        assert!(matches!(backward_induce_pstar(&halves(HyperReal::one())), Err(Error::Infeasible(_))));
        let infinitesimal = presets::infinitesimal_yes();
        assert!(matches!(backward_induce_pstar(infinitesimal.branches()), Err(Error::Infeasible(_))));
    }

    #[test]
    fn implication_examples() {
        let r = derive_ca_from_convergence(&presets::countably_additive());
        assert_eq!((r.simple_convergence.status, r.local_ca.status), (Status::Holds, Status::Holds));
        assert!(r.implication_holds);
        let r = derive_ca_from_convergence(&presets::leaky());
        assert_eq!((r.simple_convergence.status, r.local_ca.status), (Status::Fails, Status::Fails));
        assert!(r.implication_holds);
        let r = derive_ca_from_convergence(&presets::dogmatic_no());
        assert_eq!((r.simple_convergence.status, r.local_ca.status), (Status::Fails, Status::Holds));
        assert!(r.implication_holds);
    }

    fn prior_family() -> impl Strategy<Value = RavenPrior> {
        (0i64..=8, 1i64..8, 1u64..4, prop_oneof![Just(0u8), Just(1), Just(2)]).prop_filter_map(
            "valid",
            |(p8, r8, start, mode)| {
                let r = rat(r8, 8);
                let p_star = rat(p8, 8);
                let unit = crate::credence::hyperreal::rat_pow(&r, start) / (rat(1, 1) - &r);
                let remaining = rat(1, 1) - &p_star;
                let scale = match mode {
                    0 => remaining / unit,
                    1 => remaining / (unit * rat(3, 1)),
                    _ => rat(0, 1),
                };
                let branches = TailSequence::Geometric(
                    Geometric::new(HyperReal::real(scale), r, start).ok()?,
                );
                RavenPrior::new(HyperReal::real(p_star), branches).ok()
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn convergence_implies_additivity(p in prior_family()) {
            let r = derive_ca_from_convergence(&p);
            prop_assert!(r.implication_holds);
        }

        #[test]
        fn backward_induction_round_trips(r8 in 1i64..8, s in 1i64..64, start in 1u64..3) {
            let r = rat(r8, 8);
            let unit = crate::credence::hyperreal::rat_pow(&r, start) / (rat(1, 1) - &r);
            // total branch mass s/64 < 1
            let branches = TailSequence::geometric(HyperReal::real(rat(s, 64) / unit), r, start).unwrap();
            let p_star = backward_induce_pstar(&branches).unwrap();
            let p = RavenPrior::new(p_star, branches).unwrap();
            let v = check_simple_convergence(&p);
            if start == 1 {
                prop_assert_eq!(v.status, Status::Holds);
            } else {
                // the all-black limit is fixed, but branch 1 has mass 0
                prop_assert_eq!(v.witness, Some(Witness::UndefinedConditioning(World::FirstNonBlackAt(1))));
            }
        }

        #[test]
        fn infinitesimal_p_star_is_never_open_minded(
            c in 1i64..20, r8 in 1i64..8, head_std in 0i64..8,
        ) {
            // p* = c·ε; one real head term then a real geometric tail, with an
            // infinitesimal correction so the total is 1 - (c-1)ε or similar
            let r = rat(r8, 8);
            let head_real = rat(head_std, 8);
            let unit = crate::credence::hyperreal::rat_pow(&r, 2) / (rat(1, 1) - &r);
            let tail_scale = (rat(1, 1) - &head_real) / unit;
            let head = vec![&HyperReal::real(head_real) - &HyperReal::eps().scale(&rat(c, 1))];
            let tail = Geometric::new(HyperReal::real(tail_scale), r, 2).unwrap();
            let branches = TailSequence::finite_then_geometric(head, tail);
            prop_assume!(branches.is_ok());
            let prior = RavenPrior::new(HyperReal::eps().scale(&rat(c, 1)), branches.unwrap());
            prop_assume!(prior.is_ok());
            let prior = prior.unwrap();
            prop_assert_eq!(check_open_mindedness(&prior).yes.status, Status::Fails);
        }
    }

    #[test]
    fn converse_failure_witnessed() {
        let p = presets::dogmatic_no();
        let r = derive_ca_from_convergence(&p);
        assert_eq!(r.local_ca.status, Status::Holds);
        assert_eq!(r.simple_convergence.status, Status::Fails);
    }
}
