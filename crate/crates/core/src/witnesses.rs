//! Witness families for the covering-property zoo, the cofinality
//! relations cof and ĉof, and the constructive implications between the
//! hemicompactness variants.
//!
//! Everything here is witness *verification*, never a decision procedure:
//! a family either exhibits the indices that make a battery claim true
//! within a stated bound, or hands back the battery member it failed on.

use crate::engine::{
    call_p2, Brain, GameSpec, P1Kind, P1Played, P2Choice, Selection, StrategyHandle, Target,
};
use crate::error::Error;
use crate::qset::QSet;
use crate::topology::contain::product_challenge_factors;
use crate::topology::cover::CoverOracle;
use crate::topology::desc::{Challenge, CompactDesc, CoverClass, OpenDesc, Region};
use crate::topology::point::Point;
use crate::topology::space::{
    challenge_inf, challenge_set_member, compact_qset, enumerate_points, int_enum, open_qset,
    qset_to_open, region_qset, restrict_challenge_to_side, sat_contains, FamilyGen, SpaceKind,
    SpaceModel, WitnessKind, WitnessSpec,
};
use crate::topology::transform::finite_union_closure;
use crate::Result;
use std::rc::Rc;

/// A countable indexed family of witnesses — points, compacts, or
/// relatively compact regions, uniformly presented as challenges so cover
/// selectors can absorb them directly.
#[derive(Clone)]
pub struct WitnessFamily {
    pub kind: WitnessKind,
    pub space: Rc<SpaceModel>,
    pub name: String,
    gen: Rc<dyn Fn(u64) -> Result<Challenge>>,
}

impl WitnessFamily {
    pub fn new(
        kind: WitnessKind,
        space: Rc<SpaceModel>,
        name: &str,
        gen: impl Fn(u64) -> Result<Challenge> + 'static,
    ) -> WitnessFamily {
        WitnessFamily { kind, space, name: name.to_string(), gen: Rc::new(gen) }
    }

    pub fn from_challenges(
        kind: WitnessKind,
        space: Rc<SpaceModel>,
        name: &str,
        members: Vec<Challenge>,
    ) -> WitnessFamily {
        WitnessFamily::new(kind, space, name, move |n| {
            members
                .get(n as usize)
                .cloned()
                .ok_or_else(|| Error::exhausted("finite witness family ran out"))
        })
    }

    /// The n-th member.  Exhaustion is an `Err` so sweeps can stop early
    /// on finite families.
    pub fn member(&self, n: u64) -> Result<Challenge> {
        (self.gen)(n)
    }

    /// Interprets a registry witness declaration into a live family.
    pub fn from_spec(space: Rc<SpaceModel>, spec: &WitnessSpec) -> Result<WitnessFamily> {
        use FamilyGen::*;
        use WitnessKind::*;
        let kind = spec.kind;
        let name = format!("{:?}/{:?}", kind, spec.gen);
        let compactish = move |k: CompactDesc| match kind {
            Hemicompact | NearlyHemicompact => Challenge::compact(k),
            _ => Challenge::rel_compact(Region::Compact { k }),
        };
        let gen: Rc<dyn Fn(u64) -> Result<Challenge>> = match (&spec.gen, kind) {
            (AllPoints, TopologicallyCountable) => {
                let sp = space.clone();
                Rc::new(move |n| {
                    enumerate_points(&sp, n)
                        .map(Challenge::point)
                        .ok_or_else(|| Error::exhausted("point enumeration ran out"))
                })
            }
            (IntegerSingletons, TopologicallyCountable) => {
                Rc::new(move |n| Ok(Challenge::point(Point::rat_int(int_enum(n)))))
            }
            (NatPrefixes, Hemicompact | NearlyHemicompact | SigmaRelativelyCompact) => {
                Rc::new(move |n| {
                    Ok(compactish(CompactDesc::points(
                        (0..=n).map(Point::nat).collect(),
                    )))
                })
            }
            (
                SymmetricIntervals { step },
                Hemicompact | NearlyHemicompact | RelativelyHemicompact
                | WeaklyRelativelyHemicompact | SigmaRelativelyCompact,
            ) => {
                let step = step.clone();
                Rc::new(move |n| {
                    let r = &crate::Q::from_int(n as i64) * &step;
                    let lo = &crate::Q::zero() - &r;
                    Ok(compactish(CompactDesc::closed(lo, r)))
                })
            }
            (
                OpenSymmetricIntervals { step },
                RelativelyHemicompact | WeaklyRelativelyHemicompact | SigmaRelativelyCompact,
            ) => {
                let step = step.clone();
                Rc::new(move |n| {
                    let r = &crate::Q::from_int(n as i64 + 1) * &step;
                    let lo = &crate::Q::zero() - &r;
                    Ok(Challenge::rel_compact(Region::Open { u: OpenDesc::interval(lo, r) }))
                })
            }
            (g, k) => {
                return Err(Error::pre(format!(
                    "generator {g:?} does not produce {k:?} members"
                )))
            }
        };
        Ok(WitnessFamily { kind, space, name, gen })
    }

    /// All families a registry space declares.
    pub fn declared(space: &Rc<SpaceModel>) -> Result<Vec<WitnessFamily>> {
        space
            .witnesses
            .iter()
            .map(|w| WitnessFamily::from_spec(space.clone(), w))
            .collect()
    }
}

/// cof asks for plain containment `B ⊆ A_n`; ĉof settles for the
/// saturation `B ⊆ sat(A_n)`.  On a T₁ model the two coincide.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Cof,
    CofHat,
}

/// A verified cofinality claim: for each battery member, the least
/// witnessing index.
#[derive(Clone, Debug, PartialEq)]
pub struct CofinalityClaim {
    pub mode: Mode,
    pub witnesses: Vec<(Challenge, u64)>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum CofinalityOutcome {
    Verified(CofinalityClaim),
    /// A battery member with no witness at any index up to the bound.
    Counterexample { member: Challenge, bound: u64 },
}

impl CofinalityOutcome {
    pub fn is_verified(&self) -> bool {
        matches!(self, CofinalityOutcome::Verified(_))
    }

    pub fn claim(&self) -> Option<&CofinalityClaim> {
        match self {
            CofinalityOutcome::Verified(c) => Some(c),
            CofinalityOutcome::Counterexample { .. } => None,
        }
    }
}

/// A challenge read as a plain rational set, on line-like models.
fn challenge_qset(space: &SpaceModel, ch: &Challenge) -> Result<QSet> {
    match ch {
        Challenge::Point { p } => {
            let v = p.as_rat().ok_or_else(|| Error::mismatch("rational point expected"))?;
            Ok(QSet::point(v.clone()))
        }
        Challenge::FiniteSet { pts } => {
            let mut acc = QSet::empty();
            for p in pts {
                let v = p.as_rat().ok_or_else(|| Error::mismatch("rational point expected"))?;
                acc = acc.union(&QSet::point(v.clone()));
            }
            Ok(acc)
        }
        Challenge::Compact { k } => compact_qset(space, k),
        Challenge::RelCompact { r } => region_qset(space, r),
    }
}

fn challenge_finite_points(ch: &Challenge) -> Option<Vec<Point>> {
    match ch {
        Challenge::Point { p } => Some(vec![p.clone()]),
        Challenge::FiniteSet { pts } => Some(pts.clone()),
        Challenge::Compact { k } => k.as_finite_points(),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => k.as_finite_points(),
            Region::Open { .. } => None,
        },
    }
}

/// `b ⊆ a`, both read as plain sets.
pub fn challenge_subset(space: &SpaceModel, b: &Challenge, a: &Challenge) -> Result<bool> {
    if let Some(pts) = challenge_finite_points(b) {
        for p in &pts {
            if !challenge_set_member(space, a, p)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if space.is_line_like() || matches!(space.kind, SpaceKind::RightOrder) {
        return Ok(challenge_qset(space, b)?.is_subset_of(&challenge_qset(space, a)?));
    }
    if space.summands().is_some() {
        for side in 0..2 {
            if let Some(part) = restrict_challenge_to_side(b, side) {
                match restrict_challenge_to_side(a, side) {
                    None => return Ok(false),
                    Some(whole) => {
                        let factor = side_model(space, side);
                        if !challenge_subset(&factor, &part, &whole)? {
                            return Ok(false);
                        }
                    }
                }
            }
        }
        return Ok(true);
    }
    // Factor-wise inclusion on products, sound when the right side is a
    // genuine rectangle: the left side's rectangular hull over-approximates
    // it, and the hull fits inside a rectangle exactly when every
    // projection does.
    if space.factors().is_some() && challenge_is_rectangular(a) {
        let fb = product_challenge_factors(space, b)?;
        let fa = product_challenge_factors(space, a)?;
        return Ok(fb.iter().zip(&fa).all(|(pb, pa)| pb.is_subset_of(pa)));
    }
    Err(Error::unsupported(format!(
        "set inclusion between these challenge kinds is undecided on `{}`",
        space.id
    )))
}

fn challenge_is_rectangular(ch: &Challenge) -> bool {
    match ch {
        Challenge::Point { .. } => true,
        Challenge::FiniteSet { pts } => pts.len() == 1,
        Challenge::Compact { k } => compact_is_rectangular(k),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => compact_is_rectangular(k),
            Region::Open { u } => matches!(&u.atoms[..], [crate::topology::desc::Atom::Rect { .. }]),
        },
    }
}

fn compact_is_rectangular(k: &CompactDesc) -> bool {
    match k {
        CompactDesc::Product { .. } => true,
        CompactDesc::Points { pts } => pts.len() == 1,
        _ => false,
    }
}

fn side_model(space: &SpaceModel, side: usize) -> Rc<SpaceModel> {
    let (l, r) = space.summands().expect("caller checked the sum shape");
    if side == 0 {
        l
    } else {
        r
    }
}

/// `b ⊆ sat(a)`.  Finite `b` sweeps pointwise; T₁ models collapse to set
/// inclusion; the right-order model compares infima (sat of a nonempty set
/// there is the closed ray above its minimum).
pub fn challenge_sat_subset(space: &SpaceModel, b: &Challenge, a: &Challenge) -> Result<bool> {
    if let Some(pts) = challenge_finite_points(b) {
        for p in &pts {
            if !sat_contains(space, a, p)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if space.flags.t1 {
        return challenge_subset(space, b, a);
    }
    if matches!(space.kind, SpaceKind::RightOrder) {
        return match (challenge_inf(space, b)?, challenge_inf(space, a)?) {
            (_, None) => Ok(false),
            (None, _) => Ok(true),
            (Some(ib), Some(ia)) => Ok(ib >= ia),
        };
    }
    Err(Error::unsupported(format!(
        "sat inclusion is undecided for infinite challenges on `{}`",
        space.id
    )))
}

/// Sweeps the battery against the family: for every member, the least
/// index `n ≤ bound` with `B ⊆ A_n` (cof) or `B ⊆ sat(A_n)` (ĉof).
pub fn check_cofinality(
    w: &WitnessFamily,
    battery: &[Challenge],
    mode: Mode,
    bound: u64,
) -> Result<CofinalityOutcome> {
    let mut witnesses = Vec::with_capacity(battery.len());
    for b in battery {
        let mut found = None;
        for n in 0..=bound {
            let a = match w.member(n) {
                Ok(a) => a,
                Err(_) => break,
            };
            let hit = match mode {
                Mode::Cof => challenge_subset(&w.space, b, &a)?,
                Mode::CofHat => challenge_sat_subset(&w.space, b, &a)?,
            };
            if hit {
                found = Some(n);
                break;
            }
        }
        match found {
            Some(n) => witnesses.push((b.clone(), n)),
            None => {
                return Ok(CofinalityOutcome::Counterexample { member: b.clone(), bound })
            }
        }
    }
    Ok(CofinalityOutcome::Verified(CofinalityClaim { mode, witnesses }))
}

/// The battery class and cofinality mode a witness kind is validated
/// against: point coverage for the countability kinds, compact absorption
/// for the hemicompactness kinds, with ĉof for the "nearly"/"weakly"
/// variants.
pub fn kind_validation(kind: WitnessKind) -> (CoverClass, Mode) {
    use WitnessKind::*;
    match kind {
        TopologicallyCountable => (CoverClass::O, Mode::CofHat),
        SigmaRelativelyCompact => (CoverClass::O, Mode::Cof),
        Hemicompact => (CoverClass::K, Mode::Cof),
        NearlyHemicompact => (CoverClass::K, Mode::CofHat),
        RelativelyHemicompact => (CoverClass::K, Mode::Cof),
        WeaklyRelativelyHemicompact => (CoverClass::K, Mode::CofHat),
    }
}

/// Validates a family against its own space's battery, per its kind.
pub fn validate_family(w: &WitnessFamily, bound: u64) -> Result<CofinalityOutcome> {
    let (class, mode) = kind_validation(w.kind);
    let battery = w.space.batteries.challenges_for(class);
    check_cofinality(w, &battery, mode, bound)
}

/// The constructive implication edges between witness kinds.  Compacts
/// are relatively compact (identity reinterpretation); relative variants
/// weaken to their ĉof forms; a point enumeration yields the cumulative
/// finite prefixes `F_n = {x_0, …, x_n}` as a nearly-hemicompact family.
pub fn implication_chain(w: &WitnessFamily) -> Result<WitnessFamily> {
    use WitnessKind::*;
    let target = match w.kind {
        Hemicompact => WeaklyRelativelyHemicompact,
        RelativelyHemicompact => WeaklyRelativelyHemicompact,
        WeaklyRelativelyHemicompact => SigmaRelativelyCompact,
        TopologicallyCountable => NearlyHemicompact,
        k => return Err(Error::pre(format!("no implication edge leaves {k:?}"))),
    };
    let name = format!("{} ⇒ {:?}", w.name, target);
    let inner = w.clone();
    let gen = move |n: u64| -> Result<Challenge> {
        match (inner.kind, inner.member(n)?) {
            (Hemicompact, Challenge::Compact { k }) => {
                Ok(Challenge::rel_compact(Region::Compact { k }))
            }
            (RelativelyHemicompact | WeaklyRelativelyHemicompact, m) => Ok(m),
            (TopologicallyCountable, _) => {
                let mut pts = Vec::with_capacity(n as usize + 1);
                for k in 0..=n {
                    match inner.member(k)? {
                        Challenge::Point { p } => pts.push(p),
                        other => {
                            return Err(Error::mismatch(format!(
                                "point family yielded {other:?}"
                            )))
                        }
                    }
                }
                Ok(Challenge::compact(CompactDesc::points(pts)))
            }
            (k, m) => Err(Error::mismatch(format!("{k:?} family yielded {m:?}"))),
        }
    };
    let out = WitnessFamily::new(target, w.space.clone(), &name, gen);
    match validate_family(&out, 64)? {
        CofinalityOutcome::Verified(_) => Ok(out),
        CofinalityOutcome::Counterexample { member, bound } => Err(Error::mismatch(format!(
            "implied {target:?} family fails its battery on {} within {bound}",
            member.key()
        ))),
    }
}

/// A computable closure operator on region descriptors.
pub type ClosureOp = Rc<dyn Fn(&Region) -> Result<CompactDesc>>;

/// Interval-union closure on line-like models: the region's exact rational
/// set, closed, re-expressed as a finite union of closed intervals.
pub fn line_closure(space: Rc<SpaceModel>) -> Result<ClosureOp> {
    if !space.is_line_like() {
        return Err(Error::unsupported(format!(
            "no closure operator for the descriptors of `{}`",
            space.id
        )));
    }
    Ok(Rc::new(move |r: &Region| -> Result<CompactDesc> {
        let closed = region_qset(&space, r)?.closure();
        let mut parts = Vec::new();
        for iv in closed.intervals() {
            match (&iv.lo, &iv.hi) {
                (Some(a), Some(b)) => parts.push(CompactDesc::closed(a.clone(), b.clone())),
                _ => return Err(Error::pre("unbounded region has no compact closure")),
            }
        }
        Ok(match parts.len() {
            1 => parts.pop().expect("checked length"),
            _ => CompactDesc::Union { parts },
        })
    }))
}

/// On a regular model, closing members converts between the relative and
/// plain hemicompact kinds (closures of relatively compact sets are
/// compact there).  Hemicompact input reinterprets without closing —
/// compact members are already closed.
pub fn regular_collapse(w: &WitnessFamily, closure: &ClosureOp) -> Result<WitnessFamily> {
    use WitnessKind::*;
    if !w.space.flags.regular {
        return Err(Error::pre(format!(
            "`{}` is not flagged regular; the collapse needs regularity",
            w.space.id
        )));
    }
    let (target, close): (WitnessKind, bool) = match w.kind {
        RelativelyHemicompact => (Hemicompact, true),
        Hemicompact => (RelativelyHemicompact, false),
        k => return Err(Error::pre(format!("regular collapse does not apply to {k:?}"))),
    };
    let name = format!("{} ⇒ {:?} (closure)", w.name, target);
    let inner = w.clone();
    let cl = closure.clone();
    let gen = move |n: u64| -> Result<Challenge> {
        match inner.member(n)? {
            Challenge::RelCompact { r } if close => Ok(Challenge::compact(cl(&r)?)),
            Challenge::Compact { k } if !close => {
                Ok(Challenge::rel_compact(Region::Compact { k }))
            }
            m => Err(Error::mismatch(format!("unexpected member shape {m:?}"))),
        }
    };
    let out = WitnessFamily::new(target, w.space.clone(), &name, gen);
    match validate_family(&out, 64)? {
        CofinalityOutcome::Verified(_) => Ok(out),
        CofinalityOutcome::Counterexample { member, bound } => Err(Error::mismatch(format!(
            "collapsed {target:?} family fails its battery on {} within {bound}",
            member.key()
        ))),
    }
}

/// Desk-scale reading of the Markov-strategy relative-compactness bridge:
/// over a *finite* probe list standing in for "all open covers", the
/// candidate `A = ⋂ { ⋃ σ(𝒰^fin, n) : 𝒰 ∈ probes }` is computed exactly
/// and validated relatively compact against every probe — the finite
/// subcover being the very selection σ made.  Diagnostic, not a proof.
pub fn markov_menger_relcover_bridge(
    sigma: &StrategyHandle,
    probes: &[Rc<CoverOracle>],
    n: usize,
) -> Result<Region> {
    if probes.is_empty() {
        return Err(Error::pre("at least one probe cover is required"));
    }
    let space = probes[0].space.clone();
    if !space.is_line_like() {
        return Err(Error::unsupported(format!(
            "the intersection descriptor is only expressible on line-like models, not `{}`",
            space.id
        )));
    }
    let mut acc: Option<QSet> = None;
    let mut selections = Vec::new();
    for probe in probes {
        if probe.space.id != space.id {
            return Err(Error::pre("probes live on different spaces"));
        }
        let ufin = finite_union_closure(probe.clone(), 12)?;
        let spec = GameSpec {
            selection: Selection::Finite,
            p1: P1Kind::Cover { class: ufin.class },
            target: Target::Cover { class: ufin.class },
            space: space.clone(),
            horizon: n + 1,
            seed: 0,
        };
        let mut brain = match sigma.fresh_brain(&spec) {
            Brain::P2(b) => b,
            Brain::P1(_) => return Err(Error::mismatch("player-two strategy expected")),
        };
        let played = P1Played::Cover(ufin.clone());
        let sel = match call_p2(&mut brain, &[], &played, n)? {
            P2Choice::Indices(sel) => sel,
            P2Choice::Open(_) => return Err(Error::mismatch("index selections expected")),
        };
        let mut union = QSet::empty();
        let mut elems = Vec::new();
        for i in &sel {
            let e = ufin.element(*i)?;
            union = union.union(&open_qset(&space, &e)?);
            elems.push(e);
        }
        selections.push((probe.name.clone(), union.clone(), elems));
        acc = Some(match acc {
            None => union,
            Some(a) => a.intersect(&union),
        });
    }
    let a = acc.expect("nonempty probe list");
    // Relative compactness against each probe, extensionally: the round's
    // own selection already finitely covers A.
    for (pname, union, _) in &selections {
        if !a.is_subset_of(union) {
            return Err(Error::mismatch(format!(
                "candidate escapes the selection drawn from `{pname}`"
            )));
        }
    }
    let u = qset_to_open(&a).map_err(|e| {
        Error::unsupported(format!("intersection not expressible as a descriptor: {e}"))
    })?;
    Ok(Region::Open { u })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Owner;
    use crate::topology::registry::default_registry;
    use crate::topology::space::validate_open;
    use crate::topology::transform::finite_subcover;
    use crate::Q;

    #[test]
    fn discrete_prefixes_are_cofinal_for_small_finite_sets() {
        let reg = default_registry();
        let space = reg.get("discrete_n").unwrap();
        let w = WitnessFamily::new(
            WitnessKind::Hemicompact,
            space.clone(),
            "prefixes",
            |n| Ok(Challenge::compact(CompactDesc::points((0..=n).map(Point::nat).collect()))),
        );
        let battery: Vec<Challenge> = vec![
            Challenge::finite_set(vec![Point::nat(0), Point::nat(5)]),
            Challenge::finite_set(vec![Point::nat(31)]),
            Challenge::finite_set(vec![Point::nat(2), Point::nat(17), Point::nat(30)]),
        ];
        let out = check_cofinality(&w, &battery, Mode::Cof, 32).unwrap();
        let claim = out.claim().expect("verified");
        let idx: Vec<u64> = claim.witnesses.iter().map(|(_, n)| *n).collect();
        assert_eq!(idx, vec![5, 31, 30], "least index = the set's maximum");

        let wild = vec![Challenge::finite_set(vec![Point::nat(40)])];
        match check_cofinality(&w, &wild, Mode::Cof, 32).unwrap() {
            CofinalityOutcome::Counterexample { bound, .. } => assert_eq!(bound, 32),
            CofinalityOutcome::Verified(_) => panic!("40 exceeds every prefix up to 32"),
        }
    }

    #[test]
    fn cof_and_cofhat_agree_on_t1_models() {
        let reg = default_registry();
        for id in ["discrete_n", "real_line"] {
            let space = reg.get(id).unwrap();
            assert!(space.flags.t1);
            for w in WitnessFamily::declared(&space).unwrap() {
                let (class, _) = kind_validation(w.kind);
                let battery = space.batteries.challenges_for(class);
                let cof = check_cofinality(&w, &battery, Mode::Cof, 64).unwrap();
                let hat = check_cofinality(&w, &battery, Mode::CofHat, 64).unwrap();
                match (&cof, &hat) {
                    (CofinalityOutcome::Verified(a), CofinalityOutcome::Verified(b)) => {
                        assert_eq!(a.witnesses, b.witnesses, "{id}/{}", w.name);
                    }
                    (
                        CofinalityOutcome::Counterexample { member: a, .. },
                        CofinalityOutcome::Counterexample { member: b, .. },
                    ) => assert_eq!(a, b),
                    _ => panic!("{id}/{}: verdicts diverge on a T₁ model", w.name),
                }
            }
        }
    }

    #[test]
    fn right_order_integers_witness_under_sat_but_not_under_inclusion() {
        let reg = default_registry();
        let space = reg.get("right_order").unwrap();
        assert!(!space.flags.t1);
        let w = WitnessFamily::declared(&space).unwrap().remove(0);
        assert_eq!(w.kind, WitnessKind::TopologicallyCountable);
        let battery = space.batteries.point_challenges();
        let hat = check_cofinality(&w, &battery, Mode::CofHat, 64).unwrap();
        let claim = hat.claim().expect("every rational sits above some integer");
        for (ch, n) in &claim.witnesses {
            // Re-verify the witnessing relation x ≥ x_n by hand.
            let x = match ch {
                Challenge::Point { p } => p.as_rat().unwrap().clone(),
                other => panic!("point battery expected, got {other:?}"),
            };
            let xn = Q::from_int(int_enum(*n));
            assert!(x >= xn);
        }
        // Plain cof demands equality with an enumerated integer, which a
        // non-integer battery point refuses.
        let cof = check_cofinality(&w, &battery, Mode::Cof, 64).unwrap();
        match cof {
            CofinalityOutcome::Counterexample { member, .. } => {
                let p = match member {
                    Challenge::Point { p } => p,
                    other => panic!("point expected, got {other:?}"),
                };
                assert!(!p.as_rat().unwrap().is_integer());
            }
            CofinalityOutcome::Verified(_) => {
                panic!("the battery holds non-integer rationals")
            }
        }
    }

    #[test]
    fn implication_edges_land_on_valid_families() {
        let reg = default_registry();
        let real = reg.get("real_line").unwrap();
        let hemi = WitnessFamily::from_spec(
            real.clone(),
            &WitnessSpec {
                kind: WitnessKind::Hemicompact,
                gen: FamilyGen::SymmetricIntervals { step: Q::from_int(1) },
            },
        )
        .unwrap();
        let weak = implication_chain(&hemi).unwrap();
        assert_eq!(weak.kind, WitnessKind::WeaklyRelativelyHemicompact);
        // Same members, reinterpreted.
        match (hemi.member(3).unwrap(), weak.member(3).unwrap()) {
            (Challenge::Compact { k }, Challenge::RelCompact { r: Region::Compact { k: k2 } }) => {
                assert_eq!(k, k2)
            }
            other => panic!("unexpected member shapes {other:?}"),
        }
        let sigma = implication_chain(&weak).unwrap();
        assert_eq!(sigma.kind, WitnessKind::SigmaRelativelyCompact);

        let disc = reg.get("discrete_n").unwrap();
        let points = WitnessFamily::from_spec(
            disc.clone(),
            &WitnessSpec { kind: WitnessKind::TopologicallyCountable, gen: FamilyGen::AllPoints },
        )
        .unwrap();
        let nearly = implication_chain(&points).unwrap();
        assert_eq!(nearly.kind, WitnessKind::NearlyHemicompact);
        match nearly.member(4).unwrap() {
            Challenge::Compact { k } => {
                let pts = k.as_finite_points().unwrap();
                assert_eq!(pts.len(), 5, "F_4 holds the first five enumerated points");
            }
            other => panic!("compact prefix expected, got {other:?}"),
        }

        let dead_end = implication_chain(&sigma);
        assert!(dead_end.is_err(), "σ-relatively-compact has no outgoing edge");
    }

    #[test]
    fn regular_collapse_closes_open_intervals_and_round_trips() {
        let reg = default_registry();
        let real = reg.get("real_line").unwrap();
        let rel = WitnessFamily::from_spec(
            real.clone(),
            &WitnessSpec {
                kind: WitnessKind::RelativelyHemicompact,
                gen: FamilyGen::OpenSymmetricIntervals { step: Q::from_int(1) },
            },
        )
        .unwrap();
        let cl = line_closure(real.clone()).unwrap();
        let hemi = regular_collapse(&rel, &cl).unwrap();
        assert_eq!(hemi.kind, WitnessKind::Hemicompact);
        match hemi.member(2).unwrap() {
            Challenge::Compact { k } => {
                assert_eq!(k, CompactDesc::closed_int(-3, 3), "closure of (−3, 3)")
            }
            other => panic!("compact expected, got {other:?}"),
        }

        // Round trip: hemicompact → relatively hemicompact → hemicompact
        // re-closes already-closed members, so nothing shrinks.
        let back = regular_collapse(&hemi, &cl).unwrap();
        let again = regular_collapse(&back, &cl).unwrap();
        for n in 0..6 {
            let before = hemi.member(n).unwrap();
            let after = again.member(n).unwrap();
            assert!(challenge_subset(&real, &before, &after).unwrap());
        }

        // No closure operator, no collapse.
        assert!(line_closure(reg.get("baire").unwrap()).is_err());
        let ro = reg.get("right_order").unwrap();
        let ro_fam = WitnessFamily::new(WitnessKind::Hemicompact, ro, "pts", |_| {
            Ok(Challenge::compact(CompactDesc::points(vec![Point::rat_int(0)])))
        });
        assert!(
            regular_collapse(&ro_fam, &cl).is_err(),
            "the right-order model is not flagged regular"
        );
    }

    #[test]
    fn the_relcover_bridge_intersects_selection_unions() {
        let reg = default_registry();
        let real = reg.get("real_line").unwrap();
        // A Markov finite strategy that absorbs [−(n+1), n+1] each round.
        let space_for_sigma = real.clone();
        let sigma = StrategyHandle::new(
            Owner::P2,
            crate::engine::Strength::Markov,
            Selection::Finite,
            "absorb-symmetric",
            move |_spec| {
                let space = space_for_sigma.clone();
                Brain::P2(crate::engine::P2Brain::Markov(Box::new(move |cur, n| {
                    let c = match cur {
                        P1Played::Cover(c) => c,
                        _ => return Err(Error::mismatch("cover expected")),
                    };
                    let ch = Challenge::compact(CompactDesc::closed_int(
                        -(n as i64 + 1),
                        n as i64 + 1,
                    ));
                    Ok(P2Choice::Indices(finite_subcover(&space, &ch, c, 64)?))
                })))
            },
        );
        let mk = |name: &str, step: i64| {
            CoverOracle::from_stream(real.clone(), CoverClass::O, name, {
                move |i| {
                    let v = (i as i64 + 1) * step;
                    Ok(Some(OpenDesc::interval(Q::from_int(-v), Q::from_int(v))))
                }
            }, Some(24))
            .unwrap()
        };
        let probes = vec![mk("unit-steps", 1), mk("double-steps", 2), mk("triple-steps", 3)];
        let region = markov_menger_relcover_bridge(&sigma, &probes, 2).unwrap();
        let u = match &region {
            Region::Open { u } => u.clone(),
            Region::Compact { .. } => panic!("open intersection expected"),
        };
        validate_open(&real, &u).unwrap();
        // The candidate still contains the round-2 target [−3, 3].
        let a = region_qset(&real, &region).unwrap();
        assert!(QSet::closed(Q::from_int(-3), Q::from_int(3)).is_subset_of(&a));

        // A single probe degenerates to that probe's own selection union.
        let single = markov_menger_relcover_bridge(&sigma, &probes[..1], 2).unwrap();
        let sa = region_qset(&real, &single).unwrap();
        assert!(a.is_subset_of(&sa));
    }

    #[test]
    fn bridge_probes_with_disjoint_selections_yield_the_empty_region() {
        let reg = default_registry();
        let real = reg.get("real_line").unwrap();
        let fixed = |name: &str, lo: i64, hi: i64| {
            CoverOracle::from_elements(
                real.clone(),
                CoverClass::O,
                name,
                vec![OpenDesc::interval(Q::from_int(lo), Q::from_int(hi))],
            )
            .unwrap()
        };
        // Probes for the two sides of the line; the strategy absorbs
        // whichever side the presented cover reaches, so its selections
        // from the two probes never overlap.
        let sigma = StrategyHandle::new(
            Owner::P2,
            crate::engine::Strength::Markov,
            Selection::Finite,
            "first-reachable-side",
            |_spec| {
                Brain::P2(crate::engine::P2Brain::Markov(Box::new(|cur, _n| {
                    let c = match cur {
                        P1Played::Cover(c) => c,
                        _ => return Err(Error::mismatch("cover expected")),
                    };
                    for side in [-2i64, 2] {
                        let ch = Challenge::point(Point::rat_int(side));
                        if let Ok(i) = c.select(&ch) {
                            return Ok(P2Choice::Indices(vec![i]));
                        }
                    }
                    Err(Error::exhausted("neither side reachable"))
                })))
            },
        );
        let probes = vec![fixed("left", -5, -1), fixed("right", 1, 5)];
        let region = markov_menger_relcover_bridge(&sigma, &probes, 0).unwrap();
        let a = region_qset(&real, &region).unwrap();
        assert!(a.is_empty(), "disjoint selections intersect to nothing");
    }
}
