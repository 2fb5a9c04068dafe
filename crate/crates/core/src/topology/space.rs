//! The registry space kinds: their points, their open-descriptor semantics,
//! descriptor validation, the `sat` operator, and the point/basis
//! enumerators used by escape searches and basis subcover extraction.
//!
//! Every model here is a desk model: an effectively-presented stand-in whose
//! membership and containment questions are decidable.  Judgments made
//! against these models are battery-relative (see `cover.rs`); the models
//! themselves never approximate — rational arithmetic is exact and all
//! answers are decisions.

use crate::combinatorics::{cantor_tuple, cantor_unpair, enum_finseq};
use crate::error::Error;
use crate::qset::{Iv, QSet};
use crate::rat::Q;
use crate::topology::desc::{Atom, Challenge, CompactDesc, OpenDesc, Region};
use crate::topology::point::Point;
use crate::Result;
use serde::{Deserialize, Serialize};
use std::rc::Rc;

/// Declared metadata; judgments trust these flags rather than re-deriving
/// them (they are part of the registry contract).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceFlags {
    pub t1: bool,
    pub regular: bool,
    pub second_countable: bool,
    /// Set when the desk model is knowingly coarser than the space it
    /// stands for (e.g. cofinite sets standing in for co-countable ones).
    pub fidelity_caveat: bool,
}

/// Kinds of witness families a registry entry may declare.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    TopologicallyCountable,
    SigmaRelativelyCompact,
    Hemicompact,
    NearlyHemicompact,
    RelativelyHemicompact,
    WeaklyRelativelyHemicompact,
}

/// Parametric generators for countable witness families.  The witness
/// module interprets these into concrete indexed members.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case")]
pub enum FamilyGen {
    /// F_n = {0, …, n} (discrete-ℕ prefixes).
    NatPrefixes,
    /// x_n = the space's n-th enumerated point.
    AllPoints,
    /// x_n = n-th integer in the order 0, 1, −1, 2, −2, …
    IntegerSingletons,
    /// K_n = [−n·step, n·step].
    SymmetricIntervals { step: Q },
    /// A_n = (−(n+1)·step, (n+1)·step), open and relatively compact.
    OpenSymmetricIntervals { step: Q },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub kind: WitnessKind,
    #[serde(flatten)]
    pub gen: FamilyGen,
}

/// The finite, fixed challenge sets a space is judged against.
///
/// The challenge views are nested by construction — every battery point
/// reappears as a singleton finite set, every finite set as a `Points`
/// compact, every compact as a compact region — so a cover passing the
/// k-challenges structurally passes the ω- and point-challenges too.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Batteries {
    pub points: Vec<Point>,
    pub finite_sets: Vec<Vec<Point>>,
    pub compacts: Vec<CompactDesc>,
    pub rel_compacts: Vec<Region>,
}

impl Batteries {
    pub fn point_challenges(&self) -> Vec<Challenge> {
        self.points.iter().cloned().map(Challenge::point).collect()
    }

    pub fn finite_set_challenges(&self) -> Vec<Challenge> {
        let mut out: Vec<Challenge> = self
            .points
            .iter()
            .map(|p| Challenge::finite_set(vec![p.clone()]))
            .collect();
        out.extend(self.finite_sets.iter().cloned().map(Challenge::finite_set));
        out
    }

    pub fn compact_challenges(&self) -> Vec<Challenge> {
        let mut out: Vec<Challenge> = self
            .points
            .iter()
            .map(|p| Challenge::compact(CompactDesc::points(vec![p.clone()])))
            .collect();
        out.extend(
            self.finite_sets
                .iter()
                .map(|f| Challenge::compact(CompactDesc::points(f.clone()))),
        );
        out.extend(self.compacts.iter().cloned().map(Challenge::compact));
        out
    }

    pub fn rel_compact_challenges(&self) -> Vec<Challenge> {
        let mut out: Vec<Challenge> = self
            .compact_challenges()
            .into_iter()
            .map(|c| match c {
                Challenge::Compact { k } => Challenge::rel_compact(Region::Compact { k }),
                other => other,
            })
            .collect();
        out.extend(self.rel_compacts.iter().cloned().map(Challenge::rel_compact));
        out
    }

    /// The challenge battery appropriate to a cover class.
    pub fn challenges_for(&self, class: crate::topology::desc::CoverClass) -> Vec<Challenge> {
        use crate::topology::desc::CoverClass::*;
        match class {
            O | Lambda | Gamma => self.point_challenges(),
            Omega => self.finite_set_challenges(),
            K => self.compact_challenges(),
            KRel => self.rel_compact_challenges(),
        }
    }
}

/// The structural kind of a space model.  Composite kinds hold shared
/// references to their factor models.
#[derive(Clone, Debug)]
pub enum SpaceKind {
    DiscreteNat,
    RationalLine,
    RealLine { lo: Option<Q>, hi: Option<Q> },
    Baire,
    Fortissimo,
    RightOrder,
    Sorgenfrey,
    OnePoint,
    Sum(Rc<SpaceModel>, Rc<SpaceModel>),
    Product(Vec<Rc<SpaceModel>>),
    Power(Rc<SpaceModel>, usize),
}

#[derive(Clone, Debug)]
pub struct SpaceModel {
    pub id: String,
    pub kind: SpaceKind,
    pub flags: SpaceFlags,
    pub batteries: Batteries,
    pub witnesses: Vec<WitnessSpec>,
}

impl SpaceModel {
    pub fn new(
        id: &str,
        kind: SpaceKind,
        flags: SpaceFlags,
        batteries: Batteries,
        witnesses: Vec<WitnessSpec>,
    ) -> Rc<SpaceModel> {
        Rc::new(SpaceModel { id: id.to_string(), kind, flags, batteries, witnesses })
    }

    /// Product factors (a power expands to repeated copies of its base).
    pub fn factors(&self) -> Option<Vec<Rc<SpaceModel>>> {
        match &self.kind {
            SpaceKind::Product(fs) => Some(fs.clone()),
            SpaceKind::Power(b, n) => Some(vec![b.clone(); *n]),
            _ => None,
        }
    }

    pub fn summands(&self) -> Option<(Rc<SpaceModel>, Rc<SpaceModel>)> {
        match &self.kind {
            SpaceKind::Sum(l, r) => Some((l.clone(), r.clone())),
            _ => None,
        }
    }

    /// Line-like kinds: points are rationals and set reasoning runs on
    /// `QSet`.
    pub fn is_line_like(&self) -> bool {
        matches!(
            self.kind,
            SpaceKind::RationalLine
                | SpaceKind::RealLine { .. }
                | SpaceKind::RightOrder
                | SpaceKind::Sorgenfrey
        )
    }

    /// The ambient set of a line-like space as a `QSet`.
    pub fn ambient_qset(&self) -> QSet {
        match &self.kind {
            SpaceKind::RealLine { lo, hi } => QSet::from_ivs(vec![Iv {
                lo: lo.clone(),
                lo_closed: lo.is_some(),
                hi: hi.clone(),
                hi_closed: hi.is_some(),
            }]),
            _ => QSet::full(),
        }
    }

    fn ambient_bounds(&self) -> (Option<Q>, Option<Q>) {
        match &self.kind {
            SpaceKind::RealLine { lo, hi } => (lo.clone(), hi.clone()),
            _ => (None, None),
        }
    }
}

/// Is `p` a point of this space at all?
pub fn point_in_space(space: &SpaceModel, p: &Point) -> bool {
    match (&space.kind, p) {
        (SpaceKind::DiscreteNat, Point::Nat { .. }) => true,
        (SpaceKind::RationalLine, Point::Rat { .. }) => true,
        (SpaceKind::RealLine { lo, hi }, Point::Rat { v }) => {
            lo.as_ref().map_or(true, |a| a <= v) && hi.as_ref().map_or(true, |b| v <= b)
        }
        (SpaceKind::Baire, Point::Word { .. }) => true,
        (SpaceKind::Fortissimo, Point::Nat { .. }) | (SpaceKind::Fortissimo, Point::Infty) => true,
        (SpaceKind::RightOrder, Point::Rat { .. }) => true,
        (SpaceKind::Sorgenfrey, Point::Rat { .. }) => true,
        (SpaceKind::OnePoint, Point::Nat { v }) => *v == 0,
        (SpaceKind::Sum(l, r), Point::Inj { side, v }) => match side {
            0 => point_in_space(l, v),
            1 => point_in_space(r, v),
            _ => false,
        },
        (SpaceKind::Product(_), Point::Tuple { v }) | (SpaceKind::Power(_, _), Point::Tuple { v }) => {
            let fs = space.factors().expect("composite kind has factors");
            v.len() == fs.len() && v.iter().zip(&fs).all(|(p, f)| point_in_space(f, p))
        }
        _ => false,
    }
}

/// Baire cylinder membership: the point's zero-extended word must extend
/// the cylinder word.
fn in_cylinder(word: &[u64], cyl: &[u64]) -> bool {
    cyl.iter()
        .enumerate()
        .all(|(i, &c)| word.get(i).copied().unwrap_or(0) == c)
}

/// Point membership in one atom.
fn member_atom(space: &SpaceModel, p: &Point, atom: &Atom) -> Result<bool> {
    match atom {
        Atom::Whole => Ok(true),
        Atom::Singleton { p: q } => Ok(p == q),
        Atom::Interval { lo, hi } => match p.as_rat() {
            Some(v) => Ok(lo < v && v < hi),
            None => Err(Error::mismatch("interval atom against a non-rational point")),
        },
        Atom::RayAbove { lo } => match p.as_rat() {
            Some(v) => Ok(lo < v),
            None => Err(Error::mismatch("ray atom against a non-rational point")),
        },
        Atom::Cylinder { word } => match p {
            Point::Word { v } => Ok(in_cylinder(v, word)),
            _ => Err(Error::mismatch("cylinder atom against a non-word point")),
        },
        Atom::Cofinite { excluded } => Ok(!excluded.contains(p)),
        Atom::Rect { factors } => match p {
            Point::Tuple { v } => {
                let fs = space
                    .factors()
                    .ok_or_else(|| Error::mismatch("rectangle atom outside a product space"))?;
                if v.len() != factors.len() || fs.len() != factors.len() {
                    return Err(Error::mismatch("rectangle arity mismatch"));
                }
                for ((pt, f), d) in v.iter().zip(&fs).zip(factors) {
                    if !member(f, pt, d)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Err(Error::mismatch("rectangle atom against a non-tuple point")),
        },
        Atom::Inj { side, part } => match p {
            Point::Inj { side: s, v } => {
                if s != side {
                    return Ok(false);
                }
                let (l, r) = space
                    .summands()
                    .ok_or_else(|| Error::mismatch("injection atom outside a sum space"))?;
                let factor = if *side == 0 { l } else { r };
                member(&factor, v, part)
            }
            _ => Err(Error::mismatch("injection atom against a non-injected point")),
        },
    }
}

/// Point membership in an open descriptor.
pub fn member(space: &SpaceModel, p: &Point, d: &OpenDesc) -> Result<bool> {
    if !point_in_space(space, p) {
        return Err(Error::mismatch(format!("point does not belong to space `{}`", space.id)));
    }
    for atom in &d.atoms {
        if member_atom(space, p, atom)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Point membership in a compact descriptor.
pub fn compact_member(space: &SpaceModel, k: &CompactDesc, p: &Point) -> Result<bool> {
    match k {
        CompactDesc::Points { pts } => Ok(pts.contains(p)),
        CompactDesc::ClosedInterval { lo, hi } => match p.as_rat() {
            Some(v) => Ok(lo <= v && v <= hi),
            None => Err(Error::mismatch("closed interval against a non-rational point")),
        },
        CompactDesc::Union { parts } => {
            for part in parts {
                if compact_member(space, part, p)? {
                    return Ok(true);
                }
            }
            Ok(false)
        }
        CompactDesc::Product { factors } => match p {
            Point::Tuple { v } => {
                let fs = space
                    .factors()
                    .ok_or_else(|| Error::mismatch("product compact outside a product space"))?;
                if v.len() != factors.len() || fs.len() != factors.len() {
                    return Err(Error::mismatch("product compact arity mismatch"));
                }
                for ((pt, f), kf) in v.iter().zip(&fs).zip(factors) {
                    if !compact_member(f, kf, pt)? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            _ => Ok(false),
        },
        CompactDesc::Inj { side, part } => match p {
            Point::Inj { side: s, v } => {
                if s != side {
                    return Ok(false);
                }
                let (l, r) = space
                    .summands()
                    .ok_or_else(|| Error::mismatch("injected compact outside a sum space"))?;
                let factor = if *side == 0 { l } else { r };
                compact_member(&factor, part, v)
            }
            _ => Ok(false),
        },
    }
}

/// Converts an open descriptor over a line-like space into an exact `QSet`
/// (already clipped to the ambient set).
pub fn open_qset(space: &SpaceModel, d: &OpenDesc) -> Result<QSet> {
    if !space.is_line_like() {
        return Err(Error::mismatch(format!("space `{}` is not line-like", space.id)));
    }
    let mut out = QSet::empty();
    for atom in &d.atoms {
        let piece = match atom {
            Atom::Whole => space.ambient_qset(),
            Atom::Singleton { p } => match p.as_rat() {
                Some(v) => QSet::point(v.clone()),
                None => return Err(Error::mismatch("non-rational singleton on a line")),
            },
            Atom::Interval { lo, hi } => {
                if lo < hi {
                    QSet::open(lo.clone(), hi.clone())
                } else {
                    QSet::empty()
                }
            }
            Atom::RayAbove { lo } => QSet::ray_above(lo.clone()),
            _ => return Err(Error::mismatch("atom kind not meaningful on a line")),
        };
        out = out.union(&piece);
    }
    Ok(out.intersect(&space.ambient_qset()))
}

/// Converts a compact descriptor over a line-like space into a `QSet`.
pub fn compact_qset(space: &SpaceModel, k: &CompactDesc) -> Result<QSet> {
    if !space.is_line_like() {
        return Err(Error::mismatch(format!("space `{}` is not line-like", space.id)));
    }
    match k {
        CompactDesc::Points { pts } => {
            let mut out = QSet::empty();
            for p in pts {
                match p.as_rat() {
                    Some(v) => out = out.union(&QSet::point(v.clone())),
                    None => return Err(Error::mismatch("non-rational point on a line")),
                }
            }
            Ok(out)
        }
        CompactDesc::ClosedInterval { lo, hi } => Ok(QSet::closed(lo.clone(), hi.clone())),
        CompactDesc::Union { parts } => {
            let mut out = QSet::empty();
            for part in parts {
                out = out.union(&compact_qset(space, part)?);
            }
            Ok(out)
        }
        _ => Err(Error::mismatch("compact kind not meaningful on a line")),
    }
}

pub fn region_qset(space: &SpaceModel, r: &Region) -> Result<QSet> {
    match r {
        Region::Compact { k } => compact_qset(space, k),
        Region::Open { u } => open_qset(space, u),
    }
}

/// Converts a line `QSet` back into an open descriptor.  Left-unbounded
/// pieces are inexpressible (there is no left-ray atom); callers clip with
/// an open window first when one can arise.
pub fn qset_to_open(qs: &QSet) -> Result<OpenDesc> {
    let mut atoms = Vec::new();
    for iv in qs.intervals() {
        match (&iv.lo, &iv.hi) {
            (None, None) => atoms.push(Atom::Whole),
            (Some(a), None) => {
                if iv.lo_closed {
                    atoms.push(Atom::Singleton { p: Point::rat(a.clone()) });
                }
                atoms.push(Atom::RayAbove { lo: a.clone() });
            }
            (Some(a), Some(b)) => {
                if a == b {
                    atoms.push(Atom::Singleton { p: Point::rat(a.clone()) });
                    continue;
                }
                if iv.lo_closed {
                    atoms.push(Atom::Singleton { p: Point::rat(a.clone()) });
                }
                atoms.push(Atom::Interval { lo: a.clone(), hi: b.clone() });
                if iv.hi_closed {
                    atoms.push(Atom::Singleton { p: Point::rat(b.clone()) });
                }
            }
            (None, Some(_)) => {
                return Err(Error::unsupported(
                    "left-unbounded piece has no open-descriptor form; clip first",
                ))
            }
        }
    }
    Ok(OpenDesc { atoms })
}

/// Validates that a descriptor names an open set of this space.  For line
/// kinds the check is extensional: closed endpoints are only legal where
/// the ambient set itself is closed (or, on the Sorgenfrey line, on the
/// left).
pub fn validate_open(space: &SpaceModel, d: &OpenDesc) -> Result<()> {
    match &space.kind {
        SpaceKind::DiscreteNat => {
            for atom in &d.atoms {
                match atom {
                    Atom::Whole => {}
                    Atom::Singleton { p } => {
                        if !point_in_space(space, p) {
                            return Err(Error::mismatch("singleton names a foreign point"));
                        }
                    }
                    Atom::Cofinite { excluded } => {
                        for p in excluded {
                            if !point_in_space(space, p) {
                                return Err(Error::mismatch("cofinite excludes a foreign point"));
                            }
                        }
                    }
                    _ => return Err(Error::pre("atom kind not open in discrete ℕ")),
                }
            }
            Ok(())
        }
        SpaceKind::Fortissimo => {
            for atom in &d.atoms {
                match atom {
                    Atom::Whole => {}
                    Atom::Singleton { p } => {
                        if matches!(p, Point::Infty) {
                            return Err(Error::pre("{∞} is not open in the Fortissimo model"));
                        }
                        if !point_in_space(space, p) {
                            return Err(Error::mismatch("singleton names a foreign point"));
                        }
                    }
                    Atom::Cofinite { excluded } => {
                        for p in excluded {
                            if !point_in_space(space, p) {
                                return Err(Error::mismatch("cofinite excludes a foreign point"));
                            }
                        }
                    }
                    _ => return Err(Error::pre("atom kind not open in the Fortissimo model")),
                }
            }
            Ok(())
        }
        SpaceKind::Baire => {
            for atom in &d.atoms {
                if !matches!(atom, Atom::Whole | Atom::Cylinder { .. }) {
                    return Err(Error::pre("Baire opens are unions of cylinders"));
                }
            }
            Ok(())
        }
        SpaceKind::OnePoint => {
            for atom in &d.atoms {
                match atom {
                    Atom::Whole => {}
                    Atom::Singleton { p } if point_in_space(space, p) => {}
                    _ => return Err(Error::pre("atom kind not open in the one-point space")),
                }
            }
            Ok(())
        }
        SpaceKind::RightOrder => {
            let qs = open_qset(space, d)?;
            for iv in qs.intervals() {
                let ray_shaped = iv.hi.is_none() && (iv.lo.is_none() || !iv.lo_closed);
                if !ray_shaped {
                    return Err(Error::pre("right-order opens are unions of right rays"));
                }
            }
            Ok(())
        }
        SpaceKind::RationalLine | SpaceKind::RealLine { .. } | SpaceKind::Sorgenfrey => {
            let (amb_lo, amb_hi) = space.ambient_bounds();
            let sorgenfrey = matches!(space.kind, SpaceKind::Sorgenfrey);
            let qs = open_qset(space, d)?;
            for iv in qs.intervals() {
                if iv.lo_closed && !sorgenfrey {
                    let at_boundary = iv.lo.is_some() && iv.lo == amb_lo;
                    if !at_boundary {
                        return Err(Error::pre("left-closed piece away from the ambient boundary"));
                    }
                }
                if iv.hi_closed {
                    let at_boundary = iv.hi.is_some() && iv.hi == amb_hi;
                    if !at_boundary {
                        return Err(Error::pre("right-closed piece away from the ambient boundary"));
                    }
                }
            }
            Ok(())
        }
        SpaceKind::Sum(l, r) => {
            for atom in &d.atoms {
                match atom {
                    Atom::Whole => {}
                    Atom::Inj { side, part } => match side {
                        0 => validate_open(l, part)?,
                        1 => validate_open(r, part)?,
                        _ => return Err(Error::mismatch("sum space has sides 0 and 1")),
                    },
                    _ => return Err(Error::pre("sum-space opens are unions of injections")),
                }
            }
            Ok(())
        }
        SpaceKind::Product(_) | SpaceKind::Power(_, _) => {
            let fs = space.factors().expect("composite kind has factors");
            for atom in &d.atoms {
                match atom {
                    Atom::Whole => {}
                    Atom::Rect { factors } => {
                        if factors.len() != fs.len() {
                            return Err(Error::mismatch("rectangle arity mismatch"));
                        }
                        for (f, part) in fs.iter().zip(factors) {
                            validate_open(f, part)?;
                        }
                    }
                    _ => return Err(Error::pre("product opens are unions of rectangles")),
                }
            }
            Ok(())
        }
    }
}

/// Validates that a compact descriptor is meaningful (and genuinely
/// compact) in this space.
pub fn validate_compact(space: &SpaceModel, k: &CompactDesc) -> Result<()> {
    match k {
        CompactDesc::Points { pts } => {
            for p in pts {
                if !point_in_space(space, p) {
                    return Err(Error::mismatch("compact names a foreign point"));
                }
            }
            Ok(())
        }
        CompactDesc::ClosedInterval { lo, hi } => {
            if lo > hi {
                return Err(Error::pre("empty closed interval"));
            }
            match &space.kind {
                SpaceKind::RealLine { .. } | SpaceKind::RightOrder => {
                    let ok = point_in_space(space, &Point::rat(lo.clone()))
                        && point_in_space(space, &Point::rat(hi.clone()));
                    if ok {
                        Ok(())
                    } else {
                        Err(Error::mismatch("interval endpoints outside the ambient set"))
                    }
                }
                _ => Err(Error::pre(
                    "closed rational intervals are compact only in the real-line and right-order models",
                )),
            }
        }
        CompactDesc::Union { parts } => {
            for part in parts {
                validate_compact(space, part)?;
            }
            Ok(())
        }
        CompactDesc::Product { factors } => {
            let fs = space
                .factors()
                .ok_or_else(|| Error::mismatch("product compact outside a product space"))?;
            if fs.len() != factors.len() {
                return Err(Error::mismatch("product compact arity mismatch"));
            }
            for (f, part) in fs.iter().zip(factors) {
                validate_compact(f, part)?;
            }
            Ok(())
        }
        CompactDesc::Inj { side, part } => {
            let (l, r) = space
                .summands()
                .ok_or_else(|| Error::mismatch("injected compact outside a sum space"))?;
            match side {
                0 => validate_compact(&l, part),
                1 => validate_compact(&r, part),
                _ => Err(Error::mismatch("sum space has sides 0 and 1")),
            }
        }
    }
}

/// The least rational of a challenge, for the right-order `sat` rule.
pub fn challenge_inf(space: &SpaceModel, ch: &Challenge) -> Result<Option<Q>> {
    fn pts_min(pts: &[Point]) -> Result<Option<Q>> {
        let mut best: Option<Q> = None;
        for p in pts {
            let v = p
                .as_rat()
                .ok_or_else(|| Error::mismatch("non-rational point in right-order challenge"))?;
            if best.as_ref().map_or(true, |b| v < b) {
                best = Some(v.clone());
            }
        }
        Ok(best)
    }
    fn compact_min(k: &CompactDesc) -> Result<Option<Q>> {
        match k {
            CompactDesc::Points { pts } => pts_min(pts),
            CompactDesc::ClosedInterval { lo, .. } => Ok(Some(lo.clone())),
            CompactDesc::Union { parts } => {
                let mut best: Option<Q> = None;
                for p in parts {
                    if let Some(v) = compact_min(p)? {
                        if best.as_ref().map_or(true, |b| &v < b) {
                            best = Some(v);
                        }
                    }
                }
                Ok(best)
            }
            _ => Err(Error::mismatch("compact kind not meaningful in the right-order model")),
        }
    }
    match ch {
        Challenge::Point { p } => pts_min(std::slice::from_ref(p)),
        Challenge::FiniteSet { pts } => pts_min(pts),
        Challenge::Compact { k } => compact_min(k),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => compact_min(k),
            Region::Open { u } => {
                let qs = open_qset(space, u)?;
                Ok(qs.inf().cloned())
            }
        },
    }
}

/// Membership of a point in a challenge read as a plain set.
pub fn challenge_set_member(space: &SpaceModel, ch: &Challenge, x: &Point) -> Result<bool> {
    match ch {
        Challenge::Point { p } => Ok(p == x),
        Challenge::FiniteSet { pts } => Ok(pts.contains(x)),
        Challenge::Compact { k } => compact_member(space, k, x),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => compact_member(space, k, x),
            Region::Open { u } => member(space, x, u),
        },
    }
}

/// x ∈ sat(A) — membership in the intersection of all open neighborhoods
/// of A.  On T₁-flagged models this is set membership; the right-order
/// model uses its order rule; sums recurse into the summand.
pub fn sat_contains(space: &SpaceModel, ch: &Challenge, x: &Point) -> Result<bool> {
    if space.flags.t1 {
        return challenge_set_member(space, ch, x);
    }
    match &space.kind {
        SpaceKind::RightOrder => {
            let v = x
                .as_rat()
                .ok_or_else(|| Error::mismatch("non-rational point in right-order model"))?;
            match challenge_inf(space, ch)? {
                // sat(∅) = ∅: the empty set is open and is one of ∅'s
                // neighborhoods.
                None => Ok(false),
                Some(m) => Ok(v >= &m),
            }
        }
        SpaceKind::Sum(l, r) => match x {
            Point::Inj { side, v } => {
                let factor = if *side == 0 { l } else { r };
                match restrict_challenge_to_side(ch, *side) {
                    Some(part) => sat_contains(factor, &part, v),
                    None => Ok(false),
                }
            }
            _ => Err(Error::mismatch("sum-space point expected")),
        },
        _ => Err(Error::unsupported(format!(
            "sat is not defined for non-T₁ model `{}`",
            space.id
        ))),
    }
}

/// The part of a challenge living on one side of a sum, as a challenge of
/// the summand; `None` when that part is empty.
pub fn restrict_challenge_to_side(ch: &Challenge, side: usize) -> Option<Challenge> {
    fn filter_pts(pts: &[Point], side: usize) -> Vec<Point> {
        pts.iter()
            .filter_map(|p| match p {
                Point::Inj { side: s, v } if *s == side => Some((**v).clone()),
                _ => None,
            })
            .collect()
    }
    fn compact_side(k: &CompactDesc, side: usize) -> Option<CompactDesc> {
        match k {
            CompactDesc::Points { pts } => {
                let f = filter_pts(pts, side);
                if f.is_empty() {
                    None
                } else {
                    Some(CompactDesc::points(f))
                }
            }
            CompactDesc::Inj { side: s, part } => {
                if *s == side {
                    Some((**part).clone())
                } else {
                    None
                }
            }
            CompactDesc::Union { parts } => {
                let kept: Vec<CompactDesc> =
                    parts.iter().filter_map(|p| compact_side(p, side)).collect();
                match kept.len() {
                    0 => None,
                    1 => Some(kept.into_iter().next().unwrap()),
                    _ => Some(CompactDesc::Union { parts: kept }),
                }
            }
            _ => None,
        }
    }
    match ch {
        Challenge::Point { p } => match p {
            Point::Inj { side: s, v } if *s == side => Some(Challenge::point((**v).clone())),
            _ => None,
        },
        Challenge::FiniteSet { pts } => {
            let f = filter_pts(pts, side);
            if f.is_empty() {
                None
            } else {
                Some(Challenge::finite_set(f))
            }
        }
        Challenge::Compact { k } => compact_side(k, side).map(Challenge::compact),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => {
                compact_side(k, side).map(|k| Challenge::rel_compact(Region::Compact { k }))
            }
            Region::Open { .. } => None,
        },
    }
}

/// The side-`side` part of a sum-space open descriptor, as a descriptor
/// over the summand.
pub fn restrict_open_to_side(d: &OpenDesc, side: usize) -> OpenDesc {
    let mut atoms = Vec::new();
    for atom in &d.atoms {
        match atom {
            Atom::Whole => atoms.push(Atom::Whole),
            Atom::Inj { side: s, part } if *s == side => atoms.extend(part.atoms.iter().cloned()),
            _ => {}
        }
    }
    OpenDesc { atoms }
}

/// Deterministic enumeration of the rationals: 0, then values a/b by Cantor
/// pairs with zig-zag signs.  Repeats are allowed (unreduced fractions).
pub fn rat_enum(i: u64) -> Q {
    if i == 0 {
        return Q::zero();
    }
    let (a, b) = cantor_unpair(i - 1);
    let num: i64 = if a % 2 == 0 { -((a / 2) as i64) } else { ((a + 1) / 2) as i64 };
    Q::frac(num, (b + 1) as i64)
}

/// Integer enumeration 0, 1, −1, 2, −2, …
pub fn int_enum(i: u64) -> i64 {
    if i % 2 == 0 {
        -((i / 2) as i64)
    } else {
        ((i + 1) / 2) as i64
    }
}

/// The space's n-th point, `None` for holes (exhausted finite kinds or
/// skipped composites); enumeration covers a dense/test-adequate prefix of
/// every registry kind.
pub fn enumerate_points(space: &SpaceModel, i: u64) -> Option<Point> {
    match &space.kind {
        SpaceKind::DiscreteNat => Some(Point::nat(i)),
        SpaceKind::RationalLine | SpaceKind::Sorgenfrey | SpaceKind::RightOrder => {
            Some(Point::rat(rat_enum(i)))
        }
        SpaceKind::RealLine { .. } => {
            // Walk the rational enumeration, keeping ambient members only.
            let mut seen = 0u64;
            let mut j = 0u64;
            loop {
                let p = Point::rat(rat_enum(j));
                if point_in_space(space, &p) {
                    if seen == i {
                        return Some(p);
                    }
                    seen += 1;
                }
                j += 1;
            }
        }
        SpaceKind::Baire => Some(Point::word(enum_finseq(i))),
        SpaceKind::Fortissimo => {
            if i == 0 {
                Some(Point::Infty)
            } else {
                Some(Point::nat(i - 1))
            }
        }
        SpaceKind::OnePoint => {
            if i == 0 {
                Some(Point::nat(0))
            } else {
                None
            }
        }
        SpaceKind::Sum(l, r) => {
            let (side, j) = ((i % 2) as usize, i / 2);
            let factor = if side == 0 { l } else { r };
            enumerate_points(factor, j).map(|p| Point::inj(side, p))
        }
        SpaceKind::Product(_) | SpaceKind::Power(_, _) => {
            let fs = space.factors().expect("composite kind has factors");
            let coords = cantor_tuple(i, fs.len());
            let pts: Option<Vec<Point>> = coords
                .iter()
                .zip(&fs)
                .map(|(&c, f)| enumerate_points(f, c))
                .collect();
            pts.map(Point::tuple)
        }
    }
}

/// First enumerated point outside the descriptor, scanning `bound`
/// enumeration slots.  `None` means no escape was found — the set is
/// treated as (semantically) the whole space at desk scale.
pub fn escape_point(space: &SpaceModel, d: &OpenDesc, bound: u64) -> Result<Option<Point>> {
    // Bounded real-line models filter the rational enumeration; stream it
    // directly rather than re-walking a prefix per indexed call.
    if matches!(space.kind, SpaceKind::RealLine { .. }) {
        let mut seen = 0u64;
        let mut j = 0u64;
        while seen < bound {
            let p = Point::rat(rat_enum(j));
            j += 1;
            if !point_in_space(space, &p) {
                continue;
            }
            seen += 1;
            if !member(space, &p, d)? {
                return Ok(Some(p));
            }
        }
        return Ok(None);
    }
    for i in 0..bound {
        if let Some(p) = enumerate_points(space, i) {
            if !member(space, &p, d)? {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}

/// The space's n-th basis element.  Only kinds flagged second-countable in
/// the shipped registry get a useful enumerator; basis elements may be
/// empty descriptors (clipped away by a bounded ambient) — consumers skip
/// those.
pub fn basis(space: &SpaceModel, i: u64) -> Option<OpenDesc> {
    match &space.kind {
        SpaceKind::DiscreteNat => Some(OpenDesc::singleton(Point::nat(i))),
        SpaceKind::RationalLine | SpaceKind::RealLine { .. } => {
            // Dyadic intervals ((m−1)/2^j, (m+1)/2^j), clipped to the ambient.
            let (j, k) = cantor_unpair(i);
            let j = j.min(30);
            let m = Q::from_int(int_enum(k));
            let w = Q::half_pow(j as u32);
            let lo = &(&m * &w) - &w;
            let hi = &(&m * &w) + &w;
            let qs = QSet::open(lo, hi).intersect(&space.ambient_qset());
            Some(qset_to_open(&qs).expect("bounded dyadic piece is expressible"))
        }
        SpaceKind::Sorgenfrey => {
            let (j, k) = cantor_unpair(i);
            let j = j.min(30);
            let m = Q::from_int(int_enum(k));
            let w = Q::half_pow(j as u32);
            let lo = &m * &w;
            let hi = &(&m * &w) + &w;
            Some(OpenDesc::half_open(lo, hi))
        }
        SpaceKind::RightOrder => Some(OpenDesc::ray_above(rat_enum(i))),
        SpaceKind::Baire => Some(OpenDesc::cylinder(enum_finseq(i))),
        SpaceKind::Fortissimo => {
            if i % 2 == 0 {
                Some(OpenDesc::singleton(Point::nat(i / 2)))
            } else {
                let named: std::collections::BTreeSet<u64> =
                    enum_finseq(i / 2).into_iter().collect();
                Some(OpenDesc::cofinite(named.into_iter().map(Point::nat).collect()))
            }
        }
        SpaceKind::OnePoint => {
            if i == 0 {
                Some(OpenDesc::whole())
            } else {
                None
            }
        }
        SpaceKind::Sum(l, r) => {
            let (side, j) = ((i % 2) as usize, i / 2);
            let factor = if side == 0 { l } else { r };
            basis(factor, j).map(|d| OpenDesc::inj(side, d))
        }
        SpaceKind::Product(_) | SpaceKind::Power(_, _) => {
            let fs = space.factors().expect("composite kind has factors");
            let coords = cantor_tuple(i, fs.len());
            let parts: Option<Vec<OpenDesc>> =
                coords.iter().zip(&fs).map(|(&c, f)| basis(f, c)).collect();
            parts.map(OpenDesc::rect)
        }
    }
}
