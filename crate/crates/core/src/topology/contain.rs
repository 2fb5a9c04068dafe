//! Decidable containment: compact-in-open, open-in-open, and
//! challenge-in-open, across every registry kind.
//!
//! Line-like factors run on `QSet`, discrete factors on `NatSet`, and
//! product questions reduce to factor questions through a cell
//! decomposition: cutting the first coordinate at every endpoint named by
//! the covering rectangles yields cells that sit entirely inside or outside
//! each rectangle's first factor, so "is this product inside this union of
//! rectangles" recurses exactly.

use crate::error::Error;
use crate::qset::QSet;
use crate::rat::Q;
use crate::topology::desc::{Atom, Challenge, CompactDesc, OpenDesc, Region};
use crate::topology::point::Point;
use crate::topology::sets::{FactorSet, NatSet};
use crate::topology::space::{
    compact_qset, member, open_qset, qset_to_open, restrict_open_to_side, SpaceKind, SpaceModel,
};
use crate::Result;
use std::collections::BTreeSet;
use std::rc::Rc;

/// Reads an open descriptor as a factor set (line, discrete-ℕ, or
/// one-point factors).
pub fn open_factorset(space: &SpaceModel, d: &OpenDesc) -> Result<FactorSet> {
    match &space.kind {
        SpaceKind::DiscreteNat => {
            let mut out = NatSet::empty();
            for atom in &d.atoms {
                let piece = match atom {
                    Atom::Whole => NatSet::full(),
                    Atom::Singleton { p } => match p.as_nat() {
                        Some(n) => NatSet::from_iter([n]),
                        None => return Err(Error::mismatch("non-natural singleton")),
                    },
                    Atom::Cofinite { excluded } => {
                        let named: Option<BTreeSet<u64>> =
                            excluded.iter().map(|p| p.as_nat()).collect();
                        match named {
                            Some(s) => NatSet::Cofin(s),
                            None => return Err(Error::mismatch("non-natural exclusion")),
                        }
                    }
                    _ => return Err(Error::mismatch("atom kind not meaningful in discrete ℕ")),
                };
                out = out.union(&piece);
            }
            Ok(FactorSet::Nat(out))
        }
        SpaceKind::OnePoint => {
            let covered = member(space, &Point::nat(0), d)?;
            Ok(FactorSet::One(covered))
        }
        _ if space.is_line_like() => Ok(FactorSet::Line(open_qset(space, d)?)),
        _ => Err(Error::unsupported(format!(
            "space `{}` has no factor-set reading",
            space.id
        ))),
    }
}

/// Reads a compact descriptor as a factor set.
pub fn compact_factorset(space: &SpaceModel, k: &CompactDesc) -> Result<FactorSet> {
    match &space.kind {
        SpaceKind::DiscreteNat => {
            let pts = k
                .as_finite_points()
                .ok_or_else(|| Error::mismatch("discrete compacts are finite point sets"))?;
            let nats: Option<BTreeSet<u64>> = pts.iter().map(|p| p.as_nat()).collect();
            match nats {
                Some(s) => Ok(FactorSet::Nat(NatSet::Fin(s))),
                None => Err(Error::mismatch("non-natural point in discrete compact")),
            }
        }
        SpaceKind::OnePoint => {
            let pts = k
                .as_finite_points()
                .ok_or_else(|| Error::mismatch("one-point compacts are finite point sets"))?;
            Ok(FactorSet::One(!pts.is_empty()))
        }
        _ if space.is_line_like() => Ok(FactorSet::Line(compact_qset(space, k)?)),
        _ => Err(Error::unsupported(format!(
            "space `{}` has no factor-set reading",
            space.id
        ))),
    }
}

pub fn region_factorset(space: &SpaceModel, r: &Region) -> Result<FactorSet> {
    match r {
        Region::Compact { k } => compact_factorset(space, k),
        Region::Open { u } => open_factorset(space, u),
    }
}

/// Renders a factor set back into an open descriptor.  Line sets with a
/// left-unbounded piece are inexpressible; clip with an open window first.
pub fn factorset_to_open(space: &SpaceModel, fs: &FactorSet) -> Result<OpenDesc> {
    match fs {
        FactorSet::One(true) => Ok(OpenDesc::whole()),
        FactorSet::One(false) => Ok(OpenDesc::empty()),
        FactorSet::Nat(NatSet::Fin(s)) => Ok(OpenDesc {
            atoms: s
                .iter()
                .map(|&n| Atom::Singleton { p: Point::nat(n) })
                .collect(),
        }),
        FactorSet::Nat(NatSet::Cofin(s)) => {
            if s.is_empty() {
                Ok(OpenDesc::whole())
            } else {
                Ok(OpenDesc::cofinite(s.iter().map(|&n| Point::nat(n)).collect()))
            }
        }
        FactorSet::Line(qs) => {
            let _ = space;
            qset_to_open(qs)
        }
    }
}

/// Splits a factor set into cells, each lying entirely inside or outside
/// every one of `parts`.  Cells partition the target set.
pub fn decompose_cells<'a, I>(target: &FactorSet, parts: I) -> Vec<FactorSet>
where
    I: IntoIterator<Item = &'a FactorSet>,
{
    match target {
        FactorSet::One(false) => Vec::new(),
        FactorSet::One(true) => vec![FactorSet::One(true)],
        FactorSet::Nat(t) => {
            let mut named: BTreeSet<u64> = BTreeSet::new();
            for p in parts {
                match p {
                    FactorSet::Nat(NatSet::Fin(s)) | FactorSet::Nat(NatSet::Cofin(s)) => {
                        named.extend(s.iter().copied())
                    }
                    _ => panic!("factor kind mismatch"),
                }
            }
            let mut cells = Vec::new();
            for &n in &named {
                if t.contains(n) {
                    cells.push(FactorSet::Nat(NatSet::from_iter([n])));
                }
            }
            let rest = t.subtract(&NatSet::Fin(named));
            if !rest.is_empty() {
                cells.push(FactorSet::Nat(rest));
            }
            cells
        }
        FactorSet::Line(t) => {
            let mut cuts: BTreeSet<Q> = BTreeSet::new();
            for p in parts {
                match p {
                    FactorSet::Line(qs) => {
                        for iv in qs.intervals() {
                            if let Some(a) = &iv.lo {
                                cuts.insert(a.clone());
                            }
                            if let Some(b) = &iv.hi {
                                cuts.insert(b.clone());
                            }
                        }
                    }
                    _ => panic!("factor kind mismatch"),
                }
            }
            let cuts: Vec<Q> = cuts.into_iter().collect();
            let mut pieces: Vec<QSet> = Vec::new();
            if cuts.is_empty() {
                pieces.push(QSet::full());
            } else {
                for (i, v) in cuts.iter().enumerate() {
                    if i == 0 {
                        pieces.push(QSet::full().subtract(&QSet::ray_above(v.clone())).subtract(
                            &QSet::point(v.clone()),
                        ));
                    }
                    pieces.push(QSet::point(v.clone()));
                    match cuts.get(i + 1) {
                        Some(w) => pieces.push(QSet::open(v.clone(), w.clone())),
                        None => pieces.push(QSet::ray_above(v.clone())),
                    }
                }
            }
            pieces
                .into_iter()
                .map(|p| p.intersect(t))
                .filter(|p| !p.is_empty())
                .map(FactorSet::Line)
                .collect()
        }
    }
}

/// Is the product of `target` factor sets inside the union of the given
/// rectangles (each a row of factor sets)?
pub fn product_subset(target: &[FactorSet], rects: &[Vec<FactorSet>]) -> bool {
    if target.iter().any(|t| t.is_empty()) {
        return true;
    }
    if target.is_empty() {
        return !rects.is_empty();
    }
    let head = &target[0];
    let firsts: Vec<&FactorSet> = rects.iter().map(|r| &r[0]).collect();
    for cell in decompose_cells(head, firsts.iter().copied()) {
        let sub: Vec<Vec<FactorSet>> = rects
            .iter()
            .filter(|r| cell.is_subset_of(&r[0]))
            .map(|r| r[1..].to_vec())
            .collect();
        if sub.is_empty() {
            return false;
        }
        if !product_subset(&target[1..], &sub) {
            return false;
        }
    }
    true
}

/// Extracts the rectangle rows of a product-space open descriptor as
/// factor-set rows.  A `Whole` atom becomes the all-ambient rectangle.
pub fn rect_rows(space: &SpaceModel, d: &OpenDesc) -> Result<Vec<Vec<FactorSet>>> {
    let fs = space
        .factors()
        .ok_or_else(|| Error::mismatch("rectangle reading outside a product space"))?;
    let mut rows = Vec::new();
    for atom in &d.atoms {
        match atom {
            Atom::Whole => {
                let row: Result<Vec<FactorSet>> =
                    fs.iter().map(|f| open_factorset(f, &OpenDesc::whole())).collect();
                rows.push(row?);
            }
            Atom::Rect { factors } => {
                if factors.len() != fs.len() {
                    return Err(Error::mismatch("rectangle arity mismatch"));
                }
                let row: Result<Vec<FactorSet>> = fs
                    .iter()
                    .zip(factors)
                    .map(|(f, part)| open_factorset(f, part))
                    .collect();
                rows.push(row?);
            }
            _ => return Err(Error::mismatch("product opens are unions of rectangles")),
        }
    }
    Ok(rows)
}

/// Fortissimo sets: (naturals part, contains-∞).
fn fort_open_set(space: &SpaceModel, d: &OpenDesc) -> Result<(NatSet, bool)> {
    let mut nats = NatSet::empty();
    let mut infty = false;
    for atom in &d.atoms {
        match atom {
            Atom::Whole => {
                nats = NatSet::full();
                infty = true;
            }
            Atom::Singleton { p } => match p.as_nat() {
                Some(n) => nats = nats.union(&NatSet::from_iter([n])),
                None => return Err(Error::pre("{∞} is not open in the Fortissimo model")),
            },
            Atom::Cofinite { excluded } => {
                let mut named = BTreeSet::new();
                let mut excludes_infty = false;
                for p in excluded {
                    match p {
                        Point::Nat { v } => {
                            named.insert(*v);
                        }
                        Point::Infty => excludes_infty = true,
                        _ => return Err(Error::mismatch("foreign point in exclusion list")),
                    }
                }
                nats = nats.union(&NatSet::Cofin(named));
                infty = infty || !excludes_infty;
            }
            _ => return Err(Error::mismatch("atom kind not meaningful in the Fortissimo model")),
        }
    }
    let _ = space;
    Ok((nats, infty))
}

/// Compact-in-open containment.
pub fn contains(space: &SpaceModel, k: &CompactDesc, u: &OpenDesc) -> Result<bool> {
    // Finite point sets work uniformly in every kind.
    if let Some(pts) = k.as_finite_points() {
        for p in &pts {
            if !member(space, p, u)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    if let CompactDesc::Union { parts } = k {
        for part in parts {
            if !contains(space, part, u)? {
                return Ok(false);
            }
        }
        return Ok(true);
    }
    match &space.kind {
        _ if space.is_line_like() => {
            Ok(compact_qset(space, k)?.is_subset_of(&open_qset(space, u)?))
        }
        SpaceKind::Product(_) | SpaceKind::Power(_, _) => {
            let fs = space.factors().expect("composite kind has factors");
            match k {
                CompactDesc::Product { factors } => {
                    if factors.len() != fs.len() {
                        return Err(Error::mismatch("product compact arity mismatch"));
                    }
                    let target: Result<Vec<FactorSet>> = fs
                        .iter()
                        .zip(factors)
                        .map(|(f, kf)| compact_factorset(f, kf))
                        .collect();
                    Ok(product_subset(&target?, &rect_rows(space, u)?))
                }
                _ => Err(Error::unsupported(
                    "product containment needs a product compact or finite points",
                )),
            }
        }
        SpaceKind::Sum(l, r) => match k {
            CompactDesc::Inj { side, part } => {
                let factor = if *side == 0 { l } else { r };
                contains(factor, part, &restrict_open_to_side(u, *side))
            }
            _ => Err(Error::unsupported(
                "sum containment needs injected compacts or finite points",
            )),
        },
        _ => Err(Error::unsupported(format!(
            "containment for this compact kind is not defined on `{}`",
            space.id
        ))),
    }
}

/// Open-in-open containment.
pub fn open_inside_open(space: &SpaceModel, inner: &OpenDesc, outer: &OpenDesc) -> Result<bool> {
    match &space.kind {
        _ if space.is_line_like() => {
            Ok(open_qset(space, inner)?.is_subset_of(&open_qset(space, outer)?))
        }
        SpaceKind::DiscreteNat | SpaceKind::OnePoint => {
            Ok(open_factorset(space, inner)?.is_subset_of(&open_factorset(space, outer)?))
        }
        SpaceKind::Fortissimo => {
            let (in_nats, in_infty) = fort_open_set(space, inner)?;
            let (out_nats, out_infty) = fort_open_set(space, outer)?;
            Ok(in_nats.is_subset_of(&out_nats) && (!in_infty || out_infty))
        }
        SpaceKind::Baire => {
            let outer_whole = outer.atoms.iter().any(|a| {
                matches!(a, Atom::Whole) || matches!(a, Atom::Cylinder { word } if word.is_empty())
            });
            for atom in &inner.atoms {
                match atom {
                    Atom::Whole => {
                        if !outer_whole {
                            return Ok(false);
                        }
                    }
                    Atom::Cylinder { word } => {
                        if outer_whole {
                            continue;
                        }
                        // [t] ⊆ ⋃[sᵢ] iff some sᵢ is a prefix of t: a finite
                        // union of strictly longer cylinders always misses a
                        // branch.
                        let covered = outer.atoms.iter().any(|o| match o {
                            Atom::Cylinder { word: s } => {
                                s.len() <= word.len() && word[..s.len()] == s[..]
                            }
                            _ => false,
                        });
                        if !covered {
                            return Ok(false);
                        }
                    }
                    _ => return Err(Error::mismatch("Baire opens are unions of cylinders")),
                }
            }
            Ok(true)
        }
        SpaceKind::Product(_) | SpaceKind::Power(_, _) => {
            let outer_rows = rect_rows(space, outer)?;
            for row in rect_rows(space, inner)? {
                if !product_subset(&row, &outer_rows) {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        SpaceKind::Sum(l, r) => {
            for (side, factor) in [(0usize, l), (1, r)] {
                let inner_side = restrict_open_to_side(inner, side);
                if inner_side.atoms.is_empty() {
                    continue;
                }
                if !open_inside_open(factor, &inner_side, &restrict_open_to_side(outer, side))? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::unsupported(format!(
            "open-in-open containment not defined on `{}`",
            space.id
        ))),
    }
}

/// Challenge-in-open containment — the selector soundness predicate.
pub fn challenge_inside(space: &SpaceModel, ch: &Challenge, d: &OpenDesc) -> Result<bool> {
    match ch {
        Challenge::Point { p } => member(space, p, d),
        Challenge::FiniteSet { pts } => {
            for p in pts {
                if !member(space, p, d)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Challenge::Compact { k } => contains(space, k, d),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => contains(space, k, d),
            Region::Open { u } => open_inside_open(space, u, d),
        },
    }
}

/// Reads a challenge over a *factor* space as a factor set (for tube and
/// subcover machinery).
pub fn challenge_factorset(space: &SpaceModel, ch: &Challenge) -> Result<FactorSet> {
    match ch {
        Challenge::Point { p } => {
            compact_factorset(space, &CompactDesc::points(vec![p.clone()]))
        }
        Challenge::FiniteSet { pts } => {
            compact_factorset(space, &CompactDesc::points(pts.clone()))
        }
        Challenge::Compact { k } => compact_factorset(space, k),
        Challenge::RelCompact { r } => region_factorset(space, r),
    }
}

/// A representative point of a nonempty factor set.
pub fn factorset_sample(space: &SpaceModel, fs: &FactorSet) -> Option<Point> {
    match fs {
        FactorSet::Line(qs) => qs.sample_point().map(Point::rat),
        FactorSet::Nat(ns) => ns.sample().map(Point::nat),
        FactorSet::One(true) => Some(Point::nat(0)),
        FactorSet::One(false) => None,
    }
    .filter(|p| crate::topology::space::point_in_space(space, p))
}

/// The per-coordinate reading of a *product-space* challenge: its factor
/// sets, when every coordinate is expressible.
pub fn product_challenge_factors(
    space: &SpaceModel,
    ch: &Challenge,
) -> Result<Vec<FactorSet>> {
    let fs = space
        .factors()
        .ok_or_else(|| Error::mismatch("not a product space"))?;
    let k = match ch {
        Challenge::Point { p } => CompactDesc::points(vec![p.clone()]),
        Challenge::FiniteSet { pts } => CompactDesc::points(pts.clone()),
        Challenge::Compact { k } => k.clone(),
        Challenge::RelCompact { r } => match r {
            Region::Compact { k } => k.clone(),
            Region::Open { u } => {
                // An open rectangle region: single Rect atom only.
                if let [Atom::Rect { factors }] = &u.atoms[..] {
                    let out: Result<Vec<FactorSet>> = fs
                        .iter()
                        .zip(factors)
                        .map(|(f, part)| open_factorset(f, part))
                        .collect();
                    return out;
                }
                return Err(Error::unsupported(
                    "open product region must be a single rectangle",
                ));
            }
        },
    };
    match k {
        CompactDesc::Product { factors } => {
            if factors.len() != fs.len() {
                return Err(Error::mismatch("product compact arity mismatch"));
            }
            fs.iter()
                .zip(&factors)
                .map(|(f, kf)| compact_factorset(f, kf))
                .collect()
        }
        other => {
            // Finite point sets project coordinate-wise (the projection of
            // a finite set is finite); the product of the projections
            // contains the original, which is what tube constructions need.
            let pts = other
                .as_finite_points()
                .ok_or_else(|| Error::unsupported("challenge has no product reading"))?;
            let mut cols: Vec<Vec<Point>> = vec![Vec::new(); fs.len()];
            for p in &pts {
                match p {
                    Point::Tuple { v } if v.len() == fs.len() => {
                        for (i, c) in v.iter().enumerate() {
                            cols[i].push(c.clone());
                        }
                    }
                    _ => return Err(Error::mismatch("non-tuple point in product challenge")),
                }
            }
            fs.iter()
                .zip(cols)
                .map(|(f, col)| compact_factorset(f, &CompactDesc::points(col)))
                .collect()
        }
    }
}

/// Convenience: the factor models of a binary product.
pub fn binary_factors(space: &SpaceModel) -> Result<(Rc<SpaceModel>, Rc<SpaceModel>)> {
    let fs = space
        .factors()
        .ok_or_else(|| Error::mismatch("not a product space"))?;
    if fs.len() != 2 {
        return Err(Error::pre("binary product required"));
    }
    Ok((fs[0].clone(), fs[1].clone()))
}
