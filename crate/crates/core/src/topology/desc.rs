//! Symbolic descriptors for open sets, compact sets, relatively compact
//! regions, and the challenges a cover selector can be asked to swallow.
//!
//! Descriptors are extensional-by-test: there is no canonical form and no
//! equality of described sets, only decidable membership and containment
//! (implemented in `space.rs` / `sets.rs`).  Serialization is a tagged tree
//! with a stable field order, so serialized descriptors double as dedup keys.

use crate::rat::Q;
use crate::topology::point::Point;
use serde::{Deserialize, Serialize};

/// One basis atom of an open descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum Atom {
    /// The whole space.
    Whole,
    /// A single point (open only where the point is isolated, or glued to an
    /// interval at an ambient boundary).
    Singleton { p: Point },
    /// Rational open interval (lo, hi).
    Interval { lo: Q, hi: Q },
    /// Right ray (lo, ∞).
    RayAbove { lo: Q },
    /// Baire cylinder [word]: all sequences extending the word.
    Cylinder { word: Vec<u64> },
    /// Complement of a named finite point set.
    Cofinite { excluded: Vec<Point> },
    /// Open rectangle: one factor descriptor per product coordinate.
    Rect { factors: Vec<OpenDesc> },
    /// Sum-space injection of a summand open set.
    Inj { side: usize, part: OpenDesc },
}

/// A finite union of atoms.  The empty union is the empty set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpenDesc {
    pub atoms: Vec<Atom>,
}

impl OpenDesc {
    pub fn empty() -> OpenDesc {
        OpenDesc { atoms: Vec::new() }
    }

    pub fn whole() -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Whole] }
    }

    pub fn singleton(p: Point) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Singleton { p }] }
    }

    pub fn interval(lo: Q, hi: Q) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Interval { lo, hi }] }
    }

    pub fn ray_above(lo: Q) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::RayAbove { lo }] }
    }

    pub fn cylinder(word: Vec<u64>) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Cylinder { word }] }
    }

    pub fn cofinite(excluded: Vec<Point>) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Cofinite { excluded }] }
    }

    pub fn rect(factors: Vec<OpenDesc>) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Rect { factors }] }
    }

    pub fn inj(side: usize, part: OpenDesc) -> OpenDesc {
        OpenDesc { atoms: vec![Atom::Inj { side, part }] }
    }

    /// Sorgenfrey basic open [lo, hi) — the left endpoint glued on.
    pub fn half_open(lo: Q, hi: Q) -> OpenDesc {
        OpenDesc {
            atoms: vec![Atom::Singleton { p: Point::rat(lo.clone()) }, Atom::Interval { lo, hi }],
        }
    }

    /// Union of several descriptors (atom concatenation).
    pub fn union(parts: Vec<OpenDesc>) -> OpenDesc {
        OpenDesc { atoms: parts.into_iter().flat_map(|d| d.atoms).collect() }
    }

    /// Serialized form, used as a dedup key (stable field order).
    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }
}

/// A compact set descriptor.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum CompactDesc {
    Points { pts: Vec<Point> },
    ClosedInterval { lo: Q, hi: Q },
    Union { parts: Vec<CompactDesc> },
    Product { factors: Vec<CompactDesc> },
    Inj { side: usize, part: Box<CompactDesc> },
}

impl CompactDesc {
    pub fn points(pts: Vec<Point>) -> CompactDesc {
        CompactDesc::Points { pts }
    }

    pub fn closed(lo: Q, hi: Q) -> CompactDesc {
        CompactDesc::ClosedInterval { lo, hi }
    }

    pub fn closed_int(lo: i64, hi: i64) -> CompactDesc {
        CompactDesc::ClosedInterval { lo: Q::from_int(lo), hi: Q::from_int(hi) }
    }

    pub fn product(factors: Vec<CompactDesc>) -> CompactDesc {
        CompactDesc::Product { factors }
    }

    pub fn inj(side: usize, part: CompactDesc) -> CompactDesc {
        CompactDesc::Inj { side, part: Box::new(part) }
    }

    /// The finite point list, when this descriptor is (recursively) a finite
    /// set of points.
    pub fn as_finite_points(&self) -> Option<Vec<Point>> {
        match self {
            CompactDesc::Points { pts } => Some(pts.clone()),
            CompactDesc::ClosedInterval { lo, hi } if lo == hi => {
                Some(vec![Point::rat(lo.clone())])
            }
            CompactDesc::ClosedInterval { .. } => None,
            CompactDesc::Union { parts } => {
                let mut out = Vec::new();
                for p in parts {
                    out.extend(p.as_finite_points()?);
                }
                Some(out)
            }
            CompactDesc::Product { factors } => {
                let grids: Option<Vec<Vec<Point>>> =
                    factors.iter().map(|f| f.as_finite_points()).collect();
                let grids = grids?;
                let mut out = vec![Vec::new()];
                for axis in &grids {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for p in axis {
                            let mut t = prefix.clone();
                            t.push(p.clone());
                            next.push(t);
                        }
                    }
                    out = next;
                }
                Some(out.into_iter().map(Point::tuple).collect())
            }
            CompactDesc::Inj { side, part } => Some(
                part.as_finite_points()?
                    .into_iter()
                    .map(|p| Point::inj(*side, p))
                    .collect(),
            ),
        }
    }

    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }
}

/// A region that can be claimed relatively compact: either a compact
/// descriptor (always relatively compact) or an open descriptor whose
/// relative compactness the registry asserts and finite-subcover machinery
/// witnesses per cover.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum Region {
    Compact { k: CompactDesc },
    Open { u: OpenDesc },
}

impl Region {
    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }
}

/// What a selector can be asked to find a covering element for.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum Challenge {
    Point { p: Point },
    FiniteSet { pts: Vec<Point> },
    Compact { k: CompactDesc },
    RelCompact { r: Region },
}

impl Challenge {
    pub fn point(p: Point) -> Challenge {
        Challenge::Point { p }
    }

    pub fn finite_set(pts: Vec<Point>) -> Challenge {
        Challenge::FiniteSet { pts }
    }

    pub fn compact(k: CompactDesc) -> Challenge {
        Challenge::Compact { k }
    }

    pub fn rel_compact(r: Region) -> Challenge {
        Challenge::RelCompact { r }
    }

    pub fn key(&self) -> String {
        serde_json::to_string(self).expect("descriptor serialization cannot fail")
    }
}

/// Cover classes, ordered by challenge kind: point covers, large covers,
/// ω-covers, γ-covers, k-covers, relative k-covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverClass {
    O,
    Lambda,
    Omega,
    Gamma,
    K,
    KRel,
}

impl CoverClass {
    pub const ALL: [CoverClass; 6] = [
        CoverClass::O,
        CoverClass::Lambda,
        CoverClass::Omega,
        CoverClass::Gamma,
        CoverClass::K,
        CoverClass::KRel,
    ];

    /// Whether a challenge kind is legal for this cover class.  Points are
    /// accepted everywhere (a point is a finite set is a compact set);
    /// finite sets from ω up; compacts from k up; regions only for
    /// relative-k covers.
    pub fn accepts(&self, ch: &Challenge) -> bool {
        match ch {
            Challenge::Point { .. } => true,
            Challenge::FiniteSet { .. } => {
                matches!(self, CoverClass::Omega | CoverClass::K | CoverClass::KRel)
            }
            Challenge::Compact { .. } => matches!(self, CoverClass::K | CoverClass::KRel),
            Challenge::RelCompact { .. } => matches!(self, CoverClass::KRel),
        }
    }
}

impl std::fmt::Display for CoverClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CoverClass::O => "o",
            CoverClass::Lambda => "lambda",
            CoverClass::Omega => "omega",
            CoverClass::Gamma => "gamma",
            CoverClass::K => "k",
            CoverClass::KRel => "k_rel",
        };
        f.write_str(s)
    }
}
