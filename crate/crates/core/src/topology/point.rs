//! Points of the registry spaces, as a single tagged value type.
//!
//! A point is data, not an address into a space: the same `Rat` value can be
//! a point of the rational line, the real-line model, or the Sorgenfrey
//! line.  Space-specific validity (`point_in_space`) and membership live in
//! `space.rs`.

use crate::rat::Q;
use serde::{Deserialize, Serialize};

/// A point of some registry space.
///
/// `Word` is the Baire-model point: a finite word standing for the infinite
/// sequence that extends it with zeros.  `Inj` carries the summand index of
/// a sum-space point; `Tuple` a product point.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "t", rename_all = "snake_case")]
pub enum Point {
    Nat { v: u64 },
    Rat { v: Q },
    Word { v: Vec<u64> },
    Infty,
    Tuple { v: Vec<Point> },
    Inj { side: usize, v: Box<Point> },
}

impl Point {
    pub fn nat(v: u64) -> Point {
        Point::Nat { v }
    }

    pub fn rat(v: Q) -> Point {
        Point::Rat { v }
    }

    pub fn rat_int(v: i64) -> Point {
        Point::Rat { v: Q::from_int(v) }
    }

    pub fn word(v: Vec<u64>) -> Point {
        Point::Word { v }
    }

    pub fn tuple(v: Vec<Point>) -> Point {
        Point::Tuple { v }
    }

    pub fn inj(side: usize, p: Point) -> Point {
        Point::Inj { side, v: Box::new(p) }
    }

    pub fn as_rat(&self) -> Option<&Q> {
        match self {
            Point::Rat { v } => Some(v),
            _ => None,
        }
    }

    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Point::Nat { v } => Some(*v),
            _ => None,
        }
    }
}
