//! Exact sets of rationals: finite unions of intervals (any mix of open,
//! closed, half-open, degenerate-point, and unbounded ends), kept sorted,
//! disjoint, and non-adjacent.
//!
//! This is the workhorse behind every line-like judgment in the crate:
//! "compact `[a,b]` is inside this finite union of open sets", "exhibit a
//! rational the selections missed", "close a relatively compact region".
//! All endpoints are exact rationals, so the answers are decisions, not
//! approximations.

use crate::rat::Q;

/// One interval.  `lo == None` means −∞, `hi == None` means +∞; the closed
/// flags are meaningful only for finite ends.  Invariant: nonempty (lo < hi,
/// or lo == hi with both ends closed — a single point).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Iv {
    pub lo: Option<Q>,
    pub lo_closed: bool,
    pub hi: Option<Q>,
    pub hi_closed: bool,
}

impl Iv {
    fn valid(&self) -> bool {
        match (&self.lo, &self.hi) {
            (Some(a), Some(b)) => a < b || (a == b && self.lo_closed && self.hi_closed),
            _ => true,
        }
    }

    pub fn contains(&self, q: &Q) -> bool {
        let lo_ok = match &self.lo {
            None => true,
            Some(a) => a < q || (a == q && self.lo_closed),
        };
        let hi_ok = match &self.hi {
            None => true,
            Some(b) => q < b || (q == b && self.hi_closed),
        };
        lo_ok && hi_ok
    }
}

/// Sorted disjoint union of intervals.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct QSet {
    ivs: Vec<Iv>,
}

/// Ordering key for a lower end: −∞ first, then by value with a closed end
/// strictly before an open one at the same value.
fn lo_key(iv: &Iv) -> (bool, Option<&Q>, bool) {
    (iv.lo.is_some(), iv.lo.as_ref(), !iv.lo_closed)
}

/// True when `x.hi` reaches at least as far as `y.hi`.
fn hi_geq(x: &Iv, y: &Iv) -> bool {
    match (&x.hi, &y.hi) {
        (None, _) => true,
        (_, None) => false,
        (Some(a), Some(b)) => a > b || (a == b && (x.hi_closed || !y.hi_closed)),
    }
}

impl QSet {
    pub fn empty() -> QSet {
        QSet { ivs: vec![] }
    }

    pub fn full() -> QSet {
        QSet::from_ivs(vec![Iv { lo: None, lo_closed: false, hi: None, hi_closed: false }])
    }

    pub fn point(q: Q) -> QSet {
        QSet::from_ivs(vec![Iv { lo: Some(q.clone()), lo_closed: true, hi: Some(q), hi_closed: true }])
    }

    /// Open interval (a, b); empty when a ≥ b.
    pub fn open(a: Q, b: Q) -> QSet {
        QSet::from_ivs(vec![Iv { lo: Some(a), lo_closed: false, hi: Some(b), hi_closed: false }])
    }

    /// Closed interval [a, b]; empty when a > b.
    pub fn closed(a: Q, b: Q) -> QSet {
        QSet::from_ivs(vec![Iv { lo: Some(a), lo_closed: true, hi: Some(b), hi_closed: true }])
    }

    /// Right ray (a, ∞).
    pub fn ray_above(a: Q) -> QSet {
        QSet::from_ivs(vec![Iv { lo: Some(a), lo_closed: false, hi: None, hi_closed: false }])
    }

    pub fn from_ivs(ivs: Vec<Iv>) -> QSet {
        let mut ivs: Vec<Iv> = ivs.into_iter().filter(Iv::valid).collect();
        ivs.sort_by(|a, b| lo_key(a).cmp(&lo_key(b)));
        let mut out: Vec<Iv> = vec![];
        for iv in ivs {
            match out.last_mut() {
                Some(last) if touches(last, &iv) => {
                    if !hi_geq(last, &iv) {
                        last.hi = iv.hi;
                        last.hi_closed = iv.hi_closed;
                    }
                }
                _ => out.push(iv),
            }
        }
        QSet { ivs: out }
    }

    pub fn intervals(&self) -> &[Iv] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn contains_point(&self, q: &Q) -> bool {
        self.ivs.iter().any(|iv| iv.contains(q))
    }

    pub fn union(&self, other: &QSet) -> QSet {
        let mut ivs = self.ivs.clone();
        ivs.extend(other.ivs.iter().cloned());
        QSet::from_ivs(ivs)
    }

    pub fn intersect(&self, other: &QSet) -> QSet {
        let mut out = vec![];
        for x in &self.ivs {
            for y in &other.ivs {
                if let Some(z) = intersect_ivs(x, y) {
                    out.push(z);
                }
            }
        }
        QSet::from_ivs(out)
    }

    /// Complement within the whole line.
    pub fn complement(&self) -> QSet {
        let mut out = vec![];
        let mut cursor: Option<(Q, bool)> = None; // previous right end (value, value itself free?)
        for iv in &self.ivs {
            if let Some(a) = &iv.lo {
                out.push(Iv {
                    lo: cursor.as_ref().map(|(v, _)| v.clone()),
                    lo_closed: cursor.as_ref().map(|(_, free)| *free).unwrap_or(false),
                    hi: Some(a.clone()),
                    hi_closed: !iv.lo_closed,
                });
            }
            match &iv.hi {
                None => return QSet::from_ivs(out), // nothing to the right
                Some(b) => cursor = Some((b.clone(), !iv.hi_closed)),
            }
        }
        out.push(Iv {
            lo: cursor.as_ref().map(|(v, _)| v.clone()),
            lo_closed: cursor.as_ref().map(|(_, free)| *free).unwrap_or(false),
            hi: None,
            hi_closed: false,
        });
        QSet::from_ivs(out)
    }

    pub fn subtract(&self, other: &QSet) -> QSet {
        self.intersect(&other.complement())
    }

    pub fn is_subset_of(&self, other: &QSet) -> bool {
        self.subtract(other).is_empty()
    }

    /// Some rational inside the set, if nonempty.
    pub fn sample_point(&self) -> Option<Q> {
        let iv = self.ivs.first()?;
        Some(match (&iv.lo, &iv.hi) {
            (Some(a), _) if iv.lo_closed => a.clone(),
            (_, Some(b)) if iv.hi_closed => b.clone(),
            (Some(a), Some(b)) => a.mid(b),
            (Some(a), None) => a + &Q::one(),
            (None, Some(b)) => b - &Q::one(),
            (None, None) => Q::zero(),
        })
    }

    /// Topological closure in the line: close every finite endpoint.
    pub fn closure(&self) -> QSet {
        QSet::from_ivs(
            self.ivs
                .iter()
                .map(|iv| Iv {
                    lo: iv.lo.clone(),
                    lo_closed: iv.lo.is_some(),
                    hi: iv.hi.clone(),
                    hi_closed: iv.hi.is_some(),
                })
                .collect(),
        )
    }

    /// Total length; `None` when some interval is unbounded.
    pub fn measure(&self) -> Option<Q> {
        let mut acc = Q::zero();
        for iv in &self.ivs {
            match (&iv.lo, &iv.hi) {
                (Some(a), Some(b)) => acc = &acc + &(b - a),
                _ => return None,
            }
        }
        Some(acc)
    }

    /// Greatest lower bound: `None` when empty or unbounded below.
    pub fn inf(&self) -> Option<&Q> {
        self.ivs.first().and_then(|iv| iv.lo.as_ref())
    }

    /// Least upper bound: `None` when empty or unbounded above.
    pub fn sup(&self) -> Option<&Q> {
        self.ivs.last().and_then(|iv| iv.hi.as_ref())
    }
}

/// Overlap-or-touch test assuming `x` starts no later than `y`.
fn touches(x: &Iv, y: &Iv) -> bool {
    match (&x.hi, &y.lo) {
        (None, _) => true,
        (_, None) => true,
        (Some(h), Some(b)) => b < h || (b == h && (x.hi_closed || y.lo_closed)),
    }
}

fn intersect_ivs(x: &Iv, y: &Iv) -> Option<Iv> {
    // Lower end: the later one; at equal values an open end dominates.
    let (lo, lo_closed) = match (&x.lo, &y.lo) {
        (None, None) => (None, false),
        (Some(a), None) => (Some(a.clone()), x.lo_closed),
        (None, Some(b)) => (Some(b.clone()), y.lo_closed),
        (Some(a), Some(b)) => {
            if a > b {
                (Some(a.clone()), x.lo_closed)
            } else if b > a {
                (Some(b.clone()), y.lo_closed)
            } else {
                (Some(a.clone()), x.lo_closed && y.lo_closed)
            }
        }
    };
    let (hi, hi_closed) = match (&x.hi, &y.hi) {
        (None, None) => (None, false),
        (Some(a), None) => (Some(a.clone()), x.hi_closed),
        (None, Some(b)) => (Some(b.clone()), y.hi_closed),
        (Some(a), Some(b)) => {
            if a < b {
                (Some(a.clone()), x.hi_closed)
            } else if b < a {
                (Some(b.clone()), y.hi_closed)
            } else {
                (Some(a.clone()), x.hi_closed && y.hi_closed)
            }
        }
    };
    let iv = Iv { lo, lo_closed, hi, hi_closed };
    iv.valid().then_some(iv)
}
