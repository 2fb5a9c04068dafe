//! Cover oracles — intensional open covers used as player-one moves — and
//! battery-relative cover classification.
//!
//! An oracle never materializes "the whole cover".  It answers two
//! questions: `element(i)` (the i-th element, validated against the space)
//! and `select(challenge)` (an index whose element absorbs the challenge).
//! Dynamic oracles mint elements on demand; every minted element is
//! deduplicated by canonical key and remembered with the challenge that
//! produced it, so transcripts list only the touched part.

use crate::error::Error;
use crate::topology::contain::challenge_inside;
use crate::topology::desc::{Challenge, CoverClass, OpenDesc};
use crate::topology::point::Point;
use crate::topology::space::{escape_point, validate_open, SpaceModel};
use crate::Result;
use std::cell::RefCell;
use std::collections::BTreeMap;
use std::rc::Rc;

type StreamFn = Rc<dyn Fn(usize) -> Result<Option<OpenDesc>>>;
type SelectorFn = Rc<dyn Fn(&Challenge) -> Result<usize>>;
type DynamicFn = Rc<dyn Fn(&Challenge) -> Result<OpenDesc>>;

enum Source {
    Stream { f: StreamFn, selector: Option<SelectorFn> },
    Dynamic { f: DynamicFn },
}

#[derive(Default)]
struct Memo {
    elems: Vec<OpenDesc>,
    keys: BTreeMap<String, usize>,
    assoc: BTreeMap<usize, Challenge>,
}

/// An intensional open cover offered by player one.
///
/// Not `Send`: one oracle belongs to one game.
pub struct CoverOracle {
    pub space: Rc<SpaceModel>,
    pub class: CoverClass,
    pub name: String,
    source: Source,
    memo: RefCell<Memo>,
    /// How many stream elements a selector-less `select` may scan.
    pub search_bound: usize,
}

impl CoverOracle {
    /// A finite cover given extensionally.
    pub fn from_elements(
        space: Rc<SpaceModel>,
        class: CoverClass,
        name: &str,
        elements: Vec<OpenDesc>,
    ) -> Result<Rc<Self>> {
        for e in &elements {
            validate_open(&space, e)?;
        }
        let n = elements.len();
        let elems = Rc::new(elements);
        let stream_elems = elems.clone();
        Self::from_stream(
            space,
            class,
            name,
            move |i| Ok(stream_elems.get(i).cloned()),
            Some(n),
        )
    }

    /// A countable cover given as a stream.  `len` bounds the stream when
    /// known; otherwise selector-less selection scans `search_bound` deep.
    pub fn from_stream<F>(
        space: Rc<SpaceModel>,
        class: CoverClass,
        name: &str,
        f: F,
        len: Option<usize>,
    ) -> Result<Rc<Self>>
    where
        F: Fn(usize) -> Result<Option<OpenDesc>> + 'static,
    {
        Ok(Rc::new(Self {
            space,
            class,
            name: name.to_string(),
            source: Source::Stream { f: Rc::new(f), selector: None },
            memo: RefCell::new(Memo::default()),
            search_bound: len.unwrap_or(4096),
        }))
    }

    /// Attaches a selector to a stream oracle: a direct challenge → index
    /// map, verified on every use.
    pub fn with_selector<S>(self: Rc<Self>, selector: S) -> Result<Rc<Self>>
    where
        S: Fn(&Challenge) -> Result<usize> + 'static,
    {
        match &self.source {
            Source::Stream { f, .. } => Ok(Rc::new(Self {
                space: self.space.clone(),
                class: self.class,
                name: self.name.clone(),
                source: Source::Stream { f: f.clone(), selector: Some(Rc::new(selector)) },
                memo: RefCell::new(Memo::default()),
                search_bound: self.search_bound,
            })),
            Source::Dynamic { .. } => {
                Err(Error::pre("dynamic oracles already select directly"))
            }
        }
    }

    /// A cover defined by response: each challenge mints the element that
    /// absorbs it.
    pub fn dynamic<F>(space: Rc<SpaceModel>, class: CoverClass, name: &str, f: F) -> Rc<Self>
    where
        F: Fn(&Challenge) -> Result<OpenDesc> + 'static,
    {
        Rc::new(Self {
            space,
            class,
            name: name.to_string(),
            source: Source::Dynamic { f: Rc::new(f) },
            memo: RefCell::new(Memo::default()),
            search_bound: 4096,
        })
    }

    /// The i-th element.  Stream oracles pull (and validate) lazily;
    /// dynamic oracles only own what selection has minted.
    pub fn element(&self, i: usize) -> Result<OpenDesc> {
        {
            let memo = self.memo.borrow();
            if let Some(e) = memo.elems.get(i) {
                return Ok(e.clone());
            }
        }
        match &self.source {
            Source::Stream { f, .. } => {
                loop {
                    let next = self.memo.borrow().elems.len();
                    if next > i {
                        break;
                    }
                    match f(next)? {
                        Some(e) => {
                            validate_open(&self.space, &e)?;
                            let mut memo = self.memo.borrow_mut();
                            let key = e.key();
                            memo.keys.entry(key).or_insert(next);
                            memo.elems.push(e);
                        }
                        None => {
                            return Err(Error::pre(format!(
                                "cover `{}` has no element {}",
                                self.name, i
                            )))
                        }
                    }
                }
                Ok(self.memo.borrow().elems[i].clone())
            }
            Source::Dynamic { .. } => Err(Error::pre(format!(
                "cover `{}` has not minted element {}",
                self.name, i
            ))),
        }
    }

    /// An index whose element contains the challenge.  The soundness
    /// predicate (challenge ⊆ element) is always re-verified here, whatever
    /// the source claims.
    pub fn select(&self, ch: &Challenge) -> Result<usize> {
        if !self.class.accepts(ch) {
            return Err(Error::pre(format!(
                "a {} cover does not take this challenge kind",
                self.class
            )));
        }
        match &self.source {
            Source::Stream { selector, .. } => {
                if let Some(sel) = selector {
                    let i = sel(ch)?;
                    let e = self.element(i)?;
                    if !challenge_inside(&self.space, ch, &e)? {
                        return Err(Error::pre(format!(
                            "selector for `{}` returned index {} whose element misses the challenge",
                            self.name, i
                        )));
                    }
                    self.memo.borrow_mut().assoc.insert(i, ch.clone());
                    return Ok(i);
                }
                for i in 0..self.search_bound {
                    let e = match self.element(i) {
                        Ok(e) => e,
                        Err(_) => break,
                    };
                    if challenge_inside(&self.space, ch, &e)? {
                        self.memo.borrow_mut().assoc.insert(i, ch.clone());
                        return Ok(i);
                    }
                }
                Err(Error::pre(format!(
                    "no element of `{}` absorbs the challenge within the search bound",
                    self.name
                )))
            }
            Source::Dynamic { f } => {
                let e = f(ch)?;
                validate_open(&self.space, &e)?;
                if !challenge_inside(&self.space, ch, &e)? {
                    return Err(Error::pre(format!(
                        "dynamic cover `{}` minted an element that misses its own challenge",
                        self.name
                    )));
                }
                let mut memo = self.memo.borrow_mut();
                let key = e.key();
                let i = match memo.keys.get(&key) {
                    Some(&i) => i,
                    None => {
                        let i = memo.elems.len();
                        memo.keys.insert(key, i);
                        memo.elems.push(e);
                        i
                    }
                };
                memo.assoc.insert(i, ch.clone());
                Ok(i)
            }
        }
    }

    /// The challenge that last selected element `i`, if any.
    pub fn assoc(&self, i: usize) -> Option<Challenge> {
        self.memo.borrow().assoc.get(&i).cloned()
    }

    /// How many elements have been materialized so far.
    pub fn materialized_len(&self) -> usize {
        self.memo.borrow().elems.len()
    }

    /// True for covers defined by response rather than enumeration.
    pub fn is_dynamic(&self) -> bool {
        matches!(self.source, Source::Dynamic { .. })
    }

    /// All materialized elements (for transcripts: only the touched part).
    pub fn materialized(&self) -> Vec<(usize, OpenDesc)> {
        self.memo.borrow().elems.iter().cloned().enumerate().collect()
    }
}

/// Battery-relative classification thresholds.
///
/// The defaults (λ-threshold 1, γ-tail 0) are the weakest readings, chosen
/// so the class lattice k ⟹ ω ⟹ λ ⟹ o and γ ⟹ ω holds structurally
/// for every family.  Raising them asks for genuinely large or cofinal
/// behaviour over the finite battery and breaks no law — only memberships.
#[derive(Clone, Debug)]
pub struct ClassifyOptions {
    /// λ asks every battery point to land in at least this many elements.
    pub lambda_threshold: usize,
    /// γ allows every battery point to miss at most this many elements.
    pub gamma_tail: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        Self { lambda_threshold: 1, gamma_tail: 0 }
    }
}

/// Judges which classes a finite family belongs to, relative to the
/// space's batteries.  The returned list is sorted in `CoverClass::ALL`
/// order.
pub fn classify_cover(
    space: &SpaceModel,
    elements: &[OpenDesc],
    opts: &ClassifyOptions,
) -> Result<Vec<CoverClass>> {
    for e in elements {
        validate_open(space, e)?;
    }
    let mut out = Vec::new();
    'class: for class in CoverClass::ALL {
        match class {
            CoverClass::O => {
                for ch in space.batteries.point_challenges() {
                    if !absorbed_by_any(space, &ch, elements)? {
                        continue 'class;
                    }
                }
            }
            CoverClass::Lambda => {
                for ch in space.batteries.point_challenges() {
                    let mut hits = 0usize;
                    for e in elements {
                        if challenge_inside(space, &ch, e)? {
                            hits += 1;
                            if hits >= opts.lambda_threshold {
                                break;
                            }
                        }
                    }
                    if hits < opts.lambda_threshold {
                        continue 'class;
                    }
                }
            }
            CoverClass::Omega => {
                for ch in space.batteries.finite_set_challenges() {
                    if !absorbed_by_any(space, &ch, elements)? {
                        continue 'class;
                    }
                }
            }
            CoverClass::Gamma => {
                for ch in space.batteries.point_challenges() {
                    let mut misses = 0usize;
                    for e in elements {
                        if !challenge_inside(space, &ch, e)? {
                            misses += 1;
                            if misses > opts.gamma_tail {
                                continue 'class;
                            }
                        }
                    }
                }
            }
            CoverClass::K => {
                for ch in space.batteries.compact_challenges() {
                    if !absorbed_by_any(space, &ch, elements)? {
                        continue 'class;
                    }
                }
            }
            CoverClass::KRel => {
                for ch in space.batteries.rel_compact_challenges() {
                    if !absorbed_by_any(space, &ch, elements)? {
                        continue 'class;
                    }
                }
            }
        }
        out.push(class);
    }
    Ok(out)
}

fn absorbed_by_any(
    space: &SpaceModel,
    ch: &Challenge,
    elements: &[OpenDesc],
) -> Result<bool> {
    for e in elements {
        if challenge_inside(space, ch, e)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The constructive face of the finite-ω law: a finite family that is an
/// ω-cover but covers nothing beyond its union must contain the whole
/// space as an element, or else some finite set of points defeats it.
/// Returns a finite set no single element absorbs, or `None` when one
/// element is (semantically) everything.
pub fn finite_omega_defeater(
    space: &SpaceModel,
    elements: &[OpenDesc],
    bound: u64,
) -> Result<Option<Vec<Point>>> {
    let mut witnesses = Vec::new();
    for e in elements {
        match escape_point(space, e, bound)? {
            Some(p) => witnesses.push(p),
            None => return Ok(None),
        }
    }
    witnesses.sort();
    witnesses.dedup();
    Ok(Some(witnesses))
}
