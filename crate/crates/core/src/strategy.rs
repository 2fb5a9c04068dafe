//! Constructive strategies and witness transformations: cofinality-driven
//! Markov selectors, the product-game bookkeeping for full and Markov
//! strategies, the ω-cover unfoldings, and the named adversaries (Baire
//! cylinder flood, compact-open and finite-open duellists).
//!
//! Constructors are pure; the handles they return build fresh bookkeeping
//! per game, so cloning a handle or rerunning a spec always starts clean.
//! Factor strategies consulted inside composite bookkeeping are evaluated
//! on hypothetical histories with a fresh brain each time — they must be
//! pure in their declared window, which every strategy built here is.

use crate::combinatorics::{
    cantor_unpair, enum_finseq, enum_split_pairs, PairingFamily, RangeConstraint,
};
use crate::engine::{
    call_p2, Brain, GameSpec, Owner, P1Brain, P1Kind, P1Played, P2Brain, P2Choice, P2Played,
    P2Record, Round, Selection, Strength, StrategyHandle, Target, Transcript,
};
use crate::error::Error;
use crate::rat::Q;
use crate::topology::contain::{
    binary_factors, challenge_inside, factorset_to_open, open_factorset,
};
use crate::topology::cover::CoverOracle;
use crate::topology::desc::{Atom, Challenge, CompactDesc, CoverClass, OpenDesc};
use crate::topology::point::Point;
use crate::topology::space::{
    challenge_set_member, enumerate_points, member, Batteries, SpaceKind, SpaceModel, WitnessKind,
};
use crate::topology::transform::finite_subcover;
use crate::witnesses::{check_cofinality, CofinalityOutcome, Mode, WitnessFamily};
use crate::Result;
use serde_json::json;
use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::rc::Rc;

/// A shared append-only log that composite strategies write their per-round
/// bookkeeping snapshots into, for invariant audits from tests and suites.
pub type AuditSink = Rc<RefCell<Vec<serde_json::Value>>>;

pub fn audit_sink() -> AuditSink {
    Rc::new(RefCell::new(Vec::new()))
}

// ---------------------------------------------------------------------------
// shared plumbing
// ---------------------------------------------------------------------------

fn cover_of(m: &P1Played) -> Result<Rc<CoverOracle>> {
    match m {
        P1Played::Cover(c) => Ok(c.clone()),
        _ => Err(Error::mismatch("a cover move was expected")),
    }
}

fn single_index(c: P2Choice) -> Result<usize> {
    match c {
        P2Choice::Indices(v) if v.len() == 1 => Ok(v[0]),
        P2Choice::Indices(_) => Err(Error::mismatch("a single selection was expected")),
        P2Choice::Open(_) => Err(Error::mismatch("an index selection was expected")),
    }
}

fn indices_of(c: P2Choice) -> Result<Vec<usize>> {
    match c {
        P2Choice::Indices(v) if !v.is_empty() => Ok(v),
        P2Choice::Indices(_) => Err(Error::mismatch("an empty selection cannot be composed")),
        P2Choice::Open(_) => Err(Error::mismatch("an index selection was expected")),
    }
}

/// Evaluates a player-two strategy on a constructed history.  Builds a
/// fresh brain per call: composite bookkeeping replays factor strategies
/// on hypothetical pasts, which is sound exactly because every strategy
/// constructed in this module is a pure function of its window.
fn consult_p2(
    h: &StrategyHandle,
    spec: &GameSpec,
    hist: &[P1Played],
    cur: &P1Played,
    n: usize,
) -> Result<P2Choice> {
    if h.owner != Owner::P2 {
        return Err(Error::pre(format!("`{}` is not a player-two strategy", h.name)));
    }
    match h.fresh_brain(spec) {
        Brain::P2(mut b) => call_p2(&mut b, hist, cur, n),
        Brain::P1(_) => Err(Error::mismatch("player-two handle built a player-one brain")),
    }
}

fn cover_game_spec(
    space: Rc<SpaceModel>,
    class: CoverClass,
    selection: Selection,
    horizon: usize,
    seed: u64,
) -> GameSpec {
    GameSpec {
        selection,
        p1: P1Kind::Cover { class },
        target: Target::Cover { class },
        space,
        horizon,
        seed,
    }
}

/// The two sides of a basic (rectangular) element of a binary product
/// cover.  `Whole` splits into wholes; anything else must be a single
/// two-factor rectangle atom.
fn rect_sides(d: &OpenDesc) -> Result<(OpenDesc, OpenDesc)> {
    match &d.atoms[..] {
        [Atom::Whole] => Ok((OpenDesc::whole(), OpenDesc::whole())),
        [Atom::Rect { factors }] if factors.len() == 2 => {
            Ok((factors[0].clone(), factors[1].clone()))
        }
        _ => Err(Error::unsupported(
            "product bookkeeping needs rectangular cover elements",
        )),
    }
}

/// Exact intersection of two factor-space opens, through the factor-set
/// algebra (interval sets on lines, finite/cofinite sets on discrete
/// kinds).
fn open_intersection(space: &SpaceModel, a: &OpenDesc, b: &OpenDesc) -> Result<OpenDesc> {
    let fa = open_factorset(space, a)?;
    let fb = open_factorset(space, b)?;
    factorset_to_open(space, &fa.intersect(&fb))
}

/// An anonymous finite power of a base model, for lifted covers and
/// power-space consultations.  Batteries stay empty: judging against the
/// power happens through explicitly constructed challenges.
fn power_of(base: &Rc<SpaceModel>, arity: usize) -> Rc<SpaceModel> {
    SpaceModel::new(
        &format!("{}^{}", base.id, arity),
        SpaceKind::Power(base.clone(), arity),
        base.flags.clone(),
        Batteries::default(),
        Vec::new(),
    )
}

/// The diagonal lift of a cover: element i becomes the `arity`-fold
/// rectangle of the base element i.  Indices are shared with the base
/// cover, so selections project back verbatim.
fn lift_to_power(
    power: &Rc<SpaceModel>,
    base: &Rc<CoverOracle>,
    arity: usize,
) -> Result<Rc<CoverOracle>> {
    let src = base.clone();
    let bound = src.search_bound;
    CoverOracle::from_stream(
        power.clone(),
        CoverClass::O,
        &format!("{}-pow{}", src.name, arity),
        move |i| match src.element(i) {
            Ok(u) => Ok(Some(OpenDesc::rect(vec![u; arity]))),
            Err(_) => Ok(None),
        },
        Some(bound),
    )
}

// ---------------------------------------------------------------------------
// cofinality selectors
// ---------------------------------------------------------------------------

/// Re-shapes a witness challenge to what a cover of class `cls` accepts:
/// finite compacts downgrade to finite sets or points where the class
/// demands it.  No shape is ever widened.
fn adapt_to_class(ch: Challenge, cls: CoverClass) -> Result<Challenge> {
    if cls.accepts(&ch) {
        return Ok(ch);
    }
    let pts = match &ch {
        Challenge::Compact { k } => k.as_finite_points(),
        Challenge::FiniteSet { pts } => Some(pts.clone()),
        _ => None,
    };
    match (pts, cls) {
        (Some(pts), CoverClass::Omega) => Ok(Challenge::finite_set(pts)),
        (Some(pts), CoverClass::O | CoverClass::Lambda | CoverClass::Gamma)
            if pts.len() == 1 =>
        {
            Ok(Challenge::point(pts[0].clone()))
        }
        _ => Err(Error::mismatch(format!(
            "witness member is not a challenge a {cls} cover takes"
        ))),
    }
}

/// The Markov single-selection strategy of a countable cofinal family:
/// round n answers any presented cover with its selector applied to the
/// n-th family member.  It wins every battery-relative judgment in which
/// each battery challenge sits inside sat(A_n) for some n below the
/// horizon, because the selected element absorbs A_n whole.
pub fn markov_from_cofinality(w: &WitnessFamily, cls: CoverClass) -> StrategyHandle {
    let w = w.clone();
    let name = format!("markov-cofinal({})", w.name);
    StrategyHandle::new(Owner::P2, Strength::Markov, Selection::Single, &name, move |_spec| {
        let w = w.clone();
        Brain::P2(P2Brain::Markov(Box::new(move |cur, n| {
            let c = cover_of(cur)?;
            let ch = adapt_to_class(w.member(n as u64)?, cls)?;
            Ok(P2Choice::Indices(vec![c.select(&ch)?]))
        })))
    })
}

/// [`markov_from_cofinality`] with the class gate replaced by an
/// extensional scan: the least streamed element containing the n-th
/// member wins, whatever challenge shape the family produces.  Used where
/// compact-shaped witnesses steer plain open-cover games (power lifts).
pub fn scan_absorbing_strategy(
    name: &str,
    chs: Rc<dyn Fn(usize) -> Result<Challenge>>,
) -> StrategyHandle {
    StrategyHandle::new(Owner::P2, Strength::Markov, Selection::Single, name, move |_spec| {
        let chs = chs.clone();
        Brain::P2(P2Brain::Markov(Box::new(move |cur, n| {
            let c = cover_of(cur)?;
            let ch = chs(n)?;
            for i in 0..c.search_bound {
                let e = match c.element(i) {
                    Ok(e) => e,
                    Err(_) => break,
                };
                if challenge_inside(&c.space, &ch, &e)? {
                    return Ok(P2Choice::Indices(vec![i]));
                }
            }
            Err(Error::pre(format!(
                "no element of `{}` absorbs the round-{} target",
                c.name, n
            )))
        })))
    })
}

/// Re-tags a single-selection strategy for finite-selection games.  The
/// one-index responses stay as they are — a singleton is a finite set.
pub fn finite_selection(h: &StrategyHandle) -> StrategyHandle {
    let mut out = h.clone();
    out.selection = Selection::Finite;
    out
}

/// Builds the player-one move list that defeats a Markov selector on a
/// challenge outside its witness family's reach: round n presents a cover
/// whose σ-response omits the n-th point of the challenge.  Errors if any
/// built cover fails to exclude its point — with a selector that absorbs
/// everything, nothing can be omitted and no falsifying play exists.
pub fn markov_falsifier(
    sigma: &StrategyHandle,
    bad: &Challenge,
    xs: &[Point],
    builder: impl Fn(&Point, usize) -> Result<Rc<CoverOracle>>,
) -> Result<Vec<P1Played>> {
    let mut moves = Vec::new();
    for (n, x) in xs.iter().enumerate() {
        let c = builder(x, n)?;
        if !challenge_set_member(&c.space, bad, x)? {
            return Err(Error::pre(format!(
                "falsifier point {x:?} lies outside the target challenge"
            )));
        }
        let spec = cover_game_spec(c.space.clone(), c.class, sigma.selection, xs.len(), 0);
        let choice = consult_p2(sigma, &spec, &[], &P1Played::Cover(c.clone()), n)?;
        let sel = match choice {
            P2Choice::Indices(v) => v,
            P2Choice::Open(_) => return Err(Error::mismatch("an index selection was expected")),
        };
        for &i in &sel {
            if member(&c.space, x, &c.element(i)?)? {
                return Err(Error::pre(format!(
                    "the round-{n} cover fails to exclude {x:?} from the response"
                )));
            }
        }
        moves.push(P1Played::Cover(c));
    }
    Ok(moves)
}

/// Assembles the cover that defeats a cover-to-element choice function:
/// one witness neighborhood per battery challenge, none of them in the
/// function's range over the table.  The defeat is verified extensionally
/// — φ applied to the finished cover must return an element outside it.
pub fn galvin_defeating_cover(
    space: Rc<SpaceModel>,
    class: CoverClass,
    phi: impl Fn(&[OpenDesc]) -> Result<OpenDesc>,
    battery: &[Challenge],
    table: &[(Challenge, OpenDesc)],
) -> Result<Rc<CoverOracle>> {
    let mut elems: Vec<OpenDesc> = Vec::new();
    let mut keys = BTreeSet::new();
    for ch in battery {
        let u = table
            .iter()
            .find(|(a, _)| a.key() == ch.key())
            .map(|(_, u)| u.clone())
            .ok_or_else(|| {
                Error::pre(format!("witness table misses the challenge {}", ch.key()))
            })?;
        if !challenge_inside(&space, ch, &u)? {
            return Err(Error::pre(
                "a table neighborhood does not contain its challenge",
            ));
        }
        if keys.insert(u.key()) {
            elems.push(u);
        }
    }
    let picked = phi(&elems)?;
    if keys.contains(&picked.key()) {
        return Err(Error::pre(
            "the choice function hits the table cover — no defeating cover from these witnesses",
        ));
    }
    CoverOracle::from_elements(space, class, "galvin-defeating", elems)
}

// ---------------------------------------------------------------------------
// product bookkeeping (full strategies)
// ---------------------------------------------------------------------------

struct ProductCtx {
    x: Rc<SpaceModel>,
    y: Rc<SpaceModel>,
    class: CoverClass,
    horizon: usize,
    seed: u64,
}

fn product_ctx(spec: &GameSpec) -> Result<Rc<ProductCtx>> {
    let class = match spec.p1 {
        P1Kind::Cover { class } => class,
        _ => return Err(Error::pre("product strategies play cover games")),
    };
    let (x, y) = binary_factors(&spec.space)?;
    Ok(Rc::new(ProductCtx { x, y, class, horizon: spec.horizon, seed: spec.seed }))
}

/// The per-round records a composite product strategy accumulates: the
/// pairing-decoded row/column, the compact chosen on the first factor
/// (one for the single-selection game, a finite family for the finite
/// one), and the response indices.
#[derive(Default)]
pub struct ProductBookkeeping {
    pub rows: Vec<(u64, u64)>,
    pub ks: Vec<Challenge>,
    pub fams: Vec<Vec<Challenge>>,
    pub picks: Vec<Vec<usize>>,
}

/// The second-factor view of one recorded product cover, relative to a
/// first-factor compact: elements are the Y-sides of rectangles whose
/// X-side absorbs the compact.  Minted elements remember which rectangle
/// produced them through `wmap`.
fn y_view_cover(
    ctx: &Rc<ProductCtx>,
    parent: Rc<CoverOracle>,
    k_ch: Challenge,
    round: usize,
    wmap: Rc<RefCell<BTreeMap<String, usize>>>,
) -> Rc<CoverOracle> {
    let ctx = ctx.clone();
    CoverOracle::dynamic(
        ctx.y.clone(),
        ctx.class,
        &format!("y-view[{round}]"),
        move |l: &Challenge| {
            for i in 0..parent.search_bound {
                let w = match parent.element(i) {
                    Ok(w) => w,
                    Err(_) => break,
                };
                let (a, b) = rect_sides(&w)?;
                if challenge_inside(&ctx.x, &k_ch, &a)? && challenge_inside(&ctx.y, l, &b)? {
                    wmap.borrow_mut().entry(b.key()).or_insert(i);
                    return Ok(b);
                }
            }
            Err(Error::pre(
                "no rectangle absorbs both factor challenges within the search bound",
            ))
        },
    )
}

/// One bookkeeping step of the single-selection product strategy at a
/// recorded round: the second-factor strategy, fed the history prescribed
/// by the round's row sequence, picks the rectangle whose Y-side it
/// selected.  Returns the rectangle's index in that round's cover.
#[allow(clippy::too_many_arguments)]
fn roth_rect_of(
    ctx: &Rc<ProductCtx>,
    sy: &StrategyHandle,
    pairing: &Rc<PairingFamily>,
    covers: &Rc<Vec<Rc<CoverOracle>>>,
    ks: &Rc<Vec<Challenge>>,
    m: usize,
    k_ch: &Challenge,
) -> Result<(usize, OpenDesc)> {
    let (j, _) = pairing.beta_inverse(m as u64)?;
    let s_j = pairing.constraint().seq(j);
    let mut hist = Vec::with_capacity(s_j.len());
    for &r in &s_j {
        let r = r as usize;
        if r >= m {
            return Err(Error::pre("row sequence reaches a round not yet played"));
        }
        let kr = ks
            .get(r)
            .ok_or_else(|| Error::pre("bookkeeping misses a recorded round"))?
            .clone();
        let map = Rc::new(RefCell::new(BTreeMap::new()));
        hist.push(P1Played::Cover(y_view_cover(ctx, covers[r].clone(), kr, r, map)));
    }
    let cur_map = Rc::new(RefCell::new(BTreeMap::new()));
    let cur = y_view_cover(ctx, covers[m].clone(), k_ch.clone(), m, cur_map.clone());
    let spec = cover_game_spec(ctx.y.clone(), ctx.class, Selection::Single, ctx.horizon, ctx.seed);
    // The ambient round number rides along: cofinality-derived factor
    // strategies keep their member schedule in step with the real game.
    let iy = single_index(consult_p2(sy, &spec, &hist, &P1Played::Cover(cur.clone()), m)?)?;
    let py = cur.element(iy)?;
    let wi = cur_map
        .borrow()
        .get(&py.key())
        .copied()
        .ok_or_else(|| Error::pre("factor strategy selected outside the minted view"))?;
    Ok((wi, py))
}

/// The first-factor cover a recorded round induces: asking it for a
/// compact K mints the X-side of the rectangle the bookkeeping would pick
/// for K at that round.
fn roth_x_cover(
    ctx: &Rc<ProductCtx>,
    sy: &StrategyHandle,
    pairing: &Rc<PairingFamily>,
    covers: &Rc<Vec<Rc<CoverOracle>>>,
    ks: &Rc<Vec<Challenge>>,
    m: usize,
) -> Rc<CoverOracle> {
    let ctx2 = ctx.clone();
    let sy = sy.clone();
    let pairing = pairing.clone();
    let covers = covers.clone();
    let ks = ks.clone();
    CoverOracle::dynamic(
        ctx.x.clone(),
        ctx.class,
        &format!("x-view[{m}]"),
        move |k_ch: &Challenge| {
            let (wi, _) = roth_rect_of(&ctx2, &sy, &pairing, &covers, &ks, m, k_ch)?;
            Ok(rect_sides(&covers[m].element(wi)?)?.0)
        },
    )
}

/// The composed full single-selection strategy on a binary product, built
/// from full single-selection strategies on the factors.  Input covers
/// must be rectangular ([`crate::topology::transform::rectangle_refine`]
/// is the preprocessing pass when they are not).  Per round n, decoded as
/// row j and column k: the second factor answers histories indexed by the
/// row's sequence, the first factor answers the row's column history, and
/// the response is the rectangle both agreed on.
pub fn product_k_rothberger(sx: &StrategyHandle, sy: &StrategyHandle) -> StrategyHandle {
    product_k_rothberger_with_audit(sx, sy, None)
}

pub fn product_k_rothberger_with_audit(
    sx: &StrategyHandle,
    sy: &StrategyHandle,
    sink: Option<AuditSink>,
) -> StrategyHandle {
    let sx = sx.clone();
    let sy = sy.clone();
    let name = format!("product({}, {})", sx.name, sy.name);
    StrategyHandle::new(Owner::P2, Strength::Full, Selection::Single, &name, move |spec| {
        let spec = spec.clone();
        let sx = sx.clone();
        let sy = sy.clone();
        let sink = sink.clone();
        let pairing = Rc::new(PairingFamily::new(RangeConstraint::full_range()));
        let book = RefCell::new(ProductBookkeeping::default());
        Brain::P2(P2Brain::Full(Box::new(move |hist, cur, n| {
            let ctx = product_ctx(&spec)?;
            if book.borrow().ks.len() != n {
                return Err(Error::pre("product bookkeeping requires consecutive rounds"));
            }
            let mut covers: Vec<Rc<CoverOracle>> = Vec::with_capacity(n + 1);
            for m in hist {
                covers.push(cover_of(m)?);
            }
            covers.push(cover_of(cur)?);
            let covers = Rc::new(covers);
            let ks = Rc::new(book.borrow().ks.clone());

            let (j, k) = pairing.beta_inverse(n as u64)?;
            let s_j = pairing.constraint().seq(j);
            if s_j.iter().any(|&r| r >= n as u64) {
                return Err(Error::pre("row-sequence range escapes the round"));
            }

            let mut xh = Vec::with_capacity(k as usize);
            for p in 0..k {
                let r = pairing.beta_u64(j, p)? as usize;
                xh.push(P1Played::Cover(roth_x_cover(&ctx, &sy, &pairing, &covers, &ks, r)));
            }
            let cur_x = roth_x_cover(&ctx, &sy, &pairing, &covers, &ks, n);
            let xspec =
                cover_game_spec(ctx.x.clone(), ctx.class, Selection::Single, ctx.horizon, ctx.seed);
            let ix = single_index(consult_p2(&sx, &xspec, &xh, &P1Played::Cover(cur_x.clone()), n)?)?;
            let k_n = cur_x
                .assoc(ix)
                .ok_or_else(|| Error::pre("the factor strategy must select through the oracle"))?;
            let (wi, _) = roth_rect_of(&ctx, &sy, &pairing, &covers, &ks, n, &k_n)?;

            let mut b = book.borrow_mut();
            b.rows.push((j, k));
            b.ks.push(k_n.clone());
            b.picks.push(vec![wi]);
            if let Some(s) = &sink {
                s.borrow_mut().push(json!({
                    "n": n, "j": j, "k": k, "s_j": s_j, "pick": wi, "k_n": k_n.key(),
                }));
            }
            Ok(P2Choice::Indices(vec![wi]))
        })))
    })
}

/// The finite-selection sibling: per recorded round the second factor
/// answers with a finite family of rectangles, the first factor selects
/// finitely many X-intersections, and the response is the union of the
/// chosen families.  Histories are indexed by split sequences — the first
/// half names rounds, the second indexes into the finite compact families
/// recorded there (cyclically: a finite family read as an ω-sequence).
pub fn product_k_menger(sx: &StrategyHandle, sy: &StrategyHandle) -> StrategyHandle {
    product_k_menger_with_audit(sx, sy, None)
}

fn menger_family_of(
    ctx: &Rc<ProductCtx>,
    sy: &StrategyHandle,
    pairing: &Rc<PairingFamily>,
    covers: &Rc<Vec<Rc<CoverOracle>>>,
    fams: &Rc<Vec<Vec<Challenge>>>,
    m: usize,
    k_ch: &Challenge,
) -> Result<Vec<(usize, OpenDesc)>> {
    let (j, _) = pairing.beta_inverse(m as u64)?;
    let (s_minus, s_plus) = enum_split_pairs(j);
    let mut hist = Vec::with_capacity(s_minus.len());
    for (p, &r) in s_minus.iter().enumerate() {
        let r = r as usize;
        if r >= m {
            return Err(Error::pre("row sequence reaches a round not yet played"));
        }
        let fam = fams
            .get(r)
            .ok_or_else(|| Error::pre("bookkeeping misses a recorded round"))?;
        if fam.is_empty() {
            return Err(Error::pre("a recorded round holds an empty compact family"));
        }
        let kr = fam[(s_plus[p] as usize) % fam.len()].clone();
        let map = Rc::new(RefCell::new(BTreeMap::new()));
        hist.push(P1Played::Cover(y_view_cover(ctx, covers[r].clone(), kr, r, map)));
    }
    let cur_map = Rc::new(RefCell::new(BTreeMap::new()));
    let cur = y_view_cover(ctx, covers[m].clone(), k_ch.clone(), m, cur_map.clone());
    let spec = cover_game_spec(ctx.y.clone(), ctx.class, Selection::Finite, ctx.horizon, ctx.seed);
    let iys = indices_of(consult_p2(sy, &spec, &hist, &P1Played::Cover(cur.clone()), m)?)?;
    let mut out: BTreeMap<usize, OpenDesc> = BTreeMap::new();
    for iy in iys {
        let py = cur.element(iy)?;
        let wi = cur_map
            .borrow()
            .get(&py.key())
            .copied()
            .ok_or_else(|| Error::pre("factor strategy selected outside the minted view"))?;
        out.insert(wi, py);
    }
    Ok(out.into_iter().collect())
}

fn menger_x_cover(
    ctx: &Rc<ProductCtx>,
    sy: &StrategyHandle,
    pairing: &Rc<PairingFamily>,
    covers: &Rc<Vec<Rc<CoverOracle>>>,
    fams: &Rc<Vec<Vec<Challenge>>>,
    m: usize,
) -> Rc<CoverOracle> {
    let ctx2 = ctx.clone();
    let sy = sy.clone();
    let pairing = pairing.clone();
    let covers = covers.clone();
    let fams = fams.clone();
    CoverOracle::dynamic(
        ctx.x.clone(),
        ctx.class,
        &format!("x-view[{m}]"),
        move |k_ch: &Challenge| {
            let fam = menger_family_of(&ctx2, &sy, &pairing, &covers, &fams, m, k_ch)?;
            let mut acc: Option<OpenDesc> = None;
            for (wi, _) in &fam {
                let side = rect_sides(&covers[m].element(*wi)?)?.0;
                acc = Some(match acc {
                    None => side,
                    Some(prev) => open_intersection(&ctx2.x, &prev, &side)?,
                });
            }
            acc.ok_or_else(|| Error::pre("empty rectangle family has no X-side"))
        },
    )
}

pub fn product_k_menger_with_audit(
    sx: &StrategyHandle,
    sy: &StrategyHandle,
    sink: Option<AuditSink>,
) -> StrategyHandle {
    let sx = sx.clone();
    let sy = sy.clone();
    let name = format!("product-fin({}, {})", sx.name, sy.name);
    StrategyHandle::new(Owner::P2, Strength::Full, Selection::Finite, &name, move |spec| {
        let spec = spec.clone();
        let sx = sx.clone();
        let sy = sy.clone();
        let sink = sink.clone();
        let pairing = Rc::new(PairingFamily::new(RangeConstraint::split_pairs()));
        let book = RefCell::new(ProductBookkeeping::default());
        Brain::P2(P2Brain::Full(Box::new(move |hist, cur, n| {
            let ctx = product_ctx(&spec)?;
            if book.borrow().fams.len() != n {
                return Err(Error::pre("product bookkeeping requires consecutive rounds"));
            }
            let mut covers: Vec<Rc<CoverOracle>> = Vec::with_capacity(n + 1);
            for m in hist {
                covers.push(cover_of(m)?);
            }
            covers.push(cover_of(cur)?);
            let covers = Rc::new(covers);
            let fams = Rc::new(book.borrow().fams.clone());

            let (j, k) = pairing.beta_inverse(n as u64)?;
            let (s_minus, _) = enum_split_pairs(j);
            if s_minus.iter().any(|&r| r >= n as u64) {
                return Err(Error::pre("row-sequence range escapes the round"));
            }

            let mut xh = Vec::with_capacity(k as usize);
            for p in 0..k {
                let r = pairing.beta_u64(j, p)? as usize;
                xh.push(P1Played::Cover(menger_x_cover(&ctx, &sy, &pairing, &covers, &fams, r)));
            }
            let cur_x = menger_x_cover(&ctx, &sy, &pairing, &covers, &fams, n);
            let xspec =
                cover_game_spec(ctx.x.clone(), ctx.class, Selection::Finite, ctx.horizon, ctx.seed);
            let ixs = indices_of(consult_p2(&sx, &xspec, &xh, &P1Played::Cover(cur_x.clone()), n)?)?;
            let mut fam_n: Vec<Challenge> = Vec::new();
            let mut seen = BTreeSet::new();
            for ix in ixs {
                let kc = cur_x.assoc(ix).ok_or_else(|| {
                    Error::pre("the factor strategy must select through the oracle")
                })?;
                if seen.insert(kc.key()) {
                    fam_n.push(kc);
                }
            }
            let mut picks = BTreeSet::new();
            for kc in &fam_n {
                for (wi, _) in menger_family_of(&ctx, &sy, &pairing, &covers, &fams, n, kc)? {
                    picks.insert(wi);
                }
            }
            let picks: Vec<usize> = picks.into_iter().collect();

            let mut b = book.borrow_mut();
            b.rows.push((j, k));
            b.fams.push(fam_n.clone());
            b.picks.push(picks.clone());
            if let Some(s) = &sink {
                s.borrow_mut().push(json!({
                    "n": n, "j": j, "k": k, "s_minus": s_minus,
                    "family": fam_n.iter().map(|c| c.key()).collect::<Vec<_>>(),
                    "picks": picks,
                }));
            }
            Ok(P2Choice::Indices(picks))
        })))
    })
}

// ---------------------------------------------------------------------------
// product strategies, Markov flavor
// ---------------------------------------------------------------------------

/// The Markov product route through witnesses: the product family
/// {K_j × L_m}, pairing-enumerated, handed to [`markov_from_cofinality`].
/// Rectangular covers make the containment step concrete — a rectangle
/// absorbing K_j × L_m splits into factor opens absorbing each side.
pub fn markov_product_k_rothberger(
    product: Rc<SpaceModel>,
    wx: &WitnessFamily,
    wy: &WitnessFamily,
) -> Result<StrategyHandle> {
    let w = product_witnesses(product, wx, wy)?;
    Ok(markov_from_cofinality(&w, CoverClass::K))
}

/// The Markov finite-selection product: at round n, decoded as row j and
/// column k, the second factor answers the K-restricted Y-view at its
/// column, the first factor answers the induced X-cover at its row, and
/// the response unions the chosen finite rectangle families.  The window
/// is honest — everything recomputes from the current cover and n alone.
pub fn markov_product_k_menger(sx: &StrategyHandle, sy: &StrategyHandle) -> StrategyHandle {
    markov_product_k_menger_with_audit(sx, sy, None)
}

pub fn markov_product_k_menger_with_audit(
    sx: &StrategyHandle,
    sy: &StrategyHandle,
    sink: Option<AuditSink>,
) -> StrategyHandle {
    let sx = sx.clone();
    let sy = sy.clone();
    let name = format!("markov-product-fin({}, {})", sx.name, sy.name);
    StrategyHandle::new(Owner::P2, Strength::Markov, Selection::Finite, &name, move |spec| {
        let spec = spec.clone();
        let sx = sx.clone();
        let sy = sy.clone();
        let sink = sink.clone();
        let pairing = Rc::new(PairingFamily::new(RangeConstraint::trivial()));
        Brain::P2(P2Brain::Markov(Box::new(move |cur, n| {
            let ctx = product_ctx(&spec)?;
            let w = cover_of(cur)?;
            let (j, k) = pairing.beta_inverse(n as u64)?;

            // γ(𝒲, K, k): the Y-view of 𝒲 restricted to K, answered by the
            // second factor's Markov strategy at its column.
            let gamma = |k_ch: &Challenge| -> Result<Vec<(usize, OpenDesc)>> {
                let map = Rc::new(RefCell::new(BTreeMap::new()));
                let view = y_view_cover(&ctx, w.clone(), k_ch.clone(), n, map.clone());
                let spec_y = cover_game_spec(
                    ctx.y.clone(),
                    ctx.class,
                    Selection::Finite,
                    ctx.horizon,
                    ctx.seed,
                );
                let iys =
                    indices_of(consult_p2(&sy, &spec_y, &[], &P1Played::Cover(view.clone()), k as usize)?)?;
                let mut out: BTreeMap<usize, OpenDesc> = BTreeMap::new();
                for iy in iys {
                    let py = view.element(iy)?;
                    let wi = map.borrow().get(&py.key()).copied().ok_or_else(|| {
                        Error::pre("factor strategy selected outside the minted view")
                    })?;
                    out.insert(wi, py);
                }
                Ok(out.into_iter().collect())
            };

            let ctx_x = ctx.clone();
            let w_x = w.clone();
            let sy2 = sy.clone();
            let col = k as usize;
            let horizon = ctx.horizon;
            let seed = ctx.seed;
            let x_cover = CoverOracle::dynamic(
                ctx.x.clone(),
                ctx.class,
                &format!("x-view[{n}]"),
                move |k_ch: &Challenge| {
                    let map = Rc::new(RefCell::new(BTreeMap::new()));
                    let view = y_view_cover(&ctx_x, w_x.clone(), k_ch.clone(), col, map.clone());
                    let spec_y = cover_game_spec(
                        ctx_x.y.clone(),
                        ctx_x.class,
                        Selection::Finite,
                        horizon,
                        seed,
                    );
                    let iys = indices_of(consult_p2(
                        &sy2,
                        &spec_y,
                        &[],
                        &P1Played::Cover(view.clone()),
                        col,
                    )?)?;
                    let mut acc: Option<OpenDesc> = None;
                    for iy in iys {
                        let py = view.element(iy)?;
                        let wi = map.borrow().get(&py.key()).copied().ok_or_else(|| {
                            Error::pre("factor strategy selected outside the minted view")
                        })?;
                        let side = rect_sides(&w_x.element(wi)?)?.0;
                        acc = Some(match acc {
                            None => side,
                            Some(prev) => open_intersection(&ctx_x.x, &prev, &side)?,
                        });
                    }
                    acc.ok_or_else(|| Error::pre("empty rectangle family has no X-side"))
                },
            );
            let spec_x =
                cover_game_spec(ctx.x.clone(), ctx.class, Selection::Finite, ctx.horizon, ctx.seed);
            let ixs = indices_of(consult_p2(
                &sx,
                &spec_x,
                &[],
                &P1Played::Cover(x_cover.clone()),
                j as usize,
            )?)?;
            let mut fam: Vec<Challenge> = Vec::new();
            let mut seen = BTreeSet::new();
            for ix in ixs {
                let kc = x_cover.assoc(ix).ok_or_else(|| {
                    Error::pre("the factor strategy must select through the oracle")
                })?;
                if seen.insert(kc.key()) {
                    fam.push(kc);
                }
            }
            let mut picks = BTreeSet::new();
            for kc in &fam {
                for (wi, _) in gamma(kc)? {
                    picks.insert(wi);
                }
            }
            let picks: Vec<usize> = picks.into_iter().collect();
            if let Some(s) = &sink {
                s.borrow_mut().push(json!({
                    "n": n, "j": j, "k": k,
                    "family": fam.iter().map(|c| c.key()).collect::<Vec<_>>(),
                    "picks": picks,
                }));
            }
            Ok(P2Choice::Indices(picks))
        })))
    })
}

// ---------------------------------------------------------------------------
// unfoldings between the ω-game and the open game
// ---------------------------------------------------------------------------

/// Block arithmetic for the ω-to-open unfolding: cumulative indices grow
/// by exactly the size of each enumerated finite core.
#[derive(Default)]
pub struct UnfoldState {
    pub m: Vec<usize>,
    pub cores: Vec<Vec<Point>>,
    pub points: Vec<Point>,
}

impl UnfoldState {
    pub fn new() -> UnfoldState {
        UnfoldState { m: vec![0], cores: Vec::new(), points: Vec::new() }
    }

    pub fn push_block(&mut self, f: Vec<Point>) -> Result<()> {
        if f.is_empty() {
            return Err(Error::pre("a block core must enumerate at least one point"));
        }
        let prev = *self.m.last().expect("cumulative list starts at zero");
        self.m.push(prev + f.len());
        self.points.extend(f.iter().cloned());
        self.cores.push(f);
        self.check()
    }

    /// Re-verifies the cumulative arithmetic from the records alone.
    pub fn check(&self) -> Result<()> {
        if self.m.first() != Some(&0) || self.m.len() != self.cores.len() + 1 {
            return Err(Error::pre("unfold bookkeeping lost its shape"));
        }
        let mut total = 0usize;
        for (i, f) in self.cores.iter().enumerate() {
            total += f.len();
            if self.m[i + 1] != total || self.m[i + 1] - self.m[i] != f.len() {
                return Err(Error::pre("cumulative index mismatch in unfold bookkeeping"));
            }
        }
        if self.points.len() != total {
            return Err(Error::pre("enumerated points disagree with the block sizes"));
        }
        Ok(())
    }
}

/// The witness table that stands in for the nonconstructive choice of
/// ω-covers realizing prescribed responses: per block, a finite core of
/// points, and a realizer that returns an ω-cover on which the base
/// strategy answers exactly the requested union.
#[derive(Clone)]
pub struct GalvinExtractor {
    pub cores: Rc<Vec<Vec<Point>>>,
    pub realize: Rc<dyn Fn(usize, &OpenDesc) -> Result<Rc<CoverOracle>>>,
}

/// Unfolds an ω-cover strategy into an open-cover one: the play proceeds
/// in blocks, one open-cover round per enumerated core point, selecting
/// an element containing that point; when a block closes, its selection
/// union is matched against the base strategy's response on the simulated
/// ω-play, through the extractor's realizer.
pub fn unfold_omega_to_open_rothberger(
    sigma0: &StrategyHandle,
    g: &GalvinExtractor,
) -> StrategyHandle {
    unfold_omega_to_open_rothberger_with_audit(sigma0, g, None)
}

pub fn unfold_omega_to_open_rothberger_with_audit(
    sigma0: &StrategyHandle,
    g: &GalvinExtractor,
    sink: Option<AuditSink>,
) -> StrategyHandle {
    let sigma0 = sigma0.clone();
    let g = g.clone();
    let name = format!("unfold({})", sigma0.name);
    StrategyHandle::new(Owner::P2, Strength::Full, Selection::Single, &name, move |spec| {
        let spec = spec.clone();
        let sigma0 = sigma0.clone();
        let g = g.clone();
        let sink = sink.clone();
        let state = RefCell::new(UnfoldState::new());
        let pending: RefCell<VecDeque<Point>> = RefCell::new(VecDeque::new());
        let block_sel: RefCell<Vec<OpenDesc>> = RefCell::new(Vec::new());
        let sim: RefCell<Vec<Rc<CoverOracle>>> = RefCell::new(Vec::new());
        Brain::P2(P2Brain::Full(Box::new(move |_hist, cur, n| {
            let c = cover_of(cur)?;
            if pending.borrow().is_empty() {
                let block = state.borrow().cores.len();
                if block > 0 {
                    // Close the previous block: its selection union must be
                    // realizable as the base strategy's next ω-response.
                    let v = OpenDesc::union(block_sel.borrow().clone());
                    let w = (g.realize)(block - 1, &v)?;
                    let hist: Vec<P1Played> =
                        sim.borrow().iter().map(|c| P1Played::Cover(c.clone())).collect();
                    let sim_spec = cover_game_spec(
                        spec.space.clone(),
                        CoverClass::Omega,
                        Selection::Single,
                        spec.horizon,
                        spec.seed,
                    );
                    let i = single_index(consult_p2(
                        &sigma0,
                        &sim_spec,
                        &hist,
                        &P1Played::Cover(w.clone()),
                        hist.len(),
                    )?)?;
                    let got = w.element(i)?;
                    if got.key() != v.key() {
                        return Err(Error::pre(
                            "the extractor's cover does not realize the block union",
                        ));
                    }
                    sim.borrow_mut().push(w);
                }
                let f = g
                    .cores
                    .get(block)
                    .cloned()
                    .ok_or_else(|| Error::pre("extractor table ends before the horizon"))?;
                state.borrow_mut().push_block(f.clone())?;
                if let Some(s) = &sink {
                    let st = state.borrow();
                    s.borrow_mut().push(json!({
                        "n": n, "block": block, "m": st.m, "core": f.len(),
                    }));
                }
                pending.borrow_mut().extend(f);
                block_sel.borrow_mut().clear();
            }
            let x = pending.borrow_mut().pop_front().expect("block was just refilled");
            let i = c.select(&Challenge::point(x))?;
            block_sel.borrow_mut().push(c.element(i)?);
            Ok(P2Choice::Indices(vec![i]))
        })))
    })
}

/// Builds an ω-cover strategy from a family of open-cover strategies on
/// the finite powers: round n, decoded as row m and column k, lifts the
/// presented ω-cover diagonally to the (m+1)-power and plays the m-th
/// strategy against the lifted row history at its own column position.
/// Selections project back by index.
pub fn powers_to_omega_rothberger(
    sigmas: Rc<dyn Fn(usize) -> Result<StrategyHandle>>,
) -> StrategyHandle {
    StrategyHandle::new(
        Owner::P2,
        Strength::Full,
        Selection::Single,
        "powers-to-omega",
        move |spec| {
            let spec = spec.clone();
            let sigmas = sigmas.clone();
            let pairing = PairingFamily::new(RangeConstraint::trivial());
            Brain::P2(P2Brain::Full(Box::new(move |hist, cur, n| {
                let (m, k) = pairing.beta_inverse(n as u64)?;
                let arity = m as usize + 1;
                let power = power_of(&spec.space, arity);
                let mut ph = Vec::with_capacity(k as usize);
                for p in 0..k {
                    let r = pairing.beta_u64(m, p)? as usize;
                    let c = cover_of(hist.get(r).ok_or_else(|| {
                        Error::pre("row history reaches a round not yet played")
                    })?)?;
                    ph.push(P1Played::Cover(lift_to_power(&power, &c, arity)?));
                }
                let lifted = lift_to_power(&power, &cover_of(cur)?, arity)?;
                let sm = sigmas(m as usize)?;
                let pspec = cover_game_spec(
                    power,
                    CoverClass::O,
                    Selection::Single,
                    spec.horizon,
                    spec.seed,
                );
                // Row position, not ambient round: the m-th strategy sees a
                // self-contained play of its own power game.
                let i = single_index(consult_p2(
                    &sm,
                    &pspec,
                    &ph,
                    &P1Played::Cover(lifted.clone()),
                    k as usize,
                )?)?;
                lifted.element(i)?;
                Ok(P2Choice::Indices(vec![i]))
            })))
        },
    )
}

/// The Markov finite-selection ω-cover strategy of a per-power grid of
/// relatively compact sets: round n unions, over rows j ≤ n, finite
/// subcovers of the diagonal (j+1)-power lift absorbing the grid entries
/// A(j,ℓ) for ℓ ≤ n.  A finite set of size j+1 lands inside one selected
/// element as soon as its diagonal tuple falls in a reached grid entry.
pub fn markov_omega_menger_from_src(
    name: &str,
    grid: Rc<dyn Fn(u64, u64) -> Result<Challenge>>,
) -> StrategyHandle {
    StrategyHandle::new(Owner::P2, Strength::Markov, Selection::Finite, name, move |spec| {
        let base = spec.space.clone();
        let grid = grid.clone();
        Brain::P2(P2Brain::Markov(Box::new(move |cur, n| {
            let c = cover_of(cur)?;
            let mut sel = BTreeSet::new();
            for j in 0..=(n as u64) {
                let arity = j as usize + 1;
                let power = power_of(&base, arity);
                let lifted = lift_to_power(&power, &c, arity)?;
                for l in 0..=(n as u64) {
                    let ch = grid(j, l)?;
                    sel.extend(finite_subcover(&power, &ch, &lifted, lifted.search_bound)?);
                }
            }
            Ok(P2Choice::Indices(sel.into_iter().collect()))
        })))
    })
}

// ---------------------------------------------------------------------------
// witness conversions
// ---------------------------------------------------------------------------

/// Converts between point witnesses and finite-set witnesses: forward,
/// the cumulative prefixes F_n = {x_0,…,x_n}; backward, the enumeration
/// of the union of the finite sets.  Validity is re-checked sat-wise
/// against the point battery within a fixed bound.
pub fn topctble_witness_conversions(w: &WitnessFamily) -> Result<WitnessFamily> {
    const BOUND: u64 = 64;
    let out = match w.kind {
        WitnessKind::TopologicallyCountable => {
            let src = w.clone();
            WitnessFamily::new(
                WitnessKind::NearlyHemicompact,
                w.space.clone(),
                &format!("{}-prefixes", w.name),
                move |n| {
                    let mut pts = Vec::with_capacity(n as usize + 1);
                    for i in 0..=n {
                        match src.member(i)? {
                            Challenge::Point { p } => pts.push(p),
                            _ => {
                                return Err(Error::mismatch(
                                    "a point witness family was expected",
                                ))
                            }
                        }
                    }
                    Ok(Challenge::compact(CompactDesc::points(pts)))
                },
            )
        }
        WitnessKind::NearlyHemicompact | WitnessKind::Hemicompact => {
            let src = w.clone();
            WitnessFamily::new(
                WitnessKind::TopologicallyCountable,
                w.space.clone(),
                &format!("{}-union", w.name),
                move |n| {
                    let mut seen = BTreeSet::new();
                    let mut count = 0u64;
                    for i in 0..=(n + BOUND) {
                        let pts = match src.member(i) {
                            Ok(Challenge::Compact { k }) => k.as_finite_points().ok_or_else(
                                || Error::mismatch("a finite-set witness family was expected"),
                            )?,
                            Ok(Challenge::FiniteSet { pts }) => pts,
                            Ok(_) => {
                                return Err(Error::mismatch(
                                    "a finite-set witness family was expected",
                                ))
                            }
                            Err(_) => break,
                        };
                        for p in pts {
                            if seen.insert(format!("{p:?}")) {
                                if count == n {
                                    return Ok(Challenge::point(p));
                                }
                                count += 1;
                            }
                        }
                    }
                    Err(Error::exhausted("the union enumeration ran out of new points"))
                },
            )
        }
        _ => {
            return Err(Error::mismatch(
                "conversion applies to point or finite-set witness families",
            ))
        }
    };
    let battery: Vec<Challenge> = w.space.batteries.point_challenges();
    match check_cofinality(&out, &battery, Mode::CofHat, BOUND)? {
        CofinalityOutcome::Verified(_) => Ok(out),
        CofinalityOutcome::Counterexample { member, .. } => Err(Error::pre(format!(
            "converted family misses the battery member {}",
            member.key()
        ))),
    }
}

/// The product of two witness families of the same kind on a binary
/// product space, pairing-enumerated.  Point families pair into tuple
/// points, compact families into product compacts.  The result is
/// validated against the product's own battery for the kind.
pub fn product_witnesses(
    product: Rc<SpaceModel>,
    wx: &WitnessFamily,
    wy: &WitnessFamily,
) -> Result<WitnessFamily> {
    if wx.kind != wy.kind {
        return Err(Error::mismatch(format!(
            "mixed witness kinds {:?} and {:?} do not pair",
            wx.kind, wy.kind
        )));
    }
    let fs = product
        .factors()
        .ok_or_else(|| Error::mismatch("a binary product space was expected"))?;
    if fs.len() != 2 || fs[0].id != wx.space.id || fs[1].id != wy.space.id {
        return Err(Error::mismatch("witness families do not match the product's factors"));
    }
    let kind = wx.kind;
    let (ax, ay) = (wx.clone(), wy.clone());
    let out = WitnessFamily::new(
        kind,
        product.clone(),
        &format!("{}×{}", wx.name, wy.name),
        move |i| {
            let (a, b) = cantor_unpair(i);
            let (cx, cy) = (ax.member(a)?, ay.member(b)?);
            pair_challenges(cx, cy)
        },
    );
    match crate::witnesses::validate_family(&out, 64)? {
        CofinalityOutcome::Verified(_) => Ok(out),
        CofinalityOutcome::Counterexample { member, .. } => Err(Error::pre(format!(
            "product family misses the battery member {}",
            member.key()
        ))),
    }
}

fn pair_challenges(cx: Challenge, cy: Challenge) -> Result<Challenge> {
    use crate::topology::desc::Region;
    match (cx, cy) {
        (Challenge::Point { p: a }, Challenge::Point { p: b }) => {
            Ok(Challenge::point(Point::tuple(vec![a, b])))
        }
        (Challenge::Compact { k: a }, Challenge::Compact { k: b }) => {
            Ok(Challenge::compact(CompactDesc::product(vec![a, b])))
        }
        (
            Challenge::RelCompact { r: Region::Compact { k: a } },
            Challenge::RelCompact { r: Region::Compact { k: b } },
        ) => Ok(Challenge::rel_compact(Region::Compact {
            k: CompactDesc::product(vec![a, b]),
        })),
        (
            Challenge::RelCompact { r: Region::Open { u: a } },
            Challenge::RelCompact { r: Region::Open { u: b } },
        ) => Ok(Challenge::rel_compact(Region::Open { u: OpenDesc::rect(vec![a, b]) })),
        _ => Err(Error::unsupported("these member shapes have no product reading")),
    }
}

// ---------------------------------------------------------------------------
// named adversaries
// ---------------------------------------------------------------------------

/// An escape builder: replays a finished transcript and produces a digit
/// sequence whose point lies outside everything selected.
pub type EscapeFn = Rc<dyn Fn(&Transcript) -> Result<Vec<u64>>>;

/// The Baire-space adversary: player one floods every round with the
/// cover of all nonempty cylinders, and the escape function defeats any
/// bounded finite-selection opponent digit by digit — at position n it
/// avoids the n-th digit of every selected word still compatible with the
/// prefix built so far.  With at most `bound` selections per round the
/// banned digit set stays finite, so a free digit always exists.
pub fn baire_adversary(bound: usize) -> (StrategyHandle, EscapeFn) {
    let p1 = StrategyHandle::p1_source("baire-all-cylinders", move |spec, _n| {
        if !matches!(spec.space.kind, SpaceKind::Baire) {
            return Err(Error::pre("the cylinder adversary runs on the Baire model"));
        }
        Ok(P1Played::Cover(CoverOracle::from_stream(
            spec.space.clone(),
            CoverClass::O,
            "all-cylinders",
            |i| Ok(Some(OpenDesc::cylinder(enum_finseq(i as u64 + 1)))),
            None,
        )?))
    });
    let escape: EscapeFn = Rc::new(move |t: &Transcript| {
        let mut words: Vec<Vec<u64>> = Vec::new();
        for r in &t.rounds {
            let sel = match &r.p2 {
                P2Record::Indices { sel } => sel,
                _ => return Err(Error::mismatch("cylinder selections were expected")),
            };
            if sel.len() > bound {
                return Err(Error::pre(format!(
                    "round {} selects {} cylinders, past the declared bound {}",
                    r.n,
                    sel.len(),
                    bound
                )));
            }
            for w in round_words(r)? {
                words.push(w);
            }
        }
        let mut f: Vec<u64> = Vec::with_capacity(t.rounds.len());
        for n in 0..t.rounds.len() {
            let banned: BTreeSet<u64> = words
                .iter()
                .filter(|w| w.len() > n && w[..n] == f[..])
                .map(|w| w[n])
                .collect();
            let mut d = 0u64;
            while banned.contains(&d) {
                d += 1;
            }
            f.push(d);
        }
        Ok(f)
    });
    (p1, escape)
}

pub(crate) fn round_words(r: &Round) -> Result<Vec<Vec<u64>>> {
    use crate::engine::P1Record;
    let touched = match &r.p1 {
        P1Record::Cover { touched, .. } => touched,
        _ => return Err(Error::mismatch("a cover round was expected")),
    };
    let sel = match &r.p2 {
        P2Record::Indices { sel } => sel,
        _ => return Err(Error::mismatch("cylinder selections were expected")),
    };
    let mut out = Vec::new();
    for &i in sel {
        let u = touched
            .iter()
            .find(|t| t.i == i)
            .map(|t| &t.u)
            .ok_or_else(|| Error::format("selected element missing from the round record"))?;
        match &u.atoms[..] {
            [Atom::Cylinder { word }] => out.push(word.clone()),
            _ => return Err(Error::mismatch("a cylinder element was expected")),
        }
    }
    Ok(out)
}

/// The compact-mover for the compact-open duel on the line-plus-Fortissimo
/// sum: the opening move is the whole unit interval together with the
/// point at infinity, and each later move adds the triangular prefix of
/// named points — for every earlier response, read as a complement, its
/// first enumerated outside points.
pub fn chq_p1_compact_open() -> StrategyHandle {
    StrategyHandle::new(Owner::P1, Strength::Full, Selection::Single, "chq-compact-open", |spec| {
        let space = spec.space.clone();
        Brain::P1(P1Brain::Full(Box::new(move |hist, n| {
            chq_shape(&space)?;
            let k0 = CompactDesc::Union {
                parts: vec![
                    CompactDesc::inj(0, CompactDesc::closed(Q::zero(), Q::one())),
                    CompactDesc::inj(1, CompactDesc::points(vec![Point::Infty])),
                ],
            };
            if n == 0 {
                return Ok(P1Played::Compact(k0));
            }
            let mut named: Vec<Point> = Vec::new();
            let mut seen = BTreeSet::new();
            for j in 0..n {
                let u = match &hist[j] {
                    P2Played::Open(u) => u,
                    P2Played::Selected(_) => {
                        return Err(Error::unsupported(
                            "the response is not expressible as a named complement",
                        ))
                    }
                };
                for k in 0..n {
                    match complement_point(&space, u, k)? {
                        Some(p) => {
                            if seen.insert(format!("{p:?}")) {
                                named.push(p);
                            }
                        }
                        None => break,
                    }
                }
            }
            Ok(P1Played::Compact(if named.is_empty() {
                k0
            } else {
                CompactDesc::Union { parts: vec![k0, CompactDesc::points(named)] }
            }))
        })))
    })
}

fn chq_shape(space: &SpaceModel) -> Result<()> {
    let (l, r) = space
        .summands()
        .ok_or_else(|| Error::pre("the duel runs on a two-summand space"))?;
    let unit = matches!(&l.kind, SpaceKind::RealLine { lo: Some(lo), hi: Some(hi) }
        if *lo == Q::zero() && *hi == Q::one());
    if !unit || !matches!(r.kind, SpaceKind::Fortissimo) {
        return Err(Error::pre(
            "the duel expects the unit-interval and Fortissimo summands",
        ));
    }
    Ok(())
}

/// The k-th enumerated point of the space outside `u`.  `None` once the
/// scan finds no further outside point — at desk scale an exhausted scan
/// reads as an exhausted complement.
fn complement_point(space: &SpaceModel, u: &OpenDesc, k: usize) -> Result<Option<Point>> {
    const SCAN: u64 = 2048;
    let mut found = 0usize;
    for i in 0..SCAN {
        let Some(p) = enumerate_points(space, i) else {
            return Ok(None);
        };
        if !member(space, &p, u)? {
            if found == k {
                return Ok(Some(p));
            }
            found += 1;
        }
    }
    Ok(None)
}

/// The open-responder for the finite-open duel on the same sum: the whole
/// Fortissimo side plus, around each line point of the move, a rational
/// interval so small that the round's total length stays strictly under
/// 1/2^(n+2) and the running total strictly under 1/2 — in exact
/// arithmetic, so the uncovered-rational judgment is a certainty, not an
/// estimate.
pub fn chq_p2_finite_open() -> StrategyHandle {
    StrategyHandle::new(Owner::P2, Strength::Markov, Selection::Single, "chq-finite-open", |spec| {
        let space = spec.space.clone();
        let spent = RefCell::new(Q::zero());
        Brain::P2(P2Brain::Markov(Box::new(move |cur, n| {
            chq_shape(&space)?;
            let pts = match cur {
                P1Played::FiniteSet(pts) => pts,
                _ => return Err(Error::mismatch("a finite point set was expected")),
            };
            let mut parts = vec![OpenDesc::inj(1, OpenDesc::whole())];
            let line: Vec<Q> = pts
                .iter()
                .filter_map(|p| match p {
                    Point::Inj { side: 0, v } => v.as_rat().cloned(),
                    _ => None,
                })
                .collect();
            if !line.is_empty() {
                let m = line.len() as i64;
                let len = &Q::half_pow(n as u32 + 3) * &Q::frac(1, m);
                let half = &len * &Q::frac(1, 2);
                for x in &line {
                    parts.push(OpenDesc::inj(0, OpenDesc::interval(x - &half, x + &half)));
                }
                let round_total = &len * &Q::frac(m, 1);
                if round_total >= Q::half_pow(n as u32 + 2) {
                    return Err(Error::pre("round measure budget overflow"));
                }
                let new_total = &*spent.borrow() + &round_total;
                if new_total >= Q::frac(1, 2) {
                    return Err(Error::pre("cumulative measure budget overflow"));
                }
                *spent.borrow_mut() = new_total;
            }
            Ok(P2Choice::Open(OpenDesc::union(parts)))
        })))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{judge, run_dual_game, run_game, P1Record};
    use crate::topology::registry::default_registry;
    use crate::topology::space::sat_contains;
    use crate::witnesses::challenge_subset;

    fn space(id: &str) -> Rc<SpaceModel> {
        default_registry().get(id).expect("registry space")
    }

    fn symmetric_compacts(space: Rc<SpaceModel>, shift: i64) -> WitnessFamily {
        WitnessFamily::new(
            WitnessKind::Hemicompact,
            space,
            &format!("[{shift}-n,{shift}+n]"),
            move |n| {
                let n = n as i64;
                Ok(Challenge::compact(CompactDesc::closed_int(shift - n, shift + n)))
            },
        )
    }

    fn nat_prefixes(space: Rc<SpaceModel>) -> WitnessFamily {
        WitnessFamily::new(WitnessKind::Hemicompact, space, "{0..n}", |n| {
            Ok(Challenge::compact(CompactDesc::points((0..=n).map(Point::nat).collect())))
        })
    }

    /// Player one streaming the symmetric-interval cover (−(i+1), i+1) on a
    /// line, or its rectangle power on a product of lines.
    fn line_cover_source(class: CoverClass, arity: usize) -> StrategyHandle {
        StrategyHandle::p1_source("symmetric-intervals", move |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                class,
                "symmetric-intervals",
                move |i| {
                    let r = i as i64 + 1;
                    let side = OpenDesc::interval(Q::from_int(-r), Q::from_int(r));
                    Ok(Some(if arity == 1 {
                        side
                    } else {
                        OpenDesc::rect(vec![side; arity])
                    }))
                },
                Some(64),
            )?))
        })
    }

    fn nat_box(hi: u64) -> OpenDesc {
        OpenDesc::union((0..=hi).map(|v| OpenDesc::singleton(Point::nat(v))).collect())
    }

    /// Player one streaming the box cover {0..i} on discrete ℕ, or its
    /// rectangle power.
    fn box_cover_source(class: CoverClass, arity: usize) -> StrategyHandle {
        StrategyHandle::p1_source("nat-boxes", move |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                class,
                "nat-boxes",
                move |i| {
                    let side = nat_box(i as u64);
                    Ok(Some(if arity == 1 {
                        side
                    } else {
                        OpenDesc::rect(vec![side; arity])
                    }))
                },
                Some(64),
            )?))
        })
    }

    fn cover_spec(
        space: Rc<SpaceModel>,
        class: CoverClass,
        selection: Selection,
        horizon: usize,
    ) -> GameSpec {
        cover_game_spec(space, class, selection, horizon, 0)
    }

    // -- markov_from_cofinality ---------------------------------------------

    #[test]
    fn cofinal_intervals_cover_the_real_line_compact_battery() {
        let x = space("real_line");
        let w = symmetric_compacts(x.clone(), 0);
        let sigma = markov_from_cofinality(&w, CoverClass::K);
        let spec = cover_spec(x.clone(), CoverClass::K, Selection::Single, 8);
        let t = run_game(&spec, &line_cover_source(CoverClass::K, 1), &sigma).unwrap();
        assert!(t.aborted.is_none());
        let battery = x.batteries.compact_challenges();
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win, "battery compacts all sit inside [-5,5]");
    }

    #[test]
    fn cofinal_selector_on_one_point_space_always_absorbs_the_point() {
        let x = space("one_point");
        let w = WitnessFamily::new(WitnessKind::NearlyHemicompact, x.clone(), "pt", |_| {
            Ok(Challenge::compact(CompactDesc::points(vec![Point::nat(0)])))
        });
        let sigma = markov_from_cofinality(&w, CoverClass::O);
        let p1 = StrategyHandle::p1_source("whole", |spec, _| {
            Ok(P1Played::Cover(CoverOracle::from_elements(
                spec.space.clone(),
                CoverClass::O,
                "whole",
                vec![OpenDesc::whole()],
            )?))
        });
        let spec = cover_spec(x.clone(), CoverClass::O, Selection::Single, 4);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        assert!(t.aborted.is_none());
        let report =
            judge(&x, &t, &x.batteries.point_challenges(), Target::Cover { class: CoverClass::O })
                .unwrap();
        assert!(report.win);
    }

    #[test]
    fn cofinal_prefixes_win_the_omega_game_on_discrete_nat() {
        let x = space("discrete_n");
        let sigma = markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::Omega);
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Single, 32);
        let t = run_game(&spec, &box_cover_source(CoverClass::Omega, 1), &sigma).unwrap();
        assert!(t.aborted.is_none());
        let battery = x.batteries.finite_set_challenges();
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::Omega }).unwrap();
        assert!(report.win, "every battery set has max < 32");
    }

    #[test]
    fn implication_derived_family_feeds_a_winning_selector() {
        let x = space("discrete_n");
        let declared = WitnessFamily::declared(&x).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .expect("declared point family");
        let derived = crate::witnesses::implication_chain(points).unwrap();
        assert_eq!(derived.kind, WitnessKind::NearlyHemicompact);
        let sigma = markov_from_cofinality(&derived, CoverClass::K);
        let spec = cover_spec(x.clone(), CoverClass::K, Selection::Single, 20);
        let t = run_game(&spec, &box_cover_source(CoverClass::K, 1), &sigma).unwrap();
        assert!(t.aborted.is_none());
        let battery = x.batteries.compact_challenges();
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win, "battery compacts reach point 16, horizon 20 absorbs them");
    }

    // -- markov_falsifier ----------------------------------------------------

    #[test]
    fn falsifier_defeats_a_selector_anchored_far_away() {
        let x = space("real_line");
        let sigma = markov_from_cofinality(&symmetric_compacts(x.clone(), 1000), CoverClass::K);
        let bad = Challenge::compact(CompactDesc::closed_int(2000, 2001));
        let xs = vec![Point::rat_int(2000); 16];
        let xspace = x.clone();
        let moves = markov_falsifier(&sigma, &bad, &xs, |_x, _n| {
            CoverOracle::from_stream(
                xspace.clone(),
                CoverClass::K,
                "around-1000",
                |i| {
                    let r = i as i64 + 1;
                    Ok(Some(OpenDesc::interval(Q::from_int(1000 - r), Q::from_int(1000 + r))))
                },
                Some(64),
            )
        })
        .unwrap();
        assert_eq!(moves.len(), 16);
        let spec = cover_spec(x.clone(), CoverClass::K, Selection::Single, 16);
        let p1 = StrategyHandle::p1_scripted("falsifying-covers", moves);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        assert!(t.aborted.is_none());
        let report =
            judge(&x, &t, &[bad], Target::Cover { class: CoverClass::K }).unwrap();
        assert!(!report.win, "the anchored selector never reaches [2000,2001]");
        assert!(report.verdicts[0].covered_at.is_none());
    }

    #[test]
    fn falsifier_reports_impossibility_against_whole_space_selections() {
        let x = space("real_line");
        let sigma = StrategyHandle::p2_markov("whole-picker", Selection::Single, |cur, _n| {
            let c = match cur {
                P1Played::Cover(c) => c.clone(),
                _ => unreachable!(),
            };
            let _ = c.element(0)?;
            Ok(P2Choice::Indices(vec![0]))
        });
        let bad = Challenge::compact(CompactDesc::closed_int(7, 8));
        let xs = vec![Point::rat_int(7)];
        let xspace = x.clone();
        let err = markov_falsifier(&sigma, &bad, &xs, |_x, _n| {
            CoverOracle::from_elements(
                xspace.clone(),
                CoverClass::K,
                "whole-first",
                vec![OpenDesc::whole(), OpenDesc::interval(Q::from_int(0), Q::from_int(1))],
            )
        });
        match err {
            Err(e) => assert!(e.to_string().contains("fails to exclude")),
            Ok(_) => panic!("whole-space selections cannot be falsified"),
        }
    }

    #[test]
    fn falsifier_exhibits_the_unreached_singleton_on_discrete_nat() {
        let x = space("discrete_n");
        let sigma = markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::Omega);
        let bad = Challenge::finite_set(vec![Point::nat(17)]);
        let xs = vec![Point::nat(17); 16];
        let xspace = x.clone();
        let moves = markov_falsifier(&sigma, &bad, &xs, |_x, _n| {
            CoverOracle::from_stream(
                xspace.clone(),
                CoverClass::Omega,
                "low-boxes",
                |i| Ok(Some(nat_box(i as u64))),
                Some(17),
            )
        })
        .unwrap();
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Single, 16);
        let t = run_game(&spec, &StrategyHandle::p1_scripted("low-covers", moves), &sigma).unwrap();
        assert!(t.aborted.is_none());
        let report =
            judge(&x, &t, &[bad], Target::Cover { class: CoverClass::Omega }).unwrap();
        assert!(!report.win);
    }

    // -- galvin_defeating_cover ----------------------------------------------

    #[test]
    fn galvin_cover_dodges_a_table_lookup_choice_function() {
        let x = space("discrete_n");
        let battery = vec![
            Challenge::finite_set(vec![Point::nat(0), Point::nat(1)]),
            Challenge::finite_set(vec![Point::nat(2)]),
            Challenge::finite_set(vec![Point::nat(3), Point::nat(4)]),
        ];
        let table: Vec<(Challenge, OpenDesc)> = vec![
            (battery[0].clone(), nat_box(1)),
            (battery[1].clone(), OpenDesc::union(vec![
                OpenDesc::singleton(Point::nat(2)),
                OpenDesc::singleton(Point::nat(7)),
            ])),
            (battery[2].clone(), nat_box(4)),
        ];
        // A choice function defined by lookup over covers it has seen
        // before; this freshly assembled cover is not among them, so the
        // default element is returned — and it lies outside the cover.
        let phi = |elems: &[OpenDesc]| -> Result<OpenDesc> {
            assert_eq!(elems.len(), 3);
            Ok(OpenDesc::singleton(Point::nat(9)))
        };
        let c = galvin_defeating_cover(x, CoverClass::Omega, phi, &battery, &table).unwrap();
        assert_eq!(c.class, CoverClass::Omega);
        assert!(c.element(2).is_ok());
        assert!(c.element(3).is_err());
    }

    #[test]
    fn galvin_rejects_a_choice_function_with_full_range() {
        let x = space("discrete_n");
        let battery = vec![Challenge::finite_set(vec![Point::nat(0)])];
        let table = vec![(battery[0].clone(), nat_box(0))];
        let err = galvin_defeating_cover(
            x,
            CoverClass::Omega,
            |elems| Ok(elems[0].clone()),
            &battery,
            &table,
        );
        match err {
            Err(e) => assert!(e.to_string().contains("no defeating cover")),
            Ok(_) => panic!("identity-range choice functions admit no defeating cover"),
        }
    }

    #[test]
    fn galvin_builds_ten_shifted_intervals_against_a_constant_choice() {
        let x = space("real_line");
        let battery: Vec<Challenge> =
            (0..10).map(|j| Challenge::point(Point::rat_int(j))).collect();
        let table: Vec<(Challenge, OpenDesc)> = (0..10)
            .map(|j| {
                (
                    battery[j as usize].clone(),
                    OpenDesc::interval(
                        Q::from_int(j) - Q::frac(1, 4),
                        Q::from_int(j) + Q::frac(1, 4),
                    ),
                )
            })
            .collect();
        let c = galvin_defeating_cover(
            x,
            CoverClass::O,
            |_| Ok(OpenDesc::interval(Q::from_int(100), Q::from_int(101))),
            &battery,
            &table,
        )
        .unwrap();
        assert!(c.element(9).is_ok());
        assert!(c.element(10).is_err());
    }

    // -- product_k_rothberger --------------------------------------------------

    fn product_model(x: &Rc<SpaceModel>, y: &Rc<SpaceModel>) -> Rc<SpaceModel> {
        SpaceModel::new(
            &format!("{}*{}", x.id, y.id),
            SpaceKind::Product(vec![x.clone(), y.clone()]),
            x.flags.clone(),
            Batteries::default(),
            Vec::new(),
        )
    }

    /// Rectangle covers on X × OnePoint whose X-sides replay the
    /// symmetric-interval stream.
    fn line_times_point_source(class: CoverClass) -> StrategyHandle {
        StrategyHandle::p1_source("rects-over-point", move |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                class,
                "rects-over-point",
                move |i| {
                    let r = i as i64 + 1;
                    Ok(Some(OpenDesc::rect(vec![
                        OpenDesc::interval(Q::from_int(-r), Q::from_int(r)),
                        OpenDesc::whole(),
                    ])))
                },
                Some(64),
            )?))
        })
    }

    fn one_point_family() -> WitnessFamily {
        let y = space("one_point");
        WitnessFamily::new(WitnessKind::NearlyHemicompact, y, "pt", |_| {
            Ok(Challenge::compact(CompactDesc::points(vec![Point::nat(0)])))
        })
    }

    #[test]
    fn rothberger_product_over_one_point_projects_to_the_factor_play() {
        let x = space("real_line");
        let y = space("one_point");
        let sx = markov_from_cofinality(&symmetric_compacts(x.clone(), 0), CoverClass::K);
        let sy = markov_from_cofinality(&one_point_family(), CoverClass::K);
        let composed = product_k_rothberger(&sx, &sy);
        let pspec = cover_spec(product_model(&x, &y), CoverClass::K, Selection::Single, 8);
        let pt = run_game(&pspec, &line_times_point_source(CoverClass::K), &composed).unwrap();
        assert!(pt.aborted.is_none(), "{:?}", pt.aborted);

        let fspec = cover_spec(x.clone(), CoverClass::K, Selection::Single, 8);
        let ft = run_game(&fspec, &line_cover_source(CoverClass::K, 1), &sx).unwrap();
        assert!(ft.aborted.is_none());
        assert_eq!(pt.rounds.len(), ft.rounds.len());
        for (pr, fr) in pt.rounds.iter().zip(&ft.rounds) {
            assert_eq!(pr.p2, fr.p2, "round {} selections diverge", pr.n);
        }
        // Coverage verdicts coincide factor-by-factor: the X-side of the
        // round-n rectangle is exactly the factor play's selection.
        let battery = x.batteries.compact_challenges();
        let freport = judge(&x, &ft, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(freport.win);
    }

    #[test]
    fn rothberger_product_covers_rectangles_and_keeps_its_books() {
        let x = space("real_line");
        let sx = markov_from_cofinality(&symmetric_compacts(x.clone(), 0), CoverClass::K);
        let sink = audit_sink();
        let composed = product_k_rothberger_with_audit(&sx, &sx, Some(sink.clone()));
        let sq = space("real_line_sq");
        let spec = cover_spec(sq.clone(), CoverClass::K, Selection::Single, 8);
        let t = run_game(&spec, &line_cover_source(CoverClass::K, 2), &composed).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);

        let battery: Vec<Challenge> = (1..=4)
            .flat_map(|a| {
                (1..=4).map(move |b| {
                    Challenge::compact(CompactDesc::product(vec![
                        CompactDesc::closed_int(-a, a),
                        CompactDesc::closed_int(-b, b),
                    ]))
                })
            })
            .collect();
        let report = judge(&sq, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win, "rectangles inside [-4,4]^2 are covered by round 4");

        let pairing = PairingFamily::new(RangeConstraint::full_range());
        let rows = sink.borrow();
        assert_eq!(rows.len(), 8);
        for (n, row) in rows.iter().enumerate() {
            let (j, k) = pairing.beta_inverse(n as u64).unwrap();
            assert_eq!(row["j"].as_u64().unwrap(), j);
            assert_eq!(row["k"].as_u64().unwrap(), k);
            for r in row["s_j"].as_array().unwrap() {
                assert!(
                    r.as_u64().unwrap() < n.max(1) as u64,
                    "round {n}: row sequence stays below the round"
                );
            }
            let expect = Challenge::compact(CompactDesc::closed_int(-(n as i64), n as i64));
            assert_eq!(row["k_n"].as_str().unwrap(), expect.key());
        }
    }

    // -- product_k_menger -------------------------------------------------------

    #[test]
    fn menger_product_over_one_point_projects_to_the_factor_play() {
        let x = space("discrete_n");
        let y = space("one_point");
        let sx = finite_selection(&markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::K));
        let sy = finite_selection(&markov_from_cofinality(&one_point_family(), CoverClass::K));
        let composed = product_k_menger(&sx, &sy);
        let psource = StrategyHandle::p1_source("boxes-over-point", |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                CoverClass::K,
                "boxes-over-point",
                |i| Ok(Some(OpenDesc::rect(vec![nat_box(i as u64), OpenDesc::whole()]))),
                Some(64),
            )?))
        });
        let pspec = cover_spec(product_model(&x, &y), CoverClass::K, Selection::Finite, 6);
        let pt = run_game(&pspec, &psource, &composed).unwrap();
        assert!(pt.aborted.is_none(), "{:?}", pt.aborted);

        let fspec = cover_spec(x.clone(), CoverClass::K, Selection::Finite, 6);
        let ft = run_game(&fspec, &box_cover_source(CoverClass::K, 1), &sx).unwrap();
        assert!(ft.aborted.is_none());
        for (pr, fr) in pt.rounds.iter().zip(&ft.rounds) {
            assert_eq!(pr.p2, fr.p2, "round {} selections diverge", pr.n);
        }
    }

    #[test]
    fn menger_product_covers_finite_rectangles_on_discrete_squares() {
        let x = space("discrete_n");
        let sx = finite_selection(&markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::K));
        let sink = audit_sink();
        let composed = product_k_menger_with_audit(&sx, &sx, Some(sink.clone()));
        let sq = space("discrete_sq");
        let spec = cover_spec(sq.clone(), CoverClass::K, Selection::Finite, 6);
        let t = run_game(&spec, &box_cover_source(CoverClass::K, 2), &composed).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);

        let battery: Vec<Challenge> = (0..=2)
            .flat_map(|a| {
                (0..=2u64).map(move |b| {
                    Challenge::compact(CompactDesc::product(vec![
                        CompactDesc::points((0..=a).map(Point::nat).collect()),
                        CompactDesc::points((0..=b).map(Point::nat).collect()),
                    ]))
                })
            })
            .collect();
        let report = judge(&sq, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win);

        // Engine legality doubles as the per-round finiteness check; the
        // audit rows confirm every pick set is nonempty and sorted.
        for row in sink.borrow().iter() {
            let picks = row["picks"].as_array().unwrap();
            assert!(!picks.is_empty());
            let vals: Vec<u64> = picks.iter().map(|p| p.as_u64().unwrap()).collect();
            assert!(vals.windows(2).all(|w| w[0] < w[1]));
        }
    }

    // -- Markov product strategies ----------------------------------------------

    #[test]
    fn markov_rothberger_product_pairs_the_factor_witnesses() {
        let x = space("real_line");
        let sq = space("real_line_sq");
        let wx = symmetric_compacts(x.clone(), 0);
        let sigma = markov_product_k_rothberger(sq.clone(), &wx, &wx).unwrap();
        assert_eq!(sigma.strength, Strength::Markov);
        let spec = cover_spec(sq.clone(), CoverClass::K, Selection::Single, 32);
        let t = run_game(&spec, &line_cover_source(CoverClass::K, 2), &sigma).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);
        let battery = sq.batteries.compact_challenges();
        let report = judge(&sq, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win, "grid pairs reach [-3,3]^2 by index 24");
    }

    #[test]
    fn markov_menger_product_follows_the_pairing_grid() {
        let x = space("discrete_n");
        let sx = finite_selection(&markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::K));
        let sink = audit_sink();
        let sigma = markov_product_k_menger_with_audit(&sx, &sx, Some(sink.clone()));
        assert_eq!(sigma.strength, Strength::Markov);
        let sq = space("discrete_sq");
        let spec = cover_spec(sq.clone(), CoverClass::K, Selection::Finite, 32);
        let t = run_game(&spec, &box_cover_source(CoverClass::K, 2), &sigma).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);

        // Round 27 = row 2, column 2 of the prime-power grid: both factor
        // strategies see index 2, so the response rectangle reaches
        // {0..2} x {0..2}.
        let battery = vec![Challenge::compact(CompactDesc::product(vec![
            CompactDesc::points((0..=2).map(Point::nat).collect()),
            CompactDesc::points((0..=2).map(Point::nat).collect()),
        ]))];
        let report = judge(&sq, &t, &battery, Target::Cover { class: CoverClass::K }).unwrap();
        assert!(report.win);
        let covered = report.verdicts[0].covered_at.as_ref().unwrap();
        assert!(covered.round <= 27);

        let pairing = PairingFamily::new(RangeConstraint::trivial());
        for row in sink.borrow().iter() {
            let n = row["n"].as_u64().unwrap();
            let (j, k) = pairing.beta_inverse(n).unwrap();
            assert_eq!((row["j"].as_u64().unwrap(), row["k"].as_u64().unwrap()), (j, k));
        }
    }

    #[test]
    fn markov_menger_product_is_a_function_of_the_current_cover_alone() {
        let x = space("discrete_n");
        let sx = finite_selection(&markov_from_cofinality(&nat_prefixes(x.clone()), CoverClass::K));
        let sigma = markov_product_k_menger(&sx, &sx);
        let sq = space("discrete_sq");
        let spec = cover_spec(sq.clone(), CoverClass::K, Selection::Finite, 8);
        let cover = CoverOracle::from_stream(
            sq.clone(),
            CoverClass::K,
            "boxes",
            |i| Ok(Some(OpenDesc::rect(vec![nat_box(i as u64), nat_box(i as u64)]))),
            Some(64),
        )
        .unwrap();
        let cur = P1Played::Cover(cover);
        let hist_a: Vec<P1Played> = Vec::new();
        let hist_b = vec![cur.clone(), cur.clone()];
        let a = consult_p2(&sigma, &spec, &hist_a, &cur, 4).unwrap();
        let b = consult_p2(&sigma, &spec, &hist_b, &cur, 4).unwrap();
        assert_eq!(a, b, "the Markov window ignores history");
    }

    // -- unfolding ----------------------------------------------------------------

    #[test]
    fn unfolded_omega_strategy_covers_points_and_keeps_block_arithmetic() {
        let x = space("discrete_n");
        let sigma0 = StrategyHandle::p2_markov("first-element", Selection::Single, |_cur, _n| {
            Ok(P2Choice::Indices(vec![0]))
        });
        let xr = x.clone();
        let g = GalvinExtractor {
            cores: Rc::new((0..12).map(|n| vec![Point::nat(n)]).collect()),
            realize: Rc::new(move |_block, v| {
                CoverOracle::from_elements(
                    xr.clone(),
                    CoverClass::Omega,
                    "realized",
                    vec![v.clone(), OpenDesc::cofinite(Vec::new())],
                )
            }),
        };
        let sink = audit_sink();
        let sigma = unfold_omega_to_open_rothberger_with_audit(&sigma0, &g, Some(sink.clone()));
        let p1 = StrategyHandle::p1_source("singletons", |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                CoverClass::O,
                "singletons",
                |i| Ok(Some(OpenDesc::singleton(Point::nat(i as u64)))),
                Some(64),
            )?))
        });
        let spec = cover_spec(x.clone(), CoverClass::O, Selection::Single, 8);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);
        let battery: Vec<Challenge> = (0..8).map(|v| Challenge::point(Point::nat(v))).collect();
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::O }).unwrap();
        assert!(report.win);

        // One block per round here (unit cores), so the cumulative list
        // grows by exactly one each round.
        let rows = sink.borrow();
        assert_eq!(rows.len(), 8);
        for (i, row) in rows.iter().enumerate() {
            let m = row["m"].as_array().unwrap();
            assert_eq!(m.len(), i + 2);
            let last = m[m.len() - 1].as_u64().unwrap();
            let prev = m[m.len() - 2].as_u64().unwrap();
            assert_eq!(last - prev, row["core"].as_u64().unwrap());
        }
    }

    #[test]
    fn unfolding_rejects_an_extractor_that_cannot_realize_the_block_union() {
        let x = space("discrete_n");
        let sigma0 = StrategyHandle::p2_markov("second-element", Selection::Single, |_cur, _n| {
            Ok(P2Choice::Indices(vec![1]))
        });
        let xr = x.clone();
        let g = GalvinExtractor {
            cores: Rc::new(vec![vec![Point::nat(0)], vec![Point::nat(1)]]),
            realize: Rc::new(move |_block, v| {
                CoverOracle::from_elements(
                    xr.clone(),
                    CoverClass::Omega,
                    "realized",
                    vec![v.clone(), OpenDesc::cofinite(Vec::new())],
                )
            }),
        };
        let sigma = unfold_omega_to_open_rothberger(&sigma0, &g);
        let p1 = StrategyHandle::p1_source("singletons", |spec, _n| {
            Ok(P1Played::Cover(CoverOracle::from_stream(
                spec.space.clone(),
                CoverClass::O,
                "singletons",
                |i| Ok(Some(OpenDesc::singleton(Point::nat(i as u64)))),
                Some(64),
            )?))
        });
        let spec = cover_spec(x.clone(), CoverClass::O, Selection::Single, 4);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        let a = t.aborted.expect("the mismatch aborts the game");
        assert_eq!(a.offender, Owner::P2);
        assert!(a.reason.contains("does not realize"));
    }

    #[test]
    fn unfolding_on_one_point_space_wins_in_one_block() {
        let x = space("one_point");
        let sigma0 = StrategyHandle::p2_markov("first-element", Selection::Single, |_cur, _n| {
            Ok(P2Choice::Indices(vec![0]))
        });
        let g = GalvinExtractor {
            cores: Rc::new(vec![vec![Point::nat(0)]]),
            realize: Rc::new(|_, _| unreachable!("a single block needs no realization")),
        };
        let sigma = unfold_omega_to_open_rothberger(&sigma0, &g);
        let p1 = StrategyHandle::p1_source("whole", |spec, _| {
            Ok(P1Played::Cover(CoverOracle::from_elements(
                spec.space.clone(),
                CoverClass::O,
                "whole",
                vec![OpenDesc::whole()],
            )?))
        });
        let spec = cover_spec(x.clone(), CoverClass::O, Selection::Single, 1);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        assert!(t.aborted.is_none());
        let report =
            judge(&x, &t, &x.batteries.point_challenges(), Target::Cover { class: CoverClass::O })
                .unwrap();
        assert!(report.win);
    }

    #[test]
    fn unfold_state_arithmetic_rejects_tampering() {
        let mut st = UnfoldState::new();
        st.push_block(vec![Point::nat(0), Point::nat(1)]).unwrap();
        st.push_block(vec![Point::nat(2)]).unwrap();
        assert_eq!(st.m, vec![0, 2, 3]);
        st.m[2] = 5;
        assert!(st.check().is_err());
    }

    // -- powers_to_omega_rothberger ---------------------------------------------

    fn diag_probe(m: usize) -> StrategyHandle {
        scan_absorbing_strategy(
            &format!("diag-probe-{m}"),
            Rc::new(move |k| {
                Ok(Challenge::compact(CompactDesc::product(vec![
                    CompactDesc::points(
                        (0..=(k as u64)).map(Point::nat).collect(),
                    );
                    m + 1
                ])))
            }),
        )
    }

    #[test]
    fn powers_row_zero_reproduces_the_base_strategy_verbatim() {
        let x = space("discrete_n");
        let sigmas: Rc<dyn Fn(usize) -> Result<StrategyHandle>> =
            Rc::new(|m| Ok(diag_probe(m)));
        let sigma = powers_to_omega_rothberger(sigmas);
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Single, 16);
        let t = run_game(&spec, &box_cover_source(CoverClass::Omega, 1), &sigma).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);

        // Row 0 sits at rounds 0, 1, 6, 10, 12, 15, ...; at its k-th entry
        // the power-1 strategy probes {0..k}, exactly what the base
        // strategy would select on the un-lifted cover.
        let pairing = PairingFamily::new(RangeConstraint::trivial());
        for (k, r) in t.rounds.iter().filter(|r| {
            pairing.beta_inverse(r.n as u64).unwrap().0 == 0
        }).enumerate() {
            match &r.p2 {
                P2Record::Indices { sel } => assert_eq!(sel, &vec![k]),
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn powers_strategy_covers_small_finite_sets_through_row_zero() {
        let x = space("discrete_n");
        let sigmas: Rc<dyn Fn(usize) -> Result<StrategyHandle>> =
            Rc::new(|m| Ok(diag_probe(m)));
        let sigma = powers_to_omega_rothberger(sigmas);
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Single, 16);
        let t = run_game(&spec, &box_cover_source(CoverClass::Omega, 1), &sigma).unwrap();
        assert!(t.aborted.is_none());
        let battery: Vec<Challenge> = vec![
            Challenge::finite_set(vec![Point::nat(0), Point::nat(2), Point::nat(4)]),
            Challenge::finite_set(vec![Point::nat(1), Point::nat(3)]),
            Challenge::finite_set(vec![Point::nat(0), Point::nat(1), Point::nat(2)]),
        ];
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::Omega }).unwrap();
        assert!(report.win, "round 12 selects the {{0..4}} box");
    }

    // -- markov_omega_menger_from_src ---------------------------------------------

    #[test]
    fn omega_menger_grid_covers_the_finite_set_battery_on_the_line() {
        let x = space("real_line");
        let sigma = markov_omega_menger_from_src(
            "interval-grid",
            Rc::new(|j, l| {
                Ok(Challenge::compact(CompactDesc::product(vec![
                    CompactDesc::closed_int(-(l as i64), l as i64);
                    j as usize + 1
                ])))
            }),
        );
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Finite, 8);
        let t = run_game(&spec, &line_cover_source(CoverClass::Omega, 1), &sigma).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);
        let battery = x.batteries.finite_set_challenges();
        let report = judge(&x, &t, &battery, Target::Cover { class: CoverClass::Omega }).unwrap();
        assert!(report.win, "battery sets live inside [-5,5], reached at round 5");
    }

    #[test]
    fn omega_menger_grid_wins_on_the_one_point_space() {
        let x = space("one_point");
        let sigma = markov_omega_menger_from_src(
            "point-grid",
            Rc::new(|j, _l| {
                Ok(Challenge::compact(CompactDesc::product(vec![
                    CompactDesc::points(vec![Point::nat(0)]);
                    j as usize + 1
                ])))
            }),
        );
        let p1 = StrategyHandle::p1_source("whole", |spec, _| {
            Ok(P1Played::Cover(CoverOracle::from_elements(
                spec.space.clone(),
                CoverClass::Omega,
                "whole",
                vec![OpenDesc::whole()],
            )?))
        });
        let spec = cover_spec(x.clone(), CoverClass::Omega, Selection::Finite, 4);
        let t = run_game(&spec, &p1, &sigma).unwrap();
        assert!(t.aborted.is_none());
        let report = judge(
            &x,
            &t,
            &x.batteries.finite_set_challenges(),
            Target::Cover { class: CoverClass::Omega },
        )
        .unwrap();
        assert!(report.win);
    }

    // -- witness conversions ---------------------------------------------------

    #[test]
    fn point_witnesses_convert_to_cumulative_prefixes_on_discrete_nat() {
        let x = space("discrete_n");
        let declared = WitnessFamily::declared(&x).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        let sets = topctble_witness_conversions(points).unwrap();
        assert_eq!(sets.kind, WitnessKind::NearlyHemicompact);
        let expect = Challenge::compact(CompactDesc::points(
            (0..=3).map(Point::nat).collect(),
        ));
        assert_eq!(sets.member(3).unwrap().key(), expect.key());
    }

    #[test]
    fn right_order_integer_witnesses_convert_for_the_rational_battery() {
        let x = space("right_order");
        let declared = WitnessFamily::declared(&x).unwrap();
        let ints = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        let sets = topctble_witness_conversions(ints).unwrap();
        // Saturation in the right-order model reaches everything at or
        // above the set's minimum, so rationals like 1/2 are witnessed.
        let f6 = sets.member(6).unwrap();
        assert!(sat_contains(&x, &f6, &Point::rat(Q::frac(1, 2))).unwrap());
        assert!(sat_contains(&x, &f6, &Point::rat_int(-3)).unwrap());
        assert!(!sat_contains(&x, &sets.member(1).unwrap(), &Point::rat_int(-3)).unwrap());
    }

    #[test]
    fn witness_conversion_round_trip_preserves_battery_validity() {
        let x = space("discrete_n");
        let declared = WitnessFamily::declared(&x).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        let sets = topctble_witness_conversions(points).unwrap();
        let back = topctble_witness_conversions(&sets).unwrap();
        assert_eq!(back.kind, WitnessKind::TopologicallyCountable);
        assert_eq!(back.member(5).unwrap().key(), Challenge::point(Point::nat(5)).key());
        assert!(crate::witnesses::validate_family(&back, 64).unwrap().is_verified());
    }

    // -- product_witnesses ---------------------------------------------------

    #[test]
    fn point_witnesses_pair_into_the_product_grid() {
        let x = space("discrete_n");
        let sq = space("discrete_sq");
        let declared = WitnessFamily::declared(&x).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        let grid = product_witnesses(sq, points, points).unwrap();
        let i = crate::combinatorics::cantor_pair(1, 2);
        let expect = Challenge::point(Point::tuple(vec![Point::nat(1), Point::nat(2)]));
        assert_eq!(grid.member(i).unwrap().key(), expect.key());
    }

    #[test]
    fn interval_witnesses_pair_and_validate_on_the_square() {
        let x = space("real_line");
        let sq = space("real_line_sq");
        let wx = symmetric_compacts(x.clone(), 0);
        let grid = product_witnesses(sq.clone(), &wx, &wx).unwrap();
        let member = grid.member(crate::combinatorics::cantor_pair(2, 3)).unwrap();
        let expect = Challenge::compact(CompactDesc::product(vec![
            CompactDesc::closed_int(-2, 2),
            CompactDesc::closed_int(-3, 3),
        ]));
        assert_eq!(member.key(), expect.key());
        for b in sq.batteries.compact_challenges() {
            let mut witnessed = false;
            for i in 0..=64 {
                if challenge_subset(&sq, &b, &grid.member(i).unwrap()).unwrap() {
                    witnessed = true;
                    break;
                }
            }
            assert!(witnessed, "{} has a grid witness", b.key());
        }
    }

    #[test]
    fn product_witnesses_reject_mixed_kinds_and_foreign_factors() {
        let x = space("real_line");
        let sq = space("real_line_sq");
        let wx = symmetric_compacts(x.clone(), 0);
        let declared = WitnessFamily::declared(&space("discrete_n")).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        assert!(product_witnesses(sq.clone(), &wx, points).is_err());
        let wrong = symmetric_compacts(space("rational_line"), 0);
        assert!(product_witnesses(sq, &wrong, &wrong).is_err());
    }

    #[test]
    fn one_point_factor_reindexes_the_other_family() {
        let x = space("discrete_n");
        let y = space("one_point");
        let prod = SpaceModel::new(
            "discrete_n*one_point",
            SpaceKind::Product(vec![x.clone(), y.clone()]),
            x.flags.clone(),
            Batteries {
                points: (0..4)
                    .map(|j| Point::tuple(vec![Point::nat(j), Point::nat(0)]))
                    .collect(),
                ..Batteries::default()
            },
            Vec::new(),
        );
        let declared = WitnessFamily::declared(&x).unwrap();
        let points = declared
            .iter()
            .find(|w| w.kind == WitnessKind::TopologicallyCountable)
            .unwrap();
        let wy = WitnessFamily::new(
            WitnessKind::TopologicallyCountable,
            y,
            "pt",
            |_| Ok(Challenge::point(Point::nat(0))),
        );
        let grid = product_witnesses(prod, points, &wy).unwrap();
        let i = crate::combinatorics::cantor_pair(3, 7);
        let expect = Challenge::point(Point::tuple(vec![Point::nat(3), Point::nat(0)]));
        assert_eq!(grid.member(i).unwrap().key(), expect.key());
    }

    // -- baire_adversary -------------------------------------------------------

    fn baire_spec(horizon: usize) -> GameSpec {
        GameSpec {
            selection: Selection::Finite,
            p1: P1Kind::Cover { class: CoverClass::O },
            target: Target::AvoidCover,
            space: space("baire"),
            horizon,
            seed: 0,
        }
    }

    #[test]
    fn escape_dodges_the_constant_zero_cylinder() {
        let (p1, escape) = baire_adversary(4);
        let p2 = StrategyHandle::p2_markov("always-zero", Selection::Finite, |_cur, _n| {
            Ok(P2Choice::Indices(vec![0]))
        });
        let spec = baire_spec(8);
        let t = run_game(&spec, &p1, &p2).unwrap();
        assert!(t.aborted.is_none());
        let f = escape(&t).unwrap();
        assert_eq!(f[0], 1, "the selected cylinder [0] bans digit 0 first");
        assert!(f[1..].iter().all(|&d| d == 0));
    }

    #[test]
    fn escape_prefix_lies_outside_every_selected_cylinder() {
        for seed in [3u64, 17, 40] {
            let (p1, escape) = baire_adversary(4);
            let p2 = StrategyHandle::p2_markov("seeded-picks", Selection::Finite, move |_cur, n| {
                let base = seed.wrapping_mul(2654435761).wrapping_add(n as u64 * 97);
                let sel: Vec<usize> =
                    (0..4).map(|i| ((base >> (i * 7)) % 40) as usize).collect();
                Ok(P2Choice::Indices(sel))
            });
            let spec = baire_spec(16);
            let t = run_game(&spec, &p1, &p2).unwrap();
            assert!(t.aborted.is_none());
            let f = escape(&t).unwrap();
            // The escape point is f padded with zeros; no selected word may
            // be a prefix of it.
            for r in &t.rounds {
                for w in round_words(r).unwrap() {
                    let point: Vec<u64> = f
                        .iter()
                        .copied()
                        .chain(std::iter::repeat(0))
                        .take(w.len().max(f.len()))
                        .collect();
                    assert_ne!(&point[..w.len()], &w[..], "seed {seed}: cylinder not escaped");
                }
            }
        }
    }

    #[test]
    fn escape_handles_empty_selections_and_rejects_unbounded_ones() {
        let (p1, escape) = baire_adversary(2);
        let quiet = StrategyHandle::p2_markov("quiet", Selection::Finite, |_cur, _n| {
            Ok(P2Choice::Indices(Vec::new()))
        });
        let spec = baire_spec(6);
        let t = run_game(&spec, &p1, &quiet).unwrap();
        let f = escape(&t).unwrap();
        assert!(f.iter().all(|&d| d == 0));

        let greedy = StrategyHandle::p2_markov("greedy", Selection::Finite, |_cur, _n| {
            Ok(P2Choice::Indices((0..3).collect()))
        });
        let t = run_game(&spec, &p1, &greedy).unwrap();
        assert!(escape(&t).is_err(), "three picks exceed the declared bound of two");
    }

    // -- the compact-open and finite-open duels ---------------------------------

    /// Responds to a compact move with the whole line side plus the
    /// Fortissimo side minus two fresh named points per round.
    fn cofinite_responder() -> StrategyHandle {
        StrategyHandle::new(
            Owner::P2,
            Strength::Markov,
            Selection::Single,
            "cofinite-responder",
            |_spec| {
                Brain::P2(P2Brain::Markov(Box::new(|_cur, n| {
                    let excluded =
                        vec![Point::nat(2 * n as u64), Point::nat(2 * n as u64 + 1)];
                    Ok(P2Choice::Open(OpenDesc::union(vec![
                        OpenDesc::inj(0, OpenDesc::whole()),
                        OpenDesc::inj(1, OpenDesc::cofinite(excluded)),
                    ])))
                })))
            },
        )
    }

    #[test]
    fn compact_open_duel_opens_with_the_unit_interval_and_infinity() {
        let x = space("chq_space");
        let p1 = chq_p1_compact_open();
        let spec = GameSpec {
            selection: Selection::Single,
            p1: P1Kind::CompactMove,
            target: Target::AvoidCover,
            space: x,
            horizon: 1,
            seed: 0,
        };
        let t = run_dual_game(&spec, &p1, &cofinite_responder()).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);
        let expect = CompactDesc::Union {
            parts: vec![
                CompactDesc::inj(0, CompactDesc::closed(Q::zero(), Q::one())),
                CompactDesc::inj(1, CompactDesc::points(vec![Point::Infty])),
            ],
        };
        match &t.rounds[0].p1 {
            P1Record::Compact { k } => assert_eq!(k, &expect),
            _ => unreachable!(),
        }
    }

    #[test]
    fn compact_open_bookkeeping_adds_the_triangular_prefix_of_named_points() {
        let x = space("chq_space");
        let p1 = chq_p1_compact_open();
        let spec = GameSpec {
            selection: Selection::Single,
            p1: P1Kind::CompactMove,
            target: Target::AvoidCover,
            space: x.clone(),
            horizon: 4,
            seed: 0,
        };
        let t = run_dual_game(&spec, &p1, &cofinite_responder()).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);
        // Round j's response excludes exactly {2j, 2j+1} on the Fortissimo
        // side, so the round-2 compact carries the four points named by
        // rounds 0 and 1.
        let named: Vec<Point> =
            (0..4).map(|v| Point::inj(1, Point::nat(v))).collect();
        match &t.rounds[2].p1 {
            P1Record::Compact { k } => match k {
                CompactDesc::Union { parts } => {
                    assert_eq!(parts.len(), 2);
                    let pts = parts[1].as_finite_points().unwrap();
                    assert_eq!(pts, named);
                }
                _ => panic!("round-2 move keeps the base-plus-names shape"),
            },
            _ => unreachable!(),
        }
        // Each round's compact is legal and contains the previous round's
        // named points (K_0 ⊆ K_n monotonicity over the names).
        for r in &t.rounds {
            match &r.p1 {
                P1Record::Compact { k } => {
                    crate::topology::space::validate_compact(&x, k).unwrap()
                }
                _ => unreachable!(),
            }
        }
    }

    #[test]
    fn finite_open_duel_keeps_exact_measure_books_and_loses_coverage() {
        let x = space("chq_space");
        let p1 = StrategyHandle::p1_source("mixed-points", |_spec, n| {
            Ok(P1Played::FiniteSet(vec![
                Point::inj(0, Point::rat(Q::frac(1, n as i64 + 2))),
                Point::inj(0, Point::rat(Q::frac(n as i64 + 1, n as i64 + 2))),
                Point::inj(1, Point::nat(n as u64)),
            ]))
        });
        let spec = GameSpec {
            selection: Selection::Single,
            p1: P1Kind::FiniteSetMove,
            target: Target::AvoidCover,
            space: x.clone(),
            horizon: 16,
            seed: 0,
        };
        let t = run_dual_game(&spec, &p1, &chq_p2_finite_open()).unwrap();
        assert!(t.aborted.is_none(), "{:?}", t.aborted);

        let mut total = Q::zero();
        for r in &t.rounds {
            let u = match &r.p2 {
                crate::engine::P2Record::Open { u } => u,
                _ => unreachable!(),
            };
            let mut round_sum = Q::zero();
            for atom in &u.atoms {
                if let Atom::Inj { side: 0, part } = atom {
                    for a in &part.atoms {
                        if let Atom::Interval { lo, hi } = a {
                            round_sum = &round_sum + &(hi - lo);
                        }
                    }
                }
            }
            assert!(
                round_sum < Q::half_pow(r.n as u32 + 2),
                "round {} spends {:?}",
                r.n,
                round_sum
            );
            total = &total + &round_sum;
        }
        assert!(total < Q::frac(1, 2), "cumulative interval length stays below 1/2");

        let report = judge(&x, &t, &[], Target::AvoidCover).unwrap();
        assert!(report.win, "the tiny intervals cannot cover the unit interval");
        let escape = report.escape.expect("an uncovered rational is exhibited");
        match &escape {
            Point::Inj { side: 0, v } => {
                let q = v.as_rat().expect("a rational escape point");
                assert!(&Q::zero() <= q && q <= &Q::one());
            }
            _ => panic!("the gap lives on the line side"),
        }
        for r in &t.rounds {
            let u = match &r.p2 {
                crate::engine::P2Record::Open { u } => u,
                _ => unreachable!(),
            };
            assert!(!member(&x, &escape, u).unwrap(), "round {} covers the escape", r.n);
        }
    }

    // -- shared helpers -----------------------------------------------------------

    #[test]
    fn strength_and_windows_are_declared_as_built() {
        let x = space("real_line");
        let w = symmetric_compacts(x, 0);
        let sigma = markov_from_cofinality(&w, CoverClass::K);
        assert_eq!(sigma.owner, Owner::P2);
        assert_eq!(sigma.strength, Strength::Markov);
        assert_eq!(sigma.selection, Selection::Single);
        assert_eq!(finite_selection(&sigma).selection, Selection::Finite);
        let full = product_k_rothberger(&sigma, &sigma);
        assert_eq!(full.strength, Strength::Full);
    }

    #[test]
    fn rectangle_splitting_rejects_non_rectangular_elements() {
        assert!(rect_sides(&OpenDesc::whole()).is_ok());
        let r = OpenDesc::rect(vec![OpenDesc::whole(), OpenDesc::whole()]);
        assert!(rect_sides(&r).is_ok());
        let bad = OpenDesc::union(vec![r.clone(), r]);
        assert!(rect_sides(&bad).is_err());
        assert!(rect_sides(&OpenDesc::interval(Q::zero(), Q::one())).is_err());
    }
}
