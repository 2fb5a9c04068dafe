//! The space registry: a serializable document naming each space, its
//! structural kind, flags, challenge batteries, and witness declarations.
//!
//! Composite kinds (sums, products, powers) reference *earlier* entries by
//! id, so a registry document is a DAG presented in dependency order.  The
//! same document can be shipped as JSON (`registry/spaces.json`); parsing
//! and re-serializing a registry file is byte-stable.

use crate::error::Error;
use crate::rat::Q;
use crate::topology::desc::{CompactDesc, OpenDesc, Region};
use crate::topology::point::Point;
use crate::topology::space::{
    point_in_space, validate_compact, validate_open, Batteries, FamilyGen, SpaceFlags, SpaceKind,
    SpaceModel, WitnessKind, WitnessSpec,
};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::rc::Rc;

/// Structural kind of a registry entry.  Composite kinds name their factors
/// by the ids of earlier entries in the same document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum KindSpec {
    DiscreteNat,
    RationalLine,
    RealLine { lo: Option<Q>, hi: Option<Q> },
    Baire,
    Fortissimo,
    RightOrder,
    Sorgenfrey,
    OnePoint,
    Sum { left: String, right: String },
    Product { factors: Vec<String> },
    Power { base: String, arity: usize },
}

/// One registry entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpaceEntry {
    pub id: String,
    #[serde(flatten)]
    pub kind: KindSpec,
    #[serde(default)]
    pub flags: SpaceFlags,
    #[serde(default)]
    pub batteries: Batteries,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessSpec>,
}

/// A whole registry document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegistryDoc {
    pub version: u32,
    pub spaces: Vec<SpaceEntry>,
}

/// A loaded registry: the document plus the built space models, by id.
pub struct Registry {
    doc: RegistryDoc,
    by_id: BTreeMap<String, Rc<SpaceModel>>,
    order: Vec<String>,
}

impl Registry {
    /// Builds and validates every entry.  Composite entries resolve their
    /// factor ids against entries already built; every battery member is
    /// checked against the finished model.
    pub fn from_doc(doc: RegistryDoc) -> Result<Registry> {
        if doc.version != 1 {
            return Err(Error::unsupported(format!(
                "registry version {} (this build reads version 1)",
                doc.version
            )));
        }
        let mut by_id: BTreeMap<String, Rc<SpaceModel>> = BTreeMap::new();
        let mut order = Vec::new();
        for e in &doc.spaces {
            if by_id.contains_key(&e.id) {
                return Err(Error::pre(format!("duplicate space id `{}`", e.id)));
            }
            let resolve = |id: &str| {
                by_id.get(id).cloned().ok_or_else(|| {
                    Error::pre(format!(
                        "space `{}` references `{id}`, which is not defined earlier",
                        e.id
                    ))
                })
            };
            let kind = match &e.kind {
                KindSpec::DiscreteNat => SpaceKind::DiscreteNat,
                KindSpec::RationalLine => SpaceKind::RationalLine,
                KindSpec::RealLine { lo, hi } => {
                    if let (Some(a), Some(b)) = (lo, hi) {
                        if a >= b {
                            return Err(Error::pre(format!("space `{}`: empty ambient", e.id)));
                        }
                    }
                    SpaceKind::RealLine { lo: lo.clone(), hi: hi.clone() }
                }
                KindSpec::Baire => SpaceKind::Baire,
                KindSpec::Fortissimo => SpaceKind::Fortissimo,
                KindSpec::RightOrder => SpaceKind::RightOrder,
                KindSpec::Sorgenfrey => SpaceKind::Sorgenfrey,
                KindSpec::OnePoint => SpaceKind::OnePoint,
                KindSpec::Sum { left, right } => SpaceKind::Sum(resolve(left)?, resolve(right)?),
                KindSpec::Product { factors } => {
                    if factors.is_empty() {
                        return Err(Error::pre(format!("space `{}`: empty product", e.id)));
                    }
                    let fs: Result<Vec<_>> = factors.iter().map(|f| resolve(f)).collect();
                    SpaceKind::Product(fs?)
                }
                KindSpec::Power { base, arity } => {
                    if *arity == 0 {
                        return Err(Error::pre(format!("space `{}`: power of arity 0", e.id)));
                    }
                    SpaceKind::Power(resolve(base)?, *arity)
                }
            };
            let model =
                SpaceModel::new(&e.id, kind, e.flags, e.batteries.clone(), e.witnesses.clone());
            validate_entry(&model)?;
            by_id.insert(e.id.clone(), model);
            order.push(e.id.clone());
        }
        Ok(Registry { doc, by_id, order })
    }

    pub fn from_json(s: &str) -> Result<Registry> {
        let doc: RegistryDoc = serde_json::from_str(s)
            .map_err(|err| Error::pre(format!("registry parse error: {err}")))?;
        Registry::from_doc(doc)
    }

    /// Canonical serialized form (pretty JSON, trailing newline).  Parsing
    /// this output and serializing again reproduces it byte for byte.
    pub fn to_json(&self) -> String {
        let mut s =
            serde_json::to_string_pretty(&self.doc).expect("registry serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn get(&self, id: &str) -> Option<Rc<SpaceModel>> {
        self.by_id.get(id).cloned()
    }

    /// All space models, in document order.
    pub fn spaces(&self) -> Vec<Rc<SpaceModel>> {
        self.order.iter().map(|id| self.by_id[id].clone()).collect()
    }

    pub fn ids(&self) -> &[String] {
        &self.order
    }

    pub fn doc(&self) -> &RegistryDoc {
        &self.doc
    }
}

fn validate_entry(space: &SpaceModel) -> Result<()> {
    let fail = |what: String| Err(Error::pre(format!("space `{}`: {what}", space.id)));
    for p in &space.batteries.points {
        if !point_in_space(space, p) {
            return fail(format!("battery point {p:?} is not a point of the space"));
        }
    }
    for f in &space.batteries.finite_sets {
        for p in f {
            if !point_in_space(space, p) {
                return fail(format!("battery finite-set point {p:?} is foreign"));
            }
        }
    }
    for k in &space.batteries.compacts {
        validate_compact(space, k)
            .map_err(|e| Error::pre(format!("space `{}`: bad battery compact: {e}", space.id)))?;
    }
    for r in &space.batteries.rel_compacts {
        match r {
            Region::Compact { k } => validate_compact(space, k),
            Region::Open { u } => validate_open(space, u),
        }
        .map_err(|e| Error::pre(format!("space `{}`: bad battery region: {e}", space.id)))?;
    }
    for w in &space.witnesses {
        if let FamilyGen::SymmetricIntervals { step } | FamilyGen::OpenSymmetricIntervals { step } =
            &w.gen
        {
            if step <= &Q::zero() {
                return fail("witness step must be positive".to_string());
            }
        }
    }
    Ok(())
}

/// The registry this build ships with.  Built per call (models are shared
/// via `Rc` within one registry, which rules out a global static).
pub fn default_registry() -> Registry {
    Registry::from_doc(default_doc()).expect("the default registry is valid")
}

/// The default document: every space the verification suites and shipped
/// scenarios use.
pub fn default_doc() -> RegistryDoc {
    let qi = Q::from_int;
    let rp = Point::rat_int;
    let rq = |n: i64, d: i64| Point::rat(Q::frac(n, d));
    let np = Point::nat;
    let nset = |vs: &[u64]| -> Vec<Point> { vs.iter().map(|&v| Point::nat(v)).collect() };
    let kp = CompactDesc::points;
    let std = SpaceFlags { t1: true, regular: true, second_countable: true, fidelity_caveat: false };
    let wit = |kind: WitnessKind, gen: FamilyGen| WitnessSpec { kind, gen };

    let discrete_n = {
        let mut finite_sets: Vec<Vec<Point>> =
            (1..=8u64).map(|k| (0..k).map(np).collect()).collect();
        finite_sets.push(nset(&[1, 3, 5]));
        finite_sets.push(nset(&[2, 7, 11]));
        finite_sets.push(nset(&[0, 15]));
        SpaceEntry {
            id: "discrete_n".into(),
            kind: KindSpec::DiscreteNat,
            flags: std,
            batteries: Batteries {
                points: (0..=16).map(np).collect(),
                finite_sets,
                compacts: vec![
                    kp(nset(&[0, 1, 2, 3])),
                    kp(nset(&[0, 1, 2, 3, 4, 5, 6, 7, 8, 9])),
                    kp(nset(&[5])),
                    kp(nset(&[2, 7, 11])),
                ],
                rel_compacts: vec![
                    Region::Compact { k: kp(nset(&[0, 1, 2, 3, 4, 5])) },
                    Region::Open {
                        u: OpenDesc::union(vec![
                            OpenDesc::singleton(np(4)),
                            OpenDesc::singleton(np(9)),
                        ]),
                    },
                ],
            },
            witnesses: vec![
                wit(WitnessKind::TopologicallyCountable, FamilyGen::AllPoints),
                wit(WitnessKind::Hemicompact, FamilyGen::NatPrefixes),
            ],
        }
    };

    let real_line = {
        let mut points: Vec<Point> = (-5..=5).map(rp).collect();
        for n in [-9i64, -7, -5, -3, -1, 1, 3, 5, 7, 9] {
            points.push(rq(n, 2));
        }
        let mut compacts: Vec<CompactDesc> =
            (1..=5).map(|n| CompactDesc::closed_int(-n, n)).collect();
        compacts.push(CompactDesc::closed_int(0, 1));
        compacts.push(CompactDesc::closed(Q::frac(1, 3), Q::frac(2, 3)));
        compacts.push(kp(vec![rp(-5), rp(0), rp(5)]));
        SpaceEntry {
            id: "real_line".into(),
            kind: KindSpec::RealLine { lo: None, hi: None },
            flags: std,
            batteries: Batteries {
                points,
                finite_sets: vec![
                    vec![rp(-1), rp(0), rp(1)],
                    vec![rp(-3), rp(3)],
                    vec![rq(1, 2), rq(5, 2)],
                    vec![rp(-5), rp(5)],
                    vec![rp(-4), rp(-2), rp(0), rp(2), rp(4)],
                ],
                compacts,
                rel_compacts: vec![
                    Region::Open { u: OpenDesc::interval(qi(-1), qi(1)) },
                    Region::Open { u: OpenDesc::interval(qi(-3), qi(3)) },
                    Region::Open { u: OpenDesc::interval(qi(0), qi(1)) },
                    Region::Compact { k: CompactDesc::closed_int(0, 2) },
                ],
            },
            witnesses: vec![
                wit(
                    WitnessKind::Hemicompact,
                    FamilyGen::SymmetricIntervals { step: Q::one() },
                ),
                wit(
                    WitnessKind::RelativelyHemicompact,
                    FamilyGen::OpenSymmetricIntervals { step: Q::one() },
                ),
            ],
        }
    };

    let real_unit = SpaceEntry {
        id: "real_unit".into(),
        kind: KindSpec::RealLine { lo: Some(qi(0)), hi: Some(qi(1)) },
        flags: std,
        batteries: Batteries {
            points: vec![rp(0), rp(1), rq(1, 2), rq(1, 4), rq(3, 4), rq(1, 3), rq(2, 3)],
            finite_sets: vec![vec![rp(0), rp(1)], vec![rq(1, 4), rq(1, 2), rq(3, 4)]],
            compacts: vec![
                CompactDesc::closed_int(0, 1),
                CompactDesc::closed(Q::frac(1, 4), Q::frac(3, 4)),
                CompactDesc::closed(qi(0), Q::frac(1, 2)),
                kp(vec![rp(0), rp(1)]),
            ],
            rel_compacts: vec![
                Region::Open { u: OpenDesc::interval(qi(0), qi(1)) },
                Region::Compact { k: CompactDesc::closed_int(0, 1) },
            ],
        },
        witnesses: vec![],
    };

    let rational_line = SpaceEntry {
        id: "rational_line".into(),
        kind: KindSpec::RationalLine,
        flags: std,
        batteries: Batteries {
            points: vec![rp(0), rp(1), rp(-1), rq(1, 2), rq(-1, 2), rp(2), rp(-2), rq(1, 3)],
            finite_sets: vec![vec![rp(0), rp(1)], vec![rq(-1, 2), rq(1, 2)]],
            compacts: vec![kp(vec![rp(0)]), kp(vec![rp(0), rp(1), rp(-1)]), kp(vec![rq(1, 2)])],
            rel_compacts: vec![Region::Compact { k: kp(vec![rp(0), rp(1)]) }],
        },
        witnesses: vec![wit(WitnessKind::TopologicallyCountable, FamilyGen::AllPoints)],
    };

    let baire = {
        let w = |v: &[u64]| Point::word(v.to_vec());
        SpaceEntry {
            id: "baire".into(),
            kind: KindSpec::Baire,
            flags: std,
            batteries: Batteries {
                points: vec![
                    w(&[]),
                    w(&[0]),
                    w(&[1]),
                    w(&[2]),
                    w(&[0, 0]),
                    w(&[0, 1]),
                    w(&[3]),
                    w(&[0, 1, 2]),
                ],
                finite_sets: vec![vec![w(&[])], vec![w(&[0]), w(&[0, 1])]],
                compacts: vec![
                    kp(vec![w(&[0])]),
                    kp(vec![w(&[0, 1])]),
                    kp(vec![w(&[1])]),
                    kp(vec![w(&[0, 0]), w(&[0, 1])]),
                ],
                rel_compacts: vec![Region::Compact { k: kp(vec![w(&[0])]) }],
            },
            witnesses: vec![],
        }
    };

    let fortissimo = SpaceEntry {
        id: "fortissimo".into(),
        kind: KindSpec::Fortissimo,
        flags: SpaceFlags { t1: true, regular: true, second_countable: false, fidelity_caveat: true },
        batteries: Batteries {
            points: vec![Point::Infty, np(0), np(1), np(2), np(3), np(4), np(9)],
            finite_sets: vec![
                vec![Point::Infty],
                vec![Point::Infty, np(0)],
                vec![np(1), np(2)],
            ],
            compacts: vec![
                kp(vec![Point::Infty]),
                kp(vec![Point::Infty, np(0), np(1)]),
                kp(vec![np(2)]),
            ],
            rel_compacts: vec![Region::Compact { k: kp(vec![Point::Infty, np(0)]) }],
        },
        witnesses: vec![wit(WitnessKind::TopologicallyCountable, FamilyGen::AllPoints)],
    };

    let right_order = {
        let mut points: Vec<Point> = (-3..=3).map(rp).collect();
        points.push(rq(1, 2));
        points.push(rq(-1, 2));
        SpaceEntry {
            id: "right_order".into(),
            kind: KindSpec::RightOrder,
            flags: SpaceFlags {
                t1: false,
                regular: false,
                second_countable: true,
                fidelity_caveat: false,
            },
            batteries: Batteries {
                points,
                finite_sets: vec![vec![rp(-1), rp(1)], vec![rp(-2), rp(0), rp(2)]],
                compacts: vec![
                    kp(vec![rp(0)]),
                    kp(vec![rp(-1), rp(1)]),
                    CompactDesc::closed_int(0, 1),
                ],
                rel_compacts: vec![Region::Compact { k: kp(vec![rp(0)]) }],
            },
            witnesses: vec![wit(WitnessKind::TopologicallyCountable, FamilyGen::IntegerSingletons)],
        }
    };

    let sorgenfrey = SpaceEntry {
        id: "sorgenfrey".into(),
        kind: KindSpec::Sorgenfrey,
        flags: SpaceFlags { t1: true, regular: true, second_countable: false, fidelity_caveat: false },
        batteries: Batteries {
            points: vec![rp(0), rp(1), rp(-1), rq(1, 2), rq(-1, 2), rp(2)],
            finite_sets: vec![vec![rp(0), rp(1)]],
            compacts: vec![
                kp(vec![rp(0)]),
                kp(vec![rp(0), rp(1)]),
                kp(vec![rp(-1), rq(1, 2)]),
            ],
            rel_compacts: vec![Region::Compact { k: kp(vec![rp(0), rp(1)]) }],
        },
        witnesses: vec![],
    };

    let one_point = SpaceEntry {
        id: "one_point".into(),
        kind: KindSpec::OnePoint,
        flags: std,
        batteries: Batteries {
            points: vec![np(0)],
            finite_sets: vec![vec![np(0)]],
            compacts: vec![kp(vec![np(0)])],
            rel_compacts: vec![Region::Compact { k: kp(vec![np(0)]) }],
        },
        witnesses: vec![],
    };

    let real_line_sq = {
        let t2 = |a: i64, b: i64| Point::tuple(vec![rp(a), rp(b)]);
        let mut compacts = Vec::new();
        for j in 1..=3 {
            for k in 1..=3 {
                compacts.push(CompactDesc::product(vec![
                    CompactDesc::closed_int(-j, j),
                    CompactDesc::closed_int(-k, k),
                ]));
            }
        }
        compacts.push(CompactDesc::product(vec![
            CompactDesc::closed_int(0, 1),
            CompactDesc::closed_int(0, 1),
        ]));
        compacts.push(kp(vec![t2(0, 0), t2(1, 0)]));
        SpaceEntry {
            id: "real_line_sq".into(),
            kind: KindSpec::Power { base: "real_line".into(), arity: 2 },
            flags: std,
            batteries: Batteries {
                points: vec![
                    t2(0, 0),
                    t2(1, -1),
                    Point::tuple(vec![rq(1, 2), rq(1, 2)]),
                    t2(2, 3),
                    t2(-1, -1),
                ],
                finite_sets: vec![vec![t2(0, 0), t2(1, 1)]],
                compacts,
                rel_compacts: vec![
                    Region::Open {
                        u: OpenDesc::rect(vec![
                            OpenDesc::interval(qi(-1), qi(1)),
                            OpenDesc::interval(qi(-1), qi(1)),
                        ]),
                    },
                    Region::Compact {
                        k: CompactDesc::product(vec![
                            CompactDesc::closed_int(0, 1),
                            CompactDesc::closed_int(0, 1),
                        ]),
                    },
                ],
            },
            witnesses: vec![],
        }
    };

    let discrete_sq = {
        let tn = |a: u64, b: u64| Point::tuple(vec![np(a), np(b)]);
        SpaceEntry {
            id: "discrete_sq".into(),
            kind: KindSpec::Power { base: "discrete_n".into(), arity: 2 },
            flags: std,
            batteries: Batteries {
                points: vec![tn(0, 0), tn(1, 2), tn(3, 3)],
                finite_sets: vec![vec![tn(0, 0), tn(1, 1)]],
                compacts: vec![
                    CompactDesc::product(vec![kp(nset(&[0, 1])), kp(nset(&[0, 1]))]),
                    kp(vec![tn(2, 2)]),
                ],
                rel_compacts: vec![Region::Compact {
                    k: CompactDesc::product(vec![kp(nset(&[0])), kp(nset(&[0]))]),
                }],
            },
            witnesses: vec![],
        }
    };

    let real_line_cube = {
        let t3 = |a: i64, b: i64, c: Point| Point::tuple(vec![rp(a), rp(b), c]);
        let cube = |n: i64| {
            CompactDesc::product(vec![
                CompactDesc::closed_int(-n, n),
                CompactDesc::closed_int(-n, n),
                CompactDesc::closed_int(-n, n),
            ])
        };
        let mut compacts: Vec<CompactDesc> = (1..=3).map(cube).collect();
        compacts.push(CompactDesc::product(vec![
            CompactDesc::closed_int(0, 1),
            CompactDesc::closed_int(0, 1),
            CompactDesc::closed_int(0, 1),
        ]));
        SpaceEntry {
            id: "real_line_cube".into(),
            kind: KindSpec::Power { base: "real_line".into(), arity: 3 },
            flags: std,
            batteries: Batteries {
                points: vec![t3(0, 0, rp(0)), t3(1, -1, rq(1, 2))],
                finite_sets: vec![vec![t3(0, 0, rp(0))]],
                compacts,
                rel_compacts: vec![Region::Compact { k: cube(1) }],
            },
            witnesses: vec![],
        }
    };

    let chq_space = SpaceEntry {
        id: "chq_space".into(),
        kind: KindSpec::Sum { left: "real_unit".into(), right: "fortissimo".into() },
        flags: SpaceFlags { t1: true, regular: true, second_countable: false, fidelity_caveat: true },
        batteries: Batteries {
            points: vec![
                Point::inj(0, rp(0)),
                Point::inj(0, rq(1, 2)),
                Point::inj(0, rp(1)),
                Point::inj(1, Point::Infty),
                Point::inj(1, np(0)),
                Point::inj(1, np(5)),
            ],
            finite_sets: vec![vec![Point::inj(0, rp(0)), Point::inj(1, Point::Infty)]],
            compacts: vec![
                CompactDesc::Union {
                    parts: vec![
                        CompactDesc::inj(0, CompactDesc::closed_int(0, 1)),
                        CompactDesc::inj(1, kp(vec![Point::Infty])),
                    ],
                },
                CompactDesc::inj(0, CompactDesc::closed_int(0, 1)),
                CompactDesc::inj(1, kp(vec![Point::Infty, np(0)])),
            ],
            rel_compacts: vec![Region::Compact {
                k: CompactDesc::inj(0, CompactDesc::closed_int(0, 1)),
            }],
        },
        witnesses: vec![],
    };

    RegistryDoc {
        version: 1,
        spaces: vec![
            discrete_n,
            real_line,
            real_unit,
            rational_line,
            baire,
            fortissimo,
            right_order,
            sorgenfrey,
            one_point,
            real_line_sq,
            discrete_sq,
            real_line_cube,
            chq_space,
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shipped_path() -> std::path::PathBuf {
        std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../registry/spaces.json")
    }

    #[test]
    fn default_registry_builds_with_every_expected_space() {
        let reg = default_registry();
        for id in [
            "discrete_n",
            "real_line",
            "real_unit",
            "rational_line",
            "baire",
            "fortissimo",
            "right_order",
            "sorgenfrey",
            "one_point",
            "real_line_sq",
            "discrete_sq",
            "real_line_cube",
            "chq_space",
        ] {
            assert!(reg.get(id).is_some(), "missing space `{id}`");
        }
        assert_eq!(reg.ids().len(), 13);
    }

    #[test]
    fn composite_entries_share_their_factor_models() {
        let reg = default_registry();
        let line = reg.get("real_line").unwrap();
        let sq = reg.get("real_line_sq").unwrap();
        let factors = sq.factors().unwrap();
        assert_eq!(factors.len(), 2);
        assert!(Rc::ptr_eq(&factors[0], &line));

        let chq = reg.get("chq_space").unwrap();
        let (l, r) = chq.summands().unwrap();
        assert!(Rc::ptr_eq(&l, &reg.get("real_unit").unwrap()));
        assert!(Rc::ptr_eq(&r, &reg.get("fortissimo").unwrap()));
    }

    #[test]
    fn parse_then_serialize_is_byte_stable() {
        let first = default_registry().to_json();
        let reparsed = Registry::from_json(&first).unwrap();
        assert_eq!(reparsed.to_json(), first);
    }

    #[test]
    fn shipped_registry_file_matches_the_default() {
        let bytes = std::fs::read_to_string(shipped_path())
            .expect("registry/spaces.json is checked in (regenerate_shipped_registry writes it)");
        assert_eq!(bytes, default_registry().to_json(), "shipped registry is out of date");
        let reparsed = Registry::from_json(&bytes).unwrap();
        assert_eq!(reparsed.to_json(), bytes);
    }

    #[test]
    fn unknown_factor_ids_are_rejected() {
        let doc = RegistryDoc {
            version: 1,
            spaces: vec![SpaceEntry {
                id: "bad".into(),
                kind: KindSpec::Power { base: "nope".into(), arity: 2 },
                flags: SpaceFlags::default(),
                batteries: Batteries::default(),
                witnesses: vec![],
            }],
        };
        assert!(Registry::from_doc(doc).is_err());
    }

    #[test]
    fn foreign_battery_points_are_rejected() {
        let doc = RegistryDoc {
            version: 1,
            spaces: vec![SpaceEntry {
                id: "unit".into(),
                kind: KindSpec::RealLine {
                    lo: Some(Q::zero()),
                    hi: Some(Q::one()),
                },
                flags: SpaceFlags::default(),
                batteries: Batteries {
                    points: vec![Point::rat_int(2)],
                    ..Batteries::default()
                },
                witnesses: vec![],
            }],
        };
        assert!(Registry::from_doc(doc).is_err());
    }

    #[test]
    #[ignore = "writes the shipped registry file"]
    fn regenerate_shipped_registry() {
        let path = shipped_path();
        std::fs::create_dir_all(path.parent().unwrap()).unwrap();
        std::fs::write(&path, default_registry().to_json()).unwrap();
    }
}
