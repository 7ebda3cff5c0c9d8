//! Standard small spaces and gluing data.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::cover::{CoverKind, Covering};
use crate::fintop::{product, product_named, subspace, FiniteSpace, Space, SpaceMap};
use crate::gdata::{derive_triple_maps, fill_triple_maps, functor_of, GluingData, GluingFunctor};
use crate::glidx::{GlObject, IndexCategory};
use crate::glue::{glue_data, GluedSpace};
use crate::refine::{GdfGluingData, IndexMap, Refinement};

/// One point `p`.
pub fn pt() -> Space {
    FiniteSpace::from_table("PT", vec![("p", vec!["p"])]).unwrap()
}

/// Sierpinski space: `t` is open, the only open set containing `b` is everything.
pub fn sierp() -> Space {
    FiniteSpace::from_table("SIERP", vec![("t", vec!["t"]), ("b", vec!["t", "b"])]).unwrap()
}

/// Two discrete points `a`, `b`.
pub fn disc2() -> Space {
    FiniteSpace::from_table("DISC2", vec![("a", vec!["a"]), ("b", vec!["b"])]).unwrap()
}

/// Finite arc: open ends `l`, `r` and a closed middle `m`.
pub fn arc3() -> Space {
    FiniteSpace::from_table("ARC3", vec![("l", vec!["l"]), ("m", vec!["l", "m", "r"]), ("r", vec!["r"])]).unwrap()
}

/// `ARC3 x ARC3`.
pub fn sq9() -> Space {
    product_named(&arc3(), &arc3(), "SQ9").unwrap()
}

/// Pseudocircle: open points `l`, `r` and closed points `m1`, `m2`.
pub fn c4() -> Space {
    FiniteSpace::from_table(
        "C4",
        vec![
            ("l", vec!["l"]),
            ("r", vec!["r"]),
            ("m1", vec!["l", "m1", "r"]),
            ("m2", vec!["l", "m2", "r"]),
        ],
    )
    .unwrap()
}

fn two_point_map(dom: &Space, cod: &Space, a: &str, b: &str) -> SpaceMap {
    SpaceMap::new(dom, cod, [("a", a), ("b", b)]).unwrap()
}

/// One patch and nothing else; triple maps not yet derived.
pub fn trivial_data(space: &Space) -> GluingData {
    GluingData::builder(&["1"]).patch("1", space).build().unwrap()
}

/// Two arcs glued along both endpoints: `U(1) = U(2) = ARC3`,
/// `U(1,2) = U(2,1) = DISC2` anchored at `{l, r}`, transitions the identity
/// on names. Glues to the pseudocircle.
pub fn gd_circ() -> GluingData {
    let (a, d) = (arc3(), disc2());
    let b = GluingData::builder(&["1", "2"])
        .patch("1", &a)
        .patch("2", &a)
        .overlap("1", "2", &d, two_point_map(&d, &a, "l", "r"))
        .overlap("2", "1", &d, two_point_map(&d, &a, "l", "r"))
        .transition("1", "2", SpaceMap::identity(&d))
        .transition("2", "1", SpaceMap::identity(&d));
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// Three arcs joined end to end in a cycle. Every triple overlap of
/// distinct indices is empty.
pub fn three_arc_circle() -> GluingData {
    let (a, p) = (arc3(), pt());
    let mut b = GluingData::builder(&["1", "2", "3"]);
    for i in ["1", "2", "3"] {
        b = b.patch(i, &a);
    }
    for (i, j) in [("1", "2"), ("2", "3"), ("3", "1")] {
        b = b
            .overlap(i, j, &p, SpaceMap::constant(&p, &a, "r").unwrap())
            .overlap(j, i, &p, SpaceMap::constant(&p, &a, "l").unwrap())
            .transition(i, j, SpaceMap::identity(&p))
            .transition(j, i, SpaceMap::identity(&p));
    }
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// Three arcs sharing both endpoints, so every triple overlap has two points.
pub fn theta() -> GluingData {
    let (a, d) = (arc3(), disc2());
    let ix = ["1", "2", "3"];
    let mut b = GluingData::builder(&ix);
    for i in ix {
        b = b.patch(i, &a);
        for j in ix {
            if i != j {
                b = b
                    .overlap(i, j, &d, two_point_map(&d, &a, "l", "r"))
                    .transition(i, j, SpaceMap::identity(&d));
            }
        }
    }
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// Both overlap points of `U(1,2)` land on `l`, so triple maps are not
/// forced by the projection condition.
pub fn collapsing_anchor_data() -> GluingData {
    let (a, d) = (arc3(), disc2());
    GluingData::builder(&["1", "2"])
        .patch("1", &a)
        .patch("2", &a)
        .overlap("1", "2", &d, two_point_map(&d, &a, "l", "l"))
        .overlap("2", "1", &d, two_point_map(&d, &a, "l", "r"))
        .transition("1", "2", SpaceMap::identity(&d))
        .transition("2", "1", SpaceMap::identity(&d))
        .build()
        .unwrap()
}

/// The circle data with the triple map `T(1,2,2) -> T(2,1,2)` crossed over,
/// which breaks the projection condition.
pub fn broken_projection_data() -> GluingData {
    let gd = gd_circ();
    let src = gd.triple("1", "2", "2").space.clone();
    let dst = gd.triple("2", "1", "2").space.clone();
    let crossed = SpaceMap::new(&src, &dst, [("(a,a)", "(b,r)"), ("(b,b)", "(a,l)")]).unwrap();
    gd.with_triple_map("1", "2", "2", crossed).unwrap()
}

/// Two discrete two-point patches sharing the point `a`.
pub fn two_discs_one_point() -> GluingData {
    let (d, p) = (disc2(), pt());
    let at_a = SpaceMap::constant(&p, &d, "a").unwrap();
    let b = GluingData::builder(&["1", "2"])
        .patch("1", &d)
        .patch("2", &d)
        .overlap("1", "2", &p, at_a.clone())
        .overlap("2", "1", &p, at_a)
        .transition("1", "2", SpaceMap::identity(&p))
        .transition("2", "1", SpaceMap::identity(&p));
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// [`theta`] with the transitions between patches 1 and 2 crossed over.
/// Pairwise the data is still invertible, but the cocycle condition fails
/// and the overlap relation is not transitive.
pub fn corrupted_cocycle() -> GluingData {
    let gd = theta().without_triple_maps();
    let d = gd.overlap("1", "2").clone();
    let cross = SpaceMap::new(&d, &d, [("a", "b"), ("b", "a")]).unwrap();
    let gd = gd.with_transition("1", "2", cross.clone()).unwrap().with_transition("2", "1", cross).unwrap();
    fill_triple_maps(&gd).unwrap()
}

/// Two Sierpinski spaces glued at their closed point, so the anchors are
/// not open maps.
pub fn sierp_closed_point_gluing() -> GluingData {
    let (s, p) = (sierp(), pt());
    let at_b = SpaceMap::constant(&p, &s, "b").unwrap();
    let b = GluingData::builder(&["1", "2"])
        .patch("1", &s)
        .patch("2", &s)
        .overlap("1", "2", &p, at_b.clone())
        .overlap("2", "1", &p, at_b)
        .transition("1", "2", SpaceMap::identity(&p))
        .transition("2", "1", SpaceMap::identity(&p));
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// C4 covered by its two open arcs `{l, m1, r}` and `{l, m2, r}`.
pub fn c4_two_arcs() -> Covering {
    let c = c4();
    let legs = ["m1", "m2"]
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let (_, inc) = subspace(&c, &["l", m, "r"]).unwrap();
            (format!("{}", k + 1), inc)
        })
        .collect();
    Covering::new(&c, legs, CoverKind::Open).unwrap()
}

/// SQ9 covered by the closed column strips `{l, m} x ARC3` and
/// `{m, r} x ARC3`.
pub fn sq9_two_strips() -> Covering {
    let s = sq9();
    let strip = |cols: [&str; 2]| {
        let names: alloc::vec::Vec<alloc::string::String> = cols
            .iter()
            .flat_map(|c| ["l", "m", "r"].map(|r| alloc::format!("({c},{r})")))
            .collect();
        subspace(&s, &names).unwrap().1
    };
    let legs = vec![("1".into(), strip(["l", "m"])), ("2".into(), strip(["m", "r"]))];
    Covering::new(&s, legs, CoverKind::Gluing).unwrap()
}

/// Splits a product point `(x,y)` into its coordinates.
pub fn split_pair(p: &str) -> (&str, &str) {
    let inner = p.strip_prefix('(').and_then(|s| s.strip_suffix(')')).unwrap_or(p);
    let mut depth = 0i32;
    for (k, c) in inner.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => return (&inner[..k], &inner[k + 1..]),
            _ => {}
        }
    }
    (inner, "")
}

fn end_anchor(d: &str) -> &'static str {
    if d == "a" {
        "l"
    } else {
        "r"
    }
}

/// The circle data [`gd_circ`] times a fixed second factor `y`: patches
/// `ARC3 x Y`, overlaps `DISC2 x Y`. With `extra`, patch 1 also gets an
/// isolated point `extra` that no overlap reaches.
pub fn circle_times(y: &Space, extra: bool) -> GluingData {
    let (a, d) = (arc3(), disc2());
    let patch = product(&a, y).unwrap();
    let over = product(&d, y).unwrap();
    let first = if extra {
        let mut table: Vec<(String, Vec<String>)> = patch
            .points()
            .iter()
            .map(|p| (p.clone(), patch.min_open_of(p).unwrap().into_iter().map(String::from).collect()))
            .collect();
        table.push(("extra".into(), vec!["extra".into()]));
        FiniteSpace::from_table(&format!("{}+", patch.id()), table).unwrap()
    } else {
        patch.clone()
    };
    let anchor = |cod: &Space| {
        SpaceMap::from_fn(&over, cod, |p| {
            let (u, v) = split_pair(p);
            format!("({},{v})", end_anchor(u))
        })
        .unwrap()
    };
    let b = GluingData::builder(&["1", "2"])
        .patch("1", &first)
        .patch("2", &patch)
        .overlap("1", "2", &over, anchor(&first))
        .overlap("2", "1", &over, anchor(&patch))
        .transition("1", "2", SpaceMap::identity(&over))
        .transition("2", "1", SpaceMap::identity(&over));
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// Refinement between two circle products that applies `f` to the second
/// coordinate; `extra` goes to `(l, f(a))`.
fn second_factor_refinement(fine: &GluingFunctor, coarse: &GluingFunctor, f: fn(&str) -> &str) -> Refinement {
    let mut comps = BTreeMap::new();
    for o in coarse.category().objects() {
        if matches!(o, GlObject::Triple(..)) {
            continue;
        }
        let (dom, cod) = (fine.object(o).unwrap(), coarse.object(o).unwrap());
        let m = SpaceMap::from_fn(dom, cod, |p| {
            if p == "extra" {
                return format!("(l,{})", f("a"));
            }
            let (u, v) = split_pair(p);
            format!("({u},{})", f(v))
        })
        .unwrap();
        comps.insert(o.clone(), m);
    }
    Refinement::new(IndexMap::identity(coarse.index()), fine, coarse, comps).unwrap()
}

fn torus_meta_from(triple_extra: Option<GlObject>) -> GdfGluingData {
    let cylinder = functor_of(&circle_times(&arc3(), false)).unwrap();
    let band = functor_of(&circle_times(&disc2(), false)).unwrap();
    let odd = functor_of(&circle_times(&disc2(), true)).unwrap();
    let ix = ["1", "2"];
    let cat = IndexCategory::new(&ix).unwrap();
    let mut nodes = BTreeMap::new();
    for o in cat.objects() {
        let f = match o {
            GlObject::Single(_) => cylinder.clone(),
            _ if Some(o) == triple_extra.as_ref() => odd.clone(),
            _ => band.clone(),
        };
        nodes.insert(o.clone(), f);
    }
    let mut edges = BTreeMap::new();
    for g in cat.generators() {
        let (a, b) = (g.dom(), g.cod());
        if a == b {
            continue;
        }
        let f: fn(&str) -> &str = if matches!(a, GlObject::Single(_)) { end_anchor } else { |v| v };
        edges.insert(g.clone(), second_factor_refinement(&nodes[&b], &nodes[&a], f));
    }
    GdfGluingData::new(&ix, nodes, edges).unwrap()
}

/// A torus as a gluing of gluings: over the meta index `{1, 2}` the patch
/// nodes are cylinders `C4 x ARC3` built from two squares, every other node
/// is the band `C4 x DISC2`, and the edges into patch nodes send the band's
/// second coordinate `a, b` to the ends `l, r`.
pub fn torus_meta() -> GdfGluingData {
    torus_meta_from(None)
}

/// [`torus_meta`] with an isolated extra point in the node at `[1,1,2]`,
/// so the glued triple node is bigger than the pullback of the pair nodes.
pub fn torus_meta_with_extra_point() -> GdfGluingData {
    torus_meta_from(Some(GlObject::Triple("1".into(), "1".into(), "2".into())))
}

/// Label of the square with node patch `p` in meta patch `q`.
pub fn flat_label(p: &str, q: &str) -> String {
    format!("p{p}q{q}")
}

/// The same torus glued in one stage from four squares `ARC3 x ARC3`.
pub fn torus_flat() -> GluingData {
    let (a, d) = (arc3(), disc2());
    let sq = product(&a, &a).unwrap();
    let labels: Vec<(&str, &str)> = vec![("1", "1"), ("1", "2"), ("2", "1"), ("2", "2")];
    let names: Vec<String> = labels.iter().map(|(p, q)| flat_label(p, q)).collect();
    let mut b = GluingData::builder(&names);
    for n in &names {
        b = b.patch(n, &sq);
    }
    for (p, q) in &labels {
        for (p2, q2) in &labels {
            if (p, q) == (p2, q2) {
                continue;
            }
            let x = if p == p2 { &a } else { &d };
            let y = if q == q2 { &a } else { &d };
            let over = product(x, y).unwrap();
            let (same_x, same_y) = (p == p2, q == q2);
            let anchor = SpaceMap::from_fn(&over, &sq, |s| {
                let (u, v) = split_pair(s);
                let u = if same_x { u } else { end_anchor(u) };
                let v = if same_y { v } else { end_anchor(v) };
                format!("({u},{v})")
            })
            .unwrap();
            let (i, j) = (flat_label(p, q), flat_label(p2, q2));
            b = b.overlap(&i, &j, &over, anchor).transition(&i, &j, SpaceMap::identity(&over));
        }
    }
    derive_triple_maps(&b.build().unwrap()).unwrap()
}

/// A one-patch `DISC2` functor over `{*}` mapped into the circle data
/// along `1, 2 -> *`, with both patch components `a -> l`, `b -> r`.
/// Returns the refinement and the two glued spaces.
pub fn point_pair_into_circle() -> (Refinement, GluedSpace, GluedSpace) {
    let d = disc2();
    let fine_data = derive_triple_maps(&GluingData::builder(&["*"]).patch("*", &d).build().unwrap()).unwrap();
    let (fine, fine_glued) = glue_data(&fine_data).unwrap();
    let (coarse, coarse_glued) = glue_data(&gd_circ()).unwrap();
    let gamma = IndexMap::new(&["1", "2"], &["*"], &[("1", "*"), ("2", "*")]).unwrap();
    let a = arc3();
    let mut comps = BTreeMap::new();
    for i in ["1", "2"] {
        comps.insert(GlObject::Single(i.into()), two_point_map(&d, &a, "l", "r"));
    }
    for (i, j) in [("1", "2"), ("2", "1")] {
        comps.insert(GlObject::Pair(i.into(), j.into()), SpaceMap::identity(&d));
    }
    let r = Refinement::new(gamma, &fine, &coarse, comps).unwrap();
    (r, fine_glued, coarse_glued)
}
