//! Spec files. A spec is a TOML document with named sections:
//!
//! ```toml
//! [spaces.ARC3]
//! opens = { l = ["l"], m = ["l", "m", "r"], r = ["r"] }
//!
//! [spaces.SQ]
//! product = ["ARC3", "ARC3"]
//!
//! [maps.ends]
//! from = "DISC2"
//! to = "ARC3"
//! table = { a = "l", b = "r" }
//!
//! [gluings.circ]
//! index = ["1", "2"]
//! patches = { 1 = "ARC3", 2 = "ARC3" }
//! overlaps = [
//!   { pair = ["1", "2"], space = "DISC2", anchor = "ends", transition = { a = "a", b = "b" } },
//!   { pair = ["2", "1"], space = "DISC2", anchor = "ends", transition = { a = "a", b = "b" } },
//! ]
//! ```
//!
//! A space lists the minimal open set of every point, or is the product of
//! two declared spaces. Wherever a map is expected it is either the name of
//! a declared map or an inline point table whose ends are implied. Triple
//! maps, cones, refinements, meta-gluings and coverings follow the same
//! pattern; see the fixtures directory for complete examples.

use std::collections::BTreeMap;

use gluing_core::cover::{CoverKind, Covering};
use gluing_core::fintop::{product_named, same_space, FiniteSpace, Space, SpaceMap};
use gluing_core::gdata::{fill_triple_maps, functor_of, GluingData, GluingFunctor};
use gluing_core::glidx::{GlObject, Generator};
use gluing_core::glue::Cone;
use gluing_core::refine::{GdfGluingData, IndexMap, Refinement};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    #[error("unresolved reference {0}")]
    UnresolvedReference(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("{location}: {message}")]
    Invalid { location: String, message: String },
}

fn invalid(location: impl Into<String>, message: impl ToString) -> SpecError {
    SpecError::Invalid { location: location.into(), message: message.to_string() }
}

/// Point table keyed by source point.
pub type Table = BTreeMap<String, String>;

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(untagged)]
pub enum MapRef {
    Name(String),
    Table(Table),
}

#[derive(Serialize, Deserialize, Debug, Clone, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawSpace {
    /// Minimal open set of every point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub opens: Option<BTreeMap<String, Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub product: Option<[String; 2]>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawMap {
    pub from: String,
    pub to: String,
    pub table: Table,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawOverlap {
    pub pair: [String; 2],
    pub space: String,
    pub anchor: MapRef,
    pub transition: MapRef,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawTripleMap {
    pub triple: [String; 3],
    pub table: Table,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawGluing {
    pub index: Vec<String>,
    pub patches: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub overlaps: Vec<RawOverlap>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub triple_maps: Vec<RawTripleMap>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawCone {
    pub gluing: String,
    pub apex: String,
    pub legs: BTreeMap<String, MapRef>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawRefinement {
    pub fine: String,
    pub coarse: String,
    /// Coarse index to fine index.
    pub gamma: BTreeMap<String, String>,
    /// Keyed by coarse object, e.g. `"[1,2]"`. Omitted components are
    /// completed when forced.
    pub components: BTreeMap<String, MapRef>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawMeta {
    pub index: Vec<String>,
    /// Gluing name per object.
    pub nodes: BTreeMap<String, String>,
    /// Refinement name per generator label, e.g. `"eta(1,2)"`. Generators
    /// whose ends coincide default to the identity.
    #[serde(default)]
    pub edges: BTreeMap<String, String>,
}

#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawCovering {
    pub base: String,
    #[serde(default = "default_kind")]
    pub kind: String,
    /// Declared map name per leg label.
    pub legs: BTreeMap<String, String>,
}

fn default_kind() -> String {
    "gluing".into()
}

#[derive(Serialize, Deserialize, Debug, Clone, Default, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct RawSpec {
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub spaces: BTreeMap<String, RawSpace>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, RawMap>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub gluings: BTreeMap<String, RawGluing>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cones: BTreeMap<String, RawCone>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub refinements: BTreeMap<String, RawRefinement>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metas: BTreeMap<String, RawMeta>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub coverings: BTreeMap<String, RawCovering>,
}

#[derive(Clone, Debug)]
pub struct ConeDecl {
    pub gluing: String,
    pub cone: Cone,
}

#[derive(Clone, Debug)]
pub struct RefinementDecl {
    pub fine: String,
    pub coarse: String,
    pub refinement: Refinement,
}

#[derive(Clone, Debug)]
pub struct MetaDecl {
    pub nodes: BTreeMap<GlObject, String>,
    pub edges: BTreeMap<Generator, String>,
    pub data: GdfGluingData,
}

/// A resolved spec. Every space is stored under its own id.
#[derive(Clone, Debug, Default)]
pub struct SpecDocument {
    pub spaces: BTreeMap<String, Space>,
    pub maps: BTreeMap<String, SpaceMap>,
    pub gluings: BTreeMap<String, GluingData>,
    pub cones: BTreeMap<String, ConeDecl>,
    pub refinements: BTreeMap<String, RefinementDecl>,
    pub metas: BTreeMap<String, MetaDecl>,
    pub coverings: BTreeMap<String, Covering>,
    /// Declarations that need a gluing data functor which could not be
    /// built, with the reason. Commands on them report an input error.
    pub deferred: BTreeMap<String, String>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Fill in missing triple maps from the projection condition.
    pub derive_triples: bool,
}

pub fn parse_spec(text: &str, opts: ParseOptions) -> Result<SpecDocument, SpecError> {
    let raw: RawSpec = toml::from_str(text).map_err(|e| {
        let location = match e.span() {
            Some(span) => {
                let before = &text[..span.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |p| p + 1) + 1;
                format!("line {line}, column {col}")
            }
            None => "document".into(),
        };
        SpecError::Parse { location, message: e.message().to_string() }
    })?;
    resolve(&raw, opts)
}

pub fn parse_generator(label: &str) -> Option<Generator> {
    let (head, rest) = label.trim().split_once('(')?;
    let args: Vec<String> = rest.strip_suffix(')')?.split(',').map(|s| s.trim().to_string()).collect();
    if args.iter().any(String::is_empty) {
        return None;
    }
    let (name, sup) = match head.split_once('^') {
        Some((n, s)) => (n, Some(s.to_string())),
        None => (head, None),
    };
    match (name, sup, args.as_slice()) {
        ("eta", None, [i, j]) => Some(Generator::Eta(i.clone(), j.clone())),
        ("tau", None, [i, j]) => Some(Generator::Tau(i.clone(), j.clone())),
        ("eta", Some(n), [i, j, k]) if n == *j || n == *k => Some(Generator::EtaT(n, i.clone(), j.clone(), k.clone())),
        ("tau", Some(s), [i, j, k]) if s == *k => Some(Generator::TauT(i.clone(), j.clone(), k.clone())),
        _ => None,
    }
}

struct Resolver<'a> {
    raw: &'a RawSpec,
    opts: ParseOptions,
    doc: SpecDocument,
    functors: BTreeMap<String, GluingFunctor>,
}

impl Resolver<'_> {
    fn space(&self, name: &str) -> Result<&Space, SpecError> {
        self.doc.spaces.get(name).ok_or_else(|| SpecError::UnresolvedReference(format!("space {name}")))
    }

    fn map(&self, loc: &str, r: &MapRef, dom: &Space, cod: &Space) -> Result<SpaceMap, SpecError> {
        match r {
            MapRef::Name(n) => {
                let m = self.doc.maps.get(n).ok_or_else(|| SpecError::UnresolvedReference(format!("map {n}")))?;
                if !same_space(m.dom(), dom) || !same_space(m.cod(), cod) {
                    return Err(invalid(
                        loc,
                        format!("map {n} is {} -> {}, expected {} -> {}", m.dom().id(), m.cod().id(), dom.id(), cod.id()),
                    ));
                }
                Ok(m.clone())
            }
            MapRef::Table(t) => SpaceMap::new(dom, cod, t.iter().map(|(a, b)| (a.as_str(), b.as_str()))).map_err(|e| invalid(loc, e)),
        }
    }

    /// The functor of a declared gluing. The inner error explains why the
    /// data has no functor, so dependents can be deferred.
    fn functor(&mut self, name: &str) -> Result<Result<GluingFunctor, String>, SpecError> {
        if let Some(f) = self.functors.get(name) {
            return Ok(Ok(f.clone()));
        }
        let gd = self.doc.gluings.get(name).ok_or_else(|| SpecError::UnresolvedReference(format!("gluing {name}")))?;
        match functor_of(gd) {
            Ok(f) => {
                self.functors.insert(name.into(), f.clone());
                Ok(Ok(f))
            }
            Err(e) => Ok(Err(format!("gluing {name} has no functor (try --derive-triples): {e}"))),
        }
    }

    fn spaces(&mut self) -> Result<(), SpecError> {
        let mut pending: Vec<(&String, &RawSpace)> = self.raw.spaces.iter().collect();
        while !pending.is_empty() {
            let before = pending.len();
            let mut rest = Vec::new();
            for (name, s) in pending {
                let loc = format!("spaces.{name}");
                let built = match (&s.opens, &s.product) {
                    (Some(opens), None) => {
                        let table: Vec<(String, Vec<String>)> = opens.iter().map(|(p, o)| (p.clone(), o.clone())).collect();
                        FiniteSpace::from_table(name, table).map_err(|e| invalid(&loc, e))?
                    }
                    (None, Some([a, b])) => match (self.doc.spaces.get(a), self.doc.spaces.get(b)) {
                        (Some(a), Some(b)) => product_named(a, b, name).map_err(|e| invalid(&loc, e))?,
                        _ => {
                            rest.push((name, s));
                            continue;
                        }
                    },
                    _ => return Err(invalid(loc, "give exactly one of opens or product")),
                };
                self.doc.spaces.insert(name.clone(), built);
            }
            if rest.len() == before {
                let (name, s) = rest[0];
                let [a, b] = s.product.as_ref().expect("only products wait");
                let missing = if self.doc.spaces.contains_key(a) { b } else { a };
                return Err(SpecError::UnresolvedReference(format!("space {missing} (in spaces.{name})")));
            }
            pending = rest;
        }
        Ok(())
    }

    fn maps(&mut self) -> Result<(), SpecError> {
        for (name, m) in &self.raw.maps {
            let (dom, cod) = (self.space(&m.from)?.clone(), self.space(&m.to)?.clone());
            let built = self.map(&format!("maps.{name}"), &MapRef::Table(m.table.clone()), &dom, &cod)?;
            self.doc.maps.insert(name.clone(), built);
        }
        Ok(())
    }

    fn gluings(&mut self) -> Result<(), SpecError> {
        for (name, g) in &self.raw.gluings {
            let loc = format!("gluings.{name}");
            let mut b = GluingData::builder(&g.index);
            let mut overlaps = BTreeMap::new();
            for (i, s) in &g.patches {
                b = b.patch(i, self.space(s)?);
            }
            for (k, o) in g.overlaps.iter().enumerate() {
                let [i, j] = &o.pair;
                let patch = g.patches.get(i).ok_or_else(|| invalid(format!("{loc}.overlaps[{k}]"), format!("no patch {i}")))?;
                let (space, patch) = (self.space(&o.space)?.clone(), self.space(patch)?.clone());
                let anchor = self.map(&format!("{loc}.overlaps[{k}].anchor"), &o.anchor, &space, &patch)?;
                b = b.overlap(i, j, &space, anchor);
                overlaps.insert((i.clone(), j.clone()), space);
            }
            for (k, o) in g.overlaps.iter().enumerate() {
                let [i, j] = &o.pair;
                let src = &overlaps[&(i.clone(), j.clone())];
                let dst = match overlaps.get(&(j.clone(), i.clone())) {
                    Some(s) => s.clone(),
                    None if i == j => src.clone(),
                    None => return Err(invalid(format!("{loc}.overlaps[{k}]"), format!("no overlap ({j},{i})"))),
                };
                let t = self.map(&format!("{loc}.overlaps[{k}].transition"), &o.transition, src, &dst)?;
                b = b.transition(i, j, t);
            }
            let mut gd = b.build().map_err(|e| invalid(&loc, e))?;
            for (k, t) in g.triple_maps.iter().enumerate() {
                let [i, j, l] = &t.triple;
                let here = format!("{loc}.triple_maps[{k}]");
                for x in [i, j, l] {
                    if !g.index.contains(x) {
                        return Err(invalid(here, format!("unknown index {x}")));
                    }
                }
                let (src, dst) = (gd.triple(i, j, l).space.clone(), gd.triple(j, i, l).space.clone());
                let m = self.map(&here, &MapRef::Table(t.table.clone()), &src, &dst)?;
                gd = gd.with_triple_map(i, j, l, m).map_err(|e| invalid(&here, e))?;
            }
            if self.opts.derive_triples && !gd.has_all_triple_maps() {
                gd = fill_triple_maps(&gd).map_err(|e| invalid(&loc, e))?;
            }
            self.doc.gluings.insert(name.clone(), gd);
        }
        Ok(())
    }

    fn cones(&mut self) -> Result<(), SpecError> {
        for (name, c) in &self.raw.cones {
            let loc = format!("cones.{name}");
            let fun = match self.functor(&c.gluing)? {
                Ok(f) => f,
                Err(why) => {
                    self.doc.deferred.insert(name.clone(), why);
                    continue;
                }
            };
            let apex = self.space(&c.apex)?.clone();
            let mut legs = BTreeMap::new();
            for (i, r) in &c.legs {
                if !fun.index().contains(i) {
                    return Err(invalid(&loc, format!("no patch {i} in {}", c.gluing)));
                }
                legs.insert(i.clone(), self.map(&format!("{loc}.legs.{i}"), r, fun.patch(i), &apex)?);
            }
            let cone = Cone::from_patch_legs(&fun, &apex, legs).map_err(|e| invalid(&loc, e))?;
            self.doc.cones.insert(name.clone(), ConeDecl { gluing: c.gluing.clone(), cone });
        }
        Ok(())
    }

    fn refinement(&mut self, name: &str) -> Result<Result<RefinementDecl, String>, SpecError> {
        if let Some(r) = self.doc.refinements.get(name) {
            return Ok(Ok(r.clone()));
        }
        if let Some(why) = self.doc.deferred.get(name) {
            return Ok(Err(why.clone()));
        }
        let r = self.raw.refinements.get(name).ok_or_else(|| SpecError::UnresolvedReference(format!("refinement {name}")))?;
        let loc = format!("refinements.{name}");
        let (fine, coarse) = match (self.functor(&r.fine)?, self.functor(&r.coarse)?) {
            (Ok(f), Ok(c)) => (f, c),
            (Err(why), _) | (_, Err(why)) => {
                self.doc.deferred.insert(name.into(), why.clone());
                return Ok(Err(why));
            }
        };
        let pairs: Vec<(String, String)> = r.gamma.iter().map(|(a, b)| (a.clone(), b.clone())).collect();
        let gamma = IndexMap::new(coarse.index(), fine.index(), &pairs).map_err(|e| invalid(format!("{loc}.gamma"), e))?;
        let mut comps = BTreeMap::new();
        for (o, m) in &r.components {
            let here = format!("{loc}.components.{o}");
            let obj = GlObject::parse(o).map_err(|e| invalid(&here, e))?;
            let cod = coarse.object(&obj).ok_or_else(|| invalid(&here, format!("no object {obj} over the coarse index")))?;
            let dom = fine.object(&gamma.object(&obj)).expect("reindexed object");
            comps.insert(obj, self.map(&here, m, dom, cod)?);
        }
        let refinement = Refinement::new(gamma, &fine, &coarse, comps).map_err(|e| invalid(&loc, e))?;
        let d = RefinementDecl { fine: r.fine.clone(), coarse: r.coarse.clone(), refinement };
        self.doc.refinements.insert(name.into(), d.clone());
        Ok(Ok(d))
    }

    fn metas(&mut self) -> Result<(), SpecError> {
        for name in self.raw.refinements.keys() {
            // Failures to build a functor are recorded as deferred.
            let _ = self.refinement(name)?;
        }
        for (name, m) in &self.raw.metas {
            let loc = format!("metas.{name}");
            let mut nodes = BTreeMap::new();
            let mut node_names = BTreeMap::new();
            let mut why = None;
            for (o, g) in &m.nodes {
                let obj = GlObject::parse(o).map_err(|e| invalid(format!("{loc}.nodes"), e))?;
                match self.functor(g)? {
                    Ok(f) => {
                        nodes.insert(obj.clone(), f);
                    }
                    Err(w) => why = Some(w),
                }
                node_names.insert(obj, g.clone());
            }
            let mut edges = BTreeMap::new();
            let mut edge_names = BTreeMap::new();
            for (label, r) in &m.edges {
                let g = parse_generator(label).ok_or_else(|| invalid(format!("{loc}.edges"), format!("bad generator {label}")))?;
                match self.refinement(r)? {
                    Ok(d) => {
                        edges.insert(g.clone(), d.refinement);
                    }
                    Err(w) => why = Some(w),
                }
                edge_names.insert(g, r.clone());
            }
            if let Some(w) = why {
                self.doc.deferred.insert(name.clone(), w);
                continue;
            }
            let data = GdfGluingData::new(&m.index, nodes, edges).map_err(|e| invalid(&loc, e))?;
            self.doc.metas.insert(name.clone(), MetaDecl { nodes: node_names, edges: edge_names, data });
        }
        Ok(())
    }

    fn coverings(&mut self) -> Result<(), SpecError> {
        for (name, c) in &self.raw.coverings {
            let loc = format!("coverings.{name}");
            let base = self.space(&c.base)?.clone();
            let kind = parse_kind(&c.kind).ok_or_else(|| invalid(format!("{loc}.kind"), format!("unknown kind {}", c.kind)))?;
            let mut legs = Vec::new();
            for (label, m) in &c.legs {
                let map = self.doc.maps.get(m).ok_or_else(|| SpecError::UnresolvedReference(format!("map {m}")))?;
                legs.push((label.clone(), map.clone()));
            }
            let cov = Covering::new(&base, legs, kind).map_err(|e| invalid(&loc, e))?;
            self.doc.coverings.insert(name.clone(), cov);
        }
        Ok(())
    }
}

pub fn parse_kind(s: &str) -> Option<CoverKind> {
    match s {
        "gluing" => Some(CoverKind::Gluing),
        "open" => Some(CoverKind::Open),
        _ => None,
    }
}

pub fn resolve(raw: &RawSpec, opts: ParseOptions) -> Result<SpecDocument, SpecError> {
    let mut seen = BTreeMap::new();
    let sections: [(&str, Vec<&String>); 7] = [
        ("spaces", raw.spaces.keys().collect()),
        ("maps", raw.maps.keys().collect()),
        ("gluings", raw.gluings.keys().collect()),
        ("cones", raw.cones.keys().collect()),
        ("refinements", raw.refinements.keys().collect()),
        ("metas", raw.metas.keys().collect()),
        ("coverings", raw.coverings.keys().collect()),
    ];
    for (section, names) in sections {
        for n in names {
            if let Some(prev) = seen.insert(n.clone(), section) {
                return Err(SpecError::DuplicateName(format!("{n} (in {prev} and {section})")));
            }
        }
    }
    let mut r = Resolver { raw, opts, doc: SpecDocument::default(), functors: BTreeMap::new() };
    r.spaces()?;
    r.maps()?;
    r.gluings()?;
    r.cones()?;
    r.metas()?;
    r.coverings()?;
    Ok(r.doc)
}

fn table_of(m: &SpaceMap) -> Table {
    m.pairs().into_iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
}

fn space_name(doc: &SpecDocument, s: &Space) -> Result<String, SpecError> {
    match doc.spaces.get(s.id()) {
        Some(d) if same_space(d, s) => Ok(s.id().to_string()),
        _ => Err(SpecError::UnresolvedReference(format!("space {}", s.id()))),
    }
}

/// The raw form of a resolved document. Spaces are written out as tables
/// of minimal open sets and maps inside gluings, cones and refinements as
/// inline tables, so the result reparses to an equal document.
pub fn to_raw(doc: &SpecDocument) -> Result<RawSpec, SpecError> {
    let mut raw = RawSpec::default();
    for (name, s) in &doc.spaces {
        let opens = s
            .points()
            .iter()
            .map(|p| (p.clone(), s.min_open_of(p).expect("own point").into_iter().map(String::from).collect()))
            .collect();
        raw.spaces.insert(name.clone(), RawSpace { opens: Some(opens), product: None });
    }
    for (name, m) in &doc.maps {
        raw.maps.insert(
            name.clone(),
            RawMap { from: space_name(doc, m.dom())?, to: space_name(doc, m.cod())?, table: table_of(m) },
        );
    }
    for (name, gd) in &doc.gluings {
        let mut g = RawGluing { index: gd.index().to_vec(), patches: BTreeMap::new(), overlaps: Vec::new(), triple_maps: Vec::new() };
        for i in gd.index() {
            g.patches.insert(i.clone(), space_name(doc, gd.patch(i))?);
        }
        for i in gd.index() {
            for j in gd.index() {
                if i == j {
                    continue;
                }
                g.overlaps.push(RawOverlap {
                    pair: [i.clone(), j.clone()],
                    space: space_name(doc, gd.overlap(i, j))?,
                    anchor: MapRef::Table(table_of(gd.anchor(i, j))),
                    transition: MapRef::Table(table_of(gd.transition(i, j))),
                });
            }
        }
        for ((i, j, k), m) in gd.triple_maps() {
            g.triple_maps.push(RawTripleMap { triple: [i.clone(), j.clone(), k.clone()], table: table_of(m) });
        }
        raw.gluings.insert(name.clone(), g);
    }
    for (name, c) in &doc.cones {
        let legs = c.cone.patch_legs().iter().map(|(i, m)| (i.clone(), MapRef::Table(table_of(m)))).collect();
        raw.cones.insert(name.clone(), RawCone { gluing: c.gluing.clone(), apex: space_name(doc, &c.cone.apex)?, legs });
    }
    for (name, r) in &doc.refinements {
        let gamma = r.refinement.gamma.source().iter().map(|i| (i.clone(), r.refinement.gamma.apply(i).to_string())).collect();
        let components = r.refinement.components.iter().map(|(o, m)| (o.to_string(), MapRef::Table(table_of(m)))).collect();
        raw.refinements.insert(name.clone(), RawRefinement { fine: r.fine.clone(), coarse: r.coarse.clone(), gamma, components });
    }
    for (name, m) in &doc.metas {
        raw.metas.insert(
            name.clone(),
            RawMeta {
                index: m.data.index.clone(),
                nodes: m.nodes.iter().map(|(o, g)| (o.to_string(), g.clone())).collect(),
                edges: m.edges.iter().map(|(g, r)| (g.label(), r.clone())).collect(),
            },
        );
    }
    for (name, c) in &doc.coverings {
        let mut legs = BTreeMap::new();
        for (label, leg) in &c.legs {
            let found = doc.maps.iter().find(|(_, m)| *m == leg).map(|(n, _)| n.clone());
            let n = found.ok_or_else(|| SpecError::UnresolvedReference(format!("map for leg {label} of {name}")))?;
            legs.insert(label.clone(), n);
        }
        raw.coverings.insert(name.clone(), RawCovering { base: space_name(doc, &c.base)?, kind: c.kind.name().into(), legs });
    }
    Ok(raw)
}

pub fn serialize_spec(doc: &SpecDocument) -> Result<String, SpecError> {
    let raw = to_raw(doc)?;
    toml::to_string(&raw).map_err(|e| invalid("document", e))
}

impl SpecDocument {
    /// Registers a space under its id, and recursively the spaces of a
    /// gluing.
    pub fn add_space(&mut self, s: &Space) {
        self.spaces.insert(s.id().to_string(), s.clone());
    }

    pub fn add_gluing(&mut self, name: &str, gd: &GluingData) {
        for i in gd.index() {
            self.add_space(gd.patch(i));
            for j in gd.index() {
                self.add_space(gd.overlap(i, j));
            }
        }
        self.gluings.insert(name.into(), gd.clone());
    }

    /// Adds a meta-gluing, naming node gluings and edge refinements by
    /// content so that shared pieces are written once.
    pub fn add_meta(&mut self, name: &str, meta: &GdfGluingData) {
        let mut node_names = BTreeMap::new();
        for (o, f) in &meta.nodes {
            let existing = self.gluings.iter().find(|(_, g)| *g == f.data()).map(|(n, _)| n.clone());
            let n = existing.unwrap_or_else(|| {
                let n = format!("{name}.node{}", self.gluings.len());
                self.add_gluing(&n, f.data());
                n
            });
            node_names.insert(o.clone(), n);
        }
        let find = |fun: &GluingFunctor, doc: &SpecDocument| {
            doc.gluings.iter().find(|(_, g)| *g == fun.data()).map(|(n, _)| n.clone()).expect("node gluing registered")
        };
        let mut edge_names = BTreeMap::new();
        for (g, r) in &meta.edges {
            let (fine, coarse) = (find(&r.fine, self), find(&r.coarse, self));
            let existing = self
                .refinements
                .iter()
                .find(|(_, d)| d.fine == fine && d.coarse == coarse && d.refinement.gamma == r.gamma && d.refinement.components == r.components)
                .map(|(n, _)| n.clone());
            let n = existing.unwrap_or_else(|| {
                let n = format!("{name}.edge{}", self.refinements.len());
                self.refinements.insert(n.clone(), RefinementDecl { fine, coarse, refinement: r.clone() });
                n
            });
            edge_names.insert(g.clone(), n);
        }
        self.metas.insert(name.into(), MetaDecl { nodes: node_names, edges: edge_names, data: meta.clone() });
    }

    /// Adds a refinement together with its two gluings under the given names.
    pub fn add_refinement(&mut self, name: &str, fine: &str, coarse: &str, r: &Refinement) {
        self.add_gluing(fine, r.fine.data());
        self.add_gluing(coarse, r.coarse.data());
        self.refinements.insert(name.into(), RefinementDecl { fine: fine.into(), coarse: coarse.into(), refinement: r.clone() });
    }

    pub fn add_covering(&mut self, name: &str, c: &Covering) {
        self.add_space(&c.base);
        for (label, leg) in &c.legs {
            self.add_space(leg.dom());
            self.maps.insert(format!("{name}.{label}"), leg.clone());
        }
        self.coverings.insert(name.into(), c.clone());
    }

    /// Names of every declaration, with its section.
    pub fn names(&self) -> Vec<(&'static str, &str)> {
        let mut v: Vec<(&'static str, &str)> = Vec::new();
        v.extend(self.gluings.keys().map(|k| ("gluing", k.as_str())));
        v.extend(self.cones.keys().map(|k| ("cone", k.as_str())));
        v.extend(self.refinements.keys().map(|k| ("refinement", k.as_str())));
        v.extend(self.metas.keys().map(|k| ("meta", k.as_str())));
        v.extend(self.coverings.keys().map(|k| ("covering", k.as_str())));
        v
    }
}
