//! Topological gluing data and the functor on the index category it defines.
//!
//! For indices `i, j, k` the data consists of patches `U(i)`, overlaps
//! `U(i,j)` with anchors `U(i,j) -> U(i)`, transitions `U(i,j) -> U(j,i)`
//! and triple transitions `T(i,j,k) -> T(j,i,k)`, where `T(i,j,k)` is the
//! pullback of the anchors of `U(i,j)` and `U(i,k)` over `U(i)`. Its points
//! are pairs `(u,v)`.
//!
//! Triple transitions land in `U(j,i) x_U(j) U(j,k)`. The published typing of
//! their codomain repeats `U(j,i)`; that reading cannot satisfy the
//! projection condition for distinct `i, j, k`, so the second factor is
//! taken to be `U(j,k)`.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::fintop::{compose, pullback_named, same_space, Space, SpaceMap, TopError};
use crate::glidx::{normalize, Generator, GlMorphism, GlObject, Idx, IndexCategory, IndexError};

pub type Triple = (Idx, Idx, Idx);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DataError {
    #[error(transparent)]
    Top(#[from] TopError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error("no patch for index {0}")]
    MissingPatch(Idx),
    #[error("no overlap for ({0},{1})")]
    MissingOverlap(Idx, Idx),
    #[error("no transition for ({0},{1})")]
    MissingTransition(Idx, Idx),
    #[error("{what}: expected {expected}, found {found}")]
    TypeMismatch { what: String, expected: String, found: String },
    #[error("triple map ({0},{1},{2}) cannot be derived at {3}: {4} candidates; supply it explicitly")]
    NotDetermined(Idx, Idx, Idx, String, usize),
    #[error("gluing data failed validation:\n{0}")]
    ValidationFailed(Box<ValidationReport>),
    #[error("not a gluing data functor: {0}")]
    NotFunctorial(String),
}

/// Pullback `U(i,j) x_U(i) U(i,k)` with its projections.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleSpace {
    pub space: Space,
    pub first: SpaceMap,
    pub second: SpaceMap,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingData {
    index: Vec<Idx>,
    patches: BTreeMap<Idx, Space>,
    overlaps: BTreeMap<(Idx, Idx), Space>,
    anchors: BTreeMap<(Idx, Idx), SpaceMap>,
    transitions: BTreeMap<(Idx, Idx), SpaceMap>,
    triples: BTreeMap<Triple, TripleSpace>,
    triple_maps: BTreeMap<Triple, SpaceMap>,
}

fn key2(i: &str, j: &str) -> (Idx, Idx) {
    (i.into(), j.into())
}

fn key3(i: &str, j: &str, k: &str) -> Triple {
    (i.into(), j.into(), k.into())
}

fn mismatch(what: String, expected: &Space, found: &Space) -> DataError {
    DataError::TypeMismatch { what, expected: expected.id().into(), found: found.id().into() }
}

/// Collects the pieces of gluing data. Diagonal entries default to
/// `U(i,i) = U(i)` with identity anchor and transition when omitted; triple
/// spaces are always computed.
#[derive(Clone, Debug, Default)]
pub struct GluingDataBuilder {
    index: Vec<Idx>,
    patches: BTreeMap<Idx, Space>,
    overlaps: BTreeMap<(Idx, Idx), (Space, SpaceMap)>,
    transitions: BTreeMap<(Idx, Idx), SpaceMap>,
    triple_maps: BTreeMap<Triple, SpaceMap>,
}

impl GluingDataBuilder {
    pub fn new<S: AsRef<str>>(index: &[S]) -> Self {
        let mut ix: Vec<Idx> = index.iter().map(|s| s.as_ref().to_string()).collect();
        ix.sort();
        ix.dedup();
        GluingDataBuilder { index: ix, ..Default::default() }
    }

    pub fn patch(mut self, i: &str, space: &Space) -> Self {
        self.patches.insert(i.into(), space.clone());
        self
    }

    pub fn overlap(mut self, i: &str, j: &str, space: &Space, anchor: SpaceMap) -> Self {
        self.overlaps.insert(key2(i, j), (space.clone(), anchor));
        self
    }

    pub fn transition(mut self, i: &str, j: &str, map: SpaceMap) -> Self {
        self.transitions.insert(key2(i, j), map);
        self
    }

    pub fn triple_map(mut self, i: &str, j: &str, k: &str, map: SpaceMap) -> Self {
        self.triple_maps.insert(key3(i, j, k), map);
        self
    }

    /// Checks that every piece is present and typed consistently, then
    /// computes triple spaces. Laws are left to [`validate`].
    pub fn build(self) -> Result<GluingData, DataError> {
        if self.index.is_empty() {
            return Err(IndexError::EmptyIndexSet.into());
        }
        let known = |i: &Idx| self.index.binary_search(i).is_ok();
        for i in self.patches.keys() {
            if !known(i) {
                return Err(IndexError::UnknownIndex(i.clone()).into());
            }
        }
        for (i, j) in self.overlaps.keys().chain(self.transitions.keys()) {
            for x in [i, j] {
                if !known(x) {
                    return Err(IndexError::UnknownIndex(x.clone()).into());
                }
            }
        }
        let mut patches = BTreeMap::new();
        for i in &self.index {
            let p = self.patches.get(i).ok_or_else(|| DataError::MissingPatch(i.clone()))?;
            patches.insert(i.clone(), p.clone());
        }
        let mut overlaps = BTreeMap::new();
        let mut anchors = BTreeMap::new();
        let mut transitions = BTreeMap::new();
        for i in &self.index {
            for j in &self.index {
                let k = key2(i, j);
                let (space, anchor) = match self.overlaps.get(&k) {
                    Some((s, a)) => (s.clone(), a.clone()),
                    None if i == j => (patches[i].clone(), SpaceMap::identity(&patches[i])),
                    None => return Err(DataError::MissingOverlap(i.clone(), j.clone())),
                };
                if !same_space(anchor.dom(), &space) {
                    return Err(mismatch(format!("domain of anchor ({i},{j})"), &space, anchor.dom()));
                }
                if !same_space(anchor.cod(), &patches[i]) {
                    return Err(mismatch(format!("codomain of anchor ({i},{j})"), &patches[i], anchor.cod()));
                }
                overlaps.insert(k.clone(), space.clone());
                anchors.insert(k, anchor);
            }
        }
        for i in &self.index {
            for j in &self.index {
                let k = key2(i, j);
                let t = match self.transitions.get(&k) {
                    Some(t) => t.clone(),
                    None if i == j => SpaceMap::identity(&overlaps[&k]),
                    None => return Err(DataError::MissingTransition(i.clone(), j.clone())),
                };
                if !same_space(t.dom(), &overlaps[&k]) {
                    return Err(mismatch(format!("domain of transition ({i},{j})"), &overlaps[&k], t.dom()));
                }
                let back = key2(j, i);
                if !same_space(t.cod(), &overlaps[&back]) {
                    return Err(mismatch(format!("codomain of transition ({i},{j})"), &overlaps[&back], t.cod()));
                }
                transitions.insert(k, t);
            }
        }
        let mut triples = BTreeMap::new();
        for i in &self.index {
            for j in &self.index {
                for k in &self.index {
                    let pb = pullback_named(
                        &anchors[&key2(i, j)],
                        &anchors[&key2(i, k)],
                        &format!("T({i},{j},{k})"),
                    )?;
                    triples.insert(
                        key3(i, j, k),
                        TripleSpace { space: pb.space, first: pb.proj_f, second: pb.proj_g },
                    );
                }
            }
        }
        for ((i, j, k), m) in &self.triple_maps {
            let key = key3(i, j, k);
            let dom = triples.get(&key).ok_or_else(|| IndexError::UnknownIndex(format!("({i},{j},{k})")))?;
            let cod = &triples[&key3(j, i, k)];
            if !same_space(m.dom(), &dom.space) {
                return Err(mismatch(format!("domain of triple map ({i},{j},{k})"), &dom.space, m.dom()));
            }
            if !same_space(m.cod(), &cod.space) {
                return Err(mismatch(format!("codomain of triple map ({i},{j},{k})"), &cod.space, m.cod()));
            }
        }
        let triple_maps = self
            .triple_maps
            .into_iter()
            .map(|(k, m)| {
                let (i, j, l) = &k;
                let m = m.retyped(&triples[&k].space, &triples[&key3(j, i, l)].space).expect("checked above");
                (k, m)
            })
            .collect();
        Ok(GluingData { index: self.index, patches, overlaps, anchors, transitions, triples, triple_maps })
    }
}

/// One clause of the validator with its witnesses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub name: &'static str,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

impl Clause {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub clauses: Vec<Clause>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(Clause::passed)
    }

    pub fn clause(&self, prefix: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name.starts_with(prefix))
    }
}

impl core::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for c in &self.clauses {
            let tag = if c.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {} ({} checked)", c.name, c.checked)?;
            for w in &c.witnesses {
                writeln!(f, "    {w}")?;
            }
        }
        Ok(())
    }
}

impl GluingData {
    pub fn builder<S: AsRef<str>>(index: &[S]) -> GluingDataBuilder {
        GluingDataBuilder::new(index)
    }

    pub fn index(&self) -> &[Idx] {
        &self.index
    }

    pub fn patch(&self, i: &str) -> &Space {
        &self.patches[i]
    }

    pub fn overlap(&self, i: &str, j: &str) -> &Space {
        &self.overlaps[&key2(i, j)]
    }

    pub fn anchor(&self, i: &str, j: &str) -> &SpaceMap {
        &self.anchors[&key2(i, j)]
    }

    pub fn transition(&self, i: &str, j: &str) -> &SpaceMap {
        &self.transitions[&key2(i, j)]
    }

    pub fn triple(&self, i: &str, j: &str, k: &str) -> &TripleSpace {
        &self.triples[&key3(i, j, k)]
    }

    pub fn triple_map(&self, i: &str, j: &str, k: &str) -> Option<&SpaceMap> {
        self.triple_maps.get(&key3(i, j, k))
    }

    pub fn triple_maps(&self) -> &BTreeMap<Triple, SpaceMap> {
        &self.triple_maps
    }

    pub fn has_all_triple_maps(&self) -> bool {
        self.triple_maps.len() == self.triples.len()
    }

    /// Copy with one transition replaced (no checks beyond typing).
    pub fn with_transition(&self, i: &str, j: &str, map: SpaceMap) -> Result<GluingData, DataError> {
        self.rebuild(|b| b.transition(i, j, map))
    }

    /// Copy with one triple transition replaced.
    pub fn with_triple_map(&self, i: &str, j: &str, k: &str, map: SpaceMap) -> Result<GluingData, DataError> {
        self.rebuild(|b| b.triple_map(i, j, k, map))
    }

    /// Copy without triple transitions.
    pub fn without_triple_maps(&self) -> GluingData {
        GluingData { triple_maps: BTreeMap::new(), ..self.clone() }
    }

    pub fn to_builder(&self) -> GluingDataBuilder {
        let mut b = GluingDataBuilder::new(&self.index);
        for (i, p) in &self.patches {
            b = b.patch(i, p);
        }
        for ((i, j), s) in &self.overlaps {
            b = b.overlap(i, j, s, self.anchors[&key2(i, j)].clone());
        }
        for ((i, j), t) in &self.transitions {
            b = b.transition(i, j, t.clone());
        }
        for ((i, j, k), m) in &self.triple_maps {
            b = b.triple_map(i, j, k, m.clone());
        }
        b
    }

    fn rebuild<F: FnOnce(GluingDataBuilder) -> GluingDataBuilder>(&self, f: F) -> Result<GluingData, DataError> {
        f(self.to_builder()).build()
    }

    /// Coordinate swap `T(a,b,c) -> T(a,c,b)`.
    pub fn swap(&self, a: &str, b: &str, c: &str) -> SpaceMap {
        let src = self.triple(a, b, c);
        let dst = self.triple(a, c, b);
        let mut index = BTreeMap::new();
        for t in 0..dst.space.len() {
            index.insert((dst.first.at(t), dst.second.at(t)), t);
        }
        let table = (0..src.space.len()).map(|t| index[&(src.second.at(t), src.first.at(t))]).collect();
        SpaceMap::from_indices(&src.space, &dst.space, table).expect("swap is total")
    }

    fn all_triples(&self) -> Vec<(&Idx, &Idx, &Idx)> {
        let mut v = Vec::new();
        for i in &self.index {
            for j in &self.index {
                for k in &self.index {
                    v.push((i, j, k));
                }
            }
        }
        v
    }
}

fn diff_witness(left: &SpaceMap, right: &SpaceMap, what: &str) -> Option<String> {
    (0..left.dom().len()).find(|&x| left.at(x) != right.at(x)).map(|x| {
        format!(
            "{what}: at {} in {} one side gives {}, the other {}",
            left.dom().point(x),
            left.dom().id(),
            left.cod().point(left.at(x)),
            right.cod().point(right.at(x))
        )
    })
}

/// Checks the gluing data laws: `U(i,i) = U(i)` with identity anchor,
/// `phi(i,i) = id`, the cocycle condition, the projection condition,
/// invertibility of transitions and triple transitions, presence of every
/// triple map, and continuity of all maps.
pub fn validate(gd: &GluingData) -> ValidationReport {
    let mut clauses = Vec::new();
    let mut a = Clause { name: "a) U(i,i) = U(i) with identity anchor", checked: 0, witnesses: Vec::new() };
    let mut b = Clause { name: "b) phi(i,i) = id", checked: 0, witnesses: Vec::new() };
    for i in &gd.index {
        a.checked += 1;
        if !same_space(gd.overlap(i, i), gd.patch(i)) {
            a.witnesses.push(format!("U({i},{i}) is {}, not {}", gd.overlap(i, i).id(), gd.patch(i).id()));
        } else if *gd.anchor(i, i) != SpaceMap::identity(gd.patch(i)) {
            a.witnesses.push(format!("anchor ({i},{i}) is not the identity"));
        }
        b.checked += 1;
        let t = gd.transition(i, i);
        if let Some(x) = (0..t.dom().len()).find(|&x| t.at(x) != x) {
            b.witnesses.push(format!(
                "phi({i},{i}) sends {} to {}",
                t.dom().point(x),
                t.cod().point(t.at(x))
            ));
        }
    }
    let mut present = Clause { name: "triple maps present", checked: 0, witnesses: Vec::new() };
    let mut c = Clause {
        name: "c) cocycle: phi^j(i,k) = phi^i(j,k) . phi^k(i,j) up to swaps",
        checked: 0,
        witnesses: Vec::new(),
    };
    let mut d = Clause {
        name: "d) projection: first . phi^k(i,j) = phi(i,j) . first",
        checked: 0,
        witnesses: Vec::new(),
    };
    let mut tinv = Clause { name: "triple inverse: phi^k(j,i) . phi^k(i,j) = id", checked: 0, witnesses: Vec::new() };
    for (i, j, k) in gd.all_triples() {
        present.checked += 1;
        let Some(m) = gd.triple_map(i, j, k) else {
            present.witnesses.push(format!("missing phi^{k}({i},{j})"));
            continue;
        };
        d.checked += 1;
        let lhs = compose(&gd.triple(j, i, k).first, m).unwrap();
        let rhs = compose(gd.transition(i, j), &gd.triple(i, j, k).first).unwrap();
        if let Some(w) = diff_witness(&lhs, &rhs, &format!("phi^{k}({i},{j})")) {
            d.witnesses.push(w);
        }
        if let Some(back) = gd.triple_map(j, i, k) {
            tinv.checked += 1;
            let id = compose(back, m).unwrap();
            if let Some(w) = diff_witness(&id, &SpaceMap::identity(m.dom()), &format!("phi^{k}({j},{i}) . phi^{k}({i},{j})")) {
                tinv.witnesses.push(w);
            }
        }
        if let (Some(pik), Some(pjk)) = (gd.triple_map(i, k, j), gd.triple_map(j, k, i)) {
            c.checked += 1;
            // swap(k,i,j) . phi^j(i,k) . swap(i,j,k)  vs  phi^i(j,k) . swap(j,i,k) . phi^k(i,j)
            let lhs = compose(&gd.swap(k, i, j), &compose(pik, &gd.swap(i, j, k)).unwrap()).unwrap();
            let rhs = compose(pjk, &compose(&gd.swap(j, i, k), m).unwrap()).unwrap();
            if let Some(w) = diff_witness(&lhs, &rhs, &format!("cocycle ({i},{j},{k})")) {
                c.witnesses.push(w);
            }
        }
    }
    let mut inv = Clause { name: "inverse: phi(j,i) . phi(i,j) = id", checked: 0, witnesses: Vec::new() };
    let mut cont = Clause { name: "continuity of anchors and transitions", checked: 0, witnesses: Vec::new() };
    for i in &gd.index {
        for j in &gd.index {
            inv.checked += 1;
            let id = compose(gd.transition(j, i), gd.transition(i, j)).unwrap();
            if let Some(w) =
                diff_witness(&id, &SpaceMap::identity(gd.overlap(i, j)), &format!("phi({j},{i}) . phi({i},{j})"))
            {
                inv.witnesses.push(w);
            }
            for (what, m) in [("anchor", gd.anchor(i, j)), ("transition", gd.transition(i, j))] {
                cont.checked += 1;
                if !m.is_continuous() {
                    cont.witnesses.push(format!("{what} ({i},{j}) is not continuous"));
                }
            }
        }
    }
    for ((i, j, k), m) in &gd.triple_maps {
        cont.checked += 1;
        if !m.is_continuous() {
            cont.witnesses.push(format!("triple map phi^{k}({i},{j}) is not continuous"));
        }
    }
    clauses.extend([a, b, c, d, inv, tinv, present, cont]);
    ValidationReport { clauses }
}

/// Fills every missing triple transition with the unique map compatible
/// with the projection condition, then validates.
pub fn derive_triple_maps(gd: &GluingData) -> Result<GluingData, DataError> {
    let out = fill_triple_maps(gd)?;
    let report = validate(&out);
    if report.passed() {
        Ok(out)
    } else {
        Err(DataError::ValidationFailed(Box::new(report)))
    }
}

/// [`derive_triple_maps`] without the final validation.
pub fn fill_triple_maps(gd: &GluingData) -> Result<GluingData, DataError> {
    let mut b = gd.to_builder();
    for (i, j, k) in gd.all_triples() {
        if gd.triple_map(i, j, k).is_some() {
            continue;
        }
        let src = gd.triple(i, j, k);
        let dst = gd.triple(j, i, k);
        let phi = gd.transition(i, j);
        let mut table = Vec::with_capacity(src.space.len());
        for t in 0..src.space.len() {
            let target_first = phi.at(src.first.at(t));
            let candidates: Vec<usize> = (0..dst.space.len()).filter(|&s| dst.first.at(s) == target_first).collect();
            if candidates.len() != 1 {
                return Err(DataError::NotDetermined(
                    i.clone(),
                    j.clone(),
                    k.clone(),
                    src.space.point(t).into(),
                    candidates.len(),
                ));
            }
            table.push(candidates[0]);
        }
        b = b.triple_map(i, j, k, SpaceMap::from_indices(&src.space, &dst.space, table)?);
    }
    b.build()
}

/// The functor `Gl(I) -> Top^op` given by lawful gluing data. Object and
/// generator images are stored as continuous maps, so a generator `a -> b`
/// is stored as a map `G(b) -> G(a)`.
#[derive(Clone, Debug)]
pub struct GluingFunctor {
    data: GluingData,
    category: IndexCategory,
    objects: BTreeMap<GlObject, Space>,
    images: Vec<SpaceMap>,
}

impl GluingFunctor {
    pub fn data(&self) -> &GluingData {
        &self.data
    }

    pub fn category(&self) -> &IndexCategory {
        &self.category
    }

    pub fn index(&self) -> &[Idx] {
        self.category.index()
    }

    pub fn object(&self, a: &GlObject) -> Option<&Space> {
        self.objects.get(a)
    }

    pub fn objects(&self) -> &BTreeMap<GlObject, Space> {
        &self.objects
    }

    pub fn patch(&self, i: &str) -> &Space {
        self.data.patch(i)
    }

    /// `(generator, image)` pairs in emission order.
    pub fn generator_images(&self) -> impl Iterator<Item = (&Generator, &SpaceMap)> {
        self.category.generators().iter().zip(&self.images)
    }

    pub fn generator_image(&self, g: &Generator) -> Option<&SpaceMap> {
        self.category.generators().iter().position(|h| h == g).map(|p| &self.images[p])
    }

    /// Image of a morphism, composed along its witness path.
    pub fn eval(&self, m: &GlMorphism) -> Result<SpaceMap, DataError> {
        let start = self
            .objects
            .get(&m.dom)
            .ok_or_else(|| IndexError::UnknownObject(m.dom.to_string()))?;
        let mut acc = SpaceMap::identity(start);
        let mut cur = m.dom.clone();
        for g in &m.path {
            if g.dom() != cur {
                return Err(IndexError::CompositionMismatch {
                    first: cur.to_string(),
                    second: g.label(),
                    reason: "path is not composable".into(),
                }
                .into());
            }
            let img = self.generator_image(g).ok_or_else(|| IndexError::UnknownObject(g.label()))?;
            acc = compose(&acc, img)?;
            cur = g.cod();
        }
        if cur != m.cod {
            return Err(IndexError::UnknownObject(m.cod.to_string()).into());
        }
        Ok(acc)
    }

    /// Image of the unique morphism `a -> b`, if it exists.
    pub fn eval_hom(&self, a: &GlObject, b: &GlObject) -> Option<SpaceMap> {
        self.category.hom(a, b).map(|m| self.eval(&m).expect("canonical path evaluates"))
    }

    /// Reads the gluing data back off the functor.
    pub fn to_data(&self) -> Result<GluingData, DataError> {
        let ix = self.index().to_vec();
        let mut b = GluingDataBuilder::new(&ix);
        let img = |g: Generator| self.generator_image(&g).expect("generator").clone();
        for i in &ix {
            b = b.patch(i, &self.objects[&GlObject::Single(i.clone())]);
        }
        for i in &ix {
            for j in &ix {
                let space = self.objects[&normalize(&[i, j])?].clone();
                b = b.overlap(i, j, &space, img(Generator::Eta(i.clone(), j.clone())));
                b = b.transition(i, j, img(Generator::Tau(i.clone(), j.clone())));
            }
        }
        let skeleton = b.clone().build()?;
        for i in &ix {
            for j in &ix {
                for k in &ix {
                    let g = img(Generator::TauT(i.clone(), j.clone(), k.clone()));
                    let to_raw = transport(&skeleton, &[j, i, k], &self.objects)?;
                    let from_raw = transport(&skeleton, &[i, j, k], &self.objects)?
                        .inverse()
                        .ok_or_else(|| DataError::NotFunctorial(format!("transport ({i},{j},{k}) not invertible")))?;
                    let m = compose(&to_raw, &compose(&g, &from_raw)?)?;
                    b = b.triple_map(i, j, k, m);
                }
            }
        }
        b.build()
    }
}

/// Map from the space of the normalized object of a raw tuple to the raw
/// tuple's own space (`U(a)`, `U(a,b)` or `T(a,b,c)`).
fn transport<S: AsRef<str>>(
    gd: &GluingData,
    raw: &[S],
    objects: &BTreeMap<GlObject, Space>,
) -> Result<SpaceMap, DataError> {
    let r: Vec<&str> = raw.iter().map(|s| s.as_ref()).collect();
    let obj = normalize(&r)?;
    let g_space = objects.get(&obj).ok_or_else(|| IndexError::UnknownObject(obj.to_string()))?;
    let m = match r.len() {
        1 => SpaceMap::identity(gd.patch(r[0])),
        2 => SpaceMap::identity(gd.overlap(r[0], r[1])),
        _ if r[1] != r[2] => {
            if r[1] < r[2] {
                SpaceMap::identity(&gd.triple(r[0], r[1], r[2]).space)
            } else {
                gd.swap(r[0], r[2], r[1])
            }
        }
        _ => {
            // T(a,b,b) = U(a,b) x_U(a) U(a,b) receives the diagonal of U(a,b).
            let t = gd.triple(r[0], r[1], r[2]);
            let mut index = BTreeMap::new();
            for p in 0..t.space.len() {
                index.insert((t.first.at(p), t.second.at(p)), p);
            }
            let base = gd.overlap(r[0], r[1]);
            let table = (0..base.len()).map(|u| index[&(u, u)]).collect();
            SpaceMap::from_indices(base, &t.space, table)?
        }
    };
    if !same_space(m.dom(), g_space) {
        return Err(mismatch(format!("transport for {obj}"), g_space, m.dom()));
    }
    Ok(m)
}

/// Builds the functor of validated gluing data and checks functoriality:
/// every generator composed after the canonical path into its domain must
/// agree with the canonical path into its codomain.
pub fn functor_of(gd: &GluingData) -> Result<GluingFunctor, DataError> {
    let report = validate(gd);
    if !report.passed() {
        return Err(DataError::ValidationFailed(Box::new(report)));
    }
    let category = IndexCategory::new(gd.index())?;
    let mut objects = BTreeMap::new();
    for o in category.objects() {
        let space = match o {
            GlObject::Single(i) => gd.patch(i).clone(),
            GlObject::Pair(i, j) => gd.overlap(i, j).clone(),
            GlObject::Triple(i, j, k) => gd.triple(i, j, k).space.clone(),
        };
        objects.insert(o.clone(), space);
    }
    let mut images = Vec::with_capacity(category.generators().len());
    for g in category.generators() {
        let raw: Vec<Idx> = g.raw_cod().into_iter().map(String::from).collect();
        let data_map = match g {
            Generator::Eta(i, j) => gd.anchor(i, j).clone(),
            Generator::Tau(i, j) => gd.transition(i, j).clone(),
            Generator::EtaT(n, i, j, k) => {
                let t = gd.triple(i, j, k);
                if n == j { t.first.clone() } else { t.second.clone() }
            }
            Generator::TauT(i, j, k) => gd
                .triple_map(i, j, k)
                .ok_or_else(|| DataError::NotFunctorial(format!("missing phi^{k}({i},{j})")))?
                .clone(),
        };
        let into_cod = transport(gd, &raw, &objects)?;
        let dom_raw: Vec<&str> = g.raw_dom();
        let dom_transport = transport(gd, &dom_raw, &objects)?;
        let back = dom_transport.inverse().ok_or_else(|| {
            DataError::NotFunctorial(format!(
                "the space of {} is not homeomorphic to the space of {} (an anchor is not injective)",
                normalize(&dom_raw).map(|o| o.to_string()).unwrap_or_default(),
                dom_raw.join(",")
            ))
        })?;
        images.push(compose(&back, &compose(&data_map, &into_cod)?)?);
    }
    let fun = GluingFunctor { data: gd.clone(), category, objects, images };
    check_coherence(&fun)?;
    Ok(fun)
}

fn check_coherence(fun: &GluingFunctor) -> Result<(), DataError> {
    let cat = &fun.category;
    for s in cat.objects() {
        for (g, img) in fun.generator_images() {
            let (a, b) = (g.dom(), g.cod());
            let Some(to_a) = fun.eval_hom(s, &a) else { continue };
            let to_b = fun.eval_hom(s, &b).expect("reachable");
            let via = compose(&to_a, img)?;
            if let Some(w) = diff_witness(&via, &to_b, &format!("{} after {s} -> {a}", g.label())) {
                return Err(DataError::NotFunctorial(w));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, arc3, disc2};
    use crate::glidx::GlMorphism;

    #[test]
    fn trivial_data_validates() {
        let gd = fixtures::trivial_data(&arc3());
        let gd = derive_triple_maps(&gd).unwrap();
        assert!(validate(&gd).passed());
        let f = functor_of(&gd).unwrap();
        assert_eq!(f.objects().len(), 1);
        assert_eq!(f.object(&GlObject::Single("1".into())).unwrap(), &arc3());
    }

    #[test]
    fn circle_data_validates() {
        let gd = fixtures::gd_circ();
        let r = validate(&gd);
        assert!(r.passed(), "{r}");
        let f = functor_of(&gd).unwrap();
        let tau = f.generator_image(&Generator::Tau("1".into(), "2".into())).unwrap();
        assert!(tau.is_homeomorphism());
        let eta = f.eval(&GlMorphism::generator(&Generator::Eta("1".into(), "2".into()))).unwrap();
        assert_eq!(&eta, gd.anchor("1", "2"));
        let m = crate::glidx::compose_hom(
            &GlMorphism::generator(&Generator::Tau("1".into(), "2".into())),
            &GlMorphism::generator(&Generator::Tau("2".into(), "1".into())),
        )
        .unwrap();
        assert_eq!(f.eval(&m).unwrap(), SpaceMap::identity(gd.overlap("1", "2")));
    }

    #[test]
    fn non_inverse_transition_is_reported() {
        let gd = fixtures::gd_circ();
        let swapped = SpaceMap::new(gd.overlap("2", "1"), gd.overlap("1", "2"), [("a", "b"), ("b", "a")]).unwrap();
        let bad = gd.with_transition("2", "1", swapped).unwrap().without_triple_maps();
        let bad = bad.to_builder().build().unwrap();
        let r = validate(&bad);
        let inv = r.clause("inverse").unwrap();
        assert!(!inv.passed());
        assert!(inv.witnesses[0].contains("at a"));
    }

    #[test]
    fn derivation_rejects_collapsing_anchor() {
        let gd = fixtures::collapsing_anchor_data();
        assert!(matches!(derive_triple_maps(&gd), Err(DataError::NotDetermined(_, _, _, _, 2))));
    }

    #[test]
    fn round_trip_through_functor() {
        for gd in [fixtures::gd_circ(), fixtures::three_arc_circle(), fixtures::theta(), derive_triple_maps(&fixtures::trivial_data(&disc2())).unwrap()] {
            let f = functor_of(&gd).unwrap();
            let back = f.to_data().unwrap();
            assert_eq!(back, gd);
            assert!(validate(&back).passed());
        }
    }

    #[test]
    fn path_independence_and_invertibility() {
        let gd = fixtures::theta();
        let f = functor_of(&gd).unwrap();
        let cat = f.category();
        let s = |x: &str| x.to_string();
        // tau^j(i,k,j) against tau^k(i,j,k) . tau^i(j,k,i)
        let direct = GlMorphism::generator(&Generator::TauT(s("1"), s("3"), s("2")));
        let long = crate::glidx::compose_hom(
            &GlMorphism::generator(&Generator::TauT(s("1"), s("2"), s("3"))),
            &GlMorphism::generator(&Generator::TauT(s("2"), s("3"), s("1"))),
        )
        .unwrap();
        assert_eq!(f.eval(&direct).unwrap(), f.eval(&long).unwrap());
        for i in cat.index() {
            for j in cat.index() {
                let a = f.generator_image(&Generator::Tau(i.clone(), j.clone())).unwrap();
                let b = f.generator_image(&Generator::Tau(j.clone(), i.clone())).unwrap();
                assert_eq!(compose(a, b).unwrap(), SpaceMap::identity(b.dom()));
            }
        }
        // Every pair of objects joined by a morphism evaluates consistently
        // along every single-generator extension.
        for a in cat.objects() {
            for b in cat.objects() {
                if let Some(m) = cat.hom(a, b) {
                    assert_eq!(f.eval(&m).unwrap(), f.eval_hom(a, b).unwrap());
                }
            }
        }
    }

    #[test]
    fn missing_pieces_are_errors() {
        let a = arc3();
        let r = GluingData::builder(&["1", "2"]).patch("1", &a).patch("2", &a).build();
        assert!(matches!(r, Err(DataError::MissingOverlap(..))));
        let r = GluingData::builder(&["1"]).build();
        assert!(matches!(r, Err(DataError::MissingPatch(_))));
    }

    #[test]
    fn missing_triple_maps_fail_validation() {
        let gd = fixtures::gd_circ().without_triple_maps();
        let r = validate(&gd);
        assert!(!r.clause("triple maps present").unwrap().passed());
        assert!(matches!(functor_of(&gd), Err(DataError::ValidationFailed(_))));
    }

    #[test]
    fn corrupted_projection_reports_clause_d() {
        let gd = fixtures::broken_projection_data();
        let r = validate(&gd);
        assert!(!r.clause("d)").unwrap().passed(), "{r}");
    }
}
