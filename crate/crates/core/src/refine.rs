//! Reindexing along index maps, refinements between gluing data functors,
//! the maps they induce on glued spaces, and gluing of gluings.
//!
//! A refinement runs from a fine functor `G` of type `J` to a coarse functor
//! `F` of type `I` along `gamma: I -> J`. Its components are continuous maps
//! `G(gamma(a)) -> F(a)`, one per object `a` over `I`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::fintop::{compose, same_space, Space, SpaceMap, TopError};
use crate::gdata::{derive_triple_maps, functor_of, DataError, GluingData, GluingFunctor};
use crate::glidx::{normalize, Generator, GlMorphism, GlObject, Idx, IndexCategory, IndexError};
use crate::glue::{check_cone, glue, mediate, Cone, ConeMode, GluedSpace, GlueError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RefineError {
    #[error(transparent)]
    Top(#[from] TopError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Glue(#[from] GlueError),
    #[error("index map sends {0} outside its target")]
    BadIndexMap(Idx),
    #[error("index map misses {0}; induced maps need every fine index hit")]
    NotSurjective(Idx),
    #[error("no component for {0}")]
    MissingComponent(String),
    #[error("component for {object} cannot be completed at {point}: {candidates} candidates")]
    NotForced { object: String, point: String, candidates: usize },
    #[error("component for {object} is typed {found}, expected {expected}")]
    ComponentType { object: String, expected: String, found: String },
    #[error("refinement is not natural:\n{0}")]
    NotNatural(String),
    #[error("legs over {0} disagree: {1}")]
    LegsDisagree(Idx, String),
    #[error("induced family is not a cone: {0}")]
    NotACone(String),
    #[error("no node for {0}")]
    MissingNode(String),
    #[error("no edge for {0}")]
    MissingEdge(String),
    #[error("edge {0}: {1}")]
    EdgeMismatch(String, String),
    #[error("glued triple over ({0},{1},{2}) is not the pullback of the glued pairs: {3}")]
    HypothesisBFailed(Idx, Idx, Idx, String),
}

/// A map of index sets `gamma: I -> J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexMap {
    source: Vec<Idx>,
    target: Vec<Idx>,
    table: BTreeMap<Idx, Idx>,
}

impl IndexMap {
    pub fn new<S: AsRef<str>>(source: &[S], target: &[S], pairs: &[(S, S)]) -> Result<IndexMap, RefineError> {
        let sorted = |v: &[S]| {
            let mut v: Vec<Idx> = v.iter().map(|s| s.as_ref().to_string()).collect();
            v.sort();
            v.dedup();
            v
        };
        let (source, target) = (sorted(source), sorted(target));
        let mut table = BTreeMap::new();
        for (a, b) in pairs {
            let (a, b) = (a.as_ref().to_string(), b.as_ref().to_string());
            if source.binary_search(&a).is_err() {
                return Err(IndexError::UnknownIndex(a).into());
            }
            if target.binary_search(&b).is_err() {
                return Err(RefineError::BadIndexMap(a));
            }
            table.insert(a, b);
        }
        if let Some(i) = source.iter().find(|i| !table.contains_key(*i)) {
            return Err(RefineError::BadIndexMap(i.clone()));
        }
        Ok(IndexMap { source, target, table })
    }

    pub fn identity<S: AsRef<str>>(index: &[S]) -> IndexMap {
        let pairs: Vec<(&str, &str)> = index.iter().map(|s| (s.as_ref(), s.as_ref())).collect();
        IndexMap::new(&index.iter().map(|s| s.as_ref()).collect::<Vec<_>>(), &index.iter().map(|s| s.as_ref()).collect::<Vec<_>>(), &pairs)
            .expect("identity is total")
    }

    pub fn source(&self) -> &[Idx] {
        &self.source
    }

    pub fn target(&self) -> &[Idx] {
        &self.target
    }

    pub fn apply(&self, i: &str) -> &str {
        &self.table[i]
    }

    pub fn is_surjective(&self) -> bool {
        self.target.iter().all(|j| self.table.values().any(|v| v == j))
    }

    /// `other . self`.
    pub fn then(&self, other: &IndexMap) -> Result<IndexMap, RefineError> {
        let pairs: Vec<(String, String)> =
            self.table.iter().map(|(a, b)| (a.clone(), other.apply(b).to_string())).collect();
        IndexMap::new(&self.source, &other.target, &pairs)
    }

    pub fn object(&self, a: &GlObject) -> GlObject {
        let raw: Vec<&str> = a.raw().into_iter().map(|i| self.apply(i)).collect();
        normalize(&raw).expect("arity preserved")
    }

    pub fn generator(&self, g: &Generator) -> GlMorphism {
        let h = g.substitute(|i| self.apply(i).to_string());
        GlMorphism::generator(&h)
    }
}

/// Object and generator images of `Gl(gamma)`.
#[derive(Clone, Debug)]
pub struct Reindex {
    pub objects: BTreeMap<GlObject, GlObject>,
    pub generators: Vec<(Generator, GlMorphism)>,
}

pub fn reindex(gamma: &IndexMap) -> Result<Reindex, RefineError> {
    let cat = IndexCategory::new(gamma.source())?;
    let objects = cat.objects().iter().map(|o| (o.clone(), gamma.object(o))).collect();
    let generators = cat.generators().iter().map(|g| (g.clone(), gamma.generator(g))).collect();
    Ok(Reindex { objects, generators })
}

/// A refinement from `fine` (type `J`) to `coarse` (type `I`) along
/// `gamma: I -> J`.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub gamma: IndexMap,
    pub fine: GluingFunctor,
    pub coarse: GluingFunctor,
    pub components: BTreeMap<GlObject, SpaceMap>,
}

impl Refinement {
    /// Builds a refinement, completing missing components where the
    /// commuting conditions force a unique value.
    pub fn new(
        gamma: IndexMap,
        fine: &GluingFunctor,
        coarse: &GluingFunctor,
        components: BTreeMap<GlObject, SpaceMap>,
    ) -> Result<Refinement, RefineError> {
        if gamma.source() != coarse.index() {
            return Err(IndexError::UnknownIndex(format!("coarse index {:?}", coarse.index())).into());
        }
        if gamma.target() != fine.index() {
            return Err(IndexError::UnknownIndex(format!("fine index {:?}", fine.index())).into());
        }
        let mut r = Refinement { gamma, fine: fine.clone(), coarse: coarse.clone(), components };
        r.complete()?;
        r.typecheck()?;
        Ok(r)
    }

    /// Identity refinement of a functor.
    pub fn identity(fun: &GluingFunctor) -> Refinement {
        let components = fun.objects().iter().map(|(o, s)| (o.clone(), SpaceMap::identity(s))).collect();
        Refinement { gamma: IndexMap::identity(fun.index()), fine: fun.clone(), coarse: fun.clone(), components }
    }

    pub fn component(&self, a: &GlObject) -> Result<&SpaceMap, RefineError> {
        self.components.get(a).ok_or_else(|| RefineError::MissingComponent(a.to_string()))
    }

    fn fine_space(&self, a: &GlObject) -> &Space {
        self.fine.object(&self.gamma.object(a)).expect("reindexed object exists")
    }

    fn typecheck(&self) -> Result<(), RefineError> {
        for a in self.coarse.category().objects() {
            let c = self.component(a)?;
            let (want_dom, want_cod) = (self.fine_space(a), self.coarse.object(a).expect("object"));
            for (want, got) in [(want_dom, c.dom()), (want_cod, c.cod())] {
                if !same_space(want, got) {
                    return Err(RefineError::ComponentType {
                        object: a.to_string(),
                        expected: want.id().into(),
                        found: got.id().into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// For each missing component, in order of arity, look at generators
    /// into the object from objects whose component is known; a point's
    /// image is the unique point satisfying all of their squares.
    fn complete(&mut self) -> Result<(), RefineError> {
        let mut objs: Vec<GlObject> = self.coarse.category().objects().to_vec();
        objs.sort_by_key(|o| o.raw().len());
        for b in objs {
            if self.components.contains_key(&b) {
                continue;
            }
            let constraints: Vec<(SpaceMap, SpaceMap, SpaceMap)> = self
                .coarse
                .generator_images()
                .filter(|(g, _)| g.cod() == b && g.dom() != b)
                .filter_map(|(g, img)| {
                    let a = g.dom();
                    let rho_a = self.components.get(&a)?.clone();
                    let fine_img = self.fine.eval(&self.gamma.generator(g)).ok()?;
                    Some((img.clone(), rho_a, fine_img))
                })
                .collect();
            if constraints.is_empty() {
                return Err(RefineError::MissingComponent(b.to_string()));
            }
            let dom = self.fine_space(&b).clone();
            let cod = self.coarse.object(&b).expect("object").clone();
            let mut table = Vec::with_capacity(dom.len());
            for x in 0..dom.len() {
                let cands: Vec<usize> = (0..cod.len())
                    .filter(|&y| constraints.iter().all(|(f, rho, g)| f.at(y) == rho.at(g.at(x))))
                    .collect();
                if cands.len() != 1 {
                    return Err(RefineError::NotForced {
                        object: b.to_string(),
                        point: dom.point(x).into(),
                        candidates: cands.len(),
                    });
                }
                table.push(cands[0]);
            }
            self.components.insert(b, SpaceMap::from_indices(&dom, &cod, table)?);
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefinementReport {
    pub squares: usize,
    pub witnesses: Vec<String>,
}

impl RefinementReport {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

/// Checks naturality: for every generator `m: a -> b` over `I`,
/// `rho_a . G(gamma m) = F(m) . rho_b` as maps `G(gamma b) -> F(a)`.
pub fn check_refinement(r: &Refinement) -> Result<RefinementReport, RefineError> {
    r.typecheck()?;
    let mut rep = RefinementReport { squares: 0, witnesses: Vec::new() };
    for (g, coarse_img) in r.coarse.generator_images() {
        let (a, b) = (g.dom(), g.cod());
        let fine_img = r.fine.eval(&r.gamma.generator(g))?;
        let lhs = compose(r.component(&a)?, &fine_img)?;
        let rhs = compose(coarse_img, r.component(&b)?)?;
        rep.squares += 1;
        if let Some(x) = (0..lhs.dom().len()).find(|&x| lhs.at(x) != rhs.at(x)) {
            rep.witnesses.push(format!(
                "square of {} fails at {}: {} against {}",
                g.label(),
                lhs.dom().point(x),
                lhs.cod().point(lhs.at(x)),
                rhs.cod().point(rhs.at(x))
            ));
        }
    }
    Ok(rep)
}

/// Pastes `outer` (from `H` to `G` along `delta`) after `inner` (from `G`
/// to `F` along `gamma`): components `rho_a . sigma_gamma(a)`.
pub fn paste(inner: &Refinement, outer: &Refinement) -> Result<Refinement, RefineError> {
    let gamma = inner.gamma.then(&outer.gamma)?;
    let mut components = BTreeMap::new();
    for (a, rho) in &inner.components {
        let sigma = outer.component(&inner.gamma.object(a))?;
        components.insert(a.clone(), compose(rho, sigma)?);
    }
    Refinement::new(gamma, &outer.fine, &inner.coarse, components)
}

/// The map `Q_fine -> Q_coarse` induced by a refinement: the cone over the
/// fine functor with apex `Q_coarse` and patch legs `iota_coarse(a) . rho(a)`
/// is mediated out of the fine glued space. Needs `gamma` onto; indices of
/// `I` with the same image must give the same leg.
pub fn induced_map(r: &Refinement, fine: &GluedSpace, coarse: &GluedSpace) -> Result<SpaceMap, RefineError> {
    let rep = check_refinement(r)?;
    if !rep.passed() {
        return Err(RefineError::NotNatural(rep.witnesses.join("\n")));
    }
    let mut legs: BTreeMap<Idx, (Idx, SpaceMap)> = BTreeMap::new();
    for i in r.coarse.index() {
        let leg = compose(coarse.leg(i), r.component(&GlObject::Single(i.clone()))?)?;
        let j = r.gamma.apply(i).to_string();
        match legs.get(&j) {
            None => {
                legs.insert(j, (i.clone(), leg));
            }
            Some((i0, l0)) if *l0 != leg => {
                let x = (0..leg.dom().len()).find(|&x| leg.at(x) != l0.at(x)).expect("differ");
                return Err(RefineError::LegsDisagree(
                    j,
                    format!("{} goes to {} through {i0} but {} through {i}", leg.dom().point(x), l0.cod().point(l0.at(x)), leg.cod().point(leg.at(x))),
                ));
            }
            Some(_) => {}
        }
    }
    if let Some(j) = r.fine.index().iter().find(|j| !legs.contains_key(*j)) {
        return Err(RefineError::NotSurjective(j.clone()));
    }
    let legs = legs.into_iter().map(|(j, (_, l))| (j, l)).collect();
    let cone = Cone::from_patch_legs(&r.fine, &coarse.space, legs)?;
    let check = check_cone(&r.fine, &cone, ConeMode::Reduced)?;
    if let Some(w) = check.witnesses.first() {
        return Err(RefineError::NotACone(w.clone()));
    }
    let mu = mediate(&fine.cone, &cone)?;
    // The induced map commutes with every leg over I.
    for a in r.coarse.category().objects() {
        let lhs = compose(&mu, fine.cone.leg(&r.gamma.object(a))?)?;
        let rhs = compose(coarse.cone.leg(a)?, r.component(a)?)?;
        if lhs != rhs {
            return Err(RefineError::NotACone(format!("induced map does not commute with the legs at {a}")));
        }
    }
    Ok(mu)
}

/// A gluing whose pieces are gluings: one functor per object of `Gl(I)` and
/// one refinement per generator, running from the node at its codomain to
/// the node at its domain.
#[derive(Clone, Debug)]
pub struct GdfGluingData {
    pub index: Vec<Idx>,
    pub nodes: BTreeMap<GlObject, GluingFunctor>,
    pub edges: BTreeMap<Generator, Refinement>,
}

/// Result of [`compose_gdf`].
#[derive(Clone, Debug)]
pub struct Composed {
    pub data: GluingData,
    pub functor: GluingFunctor,
    pub node_glued: BTreeMap<GlObject, GluedSpace>,
    pub edge_maps: BTreeMap<Generator, SpaceMap>,
    /// For every triple object, the canonical map from its glued node to
    /// the pullback of the glued pair nodes (a homeomorphism).
    pub hypothesis_b: BTreeMap<GlObject, SpaceMap>,
}

impl GdfGluingData {
    /// Assembles the meta data, filling identity edges for generators whose
    /// ends coincide.
    pub fn new<S: AsRef<str>>(
        index: &[S],
        nodes: BTreeMap<GlObject, GluingFunctor>,
        mut edges: BTreeMap<Generator, Refinement>,
    ) -> Result<GdfGluingData, RefineError> {
        let cat = IndexCategory::new(index)?;
        for o in cat.objects() {
            if !nodes.contains_key(o) {
                return Err(RefineError::MissingNode(o.to_string()));
            }
        }
        for g in cat.generators() {
            if edges.contains_key(g) {
                continue;
            }
            if g.dom() == g.cod() {
                edges.insert(g.clone(), Refinement::identity(&nodes[&g.dom()]));
            } else {
                return Err(RefineError::MissingEdge(g.label()));
            }
        }
        Ok(GdfGluingData { index: cat.index().to_vec(), nodes, edges })
    }
}

/// Glues every node, turns edges into maps between the glued nodes, and
/// assembles gluing data over `I` from them. The glued triple nodes must be
/// the pullbacks of the glued pair nodes, and every edge map must agree with
/// the composed functor.
pub fn compose_gdf(meta: &GdfGluingData) -> Result<Composed, RefineError> {
    let mut node_glued = BTreeMap::new();
    for (o, f) in &meta.nodes {
        node_glued.insert(o.clone(), glue(f)?);
    }
    let mut edge_maps = BTreeMap::new();
    for (g, r) in &meta.edges {
        let (a, b) = (g.dom(), g.cod());
        let label = g.label();
        if r.fine.data() != meta.nodes[&b].data() || r.coarse.data() != meta.nodes[&a].data() {
            return Err(RefineError::EdgeMismatch(label, format!("must run from the node at {b} to the node at {a}")));
        }
        let mu = induced_map(r, &node_glued[&b], &node_glued[&a]).map_err(|e| RefineError::EdgeMismatch(label, e.to_string()))?;
        edge_maps.insert(g.clone(), mu);
    }
    let ix = &meta.index;
    let mut b = GluingData::builder(ix);
    for i in ix {
        b = b.patch(i, &node_glued[&GlObject::Single(i.clone())].space);
    }
    for i in ix {
        for j in ix {
            if i == j {
                continue;
            }
            let pair = GlObject::Pair(i.clone(), j.clone());
            b = b
                .overlap(i, j, &node_glued[&pair].space, edge_maps[&Generator::Eta(i.clone(), j.clone())].clone())
                .transition(i, j, edge_maps[&Generator::Tau(i.clone(), j.clone())].clone());
        }
    }
    let data = derive_triple_maps(&b.build()?)?;
    let functor = functor_of(&data)?;
    let cat = functor.category().clone();
    let mut hypothesis_b = BTreeMap::new();
    for t in cat.objects() {
        let GlObject::Triple(i, j, k) = t else { continue };
        let tri = data.triple(i, j, k);
        let p1 = &edge_maps[&Generator::EtaT(j.clone(), i.clone(), j.clone(), k.clone())];
        let p2 = &edge_maps[&Generator::EtaT(k.clone(), i.clone(), j.clone(), k.clone())];
        let mut index = BTreeMap::new();
        for s in 0..tri.space.len() {
            index.insert((tri.first.at(s), tri.second.at(s)), s);
        }
        let src = &node_glued[t].space;
        let mut table = Vec::with_capacity(src.len());
        for x in 0..src.len() {
            match index.get(&(p1.at(x), p2.at(x))) {
                Some(&s) => table.push(s),
                None => {
                    return Err(RefineError::HypothesisBFailed(
                        i.clone(),
                        j.clone(),
                        k.clone(),
                        format!("{} has no image in the pullback", src.point(x)),
                    ))
                }
            }
        }
        let c = SpaceMap::from_indices(src, &tri.space, table)?;
        if !c.is_homeomorphism() {
            let why = if !c.is_injective() {
                "the canonical map is not injective"
            } else if !c.is_surjective() {
                "the canonical map is not onto"
            } else {
                "the canonical map is not a homeomorphism"
            };
            return Err(RefineError::HypothesisBFailed(
                i.clone(),
                j.clone(),
                k.clone(),
                format!("{why} ({} points against {})", src.len(), tri.space.len()),
            ));
        }
        hypothesis_b.insert(t.clone(), c);
    }
    // Edge maps against the composed functor, through the canonical maps.
    let to_functor = |o: &GlObject| -> SpaceMap {
        hypothesis_b
            .get(o)
            .cloned()
            .unwrap_or_else(|| SpaceMap::identity(&node_glued[o].space))
    };
    for (g, img) in functor.generator_images() {
        let mu = &edge_maps[g];
        let lhs = compose(&to_functor(&g.dom()), mu)?;
        let rhs = compose(img, &to_functor(&g.cod()))?;
        if lhs != rhs {
            return Err(RefineError::EdgeMismatch(g.label(), "induced map disagrees with the composed functor".into()));
        }
    }
    Ok(Composed { data, functor, node_glued, edge_maps, hypothesis_b })
}

impl Composed {
    pub fn glue(&self) -> Result<GluedSpace, RefineError> {
        Ok(glue(&self.functor)?)
    }

    /// Patch legs from every node patch into `target`, composing the node's
    /// glued legs with `target`'s legs over `I`.
    pub fn two_stage_legs(&self, target: &GluedSpace) -> Result<BTreeMap<(Idx, Idx), SpaceMap>, RefineError> {
        let mut out = BTreeMap::new();
        for i in self.functor.index() {
            let node = &self.node_glued[&GlObject::Single(i.clone())];
            for (j, leg) in node.cone.patch_legs() {
                out.insert((i.clone(), j), compose(target.leg(i), &leg)?);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fintop::{enumerate_continuous_maps, find_homeomorphism, product, DEFAULT_BUDGET};
    use crate::fixtures::{self, c4, pt};
    use crate::glidx::verify_relations;
    use proptest::prelude::*;

    #[test]
    fn reindex_examples() {
        let id = IndexMap::identity(&["1", "2"]);
        let r = reindex(&id).unwrap();
        assert!(r.objects.iter().all(|(a, b)| a == b));
        let c = IndexMap::new(&["1", "2"], &["*"], &[("1", "*"), ("2", "*")]).unwrap();
        let r = reindex(&c).unwrap();
        assert_eq!(r.objects[&GlObject::Pair("1".into(), "2".into())], GlObject::Single("*".into()));
        let (_, eta) = r.generators.iter().find(|(g, _)| *g == Generator::Eta("1".into(), "2".into())).unwrap();
        assert!(eta.is_identity());
        let inj = IndexMap::new(&["1", "2"], &["1", "2", "3"], &[("1", "2"), ("2", "3")]).unwrap();
        let r = reindex(&inj).unwrap();
        assert_eq!(r.objects[&GlObject::Pair("1".into(), "2".into())], GlObject::Pair("2".into(), "3".into()));
        assert!(IndexMap::new(&["1"], &["2"], &[("1", "3")]).is_err());
    }

    #[test]
    fn identity_refinement_is_natural_and_induces_identity() {
        let (fun, g) = crate::glue::glue_data(&fixtures::gd_circ()).unwrap();
        let r = Refinement::identity(&fun);
        assert!(check_refinement(&r).unwrap().passed());
        assert_eq!(induced_map(&r, &g, &g).unwrap(), SpaceMap::identity(&g.space));
    }

    #[test]
    fn torus_edges_are_refinements() {
        let meta = fixtures::torus_meta();
        let r = &meta.edges[&Generator::Eta("1".into(), "2".into())];
        assert!(check_refinement(r).unwrap().passed());
        for r in meta.edges.values() {
            assert!(check_refinement(r).unwrap().passed());
        }
    }

    #[test]
    fn swapped_component_breaks_naturality() {
        let meta = fixtures::torus_meta();
        let mut r = meta.edges[&Generator::Eta("1".into(), "2".into())].clone();
        let key = GlObject::Pair("1".into(), "2".into());
        let c = r.components[&key].clone();
        let swapped = SpaceMap::from_fn(c.dom(), c.cod(), |p| {
            let (u, d) = fixtures::split_pair(p);
            let u = if u == "a" { "b" } else { "a" };
            format!("({u},{})", if d == "a" { "l" } else { "r" })
        })
        .unwrap();
        r.components.insert(key, swapped);
        let rep = check_refinement(&r).unwrap();
        assert!(!rep.passed());
        assert!(rep.witnesses[0].contains("fails at"));
    }

    #[test]
    fn induced_map_is_the_class_projection() {
        let meta = fixtures::torus_meta();
        let r = &meta.edges[&Generator::Eta("1".into(), "2".into())];
        let fine = glue(&r.fine).unwrap();
        let coarse = glue(&r.coarse).unwrap();
        assert_eq!((fine.space.len(), coarse.space.len()), (8, 12));
        let mu = induced_map(r, &fine, &coarse).unwrap();
        // Hand computation: class of (x,d)@p goes to class of (x,anchor(d))@p.
        for p in r.fine.index() {
            let src = fine.leg(p);
            let dst = coarse.leg(p);
            for x in 0..src.dom().len() {
                let (u, d) = fixtures::split_pair(src.dom().point(x));
                let target = format!("({u},{})", if d == "a" { "l" } else { "r" });
                let want = dst.at(dst.dom().index_of(&target).unwrap());
                assert_eq!(mu.at(src.at(x)), want);
            }
        }
    }

    #[test]
    fn collapsing_index_map_into_the_circle() {
        let (r, fine, coarse) = fixtures::point_pair_into_circle();
        assert!(check_refinement(&r).unwrap().passed());
        let mu = induced_map(&r, &fine, &coarse).unwrap();
        // Direct formula: the fine point x goes to iota_1(rho_1(x)).
        let rho = r.component(&GlObject::Single("1".into())).unwrap();
        for x in 0..fine.space.len() {
            let patch_point = fine.leg("*").table().iter().position(|&q| q == x).unwrap();
            assert_eq!(mu.at(x), coarse.leg("1").at(rho.at(patch_point)));
        }
        // Unique cone morphism, by enumeration.
        let all = enumerate_continuous_maps(&fine.space, &coarse.space, DEFAULT_BUDGET).unwrap();
        let commuting: Vec<_> = all
            .iter()
            .filter(|m| {
                r.coarse.category().objects().iter().all(|a| {
                    compose(m, fine.cone.leg(&r.gamma.object(a)).unwrap()).unwrap()
                        == compose(coarse.cone.leg(a).unwrap(), r.component(a).unwrap()).unwrap()
                })
            })
            .collect();
        assert_eq!(commuting.len(), 1);
        assert_eq!(commuting[0], &mu);
    }

    #[test]
    fn pasting_refinements() {
        let meta = fixtures::torus_meta();
        let t = GlObject::Triple("1".into(), "1".into(), "2".into());
        // [1,1,2] -> [1,2] then [1,2] -> [1]
        let inner = &meta.edges[&Generator::Eta("1".into(), "2".into())];
        let outer = &meta.edges[&Generator::EtaT("2".into(), "1".into(), "1".into(), "2".into())];
        let pasted = paste(inner, outer).unwrap();
        assert!(check_refinement(&pasted).unwrap().passed());
        assert_eq!(pasted.fine.data(), meta.nodes[&t].data());
        let direct = &meta.edges[&Generator::EtaT("1".into(), "1".into(), "1".into(), "2".into())];
        assert_eq!(pasted.components, direct.components);
    }

    #[test]
    fn composing_the_torus() {
        let meta = fixtures::torus_meta();
        let comp = compose_gdf(&meta).unwrap();
        assert_eq!(comp.hypothesis_b.len(), 2);
        let q = comp.glue().unwrap();
        assert_eq!(q.space.len(), 16);
        let c4c4 = product(&c4(), &c4()).unwrap();
        assert!(find_homeomorphism(&q.space, &c4c4, DEFAULT_BUDGET).unwrap().is_some());
        // One-stage gluing of the four squares.
        let (flat_fun, flat) = crate::glue::glue_data(&fixtures::torus_flat()).unwrap();
        let legs = comp.two_stage_legs(&q).unwrap();
        let flat_legs: BTreeMap<Idx, SpaceMap> =
            legs.iter().map(|((i, j), m)| (fixtures::flat_label(j, i), m.clone())).collect();
        let to_two = Cone::from_patch_legs(&flat_fun, &q.space, flat_legs).unwrap();
        let forward = mediate(&flat.cone, &to_two).unwrap();
        // Back: per node, mediate its glued space into the flat space.
        let mut back_legs = BTreeMap::new();
        for i in comp.functor.index() {
            let node_fun = &meta.nodes[&GlObject::Single(i.clone())];
            let node = &comp.node_glued[&GlObject::Single(i.clone())];
            let legs = node_fun.index().iter().map(|j| (j.clone(), flat.leg(&fixtures::flat_label(j, i)).clone())).collect();
            let cone = Cone::from_patch_legs(node_fun, &flat.space, legs).unwrap();
            back_legs.insert(i.clone(), mediate(&node.cone, &cone).unwrap());
        }
        let to_flat = Cone::from_patch_legs(&comp.functor, &flat.space, back_legs).unwrap();
        let backward = mediate(&q.cone, &to_flat).unwrap();
        assert_eq!(compose(&backward, &forward).unwrap(), SpaceMap::identity(&flat.space));
        assert_eq!(compose(&forward, &backward).unwrap(), SpaceMap::identity(&q.space));
    }

    #[test]
    fn hypothesis_b_counter_fixture() {
        let meta = fixtures::torus_meta_with_extra_point();
        for r in meta.edges.values() {
            assert!(check_refinement(r).unwrap().passed());
        }
        assert!(matches!(compose_gdf(&meta), Err(RefineError::HypothesisBFailed(..))));
    }

    #[test]
    fn single_node_meta_glues_the_node() {
        let fun = functor_of(&fixtures::gd_circ()).unwrap();
        let mut nodes = BTreeMap::new();
        nodes.insert(GlObject::Single("1".into()), fun.clone());
        let meta = GdfGluingData::new(&["1"], nodes, BTreeMap::new()).unwrap();
        let comp = compose_gdf(&meta).unwrap();
        let q = comp.glue().unwrap();
        assert!(find_homeomorphism(&q.space, &c4(), DEFAULT_BUDGET).unwrap().is_some());
        let _ = pt();
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn reindex_preserves_morphisms(n in 1usize..4, m in 1usize..4, table in proptest::collection::vec(0usize..4, 4)) {
            let src: Vec<String> = (1..=n).map(|i| format!("{i}")).collect();
            let dst: Vec<String> = (1..=m).map(|i| format!("t{i}")).collect();
            let pairs: Vec<(String, String)> = src.iter().enumerate().map(|(k, i)| (i.clone(), dst[table[k] % m].clone())).collect();
            let gamma = IndexMap::new(&src, &dst, &pairs).unwrap();
            let s = IndexCategory::new(&src).unwrap();
            let t = IndexCategory::new(&dst).unwrap();
            for a in s.objects() {
                for b in s.objects() {
                    if s.has_hom(a, b) {
                        prop_assert!(t.has_hom(&gamma.object(a), &gamma.object(b)));
                    }
                }
            }
            for (g, img) in reindex(&gamma).unwrap().generators {
                prop_assert_eq!(img.dom, gamma.object(&g.dom()));
                prop_assert_eq!(img.cod, gamma.object(&g.cod()));
            }
            prop_assert!(verify_relations(&dst).unwrap().passed());
        }
    }
}
