//! Finite topological spaces stored as minimal-open tables, continuous maps
//! between them, and the constructions gluing needs: subspaces, products,
//! disjoint unions, pullbacks and quotients with the final topology.
//!
//! A finite topology is determined by the minimal open set `U_x` of every
//! point `x`. A subset `S` is open iff `U_x ⊆ S` for all `x ∈ S`; a map `f`
//! is continuous iff `f(U_x) ⊆ U_{f(x)}` for every `x`.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::pointset::PointSet;

/// Default cap on candidate functions (or search nodes) explored by oracles.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Shared handle to an immutable space. Maps hold these so every map can be
/// analyzed without a separate registry.
pub type Space = Arc<FiniteSpace>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TopError {
    #[error("invalid topology on {space}: {point} is not in its own minimal open set")]
    NotReflexive { space: String, point: String },
    #[error("invalid topology on {space}: {y} is in min_open({x}) but min_open({y}) is not contained in min_open({x})")]
    InvalidTopology { space: String, x: String, y: String },
    #[error("unknown point {point} in space {space}")]
    UnknownPoint { space: String, point: String },
    #[error("duplicate point {point} in space {space}")]
    DuplicatePoint { space: String, point: String },
    #[error("no minimal open set given for point {point} of {space}")]
    MissingMinOpen { space: String, point: String },
    #[error("map {dom} -> {cod}: {reason}")]
    BadTable { dom: String, cod: String, reason: String },
    #[error("cannot compose: codomain {left} does not match domain {right}")]
    CompositionMismatch { left: String, right: String },
    #[error("search budget exceeded: {needed} candidates needed, budget is {budget}")]
    SearchBudgetExceeded { needed: u128, budget: u64 },
}

/// A finite topological space. Points are kept sorted by name so that equal
/// tables always compare equal regardless of declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteSpace {
    id: String,
    points: Vec<String>,
    min_open: Vec<PointSet>,
}

pub(crate) fn fmt_set<'a, I: IntoIterator<Item = &'a str>>(it: I) -> String {
    let mut s = String::from("{");
    for (n, p) in it.into_iter().enumerate() {
        if n > 0 {
            s.push(',');
        }
        s.push_str(p);
    }
    s.push('}');
    s
}

impl FiniteSpace {
    /// Validated constructor from a point list and a minimal-open table.
    pub fn make_space<P, Q, R>(id: &str, points: P, table: R) -> Result<Space, TopError>
    where
        P: IntoIterator<Item = Q>,
        Q: AsRef<str>,
        R: IntoIterator<Item = (Q, Vec<Q>)>,
    {
        let mut names: Vec<String> = Vec::new();
        for p in points {
            names.push(p.as_ref().to_string());
        }
        let mut sorted = names.clone();
        sorted.sort();
        for w in sorted.windows(2) {
            if w[0] == w[1] {
                return Err(TopError::DuplicatePoint { space: id.into(), point: w[0].clone() });
            }
        }
        let n = sorted.len();
        let find = |p: &str| -> Result<usize, TopError> {
            sorted
                .binary_search_by(|q| q.as_str().cmp(p))
                .map_err(|_| TopError::UnknownPoint { space: id.into(), point: p.into() })
        };
        let mut sets: Vec<Option<PointSet>> = vec![None; n];
        for (x, ys) in table {
            let xi = find(x.as_ref())?;
            let mut s = PointSet::empty(n);
            for y in ys {
                s.insert(find(y.as_ref())?);
            }
            if sets[xi].is_some() {
                return Err(TopError::DuplicatePoint { space: id.into(), point: sorted[xi].clone() });
            }
            sets[xi] = Some(s);
        }
        let mut min_open = Vec::with_capacity(n);
        for (i, s) in sets.into_iter().enumerate() {
            match s {
                Some(s) => min_open.push(s),
                None => {
                    return Err(TopError::MissingMinOpen { space: id.into(), point: sorted[i].clone() })
                }
            }
        }
        let sp = FiniteSpace { id: id.into(), points: sorted, min_open };
        sp.validate()?;
        Ok(Arc::new(sp))
    }

    /// Constructor taking the points from the table's keys.
    pub fn from_table<Q: AsRef<str> + Clone>(id: &str, table: Vec<(Q, Vec<Q>)>) -> Result<Space, TopError> {
        let points: Vec<Q> = table.iter().map(|(p, _)| p.clone()).collect();
        Self::make_space(id, points, table)
    }

    /// Topology generated by `opens`: the minimal open set of `x` is the
    /// intersection of every generator containing `x` (the whole space if
    /// none does).
    pub fn from_opens<P, Q>(id: &str, points: P, opens: &[Vec<Q>]) -> Result<Space, TopError>
    where
        P: IntoIterator<Item = Q>,
        Q: AsRef<str>,
    {
        let names: Vec<String> = points.into_iter().map(|p| p.as_ref().to_string()).collect();
        let n = names.len();
        let mut gens = Vec::new();
        for o in opens {
            let mut s = PointSet::empty(n);
            for p in o {
                let i = names
                    .iter()
                    .position(|q| q == p.as_ref())
                    .ok_or_else(|| TopError::UnknownPoint { space: id.into(), point: p.as_ref().into() })?;
                s.insert(i);
            }
            gens.push(s);
        }
        let sets: Vec<PointSet> = (0..n)
            .map(|x| {
                let mut m = PointSet::full(n);
                for g in gens.iter().filter(|g| g.contains(x)) {
                    m.intersect_with(g);
                }
                m
            })
            .collect();
        Ok(Arc::new(Self::from_indexed(id.into(), names, sets)?.0))
    }

    /// Builds a space from names in arbitrary order. Returns the space and
    /// the permutation taking each input position to its sorted index.
    pub(crate) fn from_indexed(
        id: String,
        names: Vec<String>,
        sets: Vec<PointSet>,
    ) -> Result<(FiniteSpace, Vec<usize>), TopError> {
        let n = names.len();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| names[a].cmp(&names[b]));
        for w in order.windows(2) {
            if names[w[0]] == names[w[1]] {
                return Err(TopError::DuplicatePoint { space: id, point: names[w[0]].clone() });
            }
        }
        let mut perm = vec![0; n];
        for (new, &old) in order.iter().enumerate() {
            perm[old] = new;
        }
        let points: Vec<String> = order.iter().map(|&o| names[o].clone()).collect();
        let min_open = order
            .iter()
            .map(|&o| PointSet::from_indices(n, sets[o].iter().map(|y| perm[y])))
            .collect();
        let sp = FiniteSpace { id, points, min_open };
        sp.validate()?;
        Ok((sp, perm))
    }

    fn validate(&self) -> Result<(), TopError> {
        for (x, m) in self.min_open.iter().enumerate() {
            if !m.contains(x) {
                return Err(TopError::NotReflexive { space: self.id.clone(), point: self.points[x].clone() });
            }
            for y in m.iter() {
                if !self.min_open[y].is_subset(m) {
                    return Err(TopError::InvalidTopology {
                        space: self.id.clone(),
                        x: self.points[x].clone(),
                        y: self.points[y].clone(),
                    });
                }
            }
        }
        Ok(())
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    /// Same topology under a different identifier.
    pub fn renamed(&self, id: &str) -> Space {
        Arc::new(FiniteSpace { id: id.into(), ..self.clone() })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &str {
        &self.points[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.points.binary_search_by(|p| p.as_str().cmp(name)).ok()
    }

    pub fn require(&self, name: &str) -> Result<usize, TopError> {
        self.index_of(name)
            .ok_or_else(|| TopError::UnknownPoint { space: self.id.clone(), point: name.into() })
    }

    pub fn min_open(&self, i: usize) -> &PointSet {
        &self.min_open[i]
    }

    pub fn min_open_of(&self, name: &str) -> Result<Vec<&str>, TopError> {
        let i = self.require(name)?;
        Ok(self.min_open[i].iter().map(|j| self.point(j)).collect())
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<PointSet, TopError> {
        let mut s = self.empty_set();
        for n in names {
            s.insert(self.require(n.as_ref())?);
        }
        Ok(s)
    }

    pub fn names_of(&self, s: &PointSet) -> Vec<&str> {
        s.iter().map(|i| self.point(i)).collect()
    }

    pub fn fmt_points(&self, s: &PointSet) -> String {
        fmt_set(self.names_of(s))
    }

    pub fn is_open<S: AsRef<str>>(&self, names: &[S]) -> Result<bool, TopError> {
        Ok(self.is_open_set(&self.set_of(names)?))
    }

    pub fn is_open_set(&self, s: &PointSet) -> bool {
        s.iter().all(|x| self.min_open[x].is_subset(s))
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: &PointSet) -> PointSet {
        let mut h = self.empty_set();
        for x in s.iter() {
            h.union_with(&self.min_open[x]);
        }
        h
    }

    /// Points whose minimal open set contains `x` (the "in-degree" side of
    /// the specialization preorder).
    pub fn up_count(&self, x: usize) -> usize {
        self.min_open.iter().filter(|m| m.contains(x)).count()
    }
}

impl fmt::Display for FiniteSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.id)?;
        for (i, p) in self.points.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{p}: {}", self.fmt_points(&self.min_open[i]))?;
        }
        write!(f, "]")
    }
}

pub fn same_space(a: &Space, b: &Space) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// A total function between the point sets of two spaces.
#[derive(Clone, Debug)]
pub struct SpaceMap {
    dom: Space,
    cod: Space,
    table: Vec<usize>,
}

impl PartialEq for SpaceMap {
    fn eq(&self, other: &Self) -> bool {
        self.table == other.table && same_space(&self.dom, &other.dom) && same_space(&self.cod, &other.cod)
    }
}

impl Eq for SpaceMap {}

/// Property flags of a map, with human-readable witnesses for each failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapReport {
    pub continuous: bool,
    pub injective: bool,
    pub open_map: bool,
    pub embedding: bool,
    pub witnesses: Vec<String>,
}

impl SpaceMap {
    /// Builds a map from `(source, target)` name pairs covering the domain.
    pub fn new<A: AsRef<str>, B: AsRef<str>>(
        dom: &Space,
        cod: &Space,
        pairs: impl IntoIterator<Item = (A, B)>,
    ) -> Result<SpaceMap, TopError> {
        let mut table = vec![usize::MAX; dom.len()];
        for (a, b) in pairs {
            let x = dom.require(a.as_ref())?;
            let y = cod.require(b.as_ref())?;
            if table[x] != usize::MAX {
                return Err(TopError::BadTable {
                    dom: dom.id.clone(),
                    cod: cod.id.clone(),
                    reason: format!("point {} listed twice", a.as_ref()),
                });
            }
            table[x] = y;
        }
        Self::from_indices(dom, cod, table)
    }

    /// Builds a map by applying a naming function to every domain point.
    pub fn from_fn<F: FnMut(&str) -> String>(dom: &Space, cod: &Space, mut f: F) -> Result<SpaceMap, TopError> {
        let pairs: Vec<(String, String)> = dom.points.iter().map(|p| (p.clone(), f(p))).collect();
        Self::new(dom, cod, pairs)
    }

    pub fn from_indices(dom: &Space, cod: &Space, table: Vec<usize>) -> Result<SpaceMap, TopError> {
        if table.len() != dom.len() {
            return Err(TopError::BadTable {
                dom: dom.id.clone(),
                cod: cod.id.clone(),
                reason: format!("table has {} entries for {} points", table.len(), dom.len()),
            });
        }
        if let Some(x) = table.iter().position(|&y| y >= cod.len()) {
            let reason = if table[x] == usize::MAX {
                format!("no image given for {}", dom.point(x))
            } else {
                format!("image of {} out of range", dom.point(x))
            };
            return Err(TopError::BadTable { dom: dom.id.clone(), cod: cod.id.clone(), reason });
        }
        Ok(SpaceMap { dom: dom.clone(), cod: cod.clone(), table })
    }

    pub fn identity(space: &Space) -> SpaceMap {
        SpaceMap { dom: space.clone(), cod: space.clone(), table: (0..space.len()).collect() }
    }

    pub fn constant(dom: &Space, cod: &Space, target: &str) -> Result<SpaceMap, TopError> {
        let y = cod.require(target)?;
        Ok(SpaceMap { dom: dom.clone(), cod: cod.clone(), table: vec![y; dom.len()] })
    }

    pub fn dom(&self) -> &Space {
        &self.dom
    }

    pub fn cod(&self) -> &Space {
        &self.cod
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn at(&self, x: usize) -> usize {
        self.table[x]
    }

    pub fn apply(&self, name: &str) -> Option<&str> {
        self.dom.index_of(name).map(|x| self.cod.point(self.table[x]))
    }

    /// `(source, target)` name pairs in domain order.
    pub fn pairs(&self) -> Vec<(&str, &str)> {
        (0..self.dom.len()).map(|x| (self.dom.point(x), self.cod.point(self.table[x]))).collect()
    }

    /// `self ∘ f`.
    pub fn after(&self, f: &SpaceMap) -> Result<SpaceMap, TopError> {
        compose(self, f)
    }

    /// Same table viewed between (structurally equal) other handles.
    pub fn retyped(&self, dom: &Space, cod: &Space) -> Result<SpaceMap, TopError> {
        if !same_space(dom, &self.dom) || !same_space(cod, &self.cod) {
            return Err(TopError::CompositionMismatch { left: self.dom.id.clone(), right: dom.id.clone() });
        }
        Ok(SpaceMap { dom: dom.clone(), cod: cod.clone(), table: self.table.clone() })
    }

    pub fn image_of(&self, s: &PointSet) -> PointSet {
        PointSet::from_indices(self.cod.len(), s.iter().map(|x| self.table[x]))
    }

    pub fn image(&self) -> PointSet {
        self.image_of(&self.dom.full_set())
    }

    pub fn preimage(&self, s: &PointSet) -> PointSet {
        PointSet::from_indices(self.dom.len(), (0..self.dom.len()).filter(|&x| s.contains(self.table[x])))
    }

    pub fn is_continuous(&self) -> bool {
        (0..self.dom.len()).all(|x| self.image_of(self.dom.min_open(x)).is_subset(self.cod.min_open(self.table[x])))
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = self.cod.empty_set();
        self.table.iter().all(|&y| seen.insert(y))
    }

    pub fn is_surjective(&self) -> bool {
        self.image().len() == self.cod.len()
    }

    pub fn is_open_map(&self) -> bool {
        (0..self.dom.len()).all(|x| self.cod.is_open_set(&self.image_of(self.dom.min_open(x))))
    }

    pub fn is_embedding(&self) -> bool {
        self.is_injective() && self.is_continuous() && self.embedding_condition().is_none()
    }

    pub fn is_homeomorphism(&self) -> bool {
        self.inverse().is_some()
    }

    fn embedding_condition(&self) -> Option<usize> {
        let img = self.image();
        (0..self.dom.len()).find(|&x| {
            self.image_of(self.dom.min_open(x)) != self.cod.min_open(self.table[x]).intersection(&img)
        })
    }

    /// Inverse map when `self` is a homeomorphism.
    pub fn inverse(&self) -> Option<SpaceMap> {
        if self.dom.len() != self.cod.len() || !self.is_injective() || !self.is_continuous() {
            return None;
        }
        let mut inv = vec![0; self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            inv[y] = x;
        }
        let g = SpaceMap { dom: self.cod.clone(), cod: self.dom.clone(), table: inv };
        g.is_continuous().then_some(g)
    }

    pub fn analyze(&self) -> MapReport {
        let mut witnesses = Vec::new();
        let mut continuous = true;
        let mut open_map = true;
        for x in 0..self.dom.len() {
            let img = self.image_of(self.dom.min_open(x));
            let fx = self.table[x];
            if !img.is_subset(self.cod.min_open(fx)) {
                continuous = false;
                witnesses.push(format!(
                    "continuity: image of min_open({}) is {}, not inside min_open({}) = {}",
                    self.dom.point(x),
                    self.cod.fmt_points(&img),
                    self.cod.point(fx),
                    self.cod.fmt_points(self.cod.min_open(fx))
                ));
            }
            if !self.cod.is_open_set(&img) {
                open_map = false;
                witnesses.push(format!(
                    "openness: image of min_open({}) is {}, not open in {}",
                    self.dom.point(x),
                    self.cod.fmt_points(&img),
                    self.cod.id
                ));
            }
        }
        let mut injective = true;
        let mut first: Vec<Option<usize>> = vec![None; self.cod.len()];
        for (x, &y) in self.table.iter().enumerate() {
            if let Some(x0) = first[y] {
                injective = false;
                witnesses.push(format!(
                    "injectivity: {} and {} both map to {}",
                    self.dom.point(x0),
                    self.dom.point(x),
                    self.cod.point(y)
                ));
            } else {
                first[y] = Some(x);
            }
        }
        let mut embedding = injective && continuous;
        if embedding {
            if let Some(x) = self.embedding_condition() {
                embedding = false;
                witnesses.push(format!(
                    "embedding: image of min_open({}) differs from min_open({}) restricted to the image",
                    self.dom.point(x),
                    self.cod.point(self.table[x])
                ));
            }
        }
        MapReport { continuous, injective, open_map, embedding, witnesses }
    }
}

impl fmt::Display for SpaceMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} {{", self.dom.id, self.cod.id)?;
        for (n, (a, b)) in self.pairs().into_iter().enumerate() {
            if n > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{a}->{b}")?;
        }
        write!(f, "}}")
    }
}

/// `g ∘ f`.
pub fn compose(g: &SpaceMap, f: &SpaceMap) -> Result<SpaceMap, TopError> {
    if !same_space(&f.cod, &g.dom) {
        return Err(TopError::CompositionMismatch { left: f.cod.id.clone(), right: g.dom.id.clone() });
    }
    Ok(SpaceMap { dom: f.dom.clone(), cod: g.cod.clone(), table: f.table.iter().map(|&y| g.table[y]).collect() })
}

/// Subspace on the named points, with its inclusion.
pub fn subspace<S: AsRef<str>>(space: &Space, names: &[S]) -> Result<(Space, SpaceMap), TopError> {
    let keep = space.set_of(names)?;
    let id = format!("{}{}", space.id, space.fmt_points(&keep));
    subspace_on(space, &keep, &id)
}

pub fn subspace_on(space: &Space, keep: &PointSet, id: &str) -> Result<(Space, SpaceMap), TopError> {
    let old: Vec<usize> = keep.iter().collect();
    let names = old.iter().map(|&x| space.point(x).to_string()).collect();
    let sets = old
        .iter()
        .map(|&x| {
            PointSet::from_indices(
                old.len(),
                space.min_open(x).iter().filter_map(|y| old.iter().position(|&o| o == y)),
            )
        })
        .collect();
    let (sub, perm) = FiniteSpace::from_indexed(id.into(), names, sets)?;
    let sub = Arc::new(sub);
    let mut table = vec![0; old.len()];
    for (pos, &x) in old.iter().enumerate() {
        table[perm[pos]] = x;
    }
    let inc = SpaceMap::from_indices(&sub, space, table)?;
    Ok((sub, inc))
}

/// Product space with points named `(x,y)`.
pub fn product(a: &Space, b: &Space) -> Result<Space, TopError> {
    let id = format!("{}x{}", a.id, b.id);
    product_named(a, b, &id)
}

pub fn product_named(a: &Space, b: &Space, id: &str) -> Result<Space, TopError> {
    let nb = b.len();
    let n = a.len() * nb;
    let mut names = Vec::with_capacity(n);
    let mut sets = Vec::with_capacity(n);
    for x in 0..a.len() {
        for y in 0..nb {
            names.push(format!("({},{})", a.point(x), b.point(y)));
            let mut s = PointSet::empty(n);
            for x2 in a.min_open(x).iter() {
                for y2 in b.min_open(y).iter() {
                    s.insert(x2 * nb + y2);
                }
            }
            sets.push(s);
        }
    }
    Ok(Arc::new(FiniteSpace::from_indexed(id.into(), names, sets)?.0))
}

/// Projections out of a product built by [`product`].
pub fn product_projections(a: &Space, b: &Space, p: &Space) -> Result<(SpaceMap, SpaceMap), TopError> {
    let mut ta = vec![0; p.len()];
    let mut tb = vec![0; p.len()];
    for x in 0..a.len() {
        for y in 0..b.len() {
            let q = p.require(&format!("({},{})", a.point(x), b.point(y)))?;
            ta[q] = x;
            tb[q] = y;
        }
    }
    Ok((SpaceMap::from_indices(p, a, ta)?, SpaceMap::from_indices(p, b, tb)?))
}

/// Coproduct together with its injections.
#[derive(Clone, Debug)]
pub struct Coproduct {
    pub space: Space,
    pub injections: Vec<SpaceMap>,
}

/// Disjoint union with positional tags: point `x` of part `i` is `x@i`.
pub fn disjoint_union(spaces: &[Space]) -> Result<Coproduct, TopError> {
    let parts: Vec<(String, Space)> = spaces.iter().enumerate().map(|(i, s)| (i.to_string(), s.clone())).collect();
    disjoint_union_tagged(&parts)
}

/// Disjoint union where part `(tag, X)` contributes points `x@tag`.
pub fn disjoint_union_tagged(parts: &[(String, Space)]) -> Result<Coproduct, TopError> {
    let mut offsets = Vec::with_capacity(parts.len());
    let mut n = 0;
    for (_, s) in parts {
        offsets.push(n);
        n += s.len();
    }
    let mut names = Vec::with_capacity(n);
    let mut sets = Vec::with_capacity(n);
    for ((tag, s), &off) in parts.iter().zip(&offsets) {
        for x in 0..s.len() {
            names.push(format!("{}@{}", s.point(x), tag));
            sets.push(PointSet::from_indices(n, s.min_open(x).iter().map(|y| y + off)));
        }
    }
    let id = format!(
        "coprod({})",
        parts.iter().map(|(t, s)| format!("{}@{}", s.id, t)).collect::<Vec<_>>().join(",")
    );
    let (space, perm) = FiniteSpace::from_indexed(id, names, sets)?;
    let space = Arc::new(space);
    let mut injections = Vec::with_capacity(parts.len());
    for ((_, s), &off) in parts.iter().zip(&offsets) {
        let table = (0..s.len()).map(|x| perm[off + x]).collect();
        injections.push(SpaceMap::from_indices(s, &space, table)?);
    }
    Ok(Coproduct { space, injections })
}

/// Pullback of a cospan with its two projections.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub space: Space,
    pub proj_f: SpaceMap,
    pub proj_g: SpaceMap,
}

/// Points `(u,v)` with `f(u) = g(v)`, topologized as a subspace of the
/// product.
pub fn pullback(f: &SpaceMap, g: &SpaceMap) -> Result<Pullback, TopError> {
    let id = format!("({}x[{}]{})", f.dom.id, f.cod.id, g.dom.id);
    pullback_named(f, g, &id)
}

pub fn pullback_named(f: &SpaceMap, g: &SpaceMap, id: &str) -> Result<Pullback, TopError> {
    if !same_space(&f.cod, &g.cod) {
        return Err(TopError::CompositionMismatch { left: f.cod.id.clone(), right: g.cod.id.clone() });
    }
    let mut pairs = Vec::new();
    for u in 0..f.dom.len() {
        for v in 0..g.dom.len() {
            if f.table[u] == g.table[v] {
                pairs.push((u, v));
            }
        }
    }
    let n = pairs.len();
    let names = pairs.iter().map(|&(u, v)| format!("({},{})", f.dom.point(u), g.dom.point(v))).collect();
    let sets = pairs
        .iter()
        .map(|&(u, v)| {
            PointSet::from_indices(
                n,
                pairs.iter().enumerate().filter_map(|(k, &(u2, v2))| {
                    (f.dom.min_open(u).contains(u2) && g.dom.min_open(v).contains(v2)).then_some(k)
                }),
            )
        })
        .collect();
    let (space, perm) = FiniteSpace::from_indexed(id.into(), names, sets)?;
    let space = Arc::new(space);
    let mut tf = vec![0; n];
    let mut tg = vec![0; n];
    for (k, &(u, v)) in pairs.iter().enumerate() {
        tf[perm[k]] = u;
        tg[perm[k]] = v;
    }
    Ok(Pullback {
        proj_f: SpaceMap::from_indices(&space, &f.dom, tf)?,
        proj_g: SpaceMap::from_indices(&space, &g.dom, tg)?,
        space,
    })
}

/// Quotient space with its projection and the members of each class
/// (indexed like the quotient's points).
#[derive(Clone, Debug)]
pub struct Quotient {
    pub space: Space,
    pub projection: SpaceMap,
    pub classes: Vec<PointSet>,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = x;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as root so roots are least members.
        if ra < rb {
            self.parent[rb] = ra;
        } else if rb < ra {
            self.parent[ra] = rb;
        }
    }
}

/// Quotient by the equivalence relation generated by named pairs.
pub fn quotient<S: AsRef<str>>(space: &Space, pairs: &[(S, S)]) -> Result<Quotient, TopError> {
    let mut idx = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        idx.push((space.require(a.as_ref())?, space.require(b.as_ref())?));
    }
    quotient_indices(space, &idx)
}

/// Quotient by index pairs. Classes are named after their least member and
/// carry the final topology: the minimal open set of a class is the least
/// saturated open set containing it.
pub fn quotient_indices(space: &Space, pairs: &[(usize, usize)]) -> Result<Quotient, TopError> {
    let n = space.len();
    let mut uf = UnionFind::new(n);
    for &(a, b) in pairs {
        if a >= n || b >= n {
            return Err(TopError::UnknownPoint { space: space.id.clone(), point: format!("#{}", a.max(b)) });
        }
        uf.union(a, b);
    }
    let roots: Vec<usize> = (0..n).map(|x| uf.find(x)).collect();
    let reps: Vec<usize> = (0..n).filter(|&x| roots[x] == x).collect();
    // Points are sorted by name, so the root (least index) is the least name.
    let class_of: Vec<usize> = roots.iter().map(|r| reps.binary_search(r).unwrap()).collect();
    let k = reps.len();
    let mut members = vec![PointSet::empty(n); k];
    for x in 0..n {
        members[class_of[x]].insert(x);
    }
    let saturate = |s: &PointSet| {
        let mut t = PointSet::empty(n);
        for x in s.iter() {
            t.union_with(&members[class_of[x]]);
        }
        t
    };
    let mut sets = Vec::with_capacity(k);
    for m in &members {
        let mut cur = m.clone();
        loop {
            let next = saturate(&space.open_hull(&cur));
            if next == cur {
                break;
            }
            cur = next;
        }
        sets.push(PointSet::from_indices(k, cur.iter().map(|x| class_of[x])));
    }
    let names = reps.iter().map(|&r| space.point(r).to_string()).collect();
    let id = format!("{}/~", space.id);
    let (q, perm) = FiniteSpace::from_indexed(id, names, sets)?;
    // reps are already in name order, so perm is the identity.
    debug_assert!(perm.iter().enumerate().all(|(a, &b)| a == b));
    let q = Arc::new(q);
    let projection = SpaceMap::from_indices(space, &q, class_of)?;
    Ok(Quotient { space: q, projection, classes: members })
}

fn candidate_count(a: usize, b: usize) -> u128 {
    let mut c: u128 = 1;
    for _ in 0..a {
        c = c.saturating_mul(b as u128);
    }
    c
}

/// All continuous maps `A -> B`, in lexicographic order of their tables.
/// Fails when `|B|^|A|` exceeds `budget`.
pub fn enumerate_continuous_maps(a: &Space, b: &Space, budget: u64) -> Result<Vec<SpaceMap>, TopError> {
    let needed = candidate_count(a.len(), b.len());
    if needed > budget as u128 {
        return Err(TopError::SearchBudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    let mut table = vec![0usize; a.len()];
    fn go(a: &Space, b: &Space, x: usize, table: &mut Vec<usize>, out: &mut Vec<SpaceMap>) {
        if x == a.len() {
            out.push(SpaceMap { dom: a.clone(), cod: b.clone(), table: table.clone() });
            return;
        }
        for y in 0..b.len() {
            let ok = (0..x).all(|z| {
                (!a.min_open(x).contains(z) || b.min_open(y).contains(table[z]))
                    && (!a.min_open(z).contains(x) || b.min_open(table[z]).contains(y))
            });
            if ok {
                table[x] = y;
                go(a, b, x + 1, table, out);
            }
        }
    }
    go(a, b, 0, &mut table, &mut out);
    Ok(out)
}

/// Searches for a homeomorphism `A -> B`, pruning by the signature
/// `(|min_open(x)|, number of minimal opens containing x)`. `budget` bounds
/// the number of search nodes.
pub fn find_homeomorphism(a: &Space, b: &Space, budget: u64) -> Result<Option<SpaceMap>, TopError> {
    Ok(homeomorphism_search(a, b, budget, false)?.into_iter().next())
}

/// Every homeomorphism `A -> B`, with the same pruning and budget as
/// [`find_homeomorphism`].
pub fn enumerate_homeomorphisms(a: &Space, b: &Space, budget: u64) -> Result<Vec<SpaceMap>, TopError> {
    homeomorphism_search(a, b, budget, true)
}

fn homeomorphism_search(a: &Space, b: &Space, budget: u64, all: bool) -> Result<Vec<SpaceMap>, TopError> {
    if a.len() != b.len() {
        return Ok(Vec::new());
    }
    let sig = |s: &Space, x: usize| (s.min_open(x).len(), s.up_count(x));
    let sa: Vec<_> = (0..a.len()).map(|x| sig(a, x)).collect();
    let sb: Vec<_> = (0..b.len()).map(|y| sig(b, y)).collect();
    let mut ms_a = sa.clone();
    let mut ms_b = sb.clone();
    ms_a.sort();
    ms_b.sort();
    if ms_a != ms_b {
        return Ok(Vec::new());
    }
    struct Search<'s> {
        a: &'s Space,
        b: &'s Space,
        sa: Vec<(usize, usize)>,
        sb: Vec<(usize, usize)>,
        table: Vec<usize>,
        used: Vec<bool>,
        nodes: u64,
        budget: u64,
        all: bool,
        found: Vec<SpaceMap>,
    }
    impl Search<'_> {
        /// Returns true once the search can stop.
        fn go(&mut self, x: usize) -> Result<bool, TopError> {
            if x == self.a.len() {
                let f = SpaceMap { dom: self.a.clone(), cod: self.b.clone(), table: self.table.clone() };
                debug_assert!(f.is_homeomorphism());
                self.found.push(f);
                return Ok(!self.all);
            }
            for y in 0..self.b.len() {
                if self.used[y] || self.sa[x] != self.sb[y] {
                    continue;
                }
                self.nodes += 1;
                if self.nodes > self.budget {
                    return Err(TopError::SearchBudgetExceeded { needed: self.nodes as u128, budget: self.budget });
                }
                let ok = (0..x).all(|z| {
                    let fz = self.table[z];
                    self.a.min_open(x).contains(z) == self.b.min_open(y).contains(fz)
                        && self.a.min_open(z).contains(x) == self.b.min_open(fz).contains(y)
                }) && (self.a.min_open(x).contains(x) == self.b.min_open(y).contains(y));
                if ok {
                    self.table[x] = y;
                    self.used[y] = true;
                    if self.go(x + 1)? {
                        return Ok(true);
                    }
                    self.used[y] = false;
                }
            }
            Ok(false)
        }
    }
    let mut s = Search {
        a,
        b,
        sa,
        sb,
        table: vec![0; a.len()],
        used: vec![false; b.len()],
        nodes: 0,
        budget,
        all,
        found: Vec::new(),
    };
    s.go(0)?;
    Ok(s.found)
}

/// Corestriction of `f` to its image, viewed as a subspace of the codomain.
pub fn corestrict_to_image(f: &SpaceMap) -> Result<(Space, SpaceMap), TopError> {
    let img = f.image();
    let id = format!("{}{}", f.cod.id, f.cod.fmt_points(&img));
    let (sub, inc) = subspace_on(&f.cod, &img, &id)?;
    let table = f
        .table
        .iter()
        .map(|&y| inc.table.iter().position(|&z| z == y).expect("image point present"))
        .collect();
    Ok((sub.clone(), SpaceMap::from_indices(&f.dom, &sub, table)?))
}
