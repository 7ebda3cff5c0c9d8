//! The gluing index category: objects are index tuples of length one to
//! three modulo `i ~ (i,i)`, `(i,j,j) ~ (i,j)` and `(i,j,k) ~ (i,k,j)`, and
//! there is at most one morphism between any two objects. Morphisms are
//! generated by four families:
//!
//! * `eta(i,j)`: `[i] -> [i,j]`
//! * `tau(i,j)`: `[j,i] -> [i,j]`
//! * `eta^n(i,j,k)`: `[i,n] -> [i,j,k]` for `n` in `{j,k}`
//! * `tau^k(i,j,k)`: `[j,i,k] -> [i,j,k]`

use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

pub type Idx = String;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum IndexError {
    #[error("index tuples have length 1 to 3, got {0}")]
    BadArity(usize),
    #[error("the index set is empty")]
    EmptyIndexSet,
    #[error("unknown index {0}")]
    UnknownIndex(String),
    #[error("unknown object {0}")]
    UnknownObject(String),
    #[error("cannot compose {first} then {second}: {reason}")]
    CompositionMismatch { first: String, second: String, reason: String },
}

/// Normal form of an object. `Triple(i, j, k)` always has `j < k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GlObject {
    Single(Idx),
    Pair(Idx, Idx),
    Triple(Idx, Idx, Idx),
}

impl GlObject {
    /// A triple whose anchor index repeats among the other two, like `[i,i,k]`.
    pub fn is_degenerate(&self) -> bool {
        matches!(self, GlObject::Triple(i, j, k) if i == j || i == k)
    }

    /// Canonical representative tuple.
    pub fn raw(&self) -> Vec<&str> {
        match self {
            GlObject::Single(i) => vec![i],
            GlObject::Pair(i, j) => vec![i, j],
            GlObject::Triple(i, j, k) => vec![i, j, k],
        }
    }

    pub fn indices(&self) -> BTreeSet<&str> {
        self.raw().into_iter().collect()
    }

    /// Parses the display form `[i]`, `[i,j]`, `[i,j,k]` (brackets optional).
    pub fn parse(text: &str) -> Result<GlObject, IndexError> {
        let t = text.trim().trim_start_matches('[').trim_end_matches(']');
        let parts: Vec<&str> = t.split(',').map(str::trim).collect();
        if parts.iter().any(|p| p.is_empty()) {
            return Err(IndexError::UnknownObject(text.into()));
        }
        normalize(&parts)
    }
}

impl fmt::Display for GlObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.raw().join(","))
    }
}

/// Maps a raw tuple to its normal form.
pub fn normalize<S: AsRef<str>>(raw: &[S]) -> Result<GlObject, IndexError> {
    let s = |k: usize| raw[k].as_ref().to_string();
    match raw.len() {
        1 => Ok(GlObject::Single(s(0))),
        2 if s(0) == s(1) => Ok(GlObject::Single(s(0))),
        2 => Ok(GlObject::Pair(s(0), s(1))),
        3 if s(1) == s(2) => normalize(&raw[..2]),
        3 => {
            let (j, k) = if s(1) < s(2) { (s(1), s(2)) } else { (s(2), s(1)) };
            Ok(GlObject::Triple(s(0), j, k))
        }
        n => Err(IndexError::BadArity(n)),
    }
}

/// A generating morphism, named by its subscript tuple.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Generator {
    /// `eta(i,j): [i] -> [i,j]`
    Eta(Idx, Idx),
    /// `tau(i,j): [j,i] -> [i,j]`
    Tau(Idx, Idx),
    /// `eta^n(i,j,k): [i,n] -> [i,j,k]`, fields `(n, i, j, k)`
    EtaT(Idx, Idx, Idx, Idx),
    /// `tau^k(i,j,k): [j,i,k] -> [i,j,k]`
    TauT(Idx, Idx, Idx),
}

impl Generator {
    pub fn raw_dom(&self) -> Vec<&str> {
        match self {
            Generator::Eta(i, _) => vec![i],
            Generator::Tau(i, j) => vec![j, i],
            Generator::EtaT(n, i, _, _) => vec![i, n],
            Generator::TauT(i, j, k) => vec![j, i, k],
        }
    }

    pub fn raw_cod(&self) -> Vec<&str> {
        match self {
            Generator::Eta(i, j) | Generator::Tau(i, j) => vec![i, j],
            Generator::EtaT(_, i, j, k) | Generator::TauT(i, j, k) => vec![i, j, k],
        }
    }

    pub fn dom(&self) -> GlObject {
        normalize(&self.raw_dom()).expect("generator arity")
    }

    pub fn cod(&self) -> GlObject {
        normalize(&self.raw_cod()).expect("generator arity")
    }

    pub fn label(&self) -> String {
        match self {
            Generator::Eta(i, j) => format!("eta({i},{j})"),
            Generator::Tau(i, j) => format!("tau({i},{j})"),
            Generator::EtaT(n, i, j, k) => format!("eta^{n}({i},{j},{k})"),
            Generator::TauT(i, j, k) => format!("tau^{k}({i},{j},{k})"),
        }
    }

    /// Relabels every index through `f`.
    pub fn substitute<F: Fn(&str) -> String>(&self, f: F) -> Generator {
        match self {
            Generator::Eta(i, j) => Generator::Eta(f(i), f(j)),
            Generator::Tau(i, j) => Generator::Tau(f(i), f(j)),
            Generator::EtaT(n, i, j, k) => Generator::EtaT(f(n), f(i), f(j), f(k)),
            Generator::TauT(i, j, k) => Generator::TauT(f(i), f(j), f(k)),
        }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// Every generator over `index`, in emission order: `eta` and `tau` for each
/// ordered pair, then `eta^j`, `eta^k`, `tau^k` for each ordered triple.
/// There are `2n^2 + 3n^3` of them before any deduplication.
pub fn generators<S: AsRef<str>>(index: &[S]) -> Vec<Generator> {
    let ix: Vec<String> = index.iter().map(|s| s.as_ref().to_string()).collect();
    let mut out = Vec::new();
    for i in &ix {
        for j in &ix {
            out.push(Generator::Eta(i.clone(), j.clone()));
            out.push(Generator::Tau(i.clone(), j.clone()));
        }
    }
    for i in &ix {
        for j in &ix {
            for k in &ix {
                out.push(Generator::EtaT(j.clone(), i.clone(), j.clone(), k.clone()));
                out.push(Generator::EtaT(k.clone(), i.clone(), j.clone(), k.clone()));
                out.push(Generator::TauT(i.clone(), j.clone(), k.clone()));
            }
        }
    }
    out
}

/// A morphism with a witness path of generators, applied first to last.
/// Equality is by endpoints only, since hom-sets have at most one element.
#[derive(Clone, Debug)]
pub struct GlMorphism {
    pub dom: GlObject,
    pub cod: GlObject,
    pub path: Vec<Generator>,
}

impl PartialEq for GlMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.dom == other.dom && self.cod == other.cod
    }
}

impl Eq for GlMorphism {}

impl GlMorphism {
    pub fn identity(a: &GlObject) -> GlMorphism {
        GlMorphism { dom: a.clone(), cod: a.clone(), path: Vec::new() }
    }

    pub fn generator(g: &Generator) -> GlMorphism {
        GlMorphism { dom: g.dom(), cod: g.cod(), path: vec![g.clone()] }
    }

    pub fn is_identity(&self) -> bool {
        self.dom == self.cod
    }
}

impl fmt::Display for GlMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.dom, self.cod)?;
        if !self.path.is_empty() {
            let labels: Vec<String> = self.path.iter().map(Generator::label).collect();
            write!(f, " via {}", labels.join(" ; "))?;
        }
        Ok(())
    }
}

/// `g ∘ f`, defined when `cod(f) = dom(g)`.
pub fn compose_hom(g: &GlMorphism, f: &GlMorphism) -> Result<GlMorphism, IndexError> {
    if f.cod != g.dom {
        return Err(IndexError::CompositionMismatch {
            first: f.to_string(),
            second: g.to_string(),
            reason: format!("{} is not {}", f.cod, g.dom),
        });
    }
    let mut path = f.path.clone();
    path.extend(g.path.iter().cloned());
    Ok(GlMorphism { dom: f.dom.clone(), cod: g.cod.clone(), path })
}

/// `Gl(I)` for a finite index set, with precomputed reachability.
#[derive(Clone, Debug)]
pub struct IndexCategory {
    index: Vec<Idx>,
    objects: Vec<GlObject>,
    generators: Vec<Generator>,
    /// `paths[s][t]`: predecessor object and generator on a shortest path
    /// from `s` to `t`.
    paths: Vec<Vec<Option<(usize, usize)>>>,
}

impl IndexCategory {
    pub fn new<S: AsRef<str>>(index: &[S]) -> Result<IndexCategory, IndexError> {
        let mut ix: Vec<Idx> = index.iter().map(|s| s.as_ref().to_string()).collect();
        ix.sort();
        ix.dedup();
        if ix.is_empty() {
            return Err(IndexError::EmptyIndexSet);
        }
        let mut objs = BTreeSet::new();
        for i in &ix {
            objs.insert(normalize(&[i])?);
            for j in &ix {
                objs.insert(normalize(&[i, j])?);
                for k in &ix {
                    objs.insert(normalize(&[i, j, k])?);
                }
            }
        }
        let objects: Vec<GlObject> = objs.into_iter().collect();
        let generators = generators(&ix);
        let pos: BTreeMap<&GlObject, usize> = objects.iter().enumerate().map(|(n, o)| (o, n)).collect();
        let mut out_edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); objects.len()];
        for (gi, g) in generators.iter().enumerate() {
            let (a, b) = (pos[&g.dom()], pos[&g.cod()]);
            if a != b {
                out_edges[a].push((b, gi));
            }
        }
        let n = objects.len();
        let mut paths = vec![vec![None; n]; n];
        for (s, row) in paths.iter_mut().enumerate() {
            let mut seen = vec![false; n];
            seen[s] = true;
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for &(b, gi) in &out_edges[a] {
                    if !seen[b] {
                        seen[b] = true;
                        row[b] = Some((a, gi));
                        queue.push_back(b);
                    }
                }
            }
        }
        Ok(IndexCategory { index: ix, objects, generators, paths })
    }

    pub fn index(&self) -> &[Idx] {
        &self.index
    }

    pub fn objects(&self) -> &[GlObject] {
        &self.objects
    }

    pub fn nondegenerate_objects(&self) -> Vec<&GlObject> {
        self.objects.iter().filter(|o| !o.is_degenerate()).collect()
    }

    pub fn generators(&self) -> &[Generator] {
        &self.generators
    }

    /// Distinct non-identity generator arrows, as `(dom, cod, labels)`.
    pub fn arrow_census(&self) -> Vec<(GlObject, GlObject, Vec<String>)> {
        let mut m: BTreeMap<(GlObject, GlObject), Vec<String>> = BTreeMap::new();
        for g in &self.generators {
            let (a, b) = (g.dom(), g.cod());
            if a != b {
                m.entry((a, b)).or_default().push(g.label());
            }
        }
        m.into_iter().map(|((a, b), l)| (a, b, l)).collect()
    }

    fn position(&self, a: &GlObject) -> Option<usize> {
        self.objects.binary_search(a).ok()
    }

    /// Normalizes a raw tuple and checks its indices belong to the category.
    pub fn object<S: AsRef<str>>(&self, raw: &[S]) -> Result<GlObject, IndexError> {
        for r in raw {
            if self.index.binary_search_by(|i| i.as_str().cmp(r.as_ref())).is_err() {
                return Err(IndexError::UnknownIndex(r.as_ref().into()));
            }
        }
        normalize(raw)
    }

    pub fn contains(&self, a: &GlObject) -> bool {
        self.position(a).is_some()
    }

    /// The unique morphism `a -> b` if one exists, with a shortest witness.
    pub fn hom(&self, a: &GlObject, b: &GlObject) -> Option<GlMorphism> {
        let (s, mut t) = (self.position(a)?, self.position(b)?);
        if s == t {
            return Some(GlMorphism::identity(a));
        }
        let mut path = Vec::new();
        while t != s {
            let (p, gi) = self.paths[s][t]?;
            path.push(self.generators[gi].clone());
            t = p;
        }
        path.reverse();
        Some(GlMorphism { dom: a.clone(), cod: b.clone(), path })
    }

    pub fn has_hom(&self, a: &GlObject, b: &GlObject) -> bool {
        match (self.position(a), self.position(b)) {
            (Some(s), Some(t)) => s == t || self.paths[s][t].is_some(),
            _ => false,
        }
    }

    /// `g ∘ f`, checked against the category's hom-sets.
    pub fn compose_hom(&self, g: &GlMorphism, f: &GlMorphism) -> Result<GlMorphism, IndexError> {
        let h = compose_hom(g, f)?;
        debug_assert!(self.has_hom(&h.dom, &h.cod));
        Ok(h)
    }

    /// Is `[i,j,k]` the pushout of `[i,j] <- [i] -> [i,k]`? In a preorder
    /// this means it receives both legs and maps to every other object that
    /// does.
    pub fn is_pushout(&self, i: &str, j: &str, k: &str) -> bool {
        let (Ok(p), Ok(a), Ok(b)) = (normalize(&[i, j, k]), normalize(&[i, j]), normalize(&[i, k])) else {
            return false;
        };
        self.has_hom(&a, &p)
            && self.has_hom(&b, &p)
            && self
                .objects
                .iter()
                .filter(|c| self.has_hom(&a, c) && self.has_hom(&b, c))
                .all(|c| self.has_hom(&p, c))
    }

    /// Checks the five relation families induced by hom-uniqueness and the
    /// pushout shape of triples.
    pub fn verify_relations(&self) -> RelationReport {
        let mut families: Vec<FamilyResult> = Vec::new();
        let g = |gen: Generator| GlMorphism::generator(&gen);
        let s = |x: &str| x.to_string();
        let mut fam = |name: &'static str, checks: Vec<(String, Result<bool, IndexError>)>| {
            let mut res = FamilyResult { name, checked: 0, failures: Vec::new() };
            for (inst, r) in checks {
                res.checked += 1;
                match r {
                    Ok(true) => {}
                    Ok(false) => res.failures.push(format!("{inst}: sides differ")),
                    Err(e) => res.failures.push(format!("{inst}: {e}")),
                }
            }
            families.push(res);
        };
        let ix = &self.index;
        let mut a = Vec::new();
        let mut b = Vec::new();
        for i in ix {
            let eta = g(Generator::Eta(s(i), s(i)));
            let tau = g(Generator::Tau(s(i), s(i)));
            let id = GlMorphism::identity(&GlObject::Single(s(i)));
            a.push((format!("i={i}"), Ok(eta == id && tau == id)));
        }
        for i in ix {
            for j in ix {
                let r = compose_hom(&g(Generator::Tau(s(i), s(j))), &g(Generator::Tau(s(j), s(i))))
                    .map(|m| m.is_identity() && m.dom == normalize(&[i, j]).unwrap());
                b.push((format!("i={i},j={j}"), r));
            }
        }
        let mut c = Vec::new();
        let mut d = Vec::new();
        let mut e = Vec::new();
        for i in ix {
            for j in ix {
                for k in ix {
                    let inst = format!("i={i},j={j},k={k}");
                    let lhs = compose_hom(
                        &g(Generator::TauT(s(i), s(j), s(k))),
                        &g(Generator::TauT(s(j), s(k), s(i))),
                    );
                    let rhs = g(Generator::TauT(s(i), s(k), s(j)));
                    c.push((inst.clone(), lhs.map(|m| m == rhs)));
                    let inv = compose_hom(
                        &g(Generator::TauT(s(i), s(j), s(k))),
                        &g(Generator::TauT(s(j), s(i), s(k))),
                    )
                    .map(|m| m.is_identity() && m.dom == normalize(&[i, j, k]).unwrap());
                    c.push((format!("{inst} (inverse)"), inv));
                    let lhs = compose_hom(
                        &g(Generator::EtaT(s(j), s(i), s(j), s(k))),
                        &g(Generator::Eta(s(i), s(j))),
                    );
                    let rhs = compose_hom(
                        &g(Generator::EtaT(s(k), s(i), s(j), s(k))),
                        &g(Generator::Eta(s(i), s(k))),
                    );
                    d.push((inst.clone(), lhs.and_then(|l| rhs.map(|r| l == r))));
                    let lhs = compose_hom(
                        &g(Generator::TauT(s(i), s(j), s(k))),
                        &g(Generator::EtaT(s(i), s(j), s(i), s(k))),
                    );
                    let rhs = compose_hom(
                        &g(Generator::EtaT(s(j), s(i), s(j), s(k))),
                        &g(Generator::Tau(s(i), s(j))),
                    );
                    e.push((inst, lhs.and_then(|l| rhs.map(|r| l == r))));
                }
            }
        }
        fam("(a) eta(i,i) = tau(i,i) = id", a);
        fam("(b) tau(i,j) . tau(j,i) = id", b);
        fam("(c) tau^k(i,j,k) . tau^i(j,k,i) = tau^j(i,k,j), tau^k(i,j,k) . tau^k(j,i,k) = id", c);
        fam("(d) eta^j(i,j,k) . eta(i,j) = eta^k(i,j,k) . eta(i,k)", d);
        fam("(e) tau^k(i,j,k) . eta^i(j,i,k) = eta^j(i,j,k) . tau(i,j)", e);
        let mut pushouts = Vec::new();
        for i in ix {
            for j in ix {
                for k in ix {
                    let object = normalize(&[i, j, k]).unwrap();
                    pushouts.push(PushoutCheck {
                        span: (s(i), s(j), s(k)),
                        degenerate: i == j || i == k || j == k,
                        is_pushout: self.is_pushout(i, j, k),
                        object,
                    });
                }
            }
        }
        let degenerate_objects = self.objects.iter().filter(|o| o.is_degenerate()).cloned().collect();
        RelationReport { families, pushouts, degenerate_objects }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyResult {
    pub name: &'static str,
    pub checked: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PushoutCheck {
    pub span: (Idx, Idx, Idx),
    pub object: GlObject,
    /// Some index repeats, so the span involves an identity leg.
    pub degenerate: bool,
    pub is_pushout: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationReport {
    pub families: Vec<FamilyResult>,
    pub pushouts: Vec<PushoutCheck>,
    pub degenerate_objects: Vec<GlObject>,
}

impl RelationReport {
    pub fn passed(&self) -> bool {
        self.families.iter().all(|f| f.failures.is_empty()) && self.pushouts.iter().all(|p| p.is_pushout)
    }
}

/// Builds `Gl(I)` and checks its relations.
pub fn verify_relations<S: AsRef<str>>(index: &[S]) -> Result<RelationReport, IndexError> {
    Ok(IndexCategory::new(index)?.verify_relations())
}
