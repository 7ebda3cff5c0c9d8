//! The glued-up space of a gluing data functor: the disjoint union of the
//! patches modulo the overlap relation, with the final topology. Also cone
//! checks, the characterization of glued spaces, mediating maps and a
//! brute-force check of the universal property.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::fintop::{
    compose, disjoint_union_tagged, enumerate_continuous_maps, quotient_indices, same_space, Space, SpaceMap,
    TopError,
};
use crate::gdata::{functor_of, DataError, GluingData, GluingFunctor};
use crate::glidx::{Generator, GlObject, Idx};
use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlueError {
    #[error(transparent)]
    Top(#[from] TopError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("overlap relation is not an equivalence: {0}")]
    NotEquivalence(String),
    #[error("cone has no leg for {0}")]
    MissingLeg(String),
    #[error("leg for {object} is typed {found}, expected {expected}")]
    LegType { object: String, expected: String, found: String },
    #[error("mediating map is ill-defined: {0}")]
    IllDefined(String),
    #[error("point {0} of the source apex lies in no leg image")]
    NotCovering(String),
    #[error("mediating map is not continuous: {0}")]
    NotContinuous(String),
}

/// Overlap relation on the disjoint union of the patches. Point `x` of
/// patch `i` is named `x@i`.
#[derive(Clone, Debug)]
pub struct Relation {
    pub space: Space,
    pub injections: BTreeMap<Idx, SpaceMap>,
    pub pairs: Vec<(usize, usize)>,
}

impl Relation {
    pub fn named_pairs(&self) -> Vec<(&str, &str)> {
        self.pairs.iter().map(|&(a, b)| (self.space.point(a), self.space.point(b))).collect()
    }

    /// Pairs with distinct ends.
    pub fn off_diagonal(&self) -> Vec<(&str, &str)> {
        self.named_pairs().into_iter().filter(|(a, b)| a != b).collect()
    }
}

/// Relation pairs `(x@i, y@j)` with `x = anchor(i,j)(u)` and
/// `y = anchor(j,i)(phi(i,j)(u))`, over every ordered `(i,j)` including the
/// diagonal. No laws are checked.
pub fn relation_pairs(gd: &GluingData) -> Result<Relation, GlueError> {
    let parts: Vec<(String, Space)> = gd.index().iter().map(|i| (i.clone(), gd.patch(i).clone())).collect();
    let co = disjoint_union_tagged(&parts)?;
    let injections: BTreeMap<Idx, SpaceMap> = gd.index().iter().cloned().zip(co.injections).collect();
    let mut pairs = BTreeSet::new();
    for i in gd.index() {
        for j in gd.index() {
            let (ai, aj, phi) = (gd.anchor(i, j), gd.anchor(j, i), gd.transition(i, j));
            for u in 0..gd.overlap(i, j).len() {
                let x = injections[i].at(ai.at(u));
                let y = injections[j].at(aj.at(phi.at(u)));
                pairs.insert((x, y));
            }
        }
    }
    Ok(Relation { space: co.space, injections, pairs: pairs.into_iter().collect() })
}

/// [`relation_pairs`] for validated data only.
pub fn build_relation(gd: &GluingData) -> Result<Relation, GlueError> {
    let report = crate::gdata::validate(gd);
    if !report.passed() {
        return Err(DataError::ValidationFailed(Box::new(report)).into());
    }
    relation_pairs(gd)
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub reflexive: Vec<String>,
    pub symmetric: Vec<String>,
    pub transitive: Vec<String>,
}

impl EquivalenceReport {
    pub fn passed(&self) -> bool {
        self.reflexive.is_empty() && self.symmetric.is_empty() && self.transitive.is_empty()
    }

    pub fn first_witness(&self) -> Option<&String> {
        self.reflexive.first().or(self.symmetric.first()).or(self.transitive.first())
    }
}

/// Checks the raw relation, not its closure.
pub fn check_equivalence(rel: &Relation) -> EquivalenceReport {
    let set: BTreeSet<(usize, usize)> = rel.pairs.iter().copied().collect();
    let name = |x: usize| rel.space.point(x);
    let mut rep = EquivalenceReport::default();
    for x in 0..rel.space.len() {
        if !set.contains(&(x, x)) {
            rep.reflexive.push(format!("{} is not related to itself", name(x)));
        }
    }
    let mut succ: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(a, b) in &set {
        if !set.contains(&(b, a)) {
            rep.symmetric.push(format!("{} ~ {} but not {} ~ {}", name(a), name(b), name(b), name(a)));
        }
        succ.entry(a).or_default().push(b);
    }
    for &(a, b) in &set {
        for &c in succ.get(&b).map(Vec::as_slice).unwrap_or(&[]) {
            if !set.contains(&(a, c)) {
                rep.transitive.push(format!(
                    "{} ~ {} and {} ~ {} but not {} ~ {}",
                    name(a),
                    name(b),
                    name(b),
                    name(c),
                    name(a),
                    name(c)
                ));
            }
        }
    }
    rep
}

/// An apex with one leg per object of the index category, each leg a
/// continuous map from the object's space to the apex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cone {
    pub apex: Space,
    pub legs: BTreeMap<GlObject, SpaceMap>,
}

impl Cone {
    /// Cone with only patch legs, completed to every object.
    pub fn from_patch_legs(fun: &GluingFunctor, apex: &Space, legs: BTreeMap<Idx, SpaceMap>) -> Result<Cone, GlueError> {
        let legs = legs.into_iter().map(|(i, m)| (GlObject::Single(i), m)).collect();
        let mut c = Cone { apex: apex.clone(), legs };
        c.complete(fun)?;
        Ok(c)
    }

    /// Fills missing legs: a pair leg is the first patch leg after the
    /// anchor, a triple leg is the pair leg after the first projection.
    pub fn complete(&mut self, fun: &GluingFunctor) -> Result<(), GlueError> {
        let mut objs: Vec<&GlObject> = fun.category().objects().iter().collect();
        objs.sort_by_key(|o| o.raw().len());
        for o in objs {
            if self.legs.contains_key(o) {
                continue;
            }
            let raw = o.raw();
            let prev = match o {
                GlObject::Single(_) => return Err(GlueError::MissingLeg(o.to_string())),
                GlObject::Pair(i, _) => GlObject::Single(i.clone()),
                GlObject::Triple(i, j, _) => crate::glidx::normalize(&[i, j]).map_err(DataError::from)?,
            };
            let base = self.legs.get(&prev).ok_or_else(|| GlueError::MissingLeg(prev.to_string()))?;
            let step = fun.eval_hom(&prev, o).expect("object reachable from its prefix");
            debug_assert!(raw.len() > 1);
            let leg = compose(base, &step)?;
            self.legs.insert(o.clone(), leg);
        }
        Ok(())
    }

    pub fn leg(&self, o: &GlObject) -> Result<&SpaceMap, GlueError> {
        self.legs.get(o).ok_or_else(|| GlueError::MissingLeg(o.to_string()))
    }

    pub fn patch_leg(&self, i: &str) -> Result<&SpaceMap, GlueError> {
        self.leg(&GlObject::Single(i.into()))
    }

    /// Patch legs only.
    pub fn patch_legs(&self) -> BTreeMap<Idx, SpaceMap> {
        self.legs
            .iter()
            .filter_map(|(o, m)| match o {
                GlObject::Single(i) => Some((i.clone(), m.clone())),
                _ => None,
            })
            .collect()
    }

    /// The same cone with every leg followed by `f`.
    pub fn then(&self, f: &SpaceMap) -> Result<Cone, GlueError> {
        let mut legs = BTreeMap::new();
        for (o, m) in &self.legs {
            legs.insert(o.clone(), compose(f, m)?);
        }
        Ok(Cone { apex: f.cod().clone(), legs })
    }

    fn typecheck(&self, fun: &GluingFunctor) -> Result<(), GlueError> {
        for o in fun.category().objects() {
            let leg = self.leg(o)?;
            let want = fun.object(o).expect("object space");
            if !same_space(leg.dom(), want) {
                return Err(GlueError::LegType {
                    object: o.to_string(),
                    expected: want.id().into(),
                    found: leg.dom().id().into(),
                });
            }
            if !same_space(leg.cod(), &self.apex) {
                return Err(GlueError::LegType {
                    object: o.to_string(),
                    expected: self.apex.id().into(),
                    found: leg.cod().id().into(),
                });
            }
        }
        Ok(())
    }
}

/// Which commuting conditions a cone check evaluates. All three agree on
/// lawful data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConeMode {
    /// One triangle for every morphism of the index category.
    Full,
    /// One triangle for every generator.
    Generators,
    /// Transitions against pair legs, anchors against pair legs, and
    /// projections against triple legs.
    Reduced,
}

impl ConeMode {
    pub const ALL: [ConeMode; 3] = [ConeMode::Full, ConeMode::Generators, ConeMode::Reduced];

    pub fn name(self) -> &'static str {
        match self {
            ConeMode::Full => "full",
            ConeMode::Generators => "generators",
            ConeMode::Reduced => "reduced",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeCheck {
    pub mode: ConeMode,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

impl ConeCheck {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

fn first_difference(left: &SpaceMap, right: &SpaceMap) -> Option<usize> {
    (0..left.dom().len()).find(|&x| left.at(x) != right.at(x))
}

fn triangle(out: &mut ConeCheck, what: &str, left: &SpaceMap, right: &SpaceMap) {
    out.checked += 1;
    if let Some(x) = first_difference(left, right) {
        out.witnesses.push(format!(
            "{what}: at {} one side gives {}, the other {}",
            left.dom().point(x),
            left.cod().point(left.at(x)),
            right.cod().point(right.at(x))
        ));
    }
}

/// Evaluates the commuting conditions of `mode` in the continuous direction.
pub fn check_cone(fun: &GluingFunctor, cone: &Cone, mode: ConeMode) -> Result<ConeCheck, GlueError> {
    cone.typecheck(fun)?;
    let mut out = ConeCheck { mode, checked: 0, witnesses: Vec::new() };
    let cat = fun.category();
    match mode {
        ConeMode::Full => {
            for a in cat.objects() {
                for b in cat.objects() {
                    if a == b {
                        continue;
                    }
                    if let Some(m) = fun.eval_hom(a, b) {
                        let lhs = compose(cone.leg(a)?, &m)?;
                        triangle(&mut out, &format!("{a} -> {b}"), &lhs, cone.leg(b)?);
                    }
                }
            }
        }
        ConeMode::Generators => {
            for (g, img) in fun.generator_images() {
                let (a, b) = (g.dom(), g.cod());
                let lhs = compose(cone.leg(&a)?, img)?;
                triangle(&mut out, &g.label(), &lhs, cone.leg(&b)?);
            }
        }
        ConeMode::Reduced => {
            let gd = fun.data();
            for i in fun.index() {
                for j in fun.index() {
                    if i == j {
                        continue;
                    }
                    let pair = cone.leg(&GlObject::Pair(i.clone(), j.clone()))?;
                    let via_j = compose(cone.patch_leg(j)?, &compose(gd.anchor(j, i), gd.transition(i, j))?)?;
                    triangle(&mut out, &format!("transition ({i},{j})"), &via_j, pair);
                    let via_i = compose(cone.patch_leg(i)?, gd.anchor(i, j))?;
                    triangle(&mut out, &format!("anchor ({i},{j})"), &via_i, pair);
                }
            }
            for (g, img) in fun.generator_images() {
                if let Generator::EtaT(..) = g {
                    let lhs = compose(cone.leg(&g.dom())?, img)?;
                    triangle(&mut out, &g.label(), &lhs, cone.leg(&g.cod())?);
                }
            }
        }
    }
    Ok(out)
}

/// The glued space with its projection from the disjoint union, its legs
/// and the provenance of every class.
#[derive(Clone, Debug)]
pub struct GluedSpace {
    pub space: Space,
    pub relation: Relation,
    pub projection: SpaceMap,
    pub classes: Vec<PointSet>,
    pub cone: Cone,
}

impl GluedSpace {
    pub fn leg(&self, i: &str) -> &SpaceMap {
        self.cone.patch_leg(i).expect("glued space has every patch leg")
    }

    /// Members of each class as `(index, point)` pairs.
    pub fn provenance(&self) -> Vec<(String, Vec<String>)> {
        self.classes
            .iter()
            .enumerate()
            .map(|(q, members)| {
                let names = members.iter().map(|x| self.relation.space.point(x).to_string()).collect();
                (self.space.point(q).to_string(), names)
            })
            .collect()
    }
}

/// Quotient of the disjoint union of patches by the overlap relation.
/// Refuses data whose raw relation is not already an equivalence.
pub fn glue(fun: &GluingFunctor) -> Result<GluedSpace, GlueError> {
    let rel = relation_pairs(fun.data())?;
    let eq = check_equivalence(&rel);
    if let Some(w) = eq.first_witness() {
        return Err(GlueError::NotEquivalence(w.clone()));
    }
    let q = quotient_indices(&rel.space, &rel.pairs)?;
    let space = q.space.renamed("Q");
    let projection = SpaceMap::from_indices(&rel.space, &space, q.projection.table().to_vec())?;
    let mut legs = BTreeMap::new();
    for (i, inj) in &rel.injections {
        legs.insert(i.clone(), compose(&projection, inj)?);
    }
    let cone = Cone::from_patch_legs(fun, &space, legs)?;
    Ok(GluedSpace { space, relation: rel, projection, classes: q.classes, cone })
}

/// Builds the functor of `gd` and glues it.
pub fn glue_data(gd: &GluingData) -> Result<(GluingFunctor, GluedSpace), GlueError> {
    let fun = functor_of(gd)?;
    let g = glue(&fun)?;
    Ok((fun, g))
}

/// One named property of a glued-space candidate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Property {
    pub name: &'static str,
    pub witnesses: Vec<String>,
}

impl Property {
    pub fn passed(&self) -> bool {
        self.witnesses.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluedReport {
    pub properties: Vec<Property>,
}

impl GluedReport {
    pub fn passed(&self) -> bool {
        self.properties.iter().all(Property::passed)
    }

    pub fn property(&self, prefix: &str) -> &Property {
        self.properties.iter().find(|p| p.name.starts_with(prefix)).expect("known property")
    }
}

impl core::fmt::Display for GluedReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for p in &self.properties {
            writeln!(f, "{} {}", if p.passed() { "PASS" } else { "FAIL" }, p.name)?;
            for w in &p.witnesses {
                writeln!(f, "    {w}")?;
            }
        }
        Ok(())
    }
}

fn push_diff(p: &mut Property, what: &str, left: &SpaceMap, right: &SpaceMap) {
    if let Some(x) = first_difference(left, right) {
        p.witnesses.push(format!(
            "{what}: at {} one side gives {}, the other {}",
            left.dom().point(x),
            left.cod().point(left.at(x)),
            right.cod().point(right.at(x))
        ));
    }
}

/// Checks the six properties that characterize a glued space: (a) pair legs
/// factor through anchors, (b) triple legs factor through projections,
/// (c) the legs agree across transitions, (d) the leg images cover the
/// apex, (e) the overlap images are exactly the pairwise intersections,
/// (f) every patch leg is injective and continuous.
pub fn check_glued_properties(fun: &GluingFunctor, cand: &Cone) -> Result<GluedReport, GlueError> {
    cand.typecheck(fun)?;
    let gd = fun.data();
    let ix = fun.index();
    let mut a = Property { name: "a) pair legs factor through anchors", witnesses: Vec::new() };
    let mut b = Property { name: "b) triple legs factor through projections", witnesses: Vec::new() };
    let mut c = Property { name: "c) legs agree across transitions", witnesses: Vec::new() };
    let mut d = Property { name: "d) leg images cover the apex", witnesses: Vec::new() };
    let mut e = Property { name: "e) overlap images are pairwise intersections", witnesses: Vec::new() };
    let mut f = Property { name: "f) patch legs are injective and continuous", witnesses: Vec::new() };
    for i in ix {
        for j in ix {
            let pair = crate::glidx::normalize(&[i, j]).map_err(DataError::from)?;
            let lhs = compose(cand.patch_leg(i)?, gd.anchor(i, j))?;
            if i != j {
                push_diff(&mut a, &format!("leg {pair}"), &lhs, cand.leg(&pair)?);
            }
            let rhs = compose(cand.patch_leg(j)?, &compose(gd.anchor(j, i), gd.transition(i, j))?)?;
            push_diff(&mut c, &format!("({i},{j})"), &lhs, &rhs);
            let img_ij = lhs.image();
            let img_ji = compose(cand.patch_leg(j)?, gd.anchor(j, i))?.image();
            let meet = cand.patch_leg(i)?.image().intersection(&cand.patch_leg(j)?.image());
            if img_ij != meet || img_ji != meet {
                e.witnesses.push(format!(
                    "({i},{j}): overlap images {} and {}, intersection {}",
                    cand.apex.fmt_points(&img_ij),
                    cand.apex.fmt_points(&img_ji),
                    cand.apex.fmt_points(&meet)
                ));
            }
        }
    }
    for (g, img) in fun.generator_images() {
        if let Generator::EtaT(..) = g {
            let lhs = compose(cand.leg(&g.dom())?, img)?;
            push_diff(&mut b, &g.label(), &lhs, cand.leg(&g.cod())?);
        }
    }
    let mut covered = cand.apex.empty_set();
    for i in ix {
        let leg = cand.patch_leg(i)?;
        covered.union_with(&leg.image());
        if !leg.is_injective() {
            let x = (0..leg.dom().len())
                .find(|&x| (0..x).any(|y| leg.at(y) == leg.at(x)))
                .expect("non-injective");
            f.witnesses.push(format!("leg {i} identifies {} with another point", leg.dom().point(x)));
        }
        if !leg.is_continuous() {
            f.witnesses.push(format!("leg {i} is not continuous"));
        }
    }
    for q in 0..cand.apex.len() {
        if !covered.contains(q) {
            d.witnesses.push(format!("{} is in no leg image", cand.apex.point(q)));
        }
    }
    Ok(GluedReport { properties: vec![a, b, c, d, e, f] })
}

/// The map `mu: source.apex -> target.apex` with `mu . source_i = target_i`
/// for every patch leg. Every apex point must lie in some leg image and all
/// preimages must agree.
pub fn mediate(source: &Cone, target: &Cone) -> Result<SpaceMap, GlueError> {
    let n = source.apex.len();
    let mut table: Vec<Option<(usize, String)>> = vec![None; n];
    for (i, s) in source.patch_legs() {
        let t = target.patch_leg(&i)?;
        if !same_space(s.dom(), t.dom()) {
            return Err(GlueError::LegType {
                object: format!("[{i}]"),
                expected: s.dom().id().into(),
                found: t.dom().id().into(),
            });
        }
        for x in 0..s.dom().len() {
            let q = s.at(x);
            let y = t.at(x);
            let here = format!("{}@{}", s.dom().point(x), i);
            match &table[q] {
                None => table[q] = Some((y, here)),
                Some((y0, there)) if *y0 != y => {
                    return Err(GlueError::IllDefined(format!(
                        "{there} and {here} both map to {} but go to {} and {}",
                        source.apex.point(q),
                        target.apex.point(*y0),
                        target.apex.point(y)
                    )))
                }
                Some(_) => {}
            }
        }
    }
    let mut out = Vec::with_capacity(n);
    for (q, slot) in table.into_iter().enumerate() {
        match slot {
            Some((y, _)) => out.push(y),
            None => return Err(GlueError::NotCovering(source.apex.point(q).into())),
        }
    }
    let mu = SpaceMap::from_indices(&source.apex, &target.apex, out)?;
    if !mu.is_continuous() {
        return Err(GlueError::NotContinuous(mu.to_string()));
    }
    Ok(mu)
}

/// Outcome of the universal property oracle for one apex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApexResult {
    pub apex: String,
    pub cones: usize,
    pub failures: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniversalReport {
    /// Problems with the candidate itself (it must be a cone).
    pub candidate: Vec<String>,
    pub apexes: Vec<ApexResult>,
}

impl UniversalReport {
    pub fn passed(&self) -> bool {
        self.candidate.is_empty() && self.apexes.iter().all(|a| a.failures.is_empty())
    }

    pub fn cones(&self) -> usize {
        self.apexes.iter().map(|a| a.cones).sum()
    }
}

/// Every cone over `fun` with the given apex, by filtering all families of
/// continuous patch legs.
pub fn enumerate_cones(fun: &GluingFunctor, apex: &Space, budget: u64) -> Result<Vec<Cone>, GlueError> {
    let mut per_patch = Vec::new();
    for i in fun.index() {
        per_patch.push((i.clone(), enumerate_continuous_maps(fun.patch(i), apex, budget)?));
    }
    let mut out = Vec::new();
    let mut choice = vec![0usize; per_patch.len()];
    if per_patch.iter().any(|(_, v)| v.is_empty()) {
        return Ok(out);
    }
    let mut visited: u64 = 0;
    loop {
        visited += 1;
        if visited > budget {
            return Err(TopError::SearchBudgetExceeded { needed: visited as u128, budget }.into());
        }
        let legs = per_patch.iter().zip(&choice).map(|((i, v), &c)| (i.clone(), v[c].clone())).collect();
        let cone = Cone::from_patch_legs(fun, apex, legs)?;
        if check_cone(fun, &cone, ConeMode::Reduced)?.passed() {
            out.push(cone);
        }
        let mut k = 0;
        loop {
            if k == choice.len() {
                return Ok(out);
            }
            choice[k] += 1;
            if choice[k] < per_patch[k].1.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Checks the universal property of `cand` by brute force: for every apex
/// and every cone into it, exactly one continuous map out of the candidate's
/// apex commutes with all legs, and it equals [`mediate`]'s answer.
pub fn verify_universal(
    fun: &GluingFunctor,
    cand: &Cone,
    apexes: &[Space],
    budget: u64,
) -> Result<UniversalReport, GlueError> {
    let mut report = UniversalReport { candidate: Vec::new(), apexes: Vec::new() };
    for mode in ConeMode::ALL {
        let c = check_cone(fun, cand, mode)?;
        for w in c.witnesses.into_iter().take(3) {
            report.candidate.push(format!("candidate is not a cone ({}): {w}", mode.name()));
        }
    }
    for apex in apexes {
        let mut res = ApexResult { apex: apex.id().into(), cones: 0, failures: Vec::new() };
        let maps = enumerate_continuous_maps(&cand.apex, apex, budget)?;
        for cone in enumerate_cones(fun, apex, budget)? {
            res.cones += 1;
            let mediators: Vec<&SpaceMap> = maps
                .iter()
                .filter(|mu| {
                    cone.legs.iter().all(|(o, leg)| cand.legs.get(o).is_some_and(|c| compose(mu, c).ok().as_ref() == Some(leg)))
                })
                .collect();
            if mediators.len() != 1 {
                res.failures.push(format!(
                    "cone with patch legs {} admits {} mediating maps",
                    describe_legs(&cone),
                    mediators.len()
                ));
                continue;
            }
            match mediate(cand, &cone) {
                Ok(mu) if &mu == mediators[0] => {}
                Ok(mu) => res.failures.push(format!("mediate gave {mu}, oracle found {}", mediators[0])),
                Err(e) => res.failures.push(format!("mediate failed: {e}")),
            }
        }
        report.apexes.push(res);
    }
    Ok(report)
}

fn describe_legs(c: &Cone) -> String {
    c.patch_legs().iter().map(|(i, m)| format!("{i}: {m}")).collect::<Vec<_>>().join("; ")
}

/// Report of the open-map strengthening.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OtopReport {
    /// Anchors or transitions that are not open maps. When non-empty the
    /// check does not apply.
    pub not_open: Vec<String>,
    pub legs: Vec<(Idx, crate::fintop::MapReport, bool)>,
    pub uncovered: Vec<String>,
}

impl OtopReport {
    pub fn applicable(&self) -> bool {
        self.not_open.is_empty()
    }

    /// Every leg an embedding with open image, and the images cover.
    pub fn conclusions_hold(&self) -> bool {
        self.uncovered.is_empty() && self.legs.iter().all(|(_, r, open)| r.embedding && *open)
    }

    pub fn passed(&self) -> bool {
        self.applicable() && self.conclusions_hold()
    }
}

/// When all anchors and transitions are open maps, every patch leg should be
/// an open embedding and the images should cover the glued space.
pub fn check_otop(fun: &GluingFunctor, glued: &GluedSpace) -> OtopReport {
    let gd = fun.data();
    let mut not_open = Vec::new();
    for i in fun.index() {
        for j in fun.index() {
            if !gd.anchor(i, j).is_open_map() {
                not_open.push(format!("anchor ({i},{j})"));
            }
            if !gd.transition(i, j).is_open_map() {
                not_open.push(format!("transition ({i},{j})"));
            }
        }
    }
    let mut legs = Vec::new();
    let mut covered = glued.space.empty_set();
    for i in fun.index() {
        let leg = glued.leg(i);
        let img = leg.image();
        covered.union_with(&img);
        legs.push((i.clone(), leg.analyze(), glued.space.is_open_set(&img)));
    }
    let uncovered = (0..glued.space.len())
        .filter(|&q| !covered.contains(q))
        .map(|q| glued.space.point(q).to_string())
        .collect();
    OtopReport { not_open, legs, uncovered }
}

/// Default apexes for the universal property oracle.
pub fn default_apexes() -> Vec<Space> {
    use crate::fixtures::{arc3, disc2, pt, sierp};
    vec![pt(), sierp(), disc2(), arc3()]
}
