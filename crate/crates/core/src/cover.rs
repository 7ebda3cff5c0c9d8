//! Gluing coverings: families of injective continuous maps whose images
//! cover a space. A covering determines gluing data whose overlaps are the
//! pairwise pullbacks; conversely the legs of a glued space form a covering.
//! The closure properties that make coverings a Grothendieck topology are
//! checked per instance.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::fintop::{compose, pullback_named, same_space, Space, SpaceMap, TopError};
use crate::gdata::{derive_triple_maps, DataError, GluingData, GluingFunctor};
use crate::glidx::Idx;
use crate::glue::{check_glued_properties, check_otop, glue, mediate, Cone, GluedReport, GluedSpace, GlueError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CoverError {
    #[error(transparent)]
    Top(#[from] TopError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Glue(#[from] GlueError),
    #[error("leg {label} lands in {found}, not the base {base}")]
    WrongBase { label: String, base: String, found: String },
    #[error("duplicate leg label {0}")]
    DuplicateLabel(String),
    #[error("not a covering:\n{0}")]
    NotACovering(Box<CoveringReport>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CoverKind {
    /// Legs injective and continuous.
    Gluing,
    /// Legs additionally open maps.
    Open,
}

impl CoverKind {
    pub fn name(self) -> &'static str {
        match self {
            CoverKind::Gluing => "gluing",
            CoverKind::Open => "open",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Covering {
    pub base: Space,
    pub legs: Vec<(Idx, SpaceMap)>,
    pub kind: CoverKind,
}

impl Covering {
    /// Checks that every leg lands in `base` and labels are distinct.
    pub fn new(base: &Space, legs: Vec<(Idx, SpaceMap)>, kind: CoverKind) -> Result<Covering, CoverError> {
        let mut seen = Vec::new();
        for (label, leg) in &legs {
            if !same_space(leg.cod(), base) {
                return Err(CoverError::WrongBase {
                    label: label.clone(),
                    base: base.id().into(),
                    found: leg.cod().id().into(),
                });
            }
            if seen.contains(&label) {
                return Err(CoverError::DuplicateLabel(label.clone()));
            }
            seen.push(label);
        }
        Ok(Covering { base: base.clone(), legs, kind })
    }

    /// The covering `{id}`.
    pub fn identity(base: &Space, kind: CoverKind) -> Covering {
        Covering { base: base.clone(), legs: alloc::vec![("1".into(), SpaceMap::identity(base))], kind }
    }

    pub fn leg(&self, label: &str) -> Option<&SpaceMap> {
        self.legs.iter().find(|(l, _)| l == label).map(|(_, m)| m)
    }

    pub fn with_kind(&self, kind: CoverKind) -> Covering {
        Covering { kind, ..self.clone() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoveringReport {
    pub leg_failures: Vec<String>,
    pub uncovered: Vec<String>,
}

impl CoveringReport {
    pub fn passed(&self) -> bool {
        self.leg_failures.is_empty() && self.uncovered.is_empty()
    }
}

impl core::fmt::Display for CoveringReport {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        for w in &self.leg_failures {
            writeln!(f, "leg: {w}")?;
        }
        for p in &self.uncovered {
            writeln!(f, "uncovered: {p}")?;
        }
        Ok(())
    }
}

/// Checks the leg conditions for the covering's kind and that the images
/// cover the base.
pub fn check_covering(c: &Covering) -> CoveringReport {
    let mut rep = CoveringReport::default();
    let mut covered = c.base.empty_set();
    for (label, leg) in &c.legs {
        let r = leg.analyze();
        if !r.injective {
            rep.leg_failures.push(format!("{label} is not injective"));
        }
        if !r.continuous {
            rep.leg_failures.push(format!("{label} is not continuous"));
        }
        if c.kind == CoverKind::Open && !r.open_map {
            rep.leg_failures.push(format!("{label} is not an open map"));
        }
        covered.union_with(&leg.image());
    }
    for q in 0..c.base.len() {
        if !covered.contains(q) {
            rep.uncovered.push(c.base.point(q).into());
        }
    }
    rep
}

/// Gluing data of a covering: overlaps are the pullbacks of pairs of legs,
/// anchors their first projections, transitions the coordinate swaps. The
/// diagonal overlaps are the patches themselves.
pub fn data_of_covering(c: &Covering) -> Result<GluingData, CoverError> {
    let labels: Vec<&str> = c.legs.iter().map(|(l, _)| l.as_str()).collect();
    let mut b = GluingData::builder(&labels);
    let mut pbs = BTreeMap::new();
    for (i, li) in &c.legs {
        b = b.patch(i, li.dom());
        for (j, lj) in &c.legs {
            if i != j {
                pbs.insert((i.clone(), j.clone()), pullback_named(li, lj, &format!("U({i},{j})"))?);
            }
        }
    }
    for ((i, j), pb) in &pbs {
        let back = &pbs[&(j.clone(), i.clone())];
        let mut index = BTreeMap::new();
        for t in 0..back.space.len() {
            index.insert((back.proj_f.at(t), back.proj_g.at(t)), t);
        }
        let table = (0..pb.space.len()).map(|t| index[&(pb.proj_g.at(t), pb.proj_f.at(t))]).collect();
        let swap = SpaceMap::from_indices(&pb.space, &back.space, table)?;
        b = b.overlap(i, j, &pb.space, pb.proj_f.clone()).transition(i, j, swap);
    }
    Ok(derive_triple_maps(&b.build()?)?)
}

/// Everything built from a covering by [`functor_of_covering`].
#[derive(Clone, Debug)]
pub struct CoveringGluing {
    pub data: GluingData,
    pub functor: GluingFunctor,
    pub glued: GluedSpace,
    /// The covering's legs as a cone over the functor.
    pub base_cone: Cone,
    /// Mediating map from the glued space to the base.
    pub to_base: SpaceMap,
    /// Mediating map back, when it exists (it fails to be continuous when
    /// the base carries a coarser topology than the glued one).
    pub from_base: Result<SpaceMap, GlueError>,
    /// The six characterization properties evaluated on the base.
    pub base_report: GluedReport,
}

impl CoveringGluing {
    /// Whether the base is the glued space, witnessed by mutually inverse
    /// mediating maps.
    pub fn is_iso(&self) -> bool {
        match &self.from_base {
            Ok(back) => {
                compose(back, &self.to_base).ok() == Some(SpaceMap::identity(&self.glued.space))
                    && compose(&self.to_base, back).ok() == Some(SpaceMap::identity(&self.base_cone.apex))
            }
            Err(_) => false,
        }
    }

    /// Witnesses against `i(U_i) ∩ i(U_j) = i(anchor(U(i,j)))`.
    pub fn intersection_failures(&self) -> &[String] {
        &self.base_report.property("e)").witnesses
    }
}

/// Builds the gluing data of a covering, glues it and compares the result
/// with the base through mediating maps.
pub fn functor_of_covering(c: &Covering) -> Result<CoveringGluing, CoverError> {
    let rep = check_covering(c);
    if !rep.passed() {
        return Err(CoverError::NotACovering(Box::new(rep)));
    }
    let data = data_of_covering(c)?;
    let functor = crate::gdata::functor_of(&data)?;
    let glued = glue(&functor)?;
    let legs = c.legs.iter().cloned().collect();
    let base_cone = Cone::from_patch_legs(&functor, &c.base, legs)?;
    let to_base = mediate(&glued.cone, &base_cone)?;
    let from_base = mediate(&base_cone, &glued.cone);
    let base_report = check_glued_properties(&functor, &base_cone)?;
    Ok(CoveringGluing { data, functor, glued, base_cone, to_base, from_base, base_report })
}

/// The patch legs of a glued space as a covering. The kind is open exactly
/// when every anchor and transition is an open map.
pub fn covering_of_glued(fun: &GluingFunctor, glued: &GluedSpace) -> Covering {
    let kind = if check_otop(fun, glued).applicable() { CoverKind::Open } else { CoverKind::Gluing };
    let legs = fun.index().iter().map(|i| (i.clone(), glued.leg(i).clone())).collect();
    Covering { base: glued.space.clone(), legs, kind }
}

/// A homeomorphism on its own is a covering of either kind.
pub fn site_axiom_iso(phi: &SpaceMap) -> bool {
    if !phi.is_homeomorphism() {
        return false;
    }
    let c = Covering { base: phi.cod().clone(), legs: alloc::vec![("1".into(), phi.clone())], kind: CoverKind::Open };
    check_covering(&c).passed()
}

/// Composite family `{leg_i . sub_ij}`, labelled `i.j`, checked as a
/// covering of the base with the outer covering's kind.
pub fn site_axiom_compose(
    c: &Covering,
    subs: &BTreeMap<Idx, Covering>,
) -> Result<(Covering, CoveringReport), CoverError> {
    let mut legs = Vec::new();
    for (i, leg) in &c.legs {
        let sub = subs.get(i).ok_or_else(|| CoverError::WrongBase {
            label: i.clone(),
            base: leg.dom().id().into(),
            found: "nothing".into(),
        })?;
        if !same_space(&sub.base, leg.dom()) {
            return Err(CoverError::WrongBase { label: i.clone(), base: leg.dom().id().into(), found: sub.base.id().into() });
        }
        for (j, l) in &sub.legs {
            legs.push((format!("{i}.{j}"), compose(leg, l)?));
        }
    }
    let out = Covering::new(&c.base, legs, c.kind)?;
    let rep = check_covering(&out);
    Ok((out, rep))
}

/// Pulls every leg back along `phi: V -> base`, giving a covering of `V`
/// of the same kind.
pub fn site_axiom_basechange(c: &Covering, phi: &SpaceMap) -> Result<(Covering, CoveringReport), CoverError> {
    if !same_space(phi.cod(), &c.base) {
        return Err(CoverError::WrongBase { label: "base change".into(), base: c.base.id().into(), found: phi.cod().id().into() });
    }
    let mut legs = Vec::new();
    for (i, leg) in &c.legs {
        let pb = pullback_named(leg, phi, &format!("{}x[{}]{}", leg.dom().id(), c.base.id(), phi.dom().id()))?;
        legs.push((i.to_string(), pb.proj_g));
    }
    let out = Covering::new(phi.dom(), legs, c.kind)?;
    let rep = check_covering(&out);
    Ok((out, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fintop::{find_homeomorphism, subspace, subspace_on, DEFAULT_BUDGET};
    use crate::fixtures::{self, arc3, c4, pt, sierp, sq9};
    use crate::glue::glue_data;
    use crate::pointset::PointSet;
    use proptest::prelude::*;

    fn sub(base: &Space, names: &[&str]) -> SpaceMap {
        subspace(base, names).unwrap().1
    }

    #[test]
    fn identity_and_sierpinski_coverings() {
        for kind in [CoverKind::Gluing, CoverKind::Open] {
            assert!(check_covering(&Covering::identity(&sierp(), kind)).passed());
        }
        let s = sierp();
        let legs = alloc::vec![("t".to_string(), sub(&s, &["t"])), ("all".to_string(), SpaceMap::identity(&s))];
        let c = Covering::new(&s, legs, CoverKind::Gluing).unwrap();
        assert!(check_covering(&c).passed());
        assert!(check_covering(&c.with_kind(CoverKind::Open)).passed());
        let c = Covering::new(&s, alloc::vec![("t".to_string(), sub(&s, &["t"]))], CoverKind::Gluing).unwrap();
        assert_eq!(check_covering(&c).uncovered, alloc::vec!["b".to_string()]);
    }

    #[test]
    fn single_leg_covering_is_trivial() {
        let g = functor_of_covering(&Covering::identity(&arc3(), CoverKind::Open)).unwrap();
        assert_eq!(g.data.index().len(), 1);
        assert!(g.is_iso());
    }

    #[test]
    fn pseudocircle_from_two_arcs() {
        let c = fixtures::c4_two_arcs();
        assert!(check_covering(&c).passed());
        let g = functor_of_covering(&c).unwrap();
        assert!(g.is_iso());
        assert!(g.intersection_failures().is_empty());
        assert!(g.base_report.passed(), "{}", g.base_report);
        assert!(find_homeomorphism(&g.glued.space, &c4(), DEFAULT_BUDGET).unwrap().is_some());
    }

    #[test]
    fn square_from_two_strips() {
        let c = fixtures::sq9_two_strips();
        assert!(check_covering(&c).passed());
        assert!(!check_covering(&c.with_kind(CoverKind::Open)).passed());
        let g = functor_of_covering(&c).unwrap();
        assert!(g.is_iso());
        assert!(find_homeomorphism(&g.glued.space, &sq9(), DEFAULT_BUDGET).unwrap().is_some());
    }

    #[test]
    fn point_covering_of_sierpinski_is_not_glued() {
        // Six properties hold, but the glued space is discrete.
        let s = sierp();
        let legs = alloc::vec![("t".to_string(), sub(&s, &["t"])), ("b".to_string(), sub(&s, &["b"]))];
        let g = functor_of_covering(&Covering::new(&s, legs, CoverKind::Gluing).unwrap()).unwrap();
        assert!(g.base_report.passed());
        assert!(!g.is_iso());
        assert!(matches!(g.from_base, Err(GlueError::NotContinuous(_))));
    }

    #[test]
    fn coverings_of_glued_spaces() {
        let (fun, glued) = glue_data(&fixtures::gd_circ()).unwrap();
        let c = covering_of_glued(&fun, &glued);
        assert_eq!(c.kind, CoverKind::Open);
        assert!(check_covering(&c).passed());
        let (fun, glued) = glue_data(&fixtures::sierp_closed_point_gluing()).unwrap();
        let c = covering_of_glued(&fun, &glued);
        assert_eq!(c.kind, CoverKind::Gluing);
        assert!(check_covering(&c).passed());
        let gd = crate::gdata::derive_triple_maps(&fixtures::trivial_data(&arc3())).unwrap();
        let (fun, glued) = glue_data(&gd).unwrap();
        let c = covering_of_glued(&fun, &glued);
        assert!(c.legs[0].1.is_homeomorphism());
    }

    #[test]
    fn iso_axiom_examples() {
        assert!(site_axiom_iso(&SpaceMap::identity(&c4())));
        let h = find_homeomorphism(&glue_data(&fixtures::gd_circ()).unwrap().1.space, &c4(), DEFAULT_BUDGET)
            .unwrap()
            .unwrap();
        assert!(site_axiom_iso(&h));
        assert!(!site_axiom_iso(&SpaceMap::constant(&arc3(), &pt(), "p").unwrap()));
    }

    #[test]
    fn compose_axiom_examples() {
        let c = fixtures::c4_two_arcs();
        let ids: BTreeMap<Idx, Covering> =
            c.legs.iter().map(|(i, l)| (i.clone(), Covering::identity(l.dom(), c.kind))).collect();
        let (out, rep) = site_axiom_compose(&c, &ids).unwrap();
        assert!(rep.passed());
        assert_eq!(out.legs.iter().map(|(_, m)| m.clone()).collect::<Vec<_>>(), c.legs.iter().map(|(_, m)| m.clone()).collect::<Vec<_>>());
        // Refine each arc by its open end points and itself.
        let mut subs = BTreeMap::new();
        for (i, l) in &c.legs {
            let a = l.dom();
            let legs = alloc::vec![
                ("l".to_string(), sub(a, &["l"])),
                ("r".to_string(), sub(a, &["r"])),
                ("all".to_string(), SpaceMap::identity(a)),
            ];
            subs.insert(i.clone(), Covering::new(a, legs, CoverKind::Open).unwrap());
        }
        assert!(site_axiom_compose(&c, &subs).unwrap().1.passed());
        // Drop the middle point from one refinement.
        let (i, l) = &c.legs[0];
        let a = l.dom();
        let legs = alloc::vec![("l".to_string(), sub(a, &["l"])), ("r".to_string(), sub(a, &["r"]))];
        subs.insert(i.clone(), Covering::new(a, legs, CoverKind::Open).unwrap());
        assert_eq!(site_axiom_compose(&c, &subs).unwrap().1.uncovered.len(), 1);
    }

    #[test]
    fn basechange_axiom_examples() {
        let c = fixtures::c4_two_arcs();
        let (out, rep) = site_axiom_basechange(&c, &SpaceMap::identity(&c4())).unwrap();
        assert!(rep.passed());
        assert_eq!(out.legs.len(), 2);
        for (_, leg) in &out.legs {
            assert_eq!(leg.dom().len(), 3);
        }
        let interior = SpaceMap::constant(&pt(), &c4(), "m1").unwrap();
        let (out, rep) = site_axiom_basechange(&c, &interior).unwrap();
        assert!(rep.passed());
        let nonempty: Vec<_> = out.legs.iter().filter(|(_, l)| !l.dom().is_empty()).collect();
        assert_eq!(nonempty.len(), 1);
        let both = SpaceMap::new(&arc3(), &c4(), [("l", "l"), ("m", "m1"), ("r", "r")]).unwrap();
        let (out, rep) = site_axiom_basechange(&c, &both).unwrap();
        assert!(rep.passed());
        assert!(out.legs.iter().all(|(_, l)| !l.dom().is_empty()));
        assert_eq!(out.kind, CoverKind::Open);
    }

    fn arb_covering() -> impl Strategy<Value = (Covering, Vec<Vec<bool>>)> {
        (crate::fintop::tests::arb_space(6), any::<bool>(), proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 1..4), proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 4))
            .prop_map(|(s, open, masks, submasks)| {
                let n = s.len();
                let kind = if open { CoverKind::Open } else { CoverKind::Gluing };
                let mut sets: Vec<PointSet> = masks
                    .iter()
                    .map(|m| {
                        let set = PointSet::from_indices(n, (0..n).filter(|&x| m[x]));
                        if open { s.open_hull(&set) } else { set }
                    })
                    .collect();
                // Patch up coverage with the missing points' minimal opens.
                let mut covered = s.empty_set();
                for t in &sets {
                    covered.union_with(t);
                }
                for x in 0..n {
                    if !covered.contains(x) {
                        let add = if open { s.min_open(x).clone() } else { PointSet::singleton(n, x) };
                        covered.union_with(&add);
                        sets.push(add);
                    }
                }
                let legs = sets
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| !t.is_empty())
                    .map(|(k, t)| (format!("{k}"), subspace_on(&s, t, &format!("S{k}")).unwrap().1))
                    .collect();
                (Covering::new(&s, legs, kind).unwrap(), submasks)
            })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn site_axioms_hold_for_subspace_coverings((c, submasks) in arb_covering(), target in 0usize..64) {
            prop_assert!(check_covering(&c).passed());
            // Composition with subcoverings built the same way on each patch.
            let mut subs = BTreeMap::new();
            for (k, (i, leg)) in c.legs.iter().enumerate() {
                let p = leg.dom();
                let m = &submasks[k % submasks.len()];
                let n = p.len();
                let part = PointSet::from_indices(n, (0..n).filter(|&x| m[x % m.len()]));
                let part = if c.kind == CoverKind::Open { p.open_hull(&part) } else { part };
                let mut legs = alloc::vec![("all".to_string(), SpaceMap::identity(p))];
                if !part.is_empty() {
                    legs.push(("part".to_string(), subspace_on(p, &part, "P").unwrap().1));
                }
                subs.insert(i.clone(), Covering::new(p, legs, c.kind).unwrap());
            }
            prop_assert!(site_axiom_compose(&c, &subs).unwrap().1.passed());
            // Base change along a constant map and along the identity.
            let q = target % c.base.len();
            let phi = SpaceMap::from_indices(&pt(), &c.base, alloc::vec![q]).unwrap();
            let (out, rep) = site_axiom_basechange(&c, &phi).unwrap();
            prop_assert!(rep.passed());
            prop_assert_eq!(out.kind, c.kind);
            prop_assert!(site_axiom_basechange(&c, &SpaceMap::identity(&c.base)).unwrap().1.passed());
            prop_assert!(site_axiom_iso(&SpaceMap::identity(&c.base)));
            // The covering's gluing data always satisfies the intersection
            // equalities.
            let g = functor_of_covering(&c).unwrap();
            prop_assert!(g.intersection_failures().is_empty());
            if c.kind == CoverKind::Open {
                prop_assert!(g.is_iso());
            }
        }
    }
}
