//! Seeded random instances: spaces, gluing data, cocycle mutants, leg
//! families and coverings. Everything is driven by a ChaCha stream so a
//! seed reproduces a batch exactly.

use std::collections::BTreeMap;

use gluing_core::cover::{data_of_covering, CoverKind, Covering};
use gluing_core::fintop::{compose, subspace_on, FiniteSpace, Space, SpaceMap};
use gluing_core::gdata::{fill_triple_maps, GluingData, GluingFunctor};
use gluing_core::glidx::GlObject;
use gluing_core::glue::{Cone, GluedSpace};
use gluing_core::PointSet;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Rand = ChaCha8Rng;

pub fn rng(seed: u64) -> Rand {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random topology on `n` points `p0..`: a random relation closed up to
/// a preorder, read as minimal open sets.
#[allow(clippy::needless_range_loop)]
pub fn random_space(rng: &mut Rand, n: usize, id: &str) -> Space {
    let mut reach: Vec<Vec<bool>> = (0..n).map(|x| (0..n).map(|y| x == y || rng.random_bool(0.25)).collect()).collect();
    loop {
        let mut changed = false;
        for x in 0..n {
            for y in 0..n {
                if reach[x][y] {
                    for z in 0..n {
                        if reach[y][z] && !reach[x][z] {
                            reach[x][z] = true;
                            changed = true;
                        }
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    let table = (0..n)
        .map(|x| (format!("p{x}"), (0..n).filter(|&y| reach[x][y]).map(|y| format!("p{y}")).collect()))
        .collect();
    FiniteSpace::from_table(id, table).expect("preorder gives a topology")
}

/// Any function, continuous or not.
pub fn random_map(rng: &mut Rand, dom: &Space, cod: &Space) -> SpaceMap {
    let table = (0..dom.len()).map(|_| rng.random_range(0..cod.len())).collect();
    SpaceMap::from_indices(dom, cod, table).expect("in range")
}

/// A continuous map found by sampling, falling back to a constant.
pub fn random_continuous_map(rng: &mut Rand, dom: &Space, cod: &Space) -> SpaceMap {
    for _ in 0..32 {
        let m = random_map(rng, dom, cod);
        if m.is_continuous() {
            return m;
        }
    }
    let q = rng.random_range(0..cod.len());
    SpaceMap::from_indices(dom, cod, vec![q; dom.len()]).expect("constant")
}

fn random_subset(rng: &mut Rand, n: usize, size: usize, must: &[usize]) -> PointSet {
    let mut pts: Vec<usize> = (0..n).filter(|x| !must.contains(x)).collect();
    pts.shuffle(rng);
    let extra = size.saturating_sub(must.len()).min(pts.len());
    PointSet::from_indices(n, must.iter().copied().chain(pts.into_iter().take(extra)))
}

fn covering_of_sets(base: &Space, sets: &[PointSet], kind: CoverKind) -> Covering {
    let legs = sets
        .iter()
        .enumerate()
        .map(|(k, s)| (format!("{}", k + 1), subspace_on(base, s, &format!("S{}", k + 1)).expect("subspace").1))
        .collect();
    Covering::new(base, legs, kind).expect("legs land in the base")
}

/// Valid gluing data with up to `max_patches` patches of up to
/// `max_points` points: subspaces of a random space, glued along their
/// intersections.
pub fn random_gluing(rng: &mut Rand, max_patches: usize, max_points: usize) -> GluingData {
    let n = rng.random_range(2..=max_points + 2);
    let base = random_space(rng, n, "R");
    let k = rng.random_range(1..=max_patches);
    let mut sets: Vec<PointSet> = (0..k)
        .map(|_| {
            let size = rng.random_range(1..=max_points.min(n));
            random_subset(rng, n, size, &[])
        })
        .collect();
    let mut union = PointSet::empty(n);
    for s in &sets {
        union.union_with(s);
    }
    let (sub, inc) = subspace_on(&base, &union, "R").expect("subspace");
    let _ = inc;
    let mut restricted = Vec::new();
    for s in sets.drain(..) {
        let names: Vec<&str> = s.iter().map(|x| base.point(x)).collect();
        restricted.push(sub.set_of(&names).expect("inside the union"));
    }
    data_of_covering(&covering_of_sets(&sub, &restricted, CoverKind::Gluing)).expect("subspace coverings glue")
}

/// A three-patch instance whose patches share two core points, and a
/// mutant whose transitions between patches 1 and 2 swap the core points.
/// The mutant is still pairwise invertible but breaks the cocycle.
pub fn cocycle_mutant(rng: &mut Rand) -> (GluingData, GluingData) {
    let n = rng.random_range(3..=6);
    let base = random_space(rng, n, "R");
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let core = [pts[0], pts[1]];
    let sets: Vec<PointSet> = (0..3)
        .map(|_| {
            let size = rng.random_range(2..=4usize.min(n));
            random_subset(rng, n, size, &core)
        })
        .collect();
    let mut union = PointSet::empty(n);
    for s in &sets {
        union.union_with(s);
    }
    let (sub, _) = subspace_on(&base, &union, "R").expect("subspace");
    let restricted: Vec<PointSet> = sets
        .iter()
        .map(|s| sub.set_of(&s.iter().map(|x| base.point(x)).collect::<Vec<_>>()).expect("inside"))
        .collect();
    let gd = data_of_covering(&covering_of_sets(&sub, &restricted, CoverKind::Gluing)).expect("valid");
    let u = gd.overlap("1", "2").clone();
    let name = |x: usize| format!("({0},{0})", base.point(x));
    let (a, b) = (u.index_of(&name(core[0])).expect("core"), u.index_of(&name(core[1])).expect("core"));
    let mut table: Vec<usize> = (0..u.len()).collect();
    table.swap(a, b);
    let sigma = SpaceMap::from_indices(&u, &u, table).expect("swap");
    let phi12 = compose(gd.transition("1", "2"), &sigma).expect("composable");
    let phi21 = compose(&sigma, gd.transition("2", "1")).expect("composable");
    let m = gd
        .without_triple_maps()
        .with_transition("1", "2", phi12)
        .and_then(|m| m.with_transition("2", "1", phi21))
        .expect("same types");
    let m = fill_triple_maps(&m).expect("anchors are injective");
    (gd, m)
}

/// How a leg family was produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// The glued cone followed by a continuous map.
    Cone,
    /// A cone with one patch leg changed at one point.
    PatchPerturbed,
    /// A cone with one non-patch leg changed at one point.
    LegPerturbed,
    /// Independent random patch legs.
    Random,
}

fn perturb(rng: &mut Rand, m: &SpaceMap) -> SpaceMap {
    let mut t = m.table().to_vec();
    if t.is_empty() || m.cod().len() < 2 {
        return m.clone();
    }
    let x = rng.random_range(0..t.len());
    t[x] = (t[x] + rng.random_range(1..m.cod().len())) % m.cod().len();
    SpaceMap::from_indices(m.dom(), m.cod(), t).expect("in range")
}

/// A random leg family over `fun` with a random apex of up to four points.
pub fn random_leg_family(rng: &mut Rand, fun: &GluingFunctor, glued: &GluedSpace) -> (FamilyKind, Cone) {
    let n = rng.random_range(1..=4);
    let apex = random_space(rng, n, "A");
    let kind = *[FamilyKind::Cone, FamilyKind::PatchPerturbed, FamilyKind::LegPerturbed, FamilyKind::Random]
        .choose(rng)
        .expect("nonempty");
    let base = glued.cone.then(&random_continuous_map(rng, &glued.space, &apex)).expect("composable");
    let cone = match kind {
        FamilyKind::Cone => base,
        FamilyKind::PatchPerturbed => {
            let mut legs = base.patch_legs();
            let i = fun.index().choose(rng).expect("nonempty").clone();
            let l = perturb(rng, &legs[&i]);
            legs.insert(i, l);
            Cone::from_patch_legs(fun, &apex, legs).expect("typed")
        }
        FamilyKind::LegPerturbed => {
            let mut c = base;
            let others: Vec<GlObject> = c.legs.keys().filter(|o| !matches!(o, GlObject::Single(_))).cloned().collect();
            if let Some(o) = others.choose(rng) {
                let l = perturb(rng, &c.legs[o]);
                c.legs.insert(o.clone(), l);
            }
            c
        }
        FamilyKind::Random => {
            let legs: BTreeMap<String, SpaceMap> =
                fun.index().iter().map(|i| (i.clone(), random_map(rng, fun.patch(i), &apex))).collect();
            Cone::from_patch_legs(fun, &apex, legs).expect("typed")
        }
    };
    (kind, cone)
}

/// A covering of a random space of up to `max_points` points by subspaces
/// (open hulls for the open kind), with missing points patched in.
pub fn random_covering(rng: &mut Rand, max_points: usize, kind: CoverKind) -> Covering {
    let n = rng.random_range(1..=max_points);
    let base = random_space(rng, n, "R");
    let k = rng.random_range(1..=3);
    let hull = |s: PointSet| if kind == CoverKind::Open { base.open_hull(&s) } else { s };
    let mut sets: Vec<PointSet> = (0..k)
        .map(|_| {
            let size = rng.random_range(1..=n);
            hull(random_subset(rng, n, size, &[]))
        })
        .collect();
    let mut covered = PointSet::empty(n);
    for s in &sets {
        covered.union_with(s);
    }
    for x in 0..n {
        if !covered.contains(x) {
            let add = hull(PointSet::singleton(n, x));
            covered.union_with(&add);
            sets.push(add);
        }
    }
    covering_of_sets(&base, &sets, kind)
}

/// For every leg, a covering of its domain: the identity plus a random
/// part of the same kind.
pub fn random_subcoverings(rng: &mut Rand, c: &Covering) -> BTreeMap<String, Covering> {
    let mut out = BTreeMap::new();
    for (i, leg) in &c.legs {
        let p = leg.dom();
        let n = p.len();
        let part = PointSet::from_indices(n, (0..n).filter(|_| rng.random_bool(0.5)));
        let part = if c.kind == CoverKind::Open { p.open_hull(&part) } else { part };
        let mut legs = vec![("all".to_string(), SpaceMap::identity(p))];
        if !part.is_empty() {
            legs.push(("part".to_string(), subspace_on(p, &part, "P").expect("subspace").1));
        }
        out.insert(i.clone(), Covering::new(p, legs, c.kind).expect("legs land in the leg domain"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use gluing_core::cover::check_covering;
    use gluing_core::gdata::validate;

    #[test]
    fn same_seed_same_instances() {
        let a = random_gluing(&mut rng(7), 3, 4);
        let b = random_gluing(&mut rng(7), 3, 4);
        assert_eq!(a, b);
    }

    #[test]
    fn generated_instances_are_lawful() {
        let mut r = rng(1);
        for _ in 0..20 {
            let gd = random_gluing(&mut r, 3, 4);
            assert!(validate(&gd).passed());
            assert!(gd.index().iter().all(|i| gd.patch(i).len() <= 4));
            for kind in [CoverKind::Gluing, CoverKind::Open] {
                let c = random_covering(&mut r, 8, kind);
                assert!(check_covering(&c).passed());
            }
        }
    }

    #[test]
    fn mutants_break_validation() {
        let mut r = rng(2);
        for _ in 0..10 {
            let (gd, m) = cocycle_mutant(&mut r);
            assert!(validate(&gd).passed());
            assert!(!validate(&m).passed());
        }
    }
}
