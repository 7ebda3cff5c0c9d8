//! Brute-force oracles shared by unit tests. They work on explicit open-set
//! lattices and never consult minimal-open tables beyond the definition of
//! openness, so they are independent of the fast paths they check.

use alloc::vec::Vec;

use crate::fintop::{FiniteSpace, Space, SpaceMap};
use crate::pointset::PointSet;

/// Every subset of the space as a bitmask (spaces up to 20 points).
pub fn subsets(n: usize) -> impl Iterator<Item = PointSet> {
    (0u32..(1 << n)).map(move |m| PointSet::from_indices(n, (0..n).filter(|i| m & (1 << i) != 0)))
}

/// Open-set lattice from the definition: `S` is open iff it is a union of
/// minimal open sets.
pub fn open_sets(s: &FiniteSpace) -> Vec<PointSet> {
    subsets(s.len())
        .filter(|c| {
            let mut u = s.empty_set();
            for x in c.iter() {
                u.union_with(s.min_open(x));
            }
            u == *c
        })
        .collect()
}

/// Closes a family under pairwise union and intersection, adding the empty
/// and full sets.
pub fn close_family(n: usize, gens: &[PointSet]) -> Vec<PointSet> {
    let mut fam: Vec<PointSet> = gens.to_vec();
    fam.push(PointSet::empty(n));
    fam.push(PointSet::full(n));
    loop {
        let mut added = false;
        let snapshot = fam.clone();
        for a in &snapshot {
            for b in &snapshot {
                for c in [a.union(b), a.intersection(b)] {
                    if !fam.contains(&c) {
                        fam.push(c);
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }
    fam.sort();
    fam.dedup();
    fam
}

pub fn continuous(f: &SpaceMap) -> bool {
    open_sets(f.cod()).iter().all(|o| f.dom().is_open_set(&f.preimage(o)))
}

pub fn open_map(f: &SpaceMap) -> bool {
    open_sets(f.dom()).iter().all(|o| f.cod().is_open_set(&f.image_of(o)))
}

pub fn embedding(f: &SpaceMap) -> bool {
    if !f.is_injective() || !continuous(f) {
        return false;
    }
    let img = f.image();
    let cod_opens = open_sets(f.cod());
    open_sets(f.dom())
        .iter()
        .all(|o| cod_opens.iter().any(|w| w.intersection(&img) == f.image_of(o)))
}

/// Every function `A -> B` filtered by the open-set definition of
/// continuity.
pub fn continuous_maps(a: &Space, b: &Space) -> Vec<SpaceMap> {
    let mut out = Vec::new();
    let n = a.len();
    let total = b.len().pow(n as u32);
    for mut code in 0..total {
        let mut table = alloc::vec![0; n];
        for slot in table.iter_mut() {
            *slot = code % b.len();
            code /= b.len();
        }
        let f = SpaceMap::from_indices(a, b, table).unwrap();
        if continuous(&f) {
            out.push(f);
        }
    }
    out
}
