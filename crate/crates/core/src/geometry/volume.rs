//! Exact volume by pulling triangulation, and face counting.

use std::collections::{HashMap, HashSet};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::bits::BitSet;
use crate::exact::Rational;
use crate::geometry::linalg::determinant;
use crate::geometry::Polytope;
use crate::Result;

/// Facets of the face `face` (a vertex set of affine dimension >= 1).
///
/// Every facet of a face is `face ∩ F` for some facet `F` of the polytope, and those
/// intersections that are inclusion-maximal among the proper ones are exactly its facets.
fn subfaces(p: &Polytope, face: &BitSet) -> Vec<BitSet> {
    let mut cands: Vec<BitSet> = Vec::new();
    let total = face.count();
    for inc in p.incidence() {
        let c = face.intersection(inc);
        if c.count() < total && !c.is_empty() && !cands.contains(&c) {
            cands.push(c);
        }
    }
    let maximal: Vec<BitSet> = cands
        .iter()
        .filter(|c| !cands.iter().any(|o| o != *c && c.is_subset(o)))
        .cloned()
        .collect();
    maximal
}

struct Triangulator<'a> {
    p: &'a Polytope,
    memo: HashMap<BitSet, Vec<Vec<usize>>>,
}

impl Triangulator<'_> {
    /// Pulling triangulation of a face of dimension `k`: cone from its smallest vertex over
    /// the triangulated facets of the face that avoid that vertex.
    fn triangulate(&mut self, face: &BitSet, k: usize) -> Vec<Vec<usize>> {
        if face.count() == k + 1 {
            return vec![face.iter().collect()];
        }
        if let Some(t) = self.memo.get(face) {
            return t.clone();
        }
        let apex = face.first().expect("nonempty face");
        let mut out = Vec::new();
        for sub in subfaces(self.p, face) {
            if sub.contains(apex) {
                continue;
            }
            for mut simplex in self.triangulate(&sub, k - 1) {
                simplex.insert(0, apex);
                out.push(simplex);
            }
        }
        self.memo.insert(face.clone(), out.clone());
        out
    }
}

/// Simplices (as vertex-index lists) of the pulling triangulation from the smallest vertex.
pub fn triangulation(p: &Polytope) -> Vec<Vec<usize>> {
    let mut t = Triangulator {
        p,
        memo: HashMap::new(),
    };
    t.triangulate(&BitSet::full(p.vertex_count()), p.dim())
}

/// Exact Lebesgue volume.
pub fn volume(p: &Polytope) -> Result<Rational> {
    let d = p.dim();
    let vs = p.vertices();
    let simplices = triangulation(p);
    let total: Rational = simplices
        .par_iter()
        .map(|s| {
            let base = &vs[s[0]];
            let m: Vec<Vec<Rational>> = s[1..]
                .iter()
                .map(|&i| (&vs[i] - base).into_coords())
                .collect();
            determinant(&m).abs()
        })
        .reduce(Rational::zero, |a, b| a + b);
    let fact: BigInt = (1..=d as u64).map(BigInt::from).product();
    Ok(total / Rational::from_integer(fact))
}

/// Face counts `(f_0, ..., f_{d-1})`.
pub fn f_vector(p: &Polytope) -> Vec<usize> {
    let d = p.dim();
    let mut counts = vec![0; d];
    counts[0] = p.vertex_count();
    let mut level: HashSet<BitSet> = p.incidence().iter().cloned().collect();
    for k in (1..d).rev() {
        counts[k] = level.len();
        if k == 1 {
            break;
        }
        let mut next = HashSet::new();
        for face in &level {
            next.extend(subfaces(p, face));
        }
        level = next;
    }
    counts
}
