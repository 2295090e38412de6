//! Self-polar polytopes spanned by points of `{-1, 0, 1}^d`.
//!
//! Antipodal pairs of nonzero grid points form the nodes of a graph with an edge whenever
//! `|ω(v, w)| <= 1`. Every inclusion-maximal clique `R` gives `K_R = conv(R ∪ -R)`, which
//! lies in its symplectic polar by construction; the reverse inclusion is checked exactly.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_traits::{One, Signed};
use rayon::prelude::*;

use crate::bits::BitSet;
use crate::exact::Rational;
use crate::geometry::{convex_hull, volume, Polytope, RationalVector};
use crate::symplectic::{check_subset_sympolar, omega_unchecked, symplectic_polar};
use crate::{Error, Result};

/// Polytopes sharing a vertex count and volume.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CliqueClass {
    pub vertex_count: usize,
    pub volume: Rational,
    pub count: usize,
    pub representative: Polytope,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationReport {
    pub dim: usize,
    pub cliques: usize,
    pub self_polar: usize,
    /// Cliques whose polytope is strictly smaller than its symplectic polar.
    pub rejected: usize,
    /// Cliques spanning a proper subspace.
    pub degenerate: usize,
    /// The clique budget ran out before the search finished.
    pub partial: bool,
    /// Sorted by vertex count, then volume.
    pub classes: Vec<CliqueClass>,
}

/// One representative of each antipodal pair of nonzero points in `{-1, 0, 1}^dim`,
/// namely the one whose first nonzero coordinate is positive.
pub fn grid_pairs(dim: usize) -> Vec<RationalVector> {
    let total = 3usize.pow(dim as u32);
    let mut out = Vec::with_capacity((total - 1) / 2);
    for code in 0..total {
        let mut c = code;
        let coords: Vec<i64> = (0..dim)
            .map(|_| {
                let d = (c % 3) as i64 - 1;
                c /= 3;
                d
            })
            .collect();
        if coords.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(RationalVector::from_ints(&coords));
        }
    }
    out.sort();
    out
}

struct Graph {
    adj: Vec<BitSet>,
}

impl Graph {
    fn compatibility(points: &[RationalVector]) -> Self {
        let n = points.len();
        let one = Rational::one();
        let mut adj = vec![BitSet::new(n); n];
        for i in 0..n {
            for j in i + 1..n {
                if omega_unchecked(&points[i], &points[j]).abs() <= one {
                    adj[i].insert(j);
                    adj[j].insert(i);
                }
            }
        }
        Graph { adj }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }
}

/// Shared stop signal for budgeted searches.
struct Budget {
    limit: Option<usize>,
    used: AtomicUsize,
}

impl Budget {
    /// Claims one clique slot; `false` once the limit is reached.
    fn claim(&self) -> bool {
        match self.limit {
            None => true,
            Some(l) => self.used.fetch_add(1, Ordering::SeqCst) < l,
        }
    }

    fn exhausted(&self) -> bool {
        self.limit.is_some_and(|l| self.used.load(Ordering::SeqCst) >= l)
    }
}

/// Pivoting Bron–Kerbosch. Returns `false` when the budget stopped the search.
fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<usize>,
    mut p: BitSet,
    mut x: BitSet,
    budget: &Budget,
    out: &mut Vec<Vec<usize>>,
) -> bool {
    if p.is_empty() {
        if x.is_empty() {
            if !budget.claim() {
                return false;
            }
            let mut clique = r.clone();
            clique.sort_unstable();
            out.push(clique);
        }
        return true;
    }
    let pivot = p
        .iter()
        .chain(x.iter())
        .max_by_key(|&u| (p.intersection_count(&g.adj[u]), std::cmp::Reverse(u)))
        .expect("P is nonempty");
    let candidates: Vec<usize> = p.difference(&g.adj[pivot]).iter().collect();
    for v in candidates {
        r.push(v);
        let cont = bron_kerbosch(
            g,
            r,
            p.intersection(&g.adj[v]),
            x.intersection(&g.adj[v]),
            budget,
            out,
        );
        r.pop();
        if !cont {
            return false;
        }
        p.remove(v);
        x.insert(v);
    }
    true
}

/// Maximal cliques as index lists into `grid_pairs(dim)`, plus whether the budget cut the
/// search short. Root branches run concurrently; the result is sorted.
fn maximal_cliques(g: &Graph, limit: Option<usize>) -> (Vec<Vec<usize>>, bool) {
    let n = g.len();
    let budget = Budget { limit, used: AtomicUsize::new(0) };
    let root = |v: usize| {
        let mut p = BitSet::new(n);
        let mut x = BitSet::new(n);
        for u in g.adj[v].iter() {
            if u > v {
                p.insert(u);
            } else {
                x.insert(u);
            }
        }
        let mut out = Vec::new();
        let mut r = vec![v];
        bron_kerbosch(g, &mut r, p, x, &budget, &mut out);
        out
    };
    let mut cliques: Vec<Vec<usize>> = if limit.is_some() {
        // Sequential roots keep the truncated output independent of scheduling.
        let mut all = Vec::new();
        for v in 0..n {
            all.extend(root(v));
            if budget.exhausted() {
                break;
            }
        }
        all
    } else {
        (0..n).into_par_iter().flat_map_iter(root).collect()
    };
    cliques.sort();
    (cliques, budget.exhausted())
}

/// Grid cliques as explicit point sets `R`, for callers that want the raw search.
pub fn maximal_grid_cliques(dim: usize, budget: Option<usize>) -> Result<(Vec<Vec<RationalVector>>, bool)> {
    check_dim(dim, budget)?;
    let pts = grid_pairs(dim);
    let (cliques, partial) = maximal_cliques(&Graph::compatibility(&pts), budget);
    let sets = cliques
        .into_iter()
        .map(|c| c.into_iter().map(|i| pts[i].clone()).collect())
        .collect();
    Ok((sets, partial))
}

fn check_dim(dim: usize, budget: Option<usize>) -> Result<()> {
    match (dim, budget) {
        (2 | 4, _) | (6, Some(_)) => Ok(()),
        (6, None) => Err(Error::Parameter(
            "enumeration in dimension 6 requires a clique budget".into(),
        )),
        _ => Err(Error::Parameter(format!("dimension must be 2, 4 or 6, got {dim}"))),
    }
}

enum Outcome {
    SelfPolar(Polytope, Rational),
    Rejected,
    Degenerate,
}

fn classify(r: &[RationalVector]) -> Result<Outcome> {
    let mut pts: Vec<RationalVector> = r.iter().map(|p| -p).collect();
    pts.extend_from_slice(r);
    let k = match convex_hull(&pts) {
        Ok(k) => k,
        Err(Error::DimensionDeficient { .. }) => return Ok(Outcome::Degenerate),
        Err(e) => return Err(e),
    };
    let polar = symplectic_polar(&k)?;
    if !check_subset_sympolar(&polar)?.holds {
        return Ok(Outcome::Rejected);
    }
    let vol = volume(&k)?;
    Ok(Outcome::SelfPolar(k, vol))
}

pub fn enumerate_pm1(dim: usize, budget: Option<usize>) -> Result<EnumerationReport> {
    let (cliques, partial) = maximal_grid_cliques(dim, budget)?;
    let outcomes: Vec<Outcome> = cliques
        .par_iter()
        .map(|r| classify(r))
        .collect::<Result<_>>()?;
    let mut report = EnumerationReport {
        dim,
        cliques: cliques.len(),
        self_polar: 0,
        rejected: 0,
        degenerate: 0,
        partial,
        classes: Vec::new(),
    };
    // Cliques arrive sorted, so the first member seen is the canonical representative.
    let mut classes: BTreeMap<(usize, Rational), CliqueClass> = BTreeMap::new();
    for outcome in outcomes {
        match outcome {
            Outcome::Rejected => report.rejected += 1,
            Outcome::Degenerate => report.degenerate += 1,
            Outcome::SelfPolar(k, vol) => {
                report.self_polar += 1;
                classes
                    .entry((k.vertex_count(), vol.clone()))
                    .and_modify(|c| c.count += 1)
                    .or_insert_with(|| CliqueClass {
                        vertex_count: k.vertex_count(),
                        volume: vol,
                        count: 1,
                        representative: k,
                    });
            }
        }
    }
    report.classes = classes.into_values().collect();
    Ok(report)
}
