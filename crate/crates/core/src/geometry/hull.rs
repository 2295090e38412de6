//! Facet enumeration by the double description method on the homogenized polar cone.
//!
//! For points `q_i` (shifted so the centroid is the origin) the facets of their hull are
//! the vertices of `{a : <q_i, a> <= 1}`, i.e. the extreme rays of the pointed cone
//! `{(a, s) : s - <q_i, a> >= 0}`. Rays are kept as primitive integer vectors.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::bits::BitSet;
use crate::exact::{primitive_integer, Rational};
use crate::geometry::linalg::{affine_dimension, inverse, rank};
use crate::geometry::{HalfSpace, RationalVector};
use crate::{Error, Result};

pub(crate) struct HullData {
    pub vertices: Vec<RationalVector>,
    pub facets: Vec<HalfSpace>,
    /// `incidence[f]` holds the indices of the vertices on facet `f`.
    pub incidence: Vec<BitSet>,
}

#[derive(Clone)]
struct Ray {
    coords: Vec<BigInt>,
    zero: BitSet,
}

fn dot_int(row: &[BigInt], ray: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    for (a, b) in row.iter().zip(ray) {
        if !a.is_zero() && !b.is_zero() {
            acc += a * b;
        }
    }
    acc
}

fn normalize(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut v {
            *x /= &g;
        }
    }
    v
}

pub(crate) fn check_dims(points: &[RationalVector]) -> Result<usize> {
    let first = points.first().ok_or(Error::Empty)?;
    let d = first.dim();
    if d == 0 {
        return Err(Error::Empty);
    }
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    Ok(d)
}

pub(crate) fn hull(points: &[RationalVector]) -> Result<HullData> {
    let d = check_dims(points)?;
    let mut pts = points.to_vec();
    pts.sort();
    pts.dedup();
    let affine_dim = affine_dimension(&pts);
    if affine_dim < d {
        return Err(Error::DimensionDeficient {
            ambient: d,
            affine_dim,
        });
    }
    let n = pts.len();
    let inv_n = Rational::new(BigInt::one(), BigInt::from(n));
    let center = pts
        .iter()
        .fold(RationalVector::zeros(d), |acc, p| &acc + p)
        .scale(&inv_n);

    // Row i: (-q_i, 1) scaled to a primitive integer vector.
    let rows: Vec<Vec<BigInt>> = pts
        .iter()
        .map(|p| {
            let q = p - &center;
            let mut r: Vec<Rational> = q.coords().iter().map(|c| -c).collect();
            r.push(Rational::one());
            primitive_integer(&r)
        })
        .collect();

    let rays = double_description(&rows, d + 1);

    let mut facets = Vec::with_capacity(rays.len());
    let mut zero_sets = Vec::with_capacity(rays.len());
    for ray in rays {
        let s = &ray.coords[d];
        debug_assert!(s.is_positive(), "polar cone of a full-dimensional hull is pointed");
        let s = Rational::from_integer(s.clone());
        let normal = RationalVector::new(
            ray.coords[..d]
                .iter()
                .map(|a| Rational::from_integer(a.clone()) / &s)
                .collect(),
        );
        let offset = Rational::one() + normal.dot(&center);
        facets.push(HalfSpace::canonical(normal, offset));
        zero_sets.push(ray.zero);
    }

    // A point is a vertex iff the facets through it meet in that point alone.
    let is_vertex: Vec<bool> = (0..n)
        .map(|i| {
            let mut meet = BitSet::full(n);
            let mut any = false;
            for z in &zero_sets {
                if z.contains(i) {
                    meet = meet.intersection(z);
                    any = true;
                }
            }
            any && meet.count() == 1
        })
        .collect();
    let mut remap = vec![usize::MAX; n];
    let mut vertices = Vec::new();
    for (i, p) in pts.into_iter().enumerate() {
        if is_vertex[i] {
            remap[i] = vertices.len();
            vertices.push(p);
        }
    }
    let nv = vertices.len();
    let mut order: Vec<usize> = (0..facets.len()).collect();
    order.sort_by(|&a, &b| facets[a].cmp(&facets[b]));
    let mut sorted_facets = Vec::with_capacity(facets.len());
    let mut incidence = Vec::with_capacity(facets.len());
    for f in order {
        let mut inc = BitSet::new(nv);
        for i in zero_sets[f].iter() {
            if remap[i] != usize::MAX {
                inc.insert(remap[i]);
            }
        }
        sorted_facets.push(facets[f].clone());
        incidence.push(inc);
    }
    Ok(HullData {
        vertices,
        facets: sorted_facets,
        incidence,
    })
}

/// Extreme rays of `{y : row . y >= 0 for all rows}` in `R^dim`, assumed pointed and
/// full-dimensional. Each ray carries the set of row indices tight at it.
fn double_description(rows: &[Vec<BigInt>], dim: usize) -> Vec<Ray> {
    let m = rows.len();
    // Initial simplicial cone from `dim` independent rows.
    let mut basis: Vec<usize> = Vec::with_capacity(dim);
    let mut basis_rows: Vec<RationalVector> = Vec::with_capacity(dim);
    for (i, r) in rows.iter().enumerate() {
        let cand = RationalVector::new(r.iter().map(|x| Rational::from_integer(x.clone())).collect());
        basis_rows.push(cand);
        if rank(&basis_rows) == basis_rows.len() {
            basis.push(i);
            if basis.len() == dim {
                break;
            }
        } else {
            basis_rows.pop();
        }
    }
    assert_eq!(basis.len(), dim, "constraint system must have full rank");
    let b: Vec<Vec<Rational>> = basis_rows.iter().map(|r| r.coords().to_vec()).collect();
    let binv = inverse(&b).expect("basis rows are independent");

    let mut rays: Vec<Ray> = (0..dim)
        .map(|j| {
            let col: Vec<Rational> = (0..dim).map(|i| binv[i][j].clone()).collect();
            let mut zero = BitSet::new(m);
            for (k, &bi) in basis.iter().enumerate() {
                if k != j {
                    zero.insert(bi);
                }
            }
            Ray {
                coords: primitive_integer(&col),
                zero,
            }
        })
        .collect();

    let mut in_basis = vec![false; m];
    for &bi in &basis {
        in_basis[bi] = true;
    }
    for (k, row) in rows.iter().enumerate() {
        if in_basis[k] {
            continue;
        }
        let values: Vec<BigInt> = rays.iter().map(|r| dot_int(row, &r.coords)).collect();
        let pos: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&i| values[i].is_negative()).collect();
        if neg.is_empty() {
            for (r, v) in rays.iter_mut().zip(&values) {
                if v.is_zero() {
                    r.zero.insert(k);
                }
            }
            continue;
        }

        let current = &rays;
        let created: Vec<Ray> = pos
            .par_iter()
            .flat_map_iter(|&p| {
                let values = &values;
                neg.iter().filter_map(move |&q| {
                    let common = current[p].zero.intersection(&current[q].zero);
                    if common.count() + 2 < dim {
                        return None;
                    }
                    let blocked = current
                        .iter()
                        .enumerate()
                        .any(|(t, r)| t != p && t != q && common.is_subset(&r.zero));
                    if blocked {
                        return None;
                    }
                    let vp = &values[p];
                    let vq = -&values[q];
                    let coords: Vec<BigInt> = current[q]
                        .coords
                        .iter()
                        .zip(&current[p].coords)
                        .map(|(a, b)| vp * a + &vq * b)
                        .collect();
                    let mut zero = common;
                    zero.insert(k);
                    Some(Ray {
                        coords: normalize(coords),
                        zero,
                    })
                })
            })
            .collect();

        let mut next: Vec<Ray> = Vec::with_capacity(pos.len() + created.len());
        for (i, mut r) in std::mem::take(&mut rays).into_iter().enumerate() {
            if values[i].is_positive() {
                next.push(r);
            } else if values[i].is_zero() {
                r.zero.insert(k);
                next.push(r);
            }
        }
        next.extend(created);
        rays = next;
    }
    rays
}
