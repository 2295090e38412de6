use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::bits::BitSet;
use crate::exact::{primitive_integer, Rational};
use crate::geometry::hull::hull;
use crate::geometry::linalg::{determinant, mat_vec, Matrix};
use crate::geometry::RationalVector;
use crate::{Error, Result};

/// The closed halfspace `{x : <normal, x> <= offset}`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: RationalVector,
    pub offset: Rational,
}

impl HalfSpace {
    /// Scales to offset 1 when the origin lies strictly inside, otherwise to a primitive
    /// integer normal.
    pub fn canonical(normal: RationalVector, offset: Rational) -> Self {
        if offset.is_positive() {
            let inv = offset.recip();
            return HalfSpace {
                normal: normal.scale(&inv),
                offset: Rational::one(),
            };
        }
        let mut all = normal.coords().to_vec();
        all.push(offset);
        let ints = primitive_integer(&all);
        let mut coords: Vec<Rational> = ints.into_iter().map(Rational::from_integer).collect();
        let offset = coords.pop().unwrap();
        HalfSpace {
            normal: RationalVector::new(coords),
            offset,
        }
    }

    pub fn value(&self, x: &RationalVector) -> Rational {
        self.normal.dot(x)
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.value(x) <= self.offset
    }

    pub fn is_tight(&self, x: &RationalVector) -> bool {
        self.value(x) == self.offset
    }
}

impl fmt::Debug for HalfSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?}, x> <= {}", self.normal, self.offset)
    }
}

/// A full-dimensional convex polytope in canonical V-representation with its facets.
///
/// Vertices are exactly the extreme points, sorted lexicographically. Two polytopes are
/// equal iff their canonical vertex lists are equal.
#[derive(Clone)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<RationalVector>,
    facets: Vec<HalfSpace>,
    incidence: Vec<BitSet>,
    symmetric: bool,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.vertices == other.vertices
    }
}

impl Eq for Polytope {}

impl fmt::Debug for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polytope")
            .field("dim", &self.dim)
            .field("vertices", &self.vertices)
            .field("facets", &self.facets.len())
            .finish()
    }
}

/// Convex hull of a full-dimensional point set.
pub fn convex_hull(points: &[RationalVector]) -> Result<Polytope> {
    let data = hull(points)?;
    let dim = points[0].dim();
    let symmetric = data
        .vertices
        .iter()
        .all(|v| data.vertices.binary_search(&-v).is_ok());
    Ok(Polytope {
        dim,
        vertices: data.vertices,
        facets: data.facets,
        incidence: data.incidence,
        symmetric,
    })
}

/// Classical polar `{y : <x, y> <= 1 for all x in P}`.
pub fn polar_dual(p: &Polytope) -> Result<Polytope> {
    p.require_origin_interior()?;
    let normals: Vec<RationalVector> = p.facets.iter().map(|f| f.normal.clone()).collect();
    convex_hull(&normals)
}

/// Minkowski gauge `min{t >= 0 : x in tP}`.
pub fn gauge_norm(p: &Polytope, x: &RationalVector) -> Result<Rational> {
    p.require_origin_interior()?;
    p.require_dim(x.dim())?;
    Ok(p
        .facets
        .iter()
        .map(|f| f.value(x))
        .fold(Rational::zero(), |m, v| if v > m { v } else { m }))
}

/// Area of the projection onto the first two coordinates.
pub fn shadow_area(p: &Polytope) -> Result<Rational> {
    if p.dim < 2 {
        return Err(Error::Parameter(format!(
            "shadow area needs dimension >= 2, got {}",
            p.dim
        )));
    }
    let mut pts: Vec<(Rational, Rational)> = p
        .vertices
        .iter()
        .map(|v| (v[0].clone(), v[1].clone()))
        .collect();
    pts.sort();
    pts.dedup();
    let ring = planar_hull(&pts);
    let n = ring.len();
    let mut twice = Rational::zero();
    for i in 0..n {
        let (x0, y0) = &ring[i];
        let (x1, y1) = &ring[(i + 1) % n];
        twice += x0 * y1 - x1 * y0;
    }
    Ok(twice.abs() / Rational::from_integer(2.into()))
}

/// Andrew's monotone chain on sorted, distinct points; counterclockwise, collinear dropped.
fn planar_hull(pts: &[(Rational, Rational)]) -> Vec<(Rational, Rational)> {
    if pts.len() < 3 {
        return pts.to_vec();
    }
    let cross = |o: &(Rational, Rational), a: &(Rational, Rational), b: &(Rational, Rational)| {
        (&a.0 - &o.0) * (&b.1 - &o.1) - (&a.1 - &o.1) * (&b.0 - &o.0)
    };
    let mut lower: Vec<(Rational, Rational)> = Vec::new();
    for p in pts {
        while lower.len() >= 2 && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<(Rational, Rational)> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Image of `p` under the invertible linear map `m`.
pub fn apply_linear(m: &Matrix, p: &Polytope) -> Result<Polytope> {
    if m.len() != p.dim || m.iter().any(|r| r.len() != p.dim) {
        return Err(Error::DimensionMismatch {
            expected: p.dim,
            found: m.len(),
        });
    }
    if determinant(m).is_zero() {
        return Err(Error::Singular);
    }
    let image: Vec<RationalVector> = p.vertices.iter().map(|v| mat_vec(m, v)).collect();
    convex_hull(&image)
}

impl Polytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn facets(&self) -> &[HalfSpace] {
        &self.facets
    }

    /// Vertex indices on each facet, aligned with [`Polytope::facets`].
    pub fn incidence(&self) -> &[BitSet] {
        &self.incidence
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn vertex_index(&self, v: &RationalVector) -> Option<usize> {
        self.vertices.binary_search(v).ok()
    }

    pub fn has_vertex(&self, v: &RationalVector) -> bool {
        self.vertex_index(v).is_some()
    }

    pub fn origin_interior(&self) -> bool {
        self.facets.iter().all(|f| f.offset.is_positive())
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        self.facets.iter().all(|f| f.contains(x))
    }

    /// Support function `max_{x in P} <x, dir>`.
    pub fn support(&self, dir: &RationalVector) -> Rational {
        self.vertices
            .iter()
            .map(|v| v.dot(dir))
            .max()
            .expect("polytope has vertices")
    }

    /// One representative from each antipodal vertex pair: the lexicographically larger.
    pub fn half_vertices(&self) -> Vec<RationalVector> {
        self.vertices
            .iter()
            .filter(|v| (*v).cmp(&-*v) == Ordering::Greater)
            .cloned()
            .collect()
    }

    pub(crate) fn require_origin_interior(&self) -> Result<()> {
        if self.origin_interior() {
            Ok(())
        } else {
            Err(Error::OriginNotInterior)
        }
    }

    pub(crate) fn require_symmetric(&self) -> Result<()> {
        if self.symmetric {
            Ok(())
        } else {
            Err(Error::NotSymmetric)
        }
    }

    pub(crate) fn require_dim(&self, d: usize) -> Result<()> {
        if d == self.dim {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim,
                found: d,
            })
        }
    }

    /// Spot check that the cached facets describe the hull of the vertex list.
    pub fn check_representation(&self) -> bool {
        self.facets.iter().zip(&self.incidence).all(|(f, inc)| {
            inc.count() >= self.dim
                && self
                    .vertices
                    .iter()
                    .enumerate()
                    .all(|(i, v)| f.contains(v) && f.is_tight(v) == inc.contains(i))
        })
    }
}
