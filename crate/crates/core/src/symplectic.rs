//! The standard symplectic form, symplectic polarity and self-polarity checks.
//!
//! Coordinates are interleaved `(q_1, p_1, ..., q_n, p_n)` and
//! `ω(x, y) = Σ_i (x_{2i-1} y_{2i} - x_{2i} y_{2i-1})`, so `ω` on a direct sum is the sum
//! of the block forms.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::exact::Rational;
use crate::geometry::linalg::{mat_vec, Matrix};
use crate::geometry::{convex_hull, Polytope, RationalVector};
use crate::{Error, Result};

/// `R^{2n}` with the fixed interleaved symplectic pairing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymplecticSpace {
    n: usize,
}

impl SymplecticSpace {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Parameter("half-dimension must be positive".into()));
        }
        Ok(SymplecticSpace { n })
    }

    pub fn for_dim(dim: usize) -> Result<Self> {
        if dim == 0 || dim % 2 == 1 {
            return Err(Error::OddDimension(dim));
        }
        Ok(SymplecticSpace { n: dim / 2 })
    }

    pub fn half_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// The map `J` with `X^ω = J X°` for every body `X` with the origin inside.
    ///
    /// From `ω(x, y) = <x, Ω y>` with `Ω(a, b) = (b, -a)` per block: `y ∈ X^ω` iff
    /// `Ω y ∈ X°`, hence `J = Ω^{-1}`, acting as `(a, b) -> (-b, a)` on each block.
    pub fn j_matrix(&self) -> Matrix {
        let d = self.dim();
        let mut m = vec![vec![Rational::zero(); d]; d];
        for i in 0..self.n {
            m[2 * i][2 * i + 1] = -Rational::one();
            m[2 * i + 1][2 * i] = Rational::one();
        }
        m
    }
}

pub(crate) fn omega_unchecked(x: &RationalVector, y: &RationalVector) -> Rational {
    let mut acc = Rational::zero();
    let (xs, ys) = (x.coords(), y.coords());
    for i in (0..xs.len()).step_by(2) {
        if !xs[i].is_zero() && !ys[i + 1].is_zero() {
            acc += &xs[i] * &ys[i + 1];
        }
        if !xs[i + 1].is_zero() && !ys[i].is_zero() {
            acc -= &xs[i + 1] * &ys[i];
        }
    }
    acc
}

/// `ω(x, y)`.
pub fn omega(x: &RationalVector, y: &RationalVector) -> Result<Rational> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    SymplecticSpace::for_dim(x.dim())?;
    Ok(omega_unchecked(x, y))
}

fn require_sympolar_domain(p: &Polytope) -> Result<SymplecticSpace> {
    let space = SymplecticSpace::for_dim(p.dim())?;
    p.require_symmetric()?;
    p.require_origin_interior()?;
    Ok(space)
}

/// `X^ω = {y : ω(x, y) <= 1 for all x in X}`.
///
/// Only centrally symmetric inputs are accepted; for them `ω <= 1` and `|ω| <= 1` agree.
pub fn symplectic_polar(p: &Polytope) -> Result<Polytope> {
    let space = require_sympolar_domain(p)?;
    let j = space.j_matrix();
    let image: Vec<RationalVector> = p.facets().iter().map(|f| mat_vec(&j, &f.normal)).collect();
    convex_hull(&image)
}

/// Outcome of the vertex-pair test for `X ⊆ X^ω`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SubsetCheck {
    pub holds: bool,
    /// A pair maximizing `ω(v, w)` with its value, reported when the inclusion fails.
    pub witness: Option<(RationalVector, RationalVector, Rational)>,
}

/// Largest `ω(v, w)` over ordered pairs from `vs`, ties broken by the smallest index pair.
fn max_pair(vs: &[RationalVector]) -> Option<(usize, usize, Rational)> {
    vs.par_iter()
        .enumerate()
        .filter_map(|(i, v)| {
            vs.iter()
                .enumerate()
                .map(|(j, w)| (i, j, omega_unchecked(v, w)))
                .reduce(better_pair)
        })
        .reduce_with(better_pair)
}

fn better_pair(
    a: (usize, usize, Rational),
    b: (usize, usize, Rational),
) -> (usize, usize, Rational) {
    match a.2.cmp(&b.2) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if (a.0, a.1) <= (b.0, b.1) {
                a
            } else {
                b
            }
        }
    }
}

/// `X ⊆ X^ω` iff `ω(v, w) <= 1` for all vertices `v, w`.
pub fn check_subset_sympolar(p: &Polytope) -> Result<SubsetCheck> {
    require_sympolar_domain(p)?;
    let vs = p.vertices();
    let (i, j, best) = max_pair(vs).expect("polytope has vertices");
    if best <= Rational::one() {
        Ok(SubsetCheck {
            holds: true,
            witness: None,
        })
    } else {
        Ok(SubsetCheck {
            holds: false,
            witness: Some((vs[i].clone(), vs[j].clone(), best)),
        })
    }
}

/// `X = X^ω`.
pub fn is_self_polar(p: &Polytope) -> Result<bool> {
    Ok(symplectic_polar(p)? == *p)
}

/// `c_J(X) = 1 / max{|ω(x, y)| : x, y ∈ X^ω}`; the bilinear maximum sits at vertex pairs.
pub fn c_j(p: &Polytope) -> Result<Rational> {
    let polar = symplectic_polar(p)?;
    let (_, _, best) = max_pair(polar.vertices()).expect("polytope has vertices");
    // Symmetric vertex set: max ω over ordered pairs equals max |ω|.
    debug_assert!(best.is_positive());
    Ok(best.recip())
}

/// `conv(K ∪ S)` for a symmetric set `S` of pairwise compatible vertices of `K^ω`.
///
/// The result again satisfies `M ⊆ M^ω`.
pub fn expand_step(k: &Polytope, s: &[RationalVector]) -> Result<Polytope> {
    let polar = symplectic_polar(k)?;
    expand_step_with_polar(k, &polar, s)
}

pub(crate) fn expand_step_with_polar(
    k: &Polytope,
    polar: &Polytope,
    s: &[RationalVector],
) -> Result<Polytope> {
    let before = check_subset_sympolar(k)?;
    if let Some((v, w, val)) = before.witness {
        return Err(Error::Precondition(format!(
            "K is not contained in K^ω: ω({v}, {w}) = {val} > 1"
        )));
    }
    for v in s {
        if !polar.has_vertex(v) {
            return Err(Error::Precondition(format!("{v} is not a vertex of K^ω")));
        }
        if !s.contains(&-v) {
            return Err(Error::Precondition(format!(
                "S is not centrally symmetric: {v} present without its negative"
            )));
        }
    }
    for v in s {
        for w in s {
            let val = omega_unchecked(v, w);
            if val > Rational::one() {
                return Err(Error::Precondition(format!(
                    "incompatible pair in S: ω({v}, {w}) = {val} > 1"
                )));
            }
        }
    }
    let mut pts: Vec<RationalVector> = k.vertices().to_vec();
    pts.extend(s.iter().cloned());
    let m = convex_hull(&pts)?;
    let after = check_subset_sympolar(&m)?;
    assert!(
        after.holds,
        "expansion broke M ⊆ M^ω: witness {:?}",
        after.witness
    );
    Ok(m)
}
