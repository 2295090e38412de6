//! The hexagon `P`, the symplectic `P`-suspension `P ⋉ X` and the iterated family `P^⋉n`.
//!
//! `P ⋉ X = {(v, x) ∈ P × R^{2n} : |ω(u, v)| + ‖x‖_X <= 1}` with `u = (1, 1)`. Two
//! constructions are provided: from vertices (valid for self-polar `X`, where the vertex set
//! is `{±(1,0), ±(0,1)} × {0} ∪ {±u} × V(X)`) and from halfspaces (any symmetric `X`).

use std::path::{Path, PathBuf};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exact::Rational;
use crate::geometry::io::{read_polytope, write_polytope};
use crate::geometry::{convex_hull, gauge_norm, polar_dual, Polytope, RationalVector};
use crate::symplectic::{is_self_polar, omega_unchecked, SymplecticSpace};
use crate::{Error, Result};

/// The hexagon `P = conv{±(1,1), ±(1,0), ±(0,1)}` and the anchor `u = (1, 1)`.
#[derive(Clone, Debug)]
pub struct HexagonConstants {
    pub p: Polytope,
    pub u: RationalVector,
}

impl HexagonConstants {
    pub fn get() -> &'static HexagonConstants {
        static CELL: OnceLock<HexagonConstants> = OnceLock::new();
        CELL.get_or_init(|| {
            let pts: Vec<RationalVector> = [[1, 1], [-1, -1], [1, 0], [-1, 0], [0, 1], [0, -1]]
                .iter()
                .map(|c| RationalVector::from_ints(c))
                .collect();
            HexagonConstants {
                p: convex_hull(&pts).expect("hexagon is full-dimensional"),
                u: RationalVector::from_ints(&[1, 1]),
            }
        })
    }
}

pub fn hexagon() -> Polytope {
    HexagonConstants::get().p.clone()
}

fn anchor() -> &'static RationalVector {
    &HexagonConstants::get().u
}

/// Suspension of a self-polar polytope, built from its vertex description.
pub fn suspend_vertices(x: &Polytope) -> Result<Polytope> {
    if !is_self_polar(x)? {
        return Err(Error::NotSelfPolar);
    }
    let d = x.dim();
    let zero = RationalVector::zeros(d);
    let u = anchor();
    let mut pts = Vec::with_capacity(4 + 2 * x.vertex_count());
    for c in [[1, 0], [-1, 0], [0, 1], [0, -1]] {
        pts.push(RationalVector::from_ints(&c).concat(&zero));
    }
    for v in x.vertices() {
        pts.push(u.concat(v));
        pts.push((-u).concat(v));
    }
    let listed = pts.len();
    let s = convex_hull(&pts)?;
    assert_eq!(
        s.vertex_count(),
        listed,
        "suspension points must be in convex position"
    );
    Ok(s)
}

/// Suspension of any centrally symmetric `X` with the origin inside, built from the
/// inequalities `±ω(u, v) + <a, x> <= 1` over the facets `<a, x> <= 1` of `X` together with
/// the facets of `P`. Redundant inequalities drop out when the polar hull is taken.
pub fn suspend_halfspaces(x: &Polytope) -> Result<Polytope> {
    SymplecticSpace::for_dim(x.dim())?;
    x.require_symmetric()?;
    x.require_origin_interior()?;
    let zero = RationalVector::zeros(x.dim());
    let mut normals = Vec::new();
    for f in x.facets() {
        for eps in [1, -1] {
            // ω(u, v) = v_2 - v_1 for u = (1, 1).
            normals.push(RationalVector::from_ints(&[-eps, eps]).concat(&f.normal));
        }
    }
    for f in hexagon().facets() {
        normals.push(f.normal.concat(&zero));
    }
    polar_dual(&convex_hull(&normals)?)
}

/// Membership of `(v, x)` in `P ⋉ X` straight from the definition.
pub fn suspension_membership(
    v: &RationalVector,
    x: &RationalVector,
    body: &Polytope,
) -> Result<bool> {
    if v.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: v.dim(),
        });
    }
    let hex = HexagonConstants::get();
    if !hex.p.contains(v) {
        return Ok(false);
    }
    let t = omega_unchecked(&hex.u, v).abs();
    Ok(t + gauge_norm(body, x)? <= Rational::one())
}

/// `P^⋉n`: `P^⋉1 = P`, `P^⋉n = P ⋉ P^⋉(n-1)`.
pub fn power_suspend(n: usize) -> Result<Polytope> {
    if n == 0 {
        return Err(Error::Parameter("P^⋉n needs n >= 1".into()));
    }
    let mut p = hexagon();
    for _ in 1..n {
        p = suspend_vertices(&p)?;
    }
    Ok(p)
}

pub fn power_suspend_filename(n: usize) -> String {
    format!("p_ltimes_{n}.json")
}

/// [`power_suspend`] backed by a directory of cached polytope files.
pub fn power_suspend_cached(n: usize, dir: &Path) -> Result<Polytope> {
    if n == 0 {
        return Err(Error::Parameter("P^⋉n needs n >= 1".into()));
    }
    let path: PathBuf = dir.join(power_suspend_filename(n));
    if path.exists() {
        return read_polytope(&path);
    }
    let p = if n == 1 {
        hexagon()
    } else {
        suspend_vertices(&power_suspend_cached(n - 1, dir)?)?
    };
    write_polytope(&path, &p)?;
    Ok(p)
}

/// Volume factor of one suspension step applied to a body in `R^{2n}`:
/// `(4n + 3) / ((n + 1)(2n + 1))`.
pub fn suspension_volume_factor(n: usize) -> Rational {
    let n = n as i64;
    Rational::new((4 * n + 3).into(), ((n + 1) * (2 * n + 1)).into())
}

/// `vol P^⋉n = 2^n/n! · Π_{k<n} (4k+3)/(4k+2)`.
///
/// This is `2^n/n! · Γ(n+3/4)/Γ(n+1/2) · Γ(1/2)/Γ(3/4)` because `Γ(x+1) = xΓ(x)` telescopes
/// `Γ(n+3/4)/Γ(3/4) = Π (k+3/4)` and `Γ(n+1/2)/Γ(1/2) = Π (k+1/2)`.
pub fn volume_closed_form(n: usize) -> Rational {
    let mut v = Rational::one();
    for k in 0..n as i64 {
        v *= Rational::new((2 * (4 * k + 3)).into(), ((4 * k + 2) * (k + 1)).into());
    }
    v
}

/// `|V(P^⋉n)| = 10(2^{n-1} - 1) + 6`.
pub fn vertex_count_formula(n: usize) -> BigInt {
    assert!(n >= 1, "vertex count formula is defined for n >= 1");
    BigInt::from(10) * ((BigInt::one() << (n - 1)) - 1) + 6
}

/// `2n + 1` pairwise distinct, pairwise non-antipodal vertices of `P^⋉n` with
/// `ω(v_i, v_j) = 1` for all `i < j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InductionCertificate {
    pub n: usize,
    pub vertices: Vec<RationalVector>,
}

impl InductionCertificate {
    pub fn verify(&self) -> Result<()> {
        let vs = &self.vertices;
        if vs.len() != 2 * self.n + 1 || vs.iter().any(|v| v.dim() != 2 * self.n) {
            return Err(Error::Precondition(format!(
                "certificate for n = {} must hold {} vectors in R^{}",
                self.n,
                2 * self.n + 1,
                2 * self.n
            )));
        }
        for i in 0..vs.len() {
            for j in i + 1..vs.len() {
                if vs[i] == vs[j] || vs[i] == -&vs[j] {
                    return Err(Error::Precondition(format!(
                        "entries {i} and {j} coincide up to sign"
                    )));
                }
                let w = omega_unchecked(&vs[i], &vs[j]);
                if w != Rational::one() {
                    return Err(Error::Precondition(format!(
                        "ω(v_{i}, v_{j}) = {w}, expected 1"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Base `(1,0), (1,1), (0,1)`; step `u ⊕ v_i`, then `(0,1) ⊕ 0` and `(-1,0) ⊕ 0`.
pub fn induction_certificate(n: usize) -> Result<InductionCertificate> {
    if n == 0 {
        return Err(Error::Parameter("certificate needs n >= 1".into()));
    }
    let mut vs: Vec<RationalVector> = [[1, 0], [1, 1], [0, 1]]
        .iter()
        .map(|c| RationalVector::from_ints(c))
        .collect();
    for k in 1..n {
        let zero = RationalVector::zeros(2 * k);
        let u = anchor();
        let mut next: Vec<RationalVector> = vs.iter().map(|v| u.concat(v)).collect();
        next.push(RationalVector::from_ints(&[0, 1]).concat(&zero));
        next.push(RationalVector::from_ints(&[-1, 0]).concat(&zero));
        vs = next;
    }
    let cert = InductionCertificate { n, vertices: vs };
    cert.verify()?;
    Ok(cert)
}

/// Ratio `vol(P^⋉n) / vol(P^⋉(n-1))` implied by the closed form, for checks.
pub fn closed_form_step(n: usize) -> Rational {
    if n <= 1 {
        return volume_closed_form(1);
    }
    volume_closed_form(n) / volume_closed_form(n - 1)
}
