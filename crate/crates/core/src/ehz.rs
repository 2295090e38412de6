//! Ekeland–Hofer–Zehnder capacity of centrally symmetric polytopes via the Haim-Kislev
//! formula
//!
//! ```text
//! 1 / c_EHZ(K) = max_{σ, β} Σ_{i<j} β_σ(i) β_σ(j) ω(n_σ(i), n_σ(j)),   Σ |β_i| h_K(n_i) = 1,
//! ```
//!
//! over half of the facet normals (or, for self-polar `K`, half of the vertices with
//! `Σ |γ_i| = 1`). With canonical normals (`h_K = 1`) both modes become: maximize the
//! ordered form `Σ_{i<j} b_i b_j W_ij` over the standard simplex, where
//! `W_ij = ω(s_i g_σ(i), s_j g_σ(j))` and signs `s_i` absorb negative coefficients.
//!
//! The exact search enumerates support sets `T`, orderings and signs, and on the relative
//! interior of each simplex face solves the Lagrange system `Q b = λ 1, Σ b = 1` (`Q` the
//! symmetrization of `W`); the form's value there is `λ / 2`. Singular systems are skipped:
//! their stationary set is an affine space on which the form is constant, and it meets the
//! face boundary, where a smaller support reproduces the same value.
//!
//! Two symmetries are quotiented out. Global negation leaves every term unchanged. Moving the
//! first element to the end with its sign flipped also leaves the form unchanged, since
//! `ω(g_1, g_j) = ω(g_j, -g_1)`; this rotation generates all placements of the smallest
//! index, so that index is fixed first with a positive sign.

use std::cmp::Ordering;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exact::{parse_rational, to_f64, Rational};
use crate::geometry::linalg::solve;
use crate::geometry::{Polytope, RationalVector};
use crate::suspension::{suspend_vertices, HexagonConstants};
use crate::symplectic::{is_self_polar, omega_unchecked, SymplecticSpace};
use crate::{Error, Result};

/// Which generators a certificate indexes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GeneratorKind {
    #[serde(rename = "facet-normals")]
    FacetNormals,
    #[serde(rename = "vertices")]
    Vertices,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SignedIndex {
    pub index: usize,
    pub sign: i8,
}

/// An ordered, signed choice of generators with nonnegative normalized weights.
///
/// Every certificate bounds the capacity from above: `c_EHZ(K) <= 1 / objective`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CapacityCertificate {
    pub kind: GeneratorKind,
    pub indices: Vec<SignedIndex>,
    pub coeffs: Vec<Rational>,
    pub objective: Rational,
}

#[derive(Serialize, Deserialize)]
struct CertificateFile {
    kind: GeneratorKind,
    indices: Vec<SignedIndex>,
    coeffs: Vec<String>,
    objective: String,
}

impl CapacityCertificate {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&CertificateFile {
            kind: self.kind,
            indices: self.indices.clone(),
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
            objective: self.objective.to_string(),
        })
        .expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let f: CertificateFile = serde_json::from_str(text)?;
        Ok(CapacityCertificate {
            kind: f.kind,
            indices: f.indices,
            coeffs: f
                .coeffs
                .iter()
                .map(|s| parse_rational(s))
                .collect::<Result<_>>()?,
            objective: parse_rational(&f.objective)?,
        })
    }

    /// The capacity upper bound `1 / objective`.
    pub fn capacity_bound(&self) -> Option<Rational> {
        self.objective.is_positive().then(|| self.objective.recip())
    }
}

/// The generator list certificates index into: one representative per antipodal pair
/// (the lexicographically larger), sorted.
pub fn generators(p: &Polytope, kind: GeneratorKind) -> Result<Vec<RationalVector>> {
    SymplecticSpace::for_dim(p.dim())?;
    p.require_symmetric()?;
    p.require_origin_interior()?;
    match kind {
        GeneratorKind::FacetNormals => {
            let mut g: Vec<RationalVector> = p
                .facets()
                .iter()
                .map(|f| f.normal.clone())
                .filter(|n| n.cmp(&-n) == Ordering::Greater)
                .collect();
            g.sort();
            Ok(g)
        }
        GeneratorKind::Vertices => {
            if !is_self_polar(p)? {
                return Err(Error::NotSelfPolar);
            }
            Ok(p.half_vertices())
        }
    }
}

fn signed(g: &RationalVector, sign: i8) -> RationalVector {
    if sign < 0 {
        -g
    } else {
        g.clone()
    }
}

/// `Σ_{i<j} c_i c_j ω(v_i, v_j)` for an ordered list.
pub fn ordered_form(vectors: &[RationalVector], coeffs: &[Rational]) -> Rational {
    let mut acc = Rational::zero();
    for i in 0..vectors.len() {
        if coeffs[i].is_zero() {
            continue;
        }
        for j in i + 1..vectors.len() {
            if coeffs[j].is_zero() {
                continue;
            }
            acc += &coeffs[i] * &coeffs[j] * omega_unchecked(&vectors[i], &vectors[j]);
        }
    }
    acc
}

/// Validates a certificate against an explicit generator list and returns its objective.
pub fn evaluate_on_generators(
    gens: &[RationalVector],
    weights: &[Rational],
    cert: &CapacityCertificate,
) -> Result<Rational> {
    if cert.indices.len() != cert.coeffs.len() || cert.indices.is_empty() {
        return Err(Error::Precondition(
            "certificate needs one coefficient per index".into(),
        ));
    }
    let mut seen = vec![false; gens.len()];
    let mut vectors = Vec::with_capacity(cert.indices.len());
    let mut norm = Rational::zero();
    for (si, c) in cert.indices.iter().zip(&cert.coeffs) {
        if si.index >= gens.len() {
            return Err(Error::Precondition(format!(
                "index {} out of range (m = {})",
                si.index,
                gens.len()
            )));
        }
        if si.sign != 1 && si.sign != -1 {
            return Err(Error::Precondition(format!("sign {} is not ±1", si.sign)));
        }
        if std::mem::replace(&mut seen[si.index], true) {
            return Err(Error::Precondition(format!("index {} repeated", si.index)));
        }
        if c.is_negative() {
            return Err(Error::Precondition(format!("negative coefficient {c}")));
        }
        norm += c * &weights[si.index];
        vectors.push(signed(&gens[si.index], si.sign));
    }
    if !norm.is_one() {
        return Err(Error::Precondition(format!(
            "normalization violated: weighted coefficient sum is {norm}, expected 1"
        )));
    }
    let value = ordered_form(&vectors, &cert.coeffs);
    if value != cert.objective {
        return Err(Error::Precondition(format!(
            "stored objective {} differs from re-evaluated {}",
            cert.objective, value
        )));
    }
    Ok(value)
}

/// Checks `cert` against `p` and returns its objective; `c_EHZ(p) <= 1 / objective`.
pub fn evaluate_certificate(p: &Polytope, cert: &CapacityCertificate) -> Result<Rational> {
    let gens = generators(p, cert.kind)?;
    let weights: Vec<Rational> = match cert.kind {
        GeneratorKind::FacetNormals => gens.iter().map(|n| p.support(n)).collect(),
        GeneratorKind::Vertices => vec![Rational::one(); gens.len()],
    };
    evaluate_on_generators(&gens, &weights, cert)
}

/// Vertices of `P^⋉n` from the recursive vertex formula, sorted; no hull is computed.
pub fn power_suspend_vertex_list(n: usize) -> Vec<RationalVector> {
    assert!(n >= 1);
    let mut vs = HexagonConstants::get().p.vertices().to_vec();
    let u = &HexagonConstants::get().u;
    for k in 1..n {
        let zero = RationalVector::zeros(2 * k);
        let mut next: Vec<RationalVector> = [[1, 0], [-1, 0], [0, 1], [0, -1]]
            .iter()
            .map(|c| RationalVector::from_ints(c).concat(&zero))
            .collect();
        for v in &vs {
            next.push(u.concat(v));
            next.push((-u).concat(v));
        }
        next.sort();
        vs = next;
    }
    vs
}

fn half_of(vs: &[RationalVector]) -> Vec<RationalVector> {
    vs.iter()
        .filter(|v| (*v).cmp(&-*v) == Ordering::Greater)
        .cloned()
        .collect()
}

fn locate(gens: &[RationalVector], v: &RationalVector) -> Option<SignedIndex> {
    if let Ok(i) = gens.binary_search(v) {
        return Some(SignedIndex { index: i, sign: 1 });
    }
    gens.binary_search(&-v)
        .ok()
        .map(|i| SignedIndex { index: i, sign: -1 })
}

/// Uniform weights `1/(2n+1)` on the induction certificate of `P^⋉n`; objective
/// `n/(2n+1)`, so `c_EHZ(P^⋉n) <= 2 + 1/n`.
pub fn equal_weight_certificate(n: usize) -> Result<CapacityCertificate> {
    let ind = crate::suspension::induction_certificate(n)?;
    let gens = half_of(&power_suspend_vertex_list(n));
    let w = Rational::new(1.into(), (2 * n as i64 + 1).into());
    let indices = ind
        .vertices
        .iter()
        .map(|v| locate(&gens, v).expect("certificate vectors are vertices"))
        .collect::<Vec<_>>();
    let mut cert = CapacityCertificate {
        kind: GeneratorKind::Vertices,
        coeffs: vec![w; indices.len()],
        indices,
        objective: Rational::zero(),
    };
    cert.objective = ordered_form(&ind.vertices, &cert.coeffs);
    evaluate_on_generators(&gens, &vec![Rational::one(); gens.len()], &cert)?;
    Ok(cert)
}

/// Lifts a vertices-mode certificate for self-polar `K` with objective `1/c_K` to `P ⋉ K`
/// using `α = (c_K - 2)/(3c_K - 4)`. Returns the suspension and the certificate, whose
/// objective is `(c_K - 1)/(3c_K - 4)`, i.e. `c_EHZ(P ⋉ K) <= 3 - 1/(c_K - 1)`.
pub fn make_suspension_certificate(
    k: &Polytope,
    cert_k: &CapacityCertificate,
    c_k: &Rational,
) -> Result<(Polytope, CapacityCertificate)> {
    if cert_k.kind != GeneratorKind::Vertices {
        return Err(Error::Precondition(
            "suspension certificates start from a vertices-mode certificate".into(),
        ));
    }
    let two = Rational::from_integer(2.into());
    if *c_k <= two {
        return Err(Error::Precondition(format!(
            "c_K = {c_k} must exceed 2 for α to lie in (0, 1/2)"
        )));
    }
    let obj = evaluate_certificate(k, cert_k)?;
    if obj * c_k != Rational::one() {
        return Err(Error::Precondition(format!(
            "certificate objective {} is not 1/c_K = {}",
            cert_k.objective,
            c_k.recip()
        )));
    }
    let three = Rational::from_integer(3.into());
    let four = Rational::from_integer(4.into());
    let alpha = (c_k - &two) / (&three * c_k - &four);
    let scale = Rational::one() - &two * &alpha;

    let gens_k = k.half_vertices();
    let s = suspend_vertices(k)?;
    let gens_s = s.half_vertices();
    let u = &HexagonConstants::get().u;
    let zero = RationalVector::zeros(k.dim());

    let mut indices = Vec::with_capacity(cert_k.indices.len() + 2);
    let mut coeffs = Vec::with_capacity(cert_k.indices.len() + 2);
    let mut vectors = Vec::with_capacity(cert_k.indices.len() + 2);
    for (si, beta) in cert_k.indices.iter().zip(&cert_k.coeffs) {
        let w = u.concat(&signed(&gens_k[si.index], si.sign));
        indices.push(locate(&gens_s, &w).expect("u ⊕ v is a vertex of the suspension"));
        coeffs.push(&scale * beta);
        vectors.push(w);
    }
    for c in [[0, 1], [-1, 0]] {
        let w = RationalVector::from_ints(&c).concat(&zero);
        indices.push(locate(&gens_s, &w).expect("base points are vertices of the suspension"));
        coeffs.push(alpha.clone());
        vectors.push(w);
    }
    let objective = ordered_form(&vectors, &coeffs);
    debug_assert_eq!(
        objective,
        (c_k - Rational::one()) / (&three * c_k - &four)
    );
    let cert = CapacityCertificate {
        kind: GeneratorKind::Vertices,
        indices,
        coeffs,
        objective,
    };
    evaluate_certificate(&s, &cert)?;
    Ok((s, cert))
}

/// Search configuration for [`ehz_brute_force`].
#[derive(Clone, Debug)]
pub struct EhzOptions {
    pub kind: GeneratorKind,
    /// Largest support size. `None` searches all supports when that takes at most
    /// `full_search_limit` configurations, and otherwise falls back to `min(m, 2n + 1)`,
    /// which is a heuristic and is reported as such in [`SearchStats`].
    pub support_bound: Option<usize>,
    /// Largest configuration count for which the default search is exhaustive.
    pub full_search_limit: u128,
    /// Maximum number of (support, order, signs) configurations.
    pub budget: u128,
    /// Screen configurations in floating point and solve only near-optimal ones exactly.
    pub float_prepass: bool,
}

impl Default for EhzOptions {
    fn default() -> Self {
        EhzOptions {
            kind: GeneratorKind::FacetNormals,
            support_bound: None,
            full_search_limit: 10_000_000,
            budget: 200_000_000,
            float_prepass: true,
        }
    }
}

impl EhzOptions {
    pub fn vertices() -> Self {
        EhzOptions {
            kind: GeneratorKind::Vertices,
            ..Self::default()
        }
    }

    pub fn with_support_bound(mut self, bound: usize) -> Self {
        self.support_bound = Some(bound);
        self
    }

    pub fn exact_only(mut self) -> Self {
        self.float_prepass = false;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub generators: usize,
    pub support_bound: usize,
    pub configurations: u128,
    pub exact_solves: u64,
    pub singular_skipped: u64,
    /// The support bound was chosen heuristically and is below `generators`, so the value
    /// is only an upper bound on the capacity.
    pub heuristic_bound: bool,
}

#[derive(Clone, Debug)]
pub struct EhzResult {
    pub capacity: Rational,
    pub certificate: CapacityCertificate,
    pub stats: SearchStats,
}

fn binomial(n: usize, k: usize) -> u128 {
    let mut r: u128 = 1;
    for i in 0..k {
        r = r * (n - i) as u128 / (i + 1) as u128;
    }
    r
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Number of configurations with supports of size `1..=bound` among `m` generators.
pub fn configuration_count(m: usize, bound: usize) -> u128 {
    (1..=bound.min(m))
        .map(|k| binomial(m, k) * factorial(k - 1) * (1u128 << (k - 1)))
        .sum()
}

/// Lexicographic key of a configuration, used for deterministic tie-breaking.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct ConfigKey {
    subset: Vec<usize>,
    order: Vec<usize>,
    negative: Vec<bool>,
}

#[derive(Clone, Debug)]
struct Found {
    value: Rational,
    key: ConfigKey,
    coeffs: Vec<Rational>,
}

fn prefer(a: Found, b: Found) -> Found {
    match a.value.cmp(&b.value) {
        Ordering::Greater => a,
        Ordering::Less => b,
        Ordering::Equal => {
            if a.key <= b.key {
                a
            } else {
                b
            }
        }
    }
}

struct Problem {
    exact: Vec<Vec<Rational>>,
    float: Vec<Vec<f64>>,
    /// `ω` table scaled by a common denominator, when it fits in machine integers.
    scaled: Option<Vec<Vec<i128>>>,
}

fn scaled_table(exact: &[Vec<Rational>]) -> Option<Vec<Vec<i128>>> {
    use num_integer::Integer;
    use num_traits::ToPrimitive;
    let lcd = exact
        .iter()
        .flatten()
        .fold(num_bigint::BigInt::one(), |l, q| l.lcm(q.denom()));
    exact
        .iter()
        .map(|row| {
            row.iter()
                .map(|q| {
                    let v = (q * Rational::from_integer(lcd.clone())).to_integer().to_i64()?;
                    (v.unsigned_abs() < 1 << 40).then_some(v as i128)
                })
                .collect()
        })
        .collect()
}

/// Fraction-free elimination; `None` on overflow.
fn bareiss_is_singular(m: &mut [Vec<i128>]) -> Option<bool> {
    let n = m.len();
    let mut prev: i128 = 1;
    for k in 0..n {
        if m[k][k] == 0 {
            let r = (k + 1..n).find(|&r| m[r][k] != 0);
            match r {
                Some(r) => m.swap(k, r),
                None => return Some(true),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[i][j].checked_mul(m[k][k])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Some(false)
}

impl Problem {
    fn entry(&self, key: &ConfigKey, i: usize, j: usize) -> Rational {
        let w = &self.exact[key.order[i]][key.order[j]];
        if key.negative[i] != key.negative[j] {
            -w
        } else {
            w.clone()
        }
    }

    /// Integer singularity test of the Lagrange system; `None` if not decidable in `i128`.
    fn is_singular(&self, key: &ConfigKey) -> Option<bool> {
        let table = self.scaled.as_ref()?;
        let k = key.order.len();
        // Rows of Q scaled by the common denominator, last column rescaled back: the
        // determinant changes by a nonzero factor only.
        let mut m = vec![vec![0i128; k + 1]; k + 1];
        for i in 0..k {
            for j in i + 1..k {
                let mut q = table[key.order[i]][key.order[j]];
                if key.negative[i] != key.negative[j] {
                    q = -q;
                }
                m[i][j] = q;
                m[j][i] = q;
            }
            m[i][k] = -1;
            m[k][i] = 1;
        }
        bareiss_is_singular(&mut m)
    }

    /// Exact stationary point on the open face; `Err(())` when the system is singular.
    fn solve_exact(&self, key: &ConfigKey) -> std::result::Result<Option<Found>, ()> {
        let k = key.order.len();
        if k == 1 {
            return Ok(Some(Found {
                value: Rational::zero(),
                key: key.clone(),
                coeffs: vec![Rational::one()],
            }));
        }
        if self.is_singular(key) == Some(true) {
            return Err(());
        }
        let half = Rational::new(1.into(), 2.into());
        let mut m = vec![vec![Rational::zero(); k + 1]; k + 1];
        for i in 0..k {
            for j in i + 1..k {
                let q = self.entry(key, i, j);
                m[i][j] = q.clone();
                m[j][i] = q;
            }
            m[i][k] = -Rational::one();
            m[k][i] = Rational::one();
        }
        let mut rhs = vec![Rational::zero(); k + 1];
        rhs[k] = Rational::one();
        let x = solve(&m, &rhs).ok_or(())?;
        if x[..k].iter().any(|b| !b.is_positive()) {
            return Ok(None);
        }
        Ok(Some(Found {
            value: &x[k] * half,
            key: key.clone(),
            coeffs: x[..k].to_vec(),
        }))
    }

    /// Float screen: `None` if singular to working precision, else `(value, min coefficient)`.
    fn solve_float(&self, key: &ConfigKey, scratch: &mut Vec<f64>) -> Option<(f64, f64)> {
        let k = key.order.len();
        if k == 1 {
            return Some((0.0, 1.0));
        }
        let n = k + 1;
        let w = n + 1;
        scratch.clear();
        scratch.resize(n * w, 0.0);
        for i in 0..k {
            for j in i + 1..k {
                let mut q = self.float[key.order[i]][key.order[j]];
                if key.negative[i] != key.negative[j] {
                    q = -q;
                }
                scratch[i * w + j] = q;
                scratch[j * w + i] = q;
            }
            scratch[i * w + k] = -1.0;
            scratch[k * w + i] = 1.0;
        }
        scratch[k * w + n] = 1.0;
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if scratch[r * w + c].abs() > scratch[p * w + c].abs() {
                    p = r;
                }
            }
            if scratch[p * w + c].abs() < 1e-9 {
                return None;
            }
            if p != c {
                for j in 0..w {
                    scratch.swap(p * w + j, c * w + j);
                }
            }
            let piv = scratch[c * w + c];
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = scratch[r * w + c] / piv;
                if f != 0.0 {
                    for j in c..w {
                        scratch[r * w + j] -= f * scratch[c * w + j];
                    }
                }
            }
        }
        let x = |i: usize| scratch[i * w + n] / scratch[i * w + i];
        let min_b = (0..k).map(x).fold(f64::INFINITY, f64::min);
        Some((x(k) / 2.0, min_b))
    }
}

/// Lexicographic successor of a permutation; false when `perm` was the last one.
fn next_permutation(perm: &mut [usize]) -> bool {
    if perm.len() < 2 {
        return false;
    }
    let mut i = perm.len() - 1;
    while i > 0 && perm[i - 1] >= perm[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = perm.len() - 1;
    while perm[j] <= perm[i - 1] {
        j -= 1;
    }
    perm.swap(i - 1, j);
    perm[i..].reverse();
    true
}

fn combinations(m: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    let mut c: Vec<usize> = (0..k).collect();
    loop {
        out.push(c.clone());
        let mut i = k;
        while i > 0 && c[i - 1] == m - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        c[i - 1] += 1;
        for j in i..k {
            c[j] = c[j - 1] + 1;
        }
    }
}

/// Calls `f` on every (order, signs) configuration of `subset` with the first element and
/// its sign fixed.
fn for_each_config(subset: &[usize], mut f: impl FnMut(&ConfigKey)) {
    let k = subset.len();
    let mut tail: Vec<usize> = subset[1..].to_vec();
    loop {
        let mut order = Vec::with_capacity(k);
        order.push(subset[0]);
        order.extend_from_slice(&tail);
        for mask in 0..1u64 << (k - 1) {
            let negative: Vec<bool> = (0..k)
                .map(|i| i > 0 && mask >> (k - 1 - i) & 1 == 1)
                .collect();
            f(&ConfigKey {
                subset: subset.to_vec(),
                order: order.clone(),
                negative,
            });
        }
        if !next_permutation(&mut tail) {
            break;
        }
    }
}

const SCREEN_MARGIN: f64 = 1e-7;
const FEASIBLE_SLACK: f64 = 1e-9;

/// Exact global maximum of the Haim-Kislev form; capacity `= 1 / max`.
pub fn ehz_brute_force(p: &Polytope, opts: &EhzOptions) -> Result<EhzResult> {
    let space = SymplecticSpace::for_dim(p.dim())?;
    let gens = generators(p, opts.kind)?;
    let m = gens.len();
    let (bound, heuristic_bound) = match opts.support_bound {
        Some(b) => (b.min(m), false),
        None if configuration_count(m, m) <= opts.full_search_limit => (m, false),
        None => {
            let b = (2 * space.half_dim() + 1).min(m);
            (b, b < m)
        }
    };
    if bound == 0 {
        return Err(Error::Parameter("support bound must be positive".into()));
    }
    let configurations = configuration_count(m, bound);
    if configurations > opts.budget {
        return Err(Error::Budget {
            needed: configurations,
            budget: opts.budget,
        });
    }
    let exact: Vec<Vec<Rational>> = gens
        .iter()
        .map(|a| gens.iter().map(|b| omega_unchecked(a, b)).collect())
        .collect();
    let float = exact
        .iter()
        .map(|r| r.iter().map(to_f64).collect())
        .collect();
    let scaled = scaled_table(&exact);
    let problem = Problem {
        exact,
        float,
        scaled,
    };

    let mut subsets = Vec::new();
    for k in 1..=bound {
        combinations(m, k, &mut subsets);
    }

    let (best, exact_solves, singular) = if opts.float_prepass {
        search_screened(&problem, &subsets)
    } else {
        search_exact(&problem, &subsets)
    };
    let best = best.ok_or_else(|| Error::Precondition("no feasible configuration".into()))?;
    if !best.value.is_positive() {
        return Err(Error::Precondition(
            "maximum of the form is not positive; the body is degenerate".into(),
        ));
    }
    let certificate = CapacityCertificate {
        kind: opts.kind,
        indices: best
            .key
            .order
            .iter()
            .zip(&best.key.negative)
            .map(|(&index, &neg)| SignedIndex {
                index,
                sign: if neg { -1 } else { 1 },
            })
            .collect(),
        coeffs: best.coeffs,
        objective: best.value,
    };
    evaluate_certificate(p, &certificate)?;
    Ok(EhzResult {
        capacity: certificate.objective.recip(),
        certificate,
        stats: SearchStats {
            generators: m,
            support_bound: bound,
            configurations,
            exact_solves,
            singular_skipped: singular,
            heuristic_bound,
        },
    })
}

fn search_exact(problem: &Problem, subsets: &[Vec<usize>]) -> (Option<Found>, u64, u64) {
    subsets
        .par_iter()
        .map(|subset| {
            let mut best: Option<Found> = None;
            let (mut solves, mut singular) = (0u64, 0u64);
            for_each_config(subset, |key| {
                solves += 1;
                match problem.solve_exact(key) {
                    Err(()) => singular += 1,
                    Ok(Some(f)) => best = Some(best.take().map_or(f.clone(), |b| prefer(b, f))),
                    Ok(None) => {}
                }
            });
            (best, solves, singular)
        })
        .reduce(
            || (None, 0, 0),
            |a, b| (merge(a.0, b.0), a.1 + b.1, a.2 + b.2),
        )
}

fn merge(a: Option<Found>, b: Option<Found>) -> Option<Found> {
    match (a, b) {
        (Some(a), Some(b)) => Some(prefer(a, b)),
        (a, None) => a,
        (None, b) => b,
    }
}

/// Float screen followed by exact solves of the near-optimal and near-singular
/// configurations. The float value only decides which configurations to re-solve.
fn search_screened(problem: &Problem, subsets: &[Vec<usize>]) -> (Option<Found>, u64, u64) {
    struct Local {
        best_f: f64,
        near: Vec<(f64, ConfigKey)>,
        found: Option<Found>,
        solves: u64,
        singular: u64,
    }
    let locals: Vec<Local> = subsets
        .par_iter()
        .map(|subset| {
            let mut scratch = Vec::new();
            let mut local = Local {
                best_f: f64::NEG_INFINITY,
                near: Vec::new(),
                found: None,
                solves: 0,
                singular: 0,
            };
            for_each_config(subset, |key| match problem.solve_float(key, &mut scratch) {
                None => {
                    local.solves += 1;
                    match problem.solve_exact(key) {
                        Err(()) => local.singular += 1,
                        Ok(Some(f)) => {
                            local.best_f = local.best_f.max(to_f64(&f.value));
                            local.found = merge(local.found.take(), Some(f));
                        }
                        Ok(None) => {}
                    }
                }
                Some((value, min_b)) => {
                    if min_b > -FEASIBLE_SLACK && value >= local.best_f - SCREEN_MARGIN {
                        if value > local.best_f {
                            local.best_f = value;
                            let cutoff = value - SCREEN_MARGIN;
                            local.near.retain(|(v, _)| *v >= cutoff);
                        }
                        local.near.push((value, key.clone()));
                    }
                }
            });
            local
        })
        .collect();

    let global_f = locals
        .iter()
        .map(|l| l.best_f)
        .fold(f64::NEG_INFINITY, f64::max);
    let cutoff = global_f - SCREEN_MARGIN;
    let mut solves: u64 = locals.iter().map(|l| l.solves).sum();
    let mut singular: u64 = locals.iter().map(|l| l.singular).sum();
    let candidates: Vec<&ConfigKey> = locals
        .iter()
        .flat_map(|l| l.near.iter().filter(|(v, _)| *v >= cutoff).map(|(_, k)| k))
        .collect();
    solves += candidates.len() as u64;
    let (screened, extra_singular) = candidates
        .par_iter()
        .map(|key| match problem.solve_exact(key) {
            Err(()) => (None, 1u64),
            Ok(f) => (f, 0),
        })
        .reduce(|| (None, 0), |a, b| (merge(a.0, b.0), a.1 + b.1));
    singular += extra_singular;
    let best = locals
        .into_iter()
        .fold(screened, |acc, l| merge(acc, l.found));
    (best, solves, singular)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, rat};
    use crate::geometry::convex_hull;
    use crate::suspension::{hexagon, power_suspend};

    fn poly(v: &[&[i64]]) -> Polytope {
        let pts: Vec<RationalVector> = v.iter().map(|c| RationalVector::from_ints(c)).collect();
        convex_hull(&pts).unwrap()
    }

    fn square() -> Polytope {
        poly(&[&[1, 1], &[1, -1], &[-1, 1], &[-1, -1]])
    }

    #[test]
    fn bareiss_detects_singularity() {
        let mut a = vec![vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]];
        assert_eq!(bareiss_is_singular(&mut a), Some(true));
        let mut b = vec![vec![2, 1, 0], vec![1, 3, 1], vec![0, 1, 4]];
        assert_eq!(bareiss_is_singular(&mut b), Some(false));
        let mut c = vec![vec![0, 0], vec![0, 5]];
        assert_eq!(bareiss_is_singular(&mut c), Some(true));
    }

    #[test]
    fn configuration_counts() {
        assert_eq!(configuration_count(3, 3), 3 + 3 * 2 + 8);
        assert_eq!(configuration_count(2, 1), 2);
        assert_eq!(binomial(8, 3), 56);
    }

    #[test]
    fn permutations_enumerate_all() {
        let mut p = vec![0, 1, 2, 3];
        let mut n = 1;
        while next_permutation(&mut p) {
            n += 1;
        }
        assert_eq!(n, 24);
        assert_eq!(p, vec![3, 2, 1, 0]);
    }

    #[test]
    fn hexagon_certificate_from_proof() {
        let h = hexagon();
        let gens = generators(&h, GeneratorKind::Vertices).unwrap();
        let idx = |v: &[i64]| locate(&gens, &RationalVector::from_ints(v)).unwrap();
        let cert = CapacityCertificate {
            kind: GeneratorKind::Vertices,
            indices: vec![idx(&[1, 0]), idx(&[1, 1]), idx(&[0, 1])],
            coeffs: vec![rat(1, 3); 3],
            objective: rat(1, 3),
        };
        assert_eq!(evaluate_certificate(&h, &cert).unwrap(), rat(1, 3));
        let single = CapacityCertificate {
            kind: GeneratorKind::Vertices,
            indices: vec![idx(&[1, 0])],
            coeffs: vec![int(1)],
            objective: int(0),
        };
        assert_eq!(evaluate_certificate(&h, &single).unwrap(), int(0));
    }

    #[test]
    fn evaluation_rejects_bad_normalization() {
        let h = hexagon();
        let cert = CapacityCertificate {
            kind: GeneratorKind::Vertices,
            indices: vec![SignedIndex { index: 0, sign: 1 }, SignedIndex { index: 1, sign: 1 }],
            coeffs: vec![rat(1, 2), rat(1, 3)],
            objective: int(0),
        };
        assert!(matches!(evaluate_certificate(&h, &cert), Err(Error::Precondition(_))));
        // Vertices mode is only meaningful for self-polar bodies.
        let sq = CapacityCertificate {
            kind: GeneratorKind::Vertices,
            indices: vec![SignedIndex { index: 0, sign: 1 }],
            coeffs: vec![int(1)],
            objective: int(0),
        };
        assert!(matches!(evaluate_certificate(&square(), &sq), Err(Error::NotSelfPolar)));
    }

    #[test]
    fn hexagon_and_square_capacities() {
        let r = ehz_brute_force(&hexagon(), &EhzOptions::default()).unwrap();
        assert_eq!(r.capacity, int(3));
        assert_eq!(r.stats.generators, 3);
        let r = ehz_brute_force(&hexagon(), &EhzOptions::vertices()).unwrap();
        assert_eq!(r.capacity, int(3));
        let r = ehz_brute_force(&square(), &EhzOptions::default()).unwrap();
        assert_eq!(r.capacity, int(4));
        assert_eq!(r.certificate.coeffs, vec![rat(1, 2), rat(1, 2)]);
    }

    #[test]
    fn screened_and_exact_searches_agree() {
        let oct = poly(&[&[2, 0], &[-2, 0], &[0, 2], &[0, -2], &[1, 1], &[-1, -1], &[1, -1], &[-1, 1]]);
        for p in [hexagon(), square(), oct] {
            let a = ehz_brute_force(&p, &EhzOptions::default()).unwrap();
            let b = ehz_brute_force(&p, &EhzOptions::default().exact_only()).unwrap();
            assert_eq!(a.capacity, b.capacity);
            assert_eq!(a.certificate, b.certificate);
        }
    }

    /// On a generic octagon the boundary loop uses all four normal pairs, so supports of
    /// size `2n + 1 = 3` cannot reach the maximum.
    #[test]
    fn small_support_bound_undershoots_on_octagon() {
        let pts: Vec<RationalVector> = [(-4, -2), (-3, -6), (-3, 0), (0, -5), (0, 5), (3, 0), (3, 6), (4, 2)]
            .iter()
            .map(|&(a, b)| RationalVector::new(vec![rat(a, 2), rat(b, 2)]))
            .collect();
        let p = convex_hull(&pts).unwrap();
        let area = crate::geometry::volume(&p).unwrap();
        assert_eq!(area, rat(27, 2));
        let full = ehz_brute_force(&p, &EhzOptions::default()).unwrap();
        assert_eq!(full.stats.support_bound, 4);
        assert!(!full.stats.heuristic_bound);
        assert_eq!(full.capacity, area);
        let three = ehz_brute_force(&p, &EhzOptions::default().with_support_bound(3)).unwrap();
        assert_eq!(three.capacity, rat(231, 17));
        let forced = EhzOptions {
            full_search_limit: 0,
            ..EhzOptions::default()
        };
        let heuristic = ehz_brute_force(&p, &forced).unwrap();
        assert!(heuristic.stats.heuristic_bound);
        assert_eq!(heuristic.capacity, rat(231, 17));
    }

    #[test]
    fn budget_is_enforced() {
        let opts = EhzOptions {
            budget: 10,
            ..EhzOptions::default()
        };
        assert!(matches!(
            ehz_brute_force(&hexagon(), &opts),
            Err(Error::Budget { needed: 17, budget: 10 })
        ));
    }

    #[test]
    fn equal_weight_objectives() {
        for n in 1..=4 {
            let c = equal_weight_certificate(n).unwrap();
            assert_eq!(c.objective, Rational::new((n as i64).into(), (2 * n as i64 + 1).into()));
            assert_eq!(c.indices.len(), 2 * n + 1);
        }
    }

    #[test]
    fn vertex_list_matches_hull() {
        for n in 1..=3 {
            assert_eq!(power_suspend_vertex_list(n), power_suspend(n).unwrap().vertices());
        }
    }

    #[test]
    fn suspension_certificate_from_hexagon() {
        let c1 = equal_weight_certificate(1).unwrap();
        let (p2, c2) = make_suspension_certificate(&hexagon(), &c1, &int(3)).unwrap();
        assert_eq!(c2.objective, rat(2, 5));
        assert_eq!(c2.coeffs[3], rat(1, 5));
        assert_eq!(evaluate_certificate(&p2, &c2).unwrap(), rat(2, 5));
        assert!(make_suspension_certificate(&hexagon(), &c1, &int(2)).is_err());
        assert!(make_suspension_certificate(&hexagon(), &c1, &int(4)).is_err());
    }

    #[test]
    fn certificate_json_round_trip() {
        let c = equal_weight_certificate(2).unwrap();
        let text = c.to_json();
        assert!(text.contains("\"kind\": \"vertices\""));
        assert!(text.contains("\"objective\": \"2/5\""));
        assert_eq!(CapacityCertificate::from_json(&text).unwrap(), c);
        assert!(CapacityCertificate::from_json(&text.replace("2/5", "0.4")).is_err());
    }
}
