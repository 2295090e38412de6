//! Randomized generation of symplectically self-polar polytopes by repeated expansion.
//!
//! Start from the symmetrized hull `K` of random points inside the unit ball (so
//! `K ⊆ B ⊆ K^ω`), then repeat: pick a maximal centrally symmetric set `S` of pairwise
//! compatible vertices of `K^ω`; stop when `S` is all of `V(K^ω)`, else `K ← conv(K ∪ S)`.

use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::exact::{from_f64_grid, Rational};
use crate::geometry::linalg::determinant;
use crate::geometry::{convex_hull, volume, Polytope, RationalVector};
use crate::symplectic::{expand_step_with_polar, is_self_polar, omega_unchecked, symplectic_polar};
use crate::{Error, Result};

pub const DEFAULT_MAX_ITER: usize = 64;
/// Sample coordinates are rounded to multiples of `1 / GRID`.
pub const GRID: i64 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IterationTrace {
    pub vertices: usize,
    pub polar_vertices: usize,
    pub added_pairs: usize,
}

/// One run of the generator. Re-running with the same parameters reproduces it exactly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExperimentRecord {
    pub seed: u64,
    pub dim: usize,
    pub k: usize,
    pub iterations: usize,
    pub final_polytope: Polytope,
    pub volume: Rational,
    pub vertex_count: usize,
    pub self_polar: bool,
    pub trace: Vec<IterationTrace>,
}

fn check_params(dim: usize, k: usize) -> Result<()> {
    if ![2, 4, 6].contains(&dim) {
        return Err(Error::Parameter(format!("dimension must be 2, 4 or 6, got {dim}")));
    }
    if k < dim {
        return Err(Error::Parameter(format!(
            "need k >= dim random points, got k = {k} < {dim}"
        )));
    }
    Ok(())
}

fn sample_point(rng: &mut ChaCha8Rng, dim: usize) -> Option<RationalVector> {
    let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return None;
    }
    let r: f64 = rng.random::<f64>().powf(1.0 / dim as f64);
    let p = RationalVector::new(g.iter().map(|x| from_f64_grid(x / norm * r, GRID)).collect());
    (p.squared_norm() < Rational::one() && !p.is_zero()).then_some(p)
}

/// Every `dim` of the points together with the origin are affinely independent.
fn general_position(points: &[RationalVector], dim: usize) -> bool {
    let mut idx: Vec<usize> = (0..dim).collect();
    loop {
        let m: Vec<Vec<Rational>> = idx.iter().map(|&i| points[i].coords().to_vec()).collect();
        if determinant(&m) == Rational::from_integer(0.into()) {
            return false;
        }
        let mut i = dim;
        while i > 0 && idx[i - 1] == points.len() - dim + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return true;
        }
        idx[i - 1] += 1;
        for j in i..dim {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// `k` seeded points strictly inside the unit ball, in general position with the origin.
pub fn sample_initial_points(dim: usize, k: usize, rng: &mut ChaCha8Rng) -> Vec<RationalVector> {
    loop {
        let mut pts = Vec::with_capacity(k);
        while pts.len() < k {
            if let Some(p) = sample_point(rng, dim) {
                pts.push(p);
            }
        }
        if general_position(&pts, dim) {
            return pts;
        }
    }
}

/// Greedy inclusion-maximal compatible subset, visiting antipodal pairs in shuffled order.
fn greedy_compatible(polar: &Polytope, rng: &mut ChaCha8Rng) -> Vec<RationalVector> {
    let mut pairs = polar.half_vertices();
    pairs.shuffle(rng);
    let mut chosen: Vec<RationalVector> = Vec::new();
    for p in pairs {
        if chosen
            .iter()
            .all(|q| omega_unchecked(&p, q).abs() <= Rational::one())
        {
            chosen.push(p);
        }
    }
    chosen
}

pub fn random_selfpolar(dim: usize, k: usize, seed: u64, max_iter: usize) -> Result<ExperimentRecord> {
    check_params(dim, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_initial_points(dim, k, &mut rng);
    let mut sym: Vec<RationalVector> = pts.iter().map(|p| -p).collect();
    sym.extend(pts);
    let mut current = convex_hull(&sym)?;
    let mut trace = Vec::new();
    let mut halted = false;
    for _ in 0..max_iter {
        let polar = symplectic_polar(&current)?;
        let half = greedy_compatible(&polar, &mut rng);
        let polar_pairs = polar.vertex_count() / 2;
        trace.push(IterationTrace {
            vertices: current.vertex_count(),
            polar_vertices: polar.vertex_count(),
            added_pairs: half.len(),
        });
        if half.len() == polar_pairs {
            halted = true;
            break;
        }
        let mut s: Vec<RationalVector> = half.iter().map(|p| -p).collect();
        s.extend(half);
        current = expand_step_with_polar(&current, &polar, &s)?;
    }
    let self_polar = halted && is_self_polar(&current)?;
    debug_assert_eq!(halted, self_polar);
    Ok(ExperimentRecord {
        seed,
        dim,
        k,
        iterations: trace.len().saturating_sub(usize::from(halted)),
        volume: volume(&current)?,
        vertex_count: current.vertex_count(),
        final_polytope: current,
        self_polar,
        trace,
    })
}

/// Runs seeds `base_seed .. base_seed + runs` concurrently; output order follows the seeds.
pub fn batch_generate(
    dim: usize,
    k: usize,
    runs: usize,
    base_seed: u64,
    max_iter: usize,
) -> Result<Vec<(u64, Result<ExperimentRecord>)>> {
    check_params(dim, k)?;
    if runs == 0 {
        return Err(Error::Parameter("runs must be at least 1".into()));
    }
    Ok((0..runs as u64)
        .into_par_iter()
        .map(|i| {
            let seed = base_seed + i;
            (seed, random_selfpolar(dim, k, seed, max_iter))
        })
        .collect())
}

/// Aggregates over the successful, self-polar runs of a batch.
#[derive(Clone, Debug, PartialEq)]
pub struct BatchSummary {
    pub runs: usize,
    pub self_polar_runs: usize,
    pub failed_runs: usize,
    pub min_volume: Option<Rational>,
    pub mean_volume: Option<Rational>,
    pub min_vertex_count: Option<usize>,
}

pub fn summarize(records: &[(u64, Result<ExperimentRecord>)]) -> BatchSummary {
    let ok: Vec<&ExperimentRecord> = records
        .iter()
        .filter_map(|(_, r)| r.as_ref().ok())
        .filter(|r| r.self_polar)
        .collect();
    let failed = records.iter().filter(|(_, r)| r.is_err()).count();
    let total: Option<Rational> = ok.iter().map(|r| r.volume.clone()).reduce(|a, b| a + b);
    BatchSummary {
        runs: records.len(),
        self_polar_runs: ok.len(),
        failed_runs: failed,
        min_volume: ok.iter().map(|r| r.volume.clone()).min(),
        mean_volume: total.map(|t| t / Rational::from_integer(ok.len().into())),
        min_vertex_count: ok.iter().map(|r| r.vertex_count).min(),
    }
}

impl ExperimentRecord {
    pub fn volume_is_positive(&self) -> bool {
        self.volume.is_positive()
    }
}
