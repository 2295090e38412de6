//! Fixtures shared by the criterion benchmarks.

use selfpolar_core::{convex_hull, power_suspend, Polytope, RationalVector};

/// Vertices of `P^⋉n`, for timing the hull on a known input.
pub fn suspension_points(n: usize) -> Vec<RationalVector> {
    power_suspend(n).expect("suspension builds").vertices().to_vec()
}

/// The cross-polytope `conv{±e_i}` in dimension `dim`.
pub fn cross_polytope(dim: usize) -> Polytope {
    let mut pts = Vec::with_capacity(2 * dim);
    for i in 0..dim {
        let e = RationalVector::unit(dim, i);
        pts.push(-&e);
        pts.push(e);
    }
    convex_hull(&pts).expect("cross-polytope is full-dimensional")
}
