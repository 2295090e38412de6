//! Exact-arithmetic toolkit for symplectically self-polar polytopes.
//!
//! The crate builds polytopes in `R^{2n}` with rational coordinates, computes their
//! classical and symplectic polars, volumes, Ekeland–Hofer–Zehnder capacities (through the
//! Haim-Kislev permutation formula), and runs the generation and enumeration experiments
//! for self-polar polytopes. No floating point enters any stored or decided quantity.

mod bits;
mod error;
pub mod ehz;
pub mod exact;
pub mod experiments;
pub mod geometry;
pub mod suspension;
pub mod symplectic;

pub use error::{Error, Result};
pub use exact::Rational;
pub use geometry::{
    apply_linear, convex_hull, f_vector, gauge_norm, polar_dual, shadow_area, volume, HalfSpace,
    Matrix, Polytope, RationalVector,
};
pub use symplectic::{
    c_j, check_subset_sympolar, expand_step, is_self_polar, omega, symplectic_polar, SubsetCheck,
    SymplecticSpace,
};
pub use suspension::{
    hexagon, induction_certificate, power_suspend, suspend_halfspaces, suspend_vertices,
    suspension_membership, vertex_count_formula, volume_closed_form, HexagonConstants,
    InductionCertificate,
};
pub use ehz::{
    ehz_brute_force, equal_weight_certificate, evaluate_certificate, make_suspension_certificate,
    CapacityCertificate, EhzOptions, EhzResult, GeneratorKind, SignedIndex,
};
