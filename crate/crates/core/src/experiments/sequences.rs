//! Exact terms of the two comparison sequences between `P^⋉n` and reference bodies.
//!
//! `compare`: `a_n = vol(Q^n ⊕₂ C^n) / vol(P^⋉n)`, whose numerator is
//! `4^n/(n!)^2 · Γ(n/2+1)^2` and so carries a factor of `π` exactly when `n` is odd.
//! `viterbo`: `a_n = n! vol(P^⋉n) / (2 + 1/n)^n`, always rational.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Pow};
use statrs::function::gamma::ln_gamma;

use crate::exact::{rat, to_f64, Rational};
use crate::suspension::suspension_volume_factor;
use crate::{Error, Result};

/// Rigorous rational bracket for `π`.
pub const PI_LOWER: (i64, i64) = (333, 106);
pub const PI_UPPER: (i64, i64) = (355, 113);
/// Index at which the asymptotic constants are compared.
pub const ASYMPTOTIC_N: u64 = 1_000_000;
/// Allowed relative deviation of `a_n / n^{1/4}` from its limit at `ASYMPTOTIC_N`.
pub const ASYMPTOTIC_TOLERANCE: f64 = 0.01;
/// The ratio formula for `compare` is checked exactly up to this index.
pub const RATIO_FORMULA_LIMIT: usize = 100;

/// `coefficient · π^pi_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SequenceValue {
    pub coefficient: Rational,
    pub pi_power: i32,
}

impl SequenceValue {
    pub fn rational(coefficient: Rational) -> Self {
        SequenceValue { coefficient, pi_power: 0 }
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.coefficient) * std::f64::consts::PI.powi(self.pi_power)
    }

    /// Exact quotient when both sides carry the same power of `π`.
    pub fn ratio(&self, other: &SequenceValue) -> Option<Rational> {
        (self.pi_power == other.pi_power).then(|| &self.coefficient / &other.coefficient)
    }

    /// Exact comparison. Mixed powers of `π` are decided with the rational bracket for `π`;
    /// `None` when the bracket is too coarse to separate the values.
    pub fn compare(&self, other: &SequenceValue) -> Option<Ordering> {
        let d = self.pi_power - other.pi_power;
        if d == 0 {
            return Some(self.coefficient.cmp(&other.coefficient));
        }
        // self/other = q · π^d, so compare q · π^d with 1 using π in [lo, hi].
        let q = &self.coefficient / &other.coefficient;
        let lo = rat(PI_LOWER.0, PI_LOWER.1);
        let hi = rat(PI_UPPER.0, PI_UPPER.1);
        let (small, large) = if d > 0 {
            (Pow::pow(&lo, d.unsigned_abs()), Pow::pow(&hi, d.unsigned_abs()))
        } else {
            (Pow::pow(&hi, d), Pow::pow(&lo, d))
        };
        let one = Rational::one();
        if &q * &small > one {
            Some(Ordering::Greater)
        } else if &q * &large < one {
            Some(Ordering::Less)
        } else {
            None
        }
    }
}

impl fmt::Display for SequenceValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.pi_power {
            0 => write!(f, "{}", self.coefficient),
            1 => write!(f, "({})·π", self.coefficient),
            p => write!(f, "({})·π^{p}", self.coefficient),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SequenceKind {
    Compare,
    Viterbo,
}

impl SequenceKind {
    pub fn name(self) -> &'static str {
        match self {
            SequenceKind::Compare => "compare",
            SequenceKind::Viterbo => "viterbo",
        }
    }

    /// Limit of `a_n / n^{1/4}`.
    pub fn asymptotic_constant(self) -> f64 {
        let g34 = ln_gamma(0.75).exp();
        match self {
            SequenceKind::Compare => g34 / std::f64::consts::SQRT_2,
            SequenceKind::Viterbo => std::f64::consts::PI.sqrt() / (0.5f64.exp() * g34),
        }
    }
}

impl std::str::FromStr for SequenceKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "compare" => Ok(SequenceKind::Compare),
            "viterbo" => Ok(SequenceKind::Viterbo),
            _ => Err(Error::Parameter(format!("unknown sequence `{s}`"))),
        }
    }
}

/// `a_1, ..., a_n` of the `compare` sequence.
pub fn compare_terms(n: usize) -> Vec<SequenceValue> {
    let mut out = Vec::with_capacity(n);
    let mut factorial = BigInt::one();
    let mut four_pow = BigInt::one();
    let mut vol = Rational::one();
    // Γ(m/2 + 1) without its √π factor, for m = k-2 and m = k-1.
    let mut gamma_prev = Rational::one();
    let mut gamma_last = rat(1, 2);
    for k in 1..=n {
        factorial *= k;
        four_pow <<= 2;
        vol *= suspension_volume_factor(k - 1);
        let gamma = if k == 1 {
            rat(1, 2)
        } else {
            let g = &gamma_prev * rat(k as i64, 2);
            gamma_prev = std::mem::replace(&mut gamma_last, g.clone());
            g
        };
        let num = Rational::new(four_pow.clone(), &factorial * &factorial) * &gamma * &gamma;
        out.push(SequenceValue {
            coefficient: num / &vol,
            pi_power: (k % 2) as i32,
        });
    }
    out
}

pub fn sequence_compare(n: usize) -> SequenceValue {
    assert!(n >= 1, "sequence index starts at 1");
    compare_terms(n).pop().expect("n >= 1")
}

/// `(16n³+64n²+76n+24) / (16n³+56n²+61n+21)`, the closed form of `a_{n+2}/a_n` for `compare`.
pub fn compare_ratio_formula(n: usize) -> Rational {
    let n = BigInt::from(n);
    let n2 = &n * &n;
    let n3 = &n2 * &n;
    let num = 16 * &n3 + 64 * &n2 + 76 * &n + 24;
    let den = 16 * n3 + 56 * n2 + 61 * n + 21;
    Rational::new(num, den)
}

/// `a_1, ..., a_n` of the `viterbo` sequence.
pub fn viterbo_terms(n: usize) -> Vec<Rational> {
    let mut out = Vec::with_capacity(n);
    let mut product = Rational::one();
    for k in 1..=n as i64 {
        product *= rat(4 * k - 1, 4 * k - 2);
        let base = rat(2 * k, 2 * k + 1);
        out.push(Pow::pow(&base, k as u64) * &product);
    }
    out
}

/// `(2n/(2n+1))^n · Π_{k<n} (4k+3)/(4k+2)`.
pub fn sequence_viterbo_ratio(n: usize) -> Rational {
    assert!(n >= 1, "sequence index starts at 1");
    viterbo_terms(n).pop().expect("n >= 1")
}

/// `a_n / n^{1/4}` evaluated through log-gamma.
pub fn asymptotic_ratio(kind: SequenceKind, n: u64) -> f64 {
    let x = n as f64;
    let lg = ln_gamma;
    let ln_a = match kind {
        SequenceKind::Compare => {
            x * std::f64::consts::LN_2 - lg(x + 1.0) + 2.0 * lg(x / 2.0 + 1.0) + lg(x + 0.5)
                - lg(x + 0.75)
                + lg(0.75)
                - lg(0.5)
        }
        SequenceKind::Viterbo => {
            x * (2.0 * x / (2.0 * x + 1.0)).ln() + lg(x + 0.75) - lg(x + 0.5) + lg(0.5) - lg(0.75)
        }
    };
    (ln_a - 0.25 * x.ln()).exp()
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotonicityReport {
    pub kind: SequenceKind,
    pub n_max: usize,
    /// Indices `n` where the required strict increase fails.
    pub violations: Vec<usize>,
    /// Indices `n <= 100` where `a_{n+2}/a_n` differs from the closed form (compare only).
    pub formula_mismatches: Vec<usize>,
    /// `a_2 > a_1`, decided with the rational bracket for `π` (compare only).
    pub cross_parity: Option<bool>,
    /// Smallest term with its index.
    pub minimum: (usize, SequenceValue),
    pub asymptotic_n: u64,
    pub asymptotic_value: f64,
    pub asymptotic_constant: f64,
}

impl MonotonicityReport {
    pub fn relative_error(&self) -> f64 {
        (self.asymptotic_value - self.asymptotic_constant).abs() / self.asymptotic_constant
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
            && self.formula_mismatches.is_empty()
            && self.cross_parity != Some(false)
            && self.relative_error() <= ASYMPTOTIC_TOLERANCE
    }
}

pub fn monotonicity_check(kind: SequenceKind, n_max: usize) -> Result<MonotonicityReport> {
    if n_max < 2 {
        return Err(Error::Parameter("N must be at least 2".into()));
    }
    let mut violations = Vec::new();
    let mut formula_mismatches = Vec::new();
    let mut cross_parity = None;
    let minimum;
    match kind {
        SequenceKind::Compare => {
            let a = compare_terms(n_max);
            for n in 1..=n_max.saturating_sub(2) {
                let r = a[n + 1].ratio(&a[n - 1]).expect("same parity");
                if r <= Rational::one() {
                    violations.push(n);
                }
                if n <= RATIO_FORMULA_LIMIT && r != compare_ratio_formula(n) {
                    formula_mismatches.push(n);
                }
            }
            let ok = a[1].compare(&a[0]) == Some(Ordering::Greater);
            if !ok {
                violations.push(1);
            }
            cross_parity = Some(ok);
            // Each parity class increases and a_2 > a_1, so a_1 is the minimum.
            minimum = (1, a[0].clone());
        }
        SequenceKind::Viterbo => {
            let a = viterbo_terms(n_max);
            for n in 1..n_max {
                if a[n] <= a[n - 1] {
                    violations.push(n);
                }
            }
            minimum = (1, SequenceValue::rational(a[0].clone()));
        }
    }
    Ok(MonotonicityReport {
        kind,
        n_max,
        violations,
        formula_mismatches,
        cross_parity,
        minimum,
        asymptotic_n: ASYMPTOTIC_N,
        asymptotic_value: asymptotic_ratio(kind, ASYMPTOTIC_N),
        asymptotic_constant: kind.asymptotic_constant(),
    })
}
