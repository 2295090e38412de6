//! Exact rational scalars and conversions.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

pub type Rational = BigRational;

/// `p/q` as an exact rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(p.into(), q.into())
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(p.into())
}

/// Parses `"p/q"` or `"p"`. Decimal and exponent notation are rejected.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    if t.is_empty() || t.contains(['.', 'e', 'E']) {
        return Err(Error::Parse(format!(
            "'{s}' is not an exact rational (expected \"p/q\" or an integer)"
        )));
    }
    let parsed = match t.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| bad(s))?;
            let q: BigInt = q.trim().parse().map_err(|_| bad(s))?;
            if q.is_zero() {
                return Err(Error::Parse(format!("'{s}' has a zero denominator")));
            }
            Rational::new(p, q)
        }
        None => Rational::from_integer(t.parse().map_err(|_| bad(s))?),
    };
    Ok(parsed)
}

fn bad(s: &str) -> Error {
    Error::Parse(format!("cannot parse '{s}' as a rational"))
}

pub fn to_f64(r: &Rational) -> f64 {
    if let Some(f) = r.to_f64() {
        if f.is_finite() {
            return f;
        }
    }
    // Huge numerators and denominators: scale through the bit lengths.
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let n = (r.numer() >> shift.max(0) as usize).to_f64().unwrap_or(f64::NAN);
    let d = (r.denom() >> shift.max(0) as usize).to_f64().unwrap_or(f64::NAN);
    n / d
}

/// `"p/q (float)"` rendering used by reports.
pub fn display_with_float(r: &Rational) -> String {
    format!("{} ({})", r, to_f64(r))
}

/// Smallest integer vector with the same direction as `v`.
pub fn primitive_integer(v: &[Rational]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for c in v {
        lcm = lcm.lcm(c.denom());
    }
    let mut ints: Vec<BigInt> = v.iter().map(|c| (c * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in &mut ints {
            *x /= &g;
        }
    }
    ints
}

/// Rounds a float to the nearest multiple of `1/denom`.
pub fn from_f64_grid(x: f64, denom: i64) -> Rational {
    let scaled = (x * denom as f64).round() as i64;
    rat(scaled, denom)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_accepts_fractions_and_integers() {
        assert_eq!(parse_rational("21/6").unwrap(), rat(7, 2));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational(" 4/-8 ").unwrap(), rat(-1, 2));
    }

    #[test]
    fn parse_rejects_floats() {
        for s in ["3.5", "1e3", "", "1/0", "a/b", "2E1"] {
            assert!(parse_rational(s).is_err(), "{s}");
        }
    }

    #[test]
    fn primitive_direction() {
        let v = vec![rat(2, 3), rat(-4, 9), int(0)];
        let p = primitive_integer(&v);
        assert_eq!(p, vec![BigInt::from(3), BigInt::from(-2), BigInt::from(0)]);
    }

    #[test]
    fn float_rendering_of_huge_values() {
        let big = Rational::new(BigInt::from(3) << 2000usize, BigInt::from(2) << 2000usize);
        assert!((to_f64(&big) - 1.5).abs() < 1e-12);
        assert_eq!(display_with_float(&rat(7, 2)), "7/2 (3.5)");
    }
}
