//! Small helpers over big integers and rationals.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Z = BigInt;
pub type Q = BigRational;

pub fn z(n: i64) -> Z {
    BigInt::from(n)
}

pub fn q(n: i64) -> Q {
    BigRational::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn qz(n: &Z) -> Q {
    BigRational::from_integer(n.clone())
}

/// Fractional part in [0, 1).
pub fn frac(x: &Q) -> Q {
    x - qz(&x.floor().to_integer())
}

pub fn is_integer(x: &Q) -> bool {
    x.denom().is_one()
}

pub fn gcd_vec(v: &[Z]) -> Z {
    v.iter().fold(Z::zero(), |acc, x| acc.gcd(x))
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b);
    }
    a / a.gcd(&b) * b
}

/// Least common denominator of a list of rationals.
pub fn common_denominator<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Z {
    xs.into_iter().fold(Z::one(), |acc, x| acc.lcm(x.denom()))
}

pub fn to_f64(x: &Q) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        // Fall back to a scaled division for huge numerators/denominators.
        let n = x.numer().to_f64().unwrap_or(f64::NAN);
        let d = x.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn to_i64(x: &Z) -> i64 {
    x.to_i64().expect("integer out of i64 range")
}

/// Parses `"p/q"`, `"p"` or a plain integer string.
pub fn parse_rational(s: &str) -> Option<Q> {
    let s = s.trim();
    if let Some((n, d)) = s.split_once('/') {
        let n: Z = n.trim().parse().ok()?;
        let d: Z = d.trim().parse().ok()?;
        if d.is_zero() {
            return None;
        }
        Some(BigRational::new(n, d))
    } else {
        Some(qz(&s.parse::<Z>().ok()?))
    }
}

pub fn format_rational(x: &Q) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn dot_q(a: &[Q], b: &[Q]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * y)
}

pub fn dot_qz(a: &[Q], b: &[Z]) -> Q {
    a.iter().zip(b).fold(Q::zero(), |acc, (x, y)| acc + x * qz(y))
}

pub fn dot_z(a: &[Z], b: &[Z]) -> Z {
    a.iter().zip(b).fold(Z::zero(), |acc, (x, y)| acc + x * y)
}

pub fn abs_q(x: &Q) -> Q {
    x.abs()
}

/// Divides an integer vector by the gcd of its entries.
pub fn primitive(v: &[Z]) -> (Vec<Z>, Z) {
    let g = gcd_vec(v);
    if g.is_zero() {
        return (v.to_vec(), Z::zero());
    }
    (v.iter().map(|x| x / &g).collect(), g)
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction; returns the vector and the positive scale factor applied.
pub fn primitive_from_rational(v: &[Q]) -> (Vec<Z>, Q) {
    let den = common_denominator(v.iter());
    let ints: Vec<Z> = v.iter().map(|x| (x * qz(&den)).to_integer()).collect();
    let (p, g) = primitive(&ints);
    if g.is_zero() {
        return (p, Q::zero());
    }
    (p, BigRational::new(den, g))
}
