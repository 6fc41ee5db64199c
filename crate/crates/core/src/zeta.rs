//! The field `Q(ς)` of rational functions in a formal root `ς = ζ^{1/M}`,
//! restricted to denominators that are products of cyclotomic
//! polynomials.  That is exactly what `1/(1 - ζ^a)` factors produce.

use crate::arith::{format_rational, q, Q};
use crate::error::{Error, Result};
use crate::poly::Coeff;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Mutex, OnceLock};

/// Dense univariate polynomial over Q, index = degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct UPoly(pub Vec<Q>);

impl UPoly {
    pub fn zero() -> Self {
        UPoly(Vec::new())
    }

    pub fn constant(c: Q) -> Self {
        let mut p = UPoly(vec![c]);
        p.trim();
        p
    }

    pub fn from_i64(c: &[i64]) -> Self {
        let mut p = UPoly(c.iter().map(|&x| q(x)).collect());
        p.trim();
        p
    }

    pub fn trim(&mut self) {
        while self.0.last().is_some_and(|c| c.is_zero()) {
            self.0.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    pub fn add(&self, o: &UPoly) -> UPoly {
        let n = self.0.len().max(o.0.len());
        let mut r: Vec<Q> = (0..n)
            .map(|i| {
                let a = self.0.get(i).cloned().unwrap_or_else(Q::zero);
                let b = o.0.get(i).cloned().unwrap_or_else(Q::zero);
                a + b
            })
            .collect();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
        UPoly(r)
    }

    pub fn neg(&self) -> UPoly {
        UPoly(self.0.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, o: &UPoly) -> UPoly {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &Q) -> UPoly {
        if s.is_zero() {
            return UPoly::zero();
        }
        UPoly(self.0.iter().map(|c| c * s).collect())
    }

    pub fn mul(&self, o: &UPoly) -> UPoly {
        if self.is_zero() || o.is_zero() {
            return UPoly::zero();
        }
        let mut r = vec![Q::zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                r[i + j] += a * b;
            }
        }
        let mut p = UPoly(r);
        p.trim();
        p
    }

    pub fn shift(&self, k: usize) -> UPoly {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut r = vec![Q::zero(); k];
        r.extend(self.0.iter().cloned());
        UPoly(r)
    }

    /// Division with remainder by a nonzero divisor.
    pub fn divrem(&self, d: &UPoly) -> (UPoly, UPoly) {
        let dd = d.degree().expect("division by zero polynomial");
        let lead_inv = d.0[dd].recip();
        let mut rem = self.0.clone();
        if rem.len() <= dd {
            return (UPoly::zero(), self.clone());
        }
        let mut quot = vec![Q::zero(); rem.len() - dd];
        for i in (dd..rem.len()).rev() {
            if rem[i].is_zero() {
                continue;
            }
            let c = &rem[i] * &lead_inv;
            for j in 0..=dd {
                let s = &c * &d.0[j];
                rem[i - dd + j] -= s;
            }
            quot[i - dd] = c;
        }
        let mut qp = UPoly(quot);
        qp.trim();
        let mut rp = UPoly(rem);
        rp.trim();
        (qp, rp)
    }

    pub fn gcd(&self, o: &UPoly) -> UPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if let Some(d) = a.degree() {
            let inv = a.0[d].recip();
            a = a.scale(&inv);
        }
        a
    }

    /// Inverse of `self` modulo `m` (requires coprime inputs).
    pub fn inv_mod(&self, m: &UPoly) -> Option<UPoly> {
        let (mut r0, mut r1) = (m.clone(), self.divrem(m).1);
        let (mut s0, mut s1) = (UPoly::zero(), UPoly::constant(Q::one()));
        while !r1.is_zero() {
            let (qt, r) = r0.divrem(&r1);
            let s = s0.sub(&qt.mul(&s1));
            r0 = r1;
            r1 = r;
            s0 = s1;
            s1 = s;
        }
        if r0.degree() != Some(0) {
            return None;
        }
        let inv = r0.0[0].recip();
        Some(s0.scale(&inv).divrem(m).1)
    }

    pub fn eval_c(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            acc = acc * x + Complex64::new(crate::arith::to_f64(c), 0.0);
        }
        acc
    }
}

fn cyclotomic_cache() -> &'static Mutex<HashMap<u64, UPoly>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, UPoly>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// The cyclotomic polynomial `Φ_d`.
pub fn cyclotomic(d: u64) -> UPoly {
    assert!(d >= 1);
    if let Some(p) = cyclotomic_cache().lock().unwrap().get(&d) {
        return p.clone();
    }
    // x^d - 1 divided by Φ_e for every proper divisor e.
    let mut num = vec![Q::zero(); d as usize + 1];
    num[0] = q(-1);
    num[d as usize] = q(1);
    let mut p = UPoly(num);
    for e in 1..d {
        if d % e == 0 {
            p = p.divrem(&cyclotomic(e)).0;
        }
    }
    cyclotomic_cache().lock().unwrap().insert(d, p.clone());
    p
}

/// Euler's totient.
pub fn totient(m: u64) -> u64 {
    (1..=m).filter(|k| num_integer::gcd(*k, m) == 1).count() as u64
}

/// Element `ς^shift · num(ς) / Π_d Φ_d(ς)^{e_d}` in canonical form:
/// `num(0) ≠ 0` and no `Φ_d` of the denominator divides `num`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Zeta {
    pub shift: i64,
    pub num: UPoly,
    pub den: BTreeMap<u64, u32>,
}

impl Zeta {
    pub fn from_q(c: Q) -> Self {
        let mut z = Zeta { shift: 0, num: UPoly::constant(c), den: BTreeMap::new() };
        z.normalize();
        z
    }

    pub fn int(c: i64) -> Self {
        Self::from_q(q(c))
    }

    /// `c · ς^k`.
    pub fn monomial(c: Q, k: i64) -> Self {
        let mut z = Zeta { shift: k, num: UPoly::constant(c), den: BTreeMap::new() };
        z.normalize();
        z
    }

    /// `1 / (1 - ς^k)`.
    pub fn inv_one_minus(k: i64) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZetaUnit("1/(1 - ζ^0)".into()));
        }
        let a = k.unsigned_abs();
        let mut den = BTreeMap::new();
        for d in 1..=a {
            if a % d == 0 {
                den.insert(d, 1);
            }
        }
        // 1 - ς^a = -Π Φ_d ; 1 - ς^{-a} = ς^{-a} Π Φ_d.
        let z = if k > 0 {
            Zeta { shift: 0, num: UPoly::constant(q(-1)), den }
        } else {
            Zeta { shift: a as i64, num: UPoly::constant(q(1)), den }
        };
        Ok(z)
    }

    fn normalize(&mut self) {
        self.num.trim();
        if self.num.is_zero() {
            self.shift = 0;
            self.den.clear();
            return;
        }
        let lead_zeros = self.num.0.iter().take_while(|c| c.is_zero()).count();
        if lead_zeros > 0 {
            self.num = UPoly(self.num.0[lead_zeros..].to_vec());
            self.shift += lead_zeros as i64;
        }
        let ds: Vec<u64> = self.den.keys().copied().collect();
        for d in ds {
            let phi = cyclotomic(d);
            loop {
                let e = self.den[&d];
                if e == 0 {
                    self.den.remove(&d);
                    break;
                }
                let (qt, r) = self.num.divrem(&phi);
                if !r.is_zero() {
                    break;
                }
                self.num = qt;
                if e == 1 {
                    self.den.remove(&d);
                    break;
                }
                self.den.insert(d, e - 1);
            }
        }
    }

    fn den_poly(den: &BTreeMap<u64, u32>) -> UPoly {
        let mut p = UPoly::constant(q(1));
        for (&d, &e) in den {
            let phi = cyclotomic(d);
            for _ in 0..e {
                p = p.mul(&phi);
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.shift == 0 && self.den.is_empty() && self.num == UPoly::constant(q(1))
    }

    /// Rational constant, if the element is one.
    pub fn as_rational(&self) -> Option<Q> {
        if self.is_zero() {
            return Some(Q::zero());
        }
        if self.shift == 0 && self.den.is_empty() && self.num.0.len() == 1 {
            return Some(self.num.0[0].clone());
        }
        None
    }

    pub fn add(&self, o: &Zeta) -> Zeta {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let mut den = self.den.clone();
        for (&d, &e) in &o.den {
            let x = den.entry(d).or_insert(0);
            *x = (*x).max(e);
        }
        let lift = |z: &Zeta| {
            let mut p = z.num.clone();
            for (&d, &e) in &den {
                let have = z.den.get(&d).copied().unwrap_or(0);
                let phi = cyclotomic(d);
                for _ in have..e {
                    p = p.mul(&phi);
                }
            }
            p
        };
        let s = self.shift.min(o.shift);
        let a = lift(self).shift((self.shift - s) as usize);
        let b = lift(o).shift((o.shift - s) as usize);
        let mut r = Zeta { shift: s, num: a.add(&b), den };
        r.normalize();
        r
    }

    pub fn neg(&self) -> Zeta {
        Zeta { shift: self.shift, num: self.num.neg(), den: self.den.clone() }
    }

    pub fn sub(&self, o: &Zeta) -> Zeta {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Zeta) -> Zeta {
        if self.is_zero() || o.is_zero() {
            return Zeta::int(0);
        }
        let mut den = self.den.clone();
        for (&d, &e) in &o.den {
            *den.entry(d).or_insert(0) += e;
        }
        let mut r = Zeta { shift: self.shift + o.shift, num: self.num.mul(&o.num), den };
        r.normalize();
        r
    }

    pub fn scale(&self, s: &Q) -> Zeta {
        if s.is_zero() {
            return Zeta::int(0);
        }
        Zeta { shift: self.shift, num: self.num.scale(s), den: self.den.clone() }
    }

    pub fn pow(&self, e: u32) -> Zeta {
        let mut r = Zeta::int(1);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Inverse, available when the numerator is a monomial times a
    /// product of cyclotomic polynomials.
    pub fn try_inv(&self) -> Option<Zeta> {
        if self.is_zero() {
            return None;
        }
        let mut rest = self.num.clone();
        let mut den_new: BTreeMap<u64, u32> = BTreeMap::new();
        let deg = rest.degree().unwrap() as u64;
        let bound = 2 * deg * deg + 2;
        let mut d = 1;
        while rest.degree().unwrap() > 0 && d <= bound {
            let phi = cyclotomic(d);
            let (qt, r) = rest.divrem(&phi);
            if r.is_zero() {
                rest = qt;
                *den_new.entry(d).or_insert(0) += 1;
            } else {
                d += 1;
            }
        }
        if rest.degree().unwrap() > 0 {
            return None;
        }
        let c = rest.0[0].recip();
        let num = Zeta::den_poly(&self.den).scale(&c);
        let mut r = Zeta { shift: -self.shift, num, den: den_new };
        r.normalize();
        Some(r)
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let den = Zeta::den_poly(&self.den).eval_c(s);
        self.num.eval_c(s) * pow_i(s, self.shift) / den
    }

    /// Substitutes `ς ↦ ς^k` for a positive integer `k`.
    pub fn lift_root(&self, k: u64) -> Zeta {
        if k == 1 || self.is_zero() {
            return self.clone();
        }
        let spread = |p: &UPoly| {
            let mut v = vec![Q::zero(); p.0.len().saturating_sub(1) * k as usize + 1];
            for (i, c) in p.0.iter().enumerate() {
                v[i * k as usize] = c.clone();
            }
            UPoly(v)
        };
        // Φ_d(x^k) is a product of cyclotomics; recompute via inversion.
        let num = Zeta { shift: self.shift * k as i64, num: spread(&self.num), den: BTreeMap::new() };
        let den = Zeta { shift: 0, num: spread(&Zeta::den_poly(&self.den)), den: BTreeMap::new() };
        num.mul(&den.try_inv().expect("cyclotomic denominator"))
    }
}

fn pow_i(s: Complex64, k: i64) -> Complex64 {
    if k >= 0 {
        s.powu(k as u32)
    } else {
        s.inv().powu((-k) as u32)
    }
}

impl Coeff for Zeta {
    fn czero() -> Self {
        Zeta::int(0)
    }
    fn cone() -> Self {
        Zeta::int(1)
    }
    fn cis_zero(&self) -> bool {
        Zeta::is_zero(self)
    }
    fn cadd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn csub(&self, o: &Self) -> Self {
        self.sub(o)
    }
    fn cmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn cneg(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Q) -> Self {
        Zeta::scale(self, r)
    }
    fn from_q(r: &Q) -> Self {
        Zeta::from_q(r.clone())
    }
}

fn fmt_upoly(p: &UPoly, shift: i64, var: &str) -> String {
    let mut parts = Vec::new();
    for (i, c) in p.0.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let e = i as i64 + shift;
        let mag = c.abs();
        let coef = format_rational(&mag);
        let body = match e {
            0 => coef,
            _ => {
                let v = if e == 1 { var.to_string() } else { format!("{var}^{e}") };
                if mag.is_one() {
                    v
                } else {
                    format!("{coef}*{v}")
                }
            }
        };
        let sign = if c.is_negative() { "-" } else { "+" };
        parts.push((sign, body));
    }
    if parts.is_empty() {
        return "0".into();
    }
    let mut s = String::new();
    for (k, (sign, body)) in parts.iter().enumerate() {
        if k == 0 {
            if *sign == "-" {
                s.push('-');
            }
        } else {
            s.push_str(&format!(" {sign} "));
        }
        s.push_str(body);
    }
    s
}

impl fmt::Display for Zeta {
    /// Written in the variable `s = ζ^{1/M}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = fmt_upoly(&self.num, self.shift, "s");
        if self.den.is_empty() {
            return write!(f, "{num}");
        }
        let den = fmt_upoly(&Zeta::den_poly(&self.den), 0, "s");
        write!(f, "({num})/({den})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::qf;

    #[test]
    fn cyclotomic_small() {
        assert_eq!(cyclotomic(1), UPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic(4), UPoly::from_i64(&[1, 0, 1]));
        assert_eq!(cyclotomic(6), UPoly::from_i64(&[1, -1, 1]));
        assert_eq!(totient(12), 4);
    }

    #[test]
    fn geometric_identity() {
        // 1/(1-s) - s/(1-s) = 1
        let a = Zeta::inv_one_minus(1).unwrap();
        let b = a.mul(&Zeta::monomial(q(1), 1));
        assert!(a.sub(&b).is_one());
        // 1/(1-s^{-1}) = 1 - 1/(1-s)
        let c = Zeta::inv_one_minus(-1).unwrap();
        assert_eq!(c, Zeta::int(1).sub(&a));
    }

    #[test]
    fn p1_constant_term() {
        // -1 + 2/(1-ζ) = (1+ζ)/(1-ζ)
        let v = Zeta::int(-1).add(&Zeta::inv_one_minus(1).unwrap().scale(&q(2)));
        let expect = Zeta { shift: 0, num: UPoly::from_i64(&[1, 1]), den: BTreeMap::new() }
            .mul(&Zeta::inv_one_minus(1).unwrap());
        assert_eq!(v, expect);
        let s = Complex64::new(0.3, 0.4);
        let direct = (Complex64::new(1.0, 0.0) + s) / (Complex64::new(1.0, 0.0) - s);
        assert!((v.eval(s) - direct).norm() < 1e-12);
    }

    #[test]
    fn inverse_roundtrip() {
        let a = Zeta::inv_one_minus(6).unwrap().mul(&Zeta::monomial(qf(3, 2), -2));
        let inv = a.try_inv().unwrap();
        assert!(a.mul(&inv).is_one());
    }

    #[test]
    fn lift_root_matches_evaluation() {
        let a = Zeta::inv_one_minus(2).unwrap().add(&Zeta::monomial(q(1), -1));
        let b = a.lift_root(3);
        let s = Complex64::new(0.2, -0.5);
        assert!((b.eval(s) - a.eval(s.powu(3))).norm() < 1e-12);
    }
}
