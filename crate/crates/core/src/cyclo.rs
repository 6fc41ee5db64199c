//! `Q(ω_m) ⊗ Q(ς)`: cyclotomic characters with zeta-field coefficients.

use crate::arith::{q, Q};
use crate::poly::Coeff;
use crate::zeta::{cyclotomic, totient, UPoly, Zeta};
use num_complex::Complex64;
use num_traits::Zero;

/// `Σ_j c_j ω^j` with `ω = exp(2πi/m)`, reduced modulo `Φ_m(ω)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycZeta {
    pub m: u64,
    pub coeffs: Vec<Zeta>,
}

impl CycZeta {
    pub fn from_zeta(m: u64, z: Zeta) -> Self {
        let mut c = vec![Zeta::int(0); totient(m) as usize];
        c[0] = z;
        CycZeta { m, coeffs: c }
    }

    pub fn scalar(m: u64, c: Q) -> Self {
        Self::from_zeta(m, Zeta::from_q(c))
    }

    /// `ω^j` for any integer `j`.
    pub fn root(m: u64, j: i64) -> Self {
        let j = j.rem_euclid(m as i64) as usize;
        let mut raw = vec![Zeta::int(0); j + 1];
        raw[j] = Zeta::int(1);
        Self::reduce(m, raw)
    }

    fn reduce(m: u64, mut raw: Vec<Zeta>) -> Self {
        let phi = cyclotomic(m);
        let deg = phi.degree().unwrap();
        // Φ_m is monic with integer coefficients: ω^deg = -Σ_{i<deg} φ_i ω^i.
        for top in (deg..raw.len()).rev() {
            let c = std::mem::replace(&mut raw[top], Zeta::int(0));
            if c.is_zero() {
                continue;
            }
            for i in 0..deg {
                if phi.0[i].is_zero() {
                    continue;
                }
                let idx = top - deg + i;
                raw[idx] = raw[idx].sub(&c.scale(&phi.0[i]));
            }
        }
        raw.resize(deg, Zeta::int(0));
        CycZeta { m, coeffs: raw }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Re-expresses the element over `Q(ω_{m'})` where `m | m'`.
    pub fn lift(&self, m2: u64) -> Self {
        if m2 == self.m {
            return self.clone();
        }
        assert!(m2 % self.m == 0, "cyclotomic order {} does not divide {}", self.m, m2);
        let k = (m2 / self.m) as usize;
        let mut raw = vec![Zeta::int(0); (self.coeffs.len().max(1) - 1) * k + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            raw[j * k] = c.clone();
        }
        Self::reduce(m2, raw)
    }

    fn align(a: &Self, b: &Self) -> (Self, Self) {
        if a.m == b.m {
            return (a.clone(), b.clone());
        }
        let m = num_integer::lcm(a.m, b.m);
        (a.lift(m), b.lift(m))
    }

    pub fn add(&self, o: &Self) -> Self {
        let (a, b) = Self::align(self, o);
        CycZeta { m: a.m, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x.add(y)).collect() }
    }

    pub fn neg(&self) -> Self {
        CycZeta { m: self.m, coeffs: self.coeffs.iter().map(|c| c.neg()).collect() }
    }

    pub fn mul(&self, o: &Self) -> Self {
        let (a, b) = Self::align(self, o);
        let n = a.coeffs.len();
        let mut raw = vec![Zeta::int(0); 2 * n - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                raw[i + j] = raw[i + j].add(&x.mul(y));
            }
        }
        Self::reduce(a.m, raw)
    }

    pub fn mul_zeta(&self, z: &Zeta) -> Self {
        CycZeta { m: self.m, coeffs: self.coeffs.iter().map(|c| c.mul(z)).collect() }
    }

    /// Inverse of an element with rational coefficients (an element of the
    /// number field `Q(ω_m)` itself).
    pub fn inv_pure(&self) -> Option<Self> {
        let mut p = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            p.push(c.as_rational()?);
        }
        let mut up = UPoly(p);
        up.trim();
        if up.is_zero() {
            return None;
        }
        let inv = up.inv_mod(&cyclotomic(self.m))?;
        let mut coeffs: Vec<Zeta> = inv.0.into_iter().map(Zeta::from_q).collect();
        coeffs.resize(self.coeffs.len(), Zeta::int(0));
        Some(CycZeta { m: self.m, coeffs })
    }

    /// The `ω^0` component when every other component vanishes.
    pub fn as_zeta(&self) -> Option<Zeta> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs[0].clone())
        } else {
            None
        }
    }

    pub fn eval(&self, s: Complex64) -> Complex64 {
        let w = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / self.m as f64);
        let mut acc = Complex64::new(0.0, 0.0);
        let mut wp = Complex64::new(1.0, 0.0);
        for c in &self.coeffs {
            if !c.is_zero() {
                acc += wp * c.eval(s);
            }
            wp *= w;
        }
        acc
    }
}

impl Coeff for CycZeta {
    fn czero() -> Self {
        CycZeta::scalar(1, q(0))
    }
    fn cone() -> Self {
        CycZeta::scalar(1, q(1))
    }
    fn cis_zero(&self) -> bool {
        CycZeta::is_zero(self)
    }
    fn cadd(&self, o: &Self) -> Self {
        self.add(o)
    }
    fn csub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }
    fn cmul(&self, o: &Self) -> Self {
        self.mul(o)
    }
    fn cneg(&self) -> Self {
        self.neg()
    }
    fn scale(&self, r: &Q) -> Self {
        if r.is_zero() {
            return CycZeta::scalar(self.m, q(0));
        }
        CycZeta { m: self.m, coeffs: self.coeffs.iter().map(|c| c.scale(r)).collect() }
    }
    fn from_q(r: &Q) -> Self {
        CycZeta::scalar(1, r.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_sum_to_zero() {
        let mut s = CycZeta::scalar(6, q(0));
        for j in 0..6 {
            s = s.add(&CycZeta::root(6, j));
        }
        assert!(s.is_zero());
    }

    #[test]
    fn root_multiplication() {
        let a = CycZeta::root(4, 3).mul(&CycZeta::root(4, 3));
        assert_eq!(a, CycZeta::root(4, 2));
        assert_eq!(CycZeta::root(2, 1), CycZeta::scalar(2, q(-1)));
    }

    #[test]
    fn lift_preserves_value() {
        let a = CycZeta::root(3, 1).add(&CycZeta::scalar(3, q(2)));
        let b = a.lift(6);
        let s = Complex64::new(0.1, 0.2);
        assert!((a.eval(s) - b.eval(s)).norm() < 1e-12);
    }

    #[test]
    fn pure_inverse() {
        let a = CycZeta::scalar(5, q(1)).add(&CycZeta::root(5, 2).neg());
        let inv = a.inv_pure().unwrap();
        assert_eq!(a.mul(&inv), CycZeta::scalar(5, q(1)));
    }
}
