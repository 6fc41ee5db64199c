//! Sparse multivariate polynomials over an exact coefficient ring.

use crate::arith::{qz, Q, Z};
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt::Debug;

/// Exact commutative Q-algebra used as a coefficient ring.
pub trait Coeff: Clone + PartialEq + Debug + Send + Sync {
    fn czero() -> Self;
    fn cone() -> Self;
    fn cis_zero(&self) -> bool;
    fn cadd(&self, o: &Self) -> Self;
    fn csub(&self, o: &Self) -> Self;
    fn cmul(&self, o: &Self) -> Self;
    fn cneg(&self) -> Self;
    fn scale(&self, r: &Q) -> Self;
    fn from_q(r: &Q) -> Self;
}

impl Coeff for Q {
    fn czero() -> Self {
        Zero::zero()
    }
    fn cone() -> Self {
        One::one()
    }
    fn cis_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cadd(&self, o: &Self) -> Self {
        self + o
    }
    fn csub(&self, o: &Self) -> Self {
        self - o
    }
    fn cmul(&self, o: &Self) -> Self {
        self * o
    }
    fn cneg(&self) -> Self {
        -self
    }
    fn scale(&self, r: &Q) -> Self {
        self * r
    }
    fn from_q(r: &Q) -> Self {
        r.clone()
    }
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mono(pub Vec<u32>);

impl Mono {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Poly<C: Coeff> {
    pub nvars: usize,
    pub terms: BTreeMap<Mono, C>,
}

impl<C: Coeff> Poly<C> {
    pub fn zero(nvars: usize) -> Self {
        Poly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, C::cone())
    }

    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, C::cone());
        p
    }

    pub fn monomial(exps: Vec<u32>, c: C) -> Self {
        let mut p = Self::zero(exps.len());
        p.add_term(exps, c);
        p
    }

    /// `Σ a_k y_k` with rational coefficients.
    pub fn linear(coeffs: &[Q]) -> Self {
        let n = coeffs.len();
        let mut p = Self::zero(n);
        for (k, a) in coeffs.iter().enumerate() {
            if !Zero::is_zero(a) {
                let mut e = vec![0; n];
                e[k] = 1;
                p.add_term(e, C::from_q(a));
            }
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exps: Vec<u32>, c: C) {
        if c.cis_zero() {
            return;
        }
        let key = Mono(exps);
        match self.terms.get_mut(&key) {
            Some(v) => {
                let s = v.cadd(&c);
                if s.cis_zero() {
                    self.terms.remove(&key);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(key, c);
            }
        }
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|m| m.degree()).max()
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), c.clone());
        }
        r
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (m, c) in &o.terms {
            r.add_term(m.0.clone(), c.cneg());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.cneg())).collect() }
    }

    pub fn scale(&self, r: &Q) -> Self {
        if Zero::is_zero(r) {
            return Self::zero(self.nvars);
        }
        Poly { nvars: self.nvars, terms: self.terms.iter().map(|(m, c)| (m.clone(), c.scale(r))).collect() }
    }

    pub fn scale_c(&self, r: &C) -> Self {
        let mut out = Self::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.0.clone(), c.cmul(r));
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.mul_filtered(o, |_| true)
    }

    /// Product keeping only monomials accepted by `keep` (which must be
    /// closed downward for the truncation to be consistent).
    pub fn mul_filtered(&self, o: &Self, keep: impl Fn(&[u32]) -> bool) -> Self {
        let mut acc: BTreeMap<Mono, C> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &o.terms {
                let e: Vec<u32> = ma.0.iter().zip(&mb.0).map(|(a, b)| a + b).collect();
                if !keep(&e) {
                    continue;
                }
                let p = ca.cmul(cb);
                let key = Mono(e);
                match acc.get_mut(&key) {
                    Some(v) => *v = v.cadd(&p),
                    None => {
                        acc.insert(key, p);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.cis_zero());
        Poly { nvars: self.nvars, terms: acc }
    }

    pub fn filter(&self, keep: impl Fn(&[u32]) -> bool) -> Self {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().filter(|(m, _)| keep(&m.0)).map(|(m, c)| (m.clone(), c.clone())).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one(self.nvars);
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    /// Component of total degree `d` in the first `k` variables.
    pub fn homogeneous_part(&self, d: u32, k: usize) -> Self {
        self.filter(|e| e[..k].iter().sum::<u32>() == d)
    }

    /// Substitutes variable `i` by `images[i]`; all images share `nvars`.
    pub fn substitute(&self, images: &[Poly<C>], keep: impl Fn(&[u32]) -> bool + Copy) -> Self {
        let nv = images.first().map_or(0, |p| p.nvars);
        let mut powers: Vec<Vec<Poly<C>>> = images.iter().map(|p| vec![Poly::one(p.nvars), p.clone()]).collect();
        let mut out = Poly::zero(nv);
        for (m, c) in &self.terms {
            let mut t = Poly::constant(nv, c.clone());
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap().mul_filtered(&images[i], keep);
                    powers[i].push(next);
                }
                t = t.mul_filtered(&powers[i][e as usize], keep);
                if t.is_zero() {
                    break;
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Exact quotient by a linear form with rational coefficients, or
    /// `None` if it does not divide.
    pub fn div_linear(&self, form: &[Q]) -> Option<Self> {
        let k = form.iter().position(|a| !Zero::is_zero(a))?;
        let inv_a = form[k].recip();
        let lin: Poly<C> = Poly::linear(form);
        let mut rem = self.clone();
        let mut quot = Poly::zero(self.nvars);
        loop {
            let top = rem.terms.keys().map(|m| m.0[k]).max();
            match top {
                None => return Some(quot),
                Some(0) => return None,
                Some(e) => {
                    let mut qt = Poly::zero(self.nvars);
                    for (m, c) in &rem.terms {
                        if m.0[k] == e {
                            let mut ex = m.0.clone();
                            ex[k] -= 1;
                            qt.add_term(ex, c.scale(&inv_a));
                        }
                    }
                    rem = rem.sub(&qt.mul(&lin));
                    quot = quot.add(&qt);
                }
            }
        }
    }

    pub fn map_coeffs<D: Coeff>(&self, f: impl Fn(&C) -> D) -> Poly<D> {
        let mut out = Poly::zero(self.nvars);
        for (m, c) in &self.terms {
            out.add_term(m.0.clone(), f(c));
        }
        out
    }

    /// Adds `extra` trailing variables (all with exponent zero).
    pub fn extend_vars(&self, extra: usize) -> Self {
        let mut out = Poly::zero(self.nvars + extra);
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            e.extend(std::iter::repeat(0).take(extra));
            out.add_term(e, c.clone());
        }
        out
    }
}

impl Poly<Q> {
    pub fn eval(&self, point: &[Q]) -> Q {
        let mut acc = <Q as Zero>::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    pub fn to_coeff<C: Coeff>(&self) -> Poly<C> {
        self.map_coeffs(|c| C::from_q(c))
    }
}

/// Linear form with primitive integer coefficients whose first nonzero
/// entry is positive; used as a canonical denominator factor.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinearForm(pub Vec<Z>);

impl LinearForm {
    /// Splits a rational functional as `scale * form`.
    pub fn normalize(coeffs: &[Q]) -> Option<(Q, LinearForm)> {
        let (mut p, mut s) = crate::arith::primitive_from_rational(coeffs);
        if Zero::is_zero(&s) {
            return None;
        }
        // v = p / s; flip sign so the leading entry is positive.
        let lead = p.iter().find(|x| !x.is_zero()).unwrap();
        if lead.is_negative() {
            p = p.iter().map(|x| -x).collect();
            s = -s;
        }
        Some((s.recip(), LinearForm(p)))
    }

    pub fn as_q(&self) -> Vec<Q> {
        self.0.iter().map(qz).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};

    #[test]
    fn graded_lex_order() {
        assert!(Mono(vec![0, 2]) > Mono(vec![1, 0]));
        assert!(Mono(vec![1, 1]) > Mono(vec![0, 2]));
    }

    #[test]
    fn exact_linear_division() {
        let x: Poly<Q> = Poly::var(2, 0);
        let y: Poly<Q> = Poly::var(2, 1);
        let l = x.scale(&q(2)).add(&y.scale(&q(-3)));
        let f = l.mul(&x.add(&y)).mul(&y);
        let g = f.div_linear(&[q(2), q(-3)]).unwrap();
        assert_eq!(g, x.add(&y).mul(&y));
        assert!(f.add(&Poly::one(2)).div_linear(&[q(2), q(-3)]).is_none());
    }

    #[test]
    fn normalized_form() {
        let (s, f) = LinearForm::normalize(&[qf(-1, 2), q(1)]).unwrap();
        assert_eq!(f.0, vec![Z::from(1), Z::from(-2)]);
        assert_eq!(s, qf(-1, 2));
    }

    #[test]
    fn substitution_matches_evaluation() {
        let x: Poly<Q> = Poly::var(2, 0);
        let y: Poly<Q> = Poly::var(2, 1);
        let f = x.mul(&x).add(&y.scale(&q(3)));
        let img = vec![Poly::linear(&[q(1), q(1)]), Poly::linear(&[q(2), q(0)])];
        let g = f.substitute(&img, |_| true);
        let pt = [qf(1, 3), q(2)];
        let direct = f.eval(&[&pt[0] + &pt[1], q(2) * &pt[0]]);
        assert_eq!(g.eval(&pt), direct);
    }
}
