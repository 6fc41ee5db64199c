//! Rational functions on `L ⊗ Q` whose denominators are products of
//! linear forms, kept in a canonical reduced form.

use crate::arith::Q;
use crate::error::{Error, Result};
use crate::poly::{Coeff, LinearForm, Poly};
use std::collections::BTreeMap;

/// `numerator / Π form^mult`; no form in the denominator divides the
/// numerator.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunctionND<C: Coeff> {
    pub numerator: Poly<C>,
    pub denominator: BTreeMap<LinearForm, u32>,
}

impl<C: Coeff> RationalFunctionND<C> {
    pub fn from_poly(p: Poly<C>) -> Self {
        RationalFunctionND { numerator: p, denominator: BTreeMap::new() }
    }

    pub fn zero(nvars: usize) -> Self {
        Self::from_poly(Poly::zero(nvars))
    }

    /// `p / Π forms` where each form is a rational functional (padded with
    /// zeros to the polynomial's variable count).
    pub fn new(p: Poly<C>, forms: &[Vec<Q>]) -> Result<Self> {
        let mut num = p;
        let mut den = BTreeMap::new();
        for f in forms {
            let mut padded = f.clone();
            padded.resize(num.nvars, Q::from_integer(0.into()));
            let (s, lf) = LinearForm::normalize(&padded)
                .ok_or_else(|| Error::InvalidInput("division by the zero form".into()))?;
            num = num.scale(&s.recip());
            *den.entry(lf).or_insert(0) += 1;
        }
        let mut r = RationalFunctionND { numerator: num, denominator: den };
        r.reduce();
        Ok(r)
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    fn reduce(&mut self) {
        if self.numerator.is_zero() {
            self.denominator.clear();
            return;
        }
        let forms: Vec<LinearForm> = self.denominator.keys().cloned().collect();
        for lf in forms {
            let q = lf.as_q();
            loop {
                let m = self.denominator.get(&lf).copied().unwrap_or(0);
                if m == 0 {
                    break;
                }
                match self.numerator.div_linear(&q) {
                    Some(d) => {
                        self.numerator = d;
                        if m == 1 {
                            self.denominator.remove(&lf);
                        } else {
                            self.denominator.insert(lf.clone(), m - 1);
                        }
                    }
                    None => break,
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut den = self.denominator.clone();
        for (f, &m) in &o.denominator {
            let e = den.entry(f.clone()).or_insert(0);
            *e = (*e).max(m);
        }
        let lift = |r: &Self| {
            let mut p = r.numerator.clone();
            for (f, &m) in &den {
                let have = r.denominator.get(f).copied().unwrap_or(0);
                let lin: Poly<C> = Poly::linear(&f.as_q());
                for _ in have..m {
                    p = p.mul(&lin);
                }
            }
            p
        };
        let mut r = RationalFunctionND { numerator: lift(self).add(&lift(o)), denominator: den };
        r.reduce();
        r
    }

    pub fn mul_poly(&self, p: &Poly<C>) -> Self {
        let mut r = RationalFunctionND { numerator: self.numerator.mul(p), denominator: self.denominator.clone() };
        r.reduce();
        r
    }

    pub fn scale(&self, s: &Q) -> Self {
        let mut r = self.clone();
        r.numerator = r.numerator.scale(s);
        if r.numerator.is_zero() {
            r.denominator.clear();
        }
        r
    }

    pub fn into_polynomial(self) -> Result<Poly<C>> {
        if self.is_polynomial() {
            Ok(self.numerator)
        } else {
            Err(Error::NonPolynomialResult(format!(
                "{} denominator factor(s) remain",
                self.denominator.values().sum::<u32>()
            )))
        }
    }
}

impl RationalFunctionND<Q> {
    /// Value at a rational point, `None` at a pole.
    pub fn eval(&self, point: &[Q]) -> Option<Q> {
        let mut d = Q::from_integer(1.into());
        for (f, &m) in &self.denominator {
            let v = crate::arith::dot_q(&f.as_q(), point);
            for _ in 0..m {
                d *= &v;
            }
        }
        if num_traits::Zero::is_zero(&d) {
            return None;
        }
        Some(self.numerator.eval(point) / d)
    }
}
