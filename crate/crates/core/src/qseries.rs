//! Truncated Laurent series in `q^{1/r}` with exact precision tracking.

use crate::poly::Coeff;
use std::collections::BTreeMap;

/// Effectively infinite precision for exact (finite) series.
pub const EXACT: i64 = i64::MAX / 4;

/// `Σ c_e q^{e/r}`, exact for all exponents `e/r` with `e ≤ prec`.
#[derive(Debug, Clone, PartialEq)]
pub struct QSeries<C: Coeff> {
    pub r: i64,
    pub prec: i64,
    pub terms: BTreeMap<i64, C>,
}

impl<C: Coeff> QSeries<C> {
    pub fn zero(r: i64) -> Self {
        QSeries { r, prec: EXACT, terms: BTreeMap::new() }
    }

    pub fn constant(r: i64, c: C) -> Self {
        Self::monomial(r, 0, c)
    }

    /// `c q^{e/r}`.
    pub fn monomial(r: i64, e: i64, c: C) -> Self {
        let mut s = Self::zero(r);
        if !c.cis_zero() {
            s.terms.insert(e, c);
        }
        s
    }

    pub fn with_prec(mut self, prec: i64) -> Self {
        self.prec = self.prec.min(prec);
        self.terms.retain(|&e, _| e <= prec);
        self
    }

    pub fn valuation(&self) -> i64 {
        self.terms.keys().next().copied().unwrap_or(EXACT)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, e: i64, c: C) {
        if e > self.prec || c.cis_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(v) => {
                let s = v.cadd(&c);
                if s.cis_zero() {
                    self.terms.remove(&e);
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert(e, c);
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.r, o.r, "series gradings differ");
        let prec = self.prec.min(o.prec);
        let mut out = QSeries { r: self.r, prec, terms: BTreeMap::new() };
        for (&e, c) in self.terms.iter().chain(o.terms.iter()) {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        QSeries { r: self.r, prec: self.prec, terms: self.terms.iter().map(|(&e, c)| (e, c.cneg())).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale_c(&self, c: &C) -> Self {
        let mut out = QSeries { r: self.r, prec: self.prec, terms: BTreeMap::new() };
        for (&e, x) in &self.terms {
            out.add_term(e, x.cmul(c));
        }
        out
    }

    pub fn shift(&self, e: i64) -> Self {
        QSeries {
            r: self.r,
            prec: if self.prec >= EXACT { EXACT } else { self.prec + e },
            terms: self.terms.iter().map(|(&k, c)| (k + e, c.clone())).collect(),
        }
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.r, o.r, "series gradings differ");
        let pa = if self.prec >= EXACT { EXACT } else { self.prec.saturating_add(o.valuation().min(EXACT)) };
        let pb = if o.prec >= EXACT { EXACT } else { o.prec.saturating_add(self.valuation().min(EXACT)) };
        let prec = pa.min(pb).min(EXACT);
        let mut out = QSeries { r: self.r, prec, terms: BTreeMap::new() };
        for (&ea, ca) in &self.terms {
            for (&eb, cb) in &o.terms {
                let e = ea + eb;
                if e > prec {
                    break;
                }
                out.add_term(e, ca.cmul(cb));
            }
        }
        out
    }

    /// Re-grades to `q^{1/r2}` where `r | r2`.
    pub fn regrade(&self, r2: i64) -> Self {
        assert!(r2 % self.r == 0);
        let k = r2 / self.r;
        QSeries {
            r: r2,
            prec: if self.prec >= EXACT { EXACT } else { self.prec * k },
            terms: self.terms.iter().map(|(&e, c)| (e * k, c.clone())).collect(),
        }
    }

    /// True when every stored exponent is an integer power of `q`.
    pub fn has_integral_exponents(&self) -> bool {
        self.terms.keys().all(|e| e % self.r == 0)
    }

    pub fn coefficient(&self, e: i64) -> Option<&C> {
        self.terms.get(&e)
    }

    pub fn map<D: Coeff>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        let mut out = QSeries { r: self.r, prec: self.prec, terms: BTreeMap::new() };
        for (&e, c) in &self.terms {
            out.add_term(e, f(c));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, Q};

    #[test]
    fn precision_tracks_valuations() {
        let mut a: QSeries<Q> = QSeries::zero(1).with_prec(5);
        a.add_term(-1, q(1));
        a.add_term(2, q(3));
        let mut b: QSeries<Q> = QSeries::zero(1).with_prec(4);
        b.add_term(1, q(2));
        let c = a.mul(&b);
        assert_eq!(c.prec, 3);
        assert_eq!(c.coefficient(0), Some(&q(2)));
        assert_eq!(c.coefficient(3), Some(&q(6)));
    }
}
