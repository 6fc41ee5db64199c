//! The theta quotient `Φ(z,τ)` and `φ_st(z,τ,σ)`: numeric evaluation with
//! truncation bounds, the transformation laws, and exact q-expansions.

use crate::arith::{to_f64, Q};
use crate::cyclo::CycZeta;
use crate::error::{Error, Result};
use crate::poly::Coeff;
use crate::qseries::QSeries;
use crate::zeta::Zeta;
use num_complex::Complex64;
use num_traits::Zero;
use std::f64::consts::PI;

/// Factors closer to zero than this are treated as poles.
pub const POLE_GUARD: f64 = 1e-12;

/// A value together with a bound on its truncation error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounded {
    pub value: Complex64,
    pub bound: f64,
}

pub fn e2pi(x: Complex64) -> Complex64 {
    (Complex64::new(0.0, 2.0 * PI) * x).exp()
}

fn check_tau(tau: Complex64) -> Result<()> {
    if tau.im <= 0.0 {
        return Err(Error::InvalidInput(format!("Im τ must be positive, got {tau}")));
    }
    Ok(())
}

/// Tail bound for `Π_{k>K} Π_j (1 - c_j q^k)^{±1}`: if every
/// `|c_j q^k| ≤ 1/2` the log of the tail is at most
/// `2 Σ_j |c_j| |q|^{K+1} / (1-|q|)`.
fn tail_bound(partial: f64, qa: f64, k: usize, cs: &[f64]) -> f64 {
    let qk = qa.powi(k as i32 + 1);
    if cs.iter().any(|c| c * qk > 0.5) {
        return f64::INFINITY;
    }
    let s = 2.0 * cs.iter().sum::<f64>() * qk / (1.0 - qa);
    partial * s.exp_m1()
}

/// `Φ(z,τ) = (t^{1/2} - t^{-1/2}) Π_{k=1}^K (1-tq^k)(1-t^{-1}q^k)/(1-q^k)²`.
pub fn phi_big(z: Complex64, tau: Complex64, k: usize) -> Result<Bounded> {
    check_tau(tau)?;
    let q = e2pi(tau);
    let t = e2pi(z);
    let th = e2pi(z / 2.0);
    let mut v = th - 1.0 / th;
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 1..=k {
        qk *= q;
        v *= (1.0 - t * qk) * (1.0 - qk / t) / ((1.0 - qk) * (1.0 - qk));
    }
    let ta = t.norm();
    let bound = tail_bound(v.norm(), q.norm(), k, &[ta, 1.0 / ta, 1.0, 1.0]);
    Ok(Bounded { value: v, bound })
}

/// `φ_st(z,τ,σ)` from its product formula.
pub fn phi_st(z: Complex64, tau: Complex64, sigma: Complex64, k: usize) -> Result<Bounded> {
    check_tau(tau)?;
    let q = e2pi(tau);
    let t = e2pi(z);
    let zeta = e2pi(sigma);
    let guard = |x: Complex64, what: &str| -> Result<Complex64> {
        if x.norm() < POLE_GUARD {
            Err(Error::PoleProximity(format!("|{what}| < {POLE_GUARD:e} at z={z}, τ={tau}, σ={sigma}")))
        } else {
            Ok(x)
        }
    };
    let mut v = (1.0 - zeta * t) / (guard(1.0 - zeta, "1-ζ")? * guard(1.0 - t, "1-t")?);
    let mut qk = Complex64::new(1.0, 0.0);
    for _ in 1..=k {
        qk *= q;
        let den = guard(1.0 - zeta * qk, "1-ζq^k")?
            * guard(1.0 - qk / zeta, "1-ζ⁻¹q^k")?
            * guard(1.0 - t * qk, "1-tq^k")?
            * guard(1.0 - qk / t, "1-t⁻¹q^k")?;
        v *= (1.0 - qk) * (1.0 - qk) * (1.0 - zeta * t * qk) * (1.0 - qk / (zeta * t)) / den;
    }
    let (ta, za) = (t.norm(), zeta.norm());
    let cs = [1.0, 1.0, za * ta, 1.0 / (za * ta), za, 1.0 / za, ta, 1.0 / ta];
    let bound = tail_bound(v.norm(), q.norm(), k, &cs);
    Ok(Bounded { value: v, bound })
}

/// Both sides of the modular law for `A = [[a,b],[c,d]] ∈ SL₂(Z)`:
/// `φ_st(z/(cτ+d), (aτ+b)/(cτ+d), σ)` and
/// `(cτ+d) e^{2πi czσ} φ_st(z, τ, (cτ+d)σ)`.
///
/// The factor `(cτ+d)` is the weight of `φ_st`, inherited from the
/// weight `-1` of `Φ`.
pub fn modular_law_sides(
    abcd: [i64; 4],
    z: Complex64,
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<(Bounded, Bounded)> {
    let [a, b, c, d] = abcd;
    if a * d - b * c != 1 {
        return Err(Error::InvalidInput("matrix is not in SL2(Z)".into()));
    }
    let j = tau * c as f64 + d as f64;
    let lhs = phi_st(z / j, (tau * a as f64 + b as f64) / j, sigma, k)?;
    let r = phi_st(z, tau, j * sigma, k)?;
    let f = j * (Complex64::new(0.0, 2.0 * PI) * c as f64 * z * sigma).exp();
    Ok((lhs, Bounded { value: f * r.value, bound: f.norm() * r.bound }))
}

/// Both sides of the elliptic law
/// `φ_st(z+mτ+n, τ, σ) = ζ^{-m} φ_st(z, τ, σ)`.
pub fn elliptic_law_sides(
    m: i64,
    n: i64,
    z: Complex64,
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<(Bounded, Bounded)> {
    let lhs = phi_st(z + tau * m as f64 + n as f64, tau, sigma, k)?;
    let r = phi_st(z, tau, sigma, k)?;
    let f = e2pi(-sigma * m as f64);
    Ok((lhs, Bounded { value: f * r.value, bound: f.norm() * r.bound }))
}

/// `Φ(z+mτ+n) = (-1)^{m+n} e^{-πi(2mz+m²τ)} Φ(z)`, both sides.
pub fn phi_big_elliptic_sides(m: i64, n: i64, z: Complex64, tau: Complex64, k: usize) -> Result<(Bounded, Bounded)> {
    let lhs = phi_big(z + tau * m as f64 + n as f64, tau, k)?;
    let r = phi_big(z, tau, k)?;
    let sign = if (m + n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let f = sign * (Complex64::new(0.0, -PI) * (2.0 * m as f64 * z + (m * m) as f64 * tau)).exp();
    Ok((lhs, Bounded { value: f * r.value, bound: f.norm() * r.bound }))
}

impl Coeff for Complex64 {
    fn czero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn cone() -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn cis_zero(&self) -> bool {
        *self == Complex64::new(0.0, 0.0)
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
        self * to_f64(r)
    }
    fn from_q(r: &Q) -> Self {
        Complex64::new(to_f64(r), 0.0)
    }
}

/// Truncated power series `Σ_{k ≤ deg} c_k x^k` in one variable over
/// `CycZeta`.  Products truncate at the smaller degree; the constants
/// `czero`/`cone` carry an unbounded degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet1 {
    pub deg: u32,
    pub c: Vec<CycZeta>,
}

impl Jet1 {
    pub fn constant(c: CycZeta) -> Self {
        Jet1 { deg: u32::MAX, c: vec![c] }
    }

    pub fn from_coeffs(deg: u32, mut c: Vec<CycZeta>) -> Self {
        c.truncate(deg as usize + 1);
        let mut j = Jet1 { deg, c };
        j.trim();
        j
    }

    fn trim(&mut self) {
        while self.c.len() > 1 && self.c.last().is_some_and(|x| x.is_zero()) {
            self.c.pop();
        }
    }

    /// `e^{s x}` to degree `deg`.
    pub fn exp_linear(s: &Q, deg: u32) -> Self {
        let mut c = Vec::with_capacity(deg as usize + 1);
        let mut term = Q::from_integer(1.into());
        for k in 0..=deg {
            c.push(CycZeta::scalar(1, term.clone()));
            term = term * s / Q::from_integer((k + 1).into());
        }
        Jet1 { deg, c }
    }

    /// `x^k` times the series, keeping the degree bound.
    pub fn shift_up(&self, k: u32) -> Self {
        let mut c = vec![CycZeta::scalar(1, Q::zero()); k as usize];
        c.extend(self.c.iter().cloned());
        Self::from_coeffs(self.deg, c)
    }

    pub fn coeff(&self, k: usize) -> CycZeta {
        self.c.get(k).cloned().unwrap_or_else(|| CycZeta::scalar(1, Q::zero()))
    }

    /// Multiplicative inverse when the constant term is a unit of the
    /// supported kinds (in `Q(ς)` or in `Q(ω)`).
    pub fn inverse(&self, deg: u32) -> Result<Self> {
        let c0 = self.coeff(0);
        let inv0 = if let Some(z) = c0.as_zeta() {
            CycZeta::from_zeta(c0.m, z.try_inv().ok_or_else(|| Error::ZetaUnit("non-invertible constant".into()))?)
        } else {
            c0.inv_pure().ok_or_else(|| Error::ZetaUnit("non-invertible constant".into()))?
        };
        let deg = deg.min(self.deg);
        let mut out = vec![inv0.clone()];
        for k in 1..=deg as usize {
            let mut s = CycZeta::scalar(1, Q::zero());
            for j in 1..=k {
                s = s.add(&self.coeff(j).mul(&out[k - j]));
            }
            out.push(s.neg().mul(&inv0));
        }
        Ok(Jet1::from_coeffs(deg, out))
    }
}

impl Coeff for Jet1 {
    fn czero() -> Self {
        Jet1::constant(CycZeta::scalar(1, Q::zero()))
    }
    fn cone() -> Self {
        Jet1::constant(CycZeta::scalar(1, Q::from_integer(1.into())))
    }
    fn cis_zero(&self) -> bool {
        self.c.iter().all(|x| x.is_zero())
    }
    fn cadd(&self, o: &Self) -> Self {
        let deg = self.deg.min(o.deg);
        let len = self.c.len().max(o.c.len()).min(deg as usize + 1);
        Jet1::from_coeffs(deg, (0..len).map(|k| self.coeff(k).add(&o.coeff(k))).collect())
    }
    fn csub(&self, o: &Self) -> Self {
        self.cadd(&o.cneg())
    }
    fn cmul(&self, o: &Self) -> Self {
        let deg = self.deg.min(o.deg);
        let len = (self.c.len() + o.c.len() - 1).min(deg as usize + 1);
        let mut c = vec![CycZeta::scalar(1, Q::zero()); len];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.c.iter().enumerate() {
                if i + j >= len {
                    break;
                }
                if !b.is_zero() {
                    c[i + j] = c[i + j].add(&a.mul(b));
                }
            }
        }
        Jet1::from_coeffs(deg, c)
    }
    fn cneg(&self) -> Self {
        Jet1 { deg: self.deg, c: self.c.iter().map(|x| x.neg()).collect() }
    }
    fn scale(&self, r: &Q) -> Self {
        Jet1::from_coeffs(self.deg, self.c.iter().map(|x| Coeff::scale(x, r)).collect())
    }
    fn from_q(r: &Q) -> Self {
        Jet1::constant(CycZeta::scalar(1, r.clone()))
    }
}

/// Ring data for expanding `φ_st(z + aτ − b, τ, dσ)` in `q^{1/r}`:
/// `x_pow(m) = X^m` where `X = e^{2πi(z−b)}` (without its `q^a` part)
/// and `zeta_pow(j) = ζ^{dj}`.
pub struct PhiData<'a, C: Coeff> {
    pub x_pow: &'a dyn Fn(i64) -> C,
    pub zeta_pow: &'a dyn Fn(i64) -> C,
}

/// `(1 - cY)/(1 - Y) = 1 + (1-c) Σ_{j≥1} Y^j` with `Y = y_pow(1) q^{e/r}`,
/// truncated at exponent `prec`.
fn ratio_series<C: Coeff>(r: i64, e: i64, prec: i64, c: &C, y_pow: &dyn Fn(i64) -> C) -> QSeries<C> {
    let mut s = QSeries::constant(r, C::cone()).with_prec(prec);
    if e <= 0 {
        panic!("ratio series needs a positive exponent");
    }
    let one_minus_c = C::cone().csub(c);
    let mut j = 1;
    while j * e <= prec {
        s.add_term(j * e, y_pow(j).cmul(&one_minus_c));
        j += 1;
    }
    s
}

/// The product part `Π_{k≥1}` of `φ_st(z + aτ − b, τ, dσ)` expanded in
/// `q^{1/r}` up to exponent `prec` (units of `1/r`); `a = a_r / r` with
/// `0 ≤ a < 1`.
pub fn phi_st_product<C: Coeff>(data: &PhiData<C>, a_r: i64, r: i64, prec: i64) -> Result<QSeries<C>> {
    if a_r < 0 || a_r >= r {
        return Err(Error::UnsupportedRegime(format!("shift {a_r}/{r} outside [0,1)")));
    }
    let zd = (data.zeta_pow)(1);
    let zdi = (data.zeta_pow)(-1);
    let mut acc = QSeries::constant(r, C::cone()).with_prec(prec);
    let mut k = 1;
    while k * r - a_r <= prec {
        let kr = k * r;
        if kr <= prec {
            // (1-q^k)^2 / ((1-ζ^d q^k)(1-ζ^{-d} q^k))
            let mut qk = QSeries::constant(r, C::cone()).with_prec(prec);
            qk.add_term(kr, C::cone().cneg());
            let g1 = geometric(r, kr, prec, &|j| (data.zeta_pow)(j));
            let g2 = geometric(r, kr, prec, &|j| (data.zeta_pow)(-j));
            acc = acc.mul(&qk).mul(&qk).mul(&g1).mul(&g2);
        }
        if kr + a_r <= prec {
            let f = ratio_series(r, kr + a_r, prec, &zd, data.x_pow);
            acc = acc.mul(&f);
        }
        let f = ratio_series(r, kr - a_r, prec, &zdi, &|j| (data.x_pow)(-j));
        acc = acc.mul(&f);
        k += 1;
    }
    Ok(acc.with_prec(prec))
}

/// `Σ_{j≥0} c(j) q^{je/r}` truncated.
fn geometric<C: Coeff>(r: i64, e: i64, prec: i64, c: &dyn Fn(i64) -> C) -> QSeries<C> {
    let mut s = QSeries::zero(r).with_prec(prec);
    let mut j = 0;
    while j * e <= prec {
        s.add_term(j * e, c(j));
        j += 1;
    }
    s
}

/// Leading factor `(1-ζ^d X q^a)/((1-ζ^d)(1-X q^a))` for `0 < a < 1`,
/// expanded as `1/(1-ζ^d) + Σ_{m≥1} X^m q^{am}`.
pub fn phi_st_lead<C: Coeff>(
    data: &PhiData<C>,
    inv_one_minus_zeta: &C,
    a_r: i64,
    r: i64,
    prec: i64,
) -> Result<QSeries<C>> {
    if a_r <= 0 || a_r >= r {
        return Err(Error::UnsupportedRegime(format!("leading factor expansion needs 0 < a < 1, got {a_r}/{r}")));
    }
    let mut s = QSeries::constant(r, inv_one_minus_zeta.clone()).with_prec(prec);
    let mut m = 1;
    while m * a_r <= prec {
        s.add_term(m * a_r, (data.x_pow)(m));
        m += 1;
    }
    Ok(s)
}

/// q-expansion of `φ_st(z + aτ − b, τ, dσ)` with numeric `t = e^{2πiz}` and
/// `ζ`, exponents in `(1/r)Z` up to `prec`.  For `a = 0` the leading factor
/// is the closed form `(1-ζ^d X)/((1-ζ^d)(1-X))`.
pub fn phi_st_qexp_numeric(
    t: Complex64,
    zeta: Complex64,
    a: &Q,
    b: &Q,
    d: &Q,
    r: i64,
    prec: i64,
) -> Result<QSeries<Complex64>> {
    let ar = a * Q::from_integer(r.into());
    if !ar.is_integer() || ar < Q::zero() || ar >= Q::from_integer(r.into()) {
        return Err(Error::UnsupportedRegime(format!("a = {a} is not in [0,1) ∩ (1/{r})Z")));
    }
    let a_r: i64 = ar.to_integer().try_into().unwrap();
    let x = t * e2pi(Complex64::new(-to_f64(b), 0.0));
    let zd = zeta.powc(Complex64::new(to_f64(d), 0.0));
    let x_pow = move |m: i64| x.powi(m as i32);
    let zeta_pow = move |j: i64| zd.powi(j as i32);
    let data = PhiData { x_pow: &x_pow, zeta_pow: &zeta_pow };
    let prod = phi_st_product(&data, a_r, r, prec)?;
    if (1.0 - zd).norm() < POLE_GUARD {
        return Err(Error::ZetaUnit("1 - ζ^d vanishes".into()));
    }
    let lead = if a_r == 0 {
        if (1.0 - x).norm() < POLE_GUARD {
            return Err(Error::PoleProximity("1 - X vanishes".into()));
        }
        QSeries::constant(r, (1.0 - zd * x) / ((1.0 - zd) * (1.0 - x)))
    } else {
        phi_st_lead(&data, &(1.0 / (1.0 - zd)), a_r, r, prec)?
    };
    Ok(lead.mul(&prod).with_prec(prec))
}

/// `1/(1 - ζ^d q^m)` in `Q(ς)[[q]]` with `ς = ζ^{1/M}`, truncated at
/// `q^N`: geometric for `m > 0`, `-ζ^{-d} q^{-m} Σ_k ζ^{-dk} q^{-mk}` for
/// `m < 0`, and the closed element `1/(1-ς^{dM})` for `m = 0`.
pub fn geometric_inverse(d: &Q, m: i64, big_m: u64, n: i64) -> Result<QSeries<Zeta>> {
    let dm = d * Q::from_integer((big_m as i64).into());
    if !dm.is_integer() {
        return Err(Error::InvalidInput(format!("ζ^{d} is not a power of ζ^(1/{big_m})")));
    }
    let k: i64 = dm.to_integer().try_into().map_err(|_| Error::InvalidInput("exponent overflow".into()))?;
    let mut s = QSeries::zero(1).with_prec(n);
    if m == 0 {
        return Ok(QSeries::constant(1, Zeta::inv_one_minus(k)?));
    }
    if m > 0 {
        let mut j = 0;
        while j * m <= n {
            s.add_term(j * m, Zeta::monomial(Q::from_integer(1.into()), k * j));
            j += 1;
        }
    } else {
        let mut j = 1;
        while j * (-m) <= n {
            s.add_term(j * (-m), Zeta::monomial(Q::from_integer((-1).into()), -k * j));
            j += 1;
        }
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{q, qf};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn phi_big_laws() {
        let tau = c(0.1, 0.9);
        let z = c(0.23, 0.11);
        let a = phi_big(z, tau, 40).unwrap().value;
        assert!((phi_big(-z, tau, 40).unwrap().value + a).norm() < 1e-12);
        for (m, n) in [(0, 1), (1, 0), (-1, 1)] {
            let (l, r) = phi_big_elliptic_sides(m, n, z, tau, 40).unwrap();
            assert!((l.value - r.value).norm() < 1e-10 * (1.0 + r.value.norm()));
        }
    }

    #[test]
    fn phi_st_laws() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..5 {
            let z = c(rng.gen_range(-0.4..0.4), rng.gen_range(-0.2..0.2));
            let tau = c(rng.gen_range(-0.5..0.5), rng.gen_range(0.8..1.5));
            let sigma = c(rng.gen_range(0.05..0.45), rng.gen_range(-0.1..0.1));
            for m in -1..=1 {
                for n in -1..=1 {
                    let (l, r) = elliptic_law_sides(m, n, z, tau, sigma, 50).unwrap();
                    assert!((l.value - r.value).norm() < 1e-9 * (1.0 + r.value.norm()));
                }
            }
            for abcd in [[0, -1, 1, 0], [1, 1, 0, 1]] {
                let (l, r) = modular_law_sides(abcd, z, tau, sigma, 50).unwrap();
                assert!((l.value - r.value).norm() < 1e-8 * (1.0 + r.value.norm()), "{abcd:?}: {l:?} {r:?}");
            }
        }
    }

    #[test]
    fn modular_law_needs_weight_factor() {
        let (z, tau, sigma) = (c(0.1, 0.05), c(0.2, 1.1), c(0.3, 0.02));
        let (l, r) = modular_law_sides([0, -1, 1, 0], z, tau, sigma, 50).unwrap();
        let without = r.value / tau;
        assert!((l.value - r.value).norm() < 1e-9);
        assert!((l.value - without).norm() > 1e-3);
    }

    #[test]
    fn q_to_zero_limit() {
        let (z, sigma) = (c(0.13, 0.02), c(0.31, -0.01));
        let v = phi_st(z, c(0.0, 8.0), sigma, 10).unwrap().value;
        let (t, zeta) = (e2pi(z), e2pi(sigma));
        let lead = (1.0 - zeta * t) / ((1.0 - zeta) * (1.0 - t));
        assert!((v - lead).norm() < 1e-15_f64.max(1e-12 * lead.norm()));
    }

    #[test]
    fn pole_guard() {
        assert!(matches!(phi_st(c(0.1, 0.0), c(0.0, 1.0), c(0.0, 0.0), 10), Err(Error::PoleProximity(_))));
    }

    #[test]
    fn qexp_matches_bl1_sum() {
        // φ_st = Σ_m t^m / (1 - ζ q^m) for |q| < |t| < 1, compared
        // coefficientwise in q for three numeric (t, ζ).
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..3 {
            let t = Complex64::from_polar(rng.gen_range(0.3..0.7), rng.gen_range(0.0..6.0));
            let zeta = Complex64::from_polar(1.0, rng.gen_range(0.5..5.5));
            let n = 5;
            let s = phi_st_qexp_numeric(t, zeta, &q(0), &q(0), &q(1), 1, n).unwrap();
            let mut bl = vec![Complex64::new(0.0, 0.0); n as usize + 1];
            // m ≥ 0: t^m Σ_j ζ^j q^{mj} (q^0 terms summed in closed form).
            bl[0] += 1.0 / (1.0 - zeta) + t / (1.0 - t);
            for m in 1..=n {
                for j in 1..=n / m {
                    bl[(m * j) as usize] += t.powi(m as i32) * zeta.powi(j as i32);
                }
            }
            // m < 0: -t^m Σ_{j≥1} ζ^{-j} q^{|m|j}.
            for m in 1..=n {
                for j in 1..=n / m {
                    bl[(m * j) as usize] -= t.powi(-m as i32) * zeta.powi(-j as i32);
                }
            }
            for e in 0..=n {
                let got = s.coefficient(e).copied().unwrap_or_default();
                assert!((got - bl[e as usize]).norm() < 1e-9, "q^{e}: {got} vs {}", bl[e as usize]);
            }
        }
    }

    #[test]
    fn qexp_matches_numeric_product() {
        let (t, zeta) = (Complex64::from_polar(0.8, 1.0), Complex64::from_polar(1.0, 2.0));
        let tau = c(0.0, 3.0);
        let qv = e2pi(tau);
        let s = phi_st_qexp_numeric(t, zeta, &qf(1, 2), &qf(1, 3), &q(1), 2, 12).unwrap();
        assert!(s.terms.keys().all(|e| e % 2 == 0 || e % 2 == 1));
        let mut v = Complex64::new(0.0, 0.0);
        for (&e, c) in &s.terms {
            v += c * qv.powf(e as f64 / 2.0);
        }
        let z = t.ln() / Complex64::new(0.0, 2.0 * PI);
        let sigma = zeta.ln() / Complex64::new(0.0, 2.0 * PI);
        let direct = phi_st(z + tau / 2.0 - 1.0 / 3.0, tau, sigma, 30).unwrap().value;
        assert!((v - direct).norm() < 1e-9 * direct.norm().max(1.0));
    }

    #[test]
    fn half_shift_grading() {
        let s = phi_st_qexp_numeric(c(0.5, 0.0), c(0.0, 1.0), &qf(1, 2), &q(0), &q(1), 2, 6).unwrap();
        assert!(s.terms.keys().any(|e| e % 2 != 0));
    }

    #[test]
    fn geometric_inverse_examples() {
        let s = geometric_inverse(&q(1), 1, 1, 2).unwrap();
        assert_eq!(s.coefficient(0), Some(&Zeta::int(1)));
        assert_eq!(s.coefficient(1), Some(&Zeta::monomial(q(1), 1)));
        assert_eq!(s.coefficient(2), Some(&Zeta::monomial(q(1), 2)));
        let s = geometric_inverse(&q(1), -1, 1, 2).unwrap();
        assert_eq!(s.coefficient(0), None);
        assert_eq!(s.coefficient(1), Some(&Zeta::monomial(q(-1), -1)));
        assert_eq!(s.coefficient(2), Some(&Zeta::monomial(q(-1), -2)));
        // (1 - ζ q^{-1}) · result ≡ 1 after multiplying by q: q - ζ.
        assert!(matches!(geometric_inverse(&q(0), 0, 1, 2), Err(Error::ZetaUnit(_))));
    }

    #[test]
    fn jet_inverse() {
        let one_minus = Jet1::cone().csub(&Jet1::exp_linear(&q(-1), 5)); // 1 - e^{-x}
        let series = Jet1::from_coeffs(5, (0..5).map(|k| one_minus.coeff(k + 1)).collect());
        let bern = series.inverse(4).unwrap(); // x/(1-e^{-x})
        assert_eq!(bern.coeff(0), CycZeta::scalar(1, q(1)));
        assert_eq!(bern.coeff(1), CycZeta::scalar(1, qf(1, 2)));
        assert_eq!(bern.coeff(2), CycZeta::scalar(1, qf(1, 12)));
        assert_eq!(bern.coeff(3), CycZeta::scalar(1, q(0)));
    }
}
