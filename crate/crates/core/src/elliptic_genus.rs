//! Orbifold elliptic genus and class: the defining numeric sums, the exact
//! character formula built from local terms `b_J`, the definition-side
//! expansion along a vector, class jets, and the verification checks.

use crate::arith::{common_denominator, dot_qz, is_integer, q, to_f64, to_i64, Q, Z};
use crate::birational::{BirationalMorphism, Triangulation};
use crate::cyclo::CycZeta;
use crate::error::{Error, Result};
use crate::jacobi_forms::{e2pi, geometric_inverse, phi_st, phi_st_lead, phi_st_product, Bounded, Jet1, PhiData};
use crate::multifan::{EdgeVectors, GeneralFan, ToricModel};
use crate::poly::{Coeff, Poly};
use crate::qseries::QSeries;
use crate::sr_ring;
use crate::zeta::Zeta;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::{BTreeMap, BTreeSet};

// ---------------------------------------------------------------------------
// shared helpers

/// Order `M` of the root `ς = ζ^{1/M}` in which every power of `ζ` met by
/// the genus of `(Δ, V, ξ)` is integral: denominators of all `d_i` and
/// `d_i f_{h,i}`.
pub fn zeta_order(model: &ToricModel, d: &[Q]) -> u64 {
    let mut xs: Vec<Q> = d.to_vec();
    for (s, cone) in &model.cones {
        for h in &cone.group.elements {
            for (p, &i) in s.iter().enumerate() {
                xs.push(&d[i] * &h.f[p]);
            }
        }
    }
    common_denominator(xs.iter()).to_u64().expect("ζ-root order fits in u64")
}

fn exponent(x: &Q, big_m: u64) -> Result<i64> {
    let y = x * Q::from_integer(big_m.into());
    if !y.is_integer() {
        return Err(Error::InvalidInput(format!("ζ^{x} is not a power of ζ^(1/{big_m})")));
    }
    Ok(to_i64(&y.to_integer()))
}

fn zeta_pow(x: &Q, big_m: u64) -> Result<Zeta> {
    Ok(Zeta::monomial(q(1), exponent(x, big_m)?))
}

fn pair(u: &[i64], v: &[Z]) -> i64 {
    to_i64(&u.iter().zip(v).fold(Z::zero(), |acc, (a, b)| acc + b * Z::from(*a)))
}

fn cdot(u: &[Q], w: &[Complex64]) -> Complex64 {
    u.iter().zip(w).map(|(a, b)| b * to_f64(a)).sum()
}

fn check_complete(model: &ToricModel) -> Result<BTreeMap<Vec<usize>, i64>> {
    model.fan.degree_table()
}

fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// All `u ∈ Z^n` with `max |u_a| ≤ r`, in lexicographic order.
pub fn window(n: usize, r: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p: Vec<i64>| {
                (-r..=r).map(move |x| {
                    let mut p = p.clone();
                    p.push(x);
                    p
                })
            })
            .collect();
    }
    out
}

fn max_norm(u: &[i64]) -> i64 {
    u.iter().map(|x| x.abs()).max().unwrap_or(0)
}

fn cz_eq(a: &CycZeta, b: &CycZeta) -> bool {
    a.add(&b.neg()).is_zero()
}

fn poly_eq(a: &Poly<CycZeta>, b: &Poly<CycZeta>) -> bool {
    let diff = a.sub(b);
    diff.terms.values().all(|c| c.is_zero())
}

// ---------------------------------------------------------------------------
// numeric genus

fn cone_term(
    model: &ToricModel,
    d: &[Q],
    verts: &[usize],
    weight: i64,
    w: &[Complex64],
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<Bounded> {
    let cone = model.cone(verts);
    let uw: Vec<Complex64> = cone.dual.iter().map(|u| cdot(u, w)).collect();
    let mut value = Complex64::zero();
    let mut bound = 0.0;
    for h1 in &cone.group.elements {
        for h2 in &cone.group.elements {
            let mut prod = Complex64::new(1.0, 0.0);
            let (mut exact_abs, mut upper) = (1.0, 1.0);
            for (p, &i) in verts.iter().enumerate() {
                let (f1, f2, di) = (to_f64(&h1.f[p]), to_f64(&h2.f[p]), to_f64(&d[i]));
                let pre = e2pi(sigma * di * f1);
                let phi = phi_st(-uw[p] + tau * f1 - f2, tau, sigma * di, k)?;
                let a = pre * phi.value;
                prod *= a;
                exact_abs *= a.norm();
                upper *= a.norm() + pre.norm() * phi.bound;
            }
            value += prod;
            bound += upper - exact_abs;
        }
    }
    let s = weight as f64 / cone.order() as f64;
    Ok(Bounded { value: value * s, bound: bound * s.abs() })
}

/// The defining sum without a completeness check; summation order is the
/// order of the maximal list.
fn genus_sum(
    model: &ToricModel,
    d: &[Q],
    w: &[Complex64],
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<Bounded> {
    if w.len() != model.rank() || d.len() != model.fan.num_rays() {
        return Err(Error::InvalidInput("dimension mismatch in genus arguments".into()));
    }
    let terms: Vec<Result<Bounded>> = crate::pool().install(|| {
        model.fan.maximal.par_iter().map(|c| cone_term(model, d, &c.verts, c.weight(), w, tau, sigma, k)).collect()
    });
    let mut acc = Bounded { value: Complex64::zero(), bound: 0.0 };
    for t in terms {
        let t = t?;
        acc.value += t.value;
        acc.bound += t.bound;
    }
    Ok(acc)
}

/// `φ̂_st(Δ, V, ξ)(w)` at `(τ, σ)` with `K` product factors per `φ_st`.
pub fn genus_numeric(
    model: &ToricModel,
    d: &[Q],
    w: &[Complex64],
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<Bounded> {
    check_complete(model)?;
    genus_sum(model, d, w, tau, sigma, k)
}

/// `φ̂^v_st(z)`; incomplete multi-fans are allowed when `v` lies in the
/// support.
pub fn genus_along_v(
    model: &ToricModel,
    d: &[Q],
    v: &[Z],
    z: Complex64,
    tau: Complex64,
    sigma: Complex64,
    k: usize,
) -> Result<Bounded> {
    if !model.fan.is_complete() {
        let vq: Vec<Q> = v.iter().map(|x| Q::from_integer(x.clone())).collect();
        if !model.fan.in_support(&vq) {
            return Err(Error::VectorOutsideSupport(format!("{v:?}")));
        }
    }
    let w: Vec<Complex64> = v.iter().map(|x| z * to_f64(&Q::from_integer(x.clone()))).collect();
    genus_sum(model, d, &w, tau, sigma, k)
}

// ---------------------------------------------------------------------------
// character formula

/// `b_J(Δ, V, ξ)` evaluated at `-u`:
/// `(-1)^{n-|J|} Σ_{h∈H_J} ζ^{f_{J,h}(ξ)} q^{⟨u,v_{J,h}⟩} Π_{i∈J} 1/(1-ζ^{d_i} q^{⟨u,v_i⟩})`,
/// truncated after `q^prec`, in `ς = ζ^{1/M}`.
pub fn local_b_term(
    model: &ToricModel,
    d: &[Q],
    j: &[usize],
    u: &[i64],
    prec: i64,
    big_m: u64,
) -> Result<QSeries<Zeta>> {
    let n = model.rank();
    let cone = model.cone(j);
    let m: Vec<i64> = cone.vs.iter().map(|v| pair(u, v)).collect();
    let mut total = QSeries::zero(1).with_prec(prec);
    for h in &cone.group.elements {
        let s = pair(u, &h.v);
        let extra = (-s).max(0);
        let mut fexp = Q::zero();
        let mut acc = QSeries::constant(1, Zeta::int(1));
        for (p, &i) in j.iter().enumerate() {
            fexp += &d[i] * &h.f[p];
            acc = acc.mul(&geometric_inverse(&d[i], m[p], big_m, prec + extra)?);
        }
        total = total.add(&acc.scale_c(&zeta_pow(&fexp, big_m)?).shift(s).with_prec(prec));
    }
    if (n - j.len()) % 2 == 1 {
        total = total.neg();
    }
    Ok(total)
}

/// `c_u = Σ_J deg(Δ_J) b_J(-u)`.
pub fn char_coefficient(
    model: &ToricModel,
    d: &[Q],
    degrees: &BTreeMap<Vec<usize>, i64>,
    u: &[i64],
    prec: i64,
    big_m: u64,
) -> Result<QSeries<Zeta>> {
    let mut c = QSeries::zero(1).with_prec(prec);
    for j in &model.fan.simplices {
        let dg = degrees[j];
        if dg == 0 {
            continue;
        }
        c = c.add(&local_b_term(model, d, j, u, prec, big_m)?.scale_c(&Zeta::int(dg)));
    }
    Ok(c)
}

/// `φ̂_st = Σ_u t^{-u} c_u` on a window `max |u| ≤ R`, each `c_u` exact mod
/// `q^{N+1}` over `Q(ς)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GenusSeries {
    pub rank: usize,
    pub big_m: u64,
    pub prec: i64,
    pub radius: i64,
    /// Nonzero coefficients only.
    pub coeffs: BTreeMap<Vec<i64>, QSeries<Zeta>>,
}

impl GenusSeries {
    pub fn coefficient(&self, u: &[i64]) -> QSeries<Zeta> {
        self.coeffs.get(u).cloned().unwrap_or_else(|| QSeries::zero(1).with_prec(self.prec))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn has_integral_exponents(&self) -> bool {
        self.coeffs.values().all(|c| c.r == 1 || c.has_integral_exponents())
    }

    /// Re-expresses every coefficient in `ς' = ζ^{1/M'}`, `M | M'`.
    pub fn lift(&self, m2: u64) -> GenusSeries {
        assert!(m2 % self.big_m == 0, "ζ-root order {} does not divide {m2}", self.big_m);
        let k = m2 / self.big_m;
        GenusSeries {
            big_m: m2,
            coeffs: self.coeffs.iter().map(|(u, c)| (u.clone(), c.map(|z| z.lift_root(k)))).collect(),
            ..self.clone()
        }
    }

    /// Coefficientwise exact comparison over the common window and
    /// precision, after lifting to a common `ς`.
    pub fn agrees_with(&self, o: &GenusSeries) -> Vec<Vec<i64>> {
        let m = lcm(self.big_m, o.big_m);
        let (a, b) = (self.lift(m), o.lift(m));
        let prec = a.prec.min(b.prec);
        let r = a.radius.min(b.radius);
        let keys: BTreeSet<&Vec<i64>> = a.coeffs.keys().chain(b.coeffs.keys()).collect();
        keys.into_iter()
            .filter(|u| max_norm(u) <= r)
            .filter(|u| !a.coefficient(u).sub(&b.coefficient(u)).with_prec(prec).is_zero())
            .cloned()
            .collect()
    }

    /// Numeric value `Σ_u e^{-2πi⟨u,w⟩} c_u(ζ, q)`.
    pub fn eval(&self, w: &[Complex64], tau: Complex64, sigma: Complex64) -> Complex64 {
        let s = e2pi(sigma / self.big_m as f64);
        let qv = e2pi(tau);
        let mut acc = Complex64::zero();
        for (u, c) in &self.coeffs {
            let uw: Complex64 = u.iter().zip(w).map(|(a, b)| b * *a as f64).sum();
            let mut v = Complex64::zero();
            for (&e, z) in &c.terms {
                v += z.eval(s) * qv.powi(e as i32);
            }
            acc += e2pi(-uw) * v;
        }
        acc
    }

    /// `Σ_u t^{-⟨u,v⟩} c_u` as a series in `t` and `q`.
    pub fn along(&self, v: &[Z], r: i64, tmax: i64) -> BiSeries {
        let mut out = BiSeries::new(r, tmax, self.prec * r);
        for (u, c) in &self.coeffs {
            let te = -pair(u, v);
            for (&e, z) in &c.terms {
                out.add_term(te, e * r, CycZeta::from_zeta(1, z.clone()));
            }
        }
        out
    }

    /// `"u=(..) q^{e}: coefficient"` lines, sorted.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (u, c) in &self.coeffs {
            for (e, z) in &c.terms {
                let us: Vec<String> = u.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("u=({}) q^{{{e}}}: {z}\n", us.join(",")));
            }
        }
        s
    }
}

/// The character formula on the window `max |u| ≤ R`; coefficients on the
/// boundary shell must vanish mod `q^{N+1}` or `WindowTooSmall` is raised.
pub fn genus_char_formula(model: &ToricModel, d: &[Q], radius: i64, prec: i64) -> Result<GenusSeries> {
    genus_char_formula_with(model, d, radius, prec, zeta_order(model, d))
}

pub fn genus_char_formula_with(model: &ToricModel, d: &[Q], radius: i64, prec: i64, big_m: u64) -> Result<GenusSeries> {
    if radius < 1 || prec < 0 {
        return Err(Error::InvalidInput(format!("window R = {radius} and N = {prec} need R ≥ 1, N ≥ 0")));
    }
    let degrees = check_complete(model)?;
    let us = window(model.rank(), radius);
    let cs: Vec<Result<QSeries<Zeta>>> =
        crate::pool().install(|| us.par_iter().map(|u| char_coefficient(model, d, &degrees, u, prec, big_m)).collect());
    let mut coeffs = BTreeMap::new();
    let mut shell = Vec::new();
    for (u, c) in us.into_iter().zip(cs) {
        let c = c?;
        if c.is_zero() {
            continue;
        }
        if max_norm(&u) == radius {
            shell.push(u.clone());
        }
        coeffs.insert(u, c);
    }
    if !shell.is_empty() {
        return Err(Error::WindowTooSmall(format!(
            "R = {radius}: {} boundary coefficient(s) nonzero, e.g. u = {:?}",
            shell.len(),
            shell[0]
        )));
    }
    Ok(GenusSeries { rank: model.rank(), big_m, prec, radius, coeffs })
}

/// Doubles the window from `r0` until the boundary shell vanishes or the
/// radius would exceed `rmax`.
pub fn genus_char_formula_auto(model: &ToricModel, d: &[Q], r0: i64, prec: i64, rmax: i64) -> Result<GenusSeries> {
    let big_m = zeta_order(model, d);
    let mut r = r0.max(1);
    loop {
        match genus_char_formula_with(model, d, r, prec, big_m) {
            Err(Error::WindowTooSmall(msg)) => {
                if 2 * r > rmax {
                    return Err(Error::WindowTooSmall(msg));
                }
                r *= 2;
            }
            other => return other,
        }
    }
}

// ---------------------------------------------------------------------------
// definition-side expansion along v

/// `Σ c_{a,e} t^a q^{e/r}` with `a ≤ tmax` and `e ≤ qmax`; exponents in `t`
/// are bounded below.
#[derive(Debug, Clone, PartialEq)]
pub struct BiSeries {
    pub r: i64,
    pub tmax: i64,
    pub qmax: i64,
    pub terms: BTreeMap<(i64, i64), CycZeta>,
}

impl BiSeries {
    pub fn new(r: i64, tmax: i64, qmax: i64) -> Self {
        BiSeries { r, tmax, qmax, terms: BTreeMap::new() }
    }

    pub fn add_term(&mut self, t: i64, e: i64, c: CycZeta) {
        if t > self.tmax || e > self.qmax || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&(t, e)) {
            Some(v) => {
                let s = v.add(&c);
                if s.is_zero() {
                    self.terms.remove(&(t, e));
                } else {
                    *v = s;
                }
            }
            None => {
                self.terms.insert((t, e), c);
            }
        }
    }

    pub fn add_assign(&mut self, o: &BiSeries) {
        for (&(t, e), c) in &o.terms {
            self.add_term(t, e, c.clone());
        }
    }

    pub fn mul(&self, o: &BiSeries, tmax: i64) -> BiSeries {
        let mut out = BiSeries::new(self.r, tmax, self.qmax.min(o.qmax));
        for (&(ta, ea), ca) in &self.terms {
            for (&(tb, eb), cb) in &o.terms {
                out.add_term(ta + tb, ea + eb, ca.mul(cb));
            }
        }
        out
    }

    pub fn scale(&self, c: &CycZeta) -> BiSeries {
        let mut out = BiSeries::new(self.r, self.tmax, self.qmax);
        for (&(t, e), x) in &self.terms {
            out.add_term(t, e, x.mul(c));
        }
        out
    }

    /// Number of terms whose `q`-exponent is not an integer.
    pub fn fractional_terms(&self) -> usize {
        self.terms.keys().filter(|(_, e)| e % self.r != 0).count()
    }

    pub fn min_t(&self) -> Option<i64> {
        self.terms.keys().map(|(t, _)| *t).min()
    }

    /// Terms of `self - o` in the common range.
    pub fn difference(&self, o: &BiSeries) -> Vec<(i64, i64)> {
        let tmax = self.tmax.min(o.tmax);
        let qmax = self.qmax.min(o.qmax);
        let keys: BTreeSet<&(i64, i64)> = self.terms.keys().chain(o.terms.keys()).collect();
        let zero = CycZeta::scalar(1, q(0));
        keys.into_iter()
            .filter(|(t, e)| *t <= tmax && *e <= qmax)
            .filter(|k| !cz_eq(self.terms.get(k).unwrap_or(&zero), o.terms.get(k).unwrap_or(&zero)))
            .cloned()
            .collect()
    }
}

/// How fractional powers of `q` behaved in the definition-side expansion.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct IntegralityTrace {
    /// `(I, h₁, h₂)` products formed.
    pub pieces: usize,
    /// Pieces carrying at least one fractional `q`-exponent.
    pub fractional_pieces: usize,
    /// Fractional terms summed over all pieces.
    pub fractional_terms: usize,
    /// Fractional terms left after the full sum.
    pub fractional_after_sum: usize,
    /// The full sum has no `ω` (group character) components left.
    pub omega_free: bool,
}

/// Smallest exponent of `q` (in units `1/r`) in the `m`-th term of the
/// expansion of `φ_st(lz + fτ + w)`.
fn min_q(l: i64, f_r: i64, r: i64, m: i64) -> i64 {
    if m == 0 {
        0
    } else if f_r > 0 {
        if m > 0 {
            f_r * m
        } else {
            -m * (r - f_r)
        }
    } else if (l > 0) == (m > 0) {
        0
    } else {
        m.abs() * r
    }
}

fn factor_low(l: i64, f_r: i64, r: i64, qmax: i64) -> i64 {
    let dir = -l.signum();
    let mut lo = 0;
    let mut k = 1;
    while min_q(l, f_r, r, dir * k) <= qmax {
        lo = lo.min(l * dir * k);
        k += 1;
    }
    lo
}

/// `φ_st(lz + fτ + w, τ, dσ)` with `α = e^{2πiw} = ω_r^a` as a series in
/// `t, q^{1/r}`:
/// `Σ α^m t^{lm} q^{fm}/(1-ζ^d q^m)` for `f > 0`, and for `f = 0` the same
/// sum with `1/(1-ζ^d q^m) - 1` in place of the fraction when `l < 0`.
fn along_factor(l: i64, f_r: i64, a: i64, d: &Q, r: i64, qmax: i64, tcap: i64, big_m: u64) -> Result<BiSeries> {
    let mut out = BiSeries::new(r, tcap, qmax);
    let mut push = |m: i64| -> Result<bool> {
        let te = l * m;
        if te > tcap || min_q(l, f_r, r, m) > qmax {
            return Ok(false);
        }
        let shift = if f_r > 0 { f_r * m } else { 0 };
        let extra = (-shift).max(0);
        let mut g = geometric_inverse(d, m, big_m, (qmax + extra) / r + 1)?.regrade(r);
        if f_r == 0 && l < 0 {
            g = g.sub(&QSeries::constant(r, Zeta::int(1)));
        }
        let alpha = CycZeta::root(r as u64, a * m);
        for (&e, c) in &g.shift(shift).terms {
            out.add_term(te, e, alpha.mul_zeta(c));
        }
        Ok(true)
    };
    push(0)?;
    for dir in [1, -1] {
        let mut k = 1;
        while push(dir * k)? {
            k += 1;
        }
    }
    Ok(out)
}

/// Exact expansion of `φ̂^v_st` from its definition, term by term through
/// the `q^{1/r}`-graded pieces, for a generic `v ∈ L_V`.  Exact for all
/// `t`-exponents `≤ tmax` and `q`-exponents `≤ N`.
pub fn genus_along_v_series(
    model: &ToricModel,
    d: &[Q],
    v: &[Z],
    prec: i64,
    tmax: i64,
    big_m: u64,
) -> Result<(BiSeries, IntegralityTrace)> {
    let r = model.group_exponent_lcm() as i64;
    let qmax = prec * r;
    let mut total = BiSeries::new(r, tmax, qmax);
    let mut trace = IntegralityTrace::default();
    for c in &model.fan.maximal {
        let cone = model.cone(&c.verts);
        let mut ls = Vec::new();
        for u in &cone.dual {
            let p = dot_qz(u, v);
            if !is_integer(&p) || p.is_zero() {
                return Err(Error::UnsupportedRegime(format!(
                    "⟨u_i^I, v⟩ = {p} for I = {:?}: v must be generic and lie in L_V",
                    c.verts
                )));
            }
            ls.push(-to_i64(&p.to_integer()));
        }
        let mut per_cone = BiSeries::new(r, tmax, qmax);
        for h1 in &cone.group.elements {
            let f_r: Vec<i64> = h1.f.iter().map(|f| exponent(f, r as u64)).collect::<Result<_>>()?;
            let lows: Vec<i64> = (0..ls.len()).map(|p| factor_low(ls[p], f_r[p], r, qmax)).collect();
            let fexp = c.verts.iter().enumerate().fold(Q::zero(), |acc, (p, &i)| acc + &d[i] * &h1.f[p]);
            let pre = CycZeta::from_zeta(1, zeta_pow(&fexp, big_m)?);
            for h2 in &cone.group.elements {
                let mut piece = BiSeries::new(r, tmax, qmax);
                piece.add_term(0, 0, pre.clone());
                for (p, &i) in c.verts.iter().enumerate() {
                    let others: i64 = lows.iter().enumerate().filter(|(x, _)| *x != p).map(|(_, l)| l).sum();
                    let a = -exponent(&h2.f[p], r as u64)?;
                    let fac = along_factor(ls[p], f_r[p], a, &d[i], r, qmax, tmax - others, big_m)?;
                    // later factors can still lower the t-degree
                    let later: i64 = lows[p + 1..].iter().sum();
                    piece = piece.mul(&fac, tmax - later);
                }
                trace.pieces += 1;
                let fr = piece.fractional_terms();
                if fr > 0 {
                    trace.fractional_pieces += 1;
                    trace.fractional_terms += fr;
                }
                per_cone.add_assign(&piece);
            }
        }
        let s = Q::new(c.weight().into(), (cone.order() as i64).into());
        total.add_assign(&per_cone.scale(&CycZeta::scalar(1, s)));
    }
    trace.fractional_after_sum = total.fractional_terms();
    trace.omega_free = total.terms.values().all(|c| c.as_zeta().is_some());
    Ok((total, trace))
}

// ---------------------------------------------------------------------------
// class jets

/// `ι_I^*(Ê_st)` as a polynomial jet in `y_1..y_n` up to total degree
/// `deg`, with integral `q`-exponents up to `prec`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassJet {
    pub cone: Vec<usize>,
    pub deg: u32,
    pub prec: i64,
    pub terms: BTreeMap<i64, Poly<CycZeta>>,
}

impl ClassJet {
    pub fn coefficient(&self, e: i64, n: usize) -> Poly<CycZeta> {
        self.terms.get(&e).cloned().unwrap_or_else(|| Poly::zero(n))
    }
}

type JetSeries = BTreeMap<i64, Poly<CycZeta>>;

fn jet_mul(a: &JetSeries, b: &JetSeries, qmax: i64, deg: u32) -> JetSeries {
    let mut out: JetSeries = BTreeMap::new();
    for (&ea, pa) in a {
        for (&eb, pb) in b {
            if ea + eb > qmax {
                break;
            }
            let p = pa.mul_filtered(pb, |e| e.iter().sum::<u32>() <= deg);
            jet_add_term(&mut out, ea + eb, &p);
        }
    }
    out
}

fn jet_add_term(acc: &mut JetSeries, e: i64, p: &Poly<CycZeta>) {
    let s = match acc.get(&e) {
        Some(x) => x.add(p),
        None => p.clone(),
    };
    let s = s.filter(|_| true);
    let s = Poly { nvars: s.nvars, terms: s.terms.into_iter().filter(|(_, c)| !c.is_zero()).collect() };
    if s.is_zero() {
        acc.remove(&e);
    } else {
        acc.insert(e, s);
    }
}

fn cz(z: Zeta) -> CycZeta {
    CycZeta::from_zeta(1, z)
}

/// `x (1 - ζ^d α e^{-x}) / ((1 - ζ^d)(1 - α e^{-x}))` as a jet in `x`;
/// for `α = 1` the Bernoulli factor `x/(1-e^{-x})` is split off.
fn lead_at_zero(zk: i64, alpha: &CycZeta, alpha_trivial: bool, deg: u32) -> Result<Jet1> {
    let e = Jet1::exp_linear(&q(-1), deg);
    let zd = cz(Zeta::monomial(q(1), zk));
    let scale = |j: &Jet1, c: &CycZeta| Jet1::from_coeffs(j.deg, j.c.iter().map(|x| x.mul(c)).collect());
    let num = Jet1::cone().csub(&scale(&e, &zd.mul(alpha)));
    let inv = Jet1::constant(cz(Zeta::inv_one_minus(zk)?));
    if alpha_trivial {
        let mut c = Vec::with_capacity(deg as usize + 1);
        let mut fact = Q::from_integer(1.into());
        for k in 0..=deg {
            fact *= Q::from_integer((k + 1).into());
            let sign = if k % 2 == 0 { q(1) } else { q(-1) };
            c.push(CycZeta::scalar(1, sign / &fact));
        }
        let bern = Jet1::from_coeffs(deg, c).inverse(deg)?;
        Ok(bern.cmul(&num).cmul(&inv))
    } else {
        let den = Jet1::cone().csub(&scale(&e, alpha));
        Ok(den.inverse(deg)?.cmul(&num).cmul(&inv).shift_up(1))
    }
}

/// `x ζ^{df} φ_st(-x/(2πi) + fτ - g, τ, dσ)` as a `q^{1/r}`-series of jets
/// in `x`, with `f = f_r/r` and `e^{-2πig} = ω_r^a`.
fn class_factor(d: &Q, f_r: i64, a: i64, r: i64, qmax: i64, deg: u32, big_m: u64) -> Result<QSeries<Jet1>> {
    let zk = exponent(d, big_m)?;
    let ru = r as u64;
    let x_pow = move |m: i64| -> Jet1 {
        let e = Jet1::exp_linear(&q(-m), deg);
        let al = CycZeta::root(ru, a * m);
        Jet1::from_coeffs(deg, e.c.iter().map(|c| c.mul(&al)).collect())
    };
    let zeta_pow_fn = move |j: i64| Jet1::constant(cz(Zeta::monomial(q(1), zk * j)));
    let data = PhiData { x_pow: &x_pow, zeta_pow: &zeta_pow_fn };
    let prod = phi_st_product(&data, f_r, r, qmax)?;
    let lead = if f_r > 0 {
        let inv = Jet1::constant(cz(Zeta::inv_one_minus(zk)?));
        phi_st_lead(&data, &inv, f_r, r, qmax)?.map(|j| Jet1::from_coeffs(deg, j.shift_up(1).c))
    } else {
        let alpha = CycZeta::root(ru, a);
        QSeries::constant(r, lead_at_zero(zk, &alpha, a.rem_euclid(r) == 0, deg)?)
    };
    let pre = Jet1::constant(cz(zeta_pow(&(d * Q::new(f_r.into(), r.into())), big_m)?));
    Ok(lead.mul(&prod).scale_c(&pre).with_prec(qmax))
}

fn substitute_jet(s: &QSeries<Jet1>, form: &[Q], n: usize, deg: u32) -> JetSeries {
    let lin: Poly<Q> = Poly::linear(form);
    let mut pw: Vec<Poly<Q>> = vec![Poly::one(n)];
    for k in 1..=deg as usize {
        pw.push(pw[k - 1].mul(&lin));
    }
    let pwc: Vec<Poly<CycZeta>> = pw.iter().map(|p| p.to_coeff()).collect();
    let mut out = BTreeMap::new();
    for (&e, j) in &s.terms {
        let mut p = Poly::zero(n);
        for (k, c) in j.c.iter().enumerate().take(deg as usize + 1) {
            if !c.is_zero() {
                p = p.add(&pwc[k].scale_c(c));
            }
        }
        if !p.is_zero() {
            out.insert(e, p);
        }
    }
    out
}

/// `ι_I^*(Ê_st(Δ, V, ξ))` to total degree `deg` and `q`-order `prec`.
pub fn class_restriction_jet(
    model: &ToricModel,
    d: &[Q],
    verts: &[usize],
    deg: u32,
    prec: i64,
    big_m: u64,
) -> Result<ClassJet> {
    let n = model.rank();
    let cone = model.cone(verts);
    let r = cone.order() as i64;
    let qmax = prec * r;
    let mut factors: BTreeMap<(usize, i64, i64), JetSeries> = BTreeMap::new();
    let mut sum: JetSeries = BTreeMap::new();
    for h1 in &cone.group.elements {
        for h2 in &cone.group.elements {
            let mut piece: JetSeries = BTreeMap::from([(0, Poly::one(n))]);
            for (p, &i) in verts.iter().enumerate() {
                let f_r = exponent(&h1.f[p], r as u64)?;
                let a = -exponent(&h2.f[p], r as u64)?;
                let key = (p, f_r, a.rem_euclid(r));
                if !factors.contains_key(&key) {
                    let s = class_factor(&d[i], f_r, a, r, qmax, deg, big_m)?;
                    factors.insert(key, substitute_jet(&s, &cone.dual[p], n, deg));
                }
                piece = jet_mul(&piece, &factors[&key], qmax, deg);
            }
            for (e, p) in &piece {
                jet_add_term(&mut sum, *e, p);
            }
        }
    }
    let mut terms = BTreeMap::new();
    for (e, p) in sum {
        if e % r != 0 {
            return Err(Error::Integrality(format!("q^({e}/{r}) in the class jet of {verts:?}")));
        }
        terms.insert(e / r, p);
    }
    Ok(ClassJet { cone: verts.to_vec(), deg, prec, terms })
}

/// Class jets for every distinct maximal vertex set.
pub fn class_jets(
    model: &ToricModel,
    d: &[Q],
    deg: u32,
    prec: i64,
    big_m: u64,
) -> Result<BTreeMap<Vec<usize>, ClassJet>> {
    let keys: BTreeSet<Vec<usize>> = model.fan.maximal.iter().map(|c| c.verts.clone()).collect();
    let keys: Vec<Vec<usize>> = keys.into_iter().collect();
    let jets: Vec<Result<ClassJet>> = crate::pool()
        .install(|| keys.par_iter().map(|k| class_restriction_jet(model, d, k, deg, prec, big_m)).collect());
    keys.into_iter().zip(jets).map(|(k, j)| Ok((k, j?))).collect()
}

/// Per `q`-exponent, a polynomial in `y` of degree `≤ deg`.
pub type CohomSeries = BTreeMap<i64, Poly<CycZeta>>;

/// `ε̂_st = π_*(Ê_st)` to degree `D` and `q`-order `N`, from class jets
/// carried to degree `D + n`.
pub fn epsilon_genus(model: &ToricModel, d: &[Q], deg: u32, prec: i64, big_m: u64) -> Result<CohomSeries> {
    check_complete(model)?;
    let n = model.rank();
    let jd = deg + n as u32;
    let jets = class_jets(model, d, jd, prec, big_m)?;
    let mut out = BTreeMap::new();
    for e in 0..=prec {
        let mut total: Poly<CycZeta> = Poly::zero(n);
        for hd in n as u32..=jd {
            let tuple: BTreeMap<Vec<usize>, Poly<CycZeta>> =
                jets.iter().map(|(k, j)| (k.clone(), j.coefficient(e, n).homogeneous_part(hd, n))).collect();
            total = total.add(&sr_ring::pushforward_tuple(model, &tuple, n)?.into_polynomial()?);
        }
        if !total.is_zero() {
            out.insert(e, total);
        }
    }
    Ok(out)
}

/// `ch(φ̂_st) = Σ_u c_u e^{-u}` to degree `deg`.
pub fn ch_of_series(series: &GenusSeries, deg: u32) -> CohomSeries {
    let n = series.rank;
    let mut out: CohomSeries = BTreeMap::new();
    for (u, c) in &series.coeffs {
        let form: Vec<Q> = u.iter().map(|&x| q(-x)).collect();
        let lin: Poly<Q> = Poly::linear(&form);
        let mut e = Poly::one(n);
        let mut pw = Poly::one(n);
        let mut fact = Q::from_integer(1.into());
        for k in 1..=deg {
            pw = pw.mul(&lin);
            fact *= Q::from_integer(k.into());
            e = e.add(&pw.scale(&fact.recip()));
        }
        let ec: Poly<CycZeta> = e.to_coeff();
        for (&qe, z) in &c.terms {
            jet_add_term(&mut out, qe, &ec.scale_c(&cz(z.clone())));
        }
    }
    out
}

/// Keys where two cohomology series differ, up to `prec`.
pub fn cohom_difference(a: &CohomSeries, b: &CohomSeries, n: usize, prec: i64) -> Vec<i64> {
    let keys: BTreeSet<i64> = a.keys().chain(b.keys()).copied().filter(|&e| e <= prec).collect();
    keys.into_iter()
        .filter(|e| {
            let pa = a.get(e).cloned().unwrap_or_else(|| Poly::zero(n));
            let pb = b.get(e).cloned().unwrap_or_else(|| Poly::zero(n));
            !poly_eq(&pa, &pb)
        })
        .collect()
}

fn lift_cohom(a: &CohomSeries, k: u64) -> CohomSeries {
    a.iter()
        .map(|(&e, p)| {
            (e, p.map_coeffs(|c| CycZeta { m: c.m, coeffs: c.coeffs.iter().map(|z| z.lift_root(k)).collect() }))
        })
        .collect()
}

// ---------------------------------------------------------------------------
// reports and samples

#[derive(Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

/// `{ "check", "status", "max_error", "details" }`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub check: String,
    pub status: Status,
    pub max_error: f64,
    pub details: serde_json::Value,
}

impl Report {
    fn new(check: &str, ok: bool, max_error: f64, details: serde_json::Value) -> Self {
        Report { check: check.into(), status: if ok { Status::Pass } else { Status::Fail }, max_error, details }
    }

    fn failed_with(check: &str, e: &Error) -> Self {
        Report::new(check, false, f64::INFINITY, json!({ "error": e.to_string() }))
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Evaluation point `(w, τ, σ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub w: Vec<Complex64>,
    pub tau: Complex64,
    pub sigma: Complex64,
}

impl Sample {
    fn describe(&self) -> serde_json::Value {
        let c = |z: &Complex64| format!("{}{:+}i", z.re, z.im);
        json!({ "w": self.w.iter().map(c).collect::<Vec<_>>(), "tau": c(&self.tau), "sigma": c(&self.sigma) })
    }
}

/// Deterministic sample points: `w` near the real torus, `Im τ ∈ [0.9, 1.4]`,
/// `σ` with real part in `[0.05, 0.45]`.
pub fn sample_points(rank: usize, count: usize, seed: u64) -> Vec<Sample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| Sample {
            w: (0..rank).map(|_| Complex64::new(rng.gen_range(-0.45..0.45), rng.gen_range(-0.05..0.05))).collect(),
            tau: Complex64::new(rng.gen_range(-0.3..0.3), rng.gen_range(0.9..1.4)),
            sigma: Complex64::new(rng.gen_range(0.05..0.45), rng.gen_range(-0.05..0.05)),
        })
        .collect()
}

/// `tol` widened to ten times the certified truncation bound.
fn effective_tol(tol: f64, bound: f64) -> f64 {
    tol.max(10.0 * bound)
}

// ---------------------------------------------------------------------------
// local and global invariance

/// `Σ_{ρ(J′)=J} b_{J′}(Δ′, V′, ξ′) - b_J(Δ, V, ξ)` at `-u`, `ξ′ = ρ^*ξ`.
pub fn bn_defect(rho: &BirationalMorphism, d: &[Q], j: &[usize], u: &[i64], prec: i64) -> Result<QSeries<Zeta>> {
    let d2 = rho.pullback_divisor(d);
    let big_m = lcm(zeta_order(&rho.source, &d2), zeta_order(&rho.target, d));
    let mut acc = local_b_term(&rho.target, d, j, u, prec, big_m)?.neg();
    for (s, t) in &rho.rho {
        if t.as_slice() == j {
            acc = acc.add(&local_b_term(&rho.source, &d2, s, u, prec, big_m)?);
        }
    }
    Ok(acc.with_prec(prec))
}

/// The local identity `B_n` at one target face and one `u`.
pub fn check_bn(rho: &BirationalMorphism, d: &[Q], j: &[usize], u: &[i64], prec: i64) -> Result<bool> {
    Ok(bn_defect(rho, d, j, u, prec)?.is_zero())
}

/// Global invariance under `ρ`: completeness of `Δ′`, numeric equality at
/// the samples, and optionally exact equality of `c_u` on a window.
pub fn check_invariance(
    rho: &BirationalMorphism,
    d: &[Q],
    samples: &[Sample],
    k: usize,
    tol: f64,
    exact: Option<(i64, i64)>,
) -> Report {
    const NAME: &str = "invariance";
    let d2 = rho.pullback_divisor(d);
    let source_complete = rho.source.fan.is_complete();
    let target_complete = rho.target.fan.is_complete();
    let mut ok = source_complete && target_complete && rho.validate().is_empty();
    let mut max_err: f64 = 0.0;
    let mut rows = Vec::new();
    for s in samples {
        let a = genus_numeric(&rho.source, &d2, &s.w, s.tau, s.sigma, k);
        let b = genus_numeric(&rho.target, d, &s.w, s.tau, s.sigma, k);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let err = (a.value - b.value).norm();
                let t = effective_tol(tol, a.bound + b.bound);
                ok &= err <= t;
                max_err = max_err.max(err);
                rows.push(json!({ "sample": s.describe(), "error": err, "tol": t }));
            }
            (a, b) => {
                ok = false;
                let e = a.err().or(b.err()).unwrap();
                rows.push(json!({ "sample": s.describe(), "error": e.to_string() }));
            }
        }
    }
    let mut mismatched = Vec::new();
    let mut exact_err = None;
    if let Some((radius, prec)) = exact {
        let big_m = lcm(zeta_order(&rho.source, &d2), zeta_order(&rho.target, d));
        let run = || -> Result<Vec<Vec<i64>>> {
            let da = rho.source.fan.degree_table()?;
            let db = rho.target.fan.degree_table()?;
            let mut bad = Vec::new();
            for u in window(rho.target.rank(), radius) {
                let a = char_coefficient(&rho.source, &d2, &da, &u, prec, big_m)?;
                let b = char_coefficient(&rho.target, d, &db, &u, prec, big_m)?;
                if !a.sub(&b).is_zero() {
                    bad.push(u);
                }
            }
            Ok(bad)
        };
        match run() {
            Ok(bad) => mismatched = bad,
            Err(e) => exact_err = Some(e.to_string()),
        }
        ok &= mismatched.is_empty() && exact_err.is_none();
    }
    Report::new(
        NAME,
        ok,
        max_err,
        json!({
            "source_complete": source_complete,
            "target_complete": target_complete,
            "samples": rows,
            "exact_window": exact.map(|(r, n)| json!({ "R": r, "N": n, "mismatched": mismatched, "error": exact_err })),
        }),
    )
}

// ---------------------------------------------------------------------------
// rigidity and vanishing

/// A certificate `ξ = Nη + u` with `η` integral and `u ∈ L_V* ⊗ Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidityHypothesis {
    pub n: i64,
    pub eta: Vec<Q>,
    pub u: Vec<Q>,
}

impl RigidityHypothesis {
    /// Checks `N > 1`, integrality and T-Cartierness of `η`, and that
    /// `d_i = N η_i + ⟨u, v_i⟩` for every ray.
    pub fn verify(&self, model: &ToricModel, d: &[Q]) -> Result<()> {
        if self.n <= 1 {
            return Err(Error::InvalidInput(format!("N = {} must exceed 1", self.n)));
        }
        let m = model.fan.num_rays();
        if self.eta.len() != m || d.len() != m || self.u.len() != model.rank() {
            return Err(Error::InvalidInput("hypothesis has the wrong shape".into()));
        }
        if !self.eta.iter().all(is_integer) {
            return Err(Error::InvalidInput("η must be an integral class".into()));
        }
        if !sr_ring::is_t_cartier(model, &self.eta) {
            return Err(Error::InvalidInput("η is not T-Cartier".into()));
        }
        for i in 0..m {
            let rhs = q(self.n) * &self.eta[i] + dot_qz(&self.u, &model.edge_vector(i));
            if rhs != d[i] {
                return Err(Error::InvalidInput(format!("d_{} = {} but Nη + u gives {rhs}", i + 1, d[i])));
            }
        }
        Ok(())
    }

    /// `ξ ∉ N·H_T²(Δ, V)`: some `d_i` is not in `NZ`.
    pub fn vanishing_expected(&self, d: &[Q]) -> bool {
        d.iter().any(|x| !is_integer(&(x / q(self.n))))
    }
}

/// Evaluates at `σ = k/N` over the sample `w`'s and reports the spread
/// (rigidity) and the maximal modulus (vanishing when expected).
pub fn check_rigidity(
    model: &ToricModel,
    d: &[Q],
    hyp: &RigidityHypothesis,
    k: i64,
    samples: &[Sample],
    terms: usize,
    tol: f64,
) -> Result<Report> {
    hyp.verify(model, d)?;
    if k <= 0 || k >= hyp.n {
        return Err(Error::InvalidInput(format!("k = {k} must satisfy 0 < k < N = {}", hyp.n)));
    }
    check_complete(model)?;
    let sigma = Complex64::new(k as f64 / hyp.n as f64, 0.0);
    let mut values = Vec::new();
    let mut bound: f64 = 0.0;
    for s in samples {
        let b = genus_numeric(model, d, &s.w, s.tau, sigma, terms)?;
        bound = bound.max(b.bound);
        values.push(b.value);
    }
    let mean = values.iter().sum::<Complex64>() / values.len().max(1) as f64;
    let spread = values.iter().map(|v| (v - mean).norm()).fold(0.0, f64::max);
    let modulus = values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let vanish = hyp.vanishing_expected(d);
    let t = effective_tol(tol, bound);
    let ok = spread <= t && (!vanish || modulus <= t);
    Ok(Report::new(
        "rigidity",
        ok,
        if vanish { spread.max(modulus) } else { spread },
        json!({
            "N": hyp.n,
            "k": k,
            "outside_stated_range": k == 1,
            "vanishing_expected": vanish,
            "spread": spread,
            "max_modulus": modulus,
            "mean": format!("{}{:+}i", mean.re, mean.im),
            "tol": t,
        }),
    ))
}

/// `ξ = embed_linear(u)` gives a genus that vanishes identically; checked
/// numerically at the samples and, optionally, exactly on a window.
pub fn check_vanishing(
    model: &ToricModel,
    u: &[Q],
    samples: &[Sample],
    terms: usize,
    tol: f64,
    exact: Option<(i64, i64)>,
) -> Result<Report> {
    const NAME: &str = "vanishing";
    if u.len() != model.rank() {
        return Err(Error::InvalidInput("u has the wrong dimension".into()));
    }
    if u.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidInput("u must be non-zero".into()));
    }
    check_complete(model)?;
    let d: Vec<Q> = (0..model.fan.num_rays()).map(|i| dot_qz(u, &model.edge_vector(i))).collect();
    let mut ok = true;
    let mut max_err: f64 = 0.0;
    let mut rows = Vec::new();
    for s in samples {
        match genus_numeric(model, &d, &s.w, s.tau, s.sigma, terms) {
            Ok(b) => {
                let t = effective_tol(tol, b.bound);
                ok &= b.value.norm() <= t;
                max_err = max_err.max(b.value.norm());
                rows.push(json!({ "sample": s.describe(), "modulus": b.value.norm() }));
            }
            Err(e) => return Ok(Report::failed_with(NAME, &e)),
        }
    }
    let mut exact_info = serde_json::Value::Null;
    if let Some((radius, prec)) = exact {
        match genus_char_formula(model, &d, radius, prec) {
            Ok(s) => {
                ok &= s.is_zero();
                exact_info = json!({ "R": radius, "N": prec, "nonzero_coefficients": s.coeffs.len() });
            }
            Err(e) => return Ok(Report::failed_with(NAME, &e)),
        }
    }
    Ok(Report::new(NAME, ok, max_err, json!({ "samples": rows, "exact": exact_info })))
}

// ---------------------------------------------------------------------------
// class invariance and π_*, ch cross-checks

/// `ρ_*(Ê_st(Δ′, V′, ρ^*ξ)) = Ê_st(Δ, V, ξ)` on every maximal cone, exact to
/// degree `D` and `q`-order `N`.
pub fn check_class_invariance(rho: &BirationalMorphism, d: &[Q], deg: u32, prec: i64) -> Result<Report> {
    rho.check()?;
    let n = rho.target.rank();
    let d2 = rho.pullback_divisor(d);
    let big_m = lcm(zeta_order(&rho.source, &d2), zeta_order(&rho.target, d));
    let jd = deg + n as u32;
    let src = class_jets(&rho.source, &d2, jd, prec, big_m)?;
    let tgt = class_jets(&rho.target, d, jd, prec, big_m)?;
    let keep = |p: &Poly<CycZeta>| p.filter(|e| e.iter().sum::<u32>() <= deg);
    let mut bad = Vec::new();
    for e in 0..=prec {
        let tuple: BTreeMap<Vec<usize>, Poly<CycZeta>> =
            src.iter().map(|(k, j)| (k.clone(), j.coefficient(e, n))).collect();
        let pushed = rho.pushforward_tuple(&tuple, n)?;
        for (i, j) in &tgt {
            if !poly_eq(&keep(&pushed[i]), &keep(&j.coefficient(e, n))) {
                bad.push(json!({ "cone": i, "q": e }));
            }
        }
    }
    Ok(Report::new(
        "class",
        bad.is_empty(),
        if bad.is_empty() { 0.0 } else { f64::INFINITY },
        json!({ "D": deg, "N": prec, "mismatched": bad }),
    ))
}

/// `π_*(Ê) = ε̂` against `ch(φ̂)` from the character formula, to `(D, N)`.
pub fn check_epsilon_ch(model: &ToricModel, d: &[Q], deg: u32, prec: i64, radius: i64) -> Result<Report> {
    let series = genus_char_formula_auto(model, d, radius, prec, 64)?;
    let big_m = series.big_m;
    let eps = epsilon_genus(model, d, deg, prec, big_m)?;
    let ch = ch_of_series(&series, deg);
    let bad = cohom_difference(&eps, &ch, model.rank(), prec);
    Ok(Report::new(
        "epsilon_ch",
        bad.is_empty(),
        if bad.is_empty() { 0.0 } else { f64::INFINITY },
        json!({ "D": deg, "N": prec, "R": series.radius, "mismatched_q_orders": bad }),
    ))
}

/// Compares two jets series computed with possibly different `ς` orders.
pub fn cohom_agree(a: &CohomSeries, ma: u64, b: &CohomSeries, mb: u64, n: usize, prec: i64) -> bool {
    let m = lcm(ma, mb);
    cohom_difference(&lift_cohom(a, m / ma), &lift_cohom(b, m / mb), n, prec).is_empty()
}

// ---------------------------------------------------------------------------
// triangulations of non-simplicial fans

/// `Σ_{ρ(J′)=F} b_{J′}` for a face `F` of the general fan.
pub fn face_local_sum(
    model: &ToricModel,
    tri: &Triangulation,
    d: &[Q],
    face: &[usize],
    u: &[i64],
    prec: i64,
    big_m: u64,
) -> Result<QSeries<Zeta>> {
    let mut acc = QSeries::zero(1).with_prec(prec);
    for (s, f) in &tri.rho {
        if f.as_slice() == face {
            acc = acc.add(&local_b_term(model, d, s, u, prec, big_m)?);
        }
    }
    Ok(acc)
}

/// Genus independence of the triangulation for a Q-Cartier `ξ`: numeric
/// equality at the samples (complete case) and exact equality of the
/// per-face local sums at each `u`.
#[allow(clippy::too_many_arguments)]
pub fn check_triangulation_independence(
    general: &GeneralFan,
    edges: &EdgeVectors,
    d: &[Q],
    t1: &Triangulation,
    t2: &Triangulation,
    samples: &[Sample],
    terms: usize,
    tol: f64,
    us: &[Vec<i64>],
    prec: i64,
) -> Result<Report> {
    if let Err(bad) = general.qcartier_check(edges, d) {
        return Err(Error::NotQCartier(format!("no u(I) for cones {bad:?}")));
    }
    let m1 = ToricModel::new(t1.fan.clone(), edges.clone())?;
    let m2 = ToricModel::new(t2.fan.clone(), edges.clone())?;
    let mut ok = t1.validate().is_empty() && t2.validate().is_empty();
    let mut max_err: f64 = 0.0;
    let complete = m1.fan.is_complete() && m2.fan.is_complete();
    if complete {
        for s in samples {
            let a = genus_numeric(&m1, d, &s.w, s.tau, s.sigma, terms)?;
            let b = genus_numeric(&m2, d, &s.w, s.tau, s.sigma, terms)?;
            let err = (a.value - b.value).norm();
            ok &= err <= effective_tol(tol, a.bound + b.bound);
            max_err = max_err.max(err);
        }
    }
    let big_m = lcm(zeta_order(&m1, d), zeta_order(&m2, d));
    let mut bad = Vec::new();
    for f in &t1.faces {
        for u in us {
            let a = face_local_sum(&m1, t1, d, f, u, prec, big_m)?;
            let b = face_local_sum(&m2, t2, d, f, u, prec, big_m)?;
            if !a.sub(&b).is_zero() {
                bad.push(json!({ "face": f, "u": u }));
            }
        }
    }
    ok &= bad.is_empty();
    Ok(Report::new(
        "triangulation",
        ok,
        max_err,
        json!({
            "complete": complete,
            "cones": [t1.fan.maximal.len(), t2.fan.maximal.len()],
            "faces_checked": t1.faces.len(),
            "mismatched": bad,
        }),
    ))
}
