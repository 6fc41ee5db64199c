//! Equivariant cohomology `H_T^*(Δ) ⊗ Q` as the Stanley–Reisner ring of
//! the multi-fan, with restrictions to cones and the push-forward to a
//! point.
//!
//! Classes are polynomials in the ray generators `x_i`; restrictions are
//! polynomials in the fixed coordinates `y_1..y_n` of `L* ⊗ Q`.

use crate::arith::{is_integer, Q};
use crate::error::{Error, Result};
use crate::lattice_alg::{rref, solve_right};
use crate::multifan::ToricModel;
use crate::poly::{Coeff, Mono, Poly};
use crate::ratfun::RationalFunctionND;
use num_traits::Zero;
use std::collections::BTreeMap;

pub type SrClass = Poly<Q>;

/// Drops monomials whose support is not a simplex.
pub fn reduce<C: Coeff>(model: &ToricModel, p: &Poly<C>) -> Poly<C> {
    p.filter(|e| {
        let supp: Vec<usize> = e.iter().enumerate().filter(|(_, &x)| x > 0).map(|(i, _)| i).collect();
        model.fan.is_simplex(&supp)
    })
}

/// `u ↦ Σ ⟨u, v_i⟩ x_i`.
pub fn embed_linear(model: &ToricModel, u: &[Q]) -> SrClass {
    let coeffs: Vec<Q> = (0..model.fan.num_rays()).map(|i| crate::arith::dot_qz(u, &model.edge_vector(i))).collect();
    Poly::linear(&coeffs)
}

/// `ξ = Σ d_i x_i`.
pub fn divisor_class(d: &[Q]) -> SrClass {
    Poly::linear(d)
}

/// `u_i^K` as a linear polynomial in `nvars ≥ n` variables.
pub fn dual_form<C: Coeff>(model: &ToricModel, k: &[usize], i: usize, nvars: usize) -> Poly<C> {
    let cone = model.cone(k);
    let pos = cone.pos(i).expect("ray in cone");
    let mut coeffs = cone.dual[pos].clone();
    coeffs.resize(nvars, Q::zero());
    Poly::linear(&coeffs)
}

/// `ι_K^*`: substitutes `x_i ↦ u_i^K` for `i ∈ K` and `x_i ↦ 0` otherwise.
pub fn restrict<C: Coeff>(model: &ToricModel, x: &Poly<C>, k: &[usize], nvars: usize) -> Poly<C> {
    let images: Vec<Poly<C>> = (0..model.fan.num_rays())
        .map(|i| if k.contains(&i) { dual_form(model, k, i, nvars) } else { Poly::zero(nvars) })
        .collect();
    x.substitute(&images, |_| true)
}

/// Restriction of a function on `span C(K)` to `span C(J)`, `J ⊂ K`:
/// composition with the orthogonal projector onto `span C(J)`.
/// Variables beyond the first `n` are left untouched.
pub fn restrict_to_face<C: Coeff>(model: &ToricModel, f: &Poly<C>, j: &[usize]) -> Poly<C> {
    let n = model.rank();
    let p = model.projector(j);
    let nv = f.nvars;
    let images: Vec<Poly<C>> = (0..nv)
        .map(|a| {
            if a < n {
                let mut row: Vec<Q> = (0..n).map(|b| p[b][a].clone()).collect();
                row.resize(nv, Q::zero());
                Poly::linear(&row)
            } else {
                Poly::var(nv, a)
            }
        })
        .collect();
    f.substitute(&images, |_| true)
}

/// `∏_{i∈I} u_i^I` as a list of rational functionals.
pub fn cone_denominator(model: &ToricModel, verts: &[usize]) -> Vec<Vec<Q>> {
    model.cone(verts).dual.clone()
}

/// Restrictions `ι_I^*(x)` for every distinct maximal vertex set.
pub fn tuple_of<C: Coeff>(model: &ToricModel, x: &Poly<C>, nvars: usize) -> BTreeMap<Vec<usize>, Poly<C>> {
    model.fan.maximal.iter().map(|c| (c.verts.clone(), restrict(model, x, &c.verts, nvars))).collect()
}

/// `π_*` applied to a tuple of restrictions:
/// `Σ_I w(I) t_I / (|H_I| ∏ u_i^I)`.
pub fn pushforward_tuple<C: Coeff>(
    model: &ToricModel,
    tuple: &BTreeMap<Vec<usize>, Poly<C>>,
    nvars: usize,
) -> Result<RationalFunctionND<C>> {
    let mut acc = RationalFunctionND::zero(nvars);
    for c in &model.fan.maximal {
        let t = &tuple[&c.verts];
        if t.is_zero() || c.weight() == 0 {
            continue;
        }
        let scale = Q::new(c.weight().into(), (model.cone(&c.verts).order() as i64).into());
        let term = RationalFunctionND::new(t.scale(&scale), &cone_denominator(model, &c.verts))?;
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// `π_*(x)`, in general a rational function; polynomial for complete
/// multi-fans.
pub fn pushforward_point(model: &ToricModel, x: &SrClass) -> Result<RationalFunctionND<Q>> {
    let n = model.rank();
    pushforward_tuple(model, &tuple_of(model, x, n), n)
}

/// `π_*(x)` certified polynomial.
pub fn pushforward_point_poly(model: &ToricModel, x: &SrClass) -> Result<Poly<Q>> {
    pushforward_point(model, x)?.into_polynomial()
}

/// `ξ` is T-Cartier when every `ι_I^*(ξ) = Σ d_i u_i^I` lies in `L*`.
pub fn is_t_cartier(model: &ToricModel, d: &[Q]) -> bool {
    let n = model.rank();
    model.fan.maximal.iter().all(|c| {
        let cone = model.cone(&c.verts);
        (0..n).all(|a| {
            let s = c.verts.iter().enumerate().fold(Q::zero(), |acc, (p, &i)| acc + &d[i] * &cone.dual[p][a]);
            is_integer(&s)
        })
    })
}

/// Checks pairwise agreement of a tuple on intersections of cones.
pub fn check_compatible<C: Coeff>(model: &ToricModel, tuple: &BTreeMap<Vec<usize>, Poly<C>>) -> Result<()> {
    let keys: Vec<&Vec<usize>> = tuple.keys().collect();
    for a in 0..keys.len() {
        for b in a + 1..keys.len() {
            let common: Vec<usize> = keys[a].iter().filter(|i| keys[b].contains(i)).copied().collect();
            let ra = restrict_to_face(model, &tuple[keys[a]], &common);
            let rb = restrict_to_face(model, &tuple[keys[b]], &common);
            if !ra.sub(&rb).terms.values().all(|c| c.cis_zero()) {
                return Err(Error::IncompatibleTuple(format!(
                    "restrictions of {:?} and {:?} differ on {:?}",
                    keys[a], keys[b], common
                )));
            }
        }
    }
    Ok(())
}

/// Exponent vectors of degree `d` in `m` variables with simplex support.
pub fn sr_monomials(model: &ToricModel, d: u32) -> Vec<Vec<u32>> {
    let m = model.fan.num_rays();
    let mut out = Vec::new();
    if d == 0 {
        out.push(vec![0; m]);
        return out;
    }
    for s in &model.fan.simplices {
        if s.is_empty() || s.len() as u32 > d {
            continue;
        }
        for parts in compositions(d, s.len()) {
            let mut e = vec![0u32; m];
            for (p, &i) in s.iter().enumerate() {
                e[i] = parts[p];
            }
            out.push(e);
        }
    }
    out
}

/// Compositions of `d` into `k` positive parts.
fn compositions(d: u32, k: usize) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in 1..=d.saturating_sub(k as u32 - 1) {
        for mut rest in compositions(d - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Recovers the class with the given restrictions (`NotInImage` if none).
pub fn from_tuple(model: &ToricModel, tuple: &BTreeMap<Vec<usize>, Poly<Q>>) -> Result<SrClass> {
    check_compatible(model, tuple)?;
    let n = model.rank();
    let dmax = tuple.values().filter_map(|p| p.total_degree()).max().unwrap_or(0);
    let mut result = Poly::zero(model.fan.num_rays());
    for d in 0..=dmax {
        let monos = sr_monomials(model, d);
        let restricted: Vec<BTreeMap<Vec<usize>, Poly<Q>>> =
            monos.iter().map(|e| tuple_of(model, &Poly::monomial(e.clone(), Q::from_integer(1.into())), n)).collect();
        // Equations indexed by (cone, y-monomial).
        let mut eq_index: BTreeMap<(Vec<usize>, Mono), usize> = BTreeMap::new();
        let mut rhs: Vec<Q> = Vec::new();
        let mut register = |key: (Vec<usize>, Mono), rhs: &mut Vec<Q>| -> usize {
            *eq_index.entry(key).or_insert_with(|| {
                rhs.push(Q::zero());
                rhs.len() - 1
            })
        };
        let mut entries: Vec<(usize, usize, Q)> = Vec::new();
        for (col, r) in restricted.iter().enumerate() {
            for (cone, p) in r {
                for (mono, c) in &p.terms {
                    let row = register((cone.clone(), mono.clone()), &mut rhs);
                    entries.push((row, col, c.clone()));
                }
            }
        }
        for (cone, p) in tuple {
            for (mono, c) in &p.homogeneous_part(d, n).terms {
                let row = register((cone.clone(), mono.clone()), &mut rhs);
                rhs[row] = c.clone();
            }
        }
        if rhs.is_empty() {
            continue;
        }
        let mut a = vec![vec![Q::zero(); monos.len()]; rhs.len()];
        for (r, c, v) in entries {
            a[r][c] += v;
        }
        let x = solve_right(&a, &rhs).ok_or_else(|| Error::NotInImage(format!("no class of degree {d}")))?;
        for (e, c) in monos.iter().zip(x) {
            result.add_term(e.clone(), c);
        }
    }
    Ok(result)
}

/// Rank of the restriction map on classes of degree `d`.
pub fn restriction_rank(model: &ToricModel, d: u32) -> usize {
    let n = model.rank();
    let monos = sr_monomials(model, d);
    let mut keys: BTreeMap<(Vec<usize>, Mono), usize> = BTreeMap::new();
    let cols: Vec<BTreeMap<Vec<usize>, Poly<Q>>> =
        monos.iter().map(|e| tuple_of(model, &Poly::monomial(e.clone(), Q::from_integer(1.into())), n)).collect();
    for r in &cols {
        for (cone, p) in r {
            for mono in p.terms.keys() {
                let l = keys.len();
                keys.entry((cone.clone(), mono.clone())).or_insert(l);
            }
        }
    }
    let mut a = vec![vec![Q::zero(); monos.len()]; keys.len()];
    for (col, r) in cols.iter().enumerate() {
        for (cone, p) in r {
            for (mono, c) in &p.terms {
                a[keys[&(cone.clone(), mono.clone())]][col] += c;
            }
        }
    }
    rref(&a).1.len()
}
