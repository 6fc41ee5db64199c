//! Birational morphisms of multi-fans: star subdivisions, rescalings of
//! edge vectors, composition, the pullback `ρ^*` and the push-forward `ρ_*`,
//! and triangulations of non-simplicial fans.

use crate::arith::{dot_q, is_integer, primitive, q, qz, Q, Z};
use crate::error::{Error, Result};
use crate::lattice_alg::{coordinates_in, det_q, inverse_q, rank_z, to_q_matrix, transpose, RatMatrix};
use crate::multifan::{
    chamber_witnesses, independent_subset, normal_vector, EdgeVectors, GeneralFan, MaximalCone, MultiFan, ToricModel,
    Violation,
};
use crate::poly::{Coeff, Poly};
use crate::ratfun::RationalFunctionND;
use crate::sr_ring::{self, SrClass};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};

/// `ρ: Δ′ → Δ`.
#[derive(Debug, Clone)]
pub struct BirationalMorphism {
    pub source: ToricModel,
    pub target: ToricModel,
    /// Target ray `i` ↦ source ray `κ(i)`.
    pub kappa: Vec<usize>,
    /// Source simplex ↦ minimal target simplex containing it.
    pub rho: BTreeMap<Vec<usize>, Vec<usize>>,
    /// `a[i′][i]` with `v_{i′} = Σ_i a_{i′i} v_i`.
    pub a: Vec<Vec<Q>>,
}

/// Nonnegative coordinates of `x` in the independent vectors `vs`, if `x`
/// lies in the cone they span.
fn cone_coordinates(vs: &[Vec<Z>], x: &[Z]) -> Option<Vec<Q>> {
    let xq: Vec<Q> = x.iter().map(qz).collect();
    let c = coordinates_in(vs, &xq)?;
    if c.iter().any(|t| t.is_negative()) {
        return None;
    }
    Some(c)
}

/// Minimal simplex of `fan` (by size, then order) whose cone contains all
/// of `pts`.
fn carrier_simplex(fan: &MultiFan, pts: &[Vec<Z>]) -> Option<Vec<usize>> {
    let mut by_size: Vec<&Vec<usize>> = fan.simplices.iter().collect();
    by_size.sort_by_key(|s| s.len());
    by_size
        .into_iter()
        .find(|s| {
            let rays = fan.cone_rays(s);
            pts.iter().all(|p| cone_coordinates(&rays, p).is_some())
        })
        .cloned()
}

/// Checks that the simplicial cones `pieces` tile the cone spanned by
/// `container` (which need not be simplicial).  Returns a description of
/// the first defect.
pub fn check_tiling(container: &[Vec<Z>], pieces: &[Vec<Vec<Z>>]) -> std::result::Result<(), String> {
    let basis_idx = independent_subset(container);
    let k = basis_idx.len();
    if k == 0 {
        return Ok(());
    }
    let basis: Vec<Vec<Z>> = basis_idx.iter().map(|&i| container[i].clone()).collect();
    let coords = |v: &Vec<Z>| -> std::result::Result<Vec<Z>, String> {
        let c = coordinates_in(&basis, &v.iter().map(qz).collect::<Vec<_>>())
            .ok_or_else(|| "piece leaves the span of the container".to_string())?;
        Ok(crate::arith::primitive_from_rational(&c).0)
    };
    let cont: Vec<Vec<Z>> = container.iter().map(coords).collect::<std::result::Result<_, _>>()?;
    // Facet normals of the container in basis coordinates.
    let mut cont_normals: Vec<Vec<Q>> = Vec::new();
    for sub in subsets(cont.len(), k - 1) {
        let vs: Vec<Vec<Z>> = sub.iter().map(|&i| cont[i].clone()).collect();
        if rank_z(&vs) != k - 1 {
            continue;
        }
        let Some(h) = normal_vector(&vs, k) else { continue };
        let vals: Vec<Q> = cont.iter().map(|c| crate::arith::dot_qz(&h, c)).collect();
        if vals.iter().all(|x| !x.is_negative()) {
            cont_normals.push(h);
        } else if vals.iter().all(|x| !x.is_positive()) {
            cont_normals.push(h.iter().map(|x| -x).collect());
        }
    }
    let mut piece_duals: Vec<RatMatrix> = Vec::new();
    let mut vol = Q::zero();
    for p in pieces {
        let pc: Vec<Vec<Z>> = p.iter().map(coords).collect::<std::result::Result<_, _>>()?;
        if pc.len() != k || rank_z(&pc) != k {
            return Err("piece is not a full-dimensional simplicial cone".into());
        }
        for v in &pc {
            if cont_normals.iter().any(|h| crate::arith::dot_qz(h, v).is_negative()) {
                return Err("piece leaves the container cone".into());
            }
        }
        // Columns are piece rays; dual rows are the inverse.
        let m = transpose(&to_q_matrix(&pc));
        let inv = inverse_q(&m).ok_or("singular piece")?;
        piece_duals.push(inv);
        if basis_idx.len() == container.len() {
            // Simplicial container: normalised volume in barycentric terms.
            let bary: RatMatrix = pc
                .iter()
                .map(|v| {
                    let s: Q = v.iter().map(qz).sum();
                    v.iter().map(|x| qz(x) / &s).collect()
                })
                .collect();
            vol += det_q(&bary).abs();
        }
    }
    if basis_idx.len() == container.len() && vol != Q::one() {
        return Err(format!("piece volumes sum to {vol}, expected 1"));
    }
    let mut normals = cont_normals.clone();
    for d in &piece_duals {
        normals.extend(d.iter().cloned());
    }
    for w in chamber_witnesses(&normals, k) {
        if !cont_normals.iter().all(|h| dot_q(h, &w).is_positive()) {
            continue;
        }
        let hits = piece_duals.iter().filter(|d| d.iter().all(|r| dot_q(r, &w).is_positive())).count();
        if hits != 1 {
            return Err(format!("a chamber of the container is covered {hits} times"));
        }
    }
    Ok(())
}

fn subsets(m: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(start: usize, m: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(i + 1, m, k, cur, out);
            cur.pop();
        }
    }
    rec(0, m, k, &mut cur, &mut out);
    out
}

impl BirationalMorphism {
    /// Computes `ρ` and the coefficients `a` geometrically from the two
    /// models and `κ`.
    pub fn from_models(source: ToricModel, target: ToricModel, kappa: Vec<usize>) -> Result<Self> {
        if source.rank() != target.rank() {
            return Err(Error::InvalidInput("source and target ranks differ".into()));
        }
        let mut rho = BTreeMap::new();
        for s in &source.fan.simplices {
            let pts = source.fan.cone_rays(s);
            let j = carrier_simplex(&target.fan, &pts)
                .ok_or_else(|| Error::InvalidInput(format!("source cone {s:?} lies in no target cone")))?;
            rho.insert(s.clone(), j);
        }
        let mt = target.fan.num_rays();
        let mut a = Vec::with_capacity(source.fan.num_rays());
        for i in 0..source.fan.num_rays() {
            let j = &rho[&vec![i]];
            let vs: Vec<Vec<Z>> = j.iter().map(|&t| target.edge_vector(t)).collect();
            let v: Vec<Q> = source.edge_vector(i).iter().map(qz).collect();
            let c = coordinates_in(&vs, &v).expect("carrier spans the ray");
            let mut row = vec![Q::zero(); mt];
            for (p, &t) in j.iter().enumerate() {
                row[t] = c[p].clone();
            }
            a.push(row);
        }
        Ok(BirationalMorphism { source, target, kappa, rho, a })
    }

    pub fn identity(model: &ToricModel) -> Result<Self> {
        let m = model.fan.num_rays();
        Self::from_models(model.clone(), model.clone(), (0..m).collect())
    }

    /// Same multi-fan, edge vectors changed from `target.edges` to `edges`.
    pub fn rescale(target: &ToricModel, edges: EdgeVectors) -> Result<Self> {
        let source = ToricModel::new(target.fan.clone(), edges)?;
        let m = target.fan.num_rays();
        Self::from_models(source, target.clone(), (0..m).collect())
    }

    /// Checks conditions a), b), c) and the `a`-coefficients.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let src = &self.source.fan;
        let tgt = &self.target.fan;
        let mut seen = BTreeSet::new();
        if self.kappa.len() != tgt.num_rays() {
            out.push(Violation { kind: "kappa", message: "κ has the wrong length".into() });
            return out;
        }
        for (i, &k) in self.kappa.iter().enumerate() {
            if k >= src.num_rays() || !seen.insert(k) {
                out.push(Violation { kind: "kappa", message: format!("κ is not an injection at ray {i}") });
                continue;
            }
            if src.rays[k] != tgt.rays[i] {
                out.push(Violation { kind: "kappa", message: format!("C({i}) differs from C′(κ({i}))") });
            }
            if self.rho.get(&vec![k]) != Some(&vec![i]) {
                out.push(Violation { kind: "kappa", message: format!("ρ(κ({i})) is not {{{i}}}") });
            }
        }
        for s in &src.simplices {
            if !self.rho.contains_key(s) {
                out.push(Violation { kind: "rho", message: format!("ρ undefined on {s:?}") });
            }
        }
        for j in tgt.simplices.iter().filter(|j| !j.is_empty()) {
            let pieces: Vec<Vec<Vec<Z>>> =
                self.rho.iter().filter(|(s, t)| *t == j && s.len() == j.len()).map(|(s, _)| src.cone_rays(s)).collect();
            if let Err(e) = check_tiling(&tgt.cone_rays(j), &pieces) {
                out.push(Violation { kind: "subdivision", message: format!("over {j:?}: {e}") });
            }
        }
        for c in &src.maximal {
            let t = &self.rho[&c.verts];
            match tgt.maximal.iter().find(|m| &m.verts == t) {
                Some(m) if m.wplus == c.wplus && m.wminus == c.wminus => {}
                Some(_) => out
                    .push(Violation {
                        kind: "weights", message: format!("w′±({:?}) differs from w±({t:?})", c.verts)
                    }),
                None => out
                    .push(Violation { kind: "weights", message: format!("ρ({:?}) = {t:?} is not maximal", c.verts) }),
            }
        }
        for (ip, row) in self.a.iter().enumerate() {
            let support: Vec<usize> = (0..row.len()).filter(|&i| !row[i].is_zero()).collect();
            if row.iter().any(|x| x.is_negative()) || support != self.rho[&vec![ip]] {
                out.push(Violation {
                    kind: "coefficients",
                    message: format!("a-row of ray {ip} is not positive exactly on ρ({ip})"),
                });
            }
            let n = self.target.rank();
            let recon: Vec<Q> = (0..n)
                .map(|x| (0..row.len()).fold(Q::zero(), |acc, i| acc + &row[i] * qz(&self.target.edge_vector(i)[x])))
                .collect();
            if recon != self.source.edge_vector(ip).iter().map(qz).collect::<Vec<_>>() {
                out.push(Violation { kind: "coefficients", message: format!("v_{ip} ≠ Σ a v_i") });
            }
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let v = self.validate();
        if v.is_empty() {
            return Ok(());
        }
        Err(Error::InvalidInput(v.iter().map(|x| format!("{}: {}", x.kind, x.message)).collect::<Vec<_>>().join("; ")))
    }

    /// `ρ₂ ∘ ρ₁` with `self = ρ₁: Δ″ → Δ′` and `other = ρ₂: Δ′ → Δ`.
    pub fn then(&self, other: &BirationalMorphism) -> Result<Self> {
        if self.target.fan != other.source.fan || self.target.edges != other.source.edges {
            return Err(Error::InvalidInput("morphisms are not composable".into()));
        }
        let kappa = other.kappa.iter().map(|&k| self.kappa[k]).collect();
        Self::from_models(self.source.clone(), other.target.clone(), kappa)
    }

    /// `ρ^*`: `x_i ↦ Σ_{i′} a_{i′i} x_{i′}`, reduced.
    pub fn pullback<C: Coeff>(&self, x: &Poly<C>) -> Poly<C> {
        let ms = self.source.fan.num_rays();
        let extra = x.nvars - self.target.fan.num_rays();
        let mut images: Vec<Poly<C>> = (0..self.target.fan.num_rays())
            .map(|i| {
                let mut coeffs: Vec<Q> = (0..ms).map(|ip| self.a[ip][i].clone()).collect();
                coeffs.resize(ms + extra, Q::zero());
                Poly::linear(&coeffs)
            })
            .collect();
        for e in 0..extra {
            images.push(Poly::var(ms + extra, ms + e));
        }
        sr_ring::reduce(&self.source, &x.substitute(&images, |_| true))
    }

    /// Pullback of divisor coefficients: `d′_{i′} = Σ_i a_{i′i} d_i`.
    pub fn pullback_divisor(&self, d: &[Q]) -> Vec<Q> {
        self.a.iter().map(|row| dot_q(row, d)).collect()
    }

    /// `ρ_*` on restriction tuples:
    /// `ρ_*(x)_I = |H_I| u_I Σ_{ρ(I′)=I} x_{I′} / (|H_{I′}| u_{I′})`,
    /// certified polynomial.  Works homogeneous degree by homogeneous
    /// degree in the first `n` variables, so truncated inputs give exact
    /// truncated outputs.
    pub fn pushforward_tuple<C: Coeff + Send + Sync>(
        &self,
        tuple: &BTreeMap<Vec<usize>, Poly<C>>,
        nvars: usize,
    ) -> Result<BTreeMap<Vec<usize>, Poly<C>>> {
        let n = self.target.rank();
        let targets: BTreeSet<Vec<usize>> = self.target.fan.maximal.iter().map(|c| c.verts.clone()).collect();
        let sources: BTreeSet<Vec<usize>> = self.source.fan.maximal.iter().map(|c| c.verts.clone()).collect();
        let maxdeg = tuple.values().filter_map(|p| p.total_degree()).max().unwrap_or(0);
        let entries: Vec<Result<(Vec<usize>, Poly<C>)>> = crate::pool().install(|| {
            targets
                .par_iter()
                .map(|i| {
                    let cone = self.target.cone(i);
                    let mut u_i: Poly<C> = Poly::constant(nvars, C::from_q(&q(cone.order() as i64)));
                    for row in &cone.dual {
                        let mut r = row.clone();
                        r.resize(nvars, Q::zero());
                        u_i = u_i.mul(&Poly::linear(&r));
                    }
                    let mut total = Poly::zero(nvars);
                    for d in 0..=maxdeg {
                        let mut acc = RationalFunctionND::zero(nvars);
                        for ip in sources.iter().filter(|s| &self.rho[*s] == i) {
                            let t = tuple[ip].homogeneous_part(d, n);
                            if t.is_zero() {
                                continue;
                            }
                            let c2 = self.source.cone(ip);
                            let s = Q::new(Z::one(), Z::from(c2.order()));
                            acc = acc.add(&RationalFunctionND::new(t.scale(&s), &c2.dual)?);
                        }
                        total = total.add(&acc.mul_poly(&u_i).into_polynomial()?);
                    }
                    Ok((i.clone(), total))
                })
                .collect()
        });
        entries.into_iter().collect()
    }

    /// `ρ_*(x)` as a Stanley–Reisner class of the target.
    pub fn pushforward(&self, x: &SrClass) -> Result<SrClass> {
        let n = self.target.rank();
        let t = sr_ring::tuple_of(&self.source, x, n);
        let pushed = self.pushforward_tuple(&t, n)?;
        sr_ring::check_compatible(&self.target, &pushed)?;
        sr_ring::from_tuple(&self.target, &pushed)
    }
}

/// Star subdivision of `model` at `v_new ∈ relint C(I₀)`.
pub fn star_subdivide(model: &ToricModel, i0: &[usize], v_new: &[Z]) -> Result<BirationalMorphism> {
    let mut i0 = i0.to_vec();
    i0.sort_unstable();
    let fan = &model.fan;
    if !fan.is_simplex(&i0) || i0.is_empty() {
        return Err(Error::InvalidInput(format!("{i0:?} is not a simplex")));
    }
    if v_new.len() != fan.rank {
        return Err(Error::InvalidInput("new vector has the wrong length".into()));
    }
    let rays = fan.cone_rays(&i0);
    let c = coordinates_in(&rays, &v_new.iter().map(qz).collect::<Vec<_>>());
    let interior = matches!(&c, Some(c) if c.iter().all(|x| x.is_positive()));
    if !interior || i0.len() < 2 {
        return Err(Error::NotInteriorVector(format!("{v_new:?} is not in the relative interior of C({i0:?})")));
    }
    let (p, g) = primitive(v_new);
    let m = fan.num_rays();
    let mut new_rays = fan.rays.clone();
    new_rays.push(p);
    let mut mult = model.edges.mult.clone();
    mult.push(g);
    let mut maximal = Vec::new();
    for c in &fan.maximal {
        if i0.iter().all(|i| c.verts.contains(i)) {
            for &j in &i0 {
                let mut v: Vec<usize> = c.verts.iter().copied().filter(|&x| x != j).collect();
                v.push(m);
                maximal.push(MaximalCone::new(v, c.wplus, c.wminus));
            }
        } else {
            maximal.push(c.clone());
        }
    }
    let src = ToricModel::new(MultiFan::from_maximal(fan.rank, new_rays, maximal), EdgeVectors { mult })?;
    BirationalMorphism::from_models(src, model.clone(), (0..m).collect())
}

/// How to triangulate a non-simplicial cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    /// Cone from the earliest vertex over the facets not containing it.
    Pulling(Vec<usize>),
    /// Insert vertices in order, coning over visible boundary facets.
    Placing(Vec<usize>),
}

/// A triangulation `Δ′ → Δ` of a general fan with `κ` the identity on rays.
#[derive(Debug, Clone)]
pub struct Triangulation {
    pub general: GeneralFan,
    pub faces: BTreeSet<Vec<usize>>,
    pub fan: MultiFan,
    /// Simplex of `Δ′` ↦ minimal face of `Δ` containing it.
    pub rho: BTreeMap<Vec<usize>, Vec<usize>>,
}

impl Triangulation {
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        for f in self.faces.iter().filter(|f| !f.is_empty()) {
            let dim = rank_z(&self.general.cone_rays(f));
            let pieces: Vec<Vec<Vec<Z>>> = self
                .rho
                .iter()
                .filter(|(s, t)| *t == f && s.len() == dim)
                .map(|(s, _)| self.fan.cone_rays(s))
                .collect();
            if let Err(e) = check_tiling(&self.general.cone_rays(f), &pieces) {
                out.push(Violation { kind: "subdivision", message: format!("over face {f:?}: {e}") });
            }
        }
        for c in &self.fan.maximal {
            let t = &self.rho[&c.verts];
            if !self.general.cones.iter().any(|g| &g.verts == t && g.wplus == c.wplus && g.wminus == c.wminus) {
                out.push(Violation { kind: "weights", message: format!("{:?} does not inherit weights", c.verts) });
            }
        }
        out
    }
}

fn pull(g: &GeneralFan, faces: &BTreeSet<Vec<usize>>, f: &[usize], order: &[usize]) -> Vec<Vec<usize>> {
    let dim = rank_z(&g.cone_rays(f));
    if dim == f.len() {
        return vec![f.to_vec()];
    }
    let v = *order.iter().find(|x| f.contains(x)).expect("order covers all rays");
    let mut out = Vec::new();
    for sub in faces
        .iter()
        .filter(|s| s.iter().all(|x| f.contains(x)) && !s.contains(&v) && rank_z(&g.cone_rays(s)) == dim - 1)
    {
        for mut s in pull(g, faces, sub, order) {
            s.push(v);
            s.sort_unstable();
            out.push(s);
        }
    }
    out
}

fn place(g: &GeneralFan, f: &[usize], order: &[usize]) -> Vec<Vec<usize>> {
    let mut simplices: Vec<Vec<usize>> = Vec::new();
    let mut used: Vec<usize> = Vec::new();
    for &v in order.iter().filter(|x| f.contains(x)) {
        if used.is_empty() {
            simplices.push(vec![v]);
            used.push(v);
            continue;
        }
        let mut trial = g.cone_rays(&used);
        trial.push(g.rays[v].clone());
        if rank_z(&trial) > rank_z(&g.cone_rays(&used)) {
            for s in simplices.iter_mut() {
                s.push(v);
                s.sort_unstable();
            }
        } else {
            // Boundary facets: codimension-one faces lying in exactly one simplex.
            let mut count: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
            for (si, s) in simplices.iter().enumerate() {
                for &o in s {
                    let fct: Vec<usize> = s.iter().copied().filter(|&x| x != o).collect();
                    count.entry(fct).or_default().push((si, o));
                }
            }
            let mut added = Vec::new();
            for (fct, owners) in count {
                if owners.len() != 1 {
                    continue;
                }
                let (si, o) = owners[0];
                let s = &simplices[si];
                let duals = crate::lattice_alg::dual_basis(&g.cone_rays(s)).expect("independent");
                let pos = s.iter().position(|&x| x == o).unwrap();
                if crate::arith::dot_qz(&duals[pos], &g.rays[v]).is_negative() {
                    let mut t = fct.clone();
                    t.push(v);
                    t.sort_unstable();
                    added.push(t);
                }
            }
            simplices.extend(added);
        }
        used.push(v);
    }
    simplices
}

/// Triangulates every cone of `g` without new rays; the same vertex order
/// is used for all cones, so the pieces agree on shared faces.
pub fn triangulate(g: &GeneralFan, strategy: &Strategy) -> Result<Triangulation> {
    let faces = g.faces();
    let order = match strategy {
        Strategy::Pulling(o) | Strategy::Placing(o) => o.clone(),
    };
    let mut full: Vec<usize> = order.clone();
    for i in 0..g.rays.len() {
        if !full.contains(&i) {
            full.push(i);
        }
    }
    let mut maximal = Vec::new();
    for c in &g.cones {
        let pieces = match strategy {
            Strategy::Pulling(_) => pull(g, &faces, &c.verts, &full),
            Strategy::Placing(_) => place(g, &c.verts, &full),
        };
        for p in pieces {
            maximal.push(MaximalCone::new(p, c.wplus, c.wminus));
        }
    }
    let fan = MultiFan::from_maximal(g.rank, g.rays.clone(), maximal);
    let mut rho = BTreeMap::new();
    for s in &fan.simplices {
        let f = g.carrier(&faces, s).ok_or_else(|| Error::InvalidInput(format!("{s:?} lies in no face")))?;
        rho.insert(s.clone(), f);
    }
    Ok(Triangulation { general: g.clone(), faces, fan, rho })
}

/// True when every divisor coefficient is integral (helper for reports).
pub fn integral_coefficients(d: &[Q]) -> bool {
    d.iter().all(is_integer)
}
