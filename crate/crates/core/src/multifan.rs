//! Simplicial multi-fans, edge vectors, degrees and projected multi-fans.

use crate::arith::{dot_qz, gcd_vec, primitive, primitive_from_rational, q, qz, Q, Z};
use crate::error::{Error, Result};
use crate::lattice_alg::{
    dual_basis, orth_projector, quotient_lattice, rank_z, rref, saturate_and_quotient, to_q_matrix, QuotientGroup,
    RatMatrix,
};
use num_traits::{One, Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

/// A maximal simplex with its weight pair `(w⁺, w⁻)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaximalCone {
    pub verts: Vec<usize>,
    pub wplus: i64,
    pub wminus: i64,
}

impl MaximalCone {
    pub fn new(mut verts: Vec<usize>, wplus: i64, wminus: i64) -> Self {
        verts.sort_unstable();
        MaximalCone { verts, wplus, wminus }
    }

    pub fn weight(&self) -> i64 {
        self.wplus - self.wminus
    }
}

/// A simplicial multi-fan `Δ = (Σ, C, w±)`.
///
/// Rays are primitive directions; simplices are sorted index sets and
/// include the empty simplex.  Maximal simplices form a list so that two
/// simplices with the same vertex set (as in glued multi-fans) are kept
/// apart.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiFan {
    pub rank: usize,
    pub rays: Vec<Vec<Z>>,
    pub maximal: Vec<MaximalCone>,
    pub simplices: BTreeSet<Vec<usize>>,
}

/// Edge vectors `v_i = c_i p_i` given by positive multiplicities.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeVectors {
    pub mult: Vec<Z>,
}

impl EdgeVectors {
    pub fn primitive(m: usize) -> Self {
        EdgeVectors { mult: vec![Z::one(); m] }
    }

    pub fn from_i64(c: &[i64]) -> Self {
        EdgeVectors { mult: c.iter().map(|&x| Z::from(x)).collect() }
    }
}

/// A T-Cartier-or-not divisor class `ξ = Σ d_i x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Divisor {
    pub d: Vec<Q>,
}

impl Divisor {
    /// `ξ₀ = Σ x_i`, the anticanonical class.
    pub fn canonical0(m: usize) -> Self {
        Divisor { d: vec![q(1); m] }
    }

    pub fn from_i64(d: &[i64]) -> Self {
        Divisor { d: d.iter().map(|&x| q(x)).collect() }
    }
}

fn all_subsets(v: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(1 << v.len());
    for mask in 0u64..(1u64 << v.len()) {
        out.push((0..v.len()).filter(|i| mask >> i & 1 == 1).map(|i| v[i]).collect());
    }
    out
}

/// A single detected defect of a multi-fan.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub kind: &'static str,
    pub message: String,
}

impl MultiFan {
    /// Builds the face-closed simplicial set generated by `maximal`.
    pub fn from_maximal(rank: usize, rays: Vec<Vec<Z>>, maximal: Vec<MaximalCone>) -> Self {
        let mut simplices = BTreeSet::new();
        for c in &maximal {
            for s in all_subsets(&c.verts) {
                simplices.insert(s);
            }
        }
        MultiFan { rank, rays, maximal, simplices }
    }

    /// Convenience: rays and maximal cones as small integers, weight 1.
    pub fn simple(rank: usize, rays: &[&[i64]], cones: &[&[usize]]) -> Self {
        let rays = rays.iter().map(|r| r.iter().map(|&x| Z::from(x)).collect()).collect();
        let maximal = cones.iter().map(|c| MaximalCone::new(c.to_vec(), 1, 0)).collect();
        Self::from_maximal(rank, rays, maximal)
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn is_simplex(&self, s: &[usize]) -> bool {
        self.simplices.contains(s)
    }

    pub fn simplices_of_dim(&self, k: usize) -> impl Iterator<Item = &Vec<usize>> {
        self.simplices.iter().filter(move |s| s.len() == k)
    }

    /// Weight `w(I)` summed over maximal entries with vertex set `verts`.
    pub fn weight_of(&self, verts: &[usize]) -> i64 {
        self.maximal.iter().filter(|c| c.verts == verts).map(|c| c.weight()).sum()
    }

    pub fn cone_rays(&self, s: &[usize]) -> Vec<Vec<Z>> {
        s.iter().map(|&i| self.rays[i].clone()).collect()
    }

    /// Structural validation; an empty result means the multi-fan is valid.
    pub fn validate(&self, edges: &EdgeVectors) -> Vec<Violation> {
        let mut v = Vec::new();
        let n = self.rank;
        if edges.mult.len() != self.rays.len() {
            v.push(Violation {
                kind: "multiplicities",
                message: format!("{} multiplicities for {} rays", edges.mult.len(), self.rays.len()),
            });
        }
        for (i, c) in edges.mult.iter().enumerate() {
            if !c.is_positive() {
                v.push(Violation {
                    kind: "multiplicities",
                    message: format!("ray {i}: multiplicity {c} not positive"),
                });
            }
        }
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != n {
                v.push(Violation { kind: "ray", message: format!("ray {i} has length {} != rank {n}", r.len()) });
                continue;
            }
            let g = gcd_vec(r);
            if g.is_zero() {
                v.push(Violation { kind: "ray", message: format!("ray {i} is zero") });
            } else if !g.is_one() {
                v.push(Violation { kind: "ray", message: format!("ray {i} is not primitive (gcd {g})") });
            }
        }
        if !v.is_empty() {
            return v;
        }
        if self.maximal.is_empty() {
            v.push(Violation { kind: "maximal", message: "no maximal simplices".into() });
        }
        for c in &self.maximal {
            if c.verts.len() != n {
                v.push(Violation {
                    kind: "maximal",
                    message: format!("maximal simplex {:?} has {} vertices, rank is {n}", c.verts, c.verts.len()),
                });
            }
            if c.wplus < 0 || c.wminus < 0 {
                v.push(Violation { kind: "weights", message: format!("negative weight on {:?}", c.verts) });
            }
            if !self.simplices.contains(&c.verts) {
                v.push(Violation { kind: "face-closure", message: format!("maximal {:?} missing from Σ", c.verts) });
            }
        }
        for s in &self.simplices {
            if s.iter().any(|&i| i >= self.rays.len()) {
                v.push(Violation { kind: "index", message: format!("simplex {s:?} references an unknown ray") });
                continue;
            }
            if s.len() > n {
                v.push(Violation { kind: "dimension", message: format!("simplex {s:?} exceeds rank {n}") });
                continue;
            }
            if rank_z(&self.cone_rays(s)) < s.len() {
                v.push(Violation { kind: "dependent", message: format!("rays of simplex {s:?} are dependent") });
            }
            for f in all_subsets(s) {
                if !self.simplices.contains(&f) {
                    v.push(Violation { kind: "face-closure", message: format!("face {f:?} of {s:?} missing") });
                }
            }
            if !self.maximal.iter().any(|c| s.iter().all(|i| c.verts.contains(i))) {
                v.push(Violation { kind: "orphan", message: format!("simplex {s:?} lies in no maximal simplex") });
            }
        }
        v
    }

    pub fn check(&self, edges: &EdgeVectors) -> Result<()> {
        let v = self.validate(edges);
        if v.is_empty() {
            return Ok(());
        }
        let msg = v.iter().map(|x| format!("{}: {}", x.kind, x.message)).collect::<Vec<_>>().join("; ");
        if v.iter().any(|x| x.kind == "dependent") {
            Err(Error::DependentVectors(msg))
        } else if v.iter().any(|x| x.kind == "weights") {
            Err(Error::BadWeights(msg))
        } else {
            Err(Error::InvalidInput(msg))
        }
    }

    /// Maximal cones (by list index) containing `k`.
    pub fn maximal_containing(&self, k: &[usize]) -> Vec<usize> {
        (0..self.maximal.len()).filter(|&j| k.iter().all(|i| self.maximal[j].verts.contains(i))).collect()
    }

    /// Normals of the hyperplanes `span C(J)` for codimension-one
    /// simplices `J ⊇ K`.
    pub fn wall_normals(&self, k: &[usize]) -> Vec<Vec<Q>> {
        let n = self.rank;
        let mut normals: Vec<Vec<Q>> = Vec::new();
        for j in self.simplices_of_dim(n - 1) {
            if !k.iter().all(|i| j.contains(i)) {
                continue;
            }
            if let Some(nv) = normal_vector(&self.cone_rays(j), n) {
                let (p, _) = primitive_from_rational(&nv);
                let p = canonical_sign(p);
                let pq: Vec<Q> = p.iter().map(qz).collect();
                if !normals.contains(&pq) {
                    normals.push(pq);
                }
            }
        }
        normals
    }

    /// `d_v` for the projected multi-fan `Δ_K`: total weight of maximal
    /// `I ⊇ K` whose projected cone contains `v` (generic for `Δ_K`).
    pub fn local_degree_at(&self, k: &[usize], v: &[Q]) -> i64 {
        let mut total = 0;
        for j in self.maximal_containing(k) {
            let c = &self.maximal[j];
            let duals = dual_basis(&self.cone_rays(&c.verts)).expect("independent maximal rays");
            let inside =
                c.verts.iter().zip(&duals).all(|(i, u)| k.contains(i) || crate::arith::dot_q(u, v).is_positive());
            if inside {
                total += c.weight();
            }
        }
        total
    }

    /// Checks that `d_v` is constant over all chambers of `Δ_K` and
    /// returns `(pre-complete, degree-at-first-chamber, all values)`.
    pub fn is_precomplete_and_degree(&self, k: &[usize]) -> (bool, i64, Vec<i64>) {
        let walls = self.wall_normals(k);
        let pts = chamber_witnesses(&walls, self.rank);
        let vals: Vec<i64> = pts.iter().map(|p| self.local_degree_at(k, p)).collect();
        let first = vals[0];
        (vals.iter().all(|&x| x == first), first, vals)
    }

    /// Degrees of every projected multi-fan; `NotComplete` lists failures.
    pub fn degree_table(&self) -> Result<BTreeMap<Vec<usize>, i64>> {
        let mut table = BTreeMap::new();
        let mut bad = Vec::new();
        for s in &self.simplices {
            let (ok, d, vals) = self.is_precomplete_and_degree(s);
            if !ok {
                bad.push(format!("{s:?}: chamber degrees {vals:?}"));
            }
            table.insert(s.clone(), d);
        }
        if bad.is_empty() {
            Ok(table)
        } else {
            Err(Error::NotComplete(bad.join("; ")))
        }
    }

    pub fn is_complete(&self) -> bool {
        self.degree_table().is_ok()
    }

    pub fn degree(&self) -> Result<i64> {
        Ok(self.degree_table()?[&Vec::new()])
    }

    /// Deterministic generic vector: integer points enumerated shell by
    /// shell in max-norm, skipping `seed` admissible candidates.
    pub fn generic_vector(&self, seed: usize) -> Vec<Z> {
        let walls = self.wall_normals(&[]);
        generic_point(&walls, self.rank, seed)
    }

    /// True when `v` lies in some maximal cone `C(I)`.
    pub fn in_support(&self, v: &[Q]) -> bool {
        self.maximal.iter().any(|c| {
            let duals = dual_basis(&self.cone_rays(&c.verts)).expect("independent maximal rays");
            duals.iter().all(|u| !crate::arith::dot_q(u, v).is_negative())
        })
    }

    /// The projected multi-fan `Δ_K` in `L^K = L / L_K`.
    pub fn project(&self, edges: &EdgeVectors, k: &[usize]) -> Result<ProjectedMultiFan> {
        let ql = quotient_lattice(&self.cone_rays(k), self.rank)?;
        let mut index_map: Vec<usize> = Vec::new();
        let mut rays = Vec::new();
        let mut mult = Vec::new();
        let mut position = BTreeMap::new();
        for s in &self.simplices {
            if !k.iter().all(|i| s.contains(i)) {
                continue;
            }
            for &j in s {
                if k.contains(&j) || position.contains_key(&j) {
                    continue;
                }
                let img: Vec<Z> = ql.apply(&self.rays[j].iter().map(|x| x * &edges.mult[j]).collect::<Vec<_>>());
                let (p, g) = primitive(&img);
                position.insert(j, rays.len());
                index_map.push(j);
                rays.push(p);
                mult.push(g);
            }
        }
        let maximal = self
            .maximal
            .iter()
            .filter(|c| k.iter().all(|i| c.verts.contains(i)))
            .map(|c| {
                let verts = c.verts.iter().filter(|i| !k.contains(i)).map(|i| position[i]).collect();
                MaximalCone::new(verts, c.wplus, c.wminus)
            })
            .collect();
        let fan = MultiFan::from_maximal(self.rank - k.len(), rays, maximal);
        Ok(ProjectedMultiFan { base: k.to_vec(), index_map, fan, edges: EdgeVectors { mult } })
    }
}

fn canonical_sign(p: Vec<Z>) -> Vec<Z> {
    match p.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => p.iter().map(|y| -y).collect(),
        _ => p,
    }
}

/// A projected multi-fan with the map from its rays to the parent's.
#[derive(Debug, Clone)]
pub struct ProjectedMultiFan {
    pub base: Vec<usize>,
    pub index_map: Vec<usize>,
    pub fan: MultiFan,
    pub edges: EdgeVectors,
}

/// Normal of the hyperplane spanned by `n-1` independent vectors.
pub fn normal_vector(vs: &[Vec<Z>], n: usize) -> Option<Vec<Q>> {
    if vs.len() + 1 != n {
        return None;
    }
    if vs.is_empty() {
        return Some(vec![q(1)]);
    }
    let (red, piv) = rref(&to_q_matrix(&vs.to_vec()));
    if piv.len() != n - 1 {
        return None;
    }
    let free = (0..n).find(|c| !piv.contains(c)).unwrap();
    let mut x = vec![Q::zero(); n];
    x[free] = q(1);
    for (r, &c) in piv.iter().enumerate() {
        x[c] = -red[r][free].clone();
    }
    Some(x)
}

/// Fourier–Motzkin feasibility of the strict homogeneous system
/// `row · x > 0`; returns a witness point.
pub fn strict_feasible(rows: &[Vec<Q>], n: usize) -> Option<Vec<Q>> {
    let mut norm: Vec<Vec<Q>> = Vec::new();
    for r in rows {
        if r.iter().all(|x| x.is_zero()) {
            return None;
        }
        let (p, _) = primitive_from_rational(r);
        let pq: Vec<Q> = p.iter().map(qz).collect();
        if !norm.contains(&pq) {
            norm.push(pq);
        }
    }
    if n == 0 {
        return if norm.is_empty() { Some(Vec::new()) } else { None };
    }
    let k = n - 1;
    let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
    for r in &norm {
        if r[k].is_positive() {
            pos.push(r.clone());
        } else if r[k].is_negative() {
            neg.push(r.clone());
        } else {
            rest.push(r[..k].to_vec());
        }
    }
    for p in &pos {
        for m in &neg {
            let row: Vec<Q> = (0..k).map(|j| &p[j] / &p[k] - &m[j] / &m[k]).collect();
            rest.push(row);
        }
    }
    let xs = strict_feasible(&rest, k)?;
    let bound = |r: &Vec<Q>| -> Q { -crate::arith::dot_q(&r[..k], &xs) / &r[k] };
    let lower = pos.iter().map(bound).max();
    let upper = neg.iter().map(bound).min();
    let xk = match (lower, upper) {
        (Some(l), Some(u)) => (l + u) / q(2),
        (Some(l), None) => l + q(1),
        (None, Some(u)) => u - q(1),
        (None, None) => Q::zero(),
    };
    let mut x = xs;
    x.push(xk);
    Some(x)
}

/// One interior point per chamber of a central hyperplane arrangement.
pub fn chamber_witnesses(normals: &[Vec<Q>], n: usize) -> Vec<Vec<Q>> {
    // (sign rows so far, witness)
    let mut cells: Vec<(Vec<Vec<Q>>, Vec<Q>)> = vec![(Vec::new(), vec![Q::zero(); n])];
    for a in normals {
        let mut next = Vec::new();
        for (rows, pt) in cells {
            let val = crate::arith::dot_q(a, &pt);
            for sign in [1i64, -1] {
                let signed: Vec<Q> = a.iter().map(|x| x * q(sign)).collect();
                let same_side = (sign > 0 && val.is_positive()) || (sign < 0 && val.is_negative());
                let mut r2 = rows.clone();
                r2.push(signed);
                if same_side {
                    next.push((r2, pt.clone()));
                } else if let Some(p) = strict_feasible(&r2, n) {
                    next.push((r2, p));
                }
            }
        }
        cells = next;
    }
    cells
        .into_iter()
        .map(|(_, p)| {
            if p.iter().all(|x| x.is_zero()) {
                return p;
            }
            let (ints, _) = primitive_from_rational(&p);
            ints.iter().map(qz).collect()
        })
        .collect()
}

/// Deterministic spiral search for an integer point off all walls.
pub fn generic_point(walls: &[Vec<Q>], n: usize, seed: usize) -> Vec<Z> {
    let mut skipped = 0;
    for radius in 1i64.. {
        for p in shell(n, radius) {
            let pq: Vec<Q> = p.iter().map(|&x| q(x)).collect();
            if walls.iter().all(|w| !crate::arith::dot_q(w, &pq).is_zero()) {
                if skipped == seed {
                    return p.into_iter().map(Z::from).collect();
                }
                skipped += 1;
            }
        }
    }
    unreachable!()
}

/// Integer points of max-norm exactly `r`, ordered with coordinates
/// ranked 0, 1, -1, 2, -2, ...
fn shell(n: usize, r: i64) -> Vec<Vec<i64>> {
    let vals: Vec<i64> = std::iter::once(0).chain((1..=r).flat_map(|k| [k, -k])).collect();
    let mut out = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let p: Vec<i64> = idx.iter().map(|&i| vals[i]).collect();
        if p.iter().map(|x| x.abs()).max().unwrap_or(0) == r {
            out.push(p);
        }
        let mut j = n;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            idx[j] += 1;
            if idx[j] < vals.len() {
                break;
            }
            idx[j] = 0;
        }
    }
}

/// Cached per-simplex lattice data for a multi-fan with edge vectors.
#[derive(Debug, Clone)]
pub struct ConeData {
    pub verts: Vec<usize>,
    /// Edge vectors `v_i`, `i ∈ K`.
    pub vs: Vec<Vec<Z>>,
    /// Dual basis `u_i^K` (rows), orthogonal-complement normalisation.
    pub dual: RatMatrix,
    pub group: QuotientGroup,
}

impl ConeData {
    pub fn order(&self) -> usize {
        self.group.order()
    }

    /// Position of ray `i` inside the cone.
    pub fn pos(&self, i: usize) -> Option<usize> {
        self.verts.iter().position(|&x| x == i)
    }
}

/// A validated multi-fan together with edge vectors and cached lattice
/// data; the common argument of the genus and class computations.
#[derive(Debug, Clone)]
pub struct ToricModel {
    pub fan: MultiFan,
    pub edges: EdgeVectors,
    pub cones: BTreeMap<Vec<usize>, ConeData>,
}

impl ToricModel {
    pub fn new(fan: MultiFan, edges: EdgeVectors) -> Result<Self> {
        fan.check(&edges)?;
        let mut cones = BTreeMap::new();
        for s in &fan.simplices {
            let vs: Vec<Vec<Z>> = s.iter().map(|&i| fan.rays[i].iter().map(|x| x * &edges.mult[i]).collect()).collect();
            let dual = dual_basis(&vs)?;
            let group = saturate_and_quotient(&vs)?;
            cones.insert(s.clone(), ConeData { verts: s.clone(), vs, dual, group });
        }
        Ok(ToricModel { fan, edges, cones })
    }

    pub fn primitive(fan: MultiFan) -> Result<Self> {
        let m = fan.num_rays();
        Self::new(fan, EdgeVectors::primitive(m))
    }

    pub fn rank(&self) -> usize {
        self.fan.rank
    }

    pub fn cone(&self, s: &[usize]) -> &ConeData {
        &self.cones[s]
    }

    pub fn edge_vector(&self, i: usize) -> Vec<Z> {
        self.fan.rays[i].iter().map(|x| x * &self.edges.mult[i]).collect()
    }

    /// Orthogonal projector onto `span C(K)`.
    pub fn projector(&self, k: &[usize]) -> RatMatrix {
        orth_projector(&self.fan.cone_rays(k), self.rank())
    }

    /// Least common multiple of all `|H_I|` over maximal simplices.
    pub fn group_exponent_lcm(&self) -> u64 {
        self.fan.maximal.iter().fold(1u64, |acc, c| crate::arith::lcm_u64(acc, self.cone(&c.verts).order() as u64))
    }

    /// A generic vector lying in `L_V = ∩_I L_{I,V}`.
    pub fn generic_vector_in_lv(&self, seed: usize) -> Vec<Z> {
        let v = self.fan.generic_vector(seed);
        let s = Z::from(self.group_exponent_lcm());
        v.iter().map(|x| x * &s).collect()
    }

    /// `⟨u_i^K, x⟩` for all `i ∈ K`.
    pub fn dual_pairings(&self, k: &[usize], x: &[Z]) -> Vec<Q> {
        self.cone(k).dual.iter().map(|u| dot_qz(u, x)).collect()
    }
}

/// Projective space `P^n`: rays `e_1, ..., e_n, -Σ e_i`.
pub fn projective(n: usize) -> MultiFan {
    let mut rays: Vec<Vec<Z>> = (0..n).map(|i| (0..n).map(|j| Z::from((i == j) as i64)).collect()).collect();
    rays.push(vec![Z::from(-1); n]);
    let maximal = (0..=n).map(|skip| MaximalCone::new((0..=n).filter(|&i| i != skip).collect(), 1, 0)).collect();
    MultiFan::from_maximal(n, rays, maximal)
}

/// Weighted projective space `P(a_0, ..., a_n)` as the fan of
/// `N = Z^{n+1}/Z·a` with rays the primitive images of the `e_i`.
///
/// Returns the fan with primitive edge vectors `V` and the rescaled
/// `V' = {a_i p_i}` presenting it as a global quotient of `P^n`.
pub fn weighted_projective(a: &[i64]) -> Result<(MultiFan, EdgeVectors, EdgeVectors)> {
    if a.len() < 2 || a.iter().any(|&x| x <= 0) {
        return Err(Error::BadWeights(format!("weights {a:?} must be positive, at least two")));
    }
    let az: Vec<Z> = a.iter().map(|&x| Z::from(x)).collect();
    if !gcd_vec(&az).is_one() {
        return Err(Error::BadWeights(format!("weights {a:?} have a common factor")));
    }
    let n = a.len() - 1;
    let snf = crate::lattice_alg::smith_normal_form(&vec![az.clone()]);
    let rays: Vec<Vec<Z>> = (0..=n)
        .map(|i| {
            let img: Vec<Z> = snf.v[i][1..].to_vec();
            primitive(&img).0
        })
        .collect();
    let maximal = (0..=n).map(|skip| MaximalCone::new((0..=n).filter(|&i| i != skip).collect(), 1, 0)).collect();
    let fan = MultiFan::from_maximal(n, rays, maximal);
    let m = fan.num_rays();
    Ok((fan, EdgeVectors::primitive(m), EdgeVectors { mult: az }))
}

/// Hirzebruch surface `F_k`: rays `e1, e2, -e1 + k e2, -e2`.
pub fn hirzebruch(k: i64) -> MultiFan {
    MultiFan::simple(2, &[&[1, 0], &[0, 1], &[-1, k], &[0, -1]], &[&[0, 1], &[1, 2], &[2, 3], &[3, 0]])
}

/// The same cones with every weight multiplied: `w⁺ = w`, `w⁻ = 0`.
pub fn multiplicity_multifan(base: &MultiFan, w: i64) -> Result<MultiFan> {
    if w == 0 {
        return Err(Error::BadWeights("multiplicity must be nonzero".into()));
    }
    let mut f = base.clone();
    for c in &mut f.maximal {
        let x = c.weight() * w;
        c.wplus = x.max(0);
        c.wminus = (-x).max(0);
    }
    Ok(f)
}

/// The single-cone fan `Δ(I)`: the maximal simplex `I` of `fan` and its faces.
pub fn single_cone(fan: &MultiFan, verts: &[usize]) -> MultiFan {
    let mut v = verts.to_vec();
    v.sort_unstable();
    let w = fan.weight_of(&v);
    MultiFan::from_maximal(fan.rank, fan.rays.clone(), vec![MaximalCone::new(v, w.max(0), (-w).max(0))])
}

/// Glues `plus` and `minus` along boundary rays: the result carries
/// `plus` weights unchanged and `minus` weights swapped.  `ident` maps
/// `minus` ray indices to `plus` ray indices; other `minus` rays get
/// fresh indices.
pub fn glue_difference(
    plus: &MultiFan,
    plus_edges: &EdgeVectors,
    minus: &MultiFan,
    minus_edges: &EdgeVectors,
    ident: &[(usize, usize)],
) -> Result<(MultiFan, EdgeVectors)> {
    if plus.rank != minus.rank {
        return Err(Error::BoundaryMismatch("ranks differ".into()));
    }
    let map_in: BTreeMap<usize, usize> = ident.iter().copied().collect();
    let mut rays = plus.rays.clone();
    let mut mult = plus_edges.mult.clone();
    let mut remap = vec![usize::MAX; minus.num_rays()];
    for i in 0..minus.num_rays() {
        if let Some(&j) = map_in.get(&i) {
            if j >= plus.num_rays() {
                return Err(Error::BoundaryMismatch(format!("ray {j} does not exist")));
            }
            if plus.rays[j] != minus.rays[i] || plus_edges.mult[j] != minus_edges.mult[i] {
                return Err(Error::BoundaryMismatch(format!("ray {i} of the minus side differs from ray {j}")));
            }
            remap[i] = j;
        } else {
            remap[i] = rays.len();
            rays.push(minus.rays[i].clone());
            mult.push(minus_edges.mult[i].clone());
        }
    }
    // Every minus simplex made only of identified rays must exist on the
    // plus side, unless it is a maximal simplex being glued.
    for s in &minus.simplices {
        if s.len() == minus.rank {
            continue;
        }
        if s.iter().all(|i| map_in.contains_key(i)) {
            let mut img: Vec<usize> = s.iter().map(|i| remap[*i]).collect();
            img.sort_unstable();
            if !plus.simplices.contains(&img) {
                return Err(Error::BoundaryMismatch(format!("boundary simplex {s:?} has no partner")));
            }
        }
    }
    let mut maximal = plus.maximal.clone();
    for c in &minus.maximal {
        let verts = c.verts.iter().map(|i| remap[*i]).collect();
        maximal.push(MaximalCone::new(verts, c.wminus, c.wplus));
    }
    let mut fan = MultiFan::from_maximal(plus.rank, rays, maximal);
    for s in &minus.simplices {
        let mut img: Vec<usize> = s.iter().map(|i| remap[*i]).collect();
        img.sort_unstable();
        fan.simplices.insert(img);
    }
    Ok((fan, EdgeVectors { mult }))
}

/// A possibly non-simplicial fan given by maximal cones (vertex sets of
/// rays); faces are derived from the geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneralFan {
    pub rank: usize,
    pub rays: Vec<Vec<Z>>,
    pub cones: Vec<MaximalCone>,
}

impl GeneralFan {
    pub fn cone_rays(&self, s: &[usize]) -> Vec<Vec<Z>> {
        s.iter().map(|&i| self.rays[i].clone()).collect()
    }

    pub fn is_simplicial(&self) -> bool {
        self.cones.iter().all(|c| c.verts.len() == self.rank && rank_z(&self.cone_rays(&c.verts)) == self.rank)
    }

    /// Facets of the cone spanned by `verts` (assumed full-dimensional in
    /// its own span), as vertex subsets.
    pub fn facets_of(&self, verts: &[usize]) -> Vec<Vec<usize>> {
        let d = rank_z(&self.cone_rays(verts));
        if d == 0 {
            return Vec::new();
        }
        let mut facets: Vec<Vec<usize>> = Vec::new();
        let basis = independent_subset(&self.cone_rays(verts));
        let span_basis: Vec<Vec<Z>> = basis.iter().map(|&b| self.rays[verts[b]].clone()).collect();
        for sub in subsets_of_size(verts, d - 1) {
            if rank_z(&self.cone_rays(&sub)) != d - 1 {
                continue;
            }
            // Functional inside span(cone) vanishing on the subset.
            let Some(h) = relative_normal(&self.cone_rays(&sub), &span_basis) else { continue };
            let vals: Vec<Q> = verts.iter().map(|&i| dot_qz(&h, &self.rays[i])).collect();
            let pos = vals.iter().any(|x| x.is_positive());
            let neg = vals.iter().any(|x| x.is_negative());
            if pos && neg {
                continue;
            }
            let f: Vec<usize> = verts.iter().zip(&vals).filter(|(_, x)| x.is_zero()).map(|(&i, _)| i).collect();
            if !facets.contains(&f) {
                facets.push(f);
            }
        }
        facets
    }

    /// All faces of all maximal cones (including the empty face).
    pub fn faces(&self) -> BTreeSet<Vec<usize>> {
        let mut all = BTreeSet::new();
        for c in &self.cones {
            let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
            faces.insert(c.verts.clone());
            let facets = self.facets_of(&c.verts);
            let mut frontier: Vec<Vec<usize>> = facets.clone();
            while let Some(f) = frontier.pop() {
                if !faces.insert(f.clone()) {
                    continue;
                }
                for g in &facets {
                    let inter: Vec<usize> = f.iter().filter(|i| g.contains(i)).copied().collect();
                    if !faces.contains(&inter) {
                        frontier.push(inter);
                    }
                }
            }
            faces.insert(Vec::new());
            all.extend(faces);
        }
        all
    }

    /// Minimal face containing all of `s` (intersection of faces).
    pub fn carrier(&self, faces: &BTreeSet<Vec<usize>>, s: &[usize]) -> Option<Vec<usize>> {
        faces.iter().filter(|f| s.iter().all(|i| f.contains(i))).min_by_key(|f| f.len()).cloned()
    }

    /// Solves `⟨u(I), v_i⟩ = d_i` on every maximal cone; returns the
    /// offending cones when some system is inconsistent.
    pub fn qcartier_check(&self, edges: &EdgeVectors, d: &[Q]) -> std::result::Result<Vec<Vec<Q>>, Vec<Vec<usize>>> {
        let mut sols = Vec::new();
        let mut bad = Vec::new();
        for c in &self.cones {
            let a: RatMatrix =
                c.verts.iter().map(|&i| self.rays[i].iter().map(|x| qz(&(x * &edges.mult[i]))).collect()).collect();
            let b: Vec<Q> = c.verts.iter().map(|&i| d[i].clone()).collect();
            match crate::lattice_alg::solve_right(&a, &b) {
                Some(u) => sols.push(u),
                None => bad.push(c.verts.clone()),
            }
        }
        if bad.is_empty() {
            Ok(sols)
        } else {
            Err(bad)
        }
    }

    pub fn qgorenstein_check(&self, edges: &EdgeVectors) -> bool {
        self.qcartier_check(edges, &vec![q(1); self.rays.len()]).is_ok()
    }

    /// The simplicial multi-fan with the same cones, when already simplicial.
    pub fn as_multifan(&self) -> Result<MultiFan> {
        if !self.is_simplicial() {
            return Err(Error::NotSimplicial("fan has non-simplicial cones".into()));
        }
        Ok(MultiFan::from_maximal(self.rank, self.rays.clone(), self.cones.clone()))
    }
}

fn subsets_of_size(v: &[usize], k: usize) -> Vec<Vec<usize>> {
    all_subsets(v).into_iter().filter(|s| s.len() == k).collect()
}

/// Indices of a maximal independent subset (greedy).
pub fn independent_subset(vs: &[Vec<Z>]) -> Vec<usize> {
    let mut chosen: Vec<usize> = Vec::new();
    for i in 0..vs.len() {
        let mut trial: Vec<Vec<Z>> = chosen.iter().map(|&j| vs[j].clone()).collect();
        trial.push(vs[i].clone());
        if rank_z(&trial) == trial.len() {
            chosen.push(i);
        }
    }
    chosen
}

/// A functional in `span(basis)` vanishing on the codimension-one
/// subspace spanned by `sub`.
fn relative_normal(sub: &[Vec<Z>], basis: &[Vec<Z>]) -> Option<Vec<Q>> {
    // h = Σ c_j b_j with ⟨h, s⟩ = 0 for every s in sub.
    let k = basis.len();
    let a: RatMatrix = sub.iter().map(|s| basis.iter().map(|b| qz(&crate::arith::dot_z(b, s))).collect()).collect();
    let (red, piv) = rref(&a);
    let free = (0..k).find(|c| !piv.contains(c))?;
    let mut c = vec![Q::zero(); k];
    c[free] = q(1);
    for (r, &pc) in piv.iter().enumerate() {
        c[pc] = -red[r][free].clone();
    }
    let n = basis[0].len();
    Some((0..n).map(|a| (0..k).fold(Q::zero(), |acc, j| acc + &c[j] * qz(&basis[j][a]))).collect())
}

/// The cube fan: rays `(±1,±1,±1)`, one square cone per facet of the cube.
pub fn cube_fan() -> GeneralFan {
    let mut rays = Vec::new();
    for x in [1i64, -1] {
        for y in [1i64, -1] {
            for z in [1i64, -1] {
                rays.push(vec![Z::from(x), Z::from(y), Z::from(z)]);
            }
        }
    }
    let mut cones = Vec::new();
    for axis in 0..3 {
        for sign in [1i64, -1] {
            let verts: Vec<usize> = (0..8).filter(|&i| rays[i][axis] == Z::from(sign)).collect();
            cones.push(MaximalCone::new(verts, 1, 0));
        }
    }
    GeneralFan { rank: 3, rays, cones }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p2_complete_degree_one() {
        let f = projective(2);
        let t = f.degree_table().unwrap();
        assert!(t.values().all(|&d| d == 1));
    }

    #[test]
    fn p2_minus_cone_not_complete() {
        let mut f = projective(2);
        f.maximal.retain(|c| c.verts != vec![0, 1]);
        let f = MultiFan::from_maximal(2, f.rays.clone(), f.maximal.clone());
        assert!(!f.is_complete());
    }

    #[test]
    fn weighted_line_is_p1() {
        let (f, v, vp) = weighted_projective(&[1, 2]).unwrap();
        assert_eq!(f.rays.len(), 2);
        assert_eq!(f.rays[0][0].abs(), Z::one());
        assert_eq!(&f.rays[0][0] + &f.rays[1][0], Z::zero());
        assert_eq!(v.mult, vec![Z::one(), Z::one()]);
        assert_eq!(vp.mult, vec![Z::from(1), Z::from(2)]);
        assert!(weighted_projective(&[2, 4]).is_err());
    }

    #[test]
    fn hirzebruch_complete() {
        for k in 0..3 {
            assert_eq!(hirzebruch(k).degree().unwrap(), 1);
        }
    }

    #[test]
    fn generic_vector_p1_and_p2() {
        assert_eq!(projective(1).generic_vector(0), vec![Z::from(1)]);
        let v = projective(2).generic_vector(0);
        let f = projective(2);
        let walls = f.wall_normals(&[]);
        let vq: Vec<Q> = v.iter().map(qz).collect();
        assert!(walls.iter().all(|w| !crate::arith::dot_q(w, &vq).is_zero()));
        let v3 = vec![q(3), q(1)];
        assert!(walls.iter().all(|w| !crate::arith::dot_q(w, &v3).is_zero()));
    }

    #[test]
    fn projection_of_p2_along_ray() {
        let f = projective(2);
        let p = f.project(&EdgeVectors::primitive(3), &[0]).unwrap();
        assert_eq!(p.fan.rank, 1);
        assert_eq!(p.fan.rays.len(), 2);
        assert_eq!(&p.fan.rays[0][0] + &p.fan.rays[1][0], Z::zero());
        assert_eq!(p.fan.degree().unwrap(), 1);
    }

    #[test]
    fn validation_catches_defects() {
        let mut f = projective(2);
        f.simplices.remove(&vec![0]);
        assert!(f.validate(&EdgeVectors::primitive(3)).iter().any(|v| v.kind == "face-closure"));
        let g = MultiFan::simple(2, &[&[1, 0], &[2, 0], &[0, 1]], &[&[0, 1]]);
        assert!(g.validate(&EdgeVectors::primitive(3)).iter().any(|v| v.kind == "ray"));
    }

    #[test]
    fn glued_star_subdivision_degrees() {
        let plus = MultiFan::simple(2, &[&[1, 0], &[0, 1], &[1, 1]], &[&[0, 2], &[2, 1]]);
        let minus = MultiFan::simple(2, &[&[1, 0], &[0, 1]], &[&[0, 1]]);
        let (g, _) =
            glue_difference(&plus, &EdgeVectors::primitive(3), &minus, &EdgeVectors::primitive(2), &[(0, 0), (1, 1)])
                .unwrap();
        let t = g.degree_table().unwrap();
        assert_eq!(t[&vec![]], 0);
        assert_eq!(t[&vec![0]], 0);
        assert_eq!(t[&vec![2]], 1);
        assert_eq!(t[&vec![0, 1]], -1);
        assert_eq!(t[&vec![0, 2]], 1);
    }

    #[test]
    fn fan_glued_with_itself_has_zero_degrees() {
        let f = projective(2);
        let e = EdgeVectors::primitive(3);
        let (g, _) = glue_difference(&f, &e, &f, &e, &[(0, 0), (1, 1), (2, 2)]).unwrap();
        assert!(g.degree_table().unwrap().values().all(|&d| d == 0));
    }

    #[test]
    fn cube_fan_faces() {
        let c = cube_fan();
        assert!(!c.is_simplicial());
        let faces = c.faces();
        // 6 squares + 12 edges + 8 rays + empty face.
        assert_eq!(faces.len(), 6 + 12 + 8 + 1);
        assert!(c.qgorenstein_check(&EdgeVectors::primitive(8)));
        let mut d = vec![q(1); 8];
        d[0] = q(2);
        assert!(c.qcartier_check(&EdgeVectors::primitive(8), &d).is_err());
    }

    #[test]
    fn multiplicity_two_degree() {
        assert_eq!(multiplicity_multifan(&projective(1), 2).unwrap().degree().unwrap(), 2);
    }
}
