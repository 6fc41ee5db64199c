//! Integer and rational linear algebra on the lattice `L = Z^n`.
//!
//! Vectors of `L` are integer row vectors in the standard basis; functionals
//! in `L* ⊗ Q` are rational row vectors paired by the dot product.

use crate::arith::{dot_q, dot_qz, frac, qz, Q, Z};
use crate::error::{Error, Result};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type IntMatrix = Vec<Vec<Z>>;
pub type RatMatrix = Vec<Vec<Q>>;

/// Smith normal form `U * M * V = D` with `U`, `V` unimodular.
#[derive(Debug, Clone)]
pub struct Snf {
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal entries `d_1 | d_2 | ...`, all positive, length = rank.
    pub diag: Vec<Z>,
}

fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Z::one() } else { Z::zero() }).collect()).collect()
}

pub fn identity_q(n: usize) -> RatMatrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { Q::one() } else { Q::zero() }).collect()).collect()
}

/// Smith normal form by repeated minimal-absolute-value pivoting.
pub fn smith_normal_form(m: &IntMatrix) -> Snf {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut a = m.clone();
    let mut u = identity(rows);
    let mut v = identity(cols);
    let mut diag = Vec::new();

    for t in 0..rows.min(cols) {
        loop {
            // Minimal nonzero |entry| in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                return Snf { u, v, diag };
            };
            a.swap(t, pi);
            u.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            for row in v.iter_mut() {
                row.swap(t, pj);
            }

            let mut dirty = false;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let qt = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let s = &qt * &a[t][j];
                    a[i][j] -= s;
                }
                for j in 0..rows {
                    let s = &qt * &u[t][j];
                    u[i][j] -= s;
                }
                dirty |= !a[i][t].is_zero();
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let qt = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let s = &qt * &a[i][t];
                    a[i][j] -= s;
                }
                for i in 0..cols {
                    let s = &qt * &v[i][t];
                    v[i][j] -= s;
                }
                dirty |= !a[t][j].is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility of the trailing block by the pivot.
            let mut offender = None;
            'outer: for i in t + 1..rows {
                for j in t + 1..cols {
                    if !(&a[i][j] % &a[t][t]).is_zero() {
                        offender = Some(i);
                        break 'outer;
                    }
                }
            }
            if let Some(i) = offender {
                for j in t..cols {
                    let s = a[i][j].clone();
                    a[t][j] += s;
                }
                for j in 0..rows {
                    let s = u[i][j].clone();
                    u[t][j] += s;
                }
                continue;
            }
            break;
        }
        if a[t][t].is_negative() {
            for j in t..cols {
                a[t][j] = -a[t][j].clone();
            }
            for j in 0..rows {
                u[t][j] = -u[t][j].clone();
            }
        }
        diag.push(a[t][t].clone());
    }
    Snf { u, v, diag }
}

pub fn mat_mul_z(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).fold(Z::zero(), |acc, k| acc + &row[k] * &b[k][j])).collect())
        .collect()
}

pub fn mat_mul_q(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).fold(Q::zero(), |acc, k| acc + &row[k] * &b[k][j])).collect())
        .collect()
}

pub fn to_q_matrix(m: &IntMatrix) -> RatMatrix {
    m.iter().map(|r| r.iter().map(qz).collect()).collect()
}

pub fn transpose<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len()).map(|j| m.iter().map(|r| r[j].clone()).collect()).collect()
}

/// Row echelon form over Q; returns (reduced matrix, pivot columns).
pub fn rref(m: &RatMatrix) -> (RatMatrix, Vec<usize>) {
    let mut a = m.clone();
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for j in c..cols {
            a[r][j] = &a[r][j] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in c..cols {
                    let s = &f * &a[r][j];
                    a[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    (a, pivots)
}

pub fn rank_q(m: &RatMatrix) -> usize {
    rref(m).1.len()
}

pub fn rank_z(m: &IntMatrix) -> usize {
    rank_q(&to_q_matrix(m))
}

pub fn det_q(m: &RatMatrix) -> Q {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Q::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Q::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let s = &f * &a[c][j];
                a[i][j] -= s;
            }
        }
    }
    det
}

pub fn det_z(m: &IntMatrix) -> Z {
    det_q(&to_q_matrix(m)).to_integer()
}

pub fn inverse_q(m: &RatMatrix) -> Option<RatMatrix> {
    let n = m.len();
    let aug: RatMatrix = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.len() < n || piv[n - 1] >= n {
        return None;
    }
    Some(red.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Solves `x * A = b` for a row vector `x` (A given by rows); returns one
/// solution or `None` when inconsistent.
pub fn solve_left(a: &RatMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let at = transpose(a);
    solve_right(&at, b)
}

/// Solves `A x = b`; returns one solution (free variables zero) or `None`.
pub fn solve_right(a: &RatMatrix, b: &[Q]) -> Option<Vec<Q>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let aug: RatMatrix = a
        .iter()
        .zip(b)
        .map(|(r, bi)| {
            let mut row = r.clone();
            row.push(bi.clone());
            row
        })
        .collect();
    let (red, piv) = rref(&aug);
    if piv.last() == Some(&cols) {
        return None;
    }
    let mut x = vec![Q::zero(); cols];
    for (r, &c) in piv.iter().enumerate() {
        x[c] = red[r][cols].clone();
    }
    Some(x)
}

/// Dual basis of independent vectors `v_i`: functionals `u_i` with
/// `<u_i, v_j> = δ_ij` that vanish on the orthogonal complement of
/// `span(v)`.  With this normalisation restriction from a face to a
/// sub-face is orthogonal projection, so restrictions compose exactly.
pub fn dual_basis(vs: &[Vec<Z>]) -> Result<RatMatrix> {
    let k = vs.len();
    if k == 0 {
        return Ok(Vec::new());
    }
    let vq = to_q_matrix(&vs.to_vec());
    let gram: RatMatrix = (0..k).map(|i| (0..k).map(|j| dot_q(&vq[i], &vq[j])).collect()).collect();
    let ginv = inverse_q(&gram).ok_or_else(|| Error::DependentVectors(format!("{:?}", vs_to_string(vs))))?;
    Ok(mat_mul_q(&ginv, &vq))
}

fn vs_to_string(vs: &[Vec<Z>]) -> Vec<String> {
    vs.iter().map(|v| format!("({})", v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect()
}

/// Orthogonal projector onto `span(vs)` (identity-free when `vs` is empty).
pub fn orth_projector(vs: &[Vec<Z>], n: usize) -> RatMatrix {
    if vs.is_empty() {
        return vec![vec![Q::zero(); n]; n];
    }
    let duals = dual_basis(vs).expect("independent vectors");
    let vq = to_q_matrix(&vs.to_vec());
    // P = sum_i v_i^T u_i  (symmetric).
    let mut p = vec![vec![Q::zero(); n]; n];
    for (v, u) in vq.iter().zip(&duals) {
        for a in 0..n {
            if v[a].is_zero() {
                continue;
            }
            for b in 0..n {
                p[a][b] += &v[a] * &u[b];
            }
        }
    }
    p
}

/// An element `h` of `H = L_K / L_{K,V}` recorded by its coordinates
/// `f_i ∈ [0,1)` in the edge vectors and its representative
/// `v(h) = Σ f_i v_i ∈ L`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    pub f: Vec<Q>,
    pub v: Vec<Z>,
}

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.f.iter().all(|x| x.is_zero())
    }

    /// All coordinates nonzero.
    pub fn is_hat(&self) -> bool {
        self.f.iter().all(|x| !x.is_zero())
    }
}

/// The finite group `L_K / L_{K,V}` together with its enumerated elements.
#[derive(Debug, Clone)]
pub struct QuotientGroup {
    pub invariants: Vec<Z>,
    pub elements: Vec<GroupElement>,
}

impl QuotientGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }
}

/// Enumerates `L_K / L_{K,V}` where `L_K = L ∩ span(vs)` and
/// `L_{K,V} = span_Z(vs)`.
pub fn saturate_and_quotient(vs: &[Vec<Z>]) -> Result<QuotientGroup> {
    let k = vs.len();
    if k == 0 {
        return Ok(QuotientGroup {
            invariants: Vec::new(),
            elements: vec![GroupElement { f: Vec::new(), v: Vec::new() }],
        });
    }
    let n = vs[0].len();
    let m: IntMatrix = vs.to_vec();
    if rank_z(&m) < k {
        return Err(Error::DependentVectors(format!("{:?}", vs_to_string(vs))));
    }
    // U M W = D; the group is generated by frac((1/d_j) U_j) in edge
    // coordinates.
    let snf = smith_normal_form(&m);
    let invariants = snf.diag.clone();
    let mut elements = Vec::new();
    let mut counter = vec![Z::zero(); k];
    loop {
        let mut f = vec![Q::zero(); k];
        for j in 0..k {
            if counter[j].is_zero() {
                continue;
            }
            let coef = Q::new(counter[j].clone(), invariants[j].clone());
            for i in 0..k {
                f[i] += &coef * qz(&snf.u[j][i]);
            }
        }
        let f: Vec<Q> = f.iter().map(frac).collect();
        let mut v = vec![Q::zero(); n];
        for i in 0..k {
            for a in 0..n {
                v[a] += &f[i] * qz(&vs[i][a]);
            }
        }
        let v: Vec<Z> = v
            .into_iter()
            .map(|x| {
                debug_assert!(x.denom().is_one());
                x.to_integer()
            })
            .collect();
        elements.push(GroupElement { f, v });
        // Odometer over 0 <= counter_j < d_j.
        let mut j = 0;
        loop {
            if j == k {
                elements.sort_by(|a, b| a.f.cmp(&b.f));
                return Ok(QuotientGroup { invariants, elements });
            }
            counter[j] += 1;
            if counter[j] < invariants[j] {
                break;
            }
            counter[j] = Z::zero();
            j += 1;
        }
    }
}

/// Rotation number `r ∈ [0,1)` with `χ(u, h) = exp(2πi r)`.
///
/// `u` must pair integrally with every edge vector of the cone.
pub fn character(u: &[Q], vs: &[Vec<Z>], h: &GroupElement) -> Result<Q> {
    for v in vs {
        let p = dot_qz(u, v);
        if !p.denom().is_one() {
            return Err(Error::NotIntegralDual(format!("<u, v> = {p}")));
        }
    }
    Ok(frac(&dot_qz(u, &h.v)))
}

/// Projection `L -> L^K = L / L_K` in a basis adapted by Smith form.
#[derive(Debug, Clone)]
pub struct QuotientLattice {
    /// `n × (n-k)` integer matrix; `x ↦ x * proj`.
    pub proj: IntMatrix,
    /// Rows spanning a complement: `n-k` vectors of `L` mapping to the
    /// standard basis of `L^K`.
    pub section: IntMatrix,
}

impl QuotientLattice {
    pub fn apply(&self, x: &[Z]) -> Vec<Z> {
        let cols = self.proj.first().map_or(0, |r| r.len());
        (0..cols).map(|j| x.iter().zip(&self.proj).fold(Z::zero(), |acc, (a, r)| acc + a * &r[j])).collect()
    }
}

pub fn quotient_lattice(vs: &[Vec<Z>], n: usize) -> Result<QuotientLattice> {
    let k = vs.len();
    if k == 0 {
        return Ok(QuotientLattice { proj: identity(n), section: identity(n) });
    }
    let m: IntMatrix = vs.to_vec();
    if rank_z(&m) < k {
        return Err(Error::DependentVectors(format!("{:?}", vs_to_string(vs))));
    }
    let snf = smith_normal_form(&m);
    // Coordinates of x in the basis of rows of W^{-1} are x * W.
    let proj: IntMatrix = snf.v.iter().map(|row| row[k..].to_vec()).collect();
    let winv = inverse_q(&to_q_matrix(&snf.v)).expect("unimodular");
    let section: IntMatrix = winv[k..].iter().map(|r| r.iter().map(|x| x.to_integer()).collect()).collect();
    Ok(QuotientLattice { proj, section })
}

/// Coordinates of `x` in the independent vectors `vs`, if `x ∈ span(vs)`.
pub fn coordinates_in(vs: &[Vec<Z>], x: &[Q]) -> Option<Vec<Q>> {
    if vs.is_empty() {
        return if x.iter().all(|c| c.is_zero()) { Some(Vec::new()) } else { None };
    }
    solve_left(&to_q_matrix(&vs.to_vec()), x)
}
