//! Maximal abelian subalgebra, restricted roots, root vectors, walls and the
//! nilpotent structure constants `T_ij^k`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{cayley_dickson_conj, cayley_dickson_mul, LieAlgebraData};
use crate::linalg::{from_columns, gram_schmidt, kernel, sym_eigen, DMat, DVec};

/// Eigenvalues of `ad(a_j)` closer than this share a cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Two root covectors closer than this are the same root.
pub const ROOT_TOL: f64 = 1e-6;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootVector {
    /// Index into `RestrictedRootSystem::roots`.
    pub root: usize,
    pub x: DVec,
    pub y: DVec,
    pub p: DVec,
    pub k: DVec,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Root {
    /// `alpha(a_j)` for the orthonormal basis `a_j`; equal to the coordinates of
    /// `alpha^#`.
    pub alpha: DVec,
    pub multiplicity: usize,
    /// Indices into `RestrictedRootSystem::vectors`.
    pub members: Vec<usize>,
    /// Integer expansion over the simple roots.
    pub simple_coeffs: Vec<i64>,
    pub factor: usize,
}

impl Root {
    pub fn norm(&self) -> f64 {
        self.alpha.norm()
    }
    pub fn height(&self) -> i64 {
        self.simple_coeffs.iter().sum()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RestrictedRootSystem {
    pub algebra: LieAlgebraData,
    /// Killing-orthonormal basis of `a`, in algebra coordinates.
    pub a_basis: Vec<DVec>,
    /// Positive roots sorted by height.
    pub roots: Vec<Root>,
    /// One entry per positive root vector, grouped by root.
    pub vectors: Vec<RootVector>,
    pub k0: Vec<DVec>,
    /// Indices into `roots`, in order of first appearance.
    pub simple: Vec<usize>,
    /// Coordinates (on `a_basis`) of the regular element fixing positivity.
    pub positivity: DVec,
}

impl RestrictedRootSystem {
    pub fn rank(&self) -> usize {
        self.a_basis.len()
    }

    pub fn algebra(&self) -> &LieAlgebraData {
        &self.algebra
    }

    /// `n - r`, the number of root vectors.
    pub fn n_vectors(&self) -> usize {
        self.vectors.len()
    }

    pub fn alpha_of_vector(&self, i: usize) -> &DVec {
        &self.roots[self.vectors[i].root].alpha
    }

    pub fn shortest_root_norm(&self) -> f64 {
        self.roots.iter().map(|r| r.norm()).fold(f64::INFINITY, f64::min)
    }

    /// Element of `a` with the given coordinates, in algebra coordinates.
    pub fn a_element(&self, coords: &DVec) -> DVec {
        let mut v = DVec::zeros(self.algebra.dim);
        for (c, a) in coords.iter().zip(&self.a_basis) {
            v += a * *c;
        }
        v
    }

    /// Residuals of the root-space identities, worst over all vectors.
    pub fn check(&self) -> RootCheck {
        let g = &self.algebra;
        let mut eigen = 0.0_f64;
        let mut sharp = 0.0_f64;
        let mut orth = 0.0_f64;
        let mut theta = 0.0_f64;
        for rv in &self.vectors {
            let root = &self.roots[rv.root];
            for (j, a) in self.a_basis.iter().enumerate() {
                let lhs = g.bracket(a, &rv.x);
                eigen = eigen.max((lhs - &rv.x * root.alpha[j]).amax());
                let lhs = g.bracket(a, &rv.p);
                eigen = eigen.max((lhs - &rv.k * root.alpha[j]).amax());
            }
            let xy = g.bracket(&rv.x, &rv.y);
            let want = -self.a_element(&root.alpha);
            sharp = sharp.max((xy - want).amax());
            theta = theta.max((g.theta(&rv.x) - &rv.y).amax());
        }
        let all: Vec<&DVec> = self
            .vectors
            .iter()
            .flat_map(|v| [&v.x, &v.y])
            .chain(self.a_basis.iter())
            .chain(self.k0.iter())
            .collect();
        for (i, u) in all.iter().enumerate() {
            for (j, v) in all.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                orth = orth.max((g.b_theta(u, v) - want).abs());
            }
        }
        let total = all.len();
        RootCheck {
            eigen_residual: eigen,
            sharp_residual: sharp,
            orthonormality: orth,
            theta_residual: theta,
            dimension_ok: total == g.dim,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RootCheck {
    pub eigen_residual: f64,
    pub sharp_residual: f64,
    pub orthonormality: f64,
    pub theta_residual: f64,
    pub dimension_ok: bool,
}

impl RootCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.dimension_ok
            && self.eigen_residual <= tol
            && self.sharp_residual <= tol
            && self.orthonormality <= tol
            && self.theta_residual <= tol
    }
}

/// Greedy maximal abelian subalgebra of `p`, certified by a centralizer
/// dimension count.
pub fn maximal_abelian(g: &LieAlgebraData) -> Result<Vec<DVec>> {
    let mut a: Vec<DVec> = Vec::new();
    let commutes = |a: &[DVec], w: &DVec| a.iter().all(|v| g.bracket(v, w).amax() <= 1e-10);
    for i in g.p_indices() {
        let mut w = g.basis_vector(i);
        for v in &a {
            let c = g.killing_form(v, &w);
            w -= v * c;
        }
        let n = g.killing_form(&w, &w);
        if n <= 1e-20 {
            continue;
        }
        let w = w / n.sqrt();
        if commutes(&a, &w) {
            a.push(w);
        }
    }
    loop {
        let cent = centralizer_in_p(g, &a);
        if cent.len() == a.len() {
            return Ok(a);
        }
        let extra = cent.iter().find_map(|c| {
            let mut w = c.clone();
            for v in &a {
                let s = g.killing_form(v, &w);
                w -= v * s;
            }
            let n = g.killing_form(&w, &w);
            (n > 1e-16).then(|| w / n.sqrt())
        });
        match extra {
            Some(w) if commutes(&a, &w) => a.push(w),
            _ => return Err(Error::Numerical("could not complete maximal abelian subalgebra".into())),
        }
        if a.len() > g.np {
            return Err(Error::Numerical("abelian subalgebra larger than p".into()));
        }
    }
}

/// Basis of `{v in p : [v, a] = 0}`, in algebra coordinates.
pub fn centralizer_in_p(g: &LieAlgebraData, a: &[DVec]) -> Vec<DVec> {
    let np = g.np;
    if a.is_empty() {
        return (0..np).map(|i| g.basis_vector(i)).collect();
    }
    let mut m = DMat::zeros(a.len() * g.dim, np);
    for (r, v) in a.iter().enumerate() {
        let ad = g.ad(v);
        for j in 0..np {
            for k in 0..g.dim {
                m[(r * g.dim + k, j)] = ad[(k, j)];
            }
        }
    }
    let ker = kernel(&m, 1e-9);
    (0..ker.ncols())
        .map(|c| {
            let mut v = DVec::zeros(g.dim);
            v.rows_mut(0, np).copy_from(&ker.column(c));
            v
        })
        .collect()
}

struct Cluster {
    basis: DMat,
    eigs: Vec<f64>,
}

/// Simultaneous eigenspaces of `ad(a_j)` on `g`.
fn joint_eigenspaces(g: &LieAlgebraData, a: &[DVec]) -> Vec<Cluster> {
    let mut clusters = vec![Cluster { basis: DMat::identity(g.dim, g.dim), eigs: Vec::new() }];
    for v in a {
        let ad = g.ad(v);
        let mut next = Vec::new();
        for cl in clusters {
            let m = cl.basis.transpose() * &ad * &cl.basis;
            let e = sym_eigen(&m);
            let mut start = 0;
            while start < e.values.len() {
                let mut end = start + 1;
                while end < e.values.len() && (e.values[end] - e.values[end - 1]).abs() < CLUSTER_TOL {
                    end += 1;
                }
                let mean = e.values[start..end].iter().sum::<f64>() / (end - start) as f64;
                let sub = &cl.basis * e.vectors.columns(start, end - start);
                let mut eigs = cl.eigs.clone();
                eigs.push(mean);
                next.push(Cluster { basis: sub, eigs });
                start = end;
            }
        }
        clusters = next;
    }
    clusters
}

/// Full restricted-root analysis of a noncompact semisimple algebra.
pub fn restricted_roots(g: &LieAlgebraData) -> Result<RestrictedRootSystem> {
    let a_basis = maximal_abelian(g)?;
    let r = a_basis.len();
    let positivity = DVec::from_fn(r, |j, _| std::f64::consts::PI.powi(-(j as i32)));
    let clusters = joint_eigenspaces(g, &a_basis);
    let mut zero: Option<DMat> = None;
    let mut positive: Vec<(DVec, DMat)> = Vec::new();
    for cl in clusters {
        let alpha = DVec::from_vec(cl.eigs.clone());
        if alpha.amax() < ROOT_TOL {
            zero = Some(match zero {
                None => cl.basis,
                Some(z) => {
                    let mut cols = crate::linalg::columns(&z);
                    cols.extend(crate::linalg::columns(&cl.basis));
                    from_columns(g.dim, &cols)
                }
            });
            continue;
        }
        if alpha.dot(&positivity) > 0.0 {
            // merge clusters that ended up with the same root
            if let Some(slot) = positive.iter_mut().find(|(a, _)| (a - &alpha).amax() < ROOT_TOL) {
                let mut cols = crate::linalg::columns(&slot.1);
                cols.extend(crate::linalg::columns(&cl.basis));
                slot.1 = from_columns(g.dim, &cols);
            } else {
                positive.push((alpha, cl.basis));
            }
        }
    }
    let zero = zero.ok_or_else(|| Error::Numerical("no zero root space".into()))?;
    let euclid = |x: &DVec, y: &DVec| x.dot(y);
    let k_cands: Vec<DVec> = g.k_indices().map(|i| &zero * (zero.transpose() * g.basis_vector(i))).collect();
    let k0 = gram_schmidt(&k_cands, euclid, 1e-8);
    if k0.len() + r != zero.ncols() {
        return Err(Error::Numerical(format!("m0 split failed: {} + {} != {}", k0.len(), r, zero.ncols())));
    }

    // simple roots: positive roots that are not a sum of two positive roots
    let is_sum = |alpha: &DVec| {
        positive.iter().any(|(b, _)| positive.iter().any(|(c, _)| (b + c - alpha).amax() < ROOT_TOL))
    };
    let simple_alphas: Vec<DVec> = positive.iter().filter(|(a, _)| !is_sum(a)).map(|(a, _)| a.clone()).collect();
    if simple_alphas.len() != r {
        return Err(Error::Numerical(format!("found {} simple roots for rank {r}", simple_alphas.len())));
    }
    let smat = from_columns(r, &simple_alphas);
    let lu = smat.clone().lu();
    let mut raw: Vec<(DVec, DMat, Vec<i64>)> = Vec::new();
    for (alpha, basis) in positive {
        let c = lu.solve(&alpha).ok_or_else(|| Error::Numerical("simple roots dependent".into()))?;
        let ci: Vec<i64> = c.iter().map(|v| v.round() as i64).collect();
        let back = &smat * DVec::from_iterator(r, ci.iter().map(|&v| v as f64));
        if (back - &alpha).amax() > ROOT_TOL || ci.iter().any(|&v| v < 0) {
            return Err(Error::Numerical("root is not a nonnegative integer combination".into()));
        }
        raw.push((alpha, basis, ci));
    }
    // by height, then by simple-root coefficients for determinism
    raw.sort_by(|a, b| {
        let ha: i64 = a.2.iter().sum();
        let hb: i64 = b.2.iter().sum();
        ha.cmp(&hb).then_with(|| b.2.cmp(&a.2))
    });

    let mut roots = Vec::new();
    let mut vectors = Vec::new();
    let s2 = std::f64::consts::SQRT_2;
    for (idx, (alpha, basis, coeffs)) in raw.into_iter().enumerate() {
        let cands: Vec<DVec> = (0..g.dim).map(|m| &basis * basis.row(m).transpose()).collect();
        let xs = gram_schmidt(&cands, euclid, 1e-8);
        if xs.len() != basis.ncols() {
            return Err(Error::Numerical("root space basis deficient".into()));
        }
        let mut members = Vec::new();
        let mut weight = vec![0.0; g.factor_labels.len()];
        for x in xs {
            for (i, v) in x.iter().enumerate() {
                weight[g.factor_of[i]] += v * v;
            }
            let y = g.theta(&x);
            let p = (&x - &y) / s2;
            let k = (&x + &y) / s2;
            members.push(vectors.len());
            vectors.push(RootVector { root: idx, x, y, p, k });
        }
        let factor = (0..weight.len()).max_by(|&i, &j| weight[i].total_cmp(&weight[j])).unwrap_or(0);
        roots.push(Root { alpha, multiplicity: members.len(), members, simple_coeffs: coeffs, factor });
    }
    let simple = (0..roots.len()).filter(|&i| roots[i].height() == 1).collect::<Vec<_>>();
    // reorder simple so that simple[j] has coefficient vector e_j
    let mut simple_sorted = vec![0; r];
    for &s in &simple {
        let j = roots[s].simple_coeffs.iter().position(|&c| c == 1).unwrap();
        simple_sorted[j] = s;
    }
    Ok(RestrictedRootSystem { algebra: g.clone(), a_basis, roots, vectors, k0, simple: simple_sorted, positivity })
}

// ---------------------------------------------------------------------------
// Walls

/// Class of a vector in a wall-adapted frame of `p`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameClass {
    OvA,
    UnA,
    OvRoot(usize),
    UnRoot(usize),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Wall {
    /// Simple roots (positions `0..rank`) lying in `ov B`.
    pub ov_simple: Vec<usize>,
    pub ov_roots: Vec<usize>,
    pub un_roots: Vec<usize>,
    /// Orthonormal bases in `a`-coordinates.
    pub ov_a: Vec<DVec>,
    pub un_a: Vec<DVec>,
    pub ov_vectors: Vec<usize>,
    pub un_vectors: Vec<usize>,
}

impl Wall {
    pub fn new(rs: &RestrictedRootSystem, ov_simple: &[usize]) -> Wall {
        let r = rs.rank();
        let mut ov_simple = ov_simple.to_vec();
        ov_simple.sort_unstable();
        ov_simple.dedup();
        let in_ov = |root: &Root| root.simple_coeffs.iter().enumerate().all(|(j, &c)| c == 0 || ov_simple.contains(&j));
        let ov_roots: Vec<usize> = (0..rs.roots.len()).filter(|&i| in_ov(&rs.roots[i])).collect();
        let un_roots: Vec<usize> = (0..rs.roots.len()).filter(|&i| !in_ov(&rs.roots[i])).collect();
        let sharp: Vec<DVec> = ov_simple.iter().map(|&j| rs.roots[rs.simple[j]].alpha.clone()).collect();
        let euclid = |x: &DVec, y: &DVec| x.dot(y);
        let ov_a = gram_schmidt(&sharp, euclid, 1e-10);
        let mut all = ov_a.clone();
        all.extend((0..r).map(|j| {
            let mut e = DVec::zeros(r);
            e[j] = 1.0;
            e
        }));
        let full = gram_schmidt(&all, euclid, 1e-10);
        let un_a = full[ov_a.len()..].to_vec();
        let collect = |set: &[usize]| -> Vec<usize> { set.iter().flat_map(|&i| rs.roots[i].members.clone()).collect() };
        let ov_vectors = collect(&ov_roots);
        let un_vectors = collect(&un_roots);
        Wall { ov_simple, ov_roots, un_roots, ov_a, un_a, ov_vectors, un_vectors }
    }

    /// Wall key such as `{}` for the chamber or `{0,1}`.
    pub fn key(&self) -> String {
        let inner: Vec<String> = self.ov_simple.iter().map(|j| j.to_string()).collect();
        format!("{{{}}}", inner.join(","))
    }

    pub fn is_chamber(&self) -> bool {
        self.ov_simple.is_empty()
    }

    pub fn is_origin(&self, rank: usize) -> bool {
        self.ov_simple.len() == rank
    }

    /// Frame of `p` ordered `[ov a | un a | p_i(ov) | p_i(un)]`.
    pub fn frame(&self, rs: &RestrictedRootSystem) -> (Vec<DVec>, Vec<FrameClass>) {
        let mut vecs = Vec::new();
        let mut class = Vec::new();
        for c in &self.ov_a {
            vecs.push(rs.a_element(c));
            class.push(FrameClass::OvA);
        }
        for c in &self.un_a {
            vecs.push(rs.a_element(c));
            class.push(FrameClass::UnA);
        }
        for &i in &self.ov_vectors {
            vecs.push(rs.vectors[i].p.clone());
            class.push(FrameClass::OvRoot(i));
        }
        for &i in &self.un_vectors {
            vecs.push(rs.vectors[i].p.clone());
            class.push(FrameClass::UnRoot(i));
        }
        (vecs, class)
    }
}

/// All `2^r` walls, ordered by `|ov B|` then lexicographically.
pub fn enumerate_walls(rs: &RestrictedRootSystem) -> Vec<Wall> {
    let r = rs.rank();
    let mut masks: Vec<u32> = (0..(1u32 << r)).collect();
    masks.sort_by_key(|m| (m.count_ones(), (0..r).filter(|j| m >> j & 1 == 1).collect::<Vec<_>>()));
    masks
        .into_iter()
        .map(|m| {
            let ov: Vec<usize> = (0..r).filter(|j| m >> j & 1 == 1).collect();
            Wall::new(rs, &ov)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Nilpotent structure constants

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NilpotentData {
    pub dim: usize,
    /// `t[(i * dim + j) * dim + k] = T_ij^k`.
    pub t: Vec<f64>,
    /// Root of each basis element as a covector in orthonormal coordinates.
    pub alpha: Vec<DVec>,
}

impl NilpotentData {
    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[(i * self.dim + j) * self.dim + k]
    }

    /// `max_i |sum_l T_il^l|`.
    pub fn ttid1(&self) -> f64 {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|l| self.get(i, l, l)).sum::<f64>().abs())
            .fold(0.0, f64::max)
    }

    /// `max_{i,i'} |sum_{j,k} T_ij^k T_i'k^j|`.
    pub fn ttid2(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for i2 in 0..n {
                let mut s = 0.0;
                for j in 0..n {
                    for k in 0..n {
                        s += self.get(i, j, k) * self.get(i2, k, j);
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        worst
    }

    pub fn same_root(&self, a: usize, b: usize) -> bool {
        (&self.alpha[a] - &self.alpha[b]).amax() < ROOT_TOL
    }

    /// Sorted singular values of `T` viewed as a map `n -> End(n)`.
    pub fn singular_profile(&self) -> Vec<f64> {
        let n = self.dim;
        let m = DMat::from_fn(n * n, n, |row, k| self.get(row / n, row % n, k));
        let mut s = crate::linalg::svd(&m).singular;
        s.sort_by(f64::total_cmp);
        s
    }
}

/// `T_ij^k = B_theta(x_k, [x_i, x_j])` over all positive root vectors.
pub fn nilpotent_structure(rs: &RestrictedRootSystem) -> Result<NilpotentData> {
    let g = &rs.algebra;
    let n = rs.n_vectors();
    let mut t = vec![0.0; n * n * n];
    for i in 0..n {
        for j in 0..n {
            let br = g.bracket(&rs.vectors[i].x, &rs.vectors[j].x);
            let mut rest = br.clone();
            for k in 0..n {
                let c = g.b_theta(&rs.vectors[k].x, &br);
                t[(i * n + j) * n + k] = c;
                rest -= &rs.vectors[k].x * c;
            }
            if rest.amax() > 1e-8 {
                return Err(Error::Numerical("bracket of root vectors leaves n".into()));
            }
        }
    }
    let alpha = (0..n).map(|i| rs.alpha_of_vector(i).clone()).collect();
    Ok(NilpotentData { dim: n, t, alpha })
}

/// Default `|alpha^#|^2 = 1 / (2 (m_alpha + 4 m_2alpha))` for the rank-one
/// space over the division algebra of real dimension `d` with `K^m` as the
/// `alpha` part.
pub fn default_alpha_norm_sq(d: usize, m: usize) -> f64 {
    let ma = (d * m) as f64;
    let m2a = (d - 1) as f64;
    1.0 / (2.0 * (ma + 4.0 * m2a))
}

/// Nilpotent algebra `K^m + Im K` with `[v, w] = 2 Im(sum conj(v_a) w_a)`,
/// rescaled to a Killing-normalized root of squared length `alpha_norm_sq`.
pub fn nilpotent_model(d: usize, m: usize, alpha_norm_sq: Option<f64>) -> Result<NilpotentData> {
    if ![1, 2, 4, 8].contains(&d) {
        return Err(Error::Invalid(format!("division algebra dimension {d}")));
    }
    let a2 = alpha_norm_sq.unwrap_or_else(|| default_alpha_norm_sq(d, m));
    let anorm = a2.sqrt();
    let scale = MODEL_SCALE * anorm;
    let nv = d * m;
    let dim = nv + d - 1;
    let unit = |s: usize| {
        let mut u = vec![0.0; d];
        u[s] = 1.0;
        u
    };
    let mut t = vec![0.0; dim * dim * dim];
    for a in 0..m {
        for s in 0..d {
            for u in 0..d {
                let prod = cayley_dickson_mul(&cayley_dickson_conj(&unit(s)), &unit(u));
                for q in 1..d {
                    let v = 2.0 * prod[q] * scale;
                    if v != 0.0 {
                        let (i, j, k) = (a * d + s, a * d + u, nv + q - 1);
                        t[(i * dim + j) * dim + k] = v;
                    }
                }
            }
        }
    }
    let alpha = (0..dim)
        .map(|i| DVec::from_element(1, if i < nv { anorm } else { 2.0 * anorm }))
        .collect();
    Ok(NilpotentData { dim, t, alpha })
}

/// Factor relating the unscaled model bracket to Killing-normalized
/// structure constants: `T = T_model * |alpha^#| * MODEL_SCALE`.
pub const MODEL_SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{sl_n, so_n1, su_n1};

    #[test]
    fn hyperbolic_plane_roots() {
        let rs = restricted_roots(&so_n1(2).unwrap()).unwrap();
        assert_eq!(rs.rank(), 1);
        assert_eq!(rs.roots.len(), 1);
        assert_eq!(rs.roots[0].multiplicity, 1);
        assert!(rs.check().passes(1e-10));
    }

    #[test]
    fn sl3_is_a2() {
        let rs = restricted_roots(&sl_n(3).unwrap()).unwrap();
        assert_eq!(rs.rank(), 2);
        assert_eq!(rs.roots.len(), 3);
        assert!(rs.roots.iter().all(|r| r.multiplicity == 1));
        let n: Vec<f64> = rs.roots.iter().map(|r| r.norm()).collect();
        assert!((n[0] - n[2]).abs() < 1e-10);
        assert_eq!(enumerate_walls(&rs).len(), 4);
    }

    #[test]
    fn su21_has_root_and_double() {
        let rs = restricted_roots(&su_n1(2).unwrap()).unwrap();
        assert_eq!(rs.roots.len(), 2);
        assert_eq!(rs.roots[0].multiplicity, 2);
        assert_eq!(rs.roots[1].multiplicity, 1);
        let ratio = rs.roots[1].norm() / rs.roots[0].norm();
        assert!((ratio - 2.0).abs() < 1e-10);
        let a2 = rs.roots[0].norm().powi(2);
        assert!((a2 - default_alpha_norm_sq(2, 1)).abs() < 1e-12);
    }
}

#[cfg(test)]
mod model_tests {
    use super::*;
    use crate::lie::{so_n1, sp_n1, su_n1};

    #[test]
    fn model_matches_matrix_realizations() {
        for (g, d, m) in [(su_n1(2).unwrap(), 2, 1), (su_n1(3).unwrap(), 2, 2), (sp_n1(2).unwrap(), 4, 1), (so_n1(4).unwrap(), 1, 3)] {
            let rs = restricted_roots(&g).unwrap();
            let nd = nilpotent_structure(&rs).unwrap();
            let md = nilpotent_model(d, m, None).unwrap();
            let (a, b) = (nd.singular_profile(), md.singular_profile());
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-6, "{}: {a:?} vs {b:?}", g.label);
            }
            assert!(nd.ttid1() < 1e-10 && nd.ttid2() < 1e-10);
        }
    }

    #[test]
    fn octonionic_model_identities() {
        let md = nilpotent_model(8, 1, None).unwrap();
        assert_eq!(md.dim, 15);
        assert!(md.ttid1() < 1e-12);
        assert!(md.ttid2() < 1e-12);
        assert!((md.alpha[0][0].powi(2) - 1.0 / 72.0).abs() < 1e-15);
    }
}
