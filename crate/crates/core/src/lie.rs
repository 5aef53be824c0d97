//! Real semisimple Lie algebras of noncompact type in a Killing-adapted basis.
//!
//! Basis order is always `p` first, then `k`. In the stored coordinates the
//! Killing form is `+1` on `p`, `-1` on `k`, and the Cartan involution is
//! `diag(-1 on p, +1 on k)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{frob, gram_schmidt, max_abs, DMat, DVec};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LieAlgebraData {
    pub label: String,
    pub dim: usize,
    /// `dim p`; `p` occupies indices `0..np`.
    pub np: usize,
    /// `c[(i * dim + j) * dim + k]` is the `e_k` coefficient of `[e_i, e_j]`.
    pub structure: Vec<f64>,
    pub killing: DMat,
    pub involution: DMat,
    /// Simple factor each basis vector belongs to.
    pub factor_of: Vec<usize>,
    pub factor_labels: Vec<String>,
    /// Matrix realization of each basis vector, when one is known.
    #[serde(skip)]
    pub matrices: Vec<DMat>,
}

impl LieAlgebraData {
    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> f64 {
        self.structure[(i * self.dim + j) * self.dim + k]
    }

    pub fn nk(&self) -> usize {
        self.dim - self.np
    }

    pub fn p_indices(&self) -> std::ops::Range<usize> {
        0..self.np
    }

    pub fn k_indices(&self) -> std::ops::Range<usize> {
        self.np..self.dim
    }

    pub fn bracket(&self, x: &DVec, y: &DVec) -> DVec {
        let n = self.dim;
        let mut out = DVec::zeros(n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let w = x[i] * y[j];
                if w == 0.0 {
                    continue;
                }
                let base = (i * n + j) * n;
                for k in 0..n {
                    out[k] += w * self.structure[base + k];
                }
            }
        }
        out
    }

    /// Matrix of `ad(x)` acting on coordinate vectors.
    pub fn ad(&self, x: &DVec) -> DMat {
        let n = self.dim;
        let mut m = DMat::zeros(n, n);
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                let base = (i * n + j) * n;
                for k in 0..n {
                    m[(k, j)] += x[i] * self.structure[base + k];
                }
            }
        }
        m
    }

    pub fn ad_basis(&self, i: usize) -> DMat {
        let mut e = DVec::zeros(self.dim);
        e[i] = 1.0;
        self.ad(&e)
    }

    pub fn killing_form(&self, x: &DVec, y: &DVec) -> f64 {
        (x.transpose() * &self.killing * y)[(0, 0)]
    }

    /// `B_theta(x, y) = -B(x, theta y)`, positive definite.
    pub fn b_theta(&self, x: &DVec, y: &DVec) -> f64 {
        -(x.transpose() * &self.killing * (&self.involution * y))[(0, 0)]
    }

    pub fn theta(&self, x: &DVec) -> DVec {
        &self.involution * x
    }

    pub fn basis_vector(&self, i: usize) -> DVec {
        let mut e = DVec::zeros(self.dim);
        e[i] = 1.0;
        e
    }

    pub fn is_simple(&self) -> bool {
        self.factor_labels.len() == 1
    }

    /// Build from canonical matrix lists for `p` and `k` of a simple algebra
    /// with Cartan involution `X -> -X^T`.
    pub fn from_matrices(label: &str, p_mats: Vec<DMat>, k_mats: Vec<DMat>) -> Result<Self> {
        let np = p_mats.len();
        let mut mats = p_mats;
        mats.extend(k_mats);
        let (c0, _) = structure_from_matrices(&mats)?;
        let dim = mats.len();
        let kill0 = killing_from_structure(dim, &c0);
        let sign = |i: usize| if i < np { 1.0 } else { -1.0 };
        let ip = |x: &DVec, y: &DVec| (x.transpose() * &kill0 * y)[(0, 0)];
        let mut transform: Vec<DVec> = Vec::with_capacity(dim);
        let p_vecs: Vec<DVec> = (0..np).map(|i| unit(dim, i)).collect();
        let k_vecs: Vec<DVec> = (np..dim).map(|i| unit(dim, i)).collect();
        transform.extend(gram_schmidt(&p_vecs, ip, 1e-10));
        transform.extend(gram_schmidt(&k_vecs, |x, y| -ip(x, y), 1e-10));
        if transform.len() != dim {
            return Err(Error::Numerical(format!(
                "{label}: Killing form degenerate on p or k ({} of {dim})",
                transform.len()
            )));
        }
        let new_mats: Vec<DMat> = transform
            .iter()
            .map(|t| {
                let mut m = DMat::zeros(mats[0].nrows(), mats[0].ncols());
                for (c, b) in t.iter().zip(&mats) {
                    if *c != 0.0 {
                        m += b * *c;
                    }
                }
                m
            })
            .collect();
        let (structure, _) = structure_from_matrices(&new_mats)?;
        let killing = killing_from_structure(dim, &structure);
        let involution = DMat::from_fn(dim, dim, |i, j| if i == j { -sign(i) } else { 0.0 });
        let alg = LieAlgebraData {
            label: label.to_string(),
            dim,
            np,
            structure,
            killing,
            involution,
            factor_of: vec![0; dim],
            factor_labels: vec![label.to_string()],
            matrices: new_mats,
        };
        // the matrix involution must agree with the diagonal one
        for (i, m) in alg.matrices.iter().enumerate() {
            let s = -m.transpose();
            let want = m * (-sign(i));
            if (s - want).norm() > 1e-10 * m.norm().max(1.0) {
                return Err(Error::Numerical(format!("{label}: basis vector {i} not an eigenvector of -X^T")));
            }
        }
        Ok(alg)
    }

    /// Direct sum, reordered so all `p` directions precede all `k` directions.
    pub fn direct_sum(label: &str, a: &LieAlgebraData, b: &LieAlgebraData) -> Self {
        let dim = a.dim + b.dim;
        let np = a.np + b.np;
        // old index in a or b -> new index
        let map_a = |i: usize| if i < a.np { i } else { np + (i - a.np) };
        let map_b = |i: usize| if i < b.np { a.np + i } else { np + a.nk() + (i - b.np) };
        let mut structure = vec![0.0; dim * dim * dim];
        for (alg, map) in [(a, &map_a as &dyn Fn(usize) -> usize), (b, &map_b)] {
            for i in 0..alg.dim {
                for j in 0..alg.dim {
                    for k in 0..alg.dim {
                        let v = alg.c(i, j, k);
                        if v != 0.0 {
                            structure[(map(i) * dim + map(j)) * dim + map(k)] = v;
                        }
                    }
                }
            }
        }
        let mut killing = DMat::zeros(dim, dim);
        let mut involution = DMat::zeros(dim, dim);
        let mut factor_of = vec![0; dim];
        let fa = a.factor_labels.len();
        for i in 0..a.dim {
            factor_of[map_a(i)] = a.factor_of[i];
            for j in 0..a.dim {
                killing[(map_a(i), map_a(j))] = a.killing[(i, j)];
                involution[(map_a(i), map_a(j))] = a.involution[(i, j)];
            }
        }
        for i in 0..b.dim {
            factor_of[map_b(i)] = fa + b.factor_of[i];
            for j in 0..b.dim {
                killing[(map_b(i), map_b(j))] = b.killing[(i, j)];
                involution[(map_b(i), map_b(j))] = b.involution[(i, j)];
            }
        }
        let mut factor_labels = a.factor_labels.clone();
        factor_labels.extend(b.factor_labels.iter().cloned());
        let mut matrices = Vec::new();
        if !a.matrices.is_empty() && !b.matrices.is_empty() {
            let (ra, rb) = (a.matrices[0].nrows(), b.matrices[0].nrows());
            let mut slots: Vec<Option<DMat>> = vec![None; dim];
            for (i, m) in a.matrices.iter().enumerate() {
                let mut big = DMat::zeros(ra + rb, ra + rb);
                big.view_mut((0, 0), (ra, ra)).copy_from(m);
                slots[map_a(i)] = Some(big);
            }
            for (i, m) in b.matrices.iter().enumerate() {
                let mut big = DMat::zeros(ra + rb, ra + rb);
                big.view_mut((ra, ra), (rb, rb)).copy_from(m);
                slots[map_b(i)] = Some(big);
            }
            matrices = slots.into_iter().map(|m| m.unwrap()).collect();
        }
        LieAlgebraData {
            label: label.to_string(),
            dim,
            np,
            structure,
            killing,
            involution,
            factor_of,
            factor_labels,
            matrices,
        }
    }

    /// Structural self-checks. All residuals are absolute except Jacobi,
    /// which is relative to the largest structure constant.
    pub fn check(&self) -> AlgebraCheck {
        let n = self.dim;
        let cmax = self.structure.iter().fold(0.0_f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        let mut antisymmetry = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    antisymmetry = antisymmetry.max((self.c(i, j, k) + self.c(j, i, k)).abs());
                }
            }
        }
        let ads: Vec<DMat> = (0..n).map(|i| self.ad_basis(i)).collect();
        // Jacobi: ad([e_i, e_j]) = [ad e_i, ad e_j]
        let mut jacobi = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut lhs = DMat::zeros(n, n);
                for k in 0..n {
                    let v = self.c(i, j, k);
                    if v != 0.0 {
                        lhs += &ads[k] * v;
                    }
                }
                let rhs = &ads[i] * &ads[j] - &ads[j] * &ads[i];
                jacobi = jacobi.max(max_abs(&(lhs - rhs)));
            }
        }
        let jacobi = jacobi / cmax;
        let kill_recomputed = killing_from_structure(n, &self.structure);
        let killing_consistency = max_abs(&(&kill_recomputed - &self.killing));
        let mut invariance = 0.0_f64;
        for i in 0..n {
            let ad = &ads[i];
            let m = ad.transpose() * &self.killing + &self.killing * ad;
            invariance = invariance.max(max_abs(&m));
        }
        let sigma = &self.involution;
        let involutive = max_abs(&(sigma * sigma - DMat::identity(n, n)));
        let mut automorphism = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let ei = self.basis_vector(i);
                let ej = self.basis_vector(j);
                let lhs = sigma * self.bracket(&ei, &ej);
                let rhs = self.bracket(&(sigma * &ei), &(sigma * &ej));
                automorphism = automorphism.max((lhs - rhs).amax());
            }
        }
        let np = self.np;
        let bp = self.killing.view((0, 0), (np, np)).into_owned();
        let bk = self.killing.view((np, np), (n - np, n - np)).into_owned();
        let cross = self.killing.view((0, np), (np, n - np)).into_owned();
        let p_min_eig = crate::linalg::min_eig(&bp);
        let k_max_eig = crate::linalg::max_eig(&bk);
        let orthogonality = max_abs(&cross);
        let b_theta = -&self.killing * sigma;
        let orthonormality = max_abs(&(b_theta - DMat::identity(n, n)));
        // ad(p) symmetric and ad(k) antisymmetric for B_theta
        let mut ad_symmetry = 0.0_f64;
        for (i, ad) in ads.iter().enumerate() {
            let r = if i < np { ad - ad.transpose() } else { ad + ad.transpose() };
            ad_symmetry = ad_symmetry.max(max_abs(&r));
        }
        let trace_form = self.trace_form_ratio();
        AlgebraCheck {
            antisymmetry,
            jacobi,
            killing_consistency,
            invariance,
            involutive,
            automorphism,
            p_min_eig,
            k_max_eig,
            orthogonality,
            orthonormality,
            ad_symmetry,
            trace_form_scale: trace_form.map(|t| t.0),
            trace_form_residual: trace_form.map(|t| t.1),
        }
    }

    /// `(c, residual)` with `B(X, Y) ~ c tr(XY)` on a simple matrix algebra.
    pub fn trace_form_ratio(&self) -> Option<(f64, f64)> {
        if !self.is_simple() || self.matrices.is_empty() {
            return None;
        }
        let n = self.dim;
        let tr = DMat::from_fn(n, n, |i, j| (&self.matrices[i] * &self.matrices[j]).trace());
        let c = self.killing[(0, 0)] / tr[(0, 0)];
        let res = max_abs(&(&self.killing - &tr * c)) / max_abs(&self.killing);
        Some((c, res))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AlgebraCheck {
    pub antisymmetry: f64,
    pub jacobi: f64,
    pub killing_consistency: f64,
    pub invariance: f64,
    pub involutive: f64,
    pub automorphism: f64,
    pub p_min_eig: f64,
    pub k_max_eig: f64,
    pub orthogonality: f64,
    pub orthonormality: f64,
    pub ad_symmetry: f64,
    pub trace_form_scale: Option<f64>,
    pub trace_form_residual: Option<f64>,
}

impl AlgebraCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.antisymmetry <= tol
            && self.jacobi <= tol
            && self.killing_consistency <= tol
            && self.invariance <= tol
            && self.involutive <= tol
            && self.automorphism <= tol
            && self.p_min_eig > 0.0
            && self.k_max_eig < 0.0
            && self.orthogonality <= tol
            && self.orthonormality <= tol
            && self.ad_symmetry <= tol
            && self.trace_form_residual.is_none_or(|r| r <= tol)
    }
}

fn unit(n: usize, i: usize) -> DVec {
    let mut e = DVec::zeros(n);
    e[i] = 1.0;
    e
}

/// Structure constants of a matrix basis, and the worst closure residual.
fn structure_from_matrices(mats: &[DMat]) -> Result<(Vec<f64>, f64)> {
    let n = mats.len();
    let gram = DMat::from_fn(n, n, |i, j| frob(&mats[i], &mats[j]));
    let chol = gram
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Numerical("matrix basis is linearly dependent".into()))?;
    let mut c = vec![0.0; n * n * n];
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in 0..n {
            let br = &mats[i] * &mats[j] - &mats[j] * &mats[i];
            let rhs = DVec::from_fn(n, |k, _| frob(&mats[k], &br));
            let coords = chol.solve(&rhs);
            let mut recon = -br.clone();
            for k in 0..n {
                c[(i * n + j) * n + k] = coords[k];
                recon += &mats[k] * coords[k];
            }
            worst = worst.max(max_abs(&recon));
        }
    }
    if worst > 1e-9 {
        return Err(Error::Numerical(format!("matrix span not closed under bracket (residual {worst:e})")));
    }
    Ok((c, worst))
}

/// `B_ab = tr(ad e_a ad e_b)`.
pub fn killing_from_structure(n: usize, c: &[f64]) -> DMat {
    let idx = |i: usize, j: usize, k: usize| (i * n + j) * n + k;
    DMat::from_fn(n, n, |a, b| {
        let mut s = 0.0;
        for j in 0..n {
            for k in 0..n {
                s += c[idx(a, j, k)] * c[idx(b, k, j)];
            }
        }
        s
    })
}

// ---------------------------------------------------------------------------
// Matrix models

fn e(n: usize, i: usize, j: usize) -> DMat {
    let mut m = DMat::zeros(n, n);
    m[(i, j)] = 1.0;
    m
}

/// Multiplication in the Cayley-Dickson algebra of dimension 1, 2, 4 or 8:
/// `(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))`.
pub fn cayley_dickson_mul(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    debug_assert_eq!(n, y.len());
    if n == 1 {
        return vec![x[0] * y[0]];
    }
    let h = n / 2;
    let (a, b) = x.split_at(h);
    let (c, d) = y.split_at(h);
    let ac = cayley_dickson_mul(a, c);
    let db = cayley_dickson_mul(&cayley_dickson_conj(d), b);
    let da = cayley_dickson_mul(d, a);
    let bc = cayley_dickson_mul(b, &cayley_dickson_conj(c));
    let mut out = Vec::with_capacity(n);
    out.extend(ac.iter().zip(&db).map(|(p, q)| p - q));
    out.extend(da.iter().zip(&bc).map(|(p, q)| p + q));
    out
}

pub fn cayley_dickson_conj(x: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = x.iter().map(|v| -v).collect();
    out[0] = x[0];
    out
}

/// Real matrix of left multiplication by a complex number or quaternion.
fn left_mult(q: &[f64]) -> DMat {
    let d = q.len();
    let mut m = DMat::zeros(d, d);
    for col in 0..d {
        let mut u = vec![0.0; d];
        u[col] = 1.0;
        let prod = cayley_dickson_mul(q, &u);
        for row in 0..d {
            m[(row, col)] = prod[row];
        }
    }
    m
}

fn unit_element(d: usize, s: usize) -> Vec<f64> {
    let mut u = vec![0.0; d];
    u[s] = 1.0;
    u
}

/// Real form of a matrix over R, C or H given as entries `(row, col, value)`.
fn realify(n: usize, d: usize, entries: &[(usize, usize, Vec<f64>)]) -> DMat {
    let mut m = DMat::zeros(n * d, n * d);
    for (i, j, q) in entries {
        let l = left_mult(q);
        let mut block = m.view_mut((i * d, j * d), (d, d));
        block += l;
    }
    m
}

/// `so(n,1)`: `p` spanned by `E_{i,n} + E_{n,i}`, `k = so(n)`.
pub fn so_n1(n: usize) -> Result<LieAlgebraData> {
    hyperbolic_matrices(&format!("so({n},1)"), n, 1)
}

/// `su(n,1)` via 2x2 real blocks.
pub fn su_n1(n: usize) -> Result<LieAlgebraData> {
    hyperbolic_matrices(&format!("su({n},1)"), n, 2)
}

/// `sp(n,1)` via 4x4 left-multiplication blocks.
pub fn sp_n1(n: usize) -> Result<LieAlgebraData> {
    hyperbolic_matrices(&format!("sp({n},1)"), n, 4)
}

/// Shared construction of `so/su/sp(n,1)` over the division algebra of
/// real dimension `d`.
fn hyperbolic_matrices(label: &str, n: usize, d: usize) -> Result<LieAlgebraData> {
    if n < 1 {
        return Err(Error::Invalid(format!("{label}: n must be positive")));
    }
    let size = n + 1;
    let conj = |q: &Vec<f64>| cayley_dickson_conj(q);
    let mut p = Vec::new();
    for a in 0..n {
        for s in 0..d {
            let q = unit_element(d, s);
            p.push(realify(size, d, &[(a, n, q.clone()), (n, a, conj(&q))]));
        }
    }
    let mut k = Vec::new();
    for a in 0..n {
        for b in (a + 1)..n {
            for s in 0..d {
                let q = unit_element(d, s);
                let neg: Vec<f64> = conj(&q).iter().map(|v| -v).collect();
                k.push(realify(size, d, &[(a, b, q.clone()), (b, a, neg)]));
            }
        }
    }
    match d {
        1 => {}
        2 => {
            // i(E_jj - E_nn): traceless diagonal part of u(n) + u(1)
            let i = unit_element(2, 1);
            let mi: Vec<f64> = i.iter().map(|v| -v).collect();
            for a in 0..n {
                k.push(realify(size, d, &[(a, a, i.clone()), (n, n, mi.clone())]));
            }
        }
        _ => {
            for a in 0..size {
                for s in 1..d {
                    k.push(realify(size, d, &[(a, a, unit_element(d, s))]));
                }
            }
        }
    }
    LieAlgebraData::from_matrices(label, p, k)
}

/// `sl(n, R)`: `p` symmetric traceless (diagonal generators first), `k = so(n)`.
pub fn sl_n(n: usize) -> Result<LieAlgebraData> {
    let mut p = Vec::new();
    for i in 0..n.saturating_sub(1) {
        p.push(e(n, i, i) - e(n, i + 1, i + 1));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            p.push(e(n, i, j) + e(n, j, i));
        }
    }
    let mut k = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            k.push(e(n, i, j) - e(n, j, i));
        }
    }
    LieAlgebraData::from_matrices(&format!("sl({n},R)"), p, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quaternion_units_multiply() {
        let i = unit_element(4, 1);
        let j = unit_element(4, 2);
        let k = cayley_dickson_mul(&i, &j);
        let norm: f64 = k.iter().map(|v| v * v).sum();
        assert!((norm - 1.0).abs() < 1e-15);
        assert_eq!(k[0], 0.0);
        let kk = cayley_dickson_mul(&k, &k);
        assert_eq!(kk[0], -1.0);
    }

    #[test]
    fn dimensions_match_known_values() {
        assert_eq!(so_n1(3).unwrap().dim, 6);
        assert_eq!(su_n1(2).unwrap().dim, 8);
        let sp = sp_n1(2).unwrap();
        assert_eq!((sp.dim, sp.np), (21, 8));
        let sl = sl_n(3).unwrap();
        assert_eq!((sl.dim, sl.np), (8, 5));
    }

    #[test]
    fn so21_trace_form_scale() {
        let g = so_n1(2).unwrap();
        let (c, res) = g.trace_form_ratio().unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        assert!(res < 1e-12);
    }

    #[test]
    fn checks_pass_on_all_models() {
        for g in [so_n1(2), so_n1(4), su_n1(2), su_n1(3), sp_n1(2), sl_n(3), sl_n(4)] {
            let g = g.unwrap();
            let c = g.check();
            assert!(c.passes(1e-10), "{}: {:?}", g.label, c);
        }
    }

    #[test]
    fn direct_sum_is_block_diagonal() {
        let a = so_n1(2).unwrap();
        let b = sl_n(3).unwrap();
        let s = LieAlgebraData::direct_sum("x", &a, &b);
        assert_eq!(s.np, a.np + b.np);
        assert!(s.check().passes(1e-10));
        // brackets across factors vanish
        for i in 0..s.dim {
            for j in 0..s.dim {
                if s.factor_of[i] != s.factor_of[j] {
                    for k in 0..s.dim {
                        assert_eq!(s.c(i, j, k), 0.0);
                    }
                }
            }
        }
    }
}
