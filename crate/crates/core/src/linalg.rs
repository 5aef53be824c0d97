//! Dense helpers: Jacobi eigensolver, one-sided Jacobi SVD, kernels and
//! Gram-Schmidt under an arbitrary inner product.

use nalgebra::{DMatrix, DVector};

pub type DMat = DMatrix<f64>;
pub type DVec = DVector<f64>;

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct SymEigen {
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: DMat,
}

/// Cyclic Jacobi rotations. The input is symmetrized first.
pub fn sym_eigen(m: &DMat) -> SymEigen {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "sym_eigen needs a square matrix");
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMat::identity(n, n);
    let scale = a.norm().max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DMat::zeros(n, n);
    for (c, &i) in order.iter().enumerate() {
        vectors.set_column(c, &v.column(i));
    }
    SymEigen { values, vectors }
}

pub fn min_eig(m: &DMat) -> f64 {
    if m.nrows() == 0 {
        return f64::INFINITY;
    }
    sym_eigen(m).values[0]
}

pub fn max_eig(m: &DMat) -> f64 {
    if m.nrows() == 0 {
        return f64::NEG_INFINITY;
    }
    *sym_eigen(m).values.last().unwrap()
}

/// Thin SVD `A = U diag(s) V^T`, singular values descending.
#[derive(Clone, Debug)]
pub struct Svd {
    pub singular: Vec<f64>,
    pub u: DMat,
    pub v: DMat,
}

/// One-sided (Hestenes) Jacobi SVD. Tall inputs are reduced by QR first.
pub fn svd(a: &DMat) -> Svd {
    let (m, n) = a.shape();
    if n == 0 || m == 0 {
        return Svd { singular: vec![0.0; n.min(m)], u: DMat::zeros(m, 0), v: DMat::identity(n, n) };
    }
    if m < n {
        let t = svd(&a.transpose());
        return Svd { singular: t.singular, u: t.v, v: t.u };
    }
    let (q, mut w) = if m > n {
        let qr = a.clone().qr();
        (Some(qr.q()), qr.r())
    } else {
        (None, a.clone())
    };
    let k = w.nrows();
    let mut v = DMat::identity(n, n);
    for _sweep in 0..80 {
        let mut rotated = false;
        for p in 0..n {
            for r in (p + 1)..n {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..k {
                    let x = w[(i, p)];
                    let y = w[(i, r)];
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= 1e-15 * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..k {
                    let x = w[(i, p)];
                    let y = w[(i, r)];
                    w[(i, p)] = c * x - s * y;
                    w[(i, r)] = s * x + c * y;
                }
                for i in 0..n {
                    let x = v[(i, p)];
                    let y = v[(i, r)];
                    v[(i, p)] = c * x - s * y;
                    v[(i, r)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..n).map(|j| w.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let mut u = DMat::zeros(k, n);
    let mut vv = DMat::zeros(n, n);
    let mut singular = Vec::with_capacity(n);
    for (c, &j) in order.iter().enumerate() {
        let s = norms[j];
        singular.push(s);
        if s > 0.0 {
            u.set_column(c, &(w.column(j) / s));
        }
        vv.set_column(c, &v.column(j));
    }
    let u = match q {
        Some(q) => q * u,
        None => u,
    };
    Svd { singular, u, v: vv }
}

/// Orthonormal basis (columns) of the right kernel of `a`, dropping singular
/// values above `rel_tol * s_max`.
pub fn kernel(a: &DMat, rel_tol: f64) -> DMat {
    let n = a.ncols();
    if a.nrows() == 0 {
        return DMat::identity(n, n);
    }
    let (s, v) = if a.nrows() < n {
        // pad with zero rows so every right singular vector is returned
        let mut padded = DMat::zeros(n, n);
        padded.rows_mut(0, a.nrows()).copy_from(a);
        let d = svd(&padded);
        (d.singular, d.v)
    } else {
        let d = svd(a);
        (d.singular, d.v)
    };
    let smax = s.first().copied().unwrap_or(0.0);
    let cut = rel_tol * smax.max(f64::MIN_POSITIVE);
    let cols: Vec<usize> = (0..n).filter(|&j| s[j] <= cut || smax == 0.0).collect();
    let mut out = DMat::zeros(n, cols.len());
    for (c, &j) in cols.iter().enumerate() {
        out.set_column(c, &v.column(j));
    }
    out
}

/// Modified Gram-Schmidt (two passes) under the inner product `ip`.
/// Vectors whose residual norm falls below `tol` are dropped.
pub fn gram_schmidt<F>(vectors: &[DVec], ip: F, tol: f64) -> Vec<DVec>
where
    F: Fn(&DVec, &DVec) -> f64,
{
    let mut out: Vec<DVec> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in &out {
                let c = ip(e, &w);
                w -= e * c;
            }
        }
        let nrm2 = ip(&w, &w);
        if nrm2 > tol * tol {
            out.push(w / nrm2.sqrt());
        }
    }
    out
}

pub fn columns(m: &DMat) -> Vec<DVec> {
    (0..m.ncols()).map(|j| m.column(j).into_owned()).collect()
}

pub fn from_columns(n: usize, cols: &[DVec]) -> DMat {
    let mut m = DMat::zeros(n, cols.len());
    for (j, c) in cols.iter().enumerate() {
        m.set_column(j, c);
    }
    m
}

/// Principal angles (radians, ascending) between the column spans of two
/// matrices with orthonormal columns.
pub fn principal_angles(q1: &DMat, q2: &DMat) -> Vec<f64> {
    if q1.ncols() == 0 || q2.ncols() == 0 {
        return Vec::new();
    }
    let m = q1.transpose() * q2;
    let d = svd(&m);
    let mut angles: Vec<f64> = d
        .singular
        .iter()
        .map(|&c| {
            // acos loses precision near 1; use asin of the orthogonal residual
            let c = c.clamp(-1.0, 1.0);
            (1.0 - c * c).max(0.0).sqrt().asin()
        })
        .collect();
    angles.sort_by(f64::total_cmp);
    angles
}

/// Largest principal angle between two spans of equal dimension, from the
/// residual `Q2 - Q1 Q1^T Q2` (accurate for small angles).
pub fn max_principal_angle(q1: &DMat, q2: &DMat) -> f64 {
    if q1.ncols() != q2.ncols() {
        return std::f64::consts::FRAC_PI_2;
    }
    if q2.ncols() == 0 {
        return 0.0;
    }
    let resid = q2 - q1 * (q1.transpose() * q2);
    let s = svd(&resid).singular[0];
    s.min(1.0).asin()
}

/// Frobenius inner product.
pub fn frob(a: &DMat, b: &DMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

pub fn max_abs(m: &DMat) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_of_known_matrix() {
        let m = DMat::from_row_slice(3, 3, &[2.0, -1.0, 0.0, -1.0, 2.0, -1.0, 0.0, -1.0, 2.0]);
        let e = sym_eigen(&m);
        let s2 = 2f64.sqrt();
        let want = [2.0 - s2, 2.0, 2.0 + s2];
        for (a, b) in e.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-13);
        }
        let recon = &e.vectors * DMat::from_diagonal(&DVec::from_vec(e.values.clone())) * e.vectors.transpose();
        assert!((recon - m).norm() < 1e-12);
    }

    #[test]
    fn svd_reconstructs_tall_matrix() {
        let a = DMat::from_fn(7, 3, |i, j| ((i * 3 + j) as f64).sin());
        let d = svd(&a);
        let recon = &d.u * DMat::from_diagonal(&DVec::from_vec(d.singular.clone())) * d.v.transpose();
        assert!((recon - &a).norm() < 1e-12);
        assert!(d.singular.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn kernel_of_rank_deficient() {
        let a = DMat::from_row_slice(2, 3, &[1.0, 1.0, 0.0, 0.0, 1.0, 1.0]);
        let k = kernel(&a, 1e-10);
        assert_eq!(k.ncols(), 1);
        assert!((&a * &k).norm() < 1e-12);
    }

    #[test]
    fn angles_between_equal_spans_vanish() {
        let q = DMat::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let r = 0.3f64;
        let rot = DMat::from_row_slice(2, 2, &[r.cos(), -r.sin(), r.sin(), r.cos()]);
        let ang = principal_angles(&q, &(&q * rot));
        assert!(ang.iter().all(|a| a.abs() < 1e-12));
    }
}
