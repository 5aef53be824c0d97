//! Zero-order endomorphisms on bundle fibers: `S_par`, `S_W`, Bochner terms,
//! wall block bounds and the cusp-deformation nullspace.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebraData;
use crate::linalg::{kernel, max_abs, max_principal_angle, min_eig, sym_eigen, DMat, DVec};
use crate::roots::{enumerate_walls, nilpotent_structure, FrameClass, NilpotentData, RestrictedRootSystem, Wall};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BundleKind {
    Scalar,
    OneForms,
    Sym2,
    Sym2Traceless,
}

impl BundleKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "scalar" | "functions" => Ok(BundleKind::Scalar),
            "one_forms" | "oneforms" | "1forms" => Ok(BundleKind::OneForms),
            "sym2" => Ok(BundleKind::Sym2),
            "sym2_traceless" | "sym2_0" => Ok(BundleKind::Sym2Traceless),
            _ => Err(Error::Invalid(format!("unknown bundle `{s}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BundleKind::Scalar => "scalar",
            BundleKind::OneForms => "one_forms",
            BundleKind::Sym2 => "sym2",
            BundleKind::Sym2Traceless => "sym2_traceless",
        }
    }

    pub fn is_sym2(&self) -> bool {
        matches!(self, BundleKind::Sym2 | BundleKind::Sym2Traceless)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Plain,
    Einstein,
}

impl Variant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "plain" | "laplace" => Ok(Variant::Plain),
            "einstein" => Ok(Variant::Einstein),
            _ => Err(Error::Invalid(format!("unknown variant `{s}`"))),
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            Variant::Plain => "plain",
            Variant::Einstein => "einstein",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    Killing,
    UnitRoot,
}

impl Normalization {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "killing" | "raw" => Ok(Normalization::Killing),
            "unit_root" | "unit" | "normalized" => Ok(Normalization::UnitRoot),
            _ => Err(Error::Invalid(format!("unknown normalization `{s}`"))),
        }
    }
    pub fn name(&self) -> &'static str {
        match self {
            Normalization::Killing => "killing",
            Normalization::UnitRoot => "unit_root",
        }
    }
}

/// Scale making the shortest restricted root dual unit length. One scale for
/// the whole space so products stay Einstein.
pub fn normalization_scale(rs: &RestrictedRootSystem, norm: Normalization) -> f64 {
    match norm {
        Normalization::Killing => 1.0,
        Normalization::UnitRoot => 1.0 / rs.shortest_root_norm().powi(2),
    }
}

// ---------------------------------------------------------------------------
// Symmetric two-tensors

/// Orthonormal basis of symmetric `n x n` matrices: `E_aa` and
/// `(E_ab + E_ba) / sqrt 2`. Matches `<v.w, v'.w'>` with `v.w = (vw^T + wv^T)/2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Sym2 {
    pub n: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Sym2 {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * (n + 1) / 2);
        for a in 0..n {
            for b in a..n {
                pairs.push((a, b));
            }
        }
        Sym2 { n, pairs }
    }

    pub fn dim(&self) -> usize {
        self.pairs.len()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let (a, b) = self.pairs[i];
        if a == b {
            1.0
        } else {
            std::f64::consts::FRAC_1_SQRT_2
        }
    }

    pub fn basis_matrix(&self, i: usize) -> DMat {
        let (a, b) = self.pairs[i];
        let mut m = DMat::zeros(self.n, self.n);
        let w = self.weight(i);
        m[(a, b)] = w;
        m[(b, a)] = w;
        m
    }

    pub fn to_matrix(&self, v: &DVec) -> DMat {
        let mut m = DMat::zeros(self.n, self.n);
        for (i, &(a, b)) in self.pairs.iter().enumerate() {
            let w = self.weight(i) * v[i];
            m[(a, b)] = w;
            m[(b, a)] = w;
        }
        m
    }

    pub fn coords(&self, m: &DMat) -> DVec {
        DVec::from_fn(self.dim(), |i, _| {
            let (a, b) = self.pairs[i];
            if a == b {
                m[(a, a)]
            } else {
                (m[(a, b)] + m[(b, a)]) * std::f64::consts::FRAC_1_SQRT_2
            }
        })
    }

    /// Matrix of a linear map on symmetric matrices.
    pub fn operator<F: Fn(&DMat) -> DMat>(&self, f: F) -> DMat {
        let d = self.dim();
        let mut out = DMat::zeros(d, d);
        for j in 0..d {
            let img = f(&self.basis_matrix(j));
            out.set_column(j, &self.coords(&img));
        }
        out
    }

    /// Induced action `h -> A h + h A^T` of an endomorphism `A`.
    pub fn derivation(&self, a: &DMat) -> DMat {
        self.operator(|h| a * h + h * a.transpose())
    }

    /// Coordinates of the metric direction `sum e_l . e_l`, unit length.
    pub fn metric_direction(&self) -> DVec {
        self.coords(&DMat::identity(self.n, self.n)) / (self.n as f64).sqrt()
    }

    /// Orthonormal basis (columns) of the traceless subspace.
    pub fn traceless_embedding(&self) -> DMat {
        let g = self.metric_direction();
        let proj = DMat::identity(self.dim(), self.dim()) - &g * g.transpose();
        let e = sym_eigen(&proj);
        // eigenvalue 1 eigenvectors, deterministic order by column
        let cols: Vec<usize> = (0..self.dim()).filter(|&j| e.values[j] > 0.5).collect();
        let mut m = DMat::zeros(self.dim(), cols.len());
        for (c, &j) in cols.iter().enumerate() {
            m.set_column(c, &e.vectors.column(j));
        }
        m
    }

    /// Basis indices whose pair lies in `left x right` (either order).
    pub fn block_indices(&self, left: &[bool], right: &[bool]) -> Vec<usize> {
        (0..self.dim())
            .filter(|&i| {
                let (a, b) = self.pairs[i];
                (left[a] && right[b]) || (left[b] && right[a])
            })
            .collect()
    }
}

pub fn submatrix(m: &DMat, idx: &[usize]) -> DMat {
    DMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

// ---------------------------------------------------------------------------
// Frame geometry

/// An orthonormal frame `f_a` of `p` together with the tensor
/// `Q[l][a][b][m] = <f_m, [[f_l, f_a], f_b]>`.
#[derive(Clone, Debug)]
pub struct FrameGeometry {
    pub np: usize,
    pub frame: Vec<DVec>,
    pub class: Vec<FrameClass>,
    q: Vec<f64>,
}

impl FrameGeometry {
    pub fn new(g: &LieAlgebraData, frame: Vec<DVec>, class: Vec<FrameClass>) -> Self {
        let np = frame.len();
        let ads: Vec<DMat> = frame.iter().map(|f| g.ad(f)).collect();
        let mut q = vec![0.0; np * np * np * np];
        for l in 0..np {
            for a in 0..np {
                let w = &ads[l] * &frame[a];
                let adw = g.ad(&w);
                for b in 0..np {
                    let z = &adw * &frame[b];
                    for m in 0..np {
                        q[((l * np + a) * np + b) * np + m] = frame[m].dot(&z);
                    }
                }
            }
        }
        FrameGeometry { np, frame, class, q }
    }

    #[inline]
    pub fn q(&self, l: usize, a: usize, b: usize, m: usize) -> f64 {
        self.q[((l * self.np + a) * self.np + b) * self.np + m]
    }

    /// `A_ab = <f_a, [u, f_b]>` for `u in k`; antisymmetric.
    pub fn p_action(&self, g: &LieAlgebraData, u: &DVec) -> DMat {
        let ad = g.ad(u);
        let imgs: Vec<DVec> = self.frame.iter().map(|f| &ad * f).collect();
        DMat::from_fn(self.np, self.np, |a, b| self.frame[a].dot(&imgs[b]))
    }

    /// `Ric_ab = -sum_{l in trace} Q[l][a][b][l]`.
    pub fn ricci(&self, trace: &[bool]) -> DMat {
        let np = self.np;
        DMat::from_fn(np, np, |a, b| -(0..np).filter(|&l| trace[l]).map(|l| self.q(l, a, b, l)).sum::<f64>())
    }

    /// `R(h)_pq = -sum_ab h_ab (Q[p][a][b][q] + Q[q][a][b][p]) / 2`, as a raw
    /// (unsymmetrized) matrix on `Sym^2 p`.
    pub fn curvature_raw(&self, sym: &Sym2) -> DMat {
        let np = self.np;
        sym.operator(|h| {
            DMat::from_fn(np, np, |p, q| {
                let mut s = 0.0;
                for a in 0..np {
                    for b in 0..np {
                        let hab = h[(a, b)];
                        if hab != 0.0 {
                            s += hab * (self.q(p, a, b, q) + self.q(q, a, b, p));
                        }
                    }
                }
                -0.5 * s
            })
        })
    }

    pub fn all(&self) -> Vec<bool> {
        vec![true; self.np]
    }

    pub fn mask<F: Fn(FrameClass) -> bool>(&self, f: F) -> Vec<bool> {
        self.class.iter().map(|&c| f(c)).collect()
    }
}

fn symmetrize_checked(m: DMat, what: &str, tol: f64) -> Result<DMat> {
    let res = max_abs(&(&m - m.transpose()));
    if res > tol {
        return Err(Error::Numerical(format!("{what}: asymmetry {res:e}")));
    }
    Ok((&m + m.transpose()) * 0.5)
}

/// Curvature operator on `Sym^2 p`, checked for self-adjointness.
pub fn curvature_on_sym2(geo: &FrameGeometry) -> Result<DMat> {
    let sym = Sym2::new(geo.np);
    symmetrize_checked(geo.curvature_raw(&sym), "curvature", 1e-6)
}

/// Einstein `S_W` from the explicit pairing formula. `un` lists the root
/// vectors whose `k_i` enter the sum.
pub fn s_wall_pairing(g: &LieAlgebraData, rs: &RestrictedRootSystem, geo: &FrameGeometry, un: &[usize]) -> Result<DMat> {
    let np = geo.np;
    let sym = Sym2::new(np);
    let acts: Vec<DMat> = un.iter().map(|&i| geo.p_action(g, &rs.vectors[i].k)).collect();
    let mut gsum = DMat::zeros(np, np);
    for a in &acts {
        gsum += a.transpose() * a;
    }
    let delta = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
    let pairing = |a: usize, b: usize, c: usize, d: usize| {
        // v = f_a, w = f_b, v' = f_c, w' = f_d
        let mut s = gsum[(a, c)] * delta(b, d) + gsum[(a, d)] * delta(b, c) + delta(a, c) * gsum[(b, d)] + delta(a, d) * gsum[(b, c)];
        for am in &acts {
            s -= 2.0 * am[(c, a)] * am[(d, b)] + 2.0 * am[(d, a)] * am[(c, b)];
        }
        s + 2.0 * geo.q(c, a, b, d) + 2.0 * geo.q(d, a, b, c)
    };
    let dim = sym.dim();
    let mut m = DMat::zeros(dim, dim);
    for i in 0..dim {
        let (c, d) = sym.pairs[i];
        let wi = if c == d { 1.0 } else { std::f64::consts::SQRT_2 };
        for j in 0..dim {
            let (a, b) = sym.pairs[j];
            let wj = if a == b { 1.0 } else { std::f64::consts::SQRT_2 };
            m[(i, j)] = 0.5 * wi * wj * pairing(a, b, c, d);
        }
    }
    symmetrize_checked(m, "S_W", 1e-8)
}

// ---------------------------------------------------------------------------
// Bundle representations

#[derive(Clone, Debug)]
pub struct BundleRep {
    pub kind: BundleKind,
    pub fiber_dim: usize,
    pub geometry: FrameGeometry,
    /// `rho(u)` for each `k` basis vector of the algebra, in order.
    pub rho_k_basis: Vec<DMat>,
    /// `rho(k_i)` for each root vector.
    pub rho_root: Vec<DMat>,
    pub rho_k0: Vec<DMat>,
    pub fiber_metric: DMat,
    pub weyl_reflection: Option<DMat>,
    /// Columns span the fiber inside `Sym^2 p` (sym2 kinds only).
    pub embedding: Option<DMat>,
}

impl BundleRep {
    /// Fiber action of `u in k`.
    pub fn rho(&self, g: &LieAlgebraData, u: &DVec) -> DMat {
        let a = self.geometry.p_action(g, u);
        self.lift(&a)
    }

    /// Lift of an antisymmetric endomorphism of `p` to the fiber.
    pub fn lift(&self, a: &DMat) -> DMat {
        match self.kind {
            BundleKind::Scalar => DMat::zeros(1, 1),
            BundleKind::OneForms => a.clone(),
            BundleKind::Sym2 => Sym2::new(self.geometry.np).derivation(a),
            BundleKind::Sym2Traceless => {
                let e = self.embedding.as_ref().unwrap();
                e.transpose() * Sym2::new(self.geometry.np).derivation(a) * e
            }
        }
    }

    /// Restrict an operator given on `Sym^2 p` to the fiber.
    pub fn restrict_sym2(&self, m: &DMat) -> DMat {
        match &self.embedding {
            Some(e) => e.transpose() * m * e,
            None => m.clone(),
        }
    }

    /// Worst isometry and representation residuals.
    pub fn check(&self, g: &LieAlgebraData) -> (f64, f64) {
        let mut iso = 0.0_f64;
        for r in &self.rho_k_basis {
            iso = iso.max(max_abs(&(r + r.transpose())));
        }
        let mut hom = 0.0_f64;
        let ks: Vec<DVec> = g.k_indices().map(|i| g.basis_vector(i)).collect();
        for (i, u) in ks.iter().enumerate() {
            for (j, v) in ks.iter().enumerate().skip(i + 1) {
                let lhs = self.rho(g, &g.bracket(u, v));
                let rhs = &self.rho_k_basis[i] * &self.rho_k_basis[j] - &self.rho_k_basis[j] * &self.rho_k_basis[i];
                hom = hom.max(max_abs(&(lhs - rhs)));
            }
        }
        (iso, hom)
    }
}

/// Bundle representation in the chamber frame `[a | p_1 .. p_{n-r}]`.
pub fn bundle_rep(rs: &RestrictedRootSystem, kind: BundleKind) -> BundleRep {
    let g = &rs.algebra;
    let chamber = Wall::new(rs, &[]);
    let (frame, class) = chamber.frame(rs);
    let geometry = FrameGeometry::new(g, frame, class);
    let np = geometry.np;
    let sym = Sym2::new(np);
    let embedding = match kind {
        BundleKind::Sym2Traceless => Some(sym.traceless_embedding()),
        _ => None,
    };
    let fiber_dim = match kind {
        BundleKind::Scalar => 1,
        BundleKind::OneForms => np,
        BundleKind::Sym2 => sym.dim(),
        BundleKind::Sym2Traceless => sym.dim() - 1,
    };
    let mut rep = BundleRep {
        kind,
        fiber_dim,
        geometry,
        rho_k_basis: Vec::new(),
        rho_root: Vec::new(),
        rho_k0: Vec::new(),
        fiber_metric: DMat::identity(fiber_dim, fiber_dim),
        weyl_reflection: None,
        embedding,
    };
    rep.rho_k_basis = g.k_indices().map(|i| rep.rho(g, &g.basis_vector(i))).collect();
    rep.rho_root = rs.vectors.iter().map(|v| rep.rho(g, &v.k)).collect();
    rep.rho_k0 = rs.k0.iter().map(|u| rep.rho(g, u)).collect();
    if rs.rank() == 1 && !rs.vectors.is_empty() {
        let alpha = rs.roots[rs.vectors[0].root].alpha[0].abs();
        let gen = rep.rho_root[0].clone() * (std::f64::consts::PI / alpha);
        rep.weyl_reflection = Some(gen.exp());
    }
    rep
}

/// `-sum_i rho(k_i)^2` over the given root vectors.
pub fn casimir_sum(rep: &BundleRep, vectors: &[usize]) -> DMat {
    let mut m = DMat::zeros(rep.fiber_dim, rep.fiber_dim);
    for &i in vectors {
        m -= &rep.rho_root[i] * &rep.rho_root[i];
    }
    (&m + m.transpose()) * 0.5
}

/// `S_par` without curvature correction: `-sum_{i=1}^{n-r} rho(k_i)^2`.
pub fn s_par_plain(rs: &RestrictedRootSystem, rep: &BundleRep) -> DMat {
    let all: Vec<usize> = (0..rs.n_vectors()).collect();
    casimir_sum(rep, &all)
}

/// Einstein constant `c` with `Ric = c * id`, or an error if not Einstein.
pub fn einstein_constant(geo: &FrameGeometry) -> Result<f64> {
    let ric = geo.ricci(&geo.all());
    let c = ric.trace() / geo.np as f64;
    let res = max_abs(&(&ric - DMat::identity(geo.np, geo.np) * c));
    if res > 1e-8 {
        return Err(Error::Unsupported(format!("metric is not Einstein (residual {res:e})")));
    }
    Ok(c)
}

/// Curvature term on the fiber (`R` restricted; zero for non-sym2 kinds).
pub fn fiber_curvature(rep: &BundleRep) -> Result<DMat> {
    if !rep.kind.is_sym2() {
        return Ok(DMat::zeros(rep.fiber_dim, rep.fiber_dim));
    }
    let r = curvature_on_sym2(&rep.geometry)?;
    Ok(rep.restrict_sym2(&r))
}

/// Zero-order term of the cataloged Bochner formula.
///
/// * one_forms: `-Ric`.
/// * sym2, Einstein operator: `A(h) = -R(h) - (Ric h + h Ric) / 2`.
/// * sym2, plain Laplacian: `R(h) - (Ric h + h Ric) / 2`.
/// * scalar: `0`.
pub fn bochner_zero_order(rep: &BundleRep, variant: Variant) -> Result<DMat> {
    let geo = &rep.geometry;
    match rep.kind {
        BundleKind::Scalar => Ok(DMat::zeros(1, 1)),
        BundleKind::OneForms => Ok(-geo.ricci(&geo.all())),
        BundleKind::Sym2 | BundleKind::Sym2Traceless => {
            einstein_constant(geo)?;
            let sym = Sym2::new(geo.np);
            let r = curvature_on_sym2(geo)?;
            let ric = geo.ricci(&geo.all());
            let anti = sym.operator(|h| (&ric * h + h * &ric) * 0.5);
            let m = match variant {
                Variant::Einstein => -r - anti,
                Variant::Plain => r - anti,
            };
            Ok(rep.restrict_sym2(&((&m + m.transpose()) * 0.5)))
        }
    }
}

/// Chamber operator `S_C` on the fiber; the Einstein variant subtracts `2R`.
pub fn s_chamber(rs: &RestrictedRootSystem, rep: &BundleRep, variant: Variant) -> Result<DMat> {
    let mut m = s_par_plain(rs, rep);
    if variant == Variant::Einstein {
        if !rep.kind.is_sym2() {
            return Err(Error::Unsupported("einstein variant needs a sym2 bundle".into()));
        }
        m -= fiber_curvature(rep)? * 2.0;
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// Walls

pub const BLOCK_NAMES: [&str; 5] = ["ov_p.un_p", "sym2_ov_p", "sym2_un_a", "un_a.un_a_perp", "sym2_un_a_perp"];

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockReport {
    pub name: String,
    pub dim: usize,
    pub min_eig: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WallReport {
    pub key: String,
    pub ov_simple: Vec<usize>,
    pub blocks: Vec<BlockReport>,
    /// Minimum over nonempty blocks (scaled).
    pub bound: f64,
    /// Largest cross-block entry of `S_W` (Einstein sym2 only).
    pub leakage: Option<f64>,
    /// Deviation of the `Sym^2 un a` block from the identity (Killing scale).
    pub sym2_un_a_identity_residual: Option<f64>,
}

/// Einstein sym2 blocks of one wall, raw Killing scale.
pub struct WallBlocks {
    pub blocks: Vec<(String, DMat)>,
    pub leakage: f64,
    pub identity_residual: Option<f64>,
    pub sym: Sym2,
    pub geometry: FrameGeometry,
    /// Index sets of each block in `sym`.
    pub indices: Vec<Vec<usize>>,
}

pub fn wall_geometry(rs: &RestrictedRootSystem, wall: &Wall) -> FrameGeometry {
    let (frame, class) = wall.frame(rs);
    FrameGeometry::new(&rs.algebra, frame, class)
}

/// The five `Sym^2 p` blocks of the Einstein `S_W`, with `Sym^2 ov p`
/// replaced by the cross-section operator `B`.
pub fn einstein_wall_blocks(rs: &RestrictedRootSystem, wall: &Wall) -> Result<WallBlocks> {
    let g = &rs.algebra;
    let geo = wall_geometry(rs, wall);
    einstein_constant(&geo)?;
    let sym = Sym2::new(geo.np);
    let s = s_wall_pairing(g, rs, &geo, &wall.un_vectors)?;
    let ov = geo.mask(|c| matches!(c, FrameClass::OvA | FrameClass::OvRoot(_)));
    let un = geo.mask(|c| matches!(c, FrameClass::UnA | FrameClass::UnRoot(_)));
    let un_a = geo.mask(|c| c == FrameClass::UnA);
    let un_perp = geo.mask(|c| matches!(c, FrameClass::UnRoot(_)));
    let indices = vec![
        sym.block_indices(&ov, &un),
        sym.block_indices(&ov, &ov),
        sym.block_indices(&un_a, &un_a),
        sym.block_indices(&un_a, &un_perp),
        sym.block_indices(&un_perp, &un_perp),
    ];
    let mut owner = vec![usize::MAX; sym.dim()];
    for (b, idx) in indices.iter().enumerate() {
        for &i in idx {
            owner[i] = b;
        }
    }
    let mut leakage = 0.0_f64;
    for i in 0..sym.dim() {
        for j in 0..sym.dim() {
            if owner[i] != owner[j] {
                leakage = leakage.max(s[(i, j)].abs());
            }
        }
    }
    if leakage > 1e-6 {
        return Err(Error::Numerical(format!("wall {}: cross-block leakage {leakage:e}", wall.key())));
    }
    // cross-section operator on Sym^2 ov p
    let r_ov = geo.curvature_raw(&sym);
    let ric_ov = geo.ricci(&ov);
    let anti = sym.operator(|h| (&ric_ov * h + h * &ric_ov) * 0.5);
    let b_full = &r_ov - &anti + &s;
    let mut blocks = Vec::new();
    let mut identity_residual = None;
    for (b, idx) in indices.iter().enumerate() {
        let m = if b == 1 { submatrix(&b_full, idx) } else { submatrix(&s, idx) };
        let m = symmetrize_checked(m, BLOCK_NAMES[b], 1e-8)?;
        if b == 2 && !idx.is_empty() {
            identity_residual = Some(max_abs(&(&m - DMat::identity(idx.len(), idx.len()))));
        }
        blocks.push((BLOCK_NAMES[b].to_string(), m));
    }
    Ok(WallBlocks { blocks, leakage, identity_residual, sym, geometry: geo, indices })
}

/// Wall table for any bundle and variant.
pub fn wall_reports(rs: &RestrictedRootSystem, kind: BundleKind, variant: Variant, scale: f64) -> Result<Vec<WallReport>> {
    let walls = enumerate_walls(rs);
    let mut out = Vec::new();
    let rep = bundle_rep(rs, kind);
    for wall in &walls {
        if kind == BundleKind::Sym2 && variant == Variant::Einstein {
            let wb = einstein_wall_blocks(rs, wall)?;
            let blocks: Vec<BlockReport> = wb
                .blocks
                .iter()
                .map(|(name, m)| BlockReport { name: name.clone(), dim: m.nrows(), min_eig: (m.nrows() > 0).then(|| scale * min_eig(m)) })
                .collect();
            let bound = blocks.iter().filter_map(|b| b.min_eig).fold(f64::INFINITY, f64::min);
            out.push(WallReport {
                key: wall.key(),
                ov_simple: wall.ov_simple.clone(),
                blocks,
                bound,
                leakage: Some(wb.leakage),
                sym2_un_a_identity_residual: wb.identity_residual,
            });
        } else {
            let m = if wall.is_origin(rs.rank()) {
                bochner_zero_order(&rep, variant)?
            } else {
                let mut m = casimir_sum(&rep, &wall.un_vectors);
                if variant == Variant::Einstein {
                    m -= fiber_curvature(&rep)? * 2.0;
                }
                m
            };
            let v = scale * min_eig(&m);
            out.push(WallReport {
                key: wall.key(),
                ov_simple: wall.ov_simple.clone(),
                blocks: vec![BlockReport { name: "s_wall".into(), dim: m.nrows(), min_eig: Some(v) }],
                bound: v,
                leakage: None,
                sym2_un_a_identity_residual: None,
            });
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Cusp nullspace

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NullspaceReport {
    pub dim: usize,
    /// Orthonormal basis in `Sym^2` coordinates over the root-vector indices.
    pub basis: Vec<Vec<f64>>,
}

fn cusp_system(nd: &NilpotentData, support: Option<&[bool]>) -> (Sym2, DMat) {
    let n = nd.dim;
    let sym = Sym2::new(n);
    let d = sym.dim();
    let w = |a: usize, b: usize| if a == b { 1.0 } else { std::f64::consts::FRAC_1_SQRT_2 };
    let mut rows: Vec<DVec> = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut row = DVec::zeros(d);
                for i in 0..n {
                    let t1 = nd.get(i, b, c);
                    if t1 != 0.0 {
                        row[sym.index_of(a, i)] += t1 * w(a, i);
                    }
                    let t2 = nd.get(a, i, c);
                    if t2 != 0.0 {
                        row[sym.index_of(b, i)] += t2 * w(b, i);
                    }
                    let t3 = nd.get(a, b, i);
                    if t3 != 0.0 {
                        row[sym.index_of(c, i)] -= t3 * w(c, i);
                    }
                }
                if row.amax() > 0.0 {
                    rows.push(row);
                }
            }
        }
    }
    let r = nd.alpha.first().map(|a| a.len()).unwrap_or(0);
    for q in 0..r {
        let mut row = DVec::zeros(d);
        for i in 0..n {
            row[sym.index_of(i, i)] += nd.alpha[i][q];
        }
        rows.push(row);
    }
    for (idx, &(a, b)) in sym.pairs.iter().enumerate() {
        let outside = support.is_some_and(|s| !(s[a] && s[b]));
        if (a != b && !nd.same_root(a, b)) || outside {
            let mut row = DVec::zeros(d);
            row[idx] = 1.0;
            rows.push(row);
        }
    }
    let mut m = DMat::zeros(rows.len(), d);
    for (i, r) in rows.iter().enumerate() {
        m.set_row(i, &r.transpose());
    }
    (sym, m)
}

/// Kernel of the cusp conditions on `Sym^2(a^perp)`.
pub fn cusp_nullspace(nd: &NilpotentData) -> NullspaceReport {
    cusp_nullspace_on(nd, None)
}

/// Same, restricted to forms supported on the marked indices.
pub fn cusp_nullspace_on(nd: &NilpotentData, support: Option<&[bool]>) -> NullspaceReport {
    let (_, m) = cusp_system(nd, support);
    let ker = kernel(&m, 1e-8);
    let basis = (0..ker.ncols()).map(|j| ker.column(j).iter().copied().collect()).collect();
    NullspaceReport { dim: ker.ncols(), basis }
}

impl Sym2 {
    /// Position of the pair `{a, b}` in `pairs`.
    pub fn index_of(&self, a: usize, b: usize) -> usize {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        a * self.n - a * (a + 1) / 2 + b
    }
}

/// Kernel of the Einstein `S_W` block on `Sym^2 un a^perp` versus
/// `N cap Sym^2 un a^perp`. Returns `(kernel dim, nullspace dim, max angle)`.
pub fn nullspace_cross_check(rs: &RestrictedRootSystem, wall: &Wall) -> Result<(usize, usize, f64)> {
    let wb = einstein_wall_blocks(rs, wall)?;
    let block = &wb.blocks[4].1;
    let n_un = wall.un_vectors.len();
    let kdim_ker = if block.nrows() == 0 {
        DMat::zeros(0, 0)
    } else {
        let e = sym_eigen(block);
        let scale = e.values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(1e-300);
        let cols: Vec<usize> = (0..e.values.len()).filter(|&j| e.values[j].abs() <= 1e-8 * scale).collect();
        let mut k = DMat::zeros(block.nrows(), cols.len());
        for (c, &j) in cols.iter().enumerate() {
            k.set_column(c, &e.vectors.column(j));
        }
        k
    };
    // express block kernel in Sym^2 over the un vectors (local indices)
    let local = Sym2::new(n_un);
    let np = wb.geometry.np;
    let offset = np - n_un;
    let block_idx = &wb.indices[4];
    let mut ker_local = DMat::zeros(local.dim(), kdim_ker.ncols());
    for (pos, &gi) in block_idx.iter().enumerate() {
        let (a, b) = wb.sym.pairs[gi];
        let li = local.index_of(a - offset, b - offset);
        for c in 0..kdim_ker.ncols() {
            ker_local[(li, c)] = kdim_ker[(pos, c)];
        }
    }
    let nd = nilpotent_structure(rs)?;
    let mut support = vec![false; nd.dim];
    for &i in &wall.un_vectors {
        support[i] = true;
    }
    let ns = cusp_nullspace_on(&nd, Some(&support));
    let full = Sym2::new(nd.dim);
    let mut ns_local = DMat::zeros(local.dim(), ns.dim);
    for (c, v) in ns.basis.iter().enumerate() {
        for (gi, &(a, b)) in full.pairs.iter().enumerate() {
            if support[a] && support[b] {
                let la = wall.un_vectors.iter().position(|&x| x == a).unwrap();
                let lb = wall.un_vectors.iter().position(|&x| x == b).unwrap();
                ns_local[(local.index_of(la, lb), c)] = v[gi];
            }
        }
    }
    let angle = max_principal_angle(&ker_local, &ns_local);
    Ok((ker_local.ncols(), ns_local.ncols(), angle))
}

// ---------------------------------------------------------------------------
// Report

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralReport {
    pub schema_version: u32,
    pub space: String,
    pub bundle: BundleKind,
    pub variant: Variant,
    pub normalization: Normalization,
    pub scale: f64,
    pub lambda_l: f64,
    pub lambda_b_lower: f64,
    pub lambda_l_raw: f64,
    pub lambda_b_lower_raw: f64,
    pub walls: Vec<WallReport>,
    pub lambda0_lower: f64,
    pub lambda1_lower: Option<f64>,
    pub positive: bool,
    pub nullspace: Option<NullspaceReport>,
}

pub fn spectral_report(space: &str, rs: &RestrictedRootSystem, kind: BundleKind, variant: Variant, norm: Normalization) -> Result<SpectralReport> {
    if variant == Variant::Einstein && !kind.is_sym2() {
        return Err(Error::Unsupported("einstein variant needs a sym2 bundle".into()));
    }
    let scale = normalization_scale(rs, norm);
    let rep = bundle_rep(rs, kind);
    let ll = min_eig(&s_chamber(rs, &rep, variant)?);
    let lb = min_eig(&bochner_zero_order(&rep, variant)?);
    let walls = wall_reports(rs, kind, variant, scale)?;
    let lambda0 = walls.iter().map(|w| w.bound).fold(f64::INFINITY, f64::min);
    let lambda1 = walls.iter().filter(|w| !w.ov_simple.is_empty()).map(|w| w.bound).reduce(f64::min);
    let nullspace = if kind == BundleKind::Sym2 && variant == Variant::Einstein {
        Some(cusp_nullspace(&nilpotent_structure(rs)?))
    } else {
        None
    };
    Ok(SpectralReport {
        schema_version: SCHEMA_VERSION,
        space: space.to_string(),
        bundle: kind,
        variant,
        normalization: norm,
        scale,
        lambda_l: scale * ll,
        lambda_b_lower: scale * lb,
        lambda_l_raw: ll,
        lambda_b_lower_raw: lb,
        walls,
        lambda0_lower: lambda0,
        lambda1_lower: lambda1,
        positive: lambda0 > 1e-8,
        nullspace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::root_system;

    #[test]
    fn chamber_pairing_matches_operator_form() {
        for key in ["H3", "CH4", "SL3", "H2xH2"] {
            let rs = root_system(key).unwrap();
            let rep = bundle_rep(&rs, BundleKind::Sym2);
            let all: Vec<usize> = (0..rs.n_vectors()).collect();
            let pairing = s_wall_pairing(&rs.algebra, &rs, &rep.geometry, &all).unwrap();
            let op = s_chamber(&rs, &rep, Variant::Einstein).unwrap();
            assert!(max_abs(&(pairing - op)) < 1e-10, "{key}");
        }
    }

    #[test]
    fn sym2_index_matches_pair_order() {
        let sym = Sym2::new(5);
        for (i, &(a, b)) in sym.pairs.iter().enumerate() {
            assert_eq!(sym.index_of(a, b), i);
            assert_eq!(sym.index_of(b, a), i);
        }
    }
}
