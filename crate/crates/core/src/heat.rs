//! Radial heat kernels on rank-one spaces.
//!
//! The kernel `K_t(r)` takes values in the commutant of `rho(k0)` on the
//! fiber. It is stored as coefficients in an orthonormal basis of that
//! commutant (symmetric elements first) on a staggered grid
//! `r_j = (j + 1/2) dr` and advanced with classical RK4 in conservative
//! finite-volume form.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{ball_volume_profile, sphere_area};
use crate::linalg::{kernel, min_eig, sym_eigen, DMat};
use crate::roots::RestrictedRootSystem;
use crate::spectra::{bundle_rep, fiber_curvature, normalization_scale, s_chamber, BundleKind, Normalization, Variant};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatParams {
    pub dr: f64,
    /// Outer radius; `None` picks one from `t_max` and the root sum.
    pub r_max: Option<f64>,
    pub t0: f64,
    pub t_max: f64,
    pub sample_every: f64,
    /// Fraction of `dr^2` bounding the step.
    pub cfl: f64,
    pub comparison: bool,
}

impl Default for HeatParams {
    fn default() -> Self {
        HeatParams { dr: 0.05, r_max: None, t0: 0.01, t_max: 10.0, sample_every: 0.1, cfl: 0.2, comparison: true }
    }
}

impl HeatParams {
    /// Radius beyond which the kernel is negligible up to `t_max`.
    pub fn auto_r_max(&self, alpha_sum: f64) -> f64 {
        alpha_sum * self.t_max + 8.0 * (2.0 * self.t_max).sqrt() + 5.0
    }
}

/// One family of root vectors sharing a root value, acting on the
/// commutant coordinates.
#[derive(Clone, Debug)]
struct RootGroup {
    alpha: f64,
    /// `K -> [rho, [rho, K]]`, summed over the group.
    double_commutator: DMat,
    /// `K -> rho^2 K`.
    left_square: DMat,
    /// `K -> rho K rho`.
    sandwich: DMat,
}

/// Radial PDE data: Laplacian weights plus a zero-order term
/// `Z(r) = E + sum_g [ D_g / sinh^2 + L_g - 2 S_g / (1 + cosh) ]`.
#[derive(Clone, Debug)]
pub struct RadialModel {
    /// Root values along the unit direction, with multiplicity (unit-root scale).
    pub alphas: Vec<f64>,
    /// Manifold dimension.
    pub n: usize,
    pub fiber_dim: usize,
    /// Orthonormal commutant basis; the first `n_sym` are symmetric.
    pub basis: Vec<DMat>,
    pub n_sym: usize,
    groups: Vec<RootGroup>,
    extra: DMat,
    /// Commutant coordinates of the identity.
    pub identity: Vec<f64>,
}

impl RadialModel {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Zero-order matrix at radius `r`.
    pub fn zero_order(&self, r: f64) -> DMat {
        let mut z = self.extra.clone();
        for g in &self.groups {
            let x = g.alpha * r;
            let sh = x.sinh();
            let ch = x.cosh();
            z += &g.double_commutator / (sh * sh);
            z += &g.left_square;
            z -= &g.sandwich * (2.0 / (1.0 + ch));
        }
        (&z + z.transpose()) * 0.5
    }

    /// `w(r) = prod sinh(alpha_i r)`.
    pub fn weight(&self, r: f64) -> f64 {
        self.alphas.iter().map(|a| (a * r).sinh()).product()
    }

    pub fn reconstruct(&self, c: &[f64]) -> DMat {
        let mut k = DMat::zeros(self.fiber_dim, self.fiber_dim);
        for (b, x) in self.basis.iter().zip(c) {
            if *x != 0.0 {
                k += b * *x;
            }
        }
        k
    }

    /// Scalar comparison model with `Z(r) = -lambda_c + sum_i 2 mu_i / (1 + cosh(alpha_i r))`.
    pub fn comparison(alphas: &[f64], n: usize, lambda_c: f64, mus: &[f64]) -> RadialModel {
        let one = DMat::identity(1, 1);
        let mut groups = Vec::new();
        for (&a, &mu) in alphas.iter().zip(mus) {
            groups.push(RootGroup { alpha: a, double_commutator: DMat::zeros(1, 1), left_square: DMat::zeros(1, 1), sandwich: &one * (-mu) });
        }
        RadialModel {
            alphas: alphas.to_vec(),
            n,
            fiber_dim: 1,
            basis: vec![one.clone()],
            n_sym: 1,
            groups,
            extra: &one * (-lambda_c),
            identity: vec![1.0],
        }
    }
}

/// Everything needed to simulate one (space, bundle, variant) triple in
/// unit-root units.
#[derive(Clone, Debug)]
pub struct HeatModel {
    pub kind: BundleKind,
    pub variant: Variant,
    pub radial: RadialModel,
    /// Normalized `rho(k_i)` on the fiber.
    pub rho: Vec<DMat>,
    pub rho_k0: Vec<DMat>,
    pub weyl: DMat,
    /// `mu_i`: largest eigenvalue of `-rho_i^2`.
    pub mus: Vec<f64>,
    /// Bottom of the chamber operator (`lambda_L`, or Einstein `S_C`).
    pub lambda_c: f64,
}

impl HeatModel {
    pub fn new(rs: &RestrictedRootSystem, kind: BundleKind, variant: Variant) -> Result<HeatModel> {
        if rs.rank() != 1 {
            return Err(Error::Unsupported(format!("heat simulation needs rank one, got rank {}", rs.rank())));
        }
        if variant == Variant::Einstein && !kind.is_sym2() {
            return Err(Error::Unsupported("einstein variant needs a sym2 bundle".into()));
        }
        let s = normalization_scale(rs, Normalization::UnitRoot);
        let sq = s.sqrt();
        let rep = bundle_rep(rs, kind);
        let d = rep.fiber_dim;
        let rho: Vec<DMat> = rep.rho_root.iter().map(|m| m * sq).collect();
        let rho_k0: Vec<DMat> = rep.rho_k0.clone();
        let alpha_short = rs.shortest_root_norm();
        let alphas: Vec<f64> = (0..rs.n_vectors()).map(|i| rs.alpha_of_vector(i)[0].abs() / alpha_short).collect();
        let basis = commutant_basis(d, &rho_k0)?;
        let n_sym = basis.iter().filter(|b| (*b - b.transpose()).amax() < 1e-12).count();
        // group root vectors by root value
        let mut values: Vec<f64> = Vec::new();
        for &a in &alphas {
            if !values.iter().any(|v| (v - a).abs() < 1e-9) {
                values.push(a);
            }
        }
        let mut groups = Vec::new();
        for &v in &values {
            let members: Vec<usize> = (0..alphas.len()).filter(|&i| (alphas[i] - v).abs() < 1e-9).collect();
            let dc = project_map(&basis, |k| {
                let mut out = DMat::zeros(d, d);
                for &i in &members {
                    let r = &rho[i];
                    let c = r * k - k * r;
                    out += r * &c - &c * r;
                }
                out
            })?;
            let ls = project_map(&basis, |k| {
                let mut out = DMat::zeros(d, d);
                for &i in &members {
                    out += &rho[i] * &rho[i] * k;
                }
                out
            })?;
            let sw = project_map(&basis, |k| {
                let mut out = DMat::zeros(d, d);
                for &i in &members {
                    out += &rho[i] * k * &rho[i];
                }
                out
            })?;
            groups.push(RootGroup { alpha: v, double_commutator: dc, left_square: ls, sandwich: sw });
        }
        let extra = if variant == Variant::Einstein {
            let r = fiber_curvature(&rep)? * (2.0 * s);
            project_map(&basis, |k| &r * k)?
        } else {
            DMat::zeros(basis.len(), basis.len())
        };
        let identity: Vec<f64> = basis.iter().map(|b| b.trace()).collect();
        let mus: Vec<f64> = rho.iter().map(|r| crate::linalg::max_eig(&(-(r * r)))).collect();
        let lambda_c = s * min_eig(&s_chamber(rs, &rep, variant)?);
        let weyl = rep.weyl_reflection.clone().unwrap_or_else(|| DMat::identity(d, d));
        let n = rs.algebra.np;
        Ok(HeatModel {
            kind,
            variant,
            radial: RadialModel { alphas, n, fiber_dim: d, basis, n_sym, groups, extra, identity },
            rho,
            rho_k0,
            weyl,
            mus,
            lambda_c,
        })
    }

    pub fn comparison(&self) -> RadialModel {
        RadialModel::comparison(&self.radial.alphas, self.radial.n, self.lambda_c, &self.mus)
    }
}

/// Orthonormal basis of `{K : [rho(u), K] = 0}`, symmetric elements first.
pub fn commutant_basis(d: usize, rho_k0: &[DMat]) -> Result<Vec<DMat>> {
    let sym_pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| (a..d).map(move |b| (a, b))).collect();
    let anti_pairs: Vec<(usize, usize)> = (0..d).flat_map(|a| ((a + 1)..d).map(move |b| (a, b))).collect();
    let build = |pairs: &[(usize, usize)], sign: f64| -> Vec<DMat> {
        let elem = |&(a, b): &(usize, usize)| {
            let mut m = DMat::zeros(d, d);
            if a == b {
                m[(a, a)] = 1.0;
            } else {
                let w = std::f64::consts::FRAC_1_SQRT_2;
                m[(a, b)] = w;
                m[(b, a)] = sign * w;
            }
            m
        };
        let elems: Vec<DMat> = pairs.iter().map(elem).collect();
        if elems.is_empty() {
            return Vec::new();
        }
        let rows = rho_k0.len() * d * d;
        if rows == 0 {
            return elems;
        }
        let mut sys = DMat::zeros(rows, elems.len());
        for (j, e) in elems.iter().enumerate() {
            for (u, r) in rho_k0.iter().enumerate() {
                let c = r * e - e * r;
                for (idx, v) in c.iter().enumerate() {
                    sys[(u * d * d + idx, j)] = *v;
                }
            }
        }
        let ker = kernel(&sys, 1e-9);
        (0..ker.ncols())
            .map(|c| {
                let mut m = DMat::zeros(d, d);
                for (j, e) in elems.iter().enumerate() {
                    m += e * ker[(j, c)];
                }
                m
            })
            .collect()
    };
    let mut out = build(&sym_pairs, 1.0);
    out.extend(build(&anti_pairs, -1.0));
    Ok(out)
}

/// Matrix of a linear map restricted to the commutant, checking invariance.
fn project_map<F: Fn(&DMat) -> DMat>(basis: &[DMat], f: F) -> Result<DMat> {
    let n = basis.len();
    let mut m = DMat::zeros(n, n);
    for b in 0..n {
        let img = f(&basis[b]);
        let mut rest = img.clone();
        for a in 0..n {
            let c = crate::linalg::frob(&basis[a], &img);
            m[(a, b)] = c;
            rest -= &basis[a] * c;
        }
        if rest.amax() > 1e-8 * img.amax().max(1.0) {
            return Err(Error::Numerical("zero-order term leaves the commutant".into()));
        }
    }
    Ok(m)
}

// ---------------------------------------------------------------------------
// State and stepping

#[derive(Clone, Debug)]
pub struct Grid {
    pub dr: f64,
    pub nodes: Vec<f64>,
    /// `w` at faces `j dr`, `j = 0..=J`.
    pub face_weight: Vec<f64>,
    /// Cell integrals of `w`.
    pub cell_volume: Vec<f64>,
    pub r_max: f64,
}

impl Grid {
    pub fn new(model: &RadialModel, dr: f64, r_max: f64) -> Grid {
        let j = (r_max / dr).round().max(2.0) as usize;
        let nodes: Vec<f64> = (0..j).map(|i| (i as f64 + 0.5) * dr).collect();
        let face_weight: Vec<f64> = (0..=j).map(|i| model.weight(i as f64 * dr)).collect();
        // 4-point Gauss-Legendre per cell
        let gx = [-0.861_136_311_594_052_6, -0.339_981_043_584_856_3, 0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        let gw = [0.347_854_845_137_453_9, 0.652_145_154_862_546_1, 0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let cell_volume = (0..j)
            .map(|i| {
                let mid = (i as f64 + 0.5) * dr;
                let h = 0.5 * dr;
                gx.iter().zip(gw).map(|(x, w)| w * model.weight(mid + h * x)).sum::<f64>() * h
            })
            .collect();
        Grid { dr, nodes, face_weight, cell_volume, r_max: j as f64 * dr }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct HeatState {
    pub model: RadialModel,
    pub grid: Grid,
    /// Node-major commutant coefficients.
    pub c: Vec<f64>,
    pub t: f64,
    pub t0: f64,
    zero: Vec<DMat>,
    /// Worst antisymmetric drift per unit time removed by re-symmetrization.
    pub max_asym_rate: f64,
    pub dt_max: f64,
}

impl HeatState {
    /// Gaussian start `(4 pi t0)^{-n/2} exp(-r^2 / 4 t0) Id`.
    pub fn init(model: RadialModel, dr: f64, r_max: f64, t0: f64, cfl: f64) -> Result<HeatState> {
        if t0 < 4.0 * dr * dr * (1.0 - 1e-12) {
            return Err(Error::Invalid(format!("t0 = {t0} below 4 dr^2 = {}", 4.0 * dr * dr)));
        }
        let grid = Grid::new(&model, dr, r_max);
        let m = model.dim();
        let n = model.n as f64;
        let mut c = vec![0.0; grid.len() * m];
        for (j, &r) in grid.nodes.iter().enumerate() {
            let g = (4.0 * std::f64::consts::PI * t0).powf(-n / 2.0) * (-r * r / (4.0 * t0)).exp();
            for a in 0..m {
                c[j * m + a] = g * model.identity[a];
            }
        }
        let zero: Vec<DMat> = grid.nodes.iter().map(|&r| model.zero_order(r)).collect();
        // Gershgorin bound on the semi-discrete operator
        let mut lam = 0.0_f64;
        for j in 0..grid.len() {
            let cp = grid.face_weight[j + 1] / (grid.cell_volume[j] * dr);
            let cm = grid.face_weight[j] / (grid.cell_volume[j] * dr);
            let zr = sym_eigen(&zero[j]).values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            lam = lam.max(2.0 * (cp + cm) + zr);
        }
        let dt_max = (cfl * dr * dr).min(2.4 / lam);
        Ok(HeatState { model, grid, c, t: t0, t0, zero, max_asym_rate: 0.0, dt_max })
    }

    fn rhs(&self, c: &[f64], out: &mut [f64]) {
        let m = self.model.dim();
        let j_len = self.grid.len();
        let dr = self.grid.dr;
        for j in 0..j_len {
            let v = self.grid.cell_volume[j] * dr;
            let wp = self.grid.face_weight[j + 1];
            let wm = self.grid.face_weight[j];
            let z = &self.zero[j];
            for a in 0..m {
                let cj = c[j * m + a];
                let up = if j + 1 < j_len {
                    c[(j + 1) * m + a] - cj
                } else {
                    // outflow: extrapolate the last gradient
                    cj - c[(j - 1) * m + a]
                };
                let down = if j > 0 { cj - c[(j - 1) * m + a] } else { 0.0 };
                let mut acc = (wp * up - wm * down) / v;
                for b in 0..m {
                    acc += z[(a, b)] * c[j * m + b];
                }
                out[j * m + a] = acc;
            }
        }
    }

    /// One RK4 step followed by removal of the antisymmetric part.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        let n = self.c.len();
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut tmp = vec![0.0; n];
        self.rhs(&self.c, &mut k1);
        for i in 0..n {
            tmp[i] = self.c[i] + 0.5 * dt * k1[i];
        }
        self.rhs(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = self.c[i] + 0.5 * dt * k2[i];
        }
        self.rhs(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = self.c[i] + dt * k3[i];
        }
        self.rhs(&tmp, &mut k4);
        for i in 0..n {
            self.c[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if !self.c.iter().all(|v| v.is_finite()) {
            return Err(Error::Numerical(format!("non-finite kernel at t = {}", self.t)));
        }
        let m = self.model.dim();
        let ns = self.model.n_sym;
        if ns < m {
            let mut asym = 0.0_f64;
            let mut size = 0.0_f64;
            for j in 0..self.grid.len() {
                let row = &mut self.c[j * m..(j + 1) * m];
                let s: f64 = row[..ns].iter().map(|v| v * v).sum::<f64>();
                let a: f64 = row[ns..].iter().map(|v| v * v).sum::<f64>();
                size = size.max(s.sqrt());
                asym = asym.max(a.sqrt());
                for v in &mut row[ns..] {
                    *v = 0.0;
                }
            }
            if size > 0.0 {
                self.max_asym_rate = self.max_asym_rate.max(asym / size / dt);
            }
        }
        self.t += dt;
        Ok(())
    }

    pub fn node_matrix(&self, j: usize) -> DMat {
        let m = self.model.dim();
        self.model.reconstruct(&self.c[j * m..(j + 1) * m])
    }

    /// Per node `(min eig, max eig)`.
    pub fn node_spectra(&self) -> Vec<(f64, f64)> {
        (0..self.grid.len())
            .map(|j| {
                let k = self.node_matrix(j);
                let e = sym_eigen(&k);
                (e.values[0], *e.values.last().unwrap())
            })
            .collect()
    }

    /// `H^(p) = (int |prod sinh| K_max^p dr)^{1/p}` by cell integrals.
    pub fn weighted_norm(&self, p: f64) -> f64 {
        weighted_norm_from(&self.grid, &self.node_spectra(), p)
    }
}

fn weighted_norm_from(grid: &Grid, spectra: &[(f64, f64)], p: f64) -> f64 {
    let s: f64 = spectra.iter().zip(&grid.cell_volume).map(|(e, v)| v * e.1.abs().powf(p)).sum();
    s.powf(1.0 / p)
}

// ---------------------------------------------------------------------------
// Runs

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatSample {
    pub t: f64,
    pub h1: f64,
    pub h2: f64,
    /// `sup_j |K(r_j)| vol B_{r_j}` without the exponential factor.
    pub envelope: f64,
    /// `min_j eig_min / max_j |K|`.
    pub min_eig_ratio: f64,
    /// `max_j K_max / K°` over nodes where `K°` is not negligible.
    pub comparison_ratio: Option<f64>,
    /// `K°` weighted norm.
    pub comparison_h1: Option<f64>,
    /// `max ||[rho(u), K]|| / ||K||` over `u` in `k0`.
    pub equivariance: f64,
    /// `I(t) = int |K| / (r + 1) vol` for `a = 0, w = 1`.
    pub radial_integral: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecayFit {
    pub rate: f64,
    pub log_prefactor: f64,
    pub t_a: f64,
    pub t_b: f64,
    pub max_residual: f64,
    pub window_too_short: bool,
}

/// Least squares on `log H` over `[t_a, t_b]`; the rate is the negated slope.
pub fn fit_decay(times: &[f64], values: &[f64], t_a: f64, t_b: f64) -> Result<DecayFit> {
    let pts: Vec<(f64, f64)> = times.iter().zip(values).filter(|(t, _)| **t >= t_a - 1e-12 && **t <= t_b + 1e-12).map(|(t, v)| (*t, *v)).collect();
    if pts.len() < 20 {
        return Err(Error::Invalid(format!("only {} samples in fit window", pts.len())));
    }
    if pts.iter().any(|p| p.1 <= 0.0) {
        return Err(Error::Invalid("nonpositive sample in fit window".into()));
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1.ln() - my)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mt;
    let max_residual = pts.iter().map(|p| (p.1.ln() - icpt - slope * p.0).abs()).fold(0.0, f64::max);
    let (ta, tb) = (pts[0].0, pts[pts.len() - 1].0);
    Ok(DecayFit { rate: -slope, log_prefactor: icpt, t_a: ta, t_b: tb, max_residual, window_too_short: (tb - ta) * slope.abs() < 5.0 })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GreenL1 {
    pub value: f64,
    pub tail: f64,
    pub divergent: bool,
}

/// `int_{t0}^inf e^{lambda t} H^(1) dt` by trapezoid plus a fitted tail.
pub fn green_l1(times: &[f64], h1: &[f64], lambda: f64, fit: &DecayFit) -> GreenL1 {
    if lambda >= fit.rate {
        return GreenL1 { value: f64::INFINITY, tail: f64::INFINITY, divergent: true };
    }
    let mut s = 0.0;
    for i in 1..times.len() {
        let dt = times[i] - times[i - 1];
        s += 0.5 * dt * ((lambda * times[i - 1]).exp() * h1[i - 1] + (lambda * times[i]).exp() * h1[i]);
    }
    let tn = *times.last().unwrap();
    let tail = (lambda * tn).exp() * h1.last().unwrap() / (fit.rate - lambda);
    GreenL1 { value: s + tail, tail, divergent: false }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HeatRun {
    pub schema_version: u32,
    pub space: String,
    pub bundle: BundleKind,
    pub variant: Variant,
    pub normalization: Normalization,
    pub params: HeatParams,
    pub r_max: f64,
    pub dt: f64,
    pub steps: usize,
    pub commutant_dim: usize,
    pub lambda_c: f64,
    pub mus: Vec<f64>,
    /// `V0 = area(S^{n-1}) / prod alpha_i`; `V0 * H^(1)` is the Euclidean-normalized mass.
    pub v0: f64,
    pub samples: Vec<HeatSample>,
    pub fit: Option<DecayFit>,
    pub max_asym_rate: f64,
    pub worst_min_eig_ratio: f64,
    pub worst_comparison_ratio: Option<f64>,
    pub worst_equivariance: f64,
    pub weyl_parity_defect: f64,
}

impl HeatRun {
    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }
    pub fn h1(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.h1).collect()
    }
    pub fn h2(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.h2).collect()
    }

    /// `sup_t envelope(t) e^{lambda0 t}` and the growth over the final half,
    /// `max_{t >= T/2} ratio / ratio(T/2) - 1`.
    pub fn envelope(&self, lambda0: f64) -> (f64, f64) {
        let ratio: Vec<(f64, f64)> = self.samples.iter().map(|s| (s.t, s.envelope * (lambda0 * s.t).exp())).collect();
        let sup = ratio.iter().map(|r| r.1).fold(0.0, f64::max);
        let half = self.params.t_max / 2.0;
        let start = ratio.iter().position(|r| r.0 >= half - 1e-9).unwrap_or(0);
        let base = ratio[start].1;
        let growth = ratio[start..].iter().map(|r| r.1).fold(0.0, f64::max) / base - 1.0;
        (sup, growth)
    }

    /// `sup_t I_a(t) (1 + a + t)^w` recomputed from stored samples is not
    /// possible for general `a`; the run stores `a = 0, w = 1`.
    pub fn radial_product(&self, w: f64) -> (f64, f64) {
        let vals: Vec<f64> = self.samples.iter().map(|s| s.radial_integral * (1.0 + s.t).powf(w)).collect();
        let sup = vals.iter().copied().fold(0.0, f64::max);
        (sup, *vals.last().unwrap())
    }
}

/// `t0`, then every multiple of `every` above `t0`, ending exactly at `t_max`.
pub fn sample_times(t0: f64, t_max: f64, every: f64) -> Vec<f64> {
    let mut out = vec![t0];
    let mut k = (t0 / every).floor() as i64 + 1;
    loop {
        let t = k as f64 * every;
        if t >= t_max - 1e-9 * every {
            break;
        }
        if t > t0 + 1e-9 * every {
            out.push(t);
        }
        k += 1;
    }
    if t_max > t0 {
        out.push(t_max);
    }
    out
}

pub fn run(space: &str, rs: &RestrictedRootSystem, kind: BundleKind, variant: Variant, params: &HeatParams) -> Result<HeatRun> {
    let model = HeatModel::new(rs, kind, variant)?;
    run_model(space, &model, params)
}

pub fn run_model(space: &str, model: &HeatModel, params: &HeatParams) -> Result<HeatRun> {
    let alpha_sum: f64 = model.radial.alphas.iter().sum();
    let r_max = params.r_max.unwrap_or_else(|| params.auto_r_max(alpha_sum));
    let mut state = HeatState::init(model.radial.clone(), params.dr, r_max, params.t0, params.cfl)?;
    let mut comp = if params.comparison {
        Some(HeatState::init(model.comparison(), params.dr, r_max, params.t0, params.cfl)?)
    } else {
        None
    };
    let mut dt_max = state.dt_max;
    if let Some(c) = &comp {
        dt_max = dt_max.min(c.dt_max);
    }
    let times = sample_times(params.t0, params.t_max, params.sample_every);
    let n = model.radial.n;
    let v0 = sphere_area(n) / model.radial.alphas.iter().product::<f64>();
    let balls = ball_volume_profile(&model.radial.alphas, &state.grid.nodes, v0);
    let mut samples = Vec::with_capacity(times.len());
    let record = |st: &HeatState, cp: Option<&HeatState>| -> HeatSample {
        let spectra = st.node_spectra();
        let h1 = weighted_norm_from(&st.grid, &spectra, 1.0);
        let h2 = weighted_norm_from(&st.grid, &spectra, 2.0);
        let norms: Vec<f64> = spectra.iter().map(|e| e.0.abs().max(e.1.abs())).collect();
        let kmax = norms.iter().copied().fold(0.0, f64::max);
        let kmin = spectra.iter().map(|e| e.0).fold(f64::INFINITY, f64::min);
        let envelope = norms.iter().zip(&balls).map(|(k, b)| k * b).fold(0.0, f64::max);
        let radial_integral = norms.iter().zip(&st.grid.cell_volume).zip(&st.grid.nodes).map(|((k, v), r)| k * v / (r + 1.0)).sum();
        let mut equivariance = 0.0_f64;
        for j in (0..st.grid.len()).step_by(7) {
            let k = st.node_matrix(j);
            for r in &model.rho_k0 {
                equivariance = equivariance.max((r * &k - &k * r).amax());
            }
        }
        let equivariance = if kmax > 0.0 { equivariance / kmax } else { 0.0 };
        let (comparison_ratio, comparison_h1) = match cp {
            Some(cs) => {
                let cvals: Vec<f64> = (0..cs.grid.len()).map(|j| cs.c[j]).collect();
                let cmax = cvals.iter().copied().fold(0.0, f64::max);
                let ratio = spectra
                    .iter()
                    .zip(&cvals)
                    .filter(|(_, c)| **c > 1e-10 * cmax)
                    .map(|(e, c)| e.1 / c)
                    .fold(0.0, f64::max);
                let h: f64 = cvals.iter().zip(&cs.grid.cell_volume).map(|(c, v)| c.abs() * v).sum();
                (Some(ratio), Some(h))
            }
            None => (None, None),
        };
        HeatSample {
            t: st.t,
            h1,
            h2,
            envelope,
            min_eig_ratio: if kmax > 0.0 { kmin / kmax } else { 0.0 },
            comparison_ratio,
            comparison_h1,
            equivariance,
            radial_integral,
        }
    };
    samples.push(record(&state, comp.as_ref()));
    let mut steps = 0;
    let mut dt = 0.0_f64;
    for w in times.windows(2) {
        let len = w[1] - w[0];
        let substeps = (len / dt_max).ceil().max(1.0) as usize;
        let h = len / substeps as f64;
        dt = dt.max(h);
        for _ in 0..substeps {
            state.step(h)?;
            if let Some(c) = comp.as_mut() {
                c.step(h)?;
            }
            steps += 1;
        }
        state.t = w[1];
        if let Some(c) = comp.as_mut() {
            c.t = w[1];
        }
        let s = record(&state, comp.as_ref());
        if s.min_eig_ratio < -1e-3 {
            return Err(Error::Numerical(format!("kernel lost positivity at t = {:.3} (ratio {:e})", s.t, s.min_eig_ratio)));
        }
        samples.push(s);
    }
    let times: Vec<f64> = samples.iter().map(|s| s.t).collect();
    let h1: Vec<f64> = samples.iter().map(|s| s.h1).collect();
    let fit = fit_decay(&times, &h1, params.t_max / 2.0, params.t_max).ok();
    let worst_min_eig_ratio = samples.iter().map(|s| s.min_eig_ratio).fold(f64::INFINITY, f64::min);
    let worst_comparison_ratio = samples.iter().filter_map(|s| s.comparison_ratio).reduce(f64::max);
    let worst_equivariance = samples.iter().map(|s| s.equivariance).fold(0.0, f64::max);
    let k0 = state.node_matrix(0);
    let w = &model.weyl;
    let weyl_parity_defect = (w * &k0 * w.transpose() - &k0).amax() / k0.amax().max(f64::MIN_POSITIVE);
    Ok(HeatRun {
        schema_version: crate::spectra::SCHEMA_VERSION,
        space: space.to_string(),
        bundle: model.kind,
        variant: model.variant,
        normalization: Normalization::UnitRoot,
        params: params.clone(),
        r_max: state.grid.r_max,
        dt,
        steps,
        commutant_dim: model.radial.dim(),
        lambda_c: model.lambda_c,
        mus: model.mus.clone(),
        v0,
        samples,
        fit,
        max_asym_rate: state.max_asym_rate,
        worst_min_eig_ratio,
        worst_comparison_ratio,
        worst_equivariance,
        weyl_parity_defect,
    })
}
