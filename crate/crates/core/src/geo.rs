//! Geometric checks: ball volumes in rank one, the sector-complement volume
//! bound in real hyperbolic space, and Weyl-chamber region constants.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::linalg::DVec;
use crate::roots::{enumerate_walls, RestrictedRootSystem, Wall};

/// Area of the unit sphere `S^{n-1}` in `R^n`.
pub fn sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => sphere_area(n - 2) * 2.0 * PI / (n - 2) as f64,
    }
}

/// Adaptive Simpson quadrature with a relative tolerance.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    // coarse pass to set an absolute scale
    let n = 16;
    let h = (b - a) / n as f64;
    let coarse: f64 = (0..n).map(|i| f(a + (i as f64 + 0.5) * h).abs()).sum::<f64>() * h;
    let tol = rel_tol * coarse.max(whole.abs()).max(f64::MIN_POSITIVE);
    rec(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// `V(r) = V0 int_0^r prod sinh(alpha_i s) ds`.
pub fn ball_volume(alphas: &[f64], r: f64, v0: f64) -> Result<f64> {
    if r < 0.0 || r.is_nan() {
        return Err(Error::Invalid(format!("ball radius {r} is negative")));
    }
    let w = |s: f64| alphas.iter().map(|a| (a * s).sinh()).product::<f64>();
    Ok(v0 * adaptive_simpson(&w, 0.0, r, 1e-11))
}

/// Ball volumes at increasing radii, accumulated cell by cell.
pub fn ball_volume_profile(alphas: &[f64], radii: &[f64], v0: f64) -> Vec<f64> {
    let w = |s: f64| alphas.iter().map(|a| (a * s).sinh()).product::<f64>();
    let mut acc = 0.0;
    let mut last = 0.0;
    radii
        .iter()
        .map(|&r| {
            acc += adaptive_simpson(&w, last, r, 1e-11);
            last = r;
            v0 * acc
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Sector complement in H^n

/// Antiderivative of `sinh^m`.
fn sinh_power_antiderivative(m: usize, x: f64) -> f64 {
    match m {
        0 => x,
        1 => x.cosh(),
        _ => x.sinh().powi(m as i32 - 1) * x.cosh() / m as f64 - (m - 1) as f64 / m as f64 * sinh_power_antiderivative(m - 2, x),
    }
}

/// Configuration: `x1` at the origin, `x0` at distance `r0 + d` along `v`.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct SectorConfig {
    pub n: usize,
    pub r0: f64,
    pub d: f64,
    pub alpha: f64,
}

impl SectorConfig {
    fn dist(&self) -> f64 {
        self.r0 + self.d
    }

    /// Radial interval `[a_lo, a_hi]` of the ball along angle `theta`, if any.
    pub fn ball_interval(&self, theta: f64) -> Option<(f64, f64)> {
        let dd = self.dist();
        let disc = self.r0.sinh().powi(2) - (dd.sinh() * theta.sin()).powi(2);
        if disc < 0.0 {
            return None;
        }
        let big_a = dd.cosh() - dd.sinh() * theta.cos();
        let hi = ((self.r0.cosh() + disc.sqrt()) / big_a).ln();
        if hi <= 0.0 {
            return None;
        }
        let lo = ((self.r0.cosh() - disc.sqrt()) / big_a).ln().max(0.0);
        Some((lo, hi))
    }

    /// Largest angle at which the ball is visible from `x1`.
    pub fn max_angle(&self) -> f64 {
        let dd = self.dist();
        if self.d <= 0.0 {
            std::f64::consts::PI
        } else {
            (self.r0.sinh() / dd.sinh()).min(1.0).asin()
        }
    }

    /// `sinh a = e^{-d} / (1 - cos alpha)`.
    pub fn containment_sinh(&self) -> f64 {
        (-self.d).exp() / (2.0 * (0.5 * self.alpha).sin().powi(2))
    }

    /// `vol(B_{r0}(x0) \ S_{v, alpha})`.
    pub fn complement_volume(&self) -> f64 {
        let top = self.max_angle();
        if self.alpha >= top {
            return 0.0;
        }
        let m = self.n - 1;
        let f = |th: f64| match self.ball_interval(th) {
            Some((lo, hi)) => th.sin().powi(self.n as i32 - 2) * (sinh_power_antiderivative(m, hi) - sinh_power_antiderivative(m, lo)),
            None => 0.0,
        };
        sphere_area(self.n - 1) * adaptive_simpson(&f, self.alpha, top, 1e-10)
    }

    /// `e^{-(n-1)d} alpha^{-2(n-1)}`.
    pub fn bound_scale(&self) -> f64 {
        let k = (self.n - 1) as f64;
        (-k * self.d).exp() * self.alpha.powf(-2.0 * k)
    }
}

/// Upper root `u+ = e^{a_hi}` at angle `theta` in double-double.
fn upper_root_dd(cfg: &SectorConfig, theta: f64) -> Option<TwoFloat> {
    let dd = TwoFloat::from(cfg.r0) + TwoFloat::from(cfg.d);
    let r0 = TwoFloat::from(cfg.r0);
    let th = TwoFloat::from(theta);
    let disc = r0.sinh() * r0.sinh() - (dd.sinh() * th.sin()) * (dd.sinh() * th.sin());
    if disc < TwoFloat::from(0.0) {
        return None;
    }
    let big_a = dd.cosh() - dd.sinh() * th.cos();
    Some((r0.cosh() + disc.sqrt()) / big_a)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectorResult {
    pub config: SectorConfig,
    /// Containment radius `a`.
    pub a: f64,
    pub checked: usize,
    pub violations: usize,
    /// `min (e^a - e^{a'}) / e^a` over checked points; negative means violation.
    pub worst_margin: f64,
    pub complement_volume: f64,
    pub bound_scale: f64,
    pub ratio: f64,
}

/// Containment `B_{r0}(x0) \ S ⊂ B_a(x1)` checked in double-double on a
/// fixed angle grid, random angles and random interior points.
pub fn sector_check(cfg: SectorConfig, samples: usize, rng: &mut ChaCha8Rng) -> SectorResult {
    let s = cfg.containment_sinh();
    let s_dd = TwoFloat::from((-cfg.d).exp()) / (TwoFloat::from(1.0) - TwoFloat::from(cfg.alpha).cos());
    let big_u = s_dd + (s_dd * s_dd + TwoFloat::from(1.0)).sqrt();
    let top = cfg.max_angle();
    let mut thetas: Vec<f64> = Vec::new();
    if cfg.alpha < top {
        let grid = 32;
        thetas.extend((0..=grid).map(|i| cfg.alpha + (top - cfg.alpha) * i as f64 / grid as f64));
        thetas.extend((0..samples).map(|_| rng.random_range(cfg.alpha..=top)));
    }
    let mut checked = 0;
    let mut violations = 0;
    let mut worst = f64::INFINITY;
    for &th in &thetas {
        if let Some(u) = upper_root_dd(&cfg, th) {
            checked += 1;
            let margin = ((big_u - u) / big_u).hi();
            worst = worst.min(margin);
            if margin < 0.0 {
                violations += 1;
            }
        }
    }
    // interior points by the law of cosines
    if cfg.alpha < top {
        let dd = TwoFloat::from(cfg.r0) + TwoFloat::from(cfg.d);
        let cr0 = TwoFloat::from(cfg.r0).cosh();
        for _ in 0..samples {
            let th = rng.random_range(cfg.alpha..=top);
            let Some((lo, hi)) = cfg.ball_interval(th) else { continue };
            let ap = rng.random_range(lo..=hi);
            let apd = TwoFloat::from(ap);
            let crp = dd.cosh() * apd.cosh() - dd.sinh() * apd.sinh() * TwoFloat::from(th).cos();
            if crp > cr0 {
                continue;
            }
            checked += 1;
            let margin = ((s_dd - apd.sinh()) / s_dd).hi();
            worst = worst.min(margin);
            if margin < 0.0 {
                violations += 1;
            }
        }
    }
    let complement_volume = cfg.complement_volume();
    let bound_scale = cfg.bound_scale();
    SectorResult {
        config: cfg,
        a: s.asinh(),
        checked,
        violations,
        worst_margin: if checked == 0 { 0.0 } else { worst },
        complement_volume,
        bound_scale,
        ratio: complement_volume / bound_scale,
    }
}

/// `C = area(S^{n-1}) (pi^2 / 2)^{n-1} / (n - 1)`, from `vol B_a <= area sinh^{n-1} a / (n-1)`
/// and `1 - cos alpha >= 2 alpha^2 / pi^2`.
pub fn sector_constant_bound(n: usize) -> f64 {
    let k = (n - 1) as f64;
    sphere_area(n) * (std::f64::consts::PI.powi(2) / 2.0).powf(k) / k
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SectorSweep {
    pub points: Vec<SectorResult>,
    pub violations: usize,
    pub checked: usize,
    /// Per dimension: `(n, fitted C = max ratio, analytic bound)`.
    pub fitted: Vec<(usize, f64, f64)>,
}

impl SectorSweep {
    pub fn passes(&self) -> bool {
        self.violations == 0 && self.fitted.iter().all(|f| f.1.is_finite() && f.1 <= f.2)
    }
}

/// Default grid: `d in {-0.5, 0, 1, .., 8}`, `alpha in {0.1, .., 1.0}`, `r0 in {1, .., 10}`.
pub fn default_sweep(ns: &[usize]) -> Vec<SectorConfig> {
    let mut out = Vec::new();
    for &n in ns {
        for d in std::iter::once(-0.5).chain((0..=8).map(f64::from)) {
            for ai in 1..=10 {
                for r0 in 1..=10 {
                    out.push(SectorConfig { n, r0: r0 as f64, d, alpha: ai as f64 * 0.1 });
                }
            }
        }
    }
    out
}

pub fn sector_sweep(configs: &[SectorConfig], samples: usize, seed: u64) -> SectorSweep {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<SectorResult> = configs.iter().map(|c| sector_check(*c, samples, &mut rng)).collect();
    let mut ns: Vec<usize> = configs.iter().map(|c| c.n).collect();
    ns.sort_unstable();
    ns.dedup();
    let fitted = ns
        .iter()
        .map(|&n| {
            let c = points.iter().filter(|p| p.config.n == n).map(|p| p.ratio).fold(0.0, f64::max);
            (n, c, sector_constant_bound(n))
        })
        .collect();
    SectorSweep {
        violations: points.iter().map(|p| p.violations).sum(),
        checked: points.iter().map(|p| p.checked).sum(),
        points,
        fitted,
    }
}

// ---------------------------------------------------------------------------
// Chamber regions

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionConstants {
    pub keys: Vec<String>,
    pub ov_simple: Vec<Vec<usize>>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    /// `max |un alpha(ov v)| / |ov v|` over walls and un roots.
    pub c0: f64,
    /// `max 1 / |un beta^#|` over walls and un simple roots.
    pub c1: f64,
}

impl RegionConstants {
    /// Worst slack in `b_W - C0 a_W >= 1` and in `a_W' >= 2 a_W + 4 C1 b_W`.
    pub fn slack(&self) -> (f64, f64) {
        let s1 = self.a.iter().zip(&self.b).map(|(a, b)| b - self.c0 * a - 1.0).fold(f64::INFINITY, f64::min);
        let mut s2 = f64::INFINITY;
        for (w, ov) in self.ov_simple.iter().enumerate() {
            for (wp, ovp) in self.ov_simple.iter().enumerate() {
                if is_boundary(ov, ovp) {
                    s2 = s2.min(self.a[wp] - 2.0 * self.a[w] - 4.0 * self.c1 * self.b[w]);
                }
            }
        }
        (s1, s2)
    }
}

/// `W'` is a codimension-one wall of `W`: one more simple root in `ov B`.
fn is_boundary(ov: &[usize], ovp: &[usize]) -> bool {
    ovp.len() == ov.len() + 1 && ov.iter().all(|j| ovp.contains(j))
}

/// Root data in unit-root scale, with per-wall projections.
struct ChamberGeometry {
    simple: Vec<DVec>,
    positive: Vec<(DVec, Vec<i64>)>,
    walls: Vec<Wall>,
}

impl ChamberGeometry {
    fn new(rs: &RestrictedRootSystem) -> Self {
        let s = rs.shortest_root_norm();
        let simple = rs.simple.iter().map(|&i| &rs.roots[i].alpha / s).collect();
        let positive = rs.roots.iter().map(|r| (&r.alpha / s, r.simple_coeffs.clone())).collect();
        ChamberGeometry { simple, positive, walls: enumerate_walls(rs) }
    }

    fn ov_part(&self, w: usize, v: &DVec) -> DVec {
        let mut out = DVec::zeros(v.len());
        for e in &self.walls[w].ov_a {
            out += e * e.dot(v);
        }
        out
    }

    fn un_simple(&self, w: usize) -> Vec<usize> {
        (0..self.simple.len()).filter(|j| !self.walls[w].ov_simple.contains(j)).collect()
    }

    fn is_un_root(&self, w: usize, coeffs: &[i64]) -> bool {
        coeffs.iter().enumerate().any(|(j, &c)| c != 0 && !self.walls[w].ov_simple.contains(&j))
    }

    /// Margins `(ov radius slack, min simple value slack)` against
    /// `|ov v| <= ov_max` and `alpha(un v) >= un_min` for un simple roots.
    fn margins(&self, w: usize, v: &DVec, ov_max: f64, un_min: f64) -> f64 {
        let ov = self.ov_part(w, v);
        let un = v - &ov;
        let mut m = ov_max - ov.norm();
        for j in self.un_simple(w) {
            m = m.min(self.simple[j].dot(&un) - un_min);
        }
        m
    }
}

pub fn choose_region_constants(rs: &RestrictedRootSystem) -> Result<RegionConstants> {
    let geo = ChamberGeometry::new(rs);
    let nw = geo.walls.len();
    let mut c0 = 0.0_f64;
    let mut c1 = 0.0_f64;
    for w in 0..nw {
        for (alpha, coeffs) in &geo.positive {
            if geo.is_un_root(w, coeffs) {
                c0 = c0.max(geo.ov_part(w, alpha).norm());
            }
        }
        for j in geo.un_simple(w) {
            let un = &geo.simple[j] - geo.ov_part(w, &geo.simple[j]);
            c1 = c1.max(1.0 / un.norm());
        }
    }
    let mut a = vec![0.0; nw];
    let mut b = vec![0.0; nw];
    for w in 0..nw {
        let ov = &geo.walls[w].ov_simple;
        a[w] = 2.0;
        for w0 in 0..w {
            if is_boundary(&geo.walls[w0].ov_simple, ov) {
                a[w] = f64::max(a[w], 2.0 * a[w0] + 4.0 * c1 * b[w0]);
            }
        }
        b[w] = 2.0 + c0 * a[w];
    }
    let rc = RegionConstants {
        keys: geo.walls.iter().map(|w| w.key()).collect(),
        ov_simple: geo.walls.iter().map(|w| w.ov_simple.clone()).collect(),
        a,
        b,
        c0,
        c1,
    };
    let (s1, s2) = rc.slack();
    if s1 < -1e-12 || s2 < -1e-12 {
        return Err(Error::Numerical(format!("region constants violate their recursion ({s1:e}, {s2:e})")));
    }
    Ok(rc)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionReport {
    pub sigma: f64,
    pub samples_per_region: usize,
    pub seed: u64,
    /// Per property (1), (2), (3).
    pub checked: [usize; 3],
    pub violations: [usize; 3],
    /// Smallest margin seen for each property; negative means violation.
    pub worst_margin: [f64; 3],
    pub constants: RegionConstants,
}

impl RegionReport {
    pub fn passes(&self) -> bool {
        self.violations.iter().all(|v| *v == 0)
    }
}

/// Random point `ov v + sum_j c_j omega_j` with `ov v` uniform in a ball of
/// radius `ov_radius` and `c_j` drawn from `ranges[j]`, where `omega_j` is
/// the un-a basis dual to the un simple roots.
fn sample_point(geo: &ChamberGeometry, w: usize, ov_radius: f64, ranges: &[(f64, f64)], rng: &mut ChaCha8Rng) -> DVec {
    let r = geo.simple.len();
    let wall = &geo.walls[w];
    let k = wall.ov_a.len();
    let mut v = DVec::zeros(r);
    if k > 0 {
        let g: Vec<f64> = (0..k).map(|_| gaussian(rng)).collect();
        let nrm = g.iter().map(|x| x * x).sum::<f64>().sqrt().max(f64::MIN_POSITIVE);
        let rad = ov_radius * rng.random::<f64>().powf(1.0 / k as f64);
        for (e, gi) in wall.ov_a.iter().zip(&g) {
            v += e * (rad * gi / nrm);
        }
    }
    let un = geo.un_simple(w);
    if !un.is_empty() {
        let m = crate::linalg::DMat::from_fn(un.len(), wall.un_a.len(), |i, j| geo.simple[un[i]].dot(&wall.un_a[j]));
        let c = DVec::from_iterator(un.len(), ranges.iter().map(|(lo, hi)| if hi > lo { rng.random_range(*lo..*hi) } else { *lo }));
        let coef = m.lu().solve(&c).unwrap_or_else(|| DVec::zeros(un.len()));
        for (e, x) in wall.un_a.iter().zip(coef.iter()) {
            v += e * *x;
        }
    }
    v
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

/// Sample each wall's regions and check the three inclusions.
pub fn verify_regions(rs: &RestrictedRootSystem, rc: &RegionConstants, sigma: f64, samples: usize, seed: u64) -> Result<RegionReport> {
    if sigma <= 10.0 {
        return Err(Error::Invalid(format!("sigma must exceed 10, got {sigma}")));
    }
    let geo = ChamberGeometry::new(rs);
    let nw = geo.walls.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = [0usize; 3];
    let mut violations = [0usize; 3];
    let mut worst = [f64::INFINITY; 3];
    let boundary: Vec<Vec<usize>> = (0..nw).map(|w| (0..nw).filter(|&wp| is_boundary(&rc.ov_simple[w], &rc.ov_simple[wp])).collect()).collect();
    let in_x = |wp: usize, v: &DVec, s: f64| geo.margins(wp, v, rc.a[wp] * (s - 1.0), 0.0);
    let mut record = |p: usize, margin: f64| {
        checked[p] += 1;
        worst[p] = worst[p].min(margin);
        if margin < 0.0 {
            violations[p] += 1;
        }
    };
    for w in 0..nw {
        let (a, b) = (rc.a[w], rc.b[w]);
        let un = geo.un_simple(w);
        if un.is_empty() {
            // X and R coincide up to radius; only (3) is meaningful
            for _ in 0..samples {
                let v = sample_point(&geo, w, a * (sigma - 1.0), &[], &mut rng);
                let f = if rng.random::<bool>() { 1.0 } else { rng.random_range(1.0..4.0) };
                record(2, geo.margins(w, &v, a * (f * sigma - 1.0), 0.0));
            }
            continue;
        }
        let un_roots: Vec<&DVec> = geo.positive.iter().filter(|(_, c)| geo.is_un_root(w, c)).map(|(a, _)| a).collect();
        // (1)
        for _ in 0..samples {
            let ranges = vec![(b * sigma, 3.0 * b * sigma); un.len()];
            let v = sample_point(&geo, w, a * sigma, &ranges, &mut rng);
            let m = un_roots.iter().map(|al| al.dot(&v) - sigma).fold(f64::INFINITY, f64::min);
            record(0, m);
        }
        // (2)
        for _ in 0..samples {
            let mut ranges = vec![(b * sigma, 3.0 * b * sigma); un.len()];
            let pick = rng.random_range(0..un.len());
            ranges[pick] = (b * sigma, b * (sigma + 1.0));
            let v = sample_point(&geo, w, a * sigma, &ranges, &mut rng);
            let m = boundary[w].iter().map(|&wp| in_x(wp, &v, sigma)).fold(f64::NEG_INFINITY, f64::max);
            record(1, m);
        }
        // (3)
        for _ in 0..samples {
            let ranges = vec![(0.0, 3.0 * b * sigma); un.len()];
            let v = sample_point(&geo, w, a * (sigma - 1.0), &ranges, &mut rng);
            let f = if rng.random::<bool>() { 1.0 } else { rng.random_range(1.0..4.0) };
            let fs = f * sigma;
            let in_r = geo.margins(w, &v, a * (fs - 1.0), b * (fs + 1.0));
            let m = boundary[w].iter().map(|&wp| in_x(wp, &v, fs)).fold(in_r, f64::max);
            record(2, m);
        }
    }
    Ok(RegionReport { sigma, samples_per_region: samples, seed, checked, violations, worst_margin: worst, constants: rc.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn antiderivative_matches_quadrature() {
        for m in 0..5 {
            let q = adaptive_simpson(&|x: f64| x.sinh().powi(m as i32), 0.3, 2.1, 1e-12);
            let f = sinh_power_antiderivative(m, 2.1) - sinh_power_antiderivative(m, 0.3);
            assert!((q - f).abs() < 1e-9 * f.abs().max(1.0), "m = {m}");
        }
    }

    #[test]
    fn full_ball_volume_when_sector_is_empty() {
        // alpha tiny, x1 inside the ball: complement is almost the whole ball
        let cfg = SectorConfig { n: 3, r0: 1.0, d: -0.5, alpha: 1e-4 };
        let v = cfg.complement_volume();
        // ball of radius 1 in H^3: pi (sinh 2 - 2)
        let exact = std::f64::consts::PI * (2f64.sinh() - 2.0);
        assert!((v - exact).abs() < 1e-6 * exact, "{v} vs {exact}");
    }
}
