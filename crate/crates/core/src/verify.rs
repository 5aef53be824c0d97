//! End-to-end acceptance gates. Each criterion returns a [`Criterion`] with a
//! pass flag and a one-line detail string.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{self, MATRIX_SPACES};
use crate::error::Result;
use crate::geo::{choose_region_constants, default_sweep, sector_sweep, verify_regions};
use crate::heat::{self, HeatParams, HeatRun};
use crate::linalg::{kernel, max_principal_angle, DMat, DVec};
use crate::roots::{enumerate_walls, nilpotent_structure, NilpotentData, RestrictedRootSystem, Wall};
use crate::spectra::{self, einstein_wall_blocks, nullspace_cross_check, spectral_report, BundleKind, Normalization, Sym2, Variant};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Criterion {
    pub id: u32,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub seconds: f64,
}

impl Criterion {
    pub fn line(&self) -> String {
        format!("{} C{:<2} {:<34} {:>7.1}s  {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.name, self.seconds, self.detail)
    }
}

fn timed<F: FnOnce() -> Result<(bool, String)>>(id: u32, name: &str, f: F) -> Criterion {
    let st = Instant::now();
    let (passed, detail) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    Criterion { id, name: name.to_string(), passed, detail, seconds: st.elapsed().as_secs_f64() }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

pub fn example_a() -> Criterion {
    timed(1, "one-form constants on H^n", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for n in 2..=5 {
            let key = format!("H{n}");
            let rs = catalog::root_system(&key)?;
            let r = spectral_report(&key, &rs, BundleKind::OneForms, Variant::Plain, Normalization::UnitRoot)?;
            ok &= close(r.lambda_l, 1.0, 1e-8) && close(r.lambda_b_lower, (n - 1) as f64, 1e-8);
            parts.push(format!("{key}: L={:.10} B={:.10}", r.lambda_l, r.lambda_b_lower));
        }
        Ok((ok, parts.join("; ")))
    })
}

pub fn example_b() -> Criterion {
    timed(2, "traceless sym2 on H^2", || {
        let rs = catalog::root_system("H2")?;
        let r = spectral_report("H2", &rs, BundleKind::Sym2Traceless, Variant::Plain, Normalization::UnitRoot)?;
        Ok((close(r.lambda_l, 4.0, 1e-8), format!("L={:.12}", r.lambda_l)))
    })
}

/// Spaces with a two-dimensional real or a complex hyperbolic factor.
fn has_soft_factor(key: &str) -> bool {
    key.split('x').any(|f| f == "H2" || f.starts_with("CH"))
}

pub fn wall_positivity() -> Criterion {
    timed(3, "wall block positivity", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for key in MATRIX_SPACES {
            let rs = catalog::root_system(key)?;
            let r = spectral_report(key, &rs, BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot)?;
            let mins: Vec<f64> = r.walls.iter().flat_map(|w| w.blocks.iter().filter_map(|b| b.min_eig)).collect();
            let worst = mins.iter().copied().fold(f64::INFINITY, f64::min);
            let mut good = worst >= -1e-8;
            if ["SL3", "SL4", "HH8"].contains(&key) {
                good &= r.lambda0_lower > 1e-4;
            }
            if has_soft_factor(key) {
                good &= mins.iter().any(|m| m.abs() <= 1e-8);
            }
            ok &= good;
            parts.push(format!("{key}:{:.3}", r.lambda0_lower));
        }
        let oh = spectra::cusp_nullspace(&catalog::nilpotent("OH16")?);
        ok &= oh.dim == 0;
        parts.push(format!("OH16 N={}", oh.dim));
        Ok((ok, parts.join(" ")))
    })
}

/// `{h in Sym^2 g_alpha : J h + h J = 0}` for a complex hyperbolic model,
/// embedded in `Sym^2` over all root vectors.
pub fn complex_structure_nullspace(nd: &NilpotentData) -> DMat {
    let n = nd.dim;
    let norms: Vec<f64> = nd.alpha.iter().map(|a| a.norm()).collect();
    let short = norms.iter().copied().fold(f64::INFINITY, f64::min);
    let low: Vec<usize> = (0..n).filter(|&i| norms[i] < short * 1.5).collect();
    let high: Vec<usize> = (0..n).filter(|&i| norms[i] >= short * 1.5).collect();
    let m = low.len();
    let mut j = DMat::zeros(m, m);
    if let Some(&k) = high.first() {
        for (a, &ia) in low.iter().enumerate() {
            for (b, &ib) in low.iter().enumerate() {
                j[(b, a)] = nd.get(ia, ib, k);
            }
        }
        let s = (-(&j * &j).trace() / m as f64).sqrt();
        if s > 0.0 {
            j /= s;
        }
    }
    let local = Sym2::new(m);
    // J h + h J is antisymmetric, so flatten instead of using Sym2 coordinates
    let mut op = DMat::zeros(m * m, local.dim());
    for c in 0..local.dim() {
        let h = local.basis_matrix(c);
        let img = &j * &h + &h * &j;
        for (r, v) in img.iter().enumerate() {
            op[(r, c)] = *v;
        }
    }
    let ker = kernel(&op, 1e-10);
    let full = Sym2::new(n);
    let mut out = DMat::zeros(full.dim(), ker.ncols());
    for (li, &(a, b)) in local.pairs.iter().enumerate() {
        let gi = full.index_of(low[a], low[b]);
        for c in 0..ker.ncols() {
            out[(gi, c)] = ker[(li, c)];
        }
    }
    out
}

pub fn cusp_nullspaces() -> Criterion {
    timed(4, "cusp nullspace dimensions", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (key, want) in [("H3", 2), ("H4", 5), ("H5", 9), ("HH8", 0), ("OH16", 0)] {
            let d = spectra::cusp_nullspace(&catalog::nilpotent(key)?).dim;
            ok &= d == want;
            parts.push(format!("{key}:{d}"));
        }
        for key in ["CH4", "CH6"] {
            let nd = catalog::nilpotent(key)?;
            let ns = spectra::cusp_nullspace(&nd);
            let q = DMat::from_fn(ns.basis.first().map_or(0, |b| b.len()), ns.dim, |i, c| ns.basis[c][i]);
            let want = complex_structure_nullspace(&nd);
            let angle = max_principal_angle(&want, &q);
            ok &= angle <= 1e-6 && want.ncols() == ns.dim;
            parts.push(format!("{key}:{} angle {angle:.1e}", ns.dim));
        }
        let mut worst = 0.0_f64;
        for key in MATRIX_SPACES {
            let rs = catalog::root_system(key)?;
            for wall in enumerate_walls(&rs) {
                let (kd, nd, angle) = nullspace_cross_check(&rs, &wall)?;
                ok &= kd == nd && angle <= 1e-6;
                worst = worst.max(angle);
            }
        }
        parts.push(format!("wall cross-check max angle {worst:.1e}"));
        Ok((ok, parts.join(" ")))
    })
}

pub fn sym2_bochner() -> Criterion {
    timed(5, "sym2 Bochner constant on H^n", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for n in 2..=5 {
            let key = format!("H{n}");
            let rs = catalog::root_system(&key)?;
            let r = spectral_report(&key, &rs, BundleKind::Sym2, Variant::Einstein, Normalization::UnitRoot)?;
            ok &= close(r.lambda_b_lower, (n - 2) as f64, 1e-8);
            parts.push(format!("{key}:{:.10}", r.lambda_b_lower));
        }
        Ok((ok, parts.join(" ")))
    })
}

/// Simulation runs shared by criteria 6 to 9: a fine run and a coarse run
/// at twice the grid spacing.
pub struct HeatRuns {
    pub one_forms: (HeatRun, HeatRun),
    pub traceless: (HeatRun, HeatRun),
    pub einstein: (HeatRun, HeatRun),
    /// Wall time of each pair, in the order above.
    pub seconds: [f64; 3],
}

pub fn acceptance_params(t_max: f64, dr: f64) -> HeatParams {
    HeatParams { dr, t0: 0.04, t_max, ..HeatParams::default() }
}

fn run_pair(space: &str, kind: BundleKind, variant: Variant, t_max: f64) -> Result<(HeatRun, HeatRun)> {
    let rs = catalog::root_system(space)?;
    let coarse = heat::run(space, &rs, kind, variant, &acceptance_params(t_max, 0.1))?;
    let fine = heat::run(space, &rs, kind, variant, &acceptance_params(t_max, 0.05))?;
    Ok((fine, coarse))
}

pub fn heat_runs() -> Result<HeatRuns> {
    let st = Instant::now();
    let one_forms = run_pair("H3", BundleKind::OneForms, Variant::Plain, 12.0)?;
    let t1 = st.elapsed().as_secs_f64();
    let traceless = run_pair("H2", BundleKind::Sym2Traceless, Variant::Plain, 6.0)?;
    let t2 = st.elapsed().as_secs_f64();
    let einstein = run_pair("H3", BundleKind::Sym2, Variant::Einstein, 10.0)?;
    let t3 = st.elapsed().as_secs_f64();
    Ok(HeatRuns { one_forms, traceless, einstein, seconds: [t1, t2 - t1, t3 - t2] })
}

fn rates(pair: &(HeatRun, HeatRun)) -> (f64, f64) {
    let r = |h: &HeatRun| h.fit.as_ref().map_or(f64::NAN, |f| f.rate);
    (r(&pair.0), r(&pair.1))
}

/// Fitted-rate change under halving `dr`, relative to `max(|rate|, 1)`.
fn grid_change(pair: &(HeatRun, HeatRun)) -> f64 {
    let (f, c) = rates(pair);
    (f - c).abs() / f.abs().max(1.0)
}

fn decay_criterion(id: u32, name: &str, pair: Option<&(HeatRun, HeatRun)>, lo: f64, hi: f64) -> Criterion {
    timed(id, name, || {
        let Some(pair) = pair else { return Ok((false, "simulation failed".into())) };
        let (fine, coarse) = rates(pair);
        let change = grid_change(pair);
        let ok = fine >= lo && fine <= hi && change <= 0.02;
        Ok((ok, format!("rate {fine:.5} (dr/2) vs {coarse:.5} (dr), change {:.3}%, want [{lo}, {hi}]", 100.0 * change)))
    })
}

pub fn one_form_decay(runs: Option<&HeatRuns>) -> Criterion {
    decay_criterion(6, "H^3 one-form decay rate", runs.map(|r| &r.one_forms), 0.9, 1.1)
}

pub fn traceless_decay(runs: Option<&HeatRuns>) -> Criterion {
    decay_criterion(7, "H^2 traceless decay rate", runs.map(|r| &r.traceless), 1.8, 2.2)
}

pub fn einstein_bounded(runs: Option<&HeatRuns>) -> Criterion {
    let mut c = decay_criterion(8, "H^3 sym2 Einstein boundedness", runs.map(|r| &r.einstein), -0.05, 0.1);
    if let Some(r) = runs {
        let (sup, growth) = r.einstein.0.envelope(0.0);
        c.passed &= sup.is_finite() && growth <= 0.05;
        c.detail.push_str(&format!("; envelope sup {sup:.4}, late growth {:.2}%", 100.0 * growth));
    }
    c
}

pub fn comparison(runs: Option<&HeatRuns>) -> Criterion {
    timed(9, "comparison and positivity", || {
        let Some(r) = runs else { return Ok((false, "simulation failed".into())) };
        let all = [&r.one_forms.0, &r.one_forms.1, &r.traceless.0, &r.traceless.1, &r.einstein.0, &r.einstein.1];
        let ratio = all.iter().filter_map(|h| h.worst_comparison_ratio).fold(0.0, f64::max);
        let min_eig = all.iter().map(|h| h.worst_min_eig_ratio).fold(f64::INFINITY, f64::min);
        let ok = ratio <= 1.02 && min_eig >= -1e-7 && all.iter().all(|h| h.worst_comparison_ratio.is_some());
        Ok((ok, format!("max K/K° {ratio:.6}, min eig ratio {min_eig:.2e}")))
    })
}

pub fn sector_volume() -> Criterion {
    timed(10, "sector volume sweep", || {
        let sweep = sector_sweep(&default_sweep(&[2, 3, 4]), 48, 7);
        let fits: Vec<String> = sweep.fitted.iter().map(|(n, c, b)| format!("n={n} C={c:.3} (bound {b:.1})")).collect();
        Ok((sweep.passes(), format!("{} configs, {} checks, {} violations; {}", sweep.points.len(), sweep.checked, sweep.violations, fits.join(", "))))
    })
}

/// `2 <S_W h, h>` for diagonal `h = sum lambda_a p_a p_a` on `Sym^2 un a^perp`,
/// from the nilpotent structure constants.
pub fn closed_form_quadratic(rs: &RestrictedRootSystem, nd: &NilpotentData, wall: &Wall, lam: &[f64]) -> f64 {
    let un = &wall.un_vectors;
    let ov: Vec<usize> = (0..nd.dim).filter(|i| !un.contains(i)).collect();
    let mut s = 0.0;
    for (x, &ix) in un.iter().enumerate() {
        for (y, &iy) in un.iter().enumerate() {
            for (z, &iz) in un.iter().enumerate() {
                s += 2.0 * (lam[x] + lam[y] - lam[z]).powi(2) * nd.get(ix, iy, iz).powi(2);
            }
        }
    }
    for l in 0..nd.dim {
        let t: f64 = un.iter().enumerate().map(|(a, &ia)| lam[a] * nd.get(ia, l, ia)).sum();
        s += 8.0 * t * t;
    }
    for (a, &ia) in un.iter().enumerate() {
        for (b, &ib) in un.iter().enumerate() {
            for &l in &ov {
                s += (nd.get(ia, l, ib) + nd.get(ib, l, ia)).powi(2) * (lam[a] - lam[b]).powi(2);
            }
        }
    }
    let mut sharp = DVec::zeros(rs.rank());
    for (a, &ia) in un.iter().enumerate() {
        sharp += rs.alpha_of_vector(ia) * lam[a];
    }
    s + 4.0 * sharp.norm_squared()
}

/// Worst residuals of the structural identities on one space.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct Structure {
    pub algebra: f64,
    pub roots: f64,
    pub obtuse: f64,
    pub half_identity: f64,
    pub root_brackets: f64,
    pub leakage: f64,
    pub identity_block: f64,
    pub closed_form: f64,
}

pub fn structure_residuals(key: &str, seed: u64) -> Result<Structure> {
    let g = catalog::algebra(key)?;
    let ac = g.check();
    let algebra = [ac.antisymmetry, ac.jacobi, ac.killing_consistency, ac.invariance, ac.involutive, ac.automorphism, ac.orthogonality, ac.orthonormality, ac.ad_symmetry]
        .into_iter()
        .fold(0.0, f64::max);
    let algebra = if ac.p_min_eig > 0.0 && ac.k_max_eig < 0.0 { algebra } else { f64::INFINITY };
    let rs = catalog::root_system(key)?;
    let rc = rs.check();
    let roots = if rc.dimension_ok { rc.eigen_residual.max(rc.sharp_residual).max(rc.orthonormality).max(rc.theta_residual) } else { f64::INFINITY };
    let mut obtuse = 0.0_f64;
    for (i, &a) in rs.simple.iter().enumerate() {
        for &b in rs.simple.iter().skip(i + 1) {
            obtuse = obtuse.max(rs.roots[a].alpha.dot(&rs.roots[b].alpha));
        }
    }
    let r = rs.rank();
    let mut half_identity = 0.0_f64;
    for j in 0..r {
        let mut v = DVec::zeros(r);
        v[j] = 1.0;
        let mut s = DVec::zeros(r);
        for i in 0..rs.n_vectors() {
            let al = rs.alpha_of_vector(i);
            s += al * al.dot(&v);
        }
        half_identity = half_identity.max((s - v * 0.5).amax());
    }
    // [g_alpha, g_beta] inside g_{alpha + beta}, over x and y vectors
    let mut elems: Vec<(DVec, DVec)> = Vec::new();
    for (i, v) in rs.vectors.iter().enumerate() {
        let al = rs.alpha_of_vector(i).clone();
        elems.push((v.x.clone(), al.clone()));
        elems.push((v.y.clone(), -al));
    }
    let mut root_brackets = 0.0_f64;
    for (u, au) in &elems {
        for (w, aw) in &elems {
            let br = g.bracket(u, w);
            let sum = au + aw;
            for (j, a) in rs.a_basis.iter().enumerate() {
                let lhs = g.bracket(a, &br);
                root_brackets = root_brackets.max((lhs - &br * sum[j]).amax());
            }
        }
    }
    let nd = nilpotent_structure(&rs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut leakage = 0.0_f64;
    let mut identity_block = 0.0_f64;
    let mut closed_form = 0.0_f64;
    for wall in enumerate_walls(&rs) {
        let wb = einstein_wall_blocks(&rs, &wall)?;
        leakage = leakage.max(wb.leakage);
        if let Some(res) = wb.identity_residual {
            identity_block = identity_block.max(res);
        }
        let un = &wall.un_vectors;
        if un.is_empty() {
            continue;
        }
        let off = wb.geometry.np - un.len();
        for _ in 0..4 {
            let lam: Vec<f64> = (0..un.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
            let idx = &wb.indices[4];
            let mut v = DVec::zeros(idx.len());
            for (p, &gi) in idx.iter().enumerate() {
                let (a, b) = wb.sym.pairs[gi];
                if a == b {
                    v[p] = lam[a - off];
                }
            }
            let q = 2.0 * v.dot(&(&wb.blocks[4].1 * &v));
            let want = closed_form_quadratic(&rs, &nd, &wall, &lam);
            closed_form = closed_form.max((q - want).abs() / want.abs().max(1e-12));
        }
    }
    Ok(Structure { algebra, roots, obtuse, half_identity, root_brackets, leakage, identity_block, closed_form })
}

pub fn structural_suite() -> Criterion {
    timed(11, "structural identities", || {
        let mut worst = Structure::default();
        let mut ok = true;
        for (i, key) in MATRIX_SPACES.iter().enumerate() {
            let s = structure_residuals(key, 100 + i as u64)?;
            ok &= s.algebra <= 1e-9
                && s.roots <= 1e-9
                && s.obtuse <= 1e-12
                && s.half_identity <= 1e-8
                && s.root_brackets <= 1e-9
                && s.leakage <= 1e-8
                && s.identity_block <= 1e-8
                && s.closed_form <= 1e-7;
            worst.algebra = worst.algebra.max(s.algebra);
            worst.roots = worst.roots.max(s.roots);
            worst.obtuse = worst.obtuse.max(s.obtuse);
            worst.half_identity = worst.half_identity.max(s.half_identity);
            worst.root_brackets = worst.root_brackets.max(s.root_brackets);
            worst.leakage = worst.leakage.max(s.leakage);
            worst.identity_block = worst.identity_block.max(s.identity_block);
            worst.closed_form = worst.closed_form.max(s.closed_form);
        }
        let oh = catalog::nilpotent("OH16")?;
        let tt = oh.ttid1().max(oh.ttid2());
        ok &= tt <= 1e-12;
        Ok((
            ok,
            format!(
                "algebra {:.1e} roots {:.1e} obtuse {:.1e} half {:.1e} brackets {:.1e} leakage {:.1e} identity {:.1e} closed-form {:.1e} OH16 T-identities {:.1e}",
                worst.algebra, worst.roots, worst.obtuse, worst.half_identity, worst.root_brackets, worst.leakage, worst.identity_block, worst.closed_form, tt
            ),
        ))
    })
}

pub fn regions(samples: usize) -> Criterion {
    timed(12, "chamber region inclusions", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for (i, key) in ["SL3", "H2xH2"].iter().enumerate() {
            let rs = catalog::root_system(key)?;
            let rc = choose_region_constants(&rs)?;
            let (s1, s2) = rc.slack();
            let rep = verify_regions(&rs, &rc, 12.0, samples, 11 + i as u64)?;
            ok &= s1 >= 0.0 && s2 >= 0.0 && rep.passes();
            parts.push(format!("{key}: checked {:?} violations {:?}", rep.checked, rep.violations));
        }
        Ok((ok, parts.join("; ")))
    })
}

/// Every criterion in order.
pub fn run_all() -> Vec<Criterion> {
    let mut out = vec![example_a(), example_b(), wall_positivity(), cusp_nullspaces(), sym2_bochner()];
    let runs = heat_runs();
    let runs_ref = runs.as_ref().ok();
    let mut heat = [one_form_decay(runs_ref), traceless_decay(runs_ref), einstein_bounded(runs_ref)];
    match &runs {
        Ok(r) => {
            for (c, s) in heat.iter_mut().zip(r.seconds) {
                c.seconds += s;
            }
        }
        Err(e) => heat[0].detail = format!("simulation error: {e}"),
    }
    out.extend(heat);
    out.push(comparison(runs_ref));
    out.push(sector_volume());
    out.push(structural_suite());
    out.push(regions(100_000));
    out
}
