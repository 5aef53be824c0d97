//! Command payloads. Each command returns named text artifacts; the caller
//! prints them or writes them under the output directory.

use serde::Serialize;
use symspace::catalog;
use symspace::geo::{choose_region_constants, default_sweep, sector_sweep, verify_regions, RegionReport, SectorSweep};
use symspace::heat::{self, HeatRun};
use symspace::roots::RestrictedRootSystem;
use symspace::spectra::{self, normalization_scale, spectral_report, Normalization, NullspaceReport, SpectralReport, SCHEMA_VERSION};
use symspace::verify::{self, Criterion};
use symspace::{Error, Result};

use crate::config::RunConfig;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub content: String,
}

fn json<T: Serialize>(name: String, value: &T) -> Result<Artifact> {
    let mut content = serde_json::to_string_pretty(value)?;
    content.push('\n');
    Ok(Artifact { name, content })
}

fn csv_text<R: Serialize>(name: String, rows: &[R]) -> Result<Artifact> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Invalid(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(Artifact { name, content: String::from_utf8(bytes).map_err(|e| Error::Invalid(e.to_string()))? })
}

fn emit_both(cfg: &RunConfig, js: impl FnOnce() -> Result<Artifact>, cs: impl FnOnce() -> Result<Artifact>) -> Result<Vec<Artifact>> {
    let mut out = Vec::new();
    if cfg.emit.json() {
        out.push(js()?);
    }
    if cfg.emit.csv() {
        out.push(cs()?);
    }
    Ok(out)
}

#[derive(Serialize)]
pub struct RootEntry {
    pub alpha: Vec<f64>,
    pub multiplicity: usize,
    pub simple_coeffs: Vec<i64>,
}

#[derive(Serialize)]
pub struct RootsSummary {
    pub schema_version: u32,
    pub space: String,
    pub normalization: Normalization,
    /// Factor applied to covectors and structure constants.
    pub scale: f64,
    pub dim: usize,
    pub rank: usize,
    pub roots: Vec<RootEntry>,
    pub simple: Vec<usize>,
    pub gram: Vec<Vec<f64>>,
    /// `(i, j, k, T_ij^k)` for nonzero entries over the positive root vectors.
    pub t_symbols: Vec<(usize, usize, usize, f64)>,
}

pub fn roots_summary(space: &str, rs: &RestrictedRootSystem, norm: Normalization) -> Result<RootsSummary> {
    let c = normalization_scale(rs, norm).sqrt();
    let roots: Vec<RootEntry> = rs
        .roots
        .iter()
        .map(|r| RootEntry { alpha: r.alpha.iter().map(|x| x * c).collect(), multiplicity: r.multiplicity, simple_coeffs: r.simple_coeffs.clone() })
        .collect();
    let gram = rs
        .simple
        .iter()
        .map(|&i| rs.simple.iter().map(|&j| c * c * rs.roots[i].alpha.dot(&rs.roots[j].alpha)).collect())
        .collect();
    let nd = symspace::roots::nilpotent_structure(rs)?;
    let mut t_symbols = Vec::new();
    for i in 0..nd.dim {
        for j in 0..nd.dim {
            for k in 0..nd.dim {
                let t = nd.get(i, j, k);
                if t.abs() > 1e-12 {
                    t_symbols.push((i, j, k, t * c));
                }
            }
        }
    }
    Ok(RootsSummary {
        schema_version: SCHEMA_VERSION,
        space: space.to_string(),
        normalization: norm,
        scale: c,
        dim: rs.algebra.np,
        rank: rs.rank(),
        roots,
        simple: rs.simple.clone(),
        gram,
        t_symbols,
    })
}

pub fn cmd_roots(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let space = cfg.require_space()?;
    let rs = catalog::root_system(space)?;
    let summary = roots_summary(space, &rs, cfg.normalization)?;
    Ok(vec![json(format!("roots_{space}.json"), &summary)?])
}

#[derive(Serialize)]
pub struct SpectraRow<'a> {
    pub space: &'a str,
    pub bundle: &'a str,
    pub variant: &'a str,
    pub normalization: &'a str,
    pub scale: f64,
    pub lambda_l: f64,
    pub lambda_b_lower: f64,
    pub lambda0_lower: f64,
    pub lambda1_lower: Option<f64>,
    pub positive: bool,
    pub nullspace_dim: Option<usize>,
}

pub fn spectra_row(r: &SpectralReport) -> SpectraRow<'_> {
    SpectraRow {
        space: &r.space,
        bundle: r.bundle.name(),
        variant: r.variant.name(),
        normalization: r.normalization.name(),
        scale: r.scale,
        lambda_l: r.lambda_l,
        lambda_b_lower: r.lambda_b_lower,
        lambda0_lower: r.lambda0_lower,
        lambda1_lower: r.lambda1_lower,
        positive: r.positive,
        nullspace_dim: r.nullspace.as_ref().map(|n| n.dim),
    }
}

pub fn cmd_spectra(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let space = cfg.require_space()?;
    let rs = catalog::root_system(space)?;
    let r = spectral_report(space, &rs, cfg.bundle, cfg.variant, cfg.normalization)?;
    let stem = format!("spectra_{space}_{}_{}", cfg.bundle.name(), cfg.variant.name());
    emit_both(cfg, || json(format!("{stem}.json"), &r), || csv_text(format!("{stem}.csv"), &[spectra_row(&r)]))
}

#[derive(Serialize)]
pub struct NullspaceOutput {
    pub schema_version: u32,
    pub space: String,
    /// The nullspace is scale invariant; the tag records the coordinates.
    pub normalization: Normalization,
    pub nilpotent_dim: usize,
    pub nullspace: NullspaceReport,
}

pub fn cmd_nullspace(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let space = cfg.require_space()?;
    let nd = catalog::nilpotent(space)?;
    let out = NullspaceOutput {
        schema_version: SCHEMA_VERSION,
        space: space.to_string(),
        normalization: Normalization::Killing,
        nilpotent_dim: nd.dim,
        nullspace: spectra::cusp_nullspace(&nd),
    };
    Ok(vec![json(format!("nullspace_{space}.json"), &out)?])
}

#[derive(Serialize)]
pub struct HeatRow {
    pub t: f64,
    #[serde(rename = "H1")]
    pub h1: f64,
    #[serde(rename = "H2")]
    pub h2: f64,
    pub sup_envelope_ratio: f64,
}

/// Time series with the envelope normalized by its initial value.
pub fn heat_rows(run: &HeatRun) -> Vec<HeatRow> {
    let e0 = run.samples.first().map_or(1.0, |s| s.envelope);
    run.samples.iter().map(|s| HeatRow { t: s.t, h1: s.h1, h2: s.h2, sup_envelope_ratio: s.envelope / e0 }).collect()
}

pub fn cmd_heatsim(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let space = cfg.require_space()?;
    if cfg.normalization != Normalization::UnitRoot {
        return Err(Error::Unsupported("heat simulation runs in unit_root normalization".into()));
    }
    let rs = catalog::root_system(space)?;
    let run = heat::run(space, &rs, cfg.bundle, cfg.variant, &cfg.heat)?;
    let stem = format!("heat_{space}_{}_{}", cfg.bundle.name(), cfg.variant.name());
    emit_both(cfg, || json(format!("{stem}.json"), &run), || csv_text(format!("{stem}.csv"), &heat_rows(&run)))
}

#[derive(Serialize)]
pub struct RegionsOutput {
    pub schema_version: u32,
    pub space: String,
    pub normalization: Normalization,
    pub slack: (f64, f64),
    pub passed: bool,
    pub report: RegionReport,
}

pub fn cmd_regions(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let space = cfg.require_space()?;
    let rs = catalog::root_system(space)?;
    let rc = choose_region_constants(&rs)?;
    let slack = rc.slack();
    let report = verify_regions(&rs, &rc, cfg.sigma, cfg.samples, cfg.seed)?;
    let out = RegionsOutput {
        schema_version: SCHEMA_VERSION,
        space: space.to_string(),
        normalization: Normalization::UnitRoot,
        slack,
        passed: report.passes() && slack.0 >= 0.0 && slack.1 >= 0.0,
        report,
    };
    Ok(vec![json(format!("regions_{space}.json"), &out)?])
}

#[derive(Serialize)]
pub struct SectorRow {
    pub n: usize,
    pub d: f64,
    pub alpha: f64,
    pub r0: f64,
    pub complement_volume: f64,
    pub bound: f64,
    pub ratio: f64,
}

#[derive(Serialize)]
pub struct SectorOutput {
    pub schema_version: u32,
    /// Curvature normalized to `-1`.
    pub normalization: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checked: usize,
    pub violations: usize,
    pub fitted: Vec<(usize, f64, f64)>,
}

pub fn sector_rows(sweep: &SectorSweep) -> Vec<SectorRow> {
    sweep
        .points
        .iter()
        .map(|p| SectorRow {
            n: p.config.n,
            d: p.config.d,
            alpha: p.config.alpha,
            r0: p.config.r0,
            complement_volume: p.complement_volume,
            bound: p.bound_scale,
            ratio: p.ratio,
        })
        .collect()
}

pub fn cmd_sector(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let per_config = (cfg.samples / 100).clamp(8, 1000);
    let sweep = sector_sweep(&default_sweep(&cfg.dims), per_config, cfg.seed);
    let out = SectorOutput {
        schema_version: SCHEMA_VERSION,
        normalization: "unit_curvature",
        seed: cfg.seed,
        passed: sweep.passes(),
        checked: sweep.checked,
        violations: sweep.violations,
        fitted: sweep.fitted.clone(),
    };
    emit_both(cfg, || json("sector.json".into(), &out), || csv_text("sector.csv".into(), &sector_rows(&sweep)))
}

#[derive(Serialize)]
pub struct VerifyOutput {
    pub schema_version: u32,
    pub normalization: Normalization,
    pub passed: bool,
    pub criteria: Vec<Criterion>,
}

pub fn cmd_verify_all() -> Result<(Vec<Criterion>, Artifact)> {
    let criteria = verify::run_all();
    let out = VerifyOutput {
        schema_version: SCHEMA_VERSION,
        normalization: Normalization::UnitRoot,
        passed: criteria.iter().all(|c| c.passed),
        criteria,
    };
    let art = json("verify.json".into(), &out)?;
    Ok((out.criteria, art))
}
