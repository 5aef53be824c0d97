//! Run configuration: defaults, then a `[command]` section of a config file,
//! then command-line flags.

use std::path::PathBuf;

use serde::Deserialize;
use symspace::catalog::SPACES;
use symspace::heat::HeatParams;
use symspace::spectra::{BundleKind, Normalization, Variant};
use symspace::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Emit {
    Json,
    Csv,
    Both,
}

impl Emit {
    pub fn parse(s: &str) -> Result<Emit> {
        match s {
            "json" => Ok(Emit::Json),
            "csv" => Ok(Emit::Csv),
            "both" => Ok(Emit::Both),
            _ => Err(Error::Invalid(format!("unknown emit mode `{s}`"))),
        }
    }
    pub fn json(&self) -> bool {
        matches!(self, Emit::Json | Emit::Both)
    }
    pub fn csv(&self) -> bool {
        matches!(self, Emit::Csv | Emit::Both)
    }
}

/// Every key a config section or the command line may set. All optional so
/// layers can be merged.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    pub space: Option<String>,
    pub bundle: Option<String>,
    pub variant: Option<String>,
    pub normalize: Option<String>,
    pub dr: Option<f64>,
    pub rmax: Option<f64>,
    pub t0: Option<f64>,
    pub tmax: Option<f64>,
    pub sample_every: Option<f64>,
    pub sigma: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    pub emit: Option<String>,
    pub out: Option<PathBuf>,
}

impl Overrides {
    /// Fields set in `top` win.
    pub fn merge(self, top: Overrides) -> Overrides {
        Overrides {
            space: top.space.or(self.space),
            bundle: top.bundle.or(self.bundle),
            variant: top.variant.or(self.variant),
            normalize: top.normalize.or(self.normalize),
            dr: top.dr.or(self.dr),
            rmax: top.rmax.or(self.rmax),
            t0: top.t0.or(self.t0),
            tmax: top.tmax.or(self.tmax),
            sample_every: top.sample_every.or(self.sample_every),
            sigma: top.sigma.or(self.sigma),
            samples: top.samples.or(self.samples),
            seed: top.seed.or(self.seed),
            dims: top.dims.or(self.dims),
            emit: top.emit.or(self.emit),
            out: top.out.or(self.out),
        }
    }
}

/// Reads one section of a config file. Keys outside any section apply to
/// every command; the named section overrides them.
pub fn load_section(text: &str, section: &str) -> Result<Overrides> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| config_error(text, &e))?;
    let mut global = toml::Table::new();
    let mut local = None;
    for (k, v) in table {
        match v {
            toml::Value::Table(t) if k == section => local = Some(t),
            toml::Value::Table(_) => {}
            other => {
                global.insert(k, other);
            }
        }
    }
    let parse = |t: toml::Table| -> Result<Overrides> {
        Overrides::deserialize(toml::Value::Table(t)).map_err(|e| Error::Config { line: 0, msg: e.to_string() })
    };
    let base = parse(global)?;
    Ok(match local {
        Some(t) => base.merge(parse(t)?),
        None => base,
    })
}

fn config_error(text: &str, e: &toml::de::Error) -> Error {
    let line = e.span().map_or(0, |s| text[..s.start.min(text.len())].lines().count().max(1));
    Error::Config { line, msg: e.message().to_string() }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub space: Option<String>,
    pub bundle: BundleKind,
    pub variant: Variant,
    pub normalization: Normalization,
    pub heat: HeatParams,
    pub sigma: f64,
    pub samples: usize,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub emit: Emit,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(o: Overrides) -> Result<RunConfig> {
        let defaults = HeatParams::default();
        let heat = HeatParams {
            dr: o.dr.unwrap_or(defaults.dr),
            r_max: o.rmax,
            t0: o.t0.unwrap_or(defaults.t0),
            t_max: o.tmax.unwrap_or(defaults.t_max),
            sample_every: o.sample_every.unwrap_or(defaults.sample_every),
            ..defaults
        };
        let cfg = RunConfig {
            space: o.space,
            bundle: BundleKind::parse(o.bundle.as_deref().unwrap_or("sym2"))?,
            variant: Variant::parse(o.variant.as_deref().unwrap_or("plain"))?,
            normalization: Normalization::parse(o.normalize.as_deref().unwrap_or("unit_root"))?,
            heat,
            sigma: o.sigma.unwrap_or(12.0),
            samples: o.samples.unwrap_or(10_000),
            seed: o.seed.unwrap_or(1),
            dims: o.dims.unwrap_or_else(|| vec![2, 3, 4]),
            emit: Emit::parse(o.emit.as_deref().unwrap_or("json"))?,
            out: o.out,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(s) = &self.space {
            if !SPACES.contains(&s.as_str()) {
                return Err(Error::UnknownSpace(s.clone()));
            }
        }
        let h = &self.heat;
        if !(h.dr > 0.0 && h.dr.is_finite()) {
            return Err(Error::Invalid(format!("dr must be positive, got {}", h.dr)));
        }
        if !(h.t0 >= 4.0 * h.dr * h.dr * (1.0 - 1e-12)) {
            return Err(Error::Invalid(format!("t0 must be at least 4 dr^2 = {}, got {}", 4.0 * h.dr * h.dr, h.t0)));
        }
        if !(h.t_max > h.t0) {
            return Err(Error::Invalid(format!("tmax must exceed t0, got {}", h.t_max)));
        }
        if !(h.sample_every > 0.0) {
            return Err(Error::Invalid("sample_every must be positive".into()));
        }
        if let Some(r) = h.r_max {
            if !(r > 10.0 * h.dr) {
                return Err(Error::Invalid(format!("rmax must exceed 10 dr, got {r}")));
            }
        }
        if !(self.sigma > 10.0) {
            return Err(Error::Invalid(format!("sigma must exceed 10, got {}", self.sigma)));
        }
        if self.samples == 0 {
            return Err(Error::Invalid("samples must be positive".into()));
        }
        if self.dims.is_empty() || self.dims.iter().any(|&n| n < 2) {
            return Err(Error::Invalid("sector dimensions must be at least 2".into()));
        }
        Ok(())
    }

    pub fn require_space(&self) -> Result<&str> {
        self.space.as_deref().ok_or_else(|| Error::Invalid("a space key is required".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn section_overrides_global_and_flags_override_section() {
        let text = "dr = 0.1\nseed = 3\n[heatsim]\ndr = 0.2\nt0 = 0.5\n[regions]\nsigma = 20.0\n";
        let file = load_section(text, "heatsim").unwrap();
        assert_eq!(file.dr, Some(0.2));
        assert_eq!(file.seed, Some(3));
        assert_eq!(file.sigma, None);
        let flags = Overrides { seed: Some(9), ..Default::default() };
        let cfg = RunConfig::resolve(file.merge(flags)).unwrap();
        assert_eq!(cfg.heat.dr, 0.2);
        assert_eq!(cfg.seed, 9);
    }

    #[test]
    fn rejects_bad_ranges() {
        let bad = [
            Overrides { dr: Some(0.0), ..Default::default() },
            Overrides { dr: Some(0.1), t0: Some(0.01), ..Default::default() },
            Overrides { sigma: Some(10.0), ..Default::default() },
            Overrides { space: Some("H9".into()), ..Default::default() },
            Overrides { bundle: Some("sym3".into()), ..Default::default() },
        ];
        for o in bad {
            assert!(RunConfig::resolve(o).is_err());
        }
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(load_section("[spectra]\nbogus = 1\n", "spectra").is_err());
        let e = load_section("dr = \n", "spectra").unwrap_err();
        assert!(matches!(e, Error::Config { line: 1, .. }), "{e}");
    }
}
