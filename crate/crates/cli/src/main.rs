use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use symspace::Error;
use symspace_cli::commands::{self, Artifact};
use symspace_cli::config::{load_section, Overrides, RunConfig};

#[derive(Parser)]
#[command(name = "symspace", version, about = "Spectral and heat-flow computations on noncompact symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Restricted root system summary
    Roots(Common),
    /// Zero-order spectral constants, wall blocks and nullspace
    Spectra(Common),
    /// Cusp nullspace of a space or nilpotent model
    Nullspace(Common),
    /// Radial heat kernel simulation on a rank-one space
    Heatsim(Common),
    /// Chamber region inclusion checks
    Regions(Common),
    /// Sector volume sweep
    Sector(Common),
    /// Run every acceptance check; exits nonzero if any fails
    VerifyAll(VerifyArgs),
}

#[derive(Args)]
struct Common {
    /// Space key, e.g. H3, SL3, H2xH2
    #[arg(value_name = "SPACE")]
    space_pos: Option<String>,
    #[arg(long)]
    space: Option<String>,
    /// one_forms | sym2 | sym2_traceless | scalar
    #[arg(long)]
    bundle: Option<String>,
    /// plain | einstein
    #[arg(long)]
    variant: Option<String>,
    /// killing | unit_root
    #[arg(long)]
    normalize: Option<String>,
    #[arg(long)]
    dr: Option<f64>,
    #[arg(long)]
    rmax: Option<f64>,
    #[arg(long)]
    t0: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Sector sweep dimensions, comma separated
    #[arg(long, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// json | csv | both
    #[arg(long)]
    emit: Option<String>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

impl Common {
    fn overrides(&self) -> Result<Overrides, String> {
        if let (Some(a), Some(b)) = (&self.space_pos, &self.space) {
            if a != b {
                return Err(format!("space given twice: `{a}` and `{b}`"));
            }
        }
        Ok(Overrides {
            space: self.space.clone().or_else(|| self.space_pos.clone()),
            bundle: self.bundle.clone(),
            variant: self.variant.clone(),
            normalize: self.normalize.clone(),
            dr: self.dr,
            rmax: self.rmax,
            t0: self.t0,
            tmax: self.tmax,
            sample_every: None,
            sigma: self.sigma,
            samples: self.samples,
            seed: self.seed,
            dims: self.dims.clone(),
            emit: self.emit.clone(),
            out: self.out.clone(),
        })
    }

    fn resolve(&self, section: &str) -> Result<RunConfig, String> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                load_section(&text, section).map_err(|e| format!("{}: {e}", path.display()))?
            }
            None => Overrides::default(),
        };
        RunConfig::resolve(file.merge(self.overrides()?)).map_err(|e| e.to_string())
    }
}

fn write(out: Option<&PathBuf>, arts: &[Artifact]) -> std::io::Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            for a in arts {
                let path = dir.join(&a.name);
                std::fs::write(&path, &a.content)?;
                eprintln!("wrote {}", path.display());
            }
        }
        None => {
            for a in arts {
                print!("{}", a.content);
            }
        }
    }
    Ok(())
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (section, common, run): (&str, &Common, fn(&RunConfig) -> symspace::Result<Vec<Artifact>>) = match &cli.cmd {
        Cmd::Roots(c) => ("roots", c, commands::cmd_roots),
        Cmd::Spectra(c) => ("spectra", c, commands::cmd_spectra),
        Cmd::Nullspace(c) => ("nullspace", c, commands::cmd_nullspace),
        Cmd::Heatsim(c) => ("heatsim", c, commands::cmd_heatsim),
        Cmd::Regions(c) => ("regions", c, commands::cmd_regions),
        Cmd::Sector(c) => ("sector", c, commands::cmd_sector),
        Cmd::VerifyAll(v) => {
            return match commands::cmd_verify_all() {
                Ok((criteria, art)) => {
                    for c in &criteria {
                        println!("{}", c.line());
                    }
                    if let Some(dir) = &v.out {
                        if let Err(e) = write(Some(dir), &[art]) {
                            eprintln!("error: {e}");
                            return ExitCode::FAILURE;
                        }
                    }
                    if criteria.iter().all(|c| c.passed) {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::FAILURE
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::FAILURE
                }
            };
        }
    };
    let cfg = match common.resolve(section) {
        Ok(c) => c,
        Err(msg) => return usage_error(&msg),
    };
    match run(&cfg) {
        Ok(arts) => match write(cfg.out.as_ref(), &arts) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::FAILURE
            }
        },
        Err(e @ (Error::UnknownSpace(_) | Error::Invalid(_) | Error::Unsupported(_) | Error::Config { .. })) => usage_error(&e.to_string()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
