//! Command-line flags, the optional TOML config file, and their merge.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Args;
use serde::Deserialize;

use netlod::coarse::PatchRadius;
use netlod::experiment::{ExperimentConfig, ProblemKind, Setup};
use netlod::network::PairPolicy;

/// Flags shared by every command. Anything left unset falls back to the
/// config file, then to the defaults.
#[derive(Debug, Clone, Default, Args)]
pub struct Options {
    /// fixed-boundary or displaced-boundary
    #[arg(long)]
    pub problem: Option<String>,
    /// basic, random-coefficients or random-structure
    #[arg(long)]
    pub setup: Option<String>,
    /// Network resolution: (r+1)² nodes
    #[arg(long)]
    pub r: Option<usize>,
    /// Coarse elements per side; repeat for a study
    #[arg(long = "R")]
    pub big_r: Vec<usize>,
    /// Patch constant C in rho = C log2 R
    #[arg(long = "C")]
    pub c: Option<f64>,
    /// Patch radius in units of H (`inf` or `full` for no localization); repeat for decay
    #[arg(long, value_parser = parse_rho)]
    pub rho: Vec<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// all or none
    #[arg(long = "pair-policy")]
    pub pair_policy: Option<String>,
}

fn parse_rho(s: &str) -> Result<f64, String> {
    match s {
        "full" | "inf" | "infinity" => Ok(f64::INFINITY),
        _ => s.parse::<f64>().map_err(|e| format!("`{s}`: {e}")),
    }
}

/// The config file mirrors the flags.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub problem: Option<String>,
    pub setup: Option<String>,
    pub r: Option<usize>,
    #[serde(rename = "R")]
    pub big_r: Option<Vec<usize>>,
    #[serde(rename = "C")]
    pub c: Option<f64>,
    pub rho: Option<Vec<f64>>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub pair_policy: Option<String>,
    pub save_basis: Option<PathBuf>,
    pub load_basis: Option<PathBuf>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }
}

pub const DEFAULT_R: usize = 128;
pub const DEFAULT_DECAY_RHO: [f64; 6] = [1.0, 2.0, 3.0, 4.0, 5.0, f64::INFINITY];

/// Resolved settings for one run.
#[derive(Debug, Clone)]
pub struct Settings {
    pub experiment: ExperimentConfig,
    pub rho: Vec<f64>,
    pub out: PathBuf,
    pub save_basis: Option<PathBuf>,
    pub load_basis: Option<PathBuf>,
}

/// `R = 4, 8, …` up to `min(32, r/2)`, or `r/2` alone for tiny networks.
fn default_coarse(r: usize) -> Vec<usize> {
    let top = (r / 2).min(32);
    let list: Vec<usize> = (2..6).map(|k| 1usize << k).filter(|&v| v <= top).collect();
    if list.is_empty() {
        vec![r / 2]
    } else {
        list
    }
}

impl Settings {
    pub fn resolve(
        flags: Options,
        file: FileConfig,
        save_basis: Option<PathBuf>,
        load_basis: Option<PathBuf>,
    ) -> Result<Self> {
        let problem: ProblemKind = flags
            .problem
            .or(file.problem)
            .as_deref()
            .unwrap_or("fixed-boundary")
            .parse()?;
        let setup: Setup = flags
            .setup
            .or(file.setup)
            .as_deref()
            .unwrap_or("basic")
            .parse()?;
        let r = flags.r.or(file.r).unwrap_or(DEFAULT_R);
        let coarse = if !flags.big_r.is_empty() {
            flags.big_r
        } else {
            file.big_r.unwrap_or_else(|| default_coarse(r))
        };
        let mut experiment = ExperimentConfig::new(problem, setup, r, coarse);
        if let Some(c) = flags.c.or(file.c) {
            experiment.patch_constant = c;
        }
        experiment.seed = flags.seed.or(file.seed).unwrap_or(0);
        experiment.pair_policy = flags
            .pair_policy
            .or(file.pair_policy)
            .as_deref()
            .unwrap_or("all")
            .parse::<PairPolicy>()?;
        let rho = if !flags.rho.is_empty() {
            flags.rho
        } else {
            file.rho.unwrap_or_default()
        };
        for &v in &rho {
            PatchRadius::new(v)?;
        }
        experiment.validate()?;
        if save_basis.is_some() && load_basis.is_some() {
            bail!("--save-basis and --load-basis are mutually exclusive");
        }
        Ok(Self {
            experiment,
            rho,
            out: flags.out.or(file.out).unwrap_or_else(|| PathBuf::from(".")),
            save_basis: save_basis.or(file.save_basis),
            load_basis: load_basis.or(file.load_basis),
        })
    }

    /// First configured coarse grid, used by single-grid commands.
    pub fn coarse(&self) -> usize {
        self.experiment.coarse[0]
    }

    /// Explicit `--rho`, else `C log₂ R`.
    pub fn lod_radius(&self) -> Result<PatchRadius> {
        let rho = self
            .rho
            .first()
            .copied()
            .unwrap_or_else(|| self.experiment.patch_ratio(self.coarse()));
        Ok(PatchRadius::new(rho)?)
    }

    pub fn decay_radii(&self) -> Result<Vec<PatchRadius>> {
        let list: &[f64] = if self.rho.is_empty() {
            &DEFAULT_DECAY_RHO
        } else {
            &self.rho
        };
        Ok(list
            .iter()
            .map(|&v| PatchRadius::new(v))
            .collect::<netlod::Result<_>>()?)
    }

    pub fn output(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out)
            .with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let file: FileConfig = toml::from_str(
            "problem = \"displaced-boundary\"\nr = 32\nR = [4, 8]\nseed = 7\nrho = [1.0, inf]\n",
        )
        .unwrap();
        let flags = Options {
            r: Some(64),
            ..Options::default()
        };
        let s = Settings::resolve(flags, file, None, None).unwrap();
        assert_eq!(s.experiment.problem, ProblemKind::DisplacedBoundary);
        assert_eq!(s.experiment.r, 64);
        assert_eq!(s.experiment.coarse, vec![4, 8]);
        assert_eq!(s.experiment.seed, 7);
        assert_eq!(s.experiment.patch_constant, 1.5);
        assert_eq!(s.rho, vec![1.0, f64::INFINITY]);
    }

    #[test]
    fn unknown_file_keys_rejected() {
        assert!(toml::from_str::<FileConfig>("colour = 3").is_err());
    }

    #[test]
    fn default_coarse_lists() {
        assert_eq!(default_coarse(128), vec![4, 8, 16, 32]);
        assert_eq!(default_coarse(16), vec![4, 8]);
        assert_eq!(default_coarse(4), vec![2]);
    }

    #[test]
    fn invalid_configs_rejected() {
        let bad = |o: Options| Settings::resolve(o, FileConfig::default(), None, None).is_err();
        assert!(bad(Options {
            r: Some(48),
            ..Options::default()
        }));
        assert!(bad(Options {
            r: Some(32),
            big_r: vec![32],
            ..Options::default()
        }));
        assert!(bad(Options {
            c: Some(0.0),
            ..Options::default()
        }));
        assert!(bad(Options {
            setup: Some("odd".into()),
            ..Options::default()
        }));
        assert!(bad(Options {
            rho: vec![-1.0],
            ..Options::default()
        }));
    }
}
