//! Campaign configuration: defaults, validation, and the flat key-value
//! config file with CLI overrides.
//!
//! Every campaign writes its fully resolved configuration into the output
//! directory; feeding that file back in (with a fresh output directory)
//! reproduces the campaign byte for byte.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::evolution::MutationFlip;
use crate::sampling::SampleMethod;
use crate::witness::WitnessSpec;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("missing required setting '{0}'")]
    Missing(&'static str),
    #[error("unknown config key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {reason}")]
    BadValue { key: String, reason: String },
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Whether `rle` sample sets are drawn once per campaign or fresh per seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplesPer {
    Campaign,
    /// Each seed is an independent replicate with its own sample set.
    #[default]
    Seed,
}

impl std::fmt::Display for SamplesPer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplesPer::Campaign => write!(f, "campaign"),
            SamplesPer::Seed => write!(f, "seed"),
        }
    }
}

impl std::str::FromStr for SamplesPer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "campaign" => Ok(SamplesPer::Campaign),
            "seed" => Ok(SamplesPer::Seed),
            other => Err(format!("expected campaign or seed, got {other:?}")),
        }
    }
}

/// Everything a campaign needs; a validated config plus the seed list fully
/// determines all outputs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub language: WitnessSpec,
    pub sampler: SampleMethod,
    /// Total sample count D (half positive, half negative).
    pub samples: usize,
    pub generations: u64,
    /// Number of runs; seeds are `base_seed..base_seed + seeds`.
    pub seeds: usize,
    pub base_seed: u64,
    /// Sorted, deduplicated generation numbers (all <= `generations`).
    pub checkpoints: Vec<u64>,
    pub out: PathBuf,
    /// Worker cap for the seed fan-out; 0 means one per core. Has no effect
    /// on outputs, only on wall-clock time.
    pub parallel: usize,
    pub samples_per: SamplesPer,
    pub mutation_flip: MutationFlip,
    /// Replay against a frozen sample file instead of generating sets.
    pub load_samples: Option<PathBuf>,
    /// Emit a progress line per completed run on stderr. Not part of the
    /// resolved config.
    pub progress: bool,
}

impl ExperimentConfig {
    /// A config with the standard defaults: D = 1000, 30 seeds from base
    /// seed 1, checkpoints derived from the generation count.
    pub fn new(language: WitnessSpec, sampler: SampleMethod, generations: u64) -> Self {
        ExperimentConfig {
            language,
            sampler,
            samples: 1000,
            generations,
            seeds: 30,
            base_seed: 1,
            checkpoints: default_checkpoints(generations),
            out: PathBuf::from("out"),
            parallel: 0,
            samples_per: SamplesPer::default(),
            mutation_flip: MutationFlip::default(),
            load_samples: None,
            progress: false,
        }
    }

    /// The seed list: `seeds` consecutive values from `base_seed`.
    pub fn seed_list(&self) -> Vec<u64> {
        (0..self.seeds as u64).map(|i| self.base_seed + i).collect()
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.samples.is_multiple_of(2) {
            return Err(ConfigError::Invalid(format!(
                "samples must be even, got {}",
                self.samples
            )));
        }
        if self.seeds == 0 {
            return Err(ConfigError::Invalid("seeds must be at least 1".into()));
        }
        if self.base_seed.checked_add(self.seeds as u64 - 1).is_none() {
            return Err(ConfigError::Invalid(
                "base_seed + seeds overflows a 64-bit seed".into(),
            ));
        }
        if self.checkpoints.is_empty() {
            return Err(ConfigError::Invalid("checkpoints must not be empty".into()));
        }
        if !self.checkpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(ConfigError::Invalid(
                "checkpoints must be strictly ascending".into(),
            ));
        }
        if let Some(&last) = self.checkpoints.last() {
            if last > self.generations {
                return Err(ConfigError::Invalid(format!(
                    "checkpoint {last} exceeds the generation count {}",
                    self.generations
                )));
            }
        }
        Ok(())
    }

    /// The resolved flat key-value form; parseable by [`ConfigBuilder`].
    pub fn resolved_text(&self) -> String {
        let mut out = String::from("# resolved campaign configuration\n");
        writeln!(out, "language = {}", self.language).unwrap();
        writeln!(out, "sampler = {}", self.sampler).unwrap();
        writeln!(out, "samples = {}", self.samples).unwrap();
        writeln!(out, "generations = {}", self.generations).unwrap();
        writeln!(out, "seeds = {}", self.seeds).unwrap();
        writeln!(out, "base_seed = {}", self.base_seed).unwrap();
        let cps = self
            .checkpoints
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(",");
        writeln!(out, "checkpoints = {cps}").unwrap();
        writeln!(out, "samples_per = {}", self.samples_per).unwrap();
        writeln!(out, "mutation_flip = {}", self.mutation_flip).unwrap();
        writeln!(out, "parallel = {}", self.parallel).unwrap();
        if let Some(path) = &self.load_samples {
            writeln!(out, "load_samples = {}", path.display()).unwrap();
        }
        writeln!(out, "out = {}", self.out.display()).unwrap();
        out
    }
}

/// Default checkpoint schedule: generation 0, the 1-2-5 decades from 1000
/// up to the final generation, and the final generation itself.
pub fn default_checkpoints(generations: u64) -> Vec<u64> {
    let mut cps = vec![0];
    let mut decade = 1000u64;
    'outer: loop {
        for mult in [1, 2, 5] {
            let Some(cp) = decade.checked_mul(mult) else {
                break 'outer;
            };
            if cp >= generations {
                break 'outer;
            }
            cps.push(cp);
        }
        let Some(next) = decade.checked_mul(10) else {
            break;
        };
        decade = next;
    }
    if generations > 0 {
        cps.push(generations);
    }
    cps.dedup();
    cps
}

/// Accumulates settings from a config file and CLI overrides, then builds a
/// validated [`ExperimentConfig`].
#[derive(Debug, Default, Clone)]
pub struct ConfigBuilder {
    pub language: Option<WitnessSpec>,
    pub sampler: Option<SampleMethod>,
    /// Sampler list for side-by-side comparisons.
    pub samplers: Option<Vec<SampleMethod>>,
    pub samples: Option<usize>,
    pub generations: Option<u64>,
    pub seeds: Option<usize>,
    pub base_seed: Option<u64>,
    pub checkpoints: Option<Vec<u64>>,
    pub out: Option<PathBuf>,
    pub parallel: Option<usize>,
    pub samples_per: Option<SamplesPer>,
    pub mutation_flip: Option<MutationFlip>,
    pub load_samples: Option<PathBuf>,
}

impl ConfigBuilder {
    /// Parse a flat key-value file: one `key = value` per line, `#` comments
    /// and blank lines ignored.
    pub fn from_file(path: &Path) -> Result<ConfigBuilder, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        let mut builder = ConfigBuilder::default();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                ConfigError::Invalid(format!("expected 'key = value', got {line:?}"))
            })?;
            builder.set(key.trim(), value.trim())?;
        }
        Ok(builder)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |reason: String| ConfigError::BadValue {
            key: key.to_string(),
            reason,
        };
        match key {
            "language" => self.language = Some(value.parse().map_err(bad)?),
            "sampler" => self.sampler = Some(value.parse().map_err(bad)?),
            "samplers" => {
                let list: Result<Vec<SampleMethod>, String> =
                    value.split(',').map(|s| s.trim().parse()).collect();
                self.samplers = Some(list.map_err(bad)?);
            }
            "samples" => {
                self.samples = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "generations" => {
                self.generations = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "seeds" => {
                self.seeds = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "base_seed" => {
                self.base_seed = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "checkpoints" => self.checkpoints = Some(parse_checkpoints(value).map_err(bad)?),
            "out" => self.out = Some(PathBuf::from(value)),
            "parallel" => {
                self.parallel = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "samples_per" => self.samples_per = Some(value.parse().map_err(bad)?),
            "mutation_flip" => self.mutation_flip = Some(value.parse().map_err(bad)?),
            "load_samples" => self.load_samples = Some(PathBuf::from(value)),
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
        Ok(())
    }

    /// Build a campaign config; `language`, `sampler`, `generations`, and
    /// `out` must have been provided.
    pub fn build(self) -> Result<ExperimentConfig, ConfigError> {
        let language = self.language.ok_or(ConfigError::Missing("language"))?;
        let sampler = self.sampler.ok_or(ConfigError::Missing("sampler"))?;
        let generations = self
            .generations
            .ok_or(ConfigError::Missing("generations"))?;
        let out = self.out.ok_or(ConfigError::Missing("out"))?;
        let mut cfg = ExperimentConfig::new(language, sampler, generations);
        cfg.out = out;
        if let Some(v) = self.samples {
            cfg.samples = v;
        }
        if let Some(v) = self.seeds {
            cfg.seeds = v;
        }
        if let Some(v) = self.base_seed {
            cfg.base_seed = v;
        }
        if let Some(mut v) = self.checkpoints {
            v.sort_unstable();
            v.dedup();
            cfg.checkpoints = v;
        }
        if let Some(v) = self.parallel {
            cfg.parallel = v;
        }
        if let Some(v) = self.samples_per {
            cfg.samples_per = v;
        }
        if let Some(v) = self.mutation_flip {
            cfg.mutation_flip = v;
        }
        cfg.load_samples = self.load_samples;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Build the shared config and sampler list for a comparison; requires
    /// `samplers` instead of `sampler`.
    pub fn build_compare(mut self) -> Result<(ExperimentConfig, Vec<SampleMethod>), ConfigError> {
        let samplers = self
            .samplers
            .take()
            .filter(|s| !s.is_empty())
            .ok_or(ConfigError::Missing("samplers"))?;
        self.sampler = Some(samplers[0]);
        let cfg = self.build()?;
        Ok((cfg, samplers))
    }
}

pub fn parse_checkpoints(value: &str) -> Result<Vec<u64>, String> {
    value
        .split(',')
        .map(|part| {
            part.trim()
                .parse::<u64>()
                .map_err(|_| format!("bad checkpoint {part:?}"))
        })
        .collect()
}
