//! `fsm-evo`: evolve finite state machines against the universal-witness
//! languages and export census, trajectory, and summary CSVs.

use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use fsm_evo::evolution::MutationFlip;
use fsm_evo::harness::{
    self, census_report, compare_samplers, parse_checkpoints, run_campaign, run_single,
    ConfigBuilder, ConfigError, ExperimentConfig, HarnessError, SamplesPer,
};
use fsm_evo::sampling::SampleMethod;
use fsm_evo::witness::WitnessSpec;

#[derive(Parser)]
#[command(
    name = "fsm-evo",
    version,
    about = "Evolve finite state machines against the universal-witness languages U_n"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact member census of a witness language, as CSV.
    Census {
        /// Witness language, e.g. U3.
        #[arg(long, value_parser = WitnessSpec::from_str)]
        language: WitnessSpec,
        /// Largest length bound to report.
        #[arg(long, default_value_t = 16)]
        max_len: usize,
        /// Write the CSV here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a sample set and save it to a file.
    Sample {
        #[arg(long, value_parser = WitnessSpec::from_str)]
        language: WitnessSpec,
        /// bss or rle:<n>.
        #[arg(long, value_parser = SampleMethod::from_str)]
        sampler: SampleMethod,
        /// Total sample count D.
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// Seed for randomized samplers (ignored by bss).
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Destination file (two-column label,string format).
        #[arg(long)]
        save_samples: PathBuf,
    },
    /// One seeded evolution run.
    Evolve {
        #[arg(long, value_parser = WitnessSpec::from_str)]
        language: WitnessSpec,
        #[arg(long, value_parser = SampleMethod::from_str)]
        sampler: SampleMethod,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long)]
        generations: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Comma-separated generation numbers to record.
        #[arg(long)]
        checkpoints: Option<String>,
        /// Output directory (trajectory CSV plus the best machine); stdout
        /// when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Replay against a frozen sample file.
        #[arg(long)]
        load_samples: Option<PathBuf>,
        /// Save the sample set used by this run.
        #[arg(long)]
        save_samples: Option<PathBuf>,
        /// Accept-flag mutation mode: random (fresh value) or toggle.
        #[arg(long, default_value_t = MutationFlip::Random, value_parser = MutationFlip::from_str)]
        mutation_flip: MutationFlip,
    },
    /// A multi-seed campaign: per-seed trajectories plus a summary.
    Campaign {
        #[command(flatten)]
        shared: CampaignArgs,
        /// bss or rle:<n>.
        #[arg(long, value_parser = SampleMethod::from_str)]
        sampler: Option<SampleMethod>,
        /// Replay every run against one frozen sample file.
        #[arg(long)]
        load_samples: Option<PathBuf>,
    },
    /// Campaigns for several samplers over a shared seed list, merged into
    /// comparison CSVs.
    Compare {
        #[command(flatten)]
        shared: CampaignArgs,
        /// Sampler to include; repeat the flag for each one.
        #[arg(long = "sampler", value_parser = SampleMethod::from_str)]
        samplers: Vec<SampleMethod>,
    },
}

#[derive(Args)]
struct CampaignArgs {
    /// Flat key-value config file; explicit flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = WitnessSpec::from_str)]
    language: Option<WitnessSpec>,
    /// Total sample count D.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    generations: Option<u64>,
    /// Number of runs (seeds are consecutive from --base-seed).
    #[arg(long)]
    seeds: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Comma-separated generation numbers to record.
    #[arg(long)]
    checkpoints: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker cap for the run fan-out (0 = one per core).
    #[arg(long)]
    parallel: Option<usize>,
    /// Draw rle sample sets per `seed` (default) or once per `campaign`.
    #[arg(long, value_parser = SamplesPer::from_str)]
    samples_per: Option<SamplesPer>,
    /// Accept-flag mutation mode: random (fresh value) or toggle.
    #[arg(long, value_parser = MutationFlip::from_str)]
    mutation_flip: Option<MutationFlip>,
}

impl CampaignArgs {
    fn into_builder(self) -> Result<ConfigBuilder, HarnessError> {
        let mut builder = match &self.config {
            Some(path) => ConfigBuilder::from_file(path).map_err(HarnessError::Config)?,
            None => ConfigBuilder::default(),
        };
        if let Some(v) = self.language {
            builder.language = Some(v);
        }
        if let Some(v) = self.samples {
            builder.samples = Some(v);
        }
        if let Some(v) = self.generations {
            builder.generations = Some(v);
        }
        if let Some(v) = self.seeds {
            builder.seeds = Some(v);
        }
        if let Some(v) = self.base_seed {
            builder.base_seed = Some(v);
        }
        if let Some(v) = &self.checkpoints {
            let cps = parse_checkpoints(v).map_err(|reason| {
                HarnessError::Config(ConfigError::BadValue {
                    key: "checkpoints".into(),
                    reason,
                })
            })?;
            builder.checkpoints = Some(cps);
        }
        if let Some(v) = self.out {
            builder.out = Some(v);
        }
        if let Some(v) = self.parallel {
            builder.parallel = Some(v);
        }
        if let Some(v) = self.samples_per {
            builder.samples_per = Some(v);
        }
        if let Some(v) = self.mutation_flip {
            builder.mutation_flip = Some(v);
        }
        Ok(builder)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(command: Command) -> Result<(), HarnessError> {
    match command {
        Command::Census {
            language,
            max_len,
            out,
        } => {
            let csv = census_report(language, max_len);
            match out {
                Some(path) => std::fs::write(path, csv)?,
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Sample {
            language,
            sampler,
            samples,
            seed,
            save_samples,
        } => {
            let witness = fsm_evo::witness::build_witness(language);
            let set = match sampler {
                SampleMethod::Bss => fsm_evo::sampling::generate_bss(&witness, samples)?,
                SampleMethod::Rle { max_len } => fsm_evo::sampling::generate_rle(
                    &witness,
                    max_len,
                    samples,
                    &mut harness::sample_rng(seed),
                )?,
            };
            set.save(&save_samples)?;
            println!(
                "wrote {} samples ({} positive, {} negative) to {}",
                set.len(),
                set.accept().len(),
                set.reject().len(),
                save_samples.display()
            );
            Ok(())
        }
        Command::Evolve {
            language,
            sampler,
            samples,
            generations,
            seed,
            checkpoints,
            out,
            load_samples,
            save_samples,
            mutation_flip,
        } => {
            let mut cfg = ExperimentConfig::new(language, sampler, generations);
            cfg.samples = samples;
            cfg.seeds = 1;
            cfg.base_seed = seed;
            cfg.mutation_flip = mutation_flip;
            cfg.load_samples = load_samples;
            if let Some(v) = &checkpoints {
                let mut cps = parse_checkpoints(v).map_err(|reason| {
                    HarnessError::Config(ConfigError::BadValue {
                        key: "checkpoints".into(),
                        reason,
                    })
                })?;
                cps.sort_unstable();
                cps.dedup();
                cfg.checkpoints = cps;
            }
            let run = run_single(&cfg, seed)?;
            if let Some(path) = save_samples {
                run.samples.save(&path)?;
            }
            let csv = harness::trajectory_csv(&run.trajectory);
            match out {
                Some(dir) => {
                    std::fs::create_dir_all(&dir)?;
                    std::fs::write(dir.join(format!("seed_{seed}.csv")), csv)?;
                    std::fs::write(
                        dir.join("best.fsm"),
                        run.population.best().machine.to_text(),
                    )?;
                }
                None => print!("{csv}"),
            }
            let best = run.population.best();
            eprintln!(
                "seed {seed}: best fitness {}/{} with {} states (population {})",
                best.fitness,
                run.samples.len(),
                best.states,
                run.population.len()
            );
            Ok(())
        }
        Command::Campaign {
            shared,
            sampler,
            load_samples,
        } => {
            let mut builder = shared.into_builder()?;
            if let Some(v) = sampler {
                builder.sampler = Some(v);
            }
            if let Some(v) = load_samples {
                builder.load_samples = Some(v);
            }
            let mut cfg = builder.build().map_err(HarnessError::Config)?;
            cfg.progress = true;
            let result = run_campaign(&cfg)?;
            print!("{}", harness::summary_csv(&result.summary));
            eprintln!("campaign written to {}", cfg.out.display());
            Ok(())
        }
        Command::Compare { shared, samplers } => {
            let mut builder = shared.into_builder()?;
            if !samplers.is_empty() {
                builder.samplers = Some(samplers);
            }
            let (mut cfg, samplers) = builder.build_compare().map_err(HarnessError::Config)?;
            cfg.progress = true;
            let results = compare_samplers(&cfg, &samplers)?;
            let summaries: Vec<_> = results
                .iter()
                .map(|(m, r)| (*m, r.summary.clone()))
                .collect();
            print!("{}", harness::mean_table_csv(&summaries));
            eprintln!("comparison written to {}", cfg.out.display());
            Ok(())
        }
    }
}
