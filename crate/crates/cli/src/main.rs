//! `prospect` — batch driver for the prospecting pipeline: synthetic data
//! generation, DL-AE and random-forest training, hyper-parameter sweeps,
//! universe ranking, campaign simulation, and model comparison.

mod commands;
mod config;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use prospect_core::data::SyntheticPopulationSpec;

use commands::{
    cmd_campaign, cmd_compare, cmd_rank, cmd_sweep, cmd_synth, cmd_train, CampaignParams,
    CompareParams, DataPaths, ModelKind, RankParams, SweepKind, SweepParams, SynthParams,
    TrainParams,
};
use config::{parse_optimizer, RunConfig};

#[derive(Parser)]
#[command(name = "prospect", version, about = "Prospecting model pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic population (schema, audience, universe, conversions).
    Synth(SynthArgs),
    /// Train a model and emit metrics and artifacts.
    Train(TrainArgs),
    /// Sweep ratio, encoder size, or architecture and tabulate metrics.
    Sweep(SweepArgs),
    /// Rank a universe by model probability.
    Rank(RankArgs),
    /// Simulate a campaign: mail the top of the ranking, tally conversions.
    Campaign(CampaignArgs),
    /// Compare campaign reports over the same universe.
    Compare(CompareArgs),
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 50_000)]
    universe_size: usize,
    #[arg(long, default_value_t = 5_000)]
    audience_size: usize,
    #[arg(long, default_value_t = 50)]
    numeric_dims: usize,
    /// Cardinalities of categorical features, comma separated.
    #[arg(long, value_delimiter = ',')]
    categorical_dims: Vec<usize>,
    #[arg(long, default_value_t = 2.0)]
    separation: f64,
    #[arg(long, default_value_t = 0.05)]
    overlap: f64,
    #[arg(long, default_value_t = 0.05)]
    propensity_scale: f64,
    #[arg(long, default_value_t = 1.5)]
    propensity_steepness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    force: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    Dlae,
    Rf,
}

#[derive(Args)]
struct CommonTrainFlags {
    /// Directory holding schema.txt, audience.csv, universe.csv.
    #[arg(long)]
    data_dir: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// JSON config file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    ratio: Option<usize>,
    #[arg(long)]
    test_fraction: Option<f64>,
    #[arg(long)]
    encoded_size: Option<usize>,
    #[arg(long)]
    ae_lr: Option<f64>,
    #[arg(long)]
    ae_epochs: Option<usize>,
    #[arg(long)]
    ae_batch_size: Option<usize>,
    #[arg(long)]
    architecture: Option<String>,
    /// sgd, adam, or adamw.
    #[arg(long)]
    optimizer: Option<String>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    momentum: Option<f64>,
    #[arg(long)]
    weight_decay: Option<f64>,
    #[arg(long)]
    epochs: Option<usize>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    rf_trees: Option<usize>,
    #[arg(long)]
    rf_max_depth: Option<usize>,
    #[arg(long)]
    rf_min_samples: Option<usize>,
    #[arg(long)]
    rf_min_samples_fraction: Option<f64>,
    #[arg(long)]
    rf_features_per_split: Option<usize>,
    #[arg(long)]
    rf_no_bootstrap: bool,
    /// Comma-separated seeds; one run per seed, metrics aggregated.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    #[arg(long)]
    force: bool,
}

impl CommonTrainFlags {
    fn resolve(&self) -> anyhow::Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = self.$field.clone() { cfg.$field = v; })*
            };
        }
        take!(
            ratio,
            test_fraction,
            encoded_size,
            ae_lr,
            ae_epochs,
            ae_batch_size,
            lr,
            momentum,
            weight_decay,
            epochs,
            batch_size,
            threshold,
            rf_trees,
            rf_max_depth,
            rf_min_samples,
            seeds
        );
        if let Some(v) = self.rf_min_samples_fraction {
            cfg.rf_min_samples_fraction = Some(v);
        }
        if let Some(v) = self.rf_features_per_split {
            cfg.rf_features_per_split = Some(v);
        }
        if self.rf_no_bootstrap {
            cfg.rf_bootstrap = false;
        }
        if let Some(a) = &self.architecture {
            cfg.architecture = a.parse()?;
        }
        if let Some(o) = &self.optimizer {
            cfg.optimizer = parse_optimizer(o)?;
        }
        Ok(cfg)
    }
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    common: CommonTrainFlags,
    #[arg(long, value_enum, default_value_t = ModelArg::Dlae)]
    model: ModelArg,
    /// Also write a binary snapshot of the encoded dataset per seed.
    #[arg(long)]
    snapshot: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepKindArg {
    Ratio,
    EncoderSize,
    Architecture,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonTrainFlags,
    #[arg(long, value_enum)]
    kind: SweepKindArg,
    /// Sweep values (comma separated); defaults depend on the kind.
    #[arg(long, value_delimiter = ',')]
    values: Option<Vec<String>>,
}

#[derive(Args)]
struct RankArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    stats: PathBuf,
    #[arg(long)]
    universe: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CampaignArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    schema: PathBuf,
    #[arg(long)]
    stats: PathBuf,
    #[arg(long)]
    universe: PathBuf,
    #[arg(long)]
    ground_truth: PathBuf,
    #[arg(long)]
    reach: usize,
    #[arg(long, default_value = "30d")]
    window: String,
    #[arg(long, default_value = "model")]
    method_tag: String,
    #[arg(long, default_value = "audience")]
    audience_tag: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// campaign.json files to compare (first is the reference).
    #[arg(long, num_args = 2.., required = true)]
    reports: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    force: bool,
}

fn run() -> anyhow::Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Synth(args) => cmd_synth(&SynthParams {
            out: args.out,
            spec: SyntheticPopulationSpec {
                universe_size: args.universe_size,
                audience_size: args.audience_size,
                numeric_dims: args.numeric_dims,
                categorical_dims: args.categorical_dims,
                separation: args.separation,
                overlap_fraction: args.overlap,
                propensity_scale: args.propensity_scale,
                propensity_steepness: args.propensity_steepness,
                seed: args.seed,
            },
            force: args.force,
        }),
        Command::Train(args) => {
            let config = args.common.resolve()?;
            cmd_train(&TrainParams {
                data: DataPaths::from_dir(&args.common.data_dir),
                out: args.common.out.clone(),
                model: match args.model {
                    ModelArg::Dlae => ModelKind::Dlae,
                    ModelArg::Rf => ModelKind::Rf,
                },
                config,
                snapshot: args.snapshot,
                force: args.common.force,
            })
        }
        Command::Sweep(args) => {
            let config = args.common.resolve()?;
            cmd_sweep(&SweepParams {
                data: DataPaths::from_dir(&args.common.data_dir),
                out: args.common.out.clone(),
                kind: match args.kind {
                    SweepKindArg::Ratio => SweepKind::Ratio,
                    SweepKindArg::EncoderSize => SweepKind::EncoderSize,
                    SweepKindArg::Architecture => SweepKind::Architecture,
                },
                values: args.values,
                config,
                force: args.common.force,
            })
        }
        Command::Rank(args) => cmd_rank(&RankParams {
            model: args.model,
            schema: args.schema,
            stats: args.stats,
            universe: args.universe,
            out: args.out,
            force: args.force,
        }),
        Command::Campaign(args) => cmd_campaign(&CampaignParams {
            model: args.model,
            schema: args.schema,
            stats: args.stats,
            universe: args.universe,
            ground_truth: args.ground_truth,
            reach: args.reach,
            window: args.window,
            method_tag: args.method_tag,
            audience_tag: args.audience_tag,
            out: args.out,
            force: args.force,
        }),
        Command::Compare(args) => cmd_compare(&CompareParams {
            reports: args.reports,
            out: args.out,
            force: args.force,
        }),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
