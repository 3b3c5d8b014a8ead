use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gaptime::prelude::*;

use crate::error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "gaptime", version, about = "Marginal gap-time analysis of recurrent events with competing risks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate curves with bootstrap standard errors, intervals and bands.
    Estimate(EstimateArgs),
    /// Bootstrap Wald tests comparing stages, groups or previous causes.
    Test(TestArgs),
    /// Generate frailty data and run the Monte Carlo study.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Cif,
    Sum,
    Ipcw,
    Pl,
    Unc,
    Csh,
    Cond,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PluginArg {
    Sum,
    Ipcw,
    Pl,
    Unc,
}

impl From<PluginArg> for SurvivalVariant {
    fn from(p: PluginArg) -> Self {
        match p {
            PluginArg::Sum => SurvivalVariant::Sum,
            PluginArg::Ipcw => SurvivalVariant::Ipcw,
            PluginArg::Pl => SurvivalVariant::ProductLimit,
            PluginArg::Unc => SurvivalVariant::Uncensored,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TestKindArg {
    Stage,
    Group,
    Prevtype,
}

/// Where the data come from and how its columns are named.
#[derive(Debug, Args)]
pub struct DataArgs {
    /// Long-format CSV, one row per subject and stage.
    #[arg(long)]
    pub input: PathBuf,
    /// Separate CSV of censoring times (subject and censor columns).
    #[arg(long)]
    pub censor_file: Option<PathBuf>,
    /// Column holding the censoring time, in the input or the censor file.
    #[arg(long, default_value = "censor")]
    pub censor_col: String,
    #[arg(long, default_value = "subject")]
    pub subject_col: String,
    #[arg(long, default_value = "stage")]
    pub stage_col: String,
    #[arg(long, default_value = "gap")]
    pub gap_col: String,
    #[arg(long, default_value = "cause")]
    pub cause_col: String,
    /// Number of causes; defaults to the largest cause present.
    #[arg(long)]
    pub num_causes: Option<u8>,
}

/// Bootstrap and output settings shared by `estimate` and `test`.
#[derive(Debug, Args)]
pub struct RunArgs {
    /// Bootstrap replicates; 0 skips the bootstrap.
    #[arg(long, default_value_t = 100)]
    pub bootstrap: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; defaults to all available.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub stage: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub cause: Vec<u8>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cif")]
    pub variant: Vec<VariantArg>,
    /// Survival estimator plugged into the cumulative hazard.
    #[arg(long, value_enum, default_value_t = PluginArg::Pl)]
    pub plugin: PluginArg,
    /// Previous cause(s) for the conditional incidence.
    #[arg(long, value_delimiter = ',')]
    pub prev_cause: Vec<u8>,
    /// Evaluation times; defaults to deciles of the pooled uncensored gaps.
    #[arg(long, value_delimiter = ',')]
    pub grid: Vec<f64>,
    /// Simultaneous band over `t1:t2`.
    #[arg(long)]
    pub band: Option<String>,
    /// Replace survival curves by their monotone envelope.
    #[arg(long)]
    pub monotone: bool,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct TestArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum)]
    pub test: TestKindArg,
    #[arg(long, default_value_t = 1)]
    pub stage: u32,
    /// Second stage for `--test stage`.
    #[arg(long)]
    pub vs_stage: Option<u32>,
    #[arg(long, default_value_t = 1)]
    pub cause: u8,
    /// Functional(s) for `--test stage`.
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cif")]
    pub variant: Vec<VariantArg>,
    #[arg(long, value_enum, default_value_t = PluginArg::Pl)]
    pub plugin: PluginArg,
    /// Competing previous cause for `--test prevtype`.
    #[arg(long)]
    pub prev_cause: Option<u8>,
    /// Column with the two group labels for `--test group`.
    #[arg(long)]
    pub group_col: Option<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    pub times: Vec<f64>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// TOML file with generator and study settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Stage rates α_j; the last is reused for later stages.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    #[arg(long)]
    pub censor_upper: Option<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub bootstrap: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[arg(long)]
    pub max_stage: Option<u32>,
    /// Level of intervals and tests.
    #[arg(long)]
    pub level: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Stages summarised in the tables.
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    pub stages: Vec<u32>,
    /// Stage pair for the equality tests, `j:j2`, or `none`.
    #[arg(long, default_value = "2:3")]
    pub test_stages: String,
    /// Write one generated sample instead of running the study.
    #[arg(long)]
    pub sample_only: bool,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Parses `a:b` into a pair.
pub fn parse_pair<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<(T, T)> {
    let bad = || CliError::Usage(format!("{what} must look like a:b, got '{s}'"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok((a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

/// Single-functional mapping used by both `estimate` and `test`.
pub fn functional(variant: VariantArg, cause: u8, plugin: PluginArg, prev: Option<u8>) -> CliResult<Functional> {
    Ok(match variant {
        VariantArg::Cif => Functional::Cif { cause },
        VariantArg::Sum => Functional::Survival(SurvivalVariant::Sum),
        VariantArg::Ipcw => Functional::Survival(SurvivalVariant::Ipcw),
        VariantArg::Pl => Functional::Survival(SurvivalVariant::ProductLimit),
        VariantArg::Unc => Functional::Survival(SurvivalVariant::Uncensored),
        VariantArg::Csh => Functional::CumCsh { cause, plugin: plugin.into() },
        VariantArg::Cond => Functional::CondCif {
            cause,
            prev: prev.ok_or_else(|| CliError::Usage("--variant cond needs --prev-cause".into()))?,
        },
    })
}
