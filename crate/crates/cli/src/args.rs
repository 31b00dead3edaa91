use std::collections::BTreeMap;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use linkdens_core::ingest::{CleaningPolicy, CollectionWindow};
use linkdens_core::validation::SyntheticConfig;
use linkdens_core::Delta;
use serde::Serialize;

pub const DEFAULT_DELTAS: &str = "1m,1h,1d,1w,30d,1y,20y";

#[derive(Debug, Parser)]
#[command(name = "linkdens", version, about = "Link-stream analysis of threaded message archives")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rebuild reply threads, drop biased ones, and write the cleaned table.
    Ingest(IngestArgs),
    /// Compute every metric and write plot-ready tables.
    Analyze(AnalyzeArgs),
    /// Generate a message table with planted threads.
    Synth(SynthArgs),
}

/// A duration flag that can be switched off.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limit(pub Option<i64>);

fn parse_limit(s: &str) -> Result<Limit, String> {
    if s.eq_ignore_ascii_case("off") {
        return Ok(Limit(None));
    }
    s.parse::<Delta>()
        .map(|d| Limit(Some(d.as_secs())))
        .map_err(|e| e.to_string())
}

fn parse_delta(s: &str) -> Result<Delta, String> {
    s.parse::<Delta>().map_err(|e| e.to_string())
}

fn parse_window(s: &str) -> Result<CollectionWindow, String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected START,END in seconds, got `{s}`"))?;
    let start: i64 = a.trim().parse().map_err(|_| format!("bad window start `{a}`"))?;
    let end: i64 = b.trim().parse().map_err(|_| format!("bad window end `{b}`"))?;
    if start > end {
        return Err(format!("window start {start} is after its end {end}"));
    }
    Ok(CollectionWindow { start, end })
}

#[derive(Debug, Clone, Args)]
pub struct PolicyArgs {
    /// Longest kept thread, e.g. `730d`, or `off`.
    #[arg(long, value_name = "DURATION", value_parser = parse_limit, default_value = "730d")]
    pub max_duration: Limit,
    /// Drop threads starting less than this before the end of the collection window, or `off`.
    #[arg(long, value_name = "DURATION", value_parser = parse_limit, default_value = "730d")]
    pub start_cutoff: Limit,
    /// Collection window as `START,END` unix seconds; defaults to the span of the input.
    #[arg(long, value_name = "START,END", value_parser = parse_window)]
    pub window: Option<CollectionWindow>,
    /// Keep threads with a reply dated before its parent, or a reply loop.
    #[arg(long)]
    pub keep_inconsistent: bool,
    /// Keep threads whose root is missing from the input.
    #[arg(long)]
    pub keep_incomplete: bool,
    /// Also count threads touching the first or last DURATION of the window as incomplete.
    #[arg(long, value_name = "DURATION", value_parser = parse_delta)]
    pub guard_band: Option<Delta>,
}

impl PolicyArgs {
    pub fn policy(&self) -> CleaningPolicy {
        CleaningPolicy {
            max_thread_duration: self.max_duration.0,
            start_cutoff: self.start_cutoff.0,
            drop_inconsistent: !self.keep_inconsistent,
            drop_incomplete: !self.keep_incomplete,
            incomplete_guard_band: self.guard_band.map(Delta::as_secs),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Message table with columns id,timestamp,author,parent.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Stats,
    Intercontact,
    Density,
    Intra,
    Inter,
    Overlap,
    Quotient,
}

impl Stage {
    pub const ALL: [Stage; 7] = [
        Stage::Stats,
        Stage::Intercontact,
        Stage::Density,
        Stage::Intra,
        Stage::Inter,
        Stage::Overlap,
        Stage::Quotient,
    ];
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Message table, usually the `cleaned.csv` written by `ingest`.
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Window lengths, comma-separated; units s, m, h, d, w, y (365 days).
    #[arg(long, value_delimiter = ',', value_parser = parse_delta, default_value = DEFAULT_DELTAS)]
    pub delta: Vec<Delta>,
    /// Sample this many counterpart threads per thread for inter-thread density.
    #[arg(long, value_name = "N", value_parser = clap::value_parser!(u64).range(1..))]
    pub sample_pairs: Option<u64>,
    /// Seed for inter-thread sampling.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Without --sample-pairs, inter-thread density is exact up to this many threads and skipped above.
    #[arg(long, value_name = "K", default_value_t = 300)]
    pub exact_threshold: usize,
    /// Fail when the node overlap graph would generate more candidate pairs than this.
    #[arg(long, value_name = "PAIRS")]
    pub overlap_pair_cap: Option<u64>,
    /// Skip stages; repeat or separate with commas.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub skip: Vec<Stage>,
    /// Count the gaps from the stream start to the first contact and from the last contact to the end.
    #[arg(long)]
    pub include_boundary_gaps: bool,
    /// Clean the input first, with the same policy flags as `ingest`.
    #[arg(long)]
    pub clean: bool,
    #[command(flatten)]
    pub policy: PolicyArgs,
}

impl AnalyzeArgs {
    pub fn runs(&self, stage: Stage) -> bool {
        !self.skip.contains(&stage)
    }
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    /// Output directory for messages.csv and labels.csv.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 60)]
    pub threads: usize,
    /// Size of the author pool.
    #[arg(long, default_value_t = 300)]
    pub authors: usize,
    /// Two-message threads between random authors.
    #[arg(long, default_value_t = 40)]
    pub background_threads: usize,
    /// Messages per planted thread, as `MIN,MAX`.
    #[arg(long, value_name = "MIN,MAX", value_parser = parse_range, default_value = "3,12")]
    pub messages_per_thread: (usize, usize),
    /// Authors per planted thread, as `MIN,MAX`.
    #[arg(long, value_name = "MIN,MAX", value_parser = parse_range, default_value = "2,4")]
    pub authors_per_thread: (usize, usize),
    /// Length of the generated period.
    #[arg(long, value_parser = parse_delta, default_value = "10y")]
    pub span: Delta,
    /// First message time, unix seconds.
    #[arg(long, default_value_t = 1_262_304_000)]
    pub start: i64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected MIN,MAX, got `{s}`"))?;
    let lo = a.trim().parse().map_err(|_| format!("bad minimum `{a}`"))?;
    let hi = b.trim().parse().map_err(|_| format!("bad maximum `{b}`"))?;
    Ok((lo, hi))
}

/// Policy as recorded in summaries.
#[derive(Debug, Clone, Serialize)]
pub struct PolicyRecord {
    #[serde(flatten)]
    pub policy: CleaningPolicy,
    pub window: Option<CollectionWindow>,
}

impl PolicyRecord {
    pub fn new(args: &PolicyArgs) -> Self {
        Self {
            policy: args.policy(),
            window: args.window,
        }
    }
}


#[derive(Debug, Clone, Serialize)]
pub struct DeltaRecord {
    pub label: String,
    pub seconds: i64,
}

/// Every setting of a run, copied into its `summary.json`.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum RunConfig {
    Ingest {
        input: String,
        out: String,
        policy: PolicyRecord,
    },
    Analyze {
        input: String,
        out: String,
        clean: bool,
        policy: Option<PolicyRecord>,
        deltas: Vec<DeltaRecord>,
        sample_pairs: Option<u64>,
        seed: u64,
        exact_threshold: usize,
        overlap_pair_cap: Option<u64>,
        include_boundary_gaps: bool,
        stages: BTreeMap<Stage, bool>,
    },
    Synth {
        out: String,
        config: SyntheticConfig,
    },
}

fn shown(p: &std::path::Path) -> String {
    p.display().to_string()
}

impl From<&IngestArgs> for RunConfig {
    fn from(a: &IngestArgs) -> Self {
        RunConfig::Ingest {
            input: shown(&a.input),
            out: shown(&a.out),
            policy: PolicyRecord::new(&a.policy),
        }
    }
}

impl From<&AnalyzeArgs> for RunConfig {
    fn from(a: &AnalyzeArgs) -> Self {
        RunConfig::Analyze {
            input: shown(&a.input),
            out: shown(&a.out),
            clean: a.clean,
            policy: a.clean.then(|| PolicyRecord::new(&a.policy)),
            deltas: a
                .delta
                .iter()
                .map(|d| DeltaRecord {
                    label: d.label(),
                    seconds: d.as_secs(),
                })
                .collect(),
            sample_pairs: a.sample_pairs,
            seed: a.seed,
            exact_threshold: a.exact_threshold,
            overlap_pair_cap: a.overlap_pair_cap,
            include_boundary_gaps: a.include_boundary_gaps,
            stages: Stage::ALL.iter().map(|&s| (s, a.runs(s))).collect(),
        }
    }
}

impl SynthArgs {
    pub fn config(&self) -> SyntheticConfig {
        SyntheticConfig {
            authors: self.authors,
            threads: self.threads,
            messages_per_thread: self.messages_per_thread,
            authors_per_thread: self.authors_per_thread,
            background_threads: self.background_threads,
            start: self.start,
            span: self.span.as_secs(),
            seed: self.seed,
            ..SyntheticConfig::default()
        }
    }
}
