//! Command-line front end: forecast order-of-magnitude meme popularity
//! from early adoption events, or generate the synthetic data to try it
//! on.

use std::path::PathBuf;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use memecast::cli::{
    cmd_detect, cmd_evaluate, cmd_features, cmd_predict, cmd_simulate, format_comparison,
    RunConfig,
};
use memecast::eval::Basis;
use memecast::features::UnreachablePolicy;

#[derive(Parser)]
#[command(
    name = "memecast",
    version,
    about = "Forecast order-of-magnitude meme popularity from the first n adoption events"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic network, community file, and event log
    Simulate(Opts),
    /// Detect communities on an edge list by label propagation
    Detect(Opts),
    /// Extract the labeled feature table from an event log
    Features(Opts),
    /// Cross-validate the forest, its ablations, and the reference models
    Evaluate(Opts),
    /// Predict one meme's popularity class with a saved model
    Predict(Opts),
}

/// Every tunable, shared by all subcommands; a config file may supply any
/// of them and explicit flags win.
#[derive(Args)]
struct Opts {
    /// key=value file supplying defaults for any flag below
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Early-window length (tweets visible at prediction time)
    #[arg(long)]
    n: Option<usize>,
    /// Popularity basis: tweets or adopters
    #[arg(long)]
    basis: Option<Basis>,
    /// Memes with this many or more prior tweets are not "new"
    #[arg(long)]
    x_max: Option<u64>,
    /// Horizon in days for the early-popularity regressions
    #[arg(long)]
    tau_days: Option<i64>,
    /// Popularity classes at and above this merge into one
    #[arg(long)]
    cap: Option<u32>,
    /// Root seed for all derived randomness
    #[arg(long)]
    seed: Option<u64>,
    /// Cross-validation fold count
    #[arg(long)]
    folds: Option<usize>,
    /// Unreachable-distance policy: constant or exclude
    #[arg(long)]
    policy: Option<UnreachablePolicy>,
    /// Trees per forest
    #[arg(long)]
    trees: Option<usize>,
    /// Features drawn per tree
    #[arg(long)]
    features_per_tree: Option<usize>,
    /// Communities smaller than this are dropped
    #[arg(long)]
    min_community_size: Option<usize>,
    /// Sweep limit for label propagation
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Community count for the simulated network
    #[arg(long)]
    communities: Option<usize>,
    /// Nodes per simulated community
    #[arg(long)]
    community_size: Option<usize>,
    /// Intra-community edge probability
    #[arg(long)]
    p_in: Option<f64>,
    /// Inter-community edge probability
    #[arg(long)]
    p_out: Option<f64>,
    /// Memes to simulate
    #[arg(long)]
    meme_count: Option<usize>,
    /// Seed adopters per simulated meme
    #[arg(long)]
    seed_adopters: Option<usize>,
    /// Probability an exposure targets a same-community neighbor
    #[arg(long)]
    trap_bias: Option<f64>,
    /// Lower bound of the per-meme adoption probability
    #[arg(long)]
    adopt_prob_min: Option<f64>,
    /// Upper bound of the per-meme adoption probability
    #[arg(long)]
    adopt_prob_max: Option<f64>,
    /// Additive adoption bonus per prior exposure
    #[arg(long)]
    reinforcement: Option<f64>,
    /// Probability a share is a retweet
    #[arg(long)]
    retweet_prob: Option<f64>,
    /// Probability a non-retweet share mentions the exposer
    #[arg(long)]
    mention_prob: Option<f64>,
    /// Mean seconds between consecutive events of a meme
    #[arg(long)]
    mean_gap_seconds: Option<f64>,
    /// Hard cap on events per simulated meme
    #[arg(long)]
    max_events: Option<usize>,
    /// Probability an adopter-to-adopter exposure is shared again
    #[arg(long)]
    repeat_prob: Option<f64>,
    /// Attempts without a new adoption before a meme goes extinct
    #[arg(long)]
    stall_limit: Option<usize>,
    /// Absolute attempt budget, as a multiple of max-events
    #[arg(long)]
    attempt_factor: Option<usize>,
    /// Edge-list input (two labels per line)
    #[arg(long, value_name = "FILE")]
    edges: Option<PathBuf>,
    /// Community assignment input (node<TAB>community per line)
    #[arg(long, value_name = "FILE")]
    communities_file: Option<PathBuf>,
    /// Event-log input
    #[arg(long, value_name = "FILE")]
    events: Option<PathBuf>,
    /// Prior-usage counts (meme_id<TAB>count) for the freshness filter
    #[arg(long, value_name = "FILE")]
    history: Option<PathBuf>,
    /// Directory for generated files and reports
    #[arg(long, value_name = "DIR")]
    out_dir: Option<PathBuf>,
    /// Output file, where a command writes a single file
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Saved model to predict with
    #[arg(long, value_name = "FILE")]
    model: Option<PathBuf>,
    /// Where evaluate saves the final full-feature model
    #[arg(long, value_name = "FILE")]
    model_out: Option<PathBuf>,
    /// Meme id to predict
    #[arg(long)]
    meme: Option<String>,
}

impl Opts {
    fn resolve(self) -> anyhow::Result<RunConfig> {
        let mut c = RunConfig::default();
        if let Some(path) = &self.config {
            c.apply_file(path)
                .with_context(|| format!("reading config {}", path.display()))?;
        }
        macro_rules! set {
            ($($field:ident => $slot:expr),* $(,)?) => {
                $(if let Some(v) = self.$field { $slot = v; })*
            };
        }
        set! {
            n => c.n,
            basis => c.basis,
            x_max => c.x_max,
            tau_days => c.tau_days,
            cap => c.cap,
            seed => c.seed,
            folds => c.folds,
            policy => c.policy,
            trees => c.trees,
            features_per_tree => c.features_per_tree,
            min_community_size => c.min_community_size,
            max_sweeps => c.max_sweeps,
            communities => c.partition.communities,
            community_size => c.partition.community_size,
            p_in => c.partition.p_in,
            p_out => c.partition.p_out,
            meme_count => c.cascade.meme_count,
            seed_adopters => c.cascade.seed_adopters,
            trap_bias => c.cascade.trap_bias,
            adopt_prob_min => c.cascade.adopt_prob_min,
            adopt_prob_max => c.cascade.adopt_prob_max,
            reinforcement => c.cascade.reinforcement,
            retweet_prob => c.cascade.retweet_prob,
            mention_prob => c.cascade.mention_prob,
            mean_gap_seconds => c.cascade.mean_gap_seconds,
            max_events => c.cascade.max_events,
            repeat_prob => c.cascade.repeat_prob,
            stall_limit => c.cascade.stall_limit,
            attempt_factor => c.cascade.attempt_factor,
            out_dir => c.out_dir,
        }
        if self.edges.is_some() {
            c.edges = self.edges;
        }
        if self.communities_file.is_some() {
            c.communities = self.communities_file;
        }
        if self.events.is_some() {
            c.events = self.events;
        }
        if self.history.is_some() {
            c.history = self.history;
        }
        if self.out.is_some() {
            c.out = self.out;
        }
        if self.model.is_some() {
            c.model = self.model;
        }
        if self.model_out.is_some() {
            c.model_out = self.model_out;
        }
        if self.meme.is_some() {
            c.meme = self.meme;
        }
        Ok(c)
    }
}

fn main() -> anyhow::Result<()> {
    match Cli::parse().command {
        Command::Simulate(opts) => {
            let config = opts.resolve()?;
            let [edges, communities, events] = cmd_simulate(&config)?;
            println!("wrote {}", edges.display());
            println!("wrote {}", communities.display());
            println!("wrote {}", events.display());
        }
        Command::Detect(opts) => {
            let config = opts.resolve()?;
            let out = cmd_detect(&config)?;
            println!("wrote {}", out.display());
        }
        Command::Features(opts) => {
            let config = opts.resolve()?;
            let (path, rows) = cmd_features(&config)?;
            println!("wrote {rows} rows to {}", path.display());
        }
        Command::Evaluate(opts) => {
            let config = opts.resolve()?;
            let artifacts = cmd_evaluate(&config)?;
            println!(
                "evaluated {} models on {} memes (fold hash {:016x})",
                artifacts.outcomes.len(),
                artifacts.row_count,
                artifacts.fold_hash
            );
            for o in &artifacts.outcomes {
                for warning in &o.outcome.warnings {
                    eprintln!("warning [{}]: {warning}", o.name);
                }
            }
            print!("{}", format_comparison(&artifacts.outcomes));
            println!("per-class F1 by model; reports in {}", config.out_dir.display());
        }
        Command::Predict(opts) => {
            let config = opts.resolve()?;
            let p = cmd_predict(&config)?;
            println!(
                "meme {}: class {} of {} ({} {})",
                p.meme_id,
                p.class,
                p.cap,
                p.describe_range(),
                p.basis
            );
            let breakdown: Vec<String> = p
                .classes
                .iter()
                .zip(&p.votes)
                .map(|(c, v)| format!("class {c}: {v}"))
                .collect();
            println!("votes: {}", breakdown.join(", "));
        }
    }
    Ok(())
}
