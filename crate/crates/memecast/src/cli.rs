//! Pipeline orchestration behind the command-line interface: resolved run
//! configuration (defaults ← config file ← flags), dataset assembly from
//! the three on-disk inputs, the model zoo evaluated under shared folds,
//! and the five subcommand entry points.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::baselines::{
    daily_counts_model, daily_log_row, influence_features, influence_model, log_log_model,
    MajorityGuess, RandomGuess, RegressionClassifier,
};
use crate::cascade::{self, Meme, SECONDS_PER_DAY};
use crate::community::{self, CommunityAssignment};
use crate::error::{Error, Result};
use crate::eval::{
    self, bin, stratified_folds, Basis, CvOutcome, Model, DEFAULT_CLASS_CAP, DEFAULT_FOLDS,
};
use crate::features::{extract_all, FeatureRow, FeatureSet, UnreachablePolicy};
use crate::forest::{ForestConfig, RandomForest, DEFAULT_FEATURES_PER_TREE, DEFAULT_TREES};
use crate::graph::{load_network, Network, PAGERANK_DAMPING, PAGERANK_MAX_ITER, PAGERANK_TOL};
use crate::seeds::derive_seed;
use crate::simgen::{generate_cascades, generate_network, CascadeSpec, PlantedPartitionSpec};

/// Fully resolved run parameters. Precedence: built-in defaults, then a
/// key=value config file, then command-line flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Early-window length: how many tweets a prediction may look at.
    pub n: usize,
    /// Whether popularity means tweet count or adopter count.
    pub basis: Basis,
    /// Memes with at least this many prior-history tweets are not "new".
    pub x_max: u64,
    /// Horizon in days for the early-popularity regression baselines.
    pub tau_days: i64,
    /// Popularity classes at and above this merge into one.
    pub cap: u32,
    /// Root seed; every random decision derives from it by label.
    pub seed: u64,
    pub folds: usize,
    pub policy: UnreachablePolicy,
    pub trees: usize,
    pub features_per_tree: usize,
    pub min_community_size: usize,
    /// Sweep limit for community detection.
    pub max_sweeps: usize,
    pub partition: PlantedPartitionSpec,
    pub cascade: CascadeSpec,
    pub edges: Option<PathBuf>,
    pub communities: Option<PathBuf>,
    pub events: Option<PathBuf>,
    pub history: Option<PathBuf>,
    pub out_dir: PathBuf,
    pub out: Option<PathBuf>,
    pub model: Option<PathBuf>,
    pub model_out: Option<PathBuf>,
    pub meme: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 25,
            basis: Basis::Tweets,
            x_max: 20,
            tau_days: 7,
            cap: DEFAULT_CLASS_CAP,
            seed: 42,
            folds: DEFAULT_FOLDS,
            policy: UnreachablePolicy::ConstantBeyondMax,
            trees: DEFAULT_TREES,
            features_per_tree: DEFAULT_FEATURES_PER_TREE,
            min_community_size: community::DEFAULT_MIN_COMMUNITY_SIZE,
            max_sweeps: 50,
            partition: PlantedPartitionSpec {
                communities: 4,
                community_size: 250,
                p_in: 0.05,
                p_out: 0.004,
                seed: 0, // overwritten by the derived seed at simulate time
            },
            cascade: CascadeSpec::default(),
            edges: None,
            communities: None,
            events: None,
            history: None,
            out_dir: PathBuf::from("."),
            out: None,
            model: None,
            model_out: None,
            meme: None,
        }
    }
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| {
        Error::InvalidParameter(format!("config key {key}: cannot parse {value:?}: {e}"))
    })
}

impl RunConfig {
    /// Applies one key=value setting; keys use the flag spellings.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "n" => self.n = parse_value(key, value)?,
            "basis" => self.basis = parse_value(key, value)?,
            "x-max" => self.x_max = parse_value(key, value)?,
            "tau-days" => self.tau_days = parse_value(key, value)?,
            "cap" => self.cap = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "folds" => self.folds = parse_value(key, value)?,
            "policy" => self.policy = parse_value(key, value)?,
            "trees" => self.trees = parse_value(key, value)?,
            "features-per-tree" => self.features_per_tree = parse_value(key, value)?,
            "min-community-size" => self.min_community_size = parse_value(key, value)?,
            "max-sweeps" => self.max_sweeps = parse_value(key, value)?,
            "communities" => self.partition.communities = parse_value(key, value)?,
            "community-size" => self.partition.community_size = parse_value(key, value)?,
            "p-in" => self.partition.p_in = parse_value(key, value)?,
            "p-out" => self.partition.p_out = parse_value(key, value)?,
            "meme-count" => self.cascade.meme_count = parse_value(key, value)?,
            "seed-adopters" => self.cascade.seed_adopters = parse_value(key, value)?,
            "trap-bias" => self.cascade.trap_bias = parse_value(key, value)?,
            "adopt-prob-min" => self.cascade.adopt_prob_min = parse_value(key, value)?,
            "adopt-prob-max" => self.cascade.adopt_prob_max = parse_value(key, value)?,
            "reinforcement" => self.cascade.reinforcement = parse_value(key, value)?,
            "retweet-prob" => self.cascade.retweet_prob = parse_value(key, value)?,
            "mention-prob" => self.cascade.mention_prob = parse_value(key, value)?,
            "mean-gap-seconds" => self.cascade.mean_gap_seconds = parse_value(key, value)?,
            "max-events" => self.cascade.max_events = parse_value(key, value)?,
            "repeat-prob" => self.cascade.repeat_prob = parse_value(key, value)?,
            "stall-limit" => self.cascade.stall_limit = parse_value(key, value)?,
            "attempt-factor" => self.cascade.attempt_factor = parse_value(key, value)?,
            "edges" => self.edges = Some(PathBuf::from(value)),
            "communities-file" => self.communities = Some(PathBuf::from(value)),
            "events" => self.events = Some(PathBuf::from(value)),
            "history" => self.history = Some(PathBuf::from(value)),
            "out-dir" => self.out_dir = PathBuf::from(value),
            "out" => self.out = Some(PathBuf::from(value)),
            "model" => self.model = Some(PathBuf::from(value)),
            "model-out" => self.model_out = Some(PathBuf::from(value)),
            "meme" => self.meme = Some(value.to_string()),
            _ => {
                return Err(Error::InvalidParameter(format!(
                    "unknown config key {key:?}"
                )))
            }
        }
        Ok(())
    }

    /// Reads a key=value file (one per line, `#` comments) into this
    /// config.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let file = open_named(path)?;
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected key=value, got {trimmed:?}"),
                });
            };
            self.apply(key.trim(), value.trim())?;
        }
        Ok(())
    }

    fn require<'a>(&self, path: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
        path.as_deref().ok_or_else(|| {
            Error::InvalidParameter(format!("missing input: {what} (flag --{what})"))
        })
    }
}

/// Opens a file for reading, naming the path in the error on failure.
fn open_named(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| {
        Error::InvalidParameter(format!("cannot open {}: {e}", path.display()))
    })
}

fn create_named(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| {
                Error::InvalidParameter(format!("cannot create {}: {e}", parent.display()))
            })?;
        }
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::InvalidParameter(format!("cannot create {}: {e}", path.display())))
}

/// Everything one meme contributes to the evaluation: the thirteen window
/// features, the adopter-influence statistics, the horizon popularity and
/// per-day counts the regression baselines consume, and the label.
#[derive(Debug, Clone)]
pub struct EvalRow {
    pub meme_id: String,
    pub features: [Option<f64>; 13],
    pub influence: [f64; 8],
    /// Popularity accumulated within the first tau days (per basis).
    pub early_popularity: u64,
    /// Raw per-day counts over the first tau days (per basis).
    pub daily: Vec<u64>,
    pub final_popularity: u64,
    pub label: u32,
}

/// Loads the network, communities, and events named by the config.
pub fn load_inputs(config: &RunConfig) -> Result<(Network, CommunityAssignment, Vec<Meme>)> {
    let edges = config.require(&config.edges, "edges")?;
    let net = load_network(BufReader::new(open_named(edges)?))?;
    let communities = config.require(&config.communities, "communities-file")?;
    let ca = community::load_assignments(
        BufReader::new(open_named(communities)?),
        &net,
        config.min_community_size,
    )?;
    let events = config.require(&config.events, "events")?;
    let memes = cascade::parse_events(BufReader::new(open_named(events)?))?;
    Ok((net, ca, memes))
}

fn load_history(config: &RunConfig) -> Result<HashMap<String, u64>> {
    let Some(path) = &config.history else {
        return Ok(HashMap::new());
    };
    let mut history = HashMap::new();
    for (lineno, line) in BufReader::new(open_named(path)?).lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split('\t');
        match (parts.next(), parts.next(), parts.next()) {
            (Some(id), Some(count), None) => {
                let count: u64 = count.parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("bad prior count {count:?}"),
                })?;
                history.insert(id.to_string(), count);
            }
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected meme_id<TAB>count, got {trimmed:?}"),
                })
            }
        }
    }
    Ok(history)
}

/// Applies the new-meme filter and drops memes shorter than the window.
/// Returns the kept memes and the count that were too short.
pub fn usable_memes(
    memes: Vec<Meme>,
    history: &HashMap<String, u64>,
    config: &RunConfig,
) -> (Vec<Meme>, usize) {
    let fresh = cascade::filter_new_memes(memes, history, config.x_max, None);
    let total = fresh.len();
    let kept: Vec<Meme> = fresh
        .into_iter()
        .filter(|m| m.events.len() >= config.n)
        .collect();
    let short = total - kept.len();
    (kept, short)
}

fn final_popularity(m: &Meme, basis: Basis) -> u64 {
    match basis {
        Basis::Tweets => m.popularity() as u64,
        Basis::Adopters => m.adopter_count() as u64,
    }
}

/// Builds one evaluation row per usable meme.
pub fn build_rows(
    memes: &[Meme],
    net: &Network,
    ca: &CommunityAssignment,
    config: &RunConfig,
) -> Result<Vec<EvalRow>> {
    let pagerank = net.pagerank(PAGERANK_DAMPING, PAGERANK_TOL, PAGERANK_MAX_ITER)?;
    let horizon = config.tau_days * SECONDS_PER_DAY;
    let mut rows = Vec::with_capacity(memes.len());
    for m in memes {
        let w = cascade::early_window(m, config.n)?;
        let features = extract_all(&w, net, ca, config.policy).to_row();
        let influence = influence_features(&w.adopters, net, &pagerank, None);
        let (early, daily_counts) = match config.basis {
            Basis::Tweets => (
                m.tweet_count_within(horizon) as u64,
                m.daily_tweet_counts(config.tau_days as usize),
            ),
            Basis::Adopters => (
                m.adopter_count_within(horizon) as u64,
                m.daily_new_adopter_counts(config.tau_days as usize),
            ),
        };
        let final_pop = final_popularity(m, config.basis);
        rows.push(EvalRow {
            meme_id: m.id.clone(),
            features,
            influence,
            early_popularity: early,
            daily: daily_counts.iter().map(|&c| c as u64).collect(),
            final_popularity: final_pop,
            label: bin(final_pop, config.cap)?,
        });
    }
    Ok(rows)
}

/// The models the evaluation compares, in report order: the window-feature
/// forest with its four ablations, then the five reference predictors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelSpec {
    Forest(FeatureSet),
    Random,
    Majority,
    Influence,
    LogLog,
    DailyCounts,
}

pub const MODEL_ZOO: [(&str, ModelSpec); 10] = [
    ("full", ModelSpec::Forest(FeatureSet::Full)),
    ("basic", ModelSpec::Forest(FeatureSet::Basic)),
    ("distance", ModelSpec::Forest(FeatureSet::Distance)),
    ("community", ModelSpec::Forest(FeatureSet::Community)),
    ("timing", ModelSpec::Forest(FeatureSet::Timing)),
    ("random", ModelSpec::Random),
    ("majority", ModelSpec::Majority),
    ("influence", ModelSpec::Influence),
    ("log-log", ModelSpec::LogLog),
    ("daily", ModelSpec::DailyCounts),
];

/// A trained member of the zoo, ready to predict rows.
pub enum TrainedModel {
    Forest {
        forest: RandomForest,
        indices: &'static [usize],
    },
    Random(RandomGuess),
    Majority(MajorityGuess),
    /// Regression on the influence statistics.
    Influence(RegressionClassifier),
    /// One-feature regression on log10 of the horizon popularity.
    LogLog(RegressionClassifier),
    /// Regression on the per-day horizon counts.
    Daily(RegressionClassifier),
}

fn project(features: &[Option<f64>; 13], indices: &[usize]) -> Vec<Option<f64>> {
    indices.iter().map(|&i| features[i]).collect()
}

impl Model<EvalRow> for TrainedModel {
    fn predict_one(&mut self, row: &EvalRow) -> u32 {
        match self {
            TrainedModel::Forest { forest, indices } => forest
                .predict_row(&project(&row.features, indices))
                .expect("projection matches training dimension"),
            TrainedModel::Random(m) => m.predict_one(row),
            TrainedModel::Majority(m) => m.predict_one(row),
            TrainedModel::Influence(clf) => clf
                .classify(&row.influence)
                .expect("influence row has fixed dimension"),
            TrainedModel::LogLog(clf) => {
                if row.early_popularity == 0 {
                    // Nothing observed by the horizon: predict the
                    // smallest class rather than extrapolate from log 0.
                    1
                } else {
                    clf.classify(&[(row.early_popularity as f64).log10()])
                        .expect("one-dimensional row")
                }
            }
            TrainedModel::Daily(clf) => clf
                .classify(&daily_log_row(&row.daily))
                .expect("daily row has tau dimensions"),
        }
    }
}

/// Trains one zoo member on the given training slice. `name` scopes the
/// derived seed; `fold` makes per-fold randomness independent.
pub fn train_model(
    spec: ModelSpec,
    name: &str,
    rows: &[EvalRow],
    labels: &[u32],
    fold: usize,
    config: &RunConfig,
) -> Result<TrainedModel> {
    let seed = derive_seed(config.seed, &format!("model-{name}-fold-{fold}"));
    match spec {
        ModelSpec::Forest(set) => {
            let indices = set.indices();
            let matrix: Vec<Vec<Option<f64>>> = rows
                .iter()
                .map(|r| project(&r.features, indices))
                .collect();
            let forest_config = ForestConfig {
                n_trees: config.trees,
                features_per_tree: config.features_per_tree.min(indices.len()),
                ..ForestConfig::default()
            };
            let forest = RandomForest::train(&matrix, labels, &forest_config, seed)?;
            Ok(TrainedModel::Forest { forest, indices })
        }
        ModelSpec::Random => Ok(TrainedModel::Random(RandomGuess::from_labels(
            labels, seed,
        )?)),
        ModelSpec::Majority => Ok(TrainedModel::Majority(MajorityGuess::fit(labels)?)),
        ModelSpec::Influence => {
            let x: Vec<Vec<f64>> = rows.iter().map(|r| r.influence.to_vec()).collect();
            let finals: Vec<u64> = rows.iter().map(|r| r.final_popularity).collect();
            Ok(TrainedModel::Influence(influence_model(
                &x, &finals, config.cap,
            )?))
        }
        ModelSpec::LogLog => {
            let earlys: Vec<u64> = rows.iter().map(|r| r.early_popularity).collect();
            let finals: Vec<u64> = rows.iter().map(|r| r.final_popularity).collect();
            let (clf, _skipped) = log_log_model(&earlys, &finals, config.cap)?;
            Ok(TrainedModel::LogLog(clf))
        }
        ModelSpec::DailyCounts => {
            let x: Vec<Vec<u64>> = rows.iter().map(|r| r.daily.clone()).collect();
            let finals: Vec<u64> = rows.iter().map(|r| r.final_popularity).collect();
            Ok(TrainedModel::Daily(daily_counts_model(
                &x, &finals, config.cap,
            )?))
        }
    }
}

/// One model's cross-validated result.
pub struct ModelOutcome {
    pub name: &'static str,
    pub outcome: CvOutcome,
}

/// Cross-validates the requested zoo members (all ten when `only` is
/// None) under one shared fold assignment.
pub fn evaluate_models(
    rows: &[EvalRow],
    config: &RunConfig,
    only: Option<&[&str]>,
) -> Result<Vec<ModelOutcome>> {
    let labels: Vec<u32> = rows.iter().map(|r| r.label).collect();
    let folds = stratified_folds(&labels, config.folds, derive_seed(config.seed, "folds"))?;
    let mut results = Vec::new();
    for (name, spec) in MODEL_ZOO {
        if let Some(filter) = only {
            if !filter.contains(&name) {
                continue;
            }
        }
        let outcome = eval::cross_validate_with_folds(rows, &labels, &folds, |tr, tl, k| {
            train_model(spec, name, tr, tl, k, config)
        })?;
        results.push(ModelOutcome { name, outcome });
    }
    Ok(results)
}

/// Writes the comparison table: one row per class, one column per model,
/// cells are per-class F1.
pub fn write_comparison_csv(outcomes: &[ModelOutcome], mut w: impl Write) -> Result<()> {
    let mut classes: Vec<u32> = Vec::new();
    for o in outcomes {
        for &c in o.outcome.report.classes() {
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
    }
    classes.sort_unstable();
    write!(w, "class")?;
    for o in outcomes {
        write!(w, ",{}", o.name)?;
    }
    writeln!(w)?;
    for c in classes {
        write!(w, "{c}")?;
        for o in outcomes {
            write!(w, ",{:.6}", o.outcome.report.f1_for(c).unwrap_or(0.0))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Saved-model envelope: enough context to recompute features for a new
/// meme and apply the forest.
#[derive(Serialize, Deserialize)]
pub struct ModelFile {
    pub format_version: u32,
    pub seed: u64,
    pub n: usize,
    pub basis: Basis,
    pub cap: u32,
    pub policy: String,
    pub feature_set: String,
    pub forest: RandomForest,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Trains the full-feature forest on every row and wraps it for saving.
pub fn fit_final_model(rows: &[EvalRow], config: &RunConfig, set: FeatureSet) -> Result<ModelFile> {
    let labels: Vec<u32> = rows.iter().map(|r| r.label).collect();
    let indices = set.indices();
    let matrix: Vec<Vec<Option<f64>>> =
        rows.iter().map(|r| project(&r.features, indices)).collect();
    let forest_config = ForestConfig {
        n_trees: config.trees,
        features_per_tree: config.features_per_tree.min(indices.len()),
        ..ForestConfig::default()
    };
    let forest = RandomForest::train(
        &matrix,
        &labels,
        &forest_config,
        derive_seed(config.seed, &format!("final-{}", set.label())),
    )?;
    Ok(ModelFile {
        format_version: MODEL_FORMAT_VERSION,
        seed: config.seed,
        n: config.n,
        basis: config.basis,
        cap: config.cap,
        policy: config.policy.to_string(),
        feature_set: set.label().to_string(),
        forest,
    })
}

/// Generates the synthetic corpus and writes the three standard files
/// into the output directory: `edges.tsv`, `communities.tsv`,
/// `events.tsv`. Returns their paths.
pub fn cmd_simulate(config: &RunConfig) -> Result<[PathBuf; 3]> {
    let mut partition = config.partition.clone();
    partition.seed = derive_seed(config.seed, "simulate-network");
    let mut cascade_spec = config.cascade.clone();
    cascade_spec.seed = derive_seed(config.seed, "simulate-cascades");
    let (net, ca) = generate_network(&partition)?;
    let memes = generate_cascades(&net, &ca, &cascade_spec)?;

    let edges_path = config.out_dir.join("edges.tsv");
    let mut w = create_named(&edges_path)?;
    for v in net.node_ids() {
        let neighbors = net.neighbors(v)?;
        if neighbors.is_empty() {
            // A bare label keeps nodes without any link in the file, so the
            // node universe survives the round trip through disk.
            writeln!(w, "{}", net.label(v).expect("generated node"))?;
            continue;
        }
        for &u in neighbors {
            if u > v {
                writeln!(
                    w,
                    "{}\t{}",
                    net.label(v).expect("generated node"),
                    net.label(u).expect("generated node")
                )?;
            }
        }
    }
    w.flush()?;

    let communities_path = config.out_dir.join("communities.tsv");
    let mut w = create_named(&communities_path)?;
    ca.write_export(&net, &mut w)?;
    w.flush()?;

    let events_path = config.out_dir.join("events.tsv");
    let mut w = create_named(&events_path)?;
    cascade::write_events(&memes, &mut w)?;
    w.flush()?;

    Ok([edges_path, communities_path, events_path])
}

/// Detects communities on the edge file and writes the assignment in the
/// standard export format (default `out_dir/communities-detected.tsv`).
pub fn cmd_detect(config: &RunConfig) -> Result<PathBuf> {
    let edges = config.require(&config.edges, "edges")?;
    let net = load_network(BufReader::new(open_named(edges)?))?;
    let ca = community::detect_label_propagation(
        &net,
        derive_seed(config.seed, "detect"),
        config.max_sweeps,
        config.min_community_size,
    );
    let out = config
        .out
        .clone()
        .unwrap_or_else(|| config.out_dir.join("communities-detected.tsv"));
    let mut w = create_named(&out)?;
    ca.write_export(&net, &mut w)?;
    w.flush()?;
    Ok(out)
}

/// Extracts the labeled feature table (default `out_dir/features.csv`).
/// Returns the output path and the number of rows written.
pub fn cmd_features(config: &RunConfig) -> Result<(PathBuf, usize)> {
    let (net, ca, memes) = load_inputs(config)?;
    let history = load_history(config)?;
    let (kept, _short) = usable_memes(memes, &history, config);
    let mut rows = Vec::with_capacity(kept.len());
    for m in &kept {
        let w = cascade::early_window(m, config.n)?;
        rows.push(FeatureRow {
            meme_id: m.id.clone(),
            n: config.n,
            features: extract_all(&w, &net, &ca, config.policy),
            label_tweets: bin(m.popularity() as u64, config.cap)?,
            label_adopters: bin(m.adopter_count() as u64, config.cap)?,
        });
    }
    let out = config
        .out
        .clone()
        .unwrap_or_else(|| config.out_dir.join("features.csv"));
    let mut w = create_named(&out)?;
    crate::features::write_features_csv(&rows, &mut w)?;
    w.flush()?;
    Ok((out, rows.len()))
}

/// Everything `cmd_evaluate` produces, for callers that want the numbers
/// rather than the files.
pub struct EvaluationArtifacts {
    pub outcomes: Vec<ModelOutcome>,
    pub fold_hash: u64,
    pub row_count: usize,
    pub report_paths: Vec<PathBuf>,
}

/// Runs the whole comparison: builds rows, cross-validates the zoo under
/// shared folds, writes one report and one confusion CSV per model plus
/// the comparison table, optionally saves a final full-feature model.
pub fn cmd_evaluate(config: &RunConfig) -> Result<EvaluationArtifacts> {
    let (net, ca, memes) = load_inputs(config)?;
    let history = load_history(config)?;
    let (kept, _short) = usable_memes(memes, &history, config);
    let rows = build_rows(&kept, &net, &ca, config)?;
    if rows.is_empty() {
        return Err(Error::Training(
            "no meme passes the window and freshness filters".into(),
        ));
    }
    let outcomes = evaluate_models(&rows, config, None)?;
    let fold_hash = outcomes
        .first()
        .map(|o| o.outcome.fold_hash)
        .unwrap_or_default();
    let mut report_paths = Vec::new();
    for o in &outcomes {
        let report_path = config.out_dir.join(format!("report-{}.csv", o.name));
        let mut w = create_named(&report_path)?;
        o.outcome.report.write_csv(&mut w)?;
        w.flush()?;
        let confusion_path = config.out_dir.join(format!("confusion-{}.csv", o.name));
        let mut w = create_named(&confusion_path)?;
        o.outcome.report.write_confusion_csv(&mut w)?;
        w.flush()?;
        report_paths.push(report_path);
        report_paths.push(confusion_path);
    }
    let comparison_path = config.out_dir.join("comparison.csv");
    let mut w = create_named(&comparison_path)?;
    write_comparison_csv(&outcomes, &mut w)?;
    w.flush()?;
    report_paths.push(comparison_path);
    if let Some(model_out) = &config.model_out {
        let file = fit_final_model(&rows, config, FeatureSet::Full)?;
        let mut w = create_named(model_out)?;
        serde_json::to_writer_pretty(&mut w, &file)?;
        w.flush()?;
        report_paths.push(model_out.clone());
    }
    Ok(EvaluationArtifacts {
        outcomes,
        fold_hash,
        row_count: rows.len(),
        report_paths,
    })
}

/// The outcome of single-meme inference.
pub struct Prediction {
    pub meme_id: String,
    pub class: u32,
    pub basis: Basis,
    pub cap: u32,
    /// Votes per class, aligned with `classes`.
    pub classes: Vec<u32>,
    pub votes: Vec<usize>,
}

impl Prediction {
    /// Human-readable count range for the predicted class.
    pub fn describe_range(&self) -> String {
        let k = self.class;
        let lower = if k <= 1 {
            1
        } else {
            10f64.powf(k as f64 - 1.5).floor() as u64 + 1
        };
        if k >= self.cap {
            format!("{lower} or more")
        } else {
            let upper = 10f64.powf(k as f64 - 0.5).floor() as u64;
            format!("{lower} to {upper}")
        }
    }
}

/// Loads a saved model and predicts the class of one meme from its first
/// n events.
pub fn cmd_predict(config: &RunConfig) -> Result<Prediction> {
    let model_path = config.require(&config.model, "model")?;
    let file: ModelFile = serde_json::from_reader(BufReader::new(open_named(model_path)?))?;
    if file.format_version != MODEL_FORMAT_VERSION {
        return Err(Error::InvalidParameter(format!(
            "model format {} is not supported (expected {MODEL_FORMAT_VERSION})",
            file.format_version
        )));
    }
    let policy: UnreachablePolicy = file.policy.parse()?;
    let set: FeatureSet = file.feature_set.parse()?;
    let (net, ca, memes) = load_inputs(config)?;
    let meme_id = config.meme.as_deref().ok_or_else(|| {
        Error::InvalidParameter("missing input: meme id (flag --meme)".into())
    })?;
    let meme = memes
        .iter()
        .find(|m| m.id == meme_id)
        .ok_or_else(|| Error::InvalidParameter(format!("meme {meme_id:?} not in events file")))?;
    let w = cascade::early_window(meme, file.n)?;
    let features = extract_all(&w, &net, &ca, policy).to_row();
    let projected = project(&features, set.indices());
    let votes = file.forest.votes(&projected)?;
    let class = file.forest.predict_row(&projected)?;
    Ok(Prediction {
        meme_id: meme_id.to_string(),
        class,
        basis: file.basis,
        cap: file.cap,
        classes: file.forest.classes.clone(),
        votes,
    })
}

/// Renders the comparison as an aligned text table for terminal output.
pub fn format_comparison(outcomes: &[ModelOutcome]) -> String {
    let mut classes: Vec<u32> = Vec::new();
    for o in outcomes {
        for &c in o.outcome.report.classes() {
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
    }
    classes.sort_unstable();
    let mut out = String::new();
    out.push_str(&format!("{:>10}", "class"));
    for o in outcomes {
        out.push_str(&format!("{:>12}", o.name));
    }
    out.push('\n');
    for c in classes {
        out.push_str(&format!("{c:>10}"));
        for o in outcomes {
            out.push_str(&format!(
                "{:>12.4}",
                o.outcome.report.f1_for(c).unwrap_or(0.0)
            ));
        }
        out.push('\n');
    }
    out
}
