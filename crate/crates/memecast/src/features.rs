//! The thirteen early-window prediction features.
//!
//! Three families describe a meme's first n tweets: topology (adopter
//! count, one- and two-hop audience surfaces, step distances, diameter),
//! community diversity (infected-community count, usage/adopter entropy,
//! intra-community interaction fractions), and growth rate (mean and
//! coefficient of variation of inter-tweet times).
//!
//! Degenerate windows produce `None` ("missing") rather than a sentinel:
//! a coefficient of variation with zero mean, an interaction fraction with
//! no interactions of that kind. The classifier routes missing values down
//! a designated branch, so no imputation happens here.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use crate::cascade::{interaction_split, EarlyWindow, EventKind};
use crate::community::{CommunityAssignment, CommunityId};
use crate::error::{Error, Result};
use crate::graph::{Distance, Network, NodeId};

/// How distances between disconnected users enter f4–f6.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnreachablePolicy {
    /// Substitute c* = (largest finite distance seen in the window) + 1,
    /// or 1 when the window has no finite distance at all. Keeps every
    /// step in the average while ranking disconnection beyond any
    /// observed hop count.
    #[default]
    ConstantBeyondMax,
    /// Drop unreachable pairs. The step-distance mean/CV become missing
    /// when nothing remains.
    Exclude,
}

impl std::str::FromStr for UnreachablePolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "constant" => Ok(UnreachablePolicy::ConstantBeyondMax),
            "exclude" => Ok(UnreachablePolicy::Exclude),
            other => Err(Error::InvalidParameter(format!(
                "unreachable policy must be constant or exclude, got {other:?}"
            ))),
        }
    }
}

impl std::fmt::Display for UnreachablePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnreachablePolicy::ConstantBeyondMax => write!(f, "constant"),
            UnreachablePolicy::Exclude => write!(f, "exclude"),
        }
    }
}

/// Column names in feature order, as used in CSV headers and model files.
pub const FEATURE_NAMES: [&str; 13] = [
    "f1", "f2", "f3", "f4", "f5", "f6", "f7", "f8", "f9", "f10", "f11", "f12", "f13",
];

/// The thirteen features of one early window.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    /// f1: distinct adopters in the window, |A_n|.
    pub f1_adopters: usize,
    /// f2: uninfected users within one hop of the adopters, |S(A_n)|.
    pub f2_surface1: usize,
    /// f3: uninfected users within two hops, |S²(A_n)|.
    pub f3_surface2: usize,
    /// f4: mean shortest-path distance between consecutive tweet authors.
    pub f4_mean_step_dist: Option<f64>,
    /// f5: coefficient of variation of the step distances.
    pub f5_cv_step_dist: Option<f64>,
    /// f6: largest pairwise distance between distinct adopters.
    pub f6_diameter: u32,
    /// f7: communities holding at least one tweet of the window, |C_n|.
    pub f7_infected_communities: usize,
    /// f8: entropy of the tweet distribution over communities (nats).
    pub f8_usage_entropy: f64,
    /// f9: entropy of the adopter distribution over communities (nats).
    pub f9_adopter_entropy: f64,
    /// f10: fraction of retweets staying inside a community.
    pub f10_intra_rt_frac: Option<f64>,
    /// f11: fraction of mentions staying inside a community.
    pub f11_intra_at_frac: Option<f64>,
    /// f12: mean time between consecutive tweets, (t_n − t_1)/(n−1).
    pub f12_mean_step_time: f64,
    /// f13: coefficient of variation of the inter-tweet times.
    pub f13_cv_step_time: Option<f64>,
}

impl FeatureVector {
    /// The features as a fixed-order row; `None` marks a missing value.
    pub fn to_row(&self) -> [Option<f64>; 13] {
        [
            Some(self.f1_adopters as f64),
            Some(self.f2_surface1 as f64),
            Some(self.f3_surface2 as f64),
            self.f4_mean_step_dist,
            self.f5_cv_step_dist,
            Some(self.f6_diameter as f64),
            Some(self.f7_infected_communities as f64),
            Some(self.f8_usage_entropy),
            Some(self.f9_adopter_entropy),
            self.f10_intra_rt_frac,
            self.f11_intra_at_frac,
            Some(self.f12_mean_step_time),
            self.f13_cv_step_time,
        ]
    }
}

/// Named sub-families for ablation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureSet {
    /// All thirteen features.
    Full,
    /// f1–f3: adopter count and surfaces.
    Basic,
    /// f4–f6: step distances and diameter.
    Distance,
    /// f7–f11: community diversity and interaction locality.
    Community,
    /// f12–f13: growth rate.
    Timing,
}

impl FeatureSet {
    /// Zero-based indices into a feature row.
    pub fn indices(self) -> &'static [usize] {
        match self {
            FeatureSet::Full => &[0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12],
            FeatureSet::Basic => &[0, 1, 2],
            FeatureSet::Distance => &[3, 4, 5],
            FeatureSet::Community => &[6, 7, 8, 9, 10],
            FeatureSet::Timing => &[11, 12],
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            FeatureSet::Full => "full",
            FeatureSet::Basic => "basic",
            FeatureSet::Distance => "distance",
            FeatureSet::Community => "community",
            FeatureSet::Timing => "timing",
        }
    }
}

impl std::str::FromStr for FeatureSet {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(FeatureSet::Full),
            "basic" => Ok(FeatureSet::Basic),
            "distance" => Ok(FeatureSet::Distance),
            "community" => Ok(FeatureSet::Community),
            "timing" => Ok(FeatureSet::Timing),
            other => Err(Error::InvalidParameter(format!(
                "feature set must be full|basic|distance|community|timing, got {other:?}"
            ))),
        }
    }
}

/// f1–f3: adopter count and the one- and two-hop uninfected surfaces.
pub fn basic_features(w: &EarlyWindow<'_>, net: &Network) -> (usize, usize, usize) {
    let seeds: Vec<NodeId> = w
        .adopters
        .iter()
        .filter_map(|label| net.resolve(label))
        .collect();
    let f1 = w.adopters.len();
    let f2 = net.surface(&seeds, 1).map(|s| s.len()).unwrap_or(0);
    let f3 = net.surface(&seeds, 2).map(|s| s.len()).unwrap_or(0);
    (f1, f2, f3)
}

/// Distances needed by f4–f6: the n−1 consecutive-author steps and all
/// pairwise distances between distinct adopters. Authors missing from the
/// network are unreachable from everyone but themselves.
struct WindowDistances {
    steps: Vec<Distance>,
    pairs: Vec<Distance>,
}

fn window_distances(w: &EarlyWindow<'_>, net: &Network) -> WindowDistances {
    let resolved: HashMap<&str, Option<NodeId>> = w
        .adopters
        .iter()
        .map(|&label| (label, net.resolve(label)))
        .collect();
    let mut bfs: HashMap<NodeId, Vec<Distance>> = HashMap::new();
    for node in resolved.values().flatten() {
        bfs.entry(*node)
            .or_insert_with(|| net.distances_from(*node).expect("resolved node"));
    }
    let lookup = |a: &str, b: &str| -> Distance {
        if a == b {
            return Distance::Finite(0);
        }
        match (resolved.get(a).copied().flatten(), resolved.get(b).copied().flatten()) {
            (Some(x), Some(y)) => bfs[&x][y as usize],
            _ => Distance::Unreachable,
        }
    };
    let steps = w
        .events
        .windows(2)
        .map(|pair| lookup(&pair[0].user, &pair[1].user))
        .collect();
    let mut pairs = Vec::new();
    for i in 0..w.adopters.len() {
        for j in (i + 1)..w.adopters.len() {
            pairs.push(lookup(w.adopters[i], w.adopters[j]));
        }
    }
    WindowDistances { steps, pairs }
}

/// Mean and coefficient of variation of a sample, with the CV divisor
/// matching the feature definitions: sqrt(Σ(x−x̄)²/(m−1)) / x̄ for m
/// samples, which is the stated (n−2) divisor when all n−1 steps of an
/// n-tweet window are present. Returns (mean, cv).
fn mean_and_cv(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    if values.len() < 2 || mean == 0.0 {
        return (Some(mean), None);
    }
    let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
    let cv = (ss / (values.len() - 1) as f64).sqrt() / mean;
    (Some(mean), Some(cv))
}

/// f4–f6: mean step distance, its coefficient of variation, and the
/// adopter diameter, under the given unreachable-pair policy.
pub fn distance_features(
    w: &EarlyWindow<'_>,
    net: &Network,
    policy: UnreachablePolicy,
) -> (Option<f64>, Option<f64>, u32) {
    let d = window_distances(w, net);
    let max_finite = d
        .steps
        .iter()
        .chain(&d.pairs)
        .filter_map(|d| d.finite())
        .max();
    let steps: Vec<f64> = match policy {
        UnreachablePolicy::ConstantBeyondMax => {
            let substitute = max_finite.map_or(1, |m| m + 1) as f64;
            d.steps
                .iter()
                .map(|s| s.finite().map_or(substitute, |v| v as f64))
                .collect()
        }
        UnreachablePolicy::Exclude => {
            d.steps.iter().filter_map(|d| d.finite()).map(|v| v as f64).collect()
        }
    };
    let (f4, f5) = mean_and_cv(&steps);
    let f6 = match policy {
        UnreachablePolicy::ConstantBeyondMax => {
            let substitute = max_finite.map_or(1, |m| m + 1);
            d.pairs
                .iter()
                .map(|p| p.finite().unwrap_or(substitute))
                .max()
                .unwrap_or(0)
        }
        UnreachablePolicy::Exclude => d.pairs.iter().filter_map(|d| d.finite()).max().unwrap_or(0),
    };
    (f4, f5, f6)
}

/// Community weights of a set of users: a user in k communities adds 1/k
/// to each, so total weight equals the number of assigned users. Users in
/// no community contribute nothing.
fn community_weights<'a>(
    users: impl Iterator<Item = &'a str>,
    net: &Network,
    ca: &CommunityAssignment,
) -> HashMap<CommunityId, f64> {
    let mut weights = HashMap::new();
    for label in users {
        let Some(node) = net.resolve(label) else { continue };
        let communities = ca.communities_of(node);
        if communities.is_empty() {
            continue;
        }
        let share = 1.0 / communities.len() as f64;
        for &c in communities {
            *weights.entry(c).or_insert(0.0) += share;
        }
    }
    weights
}

/// Shannon entropy (nats) of a weight distribution after normalization.
fn entropy(weights: &HashMap<CommunityId, f64>) -> f64 {
    let total: f64 = weights.values().sum();
    if total <= 0.0 {
        return 0.0;
    }
    // Sorted iteration keeps the floating-point sum order deterministic.
    let mut keys: Vec<&CommunityId> = weights.keys().collect();
    keys.sort_unstable();
    let sum = keys
        .into_iter()
        .map(|k| weights[k] / total)
        .filter(|&p| p > 0.0)
        .map(|p| p * p.ln())
        .sum::<f64>();
    // A one-community distribution sums to exactly 0; negating would
    // produce -0.0, which round-trips as "-0" in text output.
    if sum == 0.0 {
        0.0
    } else {
        -sum
    }
}

/// f7–f11: infected communities, usage/adopter entropy, and the fractions
/// of retweets and mentions that stay inside a community.
pub fn community_features(
    w: &EarlyWindow<'_>,
    net: &Network,
    ca: &CommunityAssignment,
) -> (usize, f64, f64, Option<f64>, Option<f64>) {
    let f7 = w.infected_communities(net, ca).len();
    let usage = community_weights(w.events.iter().map(|e| e.user.as_str()), net, ca);
    let adopter = community_weights(w.adopters.iter().copied(), net, ca);
    let f8 = entropy(&usage);
    let f9 = entropy(&adopter);
    let frac = |kind| {
        let (intra, inter) = interaction_split(w, net, ca, kind);
        let total = intra + inter;
        (total > 0).then(|| intra as f64 / total as f64)
    };
    (f7, f8, f9, frac(EventKind::Retweet), frac(EventKind::Mention))
}

/// f12–f13: mean inter-tweet time and its coefficient of variation.
pub fn growth_features(w: &EarlyWindow<'_>) -> (f64, Option<f64>) {
    if w.events.len() < 2 {
        return (0.0, None);
    }
    let gaps: Vec<f64> = w
        .events
        .windows(2)
        .map(|pair| (pair[1].timestamp - pair[0].timestamp) as f64)
        .collect();
    let (mean, cv) = mean_and_cv(&gaps);
    (mean.unwrap_or(0.0), cv)
}

/// All thirteen features of one window. Deterministic: identical inputs
/// produce a bitwise-identical vector.
pub fn extract_all(
    w: &EarlyWindow<'_>,
    net: &Network,
    ca: &CommunityAssignment,
    policy: UnreachablePolicy,
) -> FeatureVector {
    let (f1, f2, f3) = basic_features(w, net);
    let (f4, f5, f6) = distance_features(w, net, policy);
    let (f7, f8, f9, f10, f11) = community_features(w, net, ca);
    let (f12, f13) = growth_features(w);
    FeatureVector {
        f1_adopters: f1,
        f2_surface1: f2,
        f3_surface2: f3,
        f4_mean_step_dist: f4,
        f5_cv_step_dist: f5,
        f6_diameter: f6,
        f7_infected_communities: f7,
        f8_usage_entropy: f8,
        f9_adopter_entropy: f9,
        f10_intra_rt_frac: f10,
        f11_intra_at_frac: f11,
        f12_mean_step_time: f12,
        f13_cv_step_time: f13,
    }
}

/// One labeled row of the feature table.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub meme_id: String,
    /// Window length the features were computed from.
    pub n: usize,
    pub features: FeatureVector,
    /// Final-popularity class on the tweet count.
    pub label_tweets: u32,
    /// Final-popularity class on the adopter count.
    pub label_adopters: u32,
}

/// Writes rows as CSV: `meme_id,n,f1,...,f13,label_T,label_A`, missing
/// values as empty fields. Floats use the shortest round-trip form, so a
/// rewrite of a reread file is byte-identical.
pub fn write_features_csv(rows: &[FeatureRow], mut w: impl Write) -> Result<()> {
    write!(w, "meme_id,n")?;
    for name in FEATURE_NAMES {
        write!(w, ",{name}")?;
    }
    writeln!(w, ",label_T,label_A")?;
    for row in rows {
        write!(w, "{},{}", row.meme_id, row.n)?;
        for value in row.features.to_row() {
            match value {
                Some(v) => write!(w, ",{v}")?,
                None => write!(w, ",")?,
            }
        }
        writeln!(w, ",{},{}", row.label_tweets, row.label_adopters)?;
    }
    Ok(())
}

/// Reads a feature CSV produced by [`write_features_csv`].
pub fn parse_features_csv(reader: impl BufRead) -> Result<Vec<FeatureRow>> {
    let mut rows = Vec::new();
    let mut lines = reader.lines().enumerate();
    let header = match lines.next() {
        Some((_, line)) => line?,
        None => return Err(Error::Parse { line: 1, message: "empty feature file".into() }),
    };
    let expected = {
        let mut h = String::from("meme_id,n");
        for name in FEATURE_NAMES {
            h.push(',');
            h.push_str(name);
        }
        h.push_str(",label_T,label_A");
        h
    };
    if header.trim_end() != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!("unexpected header {header:?}"),
        });
    }
    for (lineno, line) in lines {
        let line = line?;
        let line_number = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.trim_end().split(',').collect();
        if fields.len() != 17 {
            return Err(Error::Parse {
                line: line_number,
                message: format!("expected 17 fields, got {}", fields.len()),
            });
        }
        let bad = |what: &str| Error::Parse {
            line: line_number,
            message: format!("bad {what}"),
        };
        let n: usize = fields[1].parse().map_err(|_| bad("window length"))?;
        let mut values = [None; 13];
        for (i, raw) in fields[2..15].iter().enumerate() {
            values[i] = if raw.is_empty() {
                None
            } else {
                Some(raw.parse::<f64>().map_err(|_| bad(FEATURE_NAMES[i]))?)
            };
        }
        let require = |v: Option<f64>, what: &str| v.ok_or_else(|| bad(what));
        let features = FeatureVector {
            f1_adopters: require(values[0], "f1")? as usize,
            f2_surface1: require(values[1], "f2")? as usize,
            f3_surface2: require(values[2], "f3")? as usize,
            f4_mean_step_dist: values[3],
            f5_cv_step_dist: values[4],
            f6_diameter: require(values[5], "f6")? as u32,
            f7_infected_communities: require(values[6], "f7")? as usize,
            f8_usage_entropy: require(values[7], "f8")?,
            f9_adopter_entropy: require(values[8], "f9")?,
            f10_intra_rt_frac: values[9],
            f11_intra_at_frac: values[10],
            f12_mean_step_time: require(values[11], "f12")?,
            f13_cv_step_time: values[12],
        };
        rows.push(FeatureRow {
            meme_id: fields[0].to_string(),
            n,
            features,
            label_tweets: fields[15].parse().map_err(|_| bad("label_T"))?,
            label_adopters: fields[16].parse().map_err(|_| bad("label_A"))?,
        });
    }
    Ok(rows)
}
