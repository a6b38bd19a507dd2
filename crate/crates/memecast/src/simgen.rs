//! Synthetic data: planted-partition follower networks and meme cascades
//! with controllable community trapping, social reinforcement, and
//! heterogeneous per-meme stickiness. The output is labeled desk-scale
//! data for exercising the full pipeline where ground truth is known.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cascade::{AdoptionEvent, EventKind, Meme};
use crate::community::CommunityAssignment;
use crate::error::{Error, Result};
use crate::graph::{Network, NetworkBuilder, NodeId};
use crate::seeds::derive_seed;

/// Parameters of a planted-partition random graph: `communities` blocks
/// of `community_size` nodes, intra-block edges drawn with `p_in`,
/// cross-block edges with `p_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedPartitionSpec {
    pub communities: usize,
    pub community_size: usize,
    pub p_in: f64,
    pub p_out: f64,
    pub seed: u64,
}

impl PlantedPartitionSpec {
    fn validate(&self) -> Result<()> {
        if self.communities == 0 || self.community_size == 0 {
            return Err(Error::InvalidParameter(
                "network needs at least one community with at least one node".into(),
            ));
        }
        for (name, p) in [("p_in", self.p_in), ("p_out", self.p_out)] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.p_out > self.p_in {
            return Err(Error::InvalidParameter(format!(
                "p_out ({}) must not exceed p_in ({})",
                self.p_out, self.p_in
            )));
        }
        Ok(())
    }
}

/// Parameters of the cascade process run on top of a generated network.
///
/// Each meme draws its own adoption probability log-uniformly from
/// `[adopt_prob_min, adopt_prob_max]`, which is what spreads final
/// popularity across orders of magnitude. `trap_bias` is the probability
/// an exposure goes to a same-community neighbor of the exposer;
/// `reinforcement` is added to the adoption probability once per prior
/// failed exposure (capped at 1). Repeat shares between two existing
/// adopters are emitted with `repeat_prob`, so tweet counts can exceed
/// adopter counts. A meme stops at `max_events`, after `stall_limit`
/// consecutive attempts without a new adoption, or at the absolute
/// attempt budget `attempt_factor * max_events`.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeSpec {
    pub meme_count: usize,
    pub seed_adopters: usize,
    pub trap_bias: f64,
    pub adopt_prob_min: f64,
    pub adopt_prob_max: f64,
    pub reinforcement: f64,
    pub retweet_prob: f64,
    pub mention_prob: f64,
    pub mean_gap_seconds: f64,
    pub max_events: usize,
    pub repeat_prob: f64,
    pub stall_limit: usize,
    pub attempt_factor: usize,
    pub seed: u64,
}

impl Default for CascadeSpec {
    fn default() -> Self {
        CascadeSpec {
            meme_count: 2000,
            seed_adopters: 1,
            trap_bias: 0.7,
            adopt_prob_min: 5e-4,
            adopt_prob_max: 0.3,
            reinforcement: 0.002,
            retweet_prob: 0.55,
            mention_prob: 0.2,
            mean_gap_seconds: 3600.0,
            max_events: 3000,
            repeat_prob: 0.05,
            stall_limit: 120,
            attempt_factor: 30,
            seed: 1,
        }
    }
}

impl CascadeSpec {
    fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("trap_bias", self.trap_bias),
            ("adopt_prob_min", self.adopt_prob_min),
            ("adopt_prob_max", self.adopt_prob_max),
            ("reinforcement", self.reinforcement),
            ("retweet_prob", self.retweet_prob),
            ("mention_prob", self.mention_prob),
            ("repeat_prob", self.repeat_prob),
        ] {
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {p}"
                )));
            }
        }
        if self.retweet_prob + self.mention_prob > 1.0 {
            return Err(Error::InvalidParameter(
                "retweet_prob + mention_prob must not exceed 1".into(),
            ));
        }
        if self.adopt_prob_min > self.adopt_prob_max {
            return Err(Error::InvalidParameter(
                "adopt_prob_min must not exceed adopt_prob_max".into(),
            ));
        }
        if self.max_events == 0 {
            return Err(Error::InvalidParameter("max_events must be at least 1".into()));
        }
        if self.seed_adopters == 0 {
            return Err(Error::InvalidParameter(
                "each meme needs at least one seed adopter".into(),
            ));
        }
        if !self.mean_gap_seconds.is_finite() || self.mean_gap_seconds < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "mean_gap_seconds must be finite and non-negative, got {}",
                self.mean_gap_seconds
            )));
        }
        if self.stall_limit == 0 || self.attempt_factor == 0 {
            return Err(Error::InvalidParameter(
                "stall_limit and attempt_factor must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// Node label for block index `c`, member index `i`: zero-padded so that
/// lexicographic and numeric order agree.
fn node_label(index: usize) -> String {
    format!("u{index:05}")
}

/// Generates a planted-partition network together with its ground-truth
/// block assignment. Deterministic for a given spec.
pub fn generate_network(spec: &PlantedPartitionSpec) -> Result<(Network, CommunityAssignment)> {
    spec.validate()?;
    let n = spec.communities * spec.community_size;
    let block = |i: usize| i / spec.community_size;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, "planted-partition"));
    let mut builder = NetworkBuilder::new();
    for i in 0..n {
        builder.ensure_node(&node_label(i));
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let p = if block(i) == block(j) {
                spec.p_in
            } else {
                spec.p_out
            };
            if rng.gen::<f64>() < p {
                builder.add_edge(&node_label(i), &node_label(j))?;
            }
        }
    }
    let net = builder.build();
    let members: Vec<(String, Vec<NodeId>)> = (0..spec.communities)
        .map(|c| {
            let ids = (0..spec.community_size)
                .map(|k| {
                    net.resolve(&node_label(c * spec.community_size + k))
                        .expect("generated nodes are registered")
                })
                .collect();
            (c.to_string(), ids)
        })
        .collect();
    let assignment = CommunityAssignment::from_members(net.node_count(), members, 1);
    Ok((net, assignment))
}

/// One meme's cascade state while it unfolds.
struct CascadeRun<'a> {
    net: &'a Network,
    intra_neighbors: &'a [Vec<NodeId>],
    spec: &'a CascadeSpec,
    rng: ChaCha8Rng,
    adopt_prob: f64,
    clock: f64,
    events: Vec<AdoptionEvent>,
    adopters: Vec<NodeId>,
    is_adopter: Vec<bool>,
    exposures: Vec<u32>,
}

impl CascadeRun<'_> {
    fn gap(&mut self) -> f64 {
        // Inverse-CDF sample of an exponential with the configured mean.
        let u: f64 = self.rng.gen();
        -self.spec.mean_gap_seconds * (1.0 - u).ln()
    }

    fn emit(&mut self, user: NodeId, kind: EventKind, target: Option<NodeId>) {
        self.clock += self.gap();
        self.events.push(AdoptionEvent {
            timestamp: self.clock.floor() as i64,
            user: self.net.label(user).expect("cascade nodes exist").to_string(),
            kind,
            target: target.map(|t| self.net.label(t).expect("exposer exists").to_string()),
        });
    }

    /// Event kind for a share provoked by `exposer`: retweet, mention, or
    /// plain, per the configured mix.
    fn share_kind(&mut self, exposer: NodeId) -> (EventKind, Option<NodeId>) {
        let u: f64 = self.rng.gen();
        if u < self.spec.retweet_prob {
            (EventKind::Retweet, Some(exposer))
        } else if u < self.spec.retweet_prob + self.spec.mention_prob {
            (EventKind::Mention, Some(exposer))
        } else {
            (EventKind::Plain, None)
        }
    }

    fn run(&mut self, seeds: &[NodeId]) {
        for &s in seeds {
            self.adopters.push(s);
            self.is_adopter[s as usize] = true;
            self.events.push(AdoptionEvent {
                timestamp: 0,
                user: self.net.label(s).expect("seed nodes exist").to_string(),
                kind: EventKind::Plain,
                target: None,
            });
        }
        let budget = self.spec.attempt_factor.saturating_mul(self.spec.max_events);
        let mut stalled = 0usize;
        let mut attempts = 0usize;
        while self.events.len() < self.spec.max_events
            && stalled < self.spec.stall_limit
            && attempts < budget
        {
            attempts += 1;
            let a = self.adopters[self.rng.gen_range(0..self.adopters.len())];
            let candidates: &[NodeId] = if self.rng.gen::<f64>() < self.spec.trap_bias
                && !self.intra_neighbors[a as usize].is_empty()
            {
                &self.intra_neighbors[a as usize]
            } else {
                match self.net.neighbors(a) {
                    Ok(all) if !all.is_empty() => all,
                    _ => {
                        stalled += 1;
                        continue;
                    }
                }
            };
            let v = candidates[self.rng.gen_range(0..candidates.len())];
            if self.is_adopter[v as usize] {
                // A share passed between two existing adopters: emitted
                // with the configured probability so tweet counts can
                // exceed adopter counts without swamping the log. Repeats
                // are not progress — only adoptions reset the stall
                // counter — so a saturated cascade winds down instead of
                // echoing until the event cap.
                if self.rng.gen::<f64>() < self.spec.repeat_prob {
                    let (kind, target) = self.share_kind(a);
                    self.emit(v, kind, target);
                }
                stalled += 1;
                continue;
            }
            let prior = self.exposures[v as usize];
            self.exposures[v as usize] = prior.saturating_add(1);
            let p = (self.adopt_prob + self.spec.reinforcement * prior as f64).min(1.0);
            if self.rng.gen::<f64>() < p {
                self.adopters.push(v);
                self.is_adopter[v as usize] = true;
                let (kind, target) = self.share_kind(a);
                self.emit(v, kind, target);
                stalled = 0;
            } else {
                stalled += 1;
            }
        }
    }
}

/// Runs the cascade process for every requested meme. Memes are
/// independent: each draws its state from a seed derived per meme, so the
/// batch is reproducible and order-insensitive.
pub fn generate_cascades(
    net: &Network,
    assignment: &CommunityAssignment,
    spec: &CascadeSpec,
) -> Result<Vec<Meme>> {
    spec.validate()?;
    let n = net.node_count();
    if n == 0 {
        return Err(Error::InvalidParameter(
            "cannot run cascades on an empty network".into(),
        ));
    }
    if spec.seed_adopters > n {
        return Err(Error::InvalidParameter(format!(
            "seed_adopters ({}) exceeds node count ({n})",
            spec.seed_adopters
        )));
    }
    // Same-community neighbor lists, from the ground-truth assignment.
    let mut intra_neighbors: Vec<Vec<NodeId>> = vec![Vec::new(); n];
    for v in net.node_ids() {
        let mut intra: Vec<NodeId> = net
            .neighbors(v)?
            .iter()
            .copied()
            .filter(|&w| assignment.shares_community(v, w))
            .collect();
        intra.sort_unstable();
        intra_neighbors[v as usize] = intra;
    }
    if n < spec.seed_adopters {
        return Err(Error::InvalidParameter(
            "network has fewer nodes than requested seed adopters".into(),
        ));
    }
    let width = spec.meme_count.saturating_sub(1).to_string().len().max(4);
    let mut memes = Vec::with_capacity(spec.meme_count);
    for m in 0..spec.meme_count {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(spec.seed, &format!("meme-{m}")));
        // Per-meme stickiness, log-uniform across the configured range.
        let adopt_prob = if spec.adopt_prob_min == spec.adopt_prob_max {
            spec.adopt_prob_min
        } else if spec.adopt_prob_min == 0.0 {
            // A zero lower bound has no log; fall back to linear.
            rng.gen::<f64>() * spec.adopt_prob_max
        } else {
            let lo = spec.adopt_prob_min.ln();
            let hi = spec.adopt_prob_max.ln();
            (lo + rng.gen::<f64>() * (hi - lo)).exp()
        };
        // Seeds are distinct nodes drawn uniformly from the whole network.
        // A meme whose seeds happen to span several communities starts
        // with intrinsically broad appeal, and the early window sees that
        // spread directly because seed events always precede the rest.
        let mut seeds: Vec<NodeId> = Vec::with_capacity(spec.seed_adopters);
        while seeds.len() < spec.seed_adopters {
            let candidate = rng.gen_range(0..n as NodeId);
            if !seeds.contains(&candidate) {
                seeds.push(candidate);
            }
        }
        let mut run = CascadeRun {
            net,
            intra_neighbors: &intra_neighbors,
            spec,
            rng,
            adopt_prob,
            clock: 0.0,
            events: Vec::new(),
            adopters: Vec::new(),
            is_adopter: vec![false; n],
            exposures: vec![0; n],
        };
        run.run(&seeds);
        let adopters = run
            .adopters
            .iter()
            .map(|&v| net.label(v).expect("adopters exist").to_string())
            .collect();
        memes.push(Meme {
            id: format!("m{m:0width$}"),
            events: run.events,
            adopters,
        });
    }
    Ok(memes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cascade::{parse_events, write_events};
    use crate::features::{basic_features, community_features, UnreachablePolicy};

    fn tiny_spec() -> PlantedPartitionSpec {
        PlantedPartitionSpec {
            communities: 4,
            community_size: 25,
            p_in: 0.3,
            p_out: 0.01,
            seed: 9,
        }
    }

    #[test]
    fn full_intra_no_inter_gives_disjoint_cliques() {
        let spec = PlantedPartitionSpec {
            communities: 3,
            community_size: 5,
            p_in: 1.0,
            p_out: 0.0,
            seed: 1,
        };
        let (net, ca) = generate_network(&spec).unwrap();
        assert_eq!(net.node_count(), 15);
        // Each block is a K5: 10 edges, 3 blocks.
        assert_eq!(net.edge_count(), 30);
        assert_eq!(ca.community_count(), 3);
        for v in net.node_ids() {
            assert_eq!(net.degree(v).unwrap(), 4);
            for &w in net.neighbors(v).unwrap() {
                assert!(ca.shares_community(v, w));
            }
        }
    }

    #[test]
    fn equal_probabilities_wipe_out_block_structure() {
        let spec = PlantedPartitionSpec {
            communities: 2,
            community_size: 30,
            p_in: 0.2,
            p_out: 0.2,
            seed: 3,
        };
        let (net, ca) = generate_network(&spec).unwrap();
        // The assignment still reports the planted blocks; the graph just
        // carries no signal about them. Check edge counts in/out agree
        // with a single global probability within a loose band.
        let mut intra = 0usize;
        let mut inter = 0usize;
        for v in net.node_ids() {
            for &w in net.neighbors(v).unwrap() {
                if w > v {
                    if ca.shares_community(v, w) {
                        intra += 1;
                    } else {
                        inter += 1;
                    }
                }
            }
        }
        // 870 intra pairs vs 900 inter pairs at the same probability.
        let intra_rate = intra as f64 / 870.0;
        let inter_rate = inter as f64 / 900.0;
        assert!((intra_rate - inter_rate).abs() < 0.08);
    }

    #[test]
    fn intra_edge_rate_matches_binomial_expectation() {
        let spec = tiny_spec();
        let (net, ca) = generate_network(&spec).unwrap();
        let mut intra = 0usize;
        for v in net.node_ids() {
            for &w in net.neighbors(v).unwrap() {
                if w > v && ca.shares_community(v, w) {
                    intra += 1;
                }
            }
        }
        // 4 blocks × C(25,2) = 1200 intra pairs at p_in = 0.3.
        let pairs = 1200.0;
        let expected = pairs * spec.p_in;
        let sigma = (pairs * spec.p_in * (1.0 - spec.p_in)).sqrt();
        assert!(
            (intra as f64 - expected).abs() <= 3.0 * sigma,
            "intra edges {intra}, expected {expected} ± {}",
            3.0 * sigma
        );
    }

    #[test]
    fn invalid_partition_parameters_are_rejected() {
        let mut s = tiny_spec();
        s.p_out = 0.5; // exceeds p_in
        assert!(generate_network(&s).is_err());
        let mut s = tiny_spec();
        s.p_in = 1.5;
        assert!(generate_network(&s).is_err());
        let mut s = tiny_spec();
        s.communities = 0;
        assert!(generate_network(&s).is_err());
    }

    #[test]
    fn zero_adoption_keeps_only_seed_adopters() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let spec = CascadeSpec {
            meme_count: 20,
            seed_adopters: 3,
            adopt_prob_min: 0.0,
            adopt_prob_max: 0.0,
            reinforcement: 0.0,
            stall_limit: 50,
            seed: 4,
            ..CascadeSpec::default()
        };
        let memes = generate_cascades(&net, &ca, &spec).unwrap();
        assert_eq!(memes.len(), 20);
        for m in &memes {
            assert_eq!(m.adopters.len(), 3, "meme {}", m.id);
        }
    }

    #[test]
    fn full_trap_bias_on_disconnected_blocks_keeps_interactions_intra() {
        let part = PlantedPartitionSpec {
            communities: 3,
            community_size: 12,
            p_in: 0.8,
            p_out: 0.0,
            seed: 6,
        };
        let (net, ca) = generate_network(&part).unwrap();
        let spec = CascadeSpec {
            meme_count: 30,
            trap_bias: 1.0,
            adopt_prob_min: 0.3,
            adopt_prob_max: 0.3,
            retweet_prob: 1.0,
            mention_prob: 0.0,
            max_events: 60,
            seed: 7,
            ..CascadeSpec::default()
        };
        let memes = generate_cascades(&net, &ca, &spec).unwrap();
        for m in &memes {
            if m.events.len() < 4 {
                continue;
            }
            let w = crate::cascade::early_window(m, 4).unwrap();
            let (f7, _, _, f10, _) = community_features(&w, &net, &ca);
            if let Some(frac) = f10 {
                assert_eq!(frac, 1.0, "meme {}", m.id);
            }
            assert_eq!(f7, 1, "meme {}", m.id);
        }
    }

    #[test]
    fn low_trap_bias_spreads_adopters_across_more_communities() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let base = CascadeSpec {
            meme_count: 500,
            adopt_prob_min: 0.2,
            adopt_prob_max: 0.2,
            max_events: 40,
            stall_limit: 200,
            seed: 13,
            ..CascadeSpec::default()
        };
        let mean_adopter_entropy = |bias: f64| -> f64 {
            let spec = CascadeSpec {
                trap_bias: bias,
                ..base.clone()
            };
            let memes = generate_cascades(&net, &ca, &spec).unwrap();
            let mut total = 0.0;
            let mut counted = 0usize;
            for m in &memes {
                if m.events.len() < 10 {
                    continue;
                }
                let w = crate::cascade::early_window(m, 10).unwrap();
                total += community_features(&w, &net, &ca).2;
                counted += 1;
            }
            assert!(counted > 300, "only {counted} memes reached 10 events");
            total / counted as f64
        };
        let low_bias = mean_adopter_entropy(0.0);
        let high_bias = mean_adopter_entropy(0.95);
        assert!(
            low_bias > high_bias,
            "entropy under no trapping ({low_bias}) should exceed strong trapping ({high_bias})"
        );
    }

    #[test]
    fn repeat_shares_let_tweet_counts_exceed_adopter_counts() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let spec = CascadeSpec {
            meme_count: 50,
            adopt_prob_min: 0.3,
            adopt_prob_max: 0.3,
            repeat_prob: 0.3,
            max_events: 120,
            seed: 21,
            ..CascadeSpec::default()
        };
        let memes = generate_cascades(&net, &ca, &spec).unwrap();
        let with_repeats = memes
            .iter()
            .filter(|m| m.events.len() > m.adopters.len())
            .count();
        assert!(with_repeats > 25, "only {with_repeats} memes had repeats");
    }

    #[test]
    fn popularity_spread_spans_an_order_of_magnitude() {
        let part = PlantedPartitionSpec {
            communities: 4,
            community_size: 100,
            p_in: 0.08,
            p_out: 0.004,
            seed: 2,
        };
        let (net, ca) = generate_network(&part).unwrap();
        let spec = CascadeSpec {
            meme_count: 300,
            max_events: 2000,
            ..CascadeSpec::default()
        };
        let memes = generate_cascades(&net, &ca, &spec).unwrap();
        let mut sizes: Vec<usize> = memes.iter().map(|m| m.events.len()).collect();
        sizes.sort_unstable();
        let median = sizes[sizes.len() / 2];
        let max = *sizes.last().unwrap();
        assert!(
            max as f64 / median as f64 > 10.0,
            "max {max} vs median {median}"
        );
    }

    #[test]
    fn generated_logs_round_trip_through_the_parser() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let spec = CascadeSpec {
            meme_count: 40,
            max_events: 80,
            seed: 30,
            ..CascadeSpec::default()
        };
        let memes = generate_cascades(&net, &ca, &spec).unwrap();
        let mut buf = Vec::new();
        write_events(&memes, &mut buf).unwrap();
        let parsed = parse_events(buf.as_slice()).unwrap();
        assert_eq!(parsed.len(), memes.len());
        for (a, b) in memes.iter().zip(&parsed) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.events, b.events);
            assert_eq!(a.adopters, b.adopters);
        }
    }

    #[test]
    fn same_seed_reproduces_the_batch_exactly() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let spec = CascadeSpec {
            meme_count: 25,
            seed: 77,
            ..CascadeSpec::default()
        };
        let a = generate_cascades(&net, &ca, &spec).unwrap();
        let b = generate_cascades(&net, &ca, &spec).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_events(&a, &mut buf_a).unwrap();
        write_events(&b, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn timestamps_never_decrease_within_a_meme() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let spec = CascadeSpec {
            meme_count: 30,
            max_events: 100,
            seed: 41,
            ..CascadeSpec::default()
        };
        for m in generate_cascades(&net, &ca, &spec).unwrap() {
            for pair in m.events.windows(2) {
                assert!(pair[0].timestamp <= pair[1].timestamp, "meme {}", m.id);
            }
            let w = crate::cascade::early_window(&m, m.events.len().min(5));
            if let Ok(w) = w {
                // Windows taken from generated memes feed the feature
                // extractor without errors.
                let _ = basic_features(&w, &net);
                let _ = crate::features::extract_all(
                    &w,
                    &net,
                    &ca,
                    UnreachablePolicy::ConstantBeyondMax,
                );
            }
        }
    }

    #[test]
    fn invalid_cascade_parameters_are_rejected() {
        let (net, ca) = generate_network(&tiny_spec()).unwrap();
        let bad_trap = CascadeSpec {
            trap_bias: 1.5,
            ..CascadeSpec::default()
        };
        assert!(generate_cascades(&net, &ca, &bad_trap).is_err());
        let bad_range = CascadeSpec {
            adopt_prob_min: 0.5,
            adopt_prob_max: 0.1,
            ..CascadeSpec::default()
        };
        assert!(generate_cascades(&net, &ca, &bad_range).is_err());
        let bad_mix = CascadeSpec {
            retweet_prob: 0.8,
            mention_prob: 0.4,
            ..CascadeSpec::default()
        };
        assert!(generate_cascades(&net, &ca, &bad_mix).is_err());
        let bad_seeds = CascadeSpec {
            seed_adopters: 0,
            ..CascadeSpec::default()
        };
        assert!(generate_cascades(&net, &ca, &bad_seeds).is_err());
    }
}
