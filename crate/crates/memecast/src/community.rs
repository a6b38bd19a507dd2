//! Community assignments: file ingestion, a built-in label-propagation
//! detector, and membership queries for feature extraction.
//!
//! Assignments may overlap (one node in several communities) or be disjoint.
//! Communities smaller than the minimum size are dropped at load time, and a
//! node is allowed to end up in no community at all.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Network, NodeId};

/// Dense community identifier, valid for one `CommunityAssignment`.
pub type CommunityId = u32;

/// Minimum community size kept by default.
pub const DEFAULT_MIN_COMMUNITY_SIZE: usize = 3;

/// Node-to-communities mapping with the size filter already applied.
///
/// Immutable after construction; membership lookups are O(1) into a
/// per-node sorted id list.
#[derive(Debug, Clone)]
pub struct CommunityAssignment {
    /// For each dense node id, the sorted communities it belongs to.
    membership: Vec<Vec<CommunityId>>,
    /// Member count per retained community.
    sizes: Vec<usize>,
    /// External labels of retained communities, for round-tripping files.
    labels: Vec<String>,
    /// Fraction of network nodes with at least one retained community.
    coverage: f64,
}

impl CommunityAssignment {
    /// Communities of a node (empty slice when unassigned or id out of range).
    pub fn communities_of(&self, node: NodeId) -> &[CommunityId] {
        self.membership
            .get(node as usize)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn is_assigned(&self, node: NodeId) -> bool {
        !self.communities_of(node).is_empty()
    }

    /// True when the two nodes share at least one community.
    pub fn shares_community(&self, a: NodeId, b: NodeId) -> bool {
        let (xs, ys) = (self.communities_of(a), self.communities_of(b));
        let (mut i, mut j) = (0, 0);
        while i < xs.len() && j < ys.len() {
            match xs[i].cmp(&ys[j]) {
                std::cmp::Ordering::Equal => return true,
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
            }
        }
        false
    }

    /// Number of retained communities.
    pub fn community_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sizes.is_empty()
    }

    /// Member count of a retained community.
    pub fn size(&self, c: CommunityId) -> Option<usize> {
        self.sizes.get(c as usize).copied()
    }

    /// External label of a retained community.
    pub fn community_label(&self, c: CommunityId) -> Option<&str> {
        self.labels.get(c as usize).map(String::as_str)
    }

    /// Fraction of network nodes belonging to at least one retained community.
    pub fn coverage(&self) -> f64 {
        self.coverage
    }

    /// Writes `node_label<TAB>community_label` lines, one per membership.
    pub fn write_export(&self, net: &Network, mut w: impl Write) -> Result<()> {
        for node in net.node_ids() {
            for &c in self.communities_of(node) {
                writeln!(
                    w,
                    "{}\t{}",
                    net.label(node).unwrap_or(""),
                    self.community_label(c).unwrap_or("")
                )?;
            }
        }
        Ok(())
    }

    /// Builds the final assignment from raw per-community member lists keyed
    /// by external label, applying the minimum-size filter.
    pub(crate) fn from_members(
        node_count: usize,
        raw: Vec<(String, Vec<NodeId>)>,
        min_size: usize,
    ) -> CommunityAssignment {
        let mut membership: Vec<Vec<CommunityId>> = vec![Vec::new(); node_count];
        let mut sizes = Vec::new();
        let mut labels = Vec::new();
        for (label, mut members) in raw {
            members.sort_unstable();
            members.dedup();
            if members.len() < min_size {
                continue;
            }
            let id = sizes.len() as CommunityId;
            sizes.push(members.len());
            labels.push(label);
            for m in members {
                membership[m as usize].push(id);
            }
        }
        for list in &mut membership {
            list.sort_unstable();
        }
        let covered = membership.iter().filter(|m| !m.is_empty()).count();
        let coverage = if node_count == 0 {
            0.0
        } else {
            covered as f64 / node_count as f64
        };
        CommunityAssignment {
            membership,
            sizes,
            labels,
            coverage,
        }
    }
}

/// Reads `node_label<TAB>community_id` lines and applies the size filter.
/// Multiple lines per node are allowed, producing overlapping membership.
/// Ending up with zero retained communities is legal; callers may warn.
pub fn load_assignments(
    reader: impl BufRead,
    net: &Network,
    min_size: usize,
) -> Result<CommunityAssignment> {
    if min_size < 1 {
        return Err(Error::InvalidParameter("min_size must be >= 1".into()));
    }
    let mut order: Vec<String> = Vec::new();
    let mut members: HashMap<String, Vec<NodeId>> = HashMap::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = lineno + 1;
        let trimmed = line.trim_end_matches(['\n', '\r']);
        if trimmed.trim().is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split('\t');
        let (node_label, community) = match (parts.next(), parts.next(), parts.next()) {
            (Some(n), Some(c), None) if !n.is_empty() && !c.is_empty() => (n, c),
            _ => {
                return Err(Error::Parse {
                    line: line_number,
                    message: format!("expected node_label<TAB>community_id, got {trimmed:?}"),
                })
            }
        };
        let node = net.resolve(node_label).ok_or_else(|| Error::UnknownLabel {
            line: line_number,
            label: node_label.to_string(),
        })?;
        members
            .entry(community.to_string())
            .or_insert_with(|| {
                order.push(community.to_string());
                Vec::new()
            })
            .push(node);
    }
    let raw = order
        .into_iter()
        .map(|label| {
            let m = members.remove(&label).unwrap_or_default();
            (label, m)
        })
        .collect();
    Ok(CommunityAssignment::from_members(
        net.node_count(),
        raw,
        min_size,
    ))
}

/// Asynchronous label propagation producing a disjoint assignment.
///
/// Every node starts with its own label; sweeps visit nodes in a
/// seed-derived order and each node adopts the most frequent label among its
/// neighbors, ties going to the lowest label. Low-degree nodes are visited
/// first (the seed shuffles equal-degree ties) so that dense neighborhoods
/// consolidate before hubs and bridge endpoints update; with a fully random
/// order, the lowest label can leak across a bridge while both sides still
/// hold all-distinct labels and flood the far side. Stops when a sweep
/// changes nothing or after `max_sweeps`. The size filter is applied at the
/// end, so leftover singletons and pairs disappear. Deterministic given
/// (net, seed).
pub fn detect_label_propagation(
    net: &Network,
    seed: u64,
    max_sweeps: usize,
    min_size: usize,
) -> CommunityAssignment {
    let n = net.node_count();
    let mut labels: Vec<u32> = (0..n as u32).collect();
    let mut order: Vec<NodeId> = (0..n as NodeId).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    order.shuffle(&mut rng);
    order.sort_by_key(|&v| net.degree(v).unwrap_or(0));

    let mut counts: HashMap<u32, usize> = HashMap::new();
    for _ in 0..max_sweeps {
        let mut changed = false;
        for &node in &order {
            let neighbors = net.neighbors(node).expect("id from node range");
            if neighbors.is_empty() {
                continue;
            }
            counts.clear();
            for &nb in neighbors {
                *counts.entry(labels[nb as usize]).or_insert(0) += 1;
            }
            // Highest count wins; ties break toward the lowest label id.
            let best = counts
                .iter()
                .map(|(&label, &count)| (count, std::cmp::Reverse(label)))
                .max()
                .map(|(_, std::cmp::Reverse(label))| label)
                .expect("non-empty neighbor set");
            if labels[node as usize] != best {
                labels[node as usize] = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    let mut groups: HashMap<u32, Vec<NodeId>> = HashMap::new();
    for (node, &label) in labels.iter().enumerate() {
        groups.entry(label).or_default().push(node as NodeId);
    }
    let mut keys: Vec<u32> = groups.keys().copied().collect();
    keys.sort_unstable();
    let raw = keys
        .into_iter()
        .enumerate()
        .map(|(i, k)| (i.to_string(), groups.remove(&k).unwrap()))
        .collect();
    CommunityAssignment::from_members(n, raw, min_size)
}
