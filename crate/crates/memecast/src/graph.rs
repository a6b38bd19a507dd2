//! Undirected social network with BFS distances, k-th surfaces, and PageRank.
//!
//! The network is immutable once built. Nodes carry external string labels at
//! the I/O boundary and dense `u32` ids everywhere else, assigned in
//! first-seen order.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use crate::error::{Error, Result};

/// Dense node identifier, valid for one `Network`.
pub type NodeId = u32;

/// Hop count between two nodes, or `Unreachable` when no path exists.
///
/// Ordering puts every finite distance below `Unreachable`, so `max()` over
/// mixed values behaves sensibly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Distance {
    Finite(u32),
    Unreachable,
}

impl Distance {
    pub fn is_finite(self) -> bool {
        matches!(self, Distance::Finite(_))
    }

    /// The hop count, or `None` when unreachable.
    pub fn finite(self) -> Option<u32> {
        match self {
            Distance::Finite(d) => Some(d),
            Distance::Unreachable => None,
        }
    }
}

/// Incrementally assembles a `Network`; labels get dense ids in first-seen order.
#[derive(Debug, Default)]
pub struct NetworkBuilder {
    adjacency: Vec<Vec<NodeId>>,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NetworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the dense id for `label`, creating an isolated node if unseen.
    pub fn ensure_node(&mut self, label: &str) -> NodeId {
        match self.index.entry(label.to_string()) {
            Entry::Occupied(e) => *e.get(),
            Entry::Vacant(e) => {
                let id = self.labels.len() as NodeId;
                self.labels.push(label.to_string());
                self.adjacency.push(Vec::new());
                e.insert(id);
                id
            }
        }
    }

    /// Adds an undirected edge between two labels. Duplicate edges are
    /// tolerated and removed in `build`; self-loops are an error.
    pub fn add_edge(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::InvalidParameter(format!("self-loop on {a:?}")));
        }
        let u = self.ensure_node(a);
        let v = self.ensure_node(b);
        self.adjacency[u as usize].push(v);
        self.adjacency[v as usize].push(u);
        Ok(())
    }

    pub fn build(mut self) -> Network {
        for list in &mut self.adjacency {
            list.sort_unstable();
            list.dedup();
        }
        Network {
            adjacency: self.adjacency,
            labels: self.labels,
            index: self.index,
        }
    }
}

/// Immutable undirected graph over dense node ids.
///
/// Invariants: adjacency is symmetric and deduplicated, no self-loops, and
/// every id maps to exactly one external label. Safe to share across threads.
#[derive(Debug, Clone)]
pub struct Network {
    adjacency: Vec<Vec<NodeId>>,
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

/// Reads an edge list: one edge per line, two whitespace-separated labels.
/// A line with a single label declares a node with no edges, so the file
/// can carry the full node universe even when some members never link.
/// Blank lines and `#`-prefixed comment lines are ignored.
pub fn load_network(reader: impl BufRead) -> Result<Network> {
    let mut builder = NetworkBuilder::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let line_number = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let (a, b) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), None) => (a, b),
            (Some(a), None, None) => {
                builder.ensure_node(a);
                continue;
            }
            _ => {
                return Err(Error::Parse {
                    line: line_number,
                    message: format!("expected one or two node labels, got {trimmed:?}"),
                })
            }
        };
        if a == b {
            return Err(Error::Parse {
                line: line_number,
                message: format!("self-loop on {a:?}"),
            });
        }
        builder.add_edge(a, b)?;
    }
    Ok(builder.build())
}

impl Network {
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn neighbors(&self, u: NodeId) -> Result<&[NodeId]> {
        self.adjacency
            .get(u as usize)
            .map(Vec::as_slice)
            .ok_or(Error::InvalidNode {
                id: u,
                count: self.node_count(),
            })
    }

    pub fn degree(&self, u: NodeId) -> Result<usize> {
        Ok(self.neighbors(u)?.len())
    }

    /// Dense id for an external label, if present.
    pub fn resolve(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    /// External label for a dense id.
    pub fn label(&self, u: NodeId) -> Option<&str> {
        self.labels.get(u as usize).map(String::as_str)
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> {
        0..self.node_count() as NodeId
    }

    fn check(&self, u: NodeId) -> Result<()> {
        if (u as usize) < self.node_count() {
            Ok(())
        } else {
            Err(Error::InvalidNode {
                id: u,
                count: self.node_count(),
            })
        }
    }

    /// BFS hop count between two nodes.
    pub fn shortest_path_length(&self, u: NodeId, v: NodeId) -> Result<Distance> {
        self.check(u)?;
        self.check(v)?;
        if u == v {
            return Ok(Distance::Finite(0));
        }
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::new();
        seen[u as usize] = true;
        queue.push_back((u, 0u32));
        while let Some((node, depth)) = queue.pop_front() {
            for &next in &self.adjacency[node as usize] {
                if next == v {
                    return Ok(Distance::Finite(depth + 1));
                }
                if !seen[next as usize] {
                    seen[next as usize] = true;
                    queue.push_back((next, depth + 1));
                }
            }
        }
        Ok(Distance::Unreachable)
    }

    /// BFS distances from `u` to every node.
    pub fn distances_from(&self, u: NodeId) -> Result<Vec<Distance>> {
        self.check(u)?;
        let mut dist = vec![Distance::Unreachable; self.node_count()];
        dist[u as usize] = Distance::Finite(0);
        let mut queue = VecDeque::new();
        queue.push_back(u);
        while let Some(node) = queue.pop_front() {
            let d = match dist[node as usize] {
                Distance::Finite(d) => d,
                Distance::Unreachable => unreachable!(),
            };
            for &next in &self.adjacency[node as usize] {
                if dist[next as usize] == Distance::Unreachable {
                    dist[next as usize] = Distance::Finite(d + 1);
                    queue.push_back(next);
                }
            }
        }
        Ok(dist)
    }

    /// All nodes within `k` hops of the seed set, excluding the seeds
    /// themselves — the still-uninfected potential audience. Returned sorted.
    pub fn surface(&self, seeds: &[NodeId], k: u32) -> Result<Vec<NodeId>> {
        if k < 1 {
            return Err(Error::InvalidParameter("surface order must be >= 1".into()));
        }
        for &s in seeds {
            self.check(s)?;
        }
        let mut depth = vec![u32::MAX; self.node_count()];
        let mut queue = VecDeque::new();
        for &s in seeds {
            if depth[s as usize] == u32::MAX {
                depth[s as usize] = 0;
                queue.push_back(s);
            }
        }
        let mut out = Vec::new();
        while let Some(node) = queue.pop_front() {
            let d = depth[node as usize];
            if d == k {
                continue;
            }
            for &next in &self.adjacency[node as usize] {
                if depth[next as usize] == u32::MAX {
                    depth[next as usize] = d + 1;
                    out.push(next);
                    queue.push_back(next);
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// PageRank by power iteration with uniform teleport. Degree-zero nodes
    /// spread their mass uniformly. Scores sum to 1.
    pub fn pagerank(&self, damping: f64, tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        if !(0.0 < damping && damping < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "damping must lie in (0,1), got {damping}"
            )));
        }
        if tol <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "tolerance must be positive, got {tol}"
            )));
        }
        let n = self.node_count();
        if n == 0 {
            return Ok(Vec::new());
        }
        let uniform = 1.0 / n as f64;
        let mut scores = vec![uniform; n];
        let mut next = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..max_iter {
            let dangling: f64 = self
                .adjacency
                .iter()
                .zip(&scores)
                .filter(|(adj, _)| adj.is_empty())
                .map(|(_, s)| s)
                .sum();
            let base = (1.0 - damping) * uniform + damping * dangling * uniform;
            next.iter_mut().for_each(|x| *x = base);
            for (u, adj) in self.adjacency.iter().enumerate() {
                if adj.is_empty() {
                    continue;
                }
                let share = damping * scores[u] / adj.len() as f64;
                for &v in adj {
                    next[v as usize] += share;
                }
            }
            residual = scores
                .iter()
                .zip(&next)
                .map(|(a, b)| (a - b).abs())
                .sum();
            std::mem::swap(&mut scores, &mut next);
            if residual < tol {
                return Ok(scores);
            }
        }
        Err(Error::NoConvergence {
            iterations: max_iter,
            residual,
        })
    }
}

/// Default PageRank damping factor.
pub const PAGERANK_DAMPING: f64 = 0.85;
/// Default PageRank convergence tolerance (L1 change per iteration).
pub const PAGERANK_TOL: f64 = 1e-10;
/// Default PageRank iteration cap.
pub const PAGERANK_MAX_ITER: usize = 200;

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn net(edges: &[(&str, &str)]) -> Network {
        let mut b = NetworkBuilder::new();
        for (a, c) in edges {
            b.add_edge(a, c).unwrap();
        }
        b.build()
    }

    #[test]
    fn load_deduplicates_reciprocal_pairs() {
        let n = load_network(Cursor::new("a b\nb a\nb c\n")).unwrap();
        assert_eq!(n.node_count(), 3);
        assert_eq!(n.edge_count(), 2);
    }

    #[test]
    fn load_empty_stream() {
        let n = load_network(Cursor::new("")).unwrap();
        assert_eq!(n.node_count(), 0);
        assert_eq!(n.edge_count(), 0);
    }

    #[test]
    fn load_rejects_self_loop_with_line_number() {
        let err = load_network(Cursor::new("a a\n")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_accepts_bare_labels_as_isolated_nodes() {
        let n = load_network(Cursor::new("a b\nloner\n")).unwrap();
        assert_eq!(n.node_count(), 3);
        assert_eq!(n.edge_count(), 1);
        let loner = n.resolve("loner").unwrap();
        assert!(n.neighbors(loner).unwrap().is_empty());
    }

    #[test]
    fn load_rejects_malformed_line() {
        let err = load_network(Cursor::new("a b\nx y z\n")).unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn load_skips_comments_and_blank_lines() {
        let n = load_network(Cursor::new("# header\n\na b\n")).unwrap();
        assert_eq!(n.node_count(), 2);
        assert_eq!(n.edge_count(), 1);
    }

    #[test]
    fn first_seen_order_is_stable() {
        let n = load_network(Cursor::new("b a\na c\n")).unwrap();
        assert_eq!(n.resolve("b"), Some(0));
        assert_eq!(n.resolve("a"), Some(1));
        assert_eq!(n.resolve("c"), Some(2));
        assert_eq!(n.label(0), Some("b"));
    }

    #[test]
    fn path_distances() {
        let n = net(&[("a", "b"), ("b", "c")]);
        let a = n.resolve("a").unwrap();
        let c = n.resolve("c").unwrap();
        assert_eq!(n.shortest_path_length(a, c).unwrap(), Distance::Finite(2));
        assert_eq!(n.shortest_path_length(a, a).unwrap(), Distance::Finite(0));
    }

    #[test]
    fn distance_across_components_is_unreachable() {
        let n = net(&[("a", "b"), ("c", "d")]);
        let a = n.resolve("a").unwrap();
        let d = n.resolve("d").unwrap();
        assert_eq!(n.shortest_path_length(a, d).unwrap(), Distance::Unreachable);
    }

    #[test]
    fn invalid_id_is_a_domain_error() {
        let n = net(&[("a", "b")]);
        assert!(matches!(
            n.shortest_path_length(0, 99),
            Err(Error::InvalidNode { id: 99, .. })
        ));
        assert!(matches!(n.surface(&[7], 1), Err(Error::InvalidNode { .. })));
    }

    #[test]
    fn star_surfaces() {
        let n = net(&[("c", "l1"), ("c", "l2"), ("c", "l3"), ("c", "l4")]);
        let c = n.resolve("c").unwrap();
        let l1 = n.resolve("l1").unwrap();
        assert_eq!(n.surface(&[c], 1).unwrap().len(), 4);
        assert_eq!(n.surface(&[l1], 1).unwrap(), vec![c]);
        assert_eq!(n.surface(&[l1], 2).unwrap().len(), 4);
    }

    #[test]
    fn surface_of_everything_is_empty() {
        let n = net(&[("a", "b"), ("b", "c")]);
        let all: Vec<NodeId> = n.node_ids().collect();
        assert!(n.surface(&all, 1).unwrap().is_empty());
    }

    #[test]
    fn surface_excludes_seeds_even_when_adjacent() {
        let n = net(&[("a", "b"), ("b", "c")]);
        let a = n.resolve("a").unwrap();
        let b = n.resolve("b").unwrap();
        let c = n.resolve("c").unwrap();
        // a and b are both seeds and mutual neighbors; only c is uninfected.
        assert_eq!(n.surface(&[a, b], 1).unwrap(), vec![c]);
    }

    #[test]
    fn pagerank_two_nodes_symmetric() {
        let n = net(&[("a", "b")]);
        let pr = n.pagerank(0.85, 1e-12, 200).unwrap();
        assert!((pr[0] - 0.5).abs() < 1e-9);
        assert!((pr[1] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn pagerank_sums_to_one_with_dangling_nodes() {
        let mut b = NetworkBuilder::new();
        b.add_edge("a", "b").unwrap();
        b.ensure_node("isolated");
        let n = b.build();
        let pr = n.pagerank(0.85, 1e-12, 200).unwrap();
        let total: f64 = pr.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        assert!(pr.iter().all(|&s| s > 0.0));
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let n = net(&[("a", "b"), ("b", "c")]);
        let err = n.pagerank(0.85, 1e-15, 2).unwrap_err();
        match err {
            Error::NoConvergence { residual, .. } => assert!(residual > 0.0),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn pagerank_rejects_bad_parameters() {
        let n = net(&[("a", "b")]);
        assert!(n.pagerank(1.0, 1e-8, 10).is_err());
        assert!(n.pagerank(0.85, 0.0, 10).is_err());
    }

    #[test]
    fn distance_ordering_puts_unreachable_last() {
        assert!(Distance::Finite(1_000_000) < Distance::Unreachable);
        assert_eq!(
            [Distance::Finite(2), Distance::Unreachable, Distance::Finite(5)]
                .iter()
                .max(),
            Some(&Distance::Unreachable)
        );
    }
}
