//! Shared helpers for the integration suites: deliberately naive reference
//! implementations that the optimized library code is checked against, plus
//! small graph generators. Everything here trades speed for obviousness —
//! dense matrices, cubic loops, no early exits — so that a disagreement
//! with the library points at the library.

#![allow(dead_code)]

use memecast::graph::{Network, NetworkBuilder, NodeId};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Node label used by the generated test graphs.
pub fn node_label(i: usize) -> String {
    format!("v{i:03}")
}

/// Erdős–Rényi graph on `nodes` labeled nodes: every unordered pair gets an
/// edge independently with probability `edge_prob`. Isolated nodes stay in
/// the network (the builder registers every node up front).
pub fn random_network(nodes: usize, edge_prob: f64, seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut builder = NetworkBuilder::new();
    for i in 0..nodes {
        builder.ensure_node(&node_label(i));
    }
    for i in 0..nodes {
        for j in (i + 1)..nodes {
            if rng.gen::<f64>() < edge_prob {
                builder
                    .add_edge(&node_label(i), &node_label(j))
                    .expect("labels are distinct");
            }
        }
    }
    builder.build()
}

/// All-pairs shortest paths by Floyd–Warshall. `None` = unreachable.
/// O(n³), fine for the ≤ 50-node graphs the oracle suite uses.
pub fn floyd_warshall(net: &Network) -> Vec<Vec<Option<u32>>> {
    let n = net.node_count();
    let mut dist: Vec<Vec<Option<u32>>> = vec![vec![None; n]; n];
    for v in 0..n {
        dist[v][v] = Some(0);
        for &w in net.neighbors(v as NodeId).expect("id in range") {
            dist[v][w as usize] = Some(1);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let Some(ik) = dist[i][k] else { continue };
            for j in 0..n {
                let Some(kj) = dist[k][j] else { continue };
                let through = ik + kj;
                if dist[i][j].is_none_or(|d| through < d) {
                    dist[i][j] = Some(through);
                }
            }
        }
    }
    dist
}

/// Largest finite pairwise distance in a Floyd–Warshall table.
pub fn table_diameter(dist: &[Vec<Option<u32>>]) -> u32 {
    dist.iter()
        .flatten()
        .filter_map(|d| *d)
        .max()
        .unwrap_or(0)
}

/// Brute-force k-hop audience of a seed set: every non-seed node whose
/// distance to the nearest seed (per the Floyd–Warshall table) is ≤ k.
pub fn brute_surface(
    dist: &[Vec<Option<u32>>],
    seeds: &[NodeId],
    k: u32,
) -> Vec<NodeId> {
    let n = dist.len();
    let mut out: Vec<NodeId> = (0..n as NodeId)
        .filter(|v| !seeds.contains(v))
        .filter(|&v| {
            seeds
                .iter()
                .filter_map(|&s| dist[s as usize][v as usize])
                .min()
                .is_some_and(|d| d <= k)
        })
        .collect();
    out.sort_unstable();
    out
}

/// PageRank by dense power iteration: builds the full n×n column-stochastic
/// transition matrix (degree-zero columns spread uniformly) and iterates a
/// fixed, generous number of times. Independent of the library's sparse
/// update loop.
pub fn dense_pagerank(net: &Network, damping: f64, iterations: usize) -> Vec<f64> {
    let n = net.node_count();
    if n == 0 {
        return Vec::new();
    }
    let uniform = 1.0 / n as f64;
    // matrix[v][u] = probability of stepping from u to v.
    let mut matrix = vec![vec![0.0f64; n]; n];
    for u in 0..n {
        let neighbors = net.neighbors(u as NodeId).expect("id in range");
        if neighbors.is_empty() {
            for row in matrix.iter_mut() {
                row[u] = uniform;
            }
        } else {
            let share = 1.0 / neighbors.len() as f64;
            for &v in neighbors {
                matrix[v as usize][u] = share;
            }
        }
    }
    let mut scores = vec![uniform; n];
    for _ in 0..iterations {
        let mut next = vec![0.0f64; n];
        for v in 0..n {
            let mut acc = 0.0;
            for u in 0..n {
                acc += matrix[v][u] * scores[u];
            }
            next[v] = (1.0 - damping) * uniform + damping * acc;
        }
        scores = next;
    }
    scores
}

/// Least squares with an intercept by Householder QR on the augmented
/// design matrix [X | 1]. Returns (coefficients, intercept). Requires a
/// full-column-rank, overdetermined system — the test data guarantees it.
pub fn qr_lstsq(x_rows: &[Vec<f64>], y: &[f64]) -> (Vec<f64>, f64) {
    let m = x_rows.len();
    let d = x_rows[0].len();
    let cols = d + 1;
    assert!(m > cols, "oracle needs an overdetermined system");
    // a[r][c], last column all ones for the intercept.
    let mut a: Vec<Vec<f64>> = x_rows
        .iter()
        .map(|row| {
            let mut r = row.clone();
            r.push(1.0);
            r
        })
        .collect();
    let mut rhs = y.to_vec();
    for c in 0..cols {
        // Householder vector for column c of the trailing submatrix.
        let norm: f64 = (c..m).map(|r| a[r][c] * a[r][c]).sum::<f64>().sqrt();
        assert!(norm > 1e-12, "oracle given a rank-deficient system");
        let alpha = if a[c][c] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (c..m).map(|r| a[r][c]).collect();
        v[0] -= alpha;
        let v_norm_sq: f64 = v.iter().map(|x| x * x).sum();
        if v_norm_sq > 0.0 {
            for col in c..cols {
                let dot: f64 = (c..m).map(|r| v[r - c] * a[r][col]).sum();
                let scale = 2.0 * dot / v_norm_sq;
                for r in c..m {
                    a[r][col] -= scale * v[r - c];
                }
            }
            let dot: f64 = (c..m).map(|r| v[r - c] * rhs[r]).sum();
            let scale = 2.0 * dot / v_norm_sq;
            for r in c..m {
                rhs[r] -= scale * v[r - c];
            }
        }
        a[c][c] = alpha;
    }
    // Back-substitute R·β = Qᵀy (upper triangle of a, transformed rhs).
    let mut beta = vec![0.0f64; cols];
    for c in (0..cols).rev() {
        let mut acc = rhs[c];
        for k in (c + 1)..cols {
            acc -= a[c][k] * beta[k];
        }
        beta[c] = acc / a[c][c];
    }
    let intercept = beta.pop().expect("cols >= 1");
    (beta, intercept)
}

/// Per-class precision, recall, and F1 by direct pair counting, with the
/// same zero-denominator convention the library documents (empty quotient
/// = 0). Independent of any confusion-matrix bookkeeping.
pub fn brute_prf(predicted: &[u32], actual: &[u32], class: u32) -> (f64, f64, f64) {
    assert_eq!(predicted.len(), actual.len());
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p == class, a == class) {
            (true, true) => tp += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
            (false, false) => {}
        }
    }
    let precision = if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Confusion counts by direct pair counting: `(classes, matrix)` with
/// `matrix[actual_index][predicted_index]` over the sorted distinct classes.
pub fn brute_confusion(predicted: &[u32], actual: &[u32]) -> (Vec<u32>, Vec<Vec<usize>>) {
    assert_eq!(predicted.len(), actual.len());
    let mut classes: Vec<u32> = predicted.iter().chain(actual).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let at = |c: u32| classes.iter().position(|&x| x == c).expect("collected above");
    let mut matrix = vec![vec![0usize; classes.len()]; classes.len()];
    for (&p, &a) in predicted.iter().zip(actual) {
        matrix[at(a)][at(p)] += 1;
    }
    (classes, matrix)
}
