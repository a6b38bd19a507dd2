//! The five reference predictors the forest is compared against:
//! prior-weighted random guessing, the constant majority class, a linear
//! model over adopter-influence statistics, a log-log regression from
//! early to final popularity, and a multivariate regression on daily
//! early counts. The last three share one ordinary-least-squares core and
//! emit classes by binning their popularity estimate.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{bin_real, modal_label, Model};
use crate::graph::Network;

/// Least-squares linear predictor: ŷ = coefficients·x + intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub coefficients: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                expected: self.coefficients.len(),
                got: x.len(),
            });
        }
        Ok(self
            .coefficients
            .iter()
            .zip(x)
            .map(|(c, v)| c * v)
            .sum::<f64>()
            + self.intercept)
    }
}

/// Fits ŷ = w·x + b by least squares via the normal equations. A singular
/// Gram matrix gets a small ridge term (scaled to the matrix) before
/// giving up. Requires more rows than unknowns.
pub fn fit_ols(x_rows: &[Vec<f64>], y: &[f64]) -> Result<LinearModel> {
    if x_rows.len() != y.len() {
        return Err(Error::LabelLengthMismatch {
            predicted: x_rows.len(),
            actual: y.len(),
        });
    }
    let d = x_rows.first().map(Vec::len).unwrap_or(0);
    if d == 0 {
        return Err(Error::Training("regression needs at least one feature".into()));
    }
    if let Some(bad) = x_rows.iter().find(|r| r.len() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: bad.len(),
        });
    }
    // Unknowns: d coefficients plus the intercept.
    let m = d + 1;
    if x_rows.len() <= m - 1 {
        return Err(Error::Training(format!(
            "need more than {} rows to fit {} coefficients",
            m - 1,
            m
        )));
    }
    // Gram matrix XᵀX and right-hand side Xᵀy with the intercept column
    // of ones appended last.
    let mut gram = vec![vec![0.0f64; m]; m];
    let mut rhs = vec![0.0f64; m];
    for (row, &target) in x_rows.iter().zip(y) {
        for i in 0..m {
            let xi = if i < d { row[i] } else { 1.0 };
            rhs[i] += xi * target;
            for j in i..m {
                let xj = if j < d { row[j] } else { 1.0 };
                gram[i][j] += xi * xj;
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
    }
    let solution = match solve_cholesky(&gram, &rhs) {
        Some(s) => s,
        None => {
            // Ridge fallback: nudge the diagonal in proportion to its
            // average magnitude, enough to make the factorization succeed
            // without visibly moving a well-posed solution.
            let scale: f64 = (0..m).map(|i| gram[i][i]).sum::<f64>() / m as f64;
            let ridge = (scale.max(1.0)) * 1e-8;
            let mut damped = gram.clone();
            for (i, row) in damped.iter_mut().enumerate() {
                row[i] += ridge;
            }
            solve_cholesky(&damped, &rhs).ok_or_else(|| {
                Error::Training("design matrix is degenerate even with ridge damping".into())
            })?
        }
    };
    Ok(LinearModel {
        coefficients: solution[..d].to_vec(),
        intercept: solution[d],
    })
}

/// Solves A·x = b for symmetric positive-definite A by Cholesky
/// factorization; None when A is not positive definite.
fn solve_cholesky(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[i][j];
            for k in 0..j {
                sum -= l[i][k] * l[j][k];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[i][j] = sum.sqrt();
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    // Forward substitution: L·z = b.
    let mut z = vec![0.0f64; n];
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[i][k] * z[k];
        }
        z[i] = sum / l[i][i];
    }
    // Back substitution: Lᵀ·x = z.
    let mut x = vec![0.0f64; n];
    for i in (0..n).rev() {
        let mut sum = z[i];
        for k in (i + 1)..n {
            sum -= l[k][i] * x[k];
        }
        x[i] = sum / l[i][i];
    }
    Some(x)
}

/// Draws classes i.i.d. from the training-set prior distribution.
#[derive(Debug, Clone)]
pub struct RandomGuess {
    classes: Vec<u32>,
    /// Cumulative probabilities aligned to `classes`.
    cumulative: Vec<f64>,
    rng: ChaCha8Rng,
}

impl RandomGuess {
    /// `priors` pairs class ids with probabilities summing to 1 (±1e-9).
    pub fn new(priors: &[(u32, f64)], seed: u64) -> Result<RandomGuess> {
        if priors.is_empty() {
            return Err(Error::Training("empty prior distribution".into()));
        }
        if let Some((c, p)) = priors.iter().find(|(_, p)| *p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "prior for class {c} is {p}, must be a finite non-negative number"
            )));
        }
        let total: f64 = priors.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "priors sum to {total}, expected 1"
            )));
        }
        let mut sorted: Vec<(u32, f64)> = priors.to_vec();
        sorted.sort_by(|a, b| a.0.cmp(&b.0));
        let mut cumulative = Vec::with_capacity(sorted.len());
        let mut acc = 0.0;
        for &(_, p) in &sorted {
            acc += p;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(RandomGuess {
            classes: sorted.into_iter().map(|(c, _)| c).collect(),
            cumulative,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// Builds the prior distribution from observed labels.
    pub fn from_labels(labels: &[u32], seed: u64) -> Result<RandomGuess> {
        if labels.is_empty() {
            return Err(Error::Training("no labels to derive priors from".into()));
        }
        let mut counts: HashMap<u32, usize> = HashMap::new();
        for &l in labels {
            *counts.entry(l).or_insert(0) += 1;
        }
        let mut priors: Vec<(u32, f64)> = counts
            .into_iter()
            .map(|(c, k)| (c, k as f64 / labels.len() as f64))
            .collect();
        priors.sort_by(|a, b| a.0.cmp(&b.0));
        RandomGuess::new(&priors, seed)
    }

    pub fn draw(&mut self) -> u32 {
        let u: f64 = self.rng.gen();
        let idx = self
            .cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.classes.len() - 1);
        self.classes[idx]
    }
}

impl<R> Model<R> for RandomGuess {
    fn predict_one(&mut self, _row: &R) -> u32 {
        self.draw()
    }
}

/// Always predicts the most frequent training class (ties to the smaller
/// class id).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MajorityGuess {
    pub class: u32,
}

impl MajorityGuess {
    pub fn fit(labels: &[u32]) -> Result<MajorityGuess> {
        if labels.is_empty() {
            return Err(Error::Training("no labels to take a majority over".into()));
        }
        Ok(MajorityGuess {
            class: modal_label(labels),
        })
    }
}

impl<R> Model<R> for MajorityGuess {
    fn predict_one(&mut self, _row: &R) -> u32 {
        self.class
    }
}

/// (max, mean, median, cv) of a sample. The coefficient of variation uses
/// the sample standard deviation and is 0 for fewer than two values or a
/// zero mean — a single observation has no dispersion to report.
pub fn spread_stats(values: &[f64]) -> [f64; 4] {
    if values.is_empty() {
        return [0.0; 4];
    }
    let n = values.len();
    let max = values.iter().copied().fold(f64::MIN, f64::max);
    let mean = values.iter().sum::<f64>() / n as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    let cv = if n < 2 || mean == 0.0 {
        0.0
    } else {
        let ss: f64 = values.iter().map(|v| (v - mean) * (v - mean)).sum();
        (ss / (n - 1) as f64).sqrt() / mean
    };
    [max, mean, median, cv]
}

/// The eight adopter-influence statistics: (max, mean, median, cv) of the
/// adopters' PageRank scores, then the same over log10(1 + follower
/// count). Follower counts come from the metadata map when present,
/// otherwise each user's degree in the network stands in.
pub fn influence_features(
    adopters: &[&str],
    net: &Network,
    pagerank: &[f64],
    followers: Option<&HashMap<String, u64>>,
) -> [f64; 8] {
    let mut pr = Vec::with_capacity(adopters.len());
    let mut fol = Vec::with_capacity(adopters.len());
    for &label in adopters {
        let node = net.resolve(label);
        pr.push(node.map_or(0.0, |id| pagerank[id as usize]));
        let count = match followers {
            Some(map) => map.get(label).copied().unwrap_or(0),
            None => node.and_then(|id| net.degree(id).ok()).unwrap_or(0) as u64,
        };
        fol.push((1.0 + count as f64).log10());
    }
    let [pr_max, pr_mean, pr_median, pr_cv] = spread_stats(&pr);
    let [f_max, f_mean, f_median, f_cv] = spread_stats(&fol);
    [pr_max, pr_mean, pr_median, pr_cv, f_max, f_mean, f_median, f_cv]
}

/// A fitted regressor of log10 popularity, classifying by binning its
/// popularity estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionClassifier {
    pub model: LinearModel,
    pub cap: u32,
}

impl RegressionClassifier {
    pub fn classify(&self, x: &[f64]) -> Result<u32> {
        let log_estimate = self.model.predict(x)?;
        Ok(bin_real(10f64.powf(log_estimate), self.cap))
    }
}

/// Influence-based model: regresses log10(final popularity) on the eight
/// adopter-influence statistics.
pub fn influence_model(
    rows: &[Vec<f64>],
    final_popularity: &[u64],
    cap: u32,
) -> Result<RegressionClassifier> {
    let y = log_targets(final_popularity)?;
    Ok(RegressionClassifier {
        model: fit_ols(rows, &y)?,
        cap,
    })
}

/// Log-log growth model: log10|T| = α·log10|T at horizon| + β. Memes with
/// zero early popularity cannot enter the log and are skipped; their count
/// is returned so callers can surface a warning.
pub fn log_log_model(
    early_popularity: &[u64],
    final_popularity: &[u64],
    cap: u32,
) -> Result<(RegressionClassifier, usize)> {
    if early_popularity.len() != final_popularity.len() {
        return Err(Error::LabelLengthMismatch {
            predicted: early_popularity.len(),
            actual: final_popularity.len(),
        });
    }
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut skipped = 0;
    for (&e, &f) in early_popularity.iter().zip(final_popularity) {
        if e == 0 {
            skipped += 1;
            continue;
        }
        x.push(vec![(e as f64).log10()]);
        y.push((f as f64).log10());
    }
    Ok((
        RegressionClassifier {
            model: fit_ols(&x, &y)?,
            cap,
        },
        skipped,
    ))
}

/// Daily-counts model: regresses log10|T| on the per-day early counts,
/// each entered as log10(1 + count).
pub fn daily_counts_model(
    daily_counts: &[Vec<u64>],
    final_popularity: &[u64],
    cap: u32,
) -> Result<RegressionClassifier> {
    let y = log_targets(final_popularity)?;
    let rows: Vec<Vec<f64>> = daily_counts
        .iter()
        .map(|d| d.iter().map(|&c| (1.0 + c as f64).log10()).collect())
        .collect();
    Ok(RegressionClassifier {
        model: fit_ols(&rows, &y)?,
        cap,
    })
}

/// The per-day log10(1+count) row a daily-counts model consumes.
pub fn daily_log_row(counts: &[u64]) -> Vec<f64> {
    counts.iter().map(|&c| (1.0 + c as f64).log10()).collect()
}

fn log_targets(popularity: &[u64]) -> Result<Vec<f64>> {
    popularity
        .iter()
        .map(|&p| {
            if p < 1 {
                Err(Error::InvalidParameter(
                    "popularity must be at least 1 for a log target".into(),
                ))
            } else {
                Ok((p as f64).log10())
            }
        })
        .collect()
}
