//! Popularity classes, per-class precision/recall/F1, and stratified
//! k-fold cross-validation.
//!
//! A meme's class is the order of magnitude of its final popularity:
//! class k covers counts in (10^(k−1.5), 10^(k−0.5)], so 1–3 is class 1,
//! 4–31 class 2, 32–316 class 3, and so on, with everything at or above a
//! configured cap merged into the cap class.

use std::collections::HashMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default merge point: classes 4 and up collapse into "≥ 4".
pub const DEFAULT_CLASS_CAP: u32 = 4;

/// Number of cross-validation folds used throughout.
pub const DEFAULT_FOLDS: usize = 10;

/// Which count a popularity class is computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Tweets,
    Adopters,
}

impl std::fmt::Display for Basis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Basis::Tweets => write!(f, "tweets"),
            Basis::Adopters => write!(f, "adopters"),
        }
    }
}

impl std::str::FromStr for Basis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Basis> {
        match s {
            "tweets" => Ok(Basis::Tweets),
            "adopters" => Ok(Basis::Adopters),
            other => Err(Error::InvalidParameter(format!(
                "basis must be tweets or adopters, got {other:?}"
            ))),
        }
    }
}

/// A popularity class together with the count it was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassLabel {
    pub value: u32,
    pub basis: Basis,
}

/// Order-of-magnitude class of a popularity count, capped.
///
/// Class k is the smallest k ≥ 1 with popularity ≤ 10^(k−0.5), evaluated
/// exactly in integers as popularity² ≤ 10^(2k−1) — no floating-point
/// rounding near the 10^(k−0.5) boundaries.
pub fn bin(popularity: u64, cap: u32) -> Result<u32> {
    if popularity < 1 {
        return Err(Error::InvalidParameter(
            "popularity must be at least 1".into(),
        ));
    }
    if cap < 1 {
        return Err(Error::InvalidParameter("class cap must be at least 1".into()));
    }
    let square = (popularity as u128) * (popularity as u128);
    let mut class = 1u32;
    let mut bound = 10u128;
    while square > bound {
        class += 1;
        bound = bound.checked_mul(100).unwrap_or(u128::MAX);
    }
    Ok(class.min(cap))
}

/// [`bin`] for real-valued popularity estimates (regression outputs).
/// Anything at or below 10^0.5 lands in class 1; non-finite estimates
/// conservatively map to class 1 as well.
pub fn bin_real(popularity: f64, cap: u32) -> u32 {
    if !popularity.is_finite() || popularity <= 1.0 {
        return 1;
    }
    let k = (popularity.log10() + 0.5).ceil();
    let k = if k < 1.0 { 1 } else { k as u32 };
    k.min(cap.max(1))
}

/// [`bin`] plus the basis tag.
pub fn class_label(popularity: u64, cap: u32, basis: Basis) -> Result<ClassLabel> {
    Ok(ClassLabel {
        value: bin(popularity, cap)?,
        basis,
    })
}

/// Binning against explicit inclusive upper bounds, for experiments that
/// need a different class layout (e.g. a class 0 for tiny counts). Classes
/// are 0-based: class c is the number of edges strictly below `popularity`,
/// so `popularity <= edges[0]` gives class 0 and anything above the last
/// edge gets class `edges.len()`.
pub fn bin_with_edges(popularity: u64, edges: &[u64]) -> Result<u32> {
    if popularity < 1 {
        return Err(Error::InvalidParameter(
            "popularity must be at least 1".into(),
        ));
    }
    if edges.is_empty() || edges.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "bin edges must be non-empty and strictly increasing".into(),
        ));
    }
    Ok(edges.iter().filter(|&&e| e < popularity).count() as u32)
}

/// Precision/recall/F1 and support for one class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassMetrics {
    pub class: u32,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    /// Number of actual members of this class.
    pub support: usize,
}

/// Per-class metrics plus the confusion matrix they were computed from.
#[derive(Debug, Clone)]
pub struct ClassReport {
    /// Ascending class ids covering everything seen in actual ∪ predicted.
    classes: Vec<u32>,
    /// confusion[i][j] = count with actual classes[i], predicted classes[j].
    confusion: Vec<Vec<usize>>,
    metrics: Vec<ClassMetrics>,
}

impl ClassReport {
    pub fn classes(&self) -> &[u32] {
        &self.classes
    }

    pub fn metrics(&self) -> &[ClassMetrics] {
        &self.metrics
    }

    /// Row-major confusion matrix, rows = actual, columns = predicted.
    pub fn confusion(&self) -> &[Vec<usize>] {
        &self.confusion
    }

    /// F1 for one class; None when the class never occurred.
    pub fn f1_for(&self, class: u32) -> Option<f64> {
        self.metrics.iter().find(|m| m.class == class).map(|m| m.f1)
    }

    /// Unweighted mean F1 over classes with nonzero support.
    pub fn macro_f1(&self) -> f64 {
        let supported: Vec<&ClassMetrics> =
            self.metrics.iter().filter(|m| m.support > 0).collect();
        if supported.is_empty() {
            return 0.0;
        }
        supported.iter().map(|m| m.f1).sum::<f64>() / supported.len() as f64
    }

    /// Fraction of exactly correct predictions.
    pub fn accuracy(&self) -> f64 {
        let total: usize = self.confusion.iter().map(|row| row.iter().sum::<usize>()).sum();
        if total == 0 {
            return 0.0;
        }
        let hits: usize = (0..self.classes.len()).map(|i| self.confusion[i][i]).sum();
        hits as f64 / total as f64
    }

    /// `class,precision,recall,f1,support` rows in ascending class order.
    pub fn write_csv(&self, mut w: impl Write) -> Result<()> {
        writeln!(w, "class,precision,recall,f1,support")?;
        for m in &self.metrics {
            writeln!(
                w,
                "{},{:.6},{:.6},{:.6},{}",
                m.class, m.precision, m.recall, m.f1, m.support
            )?;
        }
        Ok(())
    }

    /// Confusion matrix as CSV, one row per actual class.
    pub fn write_confusion_csv(&self, mut w: impl Write) -> Result<()> {
        write!(w, "actual\\predicted")?;
        for c in &self.classes {
            write!(w, ",{c}")?;
        }
        writeln!(w)?;
        for (i, c) in self.classes.iter().enumerate() {
            write!(w, "{c}")?;
            for j in 0..self.classes.len() {
                write!(w, ",{}", self.confusion[i][j])?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    /// Aligned text table for terminal output.
    pub fn format_table(&self) -> String {
        let mut out = String::new();
        out.push_str("class  precision  recall  f1      support\n");
        for m in &self.metrics {
            out.push_str(&format!(
                "{:<5}  {:>9.4}  {:>6.4}  {:>6.4}  {:>7}\n",
                m.class, m.precision, m.recall, m.f1, m.support
            ));
        }
        out
    }
}

/// One-vs-rest precision/recall/F1 per class from parallel label vectors.
/// F1 is 0 whenever precision + recall is 0 (class never predicted, never
/// present, or never both).
pub fn f1_report(predicted: &[u32], actual: &[u32]) -> Result<ClassReport> {
    if predicted.len() != actual.len() {
        return Err(Error::LabelLengthMismatch {
            predicted: predicted.len(),
            actual: actual.len(),
        });
    }
    let mut classes: Vec<u32> = predicted.iter().chain(actual).copied().collect();
    classes.sort_unstable();
    classes.dedup();
    let index: HashMap<u32, usize> = classes.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let k = classes.len();
    let mut confusion = vec![vec![0usize; k]; k];
    for (&p, &a) in predicted.iter().zip(actual) {
        confusion[index[&a]][index[&p]] += 1;
    }
    let metrics = classes
        .iter()
        .enumerate()
        .map(|(i, &class)| {
            let tp = confusion[i][i];
            let predicted_total: usize = (0..k).map(|r| confusion[r][i]).sum();
            let actual_total: usize = confusion[i].iter().sum();
            let precision = if predicted_total == 0 {
                0.0
            } else {
                tp as f64 / predicted_total as f64
            };
            let recall = if actual_total == 0 {
                0.0
            } else {
                tp as f64 / actual_total as f64
            };
            let f1 = if precision + recall == 0.0 {
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };
            ClassMetrics {
                class,
                precision,
                recall,
                f1,
                support: actual_total,
            }
        })
        .collect();
    Ok(ClassReport {
        classes,
        confusion,
        metrics,
    })
}

/// Stratified fold assignment: indices grouped by class, shuffled within
/// each class, then dealt round-robin as one sequence. Every class spreads
/// across folds as evenly as possible and total fold sizes differ by at
/// most one. Deterministic given (labels, folds, seed).
pub fn stratified_folds(labels: &[u32], folds: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if folds < 2 {
        return Err(Error::InvalidParameter("need at least 2 folds".into()));
    }
    if labels.len() < folds {
        return Err(Error::InvalidParameter(format!(
            "cannot split {} samples into {} folds",
            labels.len(),
            folds
        )));
    }
    let mut by_class: HashMap<u32, Vec<usize>> = HashMap::new();
    for (i, &label) in labels.iter().enumerate() {
        by_class.entry(label).or_default().push(i);
    }
    let mut classes: Vec<u32> = by_class.keys().copied().collect();
    classes.sort_unstable();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dealt: Vec<usize> = Vec::with_capacity(labels.len());
    for c in classes {
        let mut members = by_class.remove(&c).unwrap();
        members.shuffle(&mut rng);
        dealt.extend(members);
    }
    let mut assignment = vec![Vec::new(); folds];
    for (position, index) in dealt.into_iter().enumerate() {
        assignment[position % folds].push(index);
    }
    Ok(assignment)
}

/// A trained classifier usable inside cross-validation. Prediction takes
/// `&mut self` so stochastic models can hold their own generator.
pub trait Model<R> {
    fn predict_one(&mut self, row: &R) -> u32;
}

/// Outcome of a cross-validation run: the pooled report plus anything the
/// harness wants the caller to surface.
#[derive(Debug, Clone)]
pub struct CvOutcome {
    pub report: ClassReport,
    pub warnings: Vec<String>,
    /// Fingerprint of the fold assignment, identical across models that
    /// share (labels, folds, seed).
    pub fold_hash: u64,
}

/// K-fold cross-validation over precomputed folds. `train` is called once
/// per fold with the training rows/labels and the fold index; out-of-fold
/// predictions are pooled into a single report, so per-class support equals
/// the global class count. A fold whose training fails (e.g. a single-class
/// training set) falls back to predicting the modal training label, and the
/// failure is reported as a warning rather than aborting the run.
pub fn cross_validate_with_folds<R, M, F>(
    rows: &[R],
    labels: &[u32],
    folds: &[Vec<usize>],
    mut train: F,
) -> Result<CvOutcome>
where
    R: Clone,
    M: Model<R>,
    F: FnMut(&[R], &[u32], usize) -> Result<M>,
{
    if rows.len() != labels.len() {
        return Err(Error::LabelLengthMismatch {
            predicted: rows.len(),
            actual: labels.len(),
        });
    }
    let mut warnings = Vec::new();
    for (c, count) in class_counts(labels) {
        if count < folds.len() {
            warnings.push(format!(
                "class {c} has only {count} members across {} folds",
                folds.len()
            ));
        }
    }
    let mut predicted = vec![0u32; rows.len()];
    let in_test: Vec<usize> = folds.iter().flatten().copied().collect();
    {
        let mut sorted = in_test.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != rows.len() || sorted.last() != Some(&(rows.len() - 1)) {
            return Err(Error::InvalidParameter(
                "fold assignment must cover every row exactly once".into(),
            ));
        }
    }
    for (fold_index, test) in folds.iter().enumerate() {
        let mut train_rows: Vec<R> = Vec::with_capacity(rows.len() - test.len());
        let mut train_labels: Vec<u32> = Vec::with_capacity(rows.len() - test.len());
        let test_set: std::collections::HashSet<usize> = test.iter().copied().collect();
        for i in 0..rows.len() {
            if !test_set.contains(&i) {
                train_rows.push(rows[i].clone());
                train_labels.push(labels[i]);
            }
        }
        match train(&train_rows, &train_labels, fold_index) {
            Ok(mut model) => {
                for &i in test {
                    predicted[i] = model.predict_one(&rows[i]);
                }
            }
            Err(e) => {
                warnings.push(format!(
                    "fold {fold_index}: training failed ({e}); predicting modal training label"
                ));
                let fallback = modal_label(&train_labels);
                for &i in test {
                    predicted[i] = fallback;
                }
            }
        }
    }
    Ok(CvOutcome {
        report: f1_report(&predicted, labels)?,
        warnings,
        fold_hash: crate::seeds::fold_hash(folds),
    })
}

/// Convenience wrapper: builds stratified folds from (labels, folds, seed)
/// and runs [`cross_validate_with_folds`].
pub fn cross_validate<R, M, F>(
    rows: &[R],
    labels: &[u32],
    folds: usize,
    seed: u64,
    train: F,
) -> Result<CvOutcome>
where
    R: Clone,
    M: Model<R>,
    F: FnMut(&[R], &[u32], usize) -> Result<M>,
{
    let assignment = stratified_folds(labels, folds, seed)?;
    cross_validate_with_folds(rows, labels, &assignment, train)
}

/// Most frequent label; ties go to the smaller label.
pub fn modal_label(labels: &[u32]) -> u32 {
    let mut counts: Vec<(u32, usize)> = class_counts(labels);
    counts.sort_by_key(|&(class, count)| (std::cmp::Reverse(count), class));
    counts.first().map(|&(c, _)| c).unwrap_or(0)
}

fn class_counts(labels: &[u32]) -> Vec<(u32, usize)> {
    let mut counts: HashMap<u32, usize> = HashMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0) += 1;
    }
    let mut out: Vec<(u32, usize)> = counts.into_iter().collect();
    out.sort_unstable();
    out
}
