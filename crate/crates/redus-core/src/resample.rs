//! Per-sample weight table: initialization, multiplicative updates, and
//! threshold selection.
//!
//! Weights start uniform at `1/n` and always sum to 1. After each epoch the
//! table receives a correctness mask (one flag per sample, from an
//! infer-mode pass of the current model over the *whole* dataset) and
//! rescales every weight — misclassified samples by `e^alpha / Z`, correct
//! ones by `e^-alpha / Z` — where `alpha = ln((1-eps)/eps) / 2`,
//! `Z = 2 sqrt(eps (1-eps))`, and `eps` is the summed weight of the
//! misclassified samples. Dividing by `Z` keeps the sum at 1 without an
//! explicit renormalization pass. Samples whose weight sits below the
//! threshold are excluded from the next epoch's training subset but keep
//! being updated, so they re-enter as soon as the model starts missing them.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};

/// Clamp bounds for the weighted error; `alpha` and `Z` are singular at 0
/// and 1. A raw error outside these bounds means the epoch carried no
/// usable signal (everything correct or everything wrong) and the weights
/// are held unchanged for that epoch.
pub const EPSILON_CLAMP: f64 = 1e-10;

/// Per-sample weights with threshold gating state.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleWeightTable {
    weights: Vec<f64>,
    theta: f64,
    /// Number of updates applied plus one; a fresh table is at epoch 1.
    epoch_index: u32,
}

/// Weighted-error statistics for one epoch's update.
#[derive(Debug, Clone)]
pub struct EpochErrorStats {
    /// Summed weight of misclassified samples before clamping.
    pub raw_epsilon: f64,
    /// Weighted error clamped into `[EPSILON_CLAMP, 1 - EPSILON_CLAMP]`.
    pub epsilon: f64,
    pub alpha: f64,
    pub normalizer: f64,
    pub correctness: Vec<bool>,
    /// Raw error fell outside the clamp range; weights were held.
    pub degenerate: bool,
}

/// The training subset for one epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochSelection {
    /// Ascending sample indices with weight at or above the threshold.
    pub included: Vec<usize>,
    pub excluded_count: usize,
    /// The threshold excluded everything, so the full dataset was used
    /// instead.
    pub fallback_used: bool,
}

impl SampleWeightTable {
    /// Uniform table: every weight `1/n`, epoch index 1, threshold 0.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("sample count must be at least 1"));
        }
        Ok(SampleWeightTable {
            weights: vec![1.0 / n as f64; n],
            theta: 0.0,
            epoch_index: 1,
        })
    }

    /// Rebuild a table from explicit weights, e.g. a debugging snapshot.
    /// The weights must be positive and sum to 1 within 1e-9.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::config("sample count must be at least 1"));
        }
        if weights.iter().any(|&w| !w.is_finite() || w <= 0.0) {
            return Err(Error::data("weights must be positive and finite"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::data(format!("weights sum to {sum}, not 1")));
        }
        Ok(SampleWeightTable {
            weights,
            theta: 0.0,
            epoch_index: 1,
        })
    }

    /// Set the exclusion threshold. Values above `1/n` are allowed but
    /// exclude even freshly initialized samples, so they are flagged.
    pub fn set_theta(&mut self, theta: f64) -> Result<()> {
        if !theta.is_finite() || theta < 0.0 {
            return Err(Error::config(format!(
                "threshold must be finite and nonnegative, got {theta}"
            )));
        }
        if theta > 1.0 / self.len() as f64 {
            log::warn!(
                "threshold {theta} exceeds 1/n = {}; every uniform weight starts excluded",
                1.0 / self.len() as f64
            );
        }
        self.theta = theta;
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn epoch_index(&self) -> u32 {
        self.epoch_index
    }

    /// Debugging snapshot: `index,weight,included` per row.
    pub fn write_snapshot_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "index,weight,included")?;
        for (i, &w) in self.weights.iter().enumerate() {
            writeln!(out, "{i},{w},{}", w >= self.theta)?;
        }
        Ok(())
    }
}

fn check_mask_len(table: &SampleWeightTable, correctness: &[bool]) -> Result<()> {
    if correctness.len() != table.len() {
        return Err(Error::data(format!(
            "correctness mask length {} does not match sample count {}",
            correctness.len(),
            table.len()
        )));
    }
    Ok(())
}

/// Weighted error: summed weight of the misclassified samples, clamped into
/// `[EPSILON_CLAMP, 1 - EPSILON_CLAMP]`.
pub fn compute_error(table: &SampleWeightTable, correctness: &[bool]) -> Result<f64> {
    check_mask_len(table, correctness)?;
    debug_assert!((table.weights.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    let raw: f64 = table
        .weights
        .iter()
        .zip(correctness)
        .filter(|(_, &correct)| !correct)
        .map(|(&w, _)| w)
        .sum();
    Ok(raw.clamp(EPSILON_CLAMP, 1.0 - EPSILON_CLAMP))
}

/// Update magnitude `ln((1 - eps) / eps) / 2` (natural log).
pub fn compute_alpha(epsilon: f64) -> f64 {
    debug_assert!((EPSILON_CLAMP..=1.0 - EPSILON_CLAMP).contains(&epsilon));
    0.5 * ((1.0 - epsilon) / epsilon).ln()
}

/// Closed-form normalizer `2 sqrt(eps (1 - eps))`; dividing the updated
/// weights by it restores a unit sum.
pub fn compute_normalizer(epsilon: f64) -> f64 {
    debug_assert!((EPSILON_CLAMP..=1.0 - EPSILON_CLAMP).contains(&epsilon));
    2.0 * (epsilon * (1.0 - epsilon)).sqrt()
}

/// Assemble the epoch's statistics without touching the weights.
pub fn epoch_stats(table: &SampleWeightTable, correctness: &[bool]) -> Result<EpochErrorStats> {
    check_mask_len(table, correctness)?;
    let raw: f64 = table
        .weights
        .iter()
        .zip(correctness)
        .filter(|(_, &correct)| !correct)
        .map(|(&w, _)| w)
        .sum();
    let epsilon = raw.clamp(EPSILON_CLAMP, 1.0 - EPSILON_CLAMP);
    Ok(EpochErrorStats {
        raw_epsilon: raw,
        epsilon,
        alpha: compute_alpha(epsilon),
        normalizer: compute_normalizer(epsilon),
        correctness: correctness.to_vec(),
        degenerate: !(EPSILON_CLAMP..=1.0 - EPSILON_CLAMP).contains(&raw),
    })
}

/// Apply one epoch's multiplicative update to every sample (including
/// currently excluded ones) and advance the epoch index.
///
/// Misclassified weights scale by `e^alpha / Z`, correct ones by
/// `e^-alpha / Z`. When the raw error is degenerate (all correct or all
/// wrong) the weights are held unchanged: a clamped error would multiply
/// every weight by a near-singular factor pair carrying no information.
pub fn update_weights(
    table: &mut SampleWeightTable,
    correctness: &[bool],
) -> Result<EpochErrorStats> {
    let stats = epoch_stats(table, correctness)?;
    if !stats.degenerate {
        let miss_factor = stats.alpha.exp() / stats.normalizer;
        let correct_factor = (-stats.alpha).exp() / stats.normalizer;
        for (w, &correct) in table.weights.iter_mut().zip(correctness) {
            *w *= if correct { correct_factor } else { miss_factor };
        }
    }
    table.epoch_index += 1;
    Ok(stats)
}

/// Samples whose weight is at or above the threshold (inclusive). If that
/// set is empty, the full index set is returned with `fallback_used`, so an
/// epoch never trains on zero samples.
pub fn select_samples(table: &SampleWeightTable) -> EpochSelection {
    let included: Vec<usize> = table
        .weights
        .iter()
        .enumerate()
        .filter(|(_, &w)| w >= table.theta)
        .map(|(i, _)| i)
        .collect();
    if included.is_empty() {
        return EpochSelection {
            included: (0..table.len()).collect(),
            excluded_count: 0,
            fallback_used: true,
        };
    }
    let excluded_count = table.len() - included.len();
    EpochSelection {
        included,
        excluded_count,
        fallback_used: false,
    }
}

/// Evenly spaced thresholds `k * theta_max / (steps - 1)` for
/// `k = 0..steps-1`, with `theta_max = (2/3) * (1/n)`.
pub fn threshold_grid(n: usize, steps: usize) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::config("sample count must be at least 1"));
    }
    if steps < 2 {
        return Err(Error::config("threshold grid needs at least 2 steps"));
    }
    let theta_max = 2.0 / (3.0 * n as f64);
    Ok((0..steps)
        .map(|k| k as f64 * theta_max / (steps - 1) as f64)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn uniform_examples() {
        let t = SampleWeightTable::uniform(4).unwrap();
        assert_eq!(t.weights(), &[0.25; 4]);
        assert_eq!(t.epoch_index(), 1);
        assert_eq!(SampleWeightTable::uniform(1).unwrap().weights(), &[1.0]);
        let big = SampleWeightTable::uniform(336_000).unwrap();
        assert!((big.weights()[0] - 2.976e-6).abs() < 1e-9);
        assert!(matches!(
            SampleWeightTable::uniform(0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn compute_error_examples() {
        let t = SampleWeightTable::uniform(4).unwrap();
        let eps = compute_error(&t, &[false, true, true, true]).unwrap();
        assert!((eps - 0.25).abs() < 1e-15);

        // All correct: raw 0 clamps to the floor.
        let eps = compute_error(&t, &[true; 4]).unwrap();
        assert_eq!(eps, EPSILON_CLAMP);

        let mut t = SampleWeightTable::uniform(4).unwrap();
        t.weights = vec![0.1, 0.2, 0.3, 0.4];
        let eps = compute_error(&t, &[true, false, true, false]).unwrap();
        assert!((eps - 0.6).abs() < 1e-15);

        assert!(matches!(
            compute_error(&t, &[true, false]),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(compute_alpha(0.5), 0.0);
        assert!((compute_alpha(0.25) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((compute_alpha(0.25) - 0.549306).abs() < 1e-6);
        assert!((compute_alpha(0.1) - 3f64.ln()).abs() < 1e-12);
        assert!((compute_alpha(0.1) - 1.098612).abs() < 1e-6);
    }

    #[test]
    fn normalizer_examples() {
        assert!((compute_normalizer(0.5) - 1.0).abs() < 1e-15);
        assert!((compute_normalizer(0.25) - 0.75f64.sqrt()).abs() < 1e-15);
        assert!((compute_normalizer(0.25) - 0.866025).abs() < 1e-6);
        assert!((compute_normalizer(0.1) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn update_hand_case() {
        let mut t = SampleWeightTable::uniform(4).unwrap();
        let stats = update_weights(&mut t, &[false, true, true, true]).unwrap();
        assert!((stats.epsilon - 0.25).abs() < 1e-15);
        assert!((stats.alpha - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((stats.normalizer - 0.75f64.sqrt()).abs() < 1e-15);
        let expected = [0.5, 1.0 / 6.0, 1.0 / 6.0, 1.0 / 6.0];
        for (w, e) in t.weights().iter().zip(expected) {
            assert!((w - e).abs() <= 1e-12, "{w} vs {e}");
        }
        assert!((t.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-9);
        assert_eq!(t.epoch_index(), 2);
    }

    #[test]
    fn degenerate_epochs_hold_weights() {
        let mut t = SampleWeightTable::uniform(3).unwrap();
        let before = t.weights().to_vec();
        let stats = update_weights(&mut t, &[true; 3]).unwrap();
        assert!(stats.degenerate);
        assert_eq!(t.weights(), &before[..]);
        assert_eq!(t.epoch_index(), 2);

        let stats = update_weights(&mut t, &[false; 3]).unwrap();
        assert!(stats.degenerate);
        assert_eq!(t.weights(), &before[..]);
    }

    #[test]
    fn selection_examples() {
        let mut t = SampleWeightTable::uniform(4).unwrap();
        // theta = 0 keeps everything.
        let sel = select_samples(&t);
        assert_eq!(sel.included, vec![0, 1, 2, 3]);
        assert!(!sel.fallback_used);

        update_weights(&mut t, &[false, true, true, true]).unwrap();
        t.set_theta(0.2).unwrap();
        let sel = select_samples(&t);
        assert_eq!(sel.included, vec![0]);
        assert_eq!(sel.excluded_count, 3);

        // Boundary is inclusive.
        let mut t = SampleWeightTable::uniform(4).unwrap();
        t.set_theta(0.25).unwrap();
        assert_eq!(select_samples(&t).included.len(), 4);
    }

    #[test]
    fn empty_selection_falls_back_to_full_set() {
        let mut t = SampleWeightTable::uniform(4).unwrap();
        t.set_theta(0.26).unwrap();
        let sel = select_samples(&t);
        assert!(sel.fallback_used);
        assert_eq!(sel.included, vec![0, 1, 2, 3]);
        assert_eq!(sel.excluded_count, 0);
    }

    #[test]
    fn grid_examples() {
        let grid = threshold_grid(3, 3).unwrap();
        assert_eq!(grid.len(), 3);
        assert!((grid[0]).abs() < 1e-18);
        assert!((grid[1] - 1.0 / 9.0).abs() < 1e-15);
        assert!((grid[2] - 2.0 / 9.0).abs() < 1e-15);

        let grid = threshold_grid(100, 2).unwrap();
        assert_eq!(grid, vec![0.0, 2.0 / 300.0]);

        assert!(threshold_grid(10, 1).is_err());
    }

    #[test]
    fn snapshot_csv_lists_inclusion() {
        let mut t = SampleWeightTable::uniform(4).unwrap();
        update_weights(&mut t, &[false, true, true, true]).unwrap();
        t.set_theta(0.2).unwrap();
        let mut buf = Vec::new();
        t.write_snapshot_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("index,weight,included"));
        assert!(lines.next().unwrap().ends_with("true"));
        for _ in 0..3 {
            assert!(lines.next().unwrap().ends_with("false"));
        }
    }

    proptest! {
        // Multiplicative update plus the closed-form normalizer preserves a
        // unit sum for arbitrary weights and masks.
        #[test]
        fn update_preserves_unit_sum(
            raw in proptest::collection::vec(1e-6f64..1.0, 2..80),
            mask_bits in proptest::collection::vec(proptest::bool::ANY, 80),
        ) {
            let n = raw.len();
            let sum: f64 = raw.iter().sum();
            let mut table = SampleWeightTable::uniform(n).unwrap();
            table.weights = raw.iter().map(|w| w / sum).collect();
            let mask: Vec<bool> = mask_bits[..n].to_vec();
            update_weights(&mut table, &mask).unwrap();
            let total: f64 = table.weights().iter().sum();
            prop_assert!((total - 1.0).abs() <= 1e-9);
            prop_assert!(table.weights().iter().all(|&w| w > 0.0));
        }

        // One update with positive alpha pushes every misclassified weight
        // strictly above any correct weight that started equal to it.
        #[test]
        fn update_focuses_on_misclassified(
            n in 2usize..60,
            miss_count in 1usize..30,
        ) {
            let miss_count = miss_count.min(n - 1);
            let mut table = SampleWeightTable::uniform(n).unwrap();
            let mask: Vec<bool> = (0..n).map(|i| i >= miss_count).collect();
            let stats = update_weights(&mut table, &mask).unwrap();
            // Uniform start means eps = miss_count / n < 1/2 is not
            // guaranteed; only assert when alpha > 0.
            if stats.alpha > 0.0 {
                let miss_w = table.weights()[0];
                let correct_w = table.weights()[n - 1];
                prop_assert!(miss_w > correct_w);
            }
        }
    }
}
