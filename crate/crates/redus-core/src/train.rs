//! Epoch-level orchestration: plain training over the full dataset,
//! adaptive-resampling training, evaluation, and threshold sweeps.
//!
//! Both training modes run the same epoch engine, so a resampling run with
//! threshold 0 reproduces the plain run bit for bit under the same seed:
//! the correctness-mask pass draws no randomness, and shuffle and dropout
//! use independent labeled substreams.

use std::time::Instant;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::nn::{cross_entropy, argmax, GradientSet, Mode, MlpModel};
use crate::resample::{
    select_samples, update_weights, EpochSelection, SampleWeightTable,
};
use crate::rng::{self, RngStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainMode {
    Vanilla,
    Redus,
}

impl std::fmt::Display for TrainMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrainMode::Vanilla => write!(f, "vanilla"),
            TrainMode::Redus => write!(f, "redus"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: u32,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub theta: f64,
    pub seed: u64,
    pub mode: TrainMode,
}

impl TrainConfig {
    fn validate(&self, n: usize) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::config("epochs must be at least 1"));
        }
        if self.batch_size == 0 || self.batch_size > n {
            return Err(Error::config(format!(
                "batch size must be in 1..={n}, got {}",
                self.batch_size
            )));
        }
        // A zero rate freezes the parameters; that is allowed as a
        // diagnostic configuration (zero step is well defined).
        if !self.learning_rate.is_finite() || self.learning_rate < 0.0 {
            return Err(Error::config(format!(
                "learning rate must be finite and nonnegative, got {}",
                self.learning_rate
            )));
        }
        if !self.theta.is_finite() || self.theta < 0.0 {
            return Err(Error::config(format!(
                "threshold must be finite and nonnegative, got {}",
                self.theta
            )));
        }
        Ok(())
    }
}

/// Metrics of one training epoch. Training loss and accuracy are measured
/// on the samples actually trained that epoch, with dropout active.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: u32,
    pub included_samples: usize,
    pub backprop_count: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub fallback_used: bool,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvalMetrics {
    pub accuracy: f64,
    pub mean_loss: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingReport {
    pub config: TrainConfig,
    pub epochs: Vec<EpochMetrics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub final_test: Option<EvalMetrics>,
    pub total_backprops: u64,
    pub total_wall_time_s: f64,
}

impl TrainingReport {
    fn from_epochs(config: TrainConfig, epochs: Vec<EpochMetrics>) -> Self {
        let total_backprops = epochs.iter().map(|e| e.backprop_count as u64).sum();
        let total_wall_time_s = epochs.iter().map(|e| e.wall_time_s).sum();
        TrainingReport {
            config,
            epochs,
            final_test: None,
            total_backprops,
            total_wall_time_s,
        }
    }

    /// Mean wall time per epoch.
    pub fn avg_epoch_time_s(&self) -> f64 {
        if self.epochs.is_empty() {
            0.0
        } else {
            self.total_wall_time_s / self.epochs.len() as f64
        }
    }
}

struct EpochOutcome {
    loss_sum: f64,
    correct: usize,
    trained: usize,
}

/// One epoch of shuffled mini-batch SGD over the given sample indices.
/// Batch gradients are averaged, not summed, and the last partial batch is
/// kept.
fn train_epoch(
    model: &mut MlpModel,
    data: &Dataset,
    included: &[usize],
    batch_size: usize,
    learning_rate: f64,
    shuffle_rng: &mut rand_chacha::ChaCha8Rng,
    dropout_rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<EpochOutcome> {
    let mut order = included.to_vec();
    order.shuffle(shuffle_rng);

    let mut loss_sum = 0.0;
    let mut correct = 0usize;
    for batch in order.chunks(batch_size) {
        let mut grads = GradientSet::zeros_like(model);
        for &i in batch {
            let one_hot = data.one_hot(i);
            let trace = model.forward(data.row(i), Mode::Train(dropout_rng))?;
            loss_sum += cross_entropy(&trace.probabilities, &one_hot);
            if argmax(&trace.probabilities) as u32 == data.label(i) {
                correct += 1;
            }
            let sample_grads = model.backward(&trace, &one_hot)?;
            grads.add_assign(&sample_grads);
        }
        grads.scale(1.0 / batch.len() as f64);
        model.sgd_step(&grads, learning_rate)?;
    }
    Ok(EpochOutcome {
        loss_sum,
        correct,
        trained: order.len(),
    })
}

fn run_training(
    mut model: MlpModel,
    data: &Dataset,
    cfg: &TrainConfig,
    table: Option<SampleWeightTable>,
) -> Result<(MlpModel, TrainingReport, Option<SampleWeightTable>)> {
    let n = data.len();
    cfg.validate(n)?;
    if data.feature_count() != model.input_width() {
        return Err(Error::config(format!(
            "dataset has {} features but the model expects {}",
            data.feature_count(),
            model.input_width()
        )));
    }
    if data.class_count() != model.output_width() {
        return Err(Error::config(format!(
            "dataset has {} classes but the model outputs {}",
            data.class_count(),
            model.output_width()
        )));
    }

    let root = RngStream::new(cfg.seed);
    let mut shuffle_rng = root.child(rng::SHUFFLE).rng();
    let mut dropout_rng = root.child(rng::DROPOUT).rng();

    let mut table = match cfg.mode {
        TrainMode::Vanilla => None,
        TrainMode::Redus => {
            let mut t = match table {
                Some(t) => {
                    if t.len() != n {
                        return Err(Error::config(format!(
                            "carried weight table has {} entries for {} samples",
                            t.len(),
                            n
                        )));
                    }
                    t
                }
                None => SampleWeightTable::uniform(n)?,
            };
            t.set_theta(cfg.theta)?;
            Some(t)
        }
    };

    let full_selection = EpochSelection {
        included: (0..n).collect(),
        excluded_count: 0,
        fallback_used: false,
    };

    let mut epochs = Vec::with_capacity(cfg.epochs as usize);
    for epoch in 1..=cfg.epochs {
        let started = Instant::now();

        // On every epoch except a fresh table's first, re-score all samples
        // with the current model (dropout off, so the mask is deterministic)
        // and update every weight before selecting the training subset.
        let mut stats = None;
        let selection = match table.as_mut() {
            None => full_selection.clone(),
            Some(t) => {
                if !(epoch == 1 && t.epoch_index() == 1) {
                    let predictions = model.predict(data.features())?;
                    let correctness: Vec<bool> = predictions
                        .iter()
                        .zip(data.labels())
                        .map(|(p, l)| p == l)
                        .collect();
                    stats = Some(update_weights(t, &correctness)?);
                }
                select_samples(t)
            }
        };

        let outcome = train_epoch(
            &mut model,
            data,
            &selection.included,
            cfg.batch_size,
            cfg.learning_rate,
            &mut shuffle_rng,
            &mut dropout_rng,
        )?;
        let train_loss = outcome.loss_sum / outcome.trained as f64;
        if !train_loss.is_finite() {
            return Err(Error::numeric(format!(
                "non-finite training loss at epoch {epoch}"
            )));
        }
        epochs.push(EpochMetrics {
            epoch,
            included_samples: selection.included.len(),
            backprop_count: outcome.trained,
            train_loss,
            train_accuracy: outcome.correct as f64 / outcome.trained as f64,
            epsilon: stats.as_ref().map(|s| s.epsilon),
            alpha: stats.as_ref().map(|s| s.alpha),
            fallback_used: selection.fallback_used,
            wall_time_s: started.elapsed().as_secs_f64(),
        });
    }

    let report = TrainingReport::from_epochs(*cfg, epochs);
    Ok((model, report, table))
}

/// Shuffled mini-batch SGD over all samples every epoch.
pub fn train_vanilla(
    model: MlpModel,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainingReport)> {
    if cfg.mode != TrainMode::Vanilla {
        return Err(Error::config("train_vanilla requires vanilla mode"));
    }
    let (model, report, _) = run_training(model, data, cfg, None)?;
    Ok((model, report))
}

/// Adaptive-resampling training: epoch 1 trains on the full dataset with a
/// uniform weight table; every later epoch re-scores all samples, updates
/// the weights, and trains on the subset at or above the threshold.
pub fn train_redus(
    model: MlpModel,
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(MlpModel, TrainingReport)> {
    if cfg.mode != TrainMode::Redus {
        return Err(Error::config("train_redus requires redus mode"));
    }
    let (model, report, _) = run_training(model, data, cfg, None)?;
    Ok((model, report))
}

/// Like [`train_redus`] but carrying a weight table across calls, for
/// federated rounds that persist sample weights. Pass `None` to start
/// uniform; the final table is returned.
pub fn train_redus_resumable(
    model: MlpModel,
    data: &Dataset,
    cfg: &TrainConfig,
    table: Option<SampleWeightTable>,
) -> Result<(MlpModel, TrainingReport, SampleWeightTable)> {
    if cfg.mode != TrainMode::Redus {
        return Err(Error::config("train_redus requires redus mode"));
    }
    let (model, report, table) = run_training(model, data, cfg, table)?;
    Ok((model, report, table.expect("redus mode keeps a table")))
}

/// Infer-mode accuracy and mean cross-entropy over a dataset.
pub fn evaluate(model: &MlpModel, data: &Dataset) -> Result<EvalMetrics> {
    let mut correct = 0usize;
    let mut loss_sum = 0.0;
    for i in 0..data.len() {
        let trace = model.forward(data.row(i), Mode::Infer)?;
        loss_sum += cross_entropy(&trace.probabilities, &data.one_hot(i));
        if argmax(&trace.probabilities) as u32 == data.label(i) {
            correct += 1;
        }
    }
    Ok(EvalMetrics {
        accuracy: correct as f64 / data.len() as f64,
        mean_loss: loss_sum / data.len() as f64,
    })
}

/// Linear training-time model: `samples * seconds_per_backprop * epochs`.
pub fn estimate_training_time(samples: u64, seconds_per_backprop: f64, epochs: u32) -> f64 {
    samples as f64 * seconds_per_backprop * epochs as f64
}

/// Measure the per-sample backpropagation time by running single-sample
/// forward + backward + update steps on a clone of the model. Returns
/// seconds per sample.
pub fn measure_tau(
    model: &MlpModel,
    data: &Dataset,
    learning_rate: f64,
    samples: usize,
    stream: &RngStream,
) -> Result<f64> {
    if samples == 0 {
        return Err(Error::config("need at least one calibration sample"));
    }
    let mut scratch = model.clone();
    let mut dropout_rng = stream.child(rng::DROPOUT).rng();
    // Warm-up pass so allocator effects do not dominate the measurement.
    for i in 0..data.len().min(64) {
        let trace = scratch.forward(data.row(i), Mode::Train(&mut dropout_rng))?;
        let grads = scratch.backward(&trace, &data.one_hot(i))?;
        scratch.sgd_step(&grads, learning_rate)?;
    }
    let started = Instant::now();
    for k in 0..samples {
        let i = k % data.len();
        let trace = scratch.forward(data.row(i), Mode::Train(&mut dropout_rng))?;
        let grads = scratch.backward(&trace, &data.one_hot(i))?;
        scratch.sgd_step(&grads, learning_rate)?;
    }
    Ok(started.elapsed().as_secs_f64() / samples as f64)
}

/// One (threshold, repeat) training run inside a sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepCell {
    pub theta: f64,
    pub repeat: u32,
    pub report: TrainingReport,
    pub test: EvalMetrics,
}

/// Aggregated sweep row for one threshold.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub theta: f64,
    /// Mean test accuracy in [0, 1].
    pub mean_accuracy: f64,
    pub mean_loss: f64,
    pub mean_total_backprops: f64,
    pub mean_epoch_time_s: f64,
    pub mean_total_time_s: f64,
    /// `(1 - t/t0) * 100` against the threshold-0 row; `None` on that row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub time_red_pct: Option<f64>,
    /// Accuracy drop in percentage points against the threshold-0 row
    /// (positive = worse); `None` on that row.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub acc_red_pct: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub cells: Vec<SweepCell>,
}

/// Run `repeats` seeded trainings per threshold and aggregate.
///
/// The threshold-0 row is the baseline: it runs in vanilla mode (no
/// re-scoring pass, so its wall time carries no resampling overhead) and
/// reductions are computed against it. If the grid lacks 0 it is prepended.
/// Repeat seeds derive from `cfg.seed` and the repeat index only, so every
/// threshold sees the same model initializations and data order.
pub fn sweep_thresholds(
    train: &Dataset,
    test: &Dataset,
    specs: &[crate::nn::LayerSpec],
    grid: &[f64],
    cfg: &TrainConfig,
    repeats: u32,
) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::config("threshold grid is empty"));
    }
    if repeats == 0 {
        return Err(Error::config("need at least one repeat"));
    }
    let mut thetas = grid.to_vec();
    if !thetas.contains(&0.0) {
        thetas.insert(0, 0.0);
    }

    let master = RngStream::new(cfg.seed);
    let mut cells = Vec::with_capacity(thetas.len() * repeats as usize);
    let mut rows = Vec::with_capacity(thetas.len());
    for &theta in &thetas {
        let mut acc_sum = 0.0;
        let mut loss_sum = 0.0;
        let mut backprop_sum = 0.0;
        let mut epoch_time_sum = 0.0;
        let mut total_time_sum = 0.0;
        for repeat in 0..repeats {
            let run_stream = master.child_idx("repeat", u64::from(repeat));
            let run_cfg = TrainConfig {
                seed: run_stream.seed(),
                theta,
                mode: if theta == 0.0 {
                    TrainMode::Vanilla
                } else {
                    TrainMode::Redus
                },
                ..*cfg
            };
            let model = crate::nn::init_model(specs, &run_stream.child(rng::INIT))?;
            let (model, mut report, _) = run_training(model, train, &run_cfg, None)?;
            let eval = evaluate(&model, test)?;
            report.final_test = Some(eval);
            acc_sum += eval.accuracy;
            loss_sum += eval.mean_loss;
            backprop_sum += report.total_backprops as f64;
            epoch_time_sum += report.avg_epoch_time_s();
            total_time_sum += report.total_wall_time_s;
            cells.push(SweepCell {
                theta,
                repeat,
                report,
                test: eval,
            });
        }
        let r = repeats as f64;
        rows.push(SweepRow {
            theta,
            mean_accuracy: acc_sum / r,
            mean_loss: loss_sum / r,
            mean_total_backprops: backprop_sum / r,
            mean_epoch_time_s: epoch_time_sum / r,
            mean_total_time_s: total_time_sum / r,
            time_red_pct: None,
            acc_red_pct: None,
        });
    }

    apply_baseline_reductions(&mut rows);
    Ok(SweepTable { rows, cells })
}

/// Fill reduction columns against the first threshold-0 row; that row keeps
/// `None` (rendered as N/A).
pub fn apply_baseline_reductions(rows: &mut [SweepRow]) {
    let baseline_index = match rows.iter().position(|r| r.theta == 0.0) {
        Some(i) => i,
        None => return,
    };
    let base_time = rows[baseline_index].mean_epoch_time_s;
    let base_acc = rows[baseline_index].mean_accuracy;
    for (i, row) in rows.iter_mut().enumerate() {
        if i == baseline_index {
            row.time_red_pct = None;
            row.acc_red_pct = None;
        } else {
            row.time_red_pct = if base_time > 0.0 {
                Some((1.0 - row.mean_epoch_time_s / base_time) * 100.0)
            } else {
                None
            };
            row.acc_red_pct = Some((base_acc - row.mean_accuracy) * 100.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synth_generate;
    use crate::nn::{init_model, LayerSpec, MlpModel};

    fn small_data(n: usize, seed: u64) -> Dataset {
        synth_generate(n, 6, 3, 5.0, &RngStream::new(seed).child(rng::SYNTH)).unwrap()
    }

    fn small_specs() -> Vec<LayerSpec> {
        LayerSpec::stack(6, &[16], 3, 0.2).unwrap()
    }

    fn cfg(mode: TrainMode, theta: f64, epochs: u32) -> TrainConfig {
        TrainConfig {
            epochs,
            batch_size: 16,
            learning_rate: 0.05,
            theta,
            seed: 11,
            mode,
        }
    }

    #[test]
    fn vanilla_backprop_count_is_n_times_epochs() {
        let data = small_data(120, 1);
        let model = init_model(&small_specs(), &RngStream::new(2).child(rng::INIT)).unwrap();
        let (_, report) = train_vanilla(model, &data, &cfg(TrainMode::Vanilla, 0.0, 5)).unwrap();
        assert_eq!(report.total_backprops, 600);
        for e in &report.epochs {
            assert_eq!(e.included_samples, 120);
            assert_eq!(e.backprop_count, e.included_samples);
            assert!(e.epsilon.is_none());
        }
    }

    #[test]
    fn same_seed_reproduces_report() {
        let data = small_data(80, 3);
        let c = cfg(TrainMode::Vanilla, 0.0, 3);
        let model = init_model(&small_specs(), &RngStream::new(5).child(rng::INIT)).unwrap();
        let (m1, r1) = train_vanilla(model.clone(), &data, &c).unwrap();
        let (m2, r2) = train_vanilla(model, &data, &c).unwrap();
        assert_eq!(m1, m2);
        let l1: Vec<f64> = r1.epochs.iter().map(|e| e.train_loss).collect();
        let l2: Vec<f64> = r2.epochs.iter().map(|e| e.train_loss).collect();
        assert_eq!(l1, l2);
    }

    #[test]
    fn theta_zero_redus_equals_vanilla_bitwise() {
        let data = small_data(150, 4);
        let model = init_model(&small_specs(), &RngStream::new(6).child(rng::INIT)).unwrap();
        let (mv, rv) = train_vanilla(model.clone(), &data, &cfg(TrainMode::Vanilla, 0.0, 6)).unwrap();
        let (mr, rr) = train_redus(model, &data, &cfg(TrainMode::Redus, 0.0, 6)).unwrap();
        assert_eq!(mv, mr);
        for (a, b) in rv.epochs.iter().zip(&rr.epochs) {
            assert_eq!(a.train_loss, b.train_loss);
            assert_eq!(a.included_samples, b.included_samples);
        }
    }

    #[test]
    fn redus_excludes_learned_samples_and_stays_accurate() {
        let data = small_data(400, 7);
        let model = init_model(&small_specs(), &RngStream::new(8).child(rng::INIT)).unwrap();
        let theta = 0.5 / 400.0;
        let (m_redus, report) = train_redus(model.clone(), &data, &cfg(TrainMode::Redus, theta, 10)).unwrap();
        let counts: Vec<usize> = report.epochs.iter().map(|e| e.included_samples).collect();
        assert!(
            counts.windows(2).any(|w| w[1] < w[0]),
            "included counts never decreased: {counts:?}"
        );
        let (m_vanilla, _) = train_vanilla(model, &data, &cfg(TrainMode::Vanilla, 0.0, 10)).unwrap();
        let acc_redus = evaluate(&m_redus, &data).unwrap().accuracy;
        let acc_vanilla = evaluate(&m_vanilla, &data).unwrap().accuracy;
        assert!(
            acc_vanilla - acc_redus <= 0.03,
            "accuracy dropped too far: {acc_vanilla} -> {acc_redus}"
        );
        assert!(report.total_backprops < 4000);
    }

    #[test]
    fn fixed_misclassified_sample_ends_up_alone_in_subset() {
        // A zero model predicts class 0 everywhere (tie-break), and a zero
        // learning rate keeps it that way, so exactly the one row labeled 1
        // stays misclassified forever.
        let data = Dataset::new(
            vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8],
            vec![0, 0, 0, 1],
            2,
            2,
        )
        .unwrap();
        let specs = vec![LayerSpec::new(2, 2, crate::nn::Activation::Identity, 0.0).unwrap()];
        let model = MlpModel::zeros(&specs).unwrap();
        let c = TrainConfig {
            epochs: 6,
            batch_size: 4,
            learning_rate: 0.0,
            theta: 0.2,
            seed: 0,
            mode: TrainMode::Redus,
        };
        let (_, report) = train_redus(model, &data, &c).unwrap();
        let counts: Vec<usize> = report.epochs.iter().map(|e| e.included_samples).collect();
        assert_eq!(counts, vec![4, 1, 1, 1, 1, 1]);
        assert!((report.epochs[1].epsilon.unwrap() - 0.25).abs() < 1e-12);
        // Once the lone miss holds half the weight, the error is balanced
        // and alpha collapses to zero: the subset freezes.
        assert!((report.epochs[2].epsilon.unwrap() - 0.5).abs() < 1e-12);
        assert!(report.epochs[2].alpha.unwrap().abs() < 1e-12);
    }

    #[test]
    fn evaluate_examples() {
        let data = small_data(90, 9);
        // Uniform predictor: accuracy ~ 1/C, loss = ln C.
        let zero = MlpModel::zeros(&small_specs()).unwrap();
        let eval = evaluate(&zero, &data).unwrap();
        assert!((eval.mean_loss - 3f64.ln()).abs() < 1e-9);
        assert!((eval.accuracy - 1.0 / 3.0).abs() < 0.15);

        let model = init_model(&small_specs(), &RngStream::new(10).child(rng::INIT)).unwrap();
        let (trained, _) = train_vanilla(model, &data, &cfg(TrainMode::Vanilla, 0.0, 12)).unwrap();
        let eval = evaluate(&trained, &data).unwrap();
        assert!(eval.accuracy >= 0.95, "training failed: {}", eval.accuracy);
    }

    #[test]
    fn time_estimate_examples() {
        assert!((estimate_training_time(100, 0.001, 10) - 1.0).abs() < 1e-12);
        assert_eq!(estimate_training_time(100, 0.001, 0), 0.0);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let data = small_data(10, 12);
        let model = init_model(&small_specs(), &RngStream::new(1).child(rng::INIT)).unwrap();
        let mut c = cfg(TrainMode::Vanilla, 0.0, 1);
        c.batch_size = 0;
        assert!(train_vanilla(model.clone(), &data, &c).is_err());
        c.batch_size = 11;
        assert!(train_vanilla(model.clone(), &data, &c).is_err());
        let mut c = cfg(TrainMode::Redus, -0.5, 1);
        c.batch_size = 4;
        assert!(train_redus(model, &data, &c).is_err());
    }

    #[test]
    fn sweep_prepends_baseline_and_marks_it_na() {
        let data = small_data(60, 13);
        let (train, test) = crate::data::split(&data, (0.8, 0.2), &RngStream::new(13).child(rng::SPLIT)).unwrap();
        let table = sweep_thresholds(
            &train,
            &test,
            &small_specs(),
            &[0.5 / 48.0],
            &cfg(TrainMode::Redus, 0.0, 2),
            1,
        )
        .unwrap();
        assert_eq!(table.rows.len(), 2);
        assert_eq!(table.rows[0].theta, 0.0);
        assert!(table.rows[0].time_red_pct.is_none());
        assert!(table.rows[0].acc_red_pct.is_none());
        assert!(table.rows[1].time_red_pct.is_some());
        assert!(table.rows[1].acc_red_pct.is_some());
    }

    #[test]
    fn sweep_duplicate_thetas_have_identical_deterministic_metrics() {
        let data = small_data(60, 14);
        let (train, test) = crate::data::split(&data, (0.8, 0.2), &RngStream::new(14).child(rng::SPLIT)).unwrap();
        let theta = 0.4 / 48.0;
        let table = sweep_thresholds(
            &train,
            &test,
            &small_specs(),
            &[theta, theta],
            &cfg(TrainMode::Redus, 0.0, 2),
            2,
        )
        .unwrap();
        let a = &table.rows[1];
        let b = &table.rows[2];
        assert_eq!(a.mean_accuracy, b.mean_accuracy);
        assert_eq!(a.mean_loss, b.mean_loss);
        assert_eq!(a.mean_total_backprops, b.mean_total_backprops);
    }

    #[test]
    #[ignore = "wall-clock dependent; run manually on a quiet machine"]
    fn tau_calibration_predicts_epoch_time() {
        let data = small_data(2000, 15);
        let model = init_model(&small_specs(), &RngStream::new(15).child(rng::INIT)).unwrap();
        let tau = measure_tau(&model, &data, 0.05, 1000, &RngStream::new(15)).unwrap();
        let (_, report) =
            train_vanilla(model, &data, &cfg(TrainMode::Vanilla, 0.0, 3)).unwrap();
        let measured = report.avg_epoch_time_s();
        let predicted = estimate_training_time(2000, tau, 1);
        let rel = (predicted - measured).abs() / measured;
        assert!(rel < 0.25, "tau model off by {rel}: {predicted} vs {measured}");
    }
}
