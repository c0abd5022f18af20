//! Minimal dense feed-forward network with analytic backpropagation.
//!
//! Everything is `f64`, plain `Vec` buffers, single-threaded. Layers are
//! affine transforms (row-major weight matrices, shape `out_width x
//! in_width`) followed by an activation and optional inverted dropout; the
//! final layer output goes through a softmax. Train-mode forward passes
//! record a [`ForwardTrace`] so [`MlpModel::backward`] can replay the exact
//! dropout masks.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Floor applied to probabilities before `ln` so confident mistakes produce
/// a large but finite loss.
pub const LOG_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
}

impl Activation {
    fn apply(self, z: f64) -> f64 {
        match self {
            Activation::Relu => z.max(0.0),
            Activation::Identity => z,
        }
    }

    fn derivative(self, z: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

/// Shape and behavior of one dense layer. `dropout_rate` applies inverted
/// dropout to the layer's activations in train mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LayerSpec {
    pub input_width: usize,
    pub output_width: usize,
    pub activation: Activation,
    pub dropout_rate: f64,
}

impl LayerSpec {
    pub fn new(
        input_width: usize,
        output_width: usize,
        activation: Activation,
        dropout_rate: f64,
    ) -> Result<Self> {
        if input_width == 0 || output_width == 0 {
            return Err(Error::config("layer widths must be positive"));
        }
        if !(0.0..1.0).contains(&dropout_rate) {
            return Err(Error::config(format!(
                "dropout rate must be in [0, 1), got {dropout_rate}"
            )));
        }
        Ok(LayerSpec {
            input_width,
            output_width,
            activation,
            dropout_rate,
        })
    }

    /// Standard classifier stack: ReLU hidden layers with dropout, identity
    /// output layer without dropout.
    pub fn stack(
        input_width: usize,
        hidden: &[usize],
        output_width: usize,
        dropout_rate: f64,
    ) -> Result<Vec<LayerSpec>> {
        let mut specs = Vec::with_capacity(hidden.len() + 1);
        let mut prev = input_width;
        for &width in hidden {
            specs.push(LayerSpec::new(prev, width, Activation::Relu, dropout_rate)?);
            prev = width;
        }
        specs.push(LayerSpec::new(prev, output_width, Activation::Identity, 0.0)?);
        Ok(specs)
    }
}

fn validate_chain(specs: &[LayerSpec]) -> Result<()> {
    if specs.is_empty() {
        return Err(Error::config("model needs at least one layer"));
    }
    for pair in specs.windows(2) {
        if pair[0].output_width != pair[1].input_width {
            return Err(Error::config(format!(
                "layer widths do not chain: {} -> {}",
                pair[0].output_width, pair[1].input_width
            )));
        }
    }
    Ok(())
}

/// Dense network parameters plus the specs they were built from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    specs: Vec<LayerSpec>,
    /// Row-major `output_width x input_width` matrix per layer.
    weights: Vec<Vec<f64>>,
    biases: Vec<Vec<f64>>,
}

/// Per-layer gradients, shapes mirroring [`MlpModel`].
#[derive(Debug, Clone)]
pub struct GradientSet {
    pub weights: Vec<Vec<f64>>,
    pub biases: Vec<Vec<f64>>,
}

/// Forward-pass caches needed by the backward pass.
///
/// `activations[l]` is layer `l`'s output after activation *and* dropout,
/// i.e. exactly what the next layer consumed. Masks hold `0` or `1/(1-p)`
/// (inverted dropout); infer mode records all-ones masks.
#[derive(Debug, Clone)]
pub struct ForwardTrace {
    pub input: Vec<f64>,
    pub pre_activations: Vec<Vec<f64>>,
    pub activations: Vec<Vec<f64>>,
    pub dropout_masks: Vec<Vec<f64>>,
    pub probabilities: Vec<f64>,
}

/// Forward-pass mode. Train mode draws fresh dropout masks from the carried
/// generator; infer mode disables dropout.
pub enum Mode<'a> {
    Train(&'a mut ChaCha8Rng),
    Infer,
}

/// Build a model with He-style scaled-uniform weights, `U(-l, l)` with
/// `l = sqrt(6 / input_width)` per layer, and zero biases.
pub fn init_model(specs: &[LayerSpec], stream: &RngStream) -> Result<MlpModel> {
    validate_chain(specs)?;
    let mut rng = stream.rng();
    let mut weights = Vec::with_capacity(specs.len());
    let mut biases = Vec::with_capacity(specs.len());
    for spec in specs {
        let limit = (6.0 / spec.input_width as f64).sqrt();
        let count = spec.output_width * spec.input_width;
        let layer: Vec<f64> = (0..count).map(|_| rng.random_range(-limit..limit)).collect();
        weights.push(layer);
        biases.push(vec![0.0; spec.output_width]);
    }
    Ok(MlpModel {
        specs: specs.to_vec(),
        weights,
        biases,
    })
}

impl MlpModel {
    /// All-zero parameters. Useful as a fixed uniform predictor: every class
    /// gets the same logit and argmax tie-breaking picks class 0.
    pub fn zeros(specs: &[LayerSpec]) -> Result<Self> {
        validate_chain(specs)?;
        Ok(MlpModel {
            specs: specs.to_vec(),
            weights: specs
                .iter()
                .map(|s| vec![0.0; s.output_width * s.input_width])
                .collect(),
            biases: specs.iter().map(|s| vec![0.0; s.output_width]).collect(),
        })
    }

    pub fn specs(&self) -> &[LayerSpec] {
        &self.specs
    }

    pub fn input_width(&self) -> usize {
        self.specs[0].input_width
    }

    pub fn output_width(&self) -> usize {
        self.specs[self.specs.len() - 1].output_width
    }

    pub fn layer_weights(&self, layer: usize) -> &[f64] {
        &self.weights[layer]
    }

    pub fn layer_biases(&self, layer: usize) -> &[f64] {
        &self.biases[layer]
    }

    pub fn parameter_count(&self) -> usize {
        self.weights.iter().map(Vec::len).sum::<usize>()
            + self.biases.iter().map(Vec::len).sum::<usize>()
    }

    /// Visit every parameter in a fixed order (weights then bias, layer by
    /// layer). Used by aggregation and by tests that need a flat view.
    pub fn for_each_parameter(&self, mut f: impl FnMut(f64)) {
        for layer in 0..self.specs.len() {
            self.weights[layer].iter().for_each(|&w| f(w));
            self.biases[layer].iter().for_each(|&b| f(b));
        }
    }

    pub fn for_each_parameter_mut(&mut self, mut f: impl FnMut(&mut f64)) {
        for layer in 0..self.specs.len() {
            self.weights[layer].iter_mut().for_each(|w| f(w));
            self.biases[layer].iter_mut().for_each(|b| f(b));
        }
    }

    /// Largest absolute componentwise difference between two shape-identical
    /// models.
    pub fn max_parameter_delta(&self, other: &MlpModel) -> Result<f64> {
        if self.specs != other.specs {
            return Err(Error::data("model shapes differ"));
        }
        let mut delta: f64 = 0.0;
        for layer in 0..self.specs.len() {
            for (a, b) in self.weights[layer].iter().zip(&other.weights[layer]) {
                delta = delta.max((a - b).abs());
            }
            for (a, b) in self.biases[layer].iter().zip(&other.biases[layer]) {
                delta = delta.max((a - b).abs());
            }
        }
        Ok(delta)
    }

    /// Run the network on one input row. Train mode draws inverted-dropout
    /// masks; infer mode uses all-ones masks. The output probabilities are
    /// the softmax of the last layer's output.
    pub fn forward(&self, input: &[f64], mode: Mode<'_>) -> Result<ForwardTrace> {
        if input.len() != self.input_width() {
            return Err(Error::data(format!(
                "input length {} does not match input width {}",
                input.len(),
                self.input_width()
            )));
        }
        if input.iter().any(|x| !x.is_finite()) {
            return Err(Error::data("non-finite input feature"));
        }

        let mut dropout_rng = match mode {
            Mode::Train(rng) => Some(rng),
            Mode::Infer => None,
        };

        let layer_count = self.specs.len();
        let mut pre_activations = Vec::with_capacity(layer_count);
        let mut activations = Vec::with_capacity(layer_count);
        let mut dropout_masks = Vec::with_capacity(layer_count);
        let mut current = input.to_vec();

        for (layer, spec) in self.specs.iter().enumerate() {
            let weights = &self.weights[layer];
            let biases = &self.biases[layer];
            let mut z = vec![0.0; spec.output_width];
            for (unit, zu) in z.iter_mut().enumerate() {
                let row = &weights[unit * spec.input_width..(unit + 1) * spec.input_width];
                let mut acc = biases[unit];
                for (w, x) in row.iter().zip(&current) {
                    acc += w * x;
                }
                *zu = acc;
            }

            let mask: Vec<f64> = if spec.dropout_rate > 0.0 {
                match dropout_rng.as_deref_mut() {
                    Some(rng) => {
                        let keep_scale = 1.0 / (1.0 - spec.dropout_rate);
                        (0..spec.output_width)
                            .map(|_| {
                                if rng.random::<f64>() < spec.dropout_rate {
                                    0.0
                                } else {
                                    keep_scale
                                }
                            })
                            .collect()
                    }
                    None => vec![1.0; spec.output_width],
                }
            } else {
                vec![1.0; spec.output_width]
            };

            let h: Vec<f64> = z
                .iter()
                .zip(&mask)
                .map(|(&zu, &m)| spec.activation.apply(zu) * m)
                .collect();

            pre_activations.push(z);
            dropout_masks.push(mask);
            current = h.clone();
            activations.push(h);
        }

        let probabilities = softmax(&current);
        Ok(ForwardTrace {
            input: input.to_vec(),
            pre_activations,
            activations,
            dropout_masks,
            probabilities,
        })
    }

    /// Analytic gradient of the single-sample cross-entropy with respect to
    /// every parameter, replaying the trace's dropout masks.
    pub fn backward(&self, trace: &ForwardTrace, one_hot: &[f64]) -> Result<GradientSet> {
        let layer_count = self.specs.len();
        if one_hot.len() != self.output_width()
            || trace.pre_activations.len() != layer_count
            || trace.input.len() != self.input_width()
        {
            return Err(Error::Internal("trace/label shape mismatch".into()));
        }

        let mut grads = GradientSet::zeros_like(self);

        // Softmax + cross-entropy collapse to (p - y) at the last layer's
        // output; dropout masks and activation derivatives peel off per layer.
        let mut d_output: Vec<f64> = trace
            .probabilities
            .iter()
            .zip(one_hot)
            .map(|(&p, &y)| p - y)
            .collect();

        for layer in (0..layer_count).rev() {
            let spec = &self.specs[layer];
            let d_z: Vec<f64> = d_output
                .iter()
                .zip(&trace.dropout_masks[layer])
                .zip(&trace.pre_activations[layer])
                .map(|((&d, &m), &z)| d * m * spec.activation.derivative(z))
                .collect();

            let below: &[f64] = if layer == 0 {
                &trace.input
            } else {
                &trace.activations[layer - 1]
            };

            let w_grad = &mut grads.weights[layer];
            for (unit, &dz) in d_z.iter().enumerate() {
                grads.biases[layer][unit] = dz;
                let row = &mut w_grad[unit * spec.input_width..(unit + 1) * spec.input_width];
                for (g, &x) in row.iter_mut().zip(below) {
                    *g = dz * x;
                }
            }

            if layer > 0 {
                let weights = &self.weights[layer];
                let mut d_below = vec![0.0; spec.input_width];
                for (unit, &dz) in d_z.iter().enumerate() {
                    let row = &weights[unit * spec.input_width..(unit + 1) * spec.input_width];
                    for (d, &w) in d_below.iter_mut().zip(row) {
                        *d += w * dz;
                    }
                }
                d_output = d_below;
            }
        }

        Ok(grads)
    }

    /// One SGD update: every parameter becomes `p - lr * g`. Gradients must
    /// be finite; the caller is responsible for batch averaging.
    pub fn sgd_step(&mut self, grads: &GradientSet, learning_rate: f64) -> Result<()> {
        for layer in 0..self.specs.len() {
            if grads.weights[layer].len() != self.weights[layer].len()
                || grads.biases[layer].len() != self.biases[layer].len()
            {
                return Err(Error::Internal("gradient shape mismatch".into()));
            }
            if grads.weights[layer].iter().any(|g| !g.is_finite())
                || grads.biases[layer].iter().any(|g| !g.is_finite())
            {
                return Err(Error::numeric(format!(
                    "non-finite gradient in layer {layer}"
                )));
            }
        }
        for layer in 0..self.specs.len() {
            for (w, g) in self.weights[layer].iter_mut().zip(&grads.weights[layer]) {
                *w -= learning_rate * g;
            }
            for (b, g) in self.biases[layer].iter_mut().zip(&grads.biases[layer]) {
                *b -= learning_rate * g;
            }
        }
        Ok(())
    }

    /// Infer-mode argmax labels for a row-major feature matrix. Ties break
    /// to the lowest class index.
    pub fn predict(&self, features: &[f64]) -> Result<Vec<u32>> {
        let width = self.input_width();
        if width == 0 || features.len() % width != 0 {
            return Err(Error::data(format!(
                "feature matrix length {} is not a multiple of input width {}",
                features.len(),
                width
            )));
        }
        features
            .chunks(width)
            .map(|row| {
                let trace = self.forward(row, Mode::Infer)?;
                Ok(argmax(&trace.probabilities) as u32)
            })
            .collect()
    }
}

impl GradientSet {
    pub fn zeros_like(model: &MlpModel) -> Self {
        GradientSet {
            weights: model.weights.iter().map(|w| vec![0.0; w.len()]).collect(),
            biases: model.biases.iter().map(|b| vec![0.0; b.len()]).collect(),
        }
    }

    pub fn add_assign(&mut self, other: &GradientSet) {
        for (a, b) in self.weights.iter_mut().zip(&other.weights) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        for (a, b) in self.biases.iter_mut().zip(&other.biases) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for layer in self.weights.iter_mut().chain(self.biases.iter_mut()) {
            for g in layer.iter_mut() {
                *g *= factor;
            }
        }
    }
}

/// Numerically stable softmax.
pub fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|&z| (z - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

/// Index of the largest value; ties break to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best_value {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Cross-entropy `-sum_c y_c ln(p_c)` with probabilities clamped below by
/// [`LOG_CLAMP`].
pub fn cross_entropy(probabilities: &[f64], one_hot: &[f64]) -> f64 {
    debug_assert_eq!(probabilities.len(), one_hot.len());
    debug_assert!((probabilities.iter().sum::<f64>() - 1.0).abs() <= 1e-9);
    probabilities
        .iter()
        .zip(one_hot)
        .map(|(&p, &y)| -y * p.max(LOG_CLAMP).ln())
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toy_stream() -> RngStream {
        RngStream::new(123)
    }

    #[test]
    fn init_shapes_match_reference_architecture() {
        let specs = LayerSpec::stack(46, &[256, 512, 256, 128], 34, 0.2).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let expected = [(256, 46), (512, 256), (256, 512), (128, 256), (34, 128)];
        for (layer, &(out, inp)) in expected.iter().enumerate() {
            assert_eq!(model.layer_weights(layer).len(), out * inp);
            assert_eq!(model.layer_biases(layer).len(), out);
        }
    }

    #[test]
    fn init_biases_are_zero() {
        let specs = vec![LayerSpec::new(2, 2, Activation::Relu, 0.0).unwrap()];
        let model = init_model(&specs, &toy_stream()).unwrap();
        assert_eq!(model.layer_biases(0), &[0.0, 0.0]);
    }

    #[test]
    fn init_is_deterministic() {
        let specs = LayerSpec::stack(4, &[8], 3, 0.1).unwrap();
        let a = init_model(&specs, &toy_stream()).unwrap();
        let b = init_model(&specs, &toy_stream()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn init_rejects_broken_chain() {
        let specs = vec![
            LayerSpec::new(4, 8, Activation::Relu, 0.0).unwrap(),
            LayerSpec::new(9, 3, Activation::Identity, 0.0).unwrap(),
        ];
        assert!(matches!(
            init_model(&specs, &toy_stream()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn zero_model_is_uniform_and_predicts_class_zero() {
        let specs = LayerSpec::stack(5, &[4], 3, 0.0).unwrap();
        let model = MlpModel::zeros(&specs).unwrap();
        let trace = model.forward(&[1.0, -2.0, 0.5, 3.0, 0.0], Mode::Infer).unwrap();
        for &p in &trace.probabilities {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
        let preds = model.predict(&[1.0, -2.0, 0.5, 3.0, 0.0]).unwrap();
        assert_eq!(preds, vec![0]);
    }

    #[test]
    fn forward_rejects_non_finite_input() {
        let specs = vec![LayerSpec::new(2, 2, Activation::Identity, 0.0).unwrap()];
        let model = MlpModel::zeros(&specs).unwrap();
        assert!(matches!(
            model.forward(&[f64::NAN, 0.0], Mode::Infer),
            Err(Error::Data(_))
        ));
    }

    #[test]
    fn zero_dropout_train_equals_infer() {
        let specs = LayerSpec::stack(3, &[5], 2, 0.0).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let input = [0.3, -0.7, 1.1];
        let mut rng = toy_stream().child(crate::rng::DROPOUT).rng();
        let train = model.forward(&input, Mode::Train(&mut rng)).unwrap();
        let infer = model.forward(&input, Mode::Infer).unwrap();
        assert_eq!(train.probabilities, infer.probabilities);
        assert_eq!(train.activations, infer.activations);
    }

    #[test]
    fn identity_single_layer_argmax_matches_hand_evaluation() {
        // Weights = I, bias = 0: logits equal the input, so softmax of
        // [2, -1] favors class 0.
        let specs = vec![LayerSpec::new(2, 2, Activation::Identity, 0.0).unwrap()];
        let mut model = MlpModel::zeros(&specs).unwrap();
        let grads = GradientSet {
            weights: vec![vec![-1.0, 0.0, 0.0, -1.0]],
            biases: vec![vec![0.0, 0.0]],
        };
        model.sgd_step(&grads, 1.0).unwrap(); // weights now identity
        let trace = model.forward(&[2.0, -1.0], Mode::Infer).unwrap();
        assert_eq!(argmax(&trace.probabilities), 0);
        let expected = (2.0f64).exp() / ((2.0f64).exp() + (-1.0f64).exp());
        assert!((trace.probabilities[0] - expected).abs() < 1e-12);
    }

    #[test]
    fn cross_entropy_examples() {
        // Perfect prediction: loss only from the clamp.
        assert!(cross_entropy(&[1.0, 0.0], &[1.0, 0.0]) <= 1.1e-12);
        // Uniform over 34 classes.
        let uniform = vec![1.0 / 34.0; 34];
        let mut one_hot = vec![0.0; 34];
        one_hot[7] = 1.0;
        assert!((cross_entropy(&uniform, &one_hot) - 34f64.ln()).abs() < 1e-9);
        assert!((cross_entropy(&uniform, &one_hot) - 3.526361).abs() < 1e-6);
        // Direct formula.
        assert!((cross_entropy(&[0.25, 0.75], &[0.0, 1.0]) - 0.75f64.ln().abs()).abs() < 1e-9);
        assert!((cross_entropy(&[0.25, 0.75], &[0.0, 1.0]) - 0.287682).abs() < 1e-6);
    }

    #[test]
    fn output_bias_gradient_is_probability_minus_label() {
        let specs = LayerSpec::stack(4, &[6], 3, 0.0).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let input = [0.1, 0.2, -0.3, 0.4];
        let mut rng = toy_stream().child(crate::rng::DROPOUT).rng();
        let trace = model.forward(&input, Mode::Train(&mut rng)).unwrap();
        let one_hot = [0.0, 1.0, 0.0];
        let grads = model.backward(&trace, &one_hot).unwrap();
        for (unit, &g) in grads.biases[1].iter().enumerate() {
            let expected = trace.probabilities[unit] - one_hot[unit];
            assert!((g - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn dropped_unit_gets_no_incoming_weight_gradient() {
        let specs = LayerSpec::stack(3, &[8], 2, 0.5).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let mut rng = toy_stream().child(crate::rng::DROPOUT).rng();
        let trace = model.forward(&[1.0, -1.0, 0.5], Mode::Train(&mut rng)).unwrap();
        let masks = &trace.dropout_masks[0];
        assert!(masks.iter().any(|&m| m == 0.0), "want at least one dropped unit");
        let grads = model.backward(&trace, &[1.0, 0.0]).unwrap();
        for (unit, &m) in masks.iter().enumerate() {
            if m == 0.0 {
                let row = &grads.weights[0][unit * 3..(unit + 1) * 3];
                assert!(row.iter().all(|&g| g == 0.0));
                assert_eq!(grads.biases[0][unit], 0.0);
            }
        }
    }

    #[test]
    fn dropout_masks_are_inverted_scale() {
        let specs = LayerSpec::stack(2, &[16], 2, 0.2).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let mut rng = toy_stream().child(crate::rng::DROPOUT).rng();
        let trace = model.forward(&[1.0, 1.0], Mode::Train(&mut rng)).unwrap();
        for &m in &trace.dropout_masks[0] {
            assert!(m == 0.0 || (m - 1.25).abs() < 1e-15);
        }
    }

    #[test]
    fn inverted_dropout_expectation_matches_infer() {
        // Mean of train-mode activations over many mask draws approximates
        // the infer-mode activations within 2% relative error.
        let specs = LayerSpec::stack(3, &[4], 2, 0.2).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        let input = [0.9, -0.4, 1.3];
        let infer = model.forward(&input, Mode::Infer).unwrap();
        let mut rng = toy_stream().child(crate::rng::DROPOUT).rng();
        let draws = 20_000;
        let mut mean = vec![0.0; 4];
        for _ in 0..draws {
            let trace = model.forward(&input, Mode::Train(&mut rng)).unwrap();
            for (m, &a) in mean.iter_mut().zip(&trace.activations[0]) {
                *m += a;
            }
        }
        for (m, &a) in mean.iter_mut().zip(&infer.activations[0]) {
            *m /= draws as f64;
            if a.abs() > 1e-9 {
                assert!(
                    ((*m - a) / a).abs() < 0.02,
                    "mean {m} vs infer {a} beyond 2%"
                );
            }
        }
    }

    #[test]
    fn sgd_step_examples() {
        let specs = vec![LayerSpec::new(1, 1, Activation::Identity, 0.0).unwrap()];
        let mut model = MlpModel::zeros(&specs).unwrap();
        // Put the single weight at 1.0 first.
        model
            .sgd_step(
                &GradientSet {
                    weights: vec![vec![-1.0]],
                    biases: vec![vec![0.0]],
                },
                1.0,
            )
            .unwrap();
        let grads = GradientSet {
            weights: vec![vec![2.0]],
            biases: vec![vec![0.0]],
        };
        model.sgd_step(&grads, 0.01).unwrap();
        assert!((model.layer_weights(0)[0] - 0.98).abs() < 1e-15);

        let before = model.clone();
        model
            .sgd_step(&GradientSet::zeros_like(&model), 0.01)
            .unwrap();
        assert_eq!(model, before);
        model.sgd_step(&grads, 0.0).unwrap();
        assert_eq!(model, before);
    }

    #[test]
    fn sgd_step_rejects_non_finite_gradient() {
        let specs = vec![LayerSpec::new(1, 1, Activation::Identity, 0.0).unwrap()];
        let mut model = MlpModel::zeros(&specs).unwrap();
        let grads = GradientSet {
            weights: vec![vec![f64::INFINITY]],
            biases: vec![vec![0.0]],
        };
        assert!(matches!(
            model.sgd_step(&grads, 0.1),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn predict_single_row_returns_length_one() {
        let specs = LayerSpec::stack(3, &[4], 2, 0.0).unwrap();
        let model = init_model(&specs, &toy_stream()).unwrap();
        assert_eq!(model.predict(&[0.1, 0.2, 0.3]).unwrap().len(), 1);
    }

    proptest! {
        #[test]
        fn softmax_sums_to_one(logits in proptest::collection::vec(-50.0f64..50.0, 1..40)) {
            let p = softmax(&logits);
            let sum: f64 = p.iter().sum();
            prop_assert!((sum - 1.0).abs() <= 1e-9);
            prop_assert!(p.iter().all(|&x| x >= 0.0));
        }
    }
}
