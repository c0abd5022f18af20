//! Finite-difference oracle for the analytic gradients.
//!
//! The oracle perturbs every parameter by ±h and recomputes the loss with
//! plain forward passes; it never touches the backward path it checks.

use redus_core::nn::{cross_entropy, init_model, GradientSet, LayerSpec, MlpModel, Mode};
use redus_core::rng::RngStream;

const STEP: f64 = 1e-5;
const MAX_REL_ERR: f64 = 1e-4;

fn loss(model: &MlpModel, input: &[f64], one_hot: &[f64]) -> f64 {
    let trace = model.forward(input, Mode::Infer).unwrap();
    cross_entropy(&trace.probabilities, one_hot)
}

/// Gradient of the loss for one parameter, by central difference.
fn numeric_grad(
    model: &MlpModel,
    input: &[f64],
    one_hot: &[f64],
    param_index: usize,
) -> f64 {
    let mut plus = model.clone();
    let mut minus = model.clone();
    let mut i = 0;
    plus.for_each_parameter_mut(|p| {
        if i == param_index {
            *p += STEP;
        }
        i += 1;
    });
    i = 0;
    minus.for_each_parameter_mut(|p| {
        if i == param_index {
            *p -= STEP;
        }
        i += 1;
    });
    (loss(&plus, input, one_hot) - loss(&minus, input, one_hot)) / (2.0 * STEP)
}

fn relative_error(a: f64, b: f64) -> f64 {
    (a - b).abs() / (a.abs() + b.abs()).max(1e-8)
}

fn flatten(grads: &GradientSet, model: &MlpModel) -> Vec<f64> {
    // Same parameter order as for_each_parameter: weights then bias per layer.
    let mut flat = Vec::with_capacity(model.parameter_count());
    for layer in 0..model.specs().len() {
        flat.extend_from_slice(&grads.weights[layer]);
        flat.extend_from_slice(&grads.biases[layer]);
    }
    flat
}

#[test]
fn analytic_gradients_match_central_differences() {
    // 4 -> 5 -> 3 network, dropout disabled, 20 random samples across
    // freshly initialized models.
    let specs = LayerSpec::stack(4, &[5], 3, 0.0).unwrap();
    let root = RngStream::new(20240);
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for round in 0..4 {
        let model = init_model(&specs, &root.child_idx("model", round)).unwrap();
        let mut rng = root.child_idx("inputs", round).rng();
        for _ in 0..5 {
            use rand::Rng;
            let input: Vec<f64> = (0..4).map(|_| rng.random_range(-2.0..2.0)).collect();
            let label: usize = rng.random_range(0..3);
            let mut one_hot = vec![0.0; 3];
            one_hot[label] = 1.0;

            let trace = model.forward(&input, Mode::Infer).unwrap();
            let analytic = model.backward(&trace, &one_hot).unwrap();
            let flat = flatten(&analytic, &model);
            for (idx, &a) in flat.iter().enumerate() {
                let n = numeric_grad(&model, &input, &one_hot, idx);
                let err = relative_error(a, n);
                worst = worst.max(err);
                assert!(
                    err < MAX_REL_ERR,
                    "parameter {idx}: analytic {a} vs numeric {n} (rel err {err})"
                );
            }
            checked += 1;
        }
    }
    assert_eq!(checked, 20);
    println!("gradient check: 20 samples, worst relative error {worst:.3e}");
}

#[test]
fn gradients_respect_dropout_masks() {
    // With dropout active, perturbing a parameter behind a dropped unit
    // must not change the loss along the traced path; the analytic
    // gradient for such parameters is exactly zero.
    let specs = LayerSpec::stack(6, &[10], 3, 0.5).unwrap();
    let model = init_model(&specs, &RngStream::new(7).child("init")).unwrap();
    let mut rng = RngStream::new(7).child("dropout").rng();
    let input = [0.4, -1.2, 0.9, 0.1, -0.6, 1.5];
    let trace = model.forward(&input, Mode::Train(&mut rng)).unwrap();
    let grads = model.backward(&trace, &[0.0, 0.0, 1.0]).unwrap();
    let masks = &trace.dropout_masks[0];
    assert!(masks.contains(&0.0), "seed must drop at least one unit");
    for (unit, &m) in masks.iter().enumerate() {
        if m == 0.0 {
            assert!(grads.weights[0][unit * 6..(unit + 1) * 6]
                .iter()
                .all(|&g| g == 0.0));
            assert_eq!(grads.biases[0][unit], 0.0);
        }
    }
}

#[test]
fn deeper_network_still_checks() {
    // Two hidden layers to exercise the through-layer recursion.
    let specs = LayerSpec::stack(3, &[6, 4], 2, 0.0).unwrap();
    let model = init_model(&specs, &RngStream::new(31).child("init")).unwrap();
    let input = [0.25, -0.75, 1.5];
    let one_hot = [0.0, 1.0];
    let trace = model.forward(&input, Mode::Infer).unwrap();
    let analytic = model.backward(&trace, &one_hot).unwrap();
    let flat = flatten(&analytic, &model);
    for (idx, &a) in flat.iter().enumerate() {
        let n = numeric_grad(&model, &input, &one_hot, idx);
        assert!(
            relative_error(a, n) < MAX_REL_ERR,
            "parameter {idx}: analytic {a} vs numeric {n}"
        );
    }
}
