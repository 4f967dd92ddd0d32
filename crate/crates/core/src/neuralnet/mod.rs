//! Dense ReLU multilayer perceptron with softmax cross-entropy, trained by
//! mini-batch SGD with heavy-ball momentum.

mod checkpoint;
mod train;

use ndarray::{Array1, Array2, ArrayView2, Axis, Zip};
use rand::distr::{Distribution, Uniform};
use serde::{Deserialize, Serialize};

use crate::seeds::seeded_rng;
use crate::{Error, Result};

pub use checkpoint::{read_checkpoint, write_checkpoint};
pub use train::{evaluate, train_local, DatasetView, EvalResult, InMemory, Samples};

/// Hidden widths 512, 256, 128 between 784 inputs and 10 classes.
pub const DEFAULT_DIMS: [usize; 5] = [784, 512, 256, 128, 10];

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    /// `out_dim x in_dim`
    pub weights: Array2<f64>,
    pub bias: Array1<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlpParams {
    pub layers: Vec<Layer>,
}

impl MlpParams {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Shape("an MLP needs at least one layer".into()));
        }
        for (k, layer) in layers.iter().enumerate() {
            if layer.bias.len() != layer.weights.nrows() {
                return Err(Error::Shape(format!(
                    "layer {k}: bias length {} vs {} output rows",
                    layer.bias.len(),
                    layer.weights.nrows()
                )));
            }
            if k > 0 && layers[k - 1].weights.nrows() != layer.weights.ncols() {
                return Err(Error::Shape(format!(
                    "layer {k} expects {} inputs, previous layer emits {}",
                    layer.weights.ncols(),
                    layers[k - 1].weights.nrows()
                )));
            }
        }
        Ok(Self { layers })
    }

    /// Zero-valued parameters with the given layer widths.
    pub fn zeros(dims: &[usize]) -> Result<Self> {
        check_dims(dims)?;
        Ok(Self {
            layers: dims
                .windows(2)
                .map(|w| Layer {
                    weights: Array2::zeros((w[1], w[0])),
                    bias: Array1::zeros(w[1]),
                })
                .collect(),
        })
    }

    pub fn zeros_like(&self) -> Self {
        Self {
            layers: self
                .layers
                .iter()
                .map(|l| Layer {
                    weights: Array2::zeros(l.weights.raw_dim()),
                    bias: Array1::zeros(l.bias.raw_dim()),
                })
                .collect(),
        }
    }

    /// Layer widths, input first.
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = vec![self.layers[0].weights.ncols()];
        dims.extend(self.layers.iter().map(|l| l.weights.nrows()));
        dims
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights.ncols()
    }

    pub fn output_dim(&self) -> usize {
        self.layers[self.layers.len() - 1].weights.nrows()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    pub fn same_shape(&self, other: &MlpParams) -> bool {
        self.layers.len() == other.layers.len()
            && self
                .layers
                .iter()
                .zip(&other.layers)
                .all(|(a, b)| a.weights.dim() == b.weights.dim() && a.bias.len() == b.bias.len())
    }

    pub fn is_finite(&self) -> bool {
        self.layers
            .iter()
            .all(|l| l.weights.iter().chain(l.bias.iter()).all(|v| v.is_finite()))
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: f64, other: &MlpParams) {
        for (a, b) in self.layers.iter_mut().zip(&other.layers) {
            a.weights.scaled_add(alpha, &b.weights);
            a.bias.scaled_add(alpha, &b.bias);
        }
    }

    /// All values, layer by layer, weights (row-major) before bias.
    pub fn flat_values(&self) -> impl Iterator<Item = f64> + '_ {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()).copied())
    }

    pub fn flat_values_mut(&mut self) -> impl Iterator<Item = &mut f64> + '_ {
        self.layers.iter_mut().flat_map(|l| l.weights.iter_mut().chain(l.bias.iter_mut()))
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.len() < 2 || dims.contains(&0) {
        return Err(Error::Parameter(format!(
            "layer widths must list at least input and output, all positive: {dims:?}"
        )));
    }
    Ok(())
}

/// Velocity buffers for SGD with momentum, congruent with the parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerState {
    pub velocity: MlpParams,
}

impl OptimizerState {
    pub fn new(params: &MlpParams) -> Self {
        Self {
            velocity: params.zeros_like(),
        }
    }

    pub fn reset(&mut self) {
        self.velocity.flat_values_mut().for_each(|v| *v = 0.0);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub momentum: f64,
    pub local_epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            momentum: 0.5,
            local_epochs: 100,
            batch_size: 32,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Configuration(format!(
                "learning_rate must be positive, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::Configuration(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.batch_size == 0 {
            return Err(Error::Configuration("batch_size must be positive".into()));
        }
        Ok(())
    }
}

/// Glorot-uniform weights in `±sqrt(6 / (fan_in + fan_out))`, zero biases.
pub fn init_mlp(dims: &[usize], seed: u64) -> Result<MlpParams> {
    check_dims(dims)?;
    let mut rng = seeded_rng(seed);
    let mut params = MlpParams::zeros(dims)?;
    for layer in &mut params.layers {
        let (fan_out, fan_in) = layer.weights.dim();
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        let dist = Uniform::new_inclusive(-limit, limit).expect("finite bounds");
        layer.weights.iter_mut().for_each(|w| *w = dist.sample(&mut rng));
    }
    Ok(params)
}

fn check_input(params: &MlpParams, x: &ArrayView2<f64>) -> Result<()> {
    if x.ncols() != params.input_dim() {
        return Err(Error::Shape(format!(
            "input has {} features, network expects {}",
            x.ncols(),
            params.input_dim()
        )));
    }
    Ok(())
}

fn affine(layer: &Layer, input: &ArrayView2<f64>) -> Array2<f64> {
    let mut z = input.dot(&layer.weights.t());
    z += &layer.bias;
    z
}

fn relu_inplace(z: &mut Array2<f64>) {
    z.mapv_inplace(|v| v.max(0.0));
}

/// Logits for a batch (one sample per row): affine + ReLU on hidden layers,
/// affine only on the output layer.
pub fn forward(params: &MlpParams, x: ArrayView2<f64>) -> Result<Array2<f64>> {
    check_input(params, &x)?;
    let last = params.layers.len() - 1;
    let mut act = affine(&params.layers[0], &x);
    if last > 0 {
        relu_inplace(&mut act);
    }
    for (k, layer) in params.layers.iter().enumerate().skip(1) {
        act = affine(layer, &act.view());
        if k < last {
            relu_inplace(&mut act);
        }
    }
    Ok(act)
}

/// Row-wise log-sum-exp.
fn log_sum_exp(logits: &Array2<f64>) -> Array1<f64> {
    logits.map_axis(Axis(1), |row| {
        let m = row.fold(f64::NEG_INFINITY, |a, &b| a.max(b));
        m + row.iter().map(|&v| (v - m).exp()).sum::<f64>().ln()
    })
}

/// Mean softmax cross-entropy over the batch and its gradient with respect to
/// every parameter.
pub fn loss_and_grads(params: &MlpParams, x: ArrayView2<f64>, labels: &[usize]) -> Result<(f64, MlpParams)> {
    check_input(params, &x)?;
    let batch = x.nrows();
    if batch == 0 {
        return Err(Error::Parameter("empty batch".into()));
    }
    if labels.len() != batch {
        return Err(Error::Shape(format!("{} labels for {batch} samples", labels.len())));
    }
    let classes = params.output_dim();
    if let Some(&bad) = labels.iter().find(|&&y| y >= classes) {
        return Err(Error::Parameter(format!("label {bad} outside 0..{classes}")));
    }

    // activations[k] is the input to layer k
    let last = params.layers.len() - 1;
    let mut activations: Vec<Array2<f64>> = Vec::with_capacity(params.layers.len());
    let mut z = affine(&params.layers[0], &x);
    for layer in params.layers.iter().skip(1) {
        relu_inplace(&mut z);
        let next = affine(layer, &z.view());
        activations.push(std::mem::replace(&mut z, next));
    }
    let logits = z;

    let lse = log_sum_exp(&logits);
    let loss = labels
        .iter()
        .enumerate()
        .map(|(r, &y)| lse[r] - logits[[r, y]])
        .sum::<f64>()
        / batch as f64;

    // dL/dlogits = (softmax - onehot) / batch
    let inv_batch = 1.0 / batch as f64;
    let mut delta = logits;
    Zip::from(delta.rows_mut()).and(&lse).for_each(|mut row, &l| {
        row.mapv_inplace(|v| (v - l).exp() * inv_batch);
    });
    for (r, &y) in labels.iter().enumerate() {
        delta[[r, y]] -= inv_batch;
    }

    let mut grads = params.zeros_like();
    for k in (0..=last).rev() {
        let input = if k == 0 { x.view() } else { activations[k - 1].view() };
        grads.layers[k].weights = delta.t().dot(&input);
        grads.layers[k].bias = delta.sum_axis(Axis(0));
        if k > 0 {
            let mut upstream = delta.dot(&params.layers[k].weights);
            Zip::from(&mut upstream).and(&activations[k - 1]).for_each(|d, &a| {
                if a <= 0.0 {
                    *d = 0.0;
                }
            });
            delta = upstream;
        }
    }
    Ok((loss, grads))
}

/// Heavy-ball update: `v <- momentum * v + g`, `w <- w - lr * v`.
pub fn sgd_momentum_step(
    params: &mut MlpParams,
    state: &mut OptimizerState,
    grads: &MlpParams,
    learning_rate: f64,
    momentum: f64,
) -> Result<()> {
    if !params.same_shape(grads) || !params.same_shape(&state.velocity) {
        return Err(Error::Shape("parameters, gradients and velocity differ in shape".into()));
    }
    for ((p, v), g) in params.layers.iter_mut().zip(&mut state.velocity.layers).zip(&grads.layers) {
        Zip::from(&mut p.weights).and(&mut v.weights).and(&g.weights).for_each(|w, v, &g| {
            *v = momentum * *v + g;
            *w -= learning_rate * *v;
        });
        Zip::from(&mut p.bias).and(&mut v.bias).and(&g.bias).for_each(|w, v, &g| {
            *v = momentum * *v + g;
            *w -= learning_rate * *v;
        });
    }
    Ok(())
}
