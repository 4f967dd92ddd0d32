use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{forward, loss_and_grads, sgd_momentum_step, MlpParams, OptimizerState, TrainConfig};
use crate::dataset::{LabeledDataset, NUM_CLASSES};
use crate::seeds::seeded_rng;
use crate::{Error, Result};

/// A local training set that can fill mini-batches on demand.
pub trait Samples {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn input_dim(&self) -> usize;

    /// Copies samples `positions` (0-based within this set) into the first
    /// `positions.len()` rows of `x` and into `y`.
    fn fill(&self, positions: &[usize], x: &mut Array2<f64>, y: &mut Vec<usize>);
}

/// Samples held as a dense matrix.
#[derive(Debug, Clone)]
pub struct InMemory {
    pub x: Array2<f64>,
    pub y: Vec<usize>,
}

impl Samples for InMemory {
    fn len(&self) -> usize {
        self.y.len()
    }

    fn input_dim(&self) -> usize {
        self.x.ncols()
    }

    fn fill(&self, positions: &[usize], x: &mut Array2<f64>, y: &mut Vec<usize>) {
        y.clear();
        for (r, &p) in positions.iter().enumerate() {
            x.row_mut(r).assign(&self.x.row(p));
            y.push(self.y[p]);
        }
    }
}

/// A node's slice of a shared corpus.
#[derive(Debug, Clone, Copy)]
pub struct DatasetView<'a> {
    pub dataset: &'a LabeledDataset,
    pub indices: &'a [usize],
}

impl Samples for DatasetView<'_> {
    fn len(&self) -> usize {
        self.indices.len()
    }

    fn input_dim(&self) -> usize {
        self.dataset.feature_dim()
    }

    fn fill(&self, positions: &[usize], x: &mut Array2<f64>, y: &mut Vec<usize>) {
        y.clear();
        for (r, &p) in positions.iter().enumerate() {
            let i = self.indices[p];
            let mut row = x.row_mut(r);
            self.dataset
                .write_features(i, row.as_slice_mut().expect("standard layout"));
            y.push(self.dataset.label(i));
        }
    }
}

/// Runs `cfg.local_epochs` passes over `data`, reshuffling every epoch with
/// a generator seeded from `cfg.seed`. The last mini-batch of an epoch may be
/// smaller than `cfg.batch_size`.
pub fn train_local<S: Samples + ?Sized>(
    params: &mut MlpParams,
    state: &mut OptimizerState,
    data: &S,
    cfg: &TrainConfig,
) -> Result<()> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::Configuration("local dataset is empty".into()));
    }
    if data.input_dim() != params.input_dim() {
        return Err(Error::Shape(format!(
            "samples have {} features, network expects {}",
            data.input_dim(),
            params.input_dim()
        )));
    }
    let mut rng = seeded_rng(cfg.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let batch = cfg.batch_size.min(data.len());
    let mut x = Array2::zeros((batch, data.input_dim()));
    let mut y = Vec::with_capacity(batch);
    for _ in 0..cfg.local_epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(batch) {
            data.fill(chunk, &mut x, &mut y);
            let rows = x.slice(ndarray::s![..chunk.len(), ..]);
            let (_, grads) = loss_and_grads(params, rows, &y)?;
            sgd_momentum_step(params, state, &grads, cfg.learning_rate, cfg.momentum)?;
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalResult {
    pub accuracy: f64,
    /// `confusion[true][predicted]`
    pub confusion: [[u64; NUM_CLASSES]; NUM_CLASSES],
    /// Row-normalised diagonal (recall); 0 for classes absent from the set.
    pub per_class_accuracy: [f64; NUM_CLASSES],
}

impl EvalResult {
    pub fn from_confusion(confusion: [[u64; NUM_CLASSES]; NUM_CLASSES]) -> Self {
        let total: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..NUM_CLASSES).map(|c| confusion[c][c]).sum();
        let mut per_class_accuracy = [0.0; NUM_CLASSES];
        for (c, acc) in per_class_accuracy.iter_mut().enumerate() {
            let row: u64 = confusion[c].iter().sum();
            if row > 0 {
                *acc = confusion[c][c] as f64 / row as f64;
            }
        }
        Self {
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
            confusion,
            per_class_accuracy,
        }
    }
}

const EVAL_CHUNK: usize = 512;

/// Argmax accuracy and confusion counts over the samples whose true class is
/// in `class_filter` (all samples when `None`).
pub fn evaluate(
    params: &MlpParams,
    x: ArrayView2<f64>,
    labels: &[usize],
    class_filter: Option<&[usize]>,
) -> Result<EvalResult> {
    if labels.len() != x.nrows() {
        return Err(Error::Shape(format!("{} labels for {} samples", labels.len(), x.nrows())));
    }
    if params.output_dim() != NUM_CLASSES {
        return Err(Error::Shape(format!(
            "network has {} outputs, evaluation expects {NUM_CLASSES}",
            params.output_dim()
        )));
    }
    let keep: Vec<usize> = (0..labels.len())
        .filter(|&i| class_filter.is_none_or(|f| f.contains(&labels[i])))
        .collect();
    if keep.is_empty() {
        return Err(Error::Configuration("no evaluation samples after class filter".into()));
    }
    let mut confusion = [[0u64; NUM_CLASSES]; NUM_CLASSES];
    let all = keep.len() == labels.len();
    for chunk in keep.chunks(EVAL_CHUNK) {
        let logits = if all {
            forward(params, x.slice(ndarray::s![chunk[0]..chunk[0] + chunk.len(), ..]))?
        } else {
            forward(params, x.select(Axis(0), chunk).view())?
        };
        for (row, &i) in logits.rows().into_iter().zip(chunk) {
            let predicted = row
                .iter()
                .enumerate()
                .fold((0, f64::NEG_INFINITY), |best, (k, &v)| if v > best.1 { (k, v) } else { best })
                .0;
            confusion[labels[i]][predicted] += 1;
        }
    }
    Ok(EvalResult::from_confusion(confusion))
}
