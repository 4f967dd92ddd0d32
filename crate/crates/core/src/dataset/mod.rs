//! Labeled image corpora and their distribution across nodes.

mod idx;
mod partition;
mod synth;

use ndarray::Array2;

use crate::{Error, Result};

pub use idx::{load_idx, parse_idx_images, parse_idx_labels, write_idx_images, write_idx_labels};
pub use partition::{
    apply_community_swap, build_centrality_partition, build_community_partition, select_focus_nodes,
    CentralityFocus, ClassGroups, CommunityClasses, DistributionStrategy, Focus, Metric, NodeRole,
    PartitionPlan,
};
pub use synth::synthetic_digits;

pub const NUM_CLASSES: usize = 10;

/// Immutable corpus of byte-valued images with class labels. Feature values
/// are the raw bytes divided by 255.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    rows: usize,
    cols: usize,
    pixels: Vec<u8>,
    labels: Vec<u8>,
}

impl LabeledDataset {
    pub fn new(name: impl Into<String>, rows: usize, cols: usize, pixels: Vec<u8>, labels: Vec<u8>) -> Result<Self> {
        let dim = rows * cols;
        if dim == 0 || pixels.len() != dim * labels.len() {
            return Err(Error::Shape(format!(
                "{} pixel bytes do not match {} labels of {rows}x{cols}",
                pixels.len(),
                labels.len()
            )));
        }
        if let Some(&bad) = labels.iter().find(|&&l| l as usize >= NUM_CLASSES) {
            return Err(Error::format("labels", format!("label {bad} outside 0..{NUM_CLASSES}")));
        }
        Ok(Self {
            name: name.into(),
            rows,
            cols,
            pixels,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn image_dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn feature_dim(&self) -> usize {
        self.rows * self.cols
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i] as usize
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn raw_image(&self, i: usize) -> &[u8] {
        let d = self.feature_dim();
        &self.pixels[i * d..(i + 1) * d]
    }

    pub fn raw_pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Writes sample `i`'s scaled features into `out`.
    pub fn write_features(&self, i: usize, out: &mut [f64]) {
        for (o, &b) in out.iter_mut().zip(self.raw_image(i)) {
            *o = b as f64 / 255.0;
        }
    }

    /// Sample indices grouped by class, each list in ascending order.
    pub fn class_indices(&self) -> Vec<Vec<usize>> {
        let mut by_class = vec![Vec::new(); NUM_CLASSES];
        for (i, &l) in self.labels.iter().enumerate() {
            by_class[l as usize].push(i);
        }
        by_class
    }

    pub fn class_counts(&self) -> [usize; NUM_CLASSES] {
        let mut counts = [0; NUM_CLASSES];
        for &l in &self.labels {
            counts[l as usize] += 1;
        }
        counts
    }

    /// Dense `(len(indices) x feature_dim)` matrix and matching labels.
    pub fn gather(&self, indices: &[usize]) -> (Array2<f64>, Vec<usize>) {
        let d = self.feature_dim();
        let mut x = Array2::zeros((indices.len(), d));
        for (mut row, &i) in x.rows_mut().into_iter().zip(indices) {
            let slice = row.as_slice_mut().expect("standard layout");
            self.write_features(i, slice);
        }
        (x, indices.iter().map(|&i| self.label(i)).collect())
    }

    /// Class-balanced subset: the first `per_class` samples (in file order) of
    /// each class in `classes`. With `None`, takes the smallest count among
    /// those classes so every class contributes equally.
    pub fn balanced_indices(&self, classes: &[usize], per_class: Option<usize>) -> Result<Vec<usize>> {
        let by_class = self.class_indices();
        let available = classes.iter().map(|&c| by_class[c].len()).min().unwrap_or(0);
        let take = per_class.unwrap_or(available);
        if take == 0 || take > available {
            return Err(Error::Configuration(format!(
                "balanced subset needs {take} samples per class, only {available} available"
            )));
        }
        let mut out: Vec<usize> = classes.iter().flat_map(|&c| by_class[c][..take].iter().copied()).collect();
        out.sort_unstable();
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> LabeledDataset {
        LabeledDataset::new("tiny", 1, 2, vec![0, 255, 51, 102, 7, 8], vec![3, 1, 3]).unwrap()
    }

    #[test]
    fn scaling_and_gather() {
        let ds = tiny();
        let (x, y) = ds.gather(&[0, 1]);
        assert_eq!(x.row(0).to_vec(), vec![0.0, 1.0]);
        assert_eq!(x.row(1).to_vec(), vec![0.2, 0.4]);
        assert_eq!(y, vec![3, 1]);
    }

    #[test]
    fn class_grouping() {
        let ds = tiny();
        assert_eq!(ds.class_indices()[3], vec![0, 2]);
        assert_eq!(ds.class_counts()[1], 1);
        assert_eq!(ds.balanced_indices(&[1, 3], None).unwrap(), vec![0, 1]);
        assert!(ds.balanced_indices(&[1, 3], Some(2)).is_err());
    }

    #[test]
    fn rejects_inconsistent_buffers() {
        assert!(LabeledDataset::new("x", 2, 2, vec![0; 7], vec![0, 1]).is_err());
        assert!(LabeledDataset::new("x", 1, 1, vec![0], vec![10]).is_err());
    }
}
