//! Procedural handwritten-digit stand-in for MNIST.
//!
//! Each class is a stroke skeleton (seven-segment style, with a diagonal for
//! 7 and a flag for 1) rendered at 28x28 after a random affine distortion,
//! per-vertex jitter, random stroke width and pixel noise. Similar skeletons
//! (8/0/6/9, 3/9, 5/6) keep the task from being linearly trivial.

use rand::Rng;
use rand_distr::{Distribution, Normal};

use super::{LabeledDataset, NUM_CLASSES};
use crate::seeds::{rng_for, Stream};

const SIDE: usize = 28;

type Segment = [(f64, f64); 2];

const A: Segment = [(0.2, 0.15), (0.8, 0.15)];
const B: Segment = [(0.8, 0.15), (0.8, 0.5)];
const C: Segment = [(0.8, 0.5), (0.8, 0.85)];
const D: Segment = [(0.2, 0.85), (0.8, 0.85)];
const E: Segment = [(0.2, 0.5), (0.2, 0.85)];
const F: Segment = [(0.2, 0.15), (0.2, 0.5)];
const G: Segment = [(0.2, 0.5), (0.8, 0.5)];

fn skeleton(class: usize) -> Vec<Segment> {
    match class {
        0 => vec![A, B, C, D, E, F],
        1 => vec![[(0.5, 0.15), (0.5, 0.85)], [(0.33, 0.3), (0.5, 0.15)]],
        2 => vec![A, B, [(0.8, 0.5), (0.2, 0.85)], D],
        3 => vec![A, B, [(0.4, 0.5), (0.8, 0.5)], C, D],
        4 => vec![F, G, B, C],
        5 => vec![A, F, G, C, D],
        6 => vec![[(0.7, 0.15), (0.2, 0.5)], G, E, D, C],
        7 => vec![A, [(0.8, 0.15), (0.4, 0.85)]],
        8 => vec![A, B, C, D, E, F, G],
        9 => vec![A, B, F, G, C],
        _ => unreachable!("class out of range"),
    }
}

fn segment_distance(p: (f64, f64), s: &Segment) -> f64 {
    let [(ax, ay), (bx, by)] = *s;
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 == 0.0 {
        0.0
    } else {
        (((p.0 - ax) * dx + (p.1 - ay) * dy) / len2).clamp(0.0, 1.0)
    };
    let (cx, cy) = (ax + t * dx - p.0, ay + t * dy - p.1);
    (cx * cx + cy * cy).sqrt()
}

fn render<R: Rng>(class: usize, rng: &mut R, out: &mut [u8]) {
    let jitter = Normal::new(0.0, 0.03).expect("valid sigma");
    let noise = Normal::new(0.0, 0.06).expect("valid sigma");

    let scale = rng.random_range(0.8..1.1);
    let shear = rng.random_range(-0.2..0.2);
    let angle: f64 = rng.random_range(-0.15..0.15);
    let (tx, ty) = (rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
    let width = rng.random_range(1.3..2.6);
    let (sin, cos) = angle.sin_cos();
    let box_px = 18.0 * scale;

    let to_px = |(x, y): (f64, f64)| -> (f64, f64) {
        let (x, y) = (x - 0.5 + shear * (0.5 - y), y - 0.5);
        let (x, y) = (cos * x - sin * y, sin * x + cos * y);
        (SIDE as f64 / 2.0 + tx + box_px * x, SIDE as f64 / 2.0 + ty + box_px * y)
    };

    let mut strokes: Vec<Segment> = skeleton(class)
        .into_iter()
        .map(|[a, b]| {
            let mut wobble = |(x, y): (f64, f64)| to_px((x + jitter.sample(rng), y + jitter.sample(rng)));
            [wobble(a), wobble(b)]
        })
        .collect();
    // occasional stray pen mark
    if rng.random_bool(0.15) {
        let a = (rng.random_range(4.0..24.0), rng.random_range(4.0..24.0));
        let b = (a.0 + rng.random_range(-5.0..5.0), a.1 + rng.random_range(-5.0..5.0));
        strokes.push([a, b]);
    }

    for (k, px) in out.iter_mut().enumerate() {
        let centre = ((k % SIDE) as f64 + 0.5, (k / SIDE) as f64 + 0.5);
        let d = strokes
            .iter()
            .map(|s| segment_distance(centre, s))
            .fold(f64::INFINITY, f64::min);
        let ink = (width / 2.0 + 0.5 - d).clamp(0.0, 1.0);
        let v = if ink > 0.0 { ink + noise.sample(rng) } else { 0.0 };
        *px = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
    }
}

/// `per_class` samples of each digit, classes interleaved (sample `k` has
/// label `k % 10`). Sample `k` depends only on `(seed, k)`.
pub fn synthetic_digits(per_class: usize, seed: u64) -> LabeledDataset {
    let count = per_class * NUM_CLASSES;
    let dim = SIDE * SIDE;
    let mut pixels = vec![0u8; count * dim];
    let labels: Vec<u8> = (0..count).map(|k| (k % NUM_CLASSES) as u8).collect();
    for (k, image) in pixels.chunks_mut(dim).enumerate() {
        let mut rng = rng_for(seed, Stream::Synthetic, k as u64);
        render(k % NUM_CLASSES, &mut rng, image);
    }
    LabeledDataset::new(format!("synthetic-digits-{seed}"), SIDE, SIDE, pixels, labels)
        .expect("buffers sized consistently")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_prefix_stable() {
        let a = synthetic_digits(5, 9);
        let b = synthetic_digits(8, 9);
        assert_eq!(a.raw_pixels(), &b.raw_pixels()[..a.raw_pixels().len()]);
        assert_ne!(a.raw_pixels(), synthetic_digits(5, 10).raw_pixels());
        assert_eq!(a.class_counts(), [5; NUM_CLASSES]);
    }

    #[test]
    fn images_have_ink_inside_the_frame() {
        let ds = synthetic_digits(20, 1);
        for i in 0..ds.len() {
            let img = ds.raw_image(i);
            let ink = img.iter().filter(|&&p| p > 128).count();
            assert!(ink > 20, "sample {i} has only {ink} inked pixels");
            // one-pixel border stays mostly blank
            let border: usize = (0..SIDE)
                .flat_map(|t| [t, (SIDE - 1) * SIDE + t, t * SIDE, t * SIDE + SIDE - 1])
                .filter(|&k| img[k] > 0)
                .count();
            assert!(border < 20, "sample {i} border ink {border}");
        }
    }

    #[test]
    fn class_means_are_distinct() {
        let ds = synthetic_digits(50, 2);
        let by_class = ds.class_indices();
        let means: Vec<Vec<f64>> = by_class
            .iter()
            .map(|idx| {
                let (x, _) = ds.gather(idx);
                x.mean_axis(ndarray::Axis(0)).unwrap().to_vec()
            })
            .collect();
        for a in 0..NUM_CLASSES {
            for b in (a + 1)..NUM_CLASSES {
                let d: f64 = means[a].iter().zip(&means[b]).map(|(x, y)| (x - y).powi(2)).sum();
                assert!(d > 1.0, "classes {a} and {b} too close: {d}");
            }
        }
    }
}
