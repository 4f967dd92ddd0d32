//! Big-endian IDX containers (the MNIST distribution format).

use std::fs;
use std::io::Write;
use std::path::Path;

use super::LabeledDataset;
use crate::{Error, Result};

const IMAGE_MAGIC: u32 = 0x0000_0803;
const LABEL_MAGIC: u32 = 0x0000_0801;

fn read_u32(bytes: &[u8], offset: usize, what: &str) -> Result<u32> {
    bytes
        .get(offset..offset + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::format(what, "header truncated"))
}

/// Parses an image file: returns `(count, rows, cols, pixels)`.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, usize, usize, Vec<u8>)> {
    let magic = read_u32(bytes, 0, "magic")?;
    if magic != IMAGE_MAGIC {
        return Err(Error::format(
            "magic",
            format!("expected image magic {IMAGE_MAGIC} (0x{IMAGE_MAGIC:08x}), found {magic}"),
        ));
    }
    let count = read_u32(bytes, 4, "count")? as usize;
    let rows = read_u32(bytes, 8, "rows")? as usize;
    let cols = read_u32(bytes, 12, "cols")? as usize;
    let expected = count * rows * cols;
    let payload = &bytes[16..];
    if payload.len() != expected {
        return Err(Error::format(
            "payload",
            format!("expected {expected} pixel bytes for {count} images of {rows}x{cols}, found {}", payload.len()),
        ));
    }
    Ok((count, rows, cols, payload.to_vec()))
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let magic = read_u32(bytes, 0, "magic")?;
    if magic != LABEL_MAGIC {
        return Err(Error::format(
            "magic",
            format!("expected label magic {LABEL_MAGIC} (0x{LABEL_MAGIC:08x}), found {magic}"),
        ));
    }
    let count = read_u32(bytes, 4, "count")? as usize;
    let payload = &bytes[8..];
    if payload.len() != count {
        return Err(Error::format(
            "payload",
            format!("expected {count} label bytes, found {}", payload.len()),
        ));
    }
    Ok(payload.to_vec())
}

/// Loads an image/label file pair into a dataset named after the image file.
pub fn load_idx(images_path: impl AsRef<Path>, labels_path: impl AsRef<Path>) -> Result<LabeledDataset> {
    let images_path = images_path.as_ref();
    let (count, rows, cols, pixels) = parse_idx_images(&fs::read(images_path)?)?;
    let labels = parse_idx_labels(&fs::read(labels_path.as_ref())?)?;
    if labels.len() != count {
        return Err(Error::format(
            "count",
            format!("{count} images but {} labels", labels.len()),
        ));
    }
    let name = images_path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    LabeledDataset::new(name, rows, cols, pixels, labels)
}

pub fn write_idx_images<W: Write>(ds: &LabeledDataset, mut out: W) -> Result<()> {
    let (rows, cols) = ds.image_dims();
    for v in [IMAGE_MAGIC, ds.len() as u32, rows as u32, cols as u32] {
        out.write_all(&v.to_be_bytes())?;
    }
    out.write_all(ds.raw_pixels())?;
    Ok(())
}

pub fn write_idx_labels<W: Write>(ds: &LabeledDataset, mut out: W) -> Result<()> {
    for v in [LABEL_MAGIC, ds.len() as u32] {
        out.write_all(&v.to_be_bytes())?;
    }
    out.write_all(ds.labels())?;
    Ok(())
}
