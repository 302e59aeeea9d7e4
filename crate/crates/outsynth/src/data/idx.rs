//! IDX image/label files (the MNIST container format).
//!
//! Big-endian throughout, per the format definition: magic `0x00000803` for
//! u8 image tensors (count, rows, cols), `0x00000801` for u8 label vectors.
//! Pixels are mapped to `[0, 1]` by dividing by 255.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::GrayImage;

const MAGIC_IMAGES: u32 = 0x0000_0803;
const MAGIC_LABELS: u32 = 0x0000_0801;

fn read_u32_be(bytes: &[u8], off: usize, path: &Path) -> Result<u32> {
    bytes
        .get(off..off + 4)
        .map(|b| u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::data(format!("{}: truncated header", path.display())))
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut buf))
        .map_err(|e| Error::io(path, e))?;
    Ok(buf)
}

pub fn load_idx_images(path: impl AsRef<Path>) -> Result<Vec<GrayImage>> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let magic = read_u32_be(&bytes, 0, path)?;
    if magic != MAGIC_IMAGES {
        return Err(Error::data(format!(
            "{}: bad magic 0x{magic:08x}, expected 0x{MAGIC_IMAGES:08x} (u8 image tensor)",
            path.display()
        )));
    }
    let count = read_u32_be(&bytes, 4, path)? as usize;
    let rows = read_u32_be(&bytes, 8, path)? as usize;
    let cols = read_u32_be(&bytes, 12, path)? as usize;
    if rows == 0 || cols == 0 {
        return Err(Error::data(format!(
            "{}: zero image dimensions {rows}x{cols}",
            path.display()
        )));
    }
    let expected = 16 + count * rows * cols;
    if bytes.len() != expected {
        return Err(Error::data(format!(
            "{}: file is {} bytes, header implies {expected}",
            path.display(),
            bytes.len()
        )));
    }
    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let start = 16 + i * rows * cols;
        let data: Vec<f64> = bytes[start..start + rows * cols]
            .iter()
            .map(|&b| b as f64 / 255.0)
            .collect();
        images.push(GrayImage::new(rows, cols, data)?);
    }
    Ok(images)
}

pub fn load_idx_labels(path: impl AsRef<Path>) -> Result<Vec<u8>> {
    let path = path.as_ref();
    let bytes = read_file(path)?;
    let magic = read_u32_be(&bytes, 0, path)?;
    if magic != MAGIC_LABELS {
        return Err(Error::data(format!(
            "{}: bad magic 0x{magic:08x}, expected 0x{MAGIC_LABELS:08x} (u8 label vector)",
            path.display()
        )));
    }
    let count = read_u32_be(&bytes, 4, path)? as usize;
    if bytes.len() != 8 + count {
        return Err(Error::data(format!(
            "{}: file is {} bytes, header implies {}",
            path.display(),
            bytes.len(),
            8 + count
        )));
    }
    Ok(bytes[8..].to_vec())
}

/// Write images back to IDX, quantizing intensities with `round(v * 255)`.
/// Exact round-trip for anything loaded by `load_idx_images`.
pub fn write_idx_images(path: impl AsRef<Path>, images: &[GrayImage]) -> Result<()> {
    let path = path.as_ref();
    if images.is_empty() {
        return Err(Error::data("write_idx_images: no images"));
    }
    let (rows, cols) = (images[0].height(), images[0].width());
    let mut out = Vec::with_capacity(16 + images.len() * rows * cols);
    out.extend_from_slice(&MAGIC_IMAGES.to_be_bytes());
    out.extend_from_slice(&(images.len() as u32).to_be_bytes());
    out.extend_from_slice(&(rows as u32).to_be_bytes());
    out.extend_from_slice(&(cols as u32).to_be_bytes());
    for im in images {
        if im.height() != rows || im.width() != cols {
            return Err(Error::data("write_idx_images: mixed image shapes"));
        }
        out.extend(im.pixels().iter().map(|&v| (v * 255.0).round() as u8));
    }
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| Error::io(path, e))
}

pub fn write_idx_labels(path: impl AsRef<Path>, labels: &[u8]) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&MAGIC_LABELS.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| Error::io(path, e))
}
