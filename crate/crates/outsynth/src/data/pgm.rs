//! Binary PGM (P5) images and class-per-subdirectory image trees.
//!
//! Only 8-bit files (`maxval <= 255`) are accepted. Directory loading walks
//! the immediate subdirectories of the root in alphabetical order, treats
//! each subdirectory name as the class label, and reads the `.pgm` files
//! inside it in alphabetical order, so a directory tree always enumerates in
//! the same order on every platform.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::GrayImage;

/// Parse the PGM header tokens, skipping whitespace and `#` comments.
fn header_tokens(bytes: &[u8], path: &Path) -> Result<(usize, Vec<usize>)> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(Error::data(format!(
            "{}: not a binary PGM (missing P5 signature)",
            path.display()
        )));
    }
    let mut values = Vec::with_capacity(3);
    let mut pos = 2;
    while values.len() < 3 {
        // Skip whitespace and comments.
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while pos < bytes.len() && bytes[pos] != b'\n' {
                        pos += 1;
                    }
                }
                Some(_) => break,
                None => {
                    return Err(Error::data(format!("{}: truncated header", path.display())))
                }
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if pos == start {
            return Err(Error::data(format!(
                "{}: expected a number in the header",
                path.display()
            )));
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("ascii digits");
        values.push(
            text.parse::<usize>()
                .map_err(|e| Error::data(format!("{}: bad header value: {e}", path.display())))?,
        );
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => {
            return Err(Error::data(format!(
                "{}: missing whitespace before raster data",
                path.display()
            )))
        }
    }
    Ok((pos, values))
}

pub fn load_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    let (data_start, vals) = header_tokens(&bytes, path)?;
    let (width, height, maxval) = (vals[0], vals[1], vals[2]);
    if maxval == 0 || maxval > 255 {
        return Err(Error::data(format!(
            "{}: maxval {maxval} unsupported (expected 1..=255)",
            path.display()
        )));
    }
    let expected = data_start + width * height;
    if bytes.len() < expected {
        return Err(Error::data(format!(
            "{}: raster truncated ({} bytes, need {expected})",
            path.display(),
            bytes.len()
        )));
    }
    let data: Vec<f64> = bytes[data_start..expected]
        .iter()
        .map(|&b| b as f64 / maxval as f64)
        .collect();
    GrayImage::new(height, width, data)
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    let mut out = format!("P5\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(image.pixels().iter().map(|&v| (v * 255.0).round() as u8));
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&out))
        .map_err(|e| Error::io(path, e))
}

/// Load a `root/<class>/<image>.pgm` tree. Returns images and their class
/// labels (the subdirectory names), in deterministic alphabetical order.
pub fn load_pgm_dir(root: impl AsRef<Path>) -> Result<(Vec<GrayImage>, Vec<String>)> {
    let root = root.as_ref();
    let mut class_dirs: Vec<(String, std::path::PathBuf)> = Vec::new();
    for entry in std::fs::read_dir(root).map_err(|e| Error::io(root, e))? {
        let entry = entry.map_err(|e| Error::io(root, e))?;
        let path = entry.path();
        if path.is_dir() {
            let name = entry.file_name().to_string_lossy().into_owned();
            class_dirs.push((name, path));
        }
    }
    class_dirs.sort();
    if class_dirs.is_empty() {
        return Err(Error::data(format!(
            "{}: no class subdirectories found",
            root.display()
        )));
    }
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for (label, dir) in class_dirs {
        let mut files: Vec<std::path::PathBuf> = std::fs::read_dir(&dir)
            .map_err(|e| Error::io(&dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| {
                p.is_file()
                    && p.extension()
                        .is_some_and(|ext| ext.eq_ignore_ascii_case("pgm"))
            })
            .collect();
        files.sort();
        if files.is_empty() {
            return Err(Error::data(format!(
                "{}: class directory contains no .pgm files",
                dir.display()
            )));
        }
        for file in files {
            images.push(load_pgm(&file)?);
            labels.push(label.clone());
        }
    }
    Ok((images, labels))
}
