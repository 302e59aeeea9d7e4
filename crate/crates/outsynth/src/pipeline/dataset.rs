//! Dataset specifications and loading.
//!
//! A dataset spec is a single string, `kind:args`, so one CLI flag fully
//! identifies the data:
//!
//! * `mnist:DIR` or `mnist:DIR,class=K` — IDX files
//!   `train-images-idx3-ubyte` / `train-labels-idx1-ubyte` under `DIR`;
//!   digit `K` (default 0) is the inlier class, every other digit is a true
//!   outlier.
//! * `pgm:DIR,inlier=LABEL` — class-per-subdirectory PGM tree; `LABEL`
//!   (default: alphabetically first) names the inlier class.
//! * `blobs:n_in=400,n_out=400,dim=16,sep=6,seed=0` — synthetic Gaussian
//!   vectors (all args optional).
//! * `csv:inliers=PATH,outliers=PATH` — two numeric CSV matrices with equal
//!   column counts.
//!
//! Image datasets run through the configured descriptors; vector datasets
//! require `features=raw`.

use ndarray::Array2;

use crate::data::{load_csv_matrix, load_idx_images, load_idx_labels, load_pgm_dir, make_blobs,
    BlobsParams};
use crate::error::{Error, Result};
use crate::features::GrayImage;
use crate::rng::fnv1a64;

/// A loaded dataset: inliers and the true-outlier pool, kept strictly apart.
#[derive(Debug, Clone)]
pub enum DatasetKind {
    Images {
        inliers: Vec<GrayImage>,
        outliers: Vec<GrayImage>,
    },
    Vectors {
        inliers: Array2<f64>,
        outliers: Array2<f64>,
    },
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub kind: DatasetKind,
    /// The spec string this dataset was loaded from.
    pub source: String,
    /// Content hash over shapes and sample values, for run manifests.
    pub fingerprint: u64,
}

impl Dataset {
    pub fn n_inliers(&self) -> usize {
        match &self.kind {
            DatasetKind::Images { inliers, .. } => inliers.len(),
            DatasetKind::Vectors { inliers, .. } => inliers.nrows(),
        }
    }

    pub fn n_outliers(&self) -> usize {
        match &self.kind {
            DatasetKind::Images { outliers, .. } => outliers.len(),
            DatasetKind::Vectors { outliers, .. } => outliers.nrows(),
        }
    }

    pub fn is_images(&self) -> bool {
        matches!(self.kind, DatasetKind::Images { .. })
    }
}

fn fingerprint_images(sets: [&[GrayImage]; 2]) -> u64 {
    let mut bytes = Vec::new();
    for set in sets {
        bytes.extend_from_slice(&(set.len() as u64).to_le_bytes());
        for im in set {
            bytes.extend_from_slice(&(im.height() as u32).to_le_bytes());
            bytes.extend_from_slice(&(im.width() as u32).to_le_bytes());
            for &p in im.pixels() {
                bytes.extend_from_slice(&p.to_bits().to_le_bytes());
            }
        }
    }
    fnv1a64(&bytes)
}

fn fingerprint_vectors(sets: [&Array2<f64>; 2]) -> u64 {
    let mut bytes = Vec::new();
    for m in sets {
        bytes.extend_from_slice(&(m.nrows() as u64).to_le_bytes());
        bytes.extend_from_slice(&(m.ncols() as u64).to_le_bytes());
        for &v in m.iter() {
            bytes.extend_from_slice(&v.to_bits().to_le_bytes());
        }
    }
    fnv1a64(&bytes)
}

/// Split `args` at commas into `key=value` pairs; `positional` receives the
/// leading segment when it carries no `=` (the directory of `mnist:`/`pgm:`).
fn parse_args(args: &str) -> (Option<String>, Vec<(String, String)>) {
    let mut positional = None;
    let mut pairs = Vec::new();
    for (i, part) in args.split(',').enumerate() {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        match part.split_once('=') {
            Some((k, v)) => pairs.push((k.trim().to_string(), v.trim().to_string())),
            None if i == 0 => positional = Some(part.to_string()),
            None => pairs.push((part.to_string(), String::new())),
        }
    }
    (positional, pairs)
}

fn reject_unknown(kind: &str, pairs: &[(String, String)], allowed: &[&str]) -> Result<()> {
    for (k, _) in pairs {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::config(format!(
                "dataset '{kind}': unknown argument '{k}' (expected one of {})",
                allowed.join(", ")
            )));
        }
    }
    Ok(())
}

fn lookup<'a>(pairs: &'a [(String, String)], key: &str) -> Option<&'a str> {
    pairs
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
}

/// Parse and load a dataset spec string.
pub fn load_dataset(spec: &str) -> Result<Dataset> {
    let (kind, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::config(format!(
            "dataset spec '{spec}' must look like kind:args (kinds: mnist, pgm, blobs, csv)"
        )))?;
    match kind {
        "mnist" => load_mnist_spec(spec, args),
        "pgm" => load_pgm_spec(spec, args),
        "blobs" => load_blobs_spec(spec, args),
        "csv" => load_csv_spec(spec, args),
        other => Err(Error::config(format!(
            "unknown dataset kind '{other}' (expected mnist|pgm|blobs|csv)"
        ))),
    }
}

fn load_mnist_spec(spec: &str, args: &str) -> Result<Dataset> {
    let (dir, pairs) = parse_args(args);
    reject_unknown("mnist", &pairs, &["class"])?;
    let dir = dir.ok_or_else(|| {
        Error::config("dataset 'mnist' needs a directory: mnist:DIR[,class=K]")
    })?;
    let class: u8 = match lookup(&pairs, "class") {
        Some(v) => v
            .parse()
            .map_err(|_| Error::config(format!("mnist class '{v}' is not a digit")))?,
        None => 0,
    };
    if class > 9 {
        return Err(Error::config(format!(
            "mnist class must be a digit 0-9, got {class}"
        )));
    }
    let dir = std::path::Path::new(&dir);
    let images = load_idx_images(dir.join("train-images-idx3-ubyte"))?;
    let labels = load_idx_labels(dir.join("train-labels-idx1-ubyte"))?;
    if images.len() != labels.len() {
        return Err(Error::data(format!(
            "mnist: {} images but {} labels",
            images.len(),
            labels.len()
        )));
    }
    let mut inliers = Vec::new();
    let mut outliers = Vec::new();
    for (im, &l) in images.into_iter().zip(&labels) {
        if l == class {
            inliers.push(im);
        } else {
            outliers.push(im);
        }
    }
    if inliers.is_empty() {
        return Err(Error::data(format!("mnist: no images labeled {class}")));
    }
    if outliers.is_empty() {
        return Err(Error::data(format!(
            "mnist: every image is labeled {class}; no outlier pool"
        )));
    }
    let fingerprint = fingerprint_images([&inliers, &outliers]);
    Ok(Dataset {
        kind: DatasetKind::Images { inliers, outliers },
        source: spec.to_string(),
        fingerprint,
    })
}

fn load_pgm_spec(spec: &str, args: &str) -> Result<Dataset> {
    let (dir, pairs) = parse_args(args);
    reject_unknown("pgm", &pairs, &["inlier"])?;
    let dir = dir.ok_or_else(|| {
        Error::config("dataset 'pgm' needs a directory: pgm:DIR[,inlier=LABEL]")
    })?;
    let (images, labels) = load_pgm_dir(&dir)?;
    let inlier_label = match lookup(&pairs, "inlier") {
        Some(v) => v.to_string(),
        // load_pgm_dir returns classes sorted, so the first label is the
        // alphabetically first class.
        None => labels[0].clone(),
    };
    if !labels.iter().any(|l| *l == inlier_label) {
        let mut classes: Vec<&String> = labels.iter().collect();
        classes.dedup();
        return Err(Error::config(format!(
            "pgm: no class named '{inlier_label}' under {dir} (found: {})",
            classes
                .iter()
                .map(|s| s.as_str())
                .collect::<Vec<_>>()
                .join(", ")
        )));
    }
    let mut inliers = Vec::new();
    let mut outliers = Vec::new();
    for (im, l) in images.into_iter().zip(&labels) {
        if *l == inlier_label {
            inliers.push(im);
        } else {
            outliers.push(im);
        }
    }
    if outliers.is_empty() {
        return Err(Error::data(format!(
            "pgm: '{inlier_label}' is the only class; no outlier pool"
        )));
    }
    let fingerprint = fingerprint_images([&inliers, &outliers]);
    Ok(Dataset {
        kind: DatasetKind::Images { inliers, outliers },
        source: spec.to_string(),
        fingerprint,
    })
}

fn load_blobs_spec(spec: &str, args: &str) -> Result<Dataset> {
    let (positional, pairs) = parse_args(args);
    if let Some(p) = positional {
        return Err(Error::config(format!(
            "dataset 'blobs' takes key=value arguments only, got '{p}'"
        )));
    }
    reject_unknown("blobs", &pairs, &["n_in", "n_out", "dim", "sep", "seed"])?;
    let mut params = BlobsParams::default();
    let num = |key: &str, v: &str| -> Result<f64> {
        v.parse()
            .map_err(|_| Error::config(format!("blobs {key}='{v}' is not a number")))
    };
    for (k, v) in &pairs {
        match k.as_str() {
            "n_in" => params.n_inliers = num(k, v)? as usize,
            "n_out" => params.n_outliers = num(k, v)? as usize,
            "dim" => params.dim = num(k, v)? as usize,
            "sep" => params.separation = num(k, v)?,
            "seed" => params.seed = num(k, v)? as u64,
            _ => unreachable!("rejected above"),
        }
    }
    let (inliers, outliers) = make_blobs(&params)?;
    let fingerprint = fingerprint_vectors([&inliers, &outliers]);
    Ok(Dataset {
        kind: DatasetKind::Vectors { inliers, outliers },
        source: spec.to_string(),
        fingerprint,
    })
}

fn load_csv_spec(spec: &str, args: &str) -> Result<Dataset> {
    let (positional, pairs) = parse_args(args);
    if positional.is_some() {
        return Err(Error::config(
            "dataset 'csv' needs named paths: csv:inliers=PATH,outliers=PATH",
        ));
    }
    reject_unknown("csv", &pairs, &["inliers", "outliers"])?;
    let in_path = lookup(&pairs, "inliers")
        .ok_or_else(|| Error::config("dataset 'csv' is missing inliers=PATH"))?;
    let out_path = lookup(&pairs, "outliers")
        .ok_or_else(|| Error::config("dataset 'csv' is missing outliers=PATH"))?;
    let (_, inliers) = load_csv_matrix(in_path)?;
    let (_, outliers) = load_csv_matrix(out_path)?;
    if inliers.ncols() != outliers.ncols() {
        return Err(Error::data(format!(
            "csv: inliers have {} columns but outliers have {}",
            inliers.ncols(),
            outliers.ncols()
        )));
    }
    let fingerprint = fingerprint_vectors([&inliers, &outliers]);
    Ok(Dataset {
        kind: DatasetKind::Vectors { inliers, outliers },
        source: spec.to_string(),
        fingerprint,
    })
}
