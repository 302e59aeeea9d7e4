//! Binary model persistence.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic          8 bytes   "OSYNMDL\0"
//! format major   u16
//! format minor   u16
//! section count  u32
//! section table  count x { tag: 4 bytes, offset: u64, len: u64 }
//! payload        sections back to back, in table order
//! checksum       u32 CRC-32 (IEEE) of every preceding byte
//! ```
//!
//! Sections, in fixed order:
//!
//! * `CONF` — the resolved run configuration (UTF-8 text, opaque here),
//! * `HSPC` — JSON: hierarchy spec, per-feature input dims, unit-interval
//!   flags (everything needed to rebuild the network shapes),
//! * `FAES` — feature-AE weights: per AE, encoder then decoder; per network,
//!   layers in order; per layer, the weight matrix row-major then the bias
//!   vector; every value a little-endian f32 (weights are f32-exact by
//!   construction, so this is lossless),
//! * `FVAE` — fusion weights in canonical order (trunk, mu head, log-var
//!   head, decoder for the VAE; encoder, decoder for the plain AE; empty
//!   without fusion),
//! * `QCAT` — optional distribution catalog: `n`, `d` as u64 then `mu` and
//!   `sigma` row-major as little-endian f64,
//! * `CLSF` — the trained classifier as JSON.
//!
//! Readers refuse files with a newer format version and verify the checksum
//! before touching any payload.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::classify::TrainedClassifier;
use crate::data::crc32::crc32;
use crate::error::{Error, Result};
use crate::hierarchy::{
    FeatureAe, Fusion, FusionAe, FusionVae, HierarchyModel, HierarchySpec, LatentCatalog,
};
use crate::nnet::DenseNet;
use crate::rng;

pub const MODEL_MAGIC: &[u8; 8] = b"OSYNMDL\0";
pub const FORMAT_MAJOR: u16 = 1;
pub const FORMAT_MINOR: u16 = 0;

const TAG_CONF: &[u8; 4] = b"CONF";
const TAG_HSPC: &[u8; 4] = b"HSPC";
const TAG_FAES: &[u8; 4] = b"FAES";
const TAG_FVAE: &[u8; 4] = b"FVAE";
const TAG_QCAT: &[u8; 4] = b"QCAT";
const TAG_CLSF: &[u8; 4] = b"CLSF";

/// Everything a run needs to score new data and to reproduce itself.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    /// Resolved configuration text (flat `key=value` lines).
    pub config_text: String,
    pub spec: HierarchySpec,
    pub feature_dims: Vec<usize>,
    pub unit_interval: Vec<bool>,
    pub model: HierarchyModel,
    pub catalog: Option<LatentCatalog>,
    pub classifier: TrainedClassifier,
}

#[derive(Serialize, Deserialize)]
struct HierarchyHeader {
    spec: HierarchySpec,
    feature_dims: Vec<usize>,
    unit_interval: Vec<bool>,
}

fn push_net_weights(buf: &mut Vec<u8>, net: &DenseNet) {
    for layer in &net.layers {
        for &v in layer.w.iter() {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
        for &v in layer.b.iter() {
            buf.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
}

fn read_net_weights(bytes: &[u8], pos: &mut usize, net: &mut DenseNet) -> Result<()> {
    for layer in &mut net.layers {
        for v in layer.w.iter_mut() {
            *v = read_f32(bytes, pos)? as f64;
        }
        for v in layer.b.iter_mut() {
            *v = read_f32(bytes, pos)? as f64;
        }
    }
    Ok(())
}

fn read_f32(bytes: &[u8], pos: &mut usize) -> Result<f32> {
    let end = *pos + 4;
    let chunk = bytes
        .get(*pos..end)
        .ok_or_else(|| Error::data("model file: weight section truncated"))?;
    *pos = end;
    Ok(f32::from_le_bytes(chunk.try_into().expect("4 bytes")))
}

fn read_f64(bytes: &[u8], pos: &mut usize) -> Result<f64> {
    let end = *pos + 8;
    let chunk = bytes
        .get(*pos..end)
        .ok_or_else(|| Error::data("model file: catalog section truncated"))?;
    *pos = end;
    Ok(f64::from_le_bytes(chunk.try_into().expect("8 bytes")))
}

fn read_u64(bytes: &[u8], pos: &mut usize) -> Result<u64> {
    let end = *pos + 8;
    let chunk = bytes
        .get(*pos..end)
        .ok_or_else(|| Error::data("model file: truncated integer"))?;
    *pos = end;
    Ok(u64::from_le_bytes(chunk.try_into().expect("8 bytes")))
}

/// Networks of the hierarchy in canonical serialization order.
fn hierarchy_ae_nets(model: &HierarchyModel) -> Vec<&DenseNet> {
    let mut nets = Vec::new();
    for ae in &model.aes {
        nets.push(&ae.encoder);
        nets.push(&ae.decoder);
    }
    nets
}

fn hierarchy_fusion_nets(model: &HierarchyModel) -> Vec<&DenseNet> {
    match &model.fusion {
        Fusion::Vae(v) => vec![&v.trunk, &v.mu_head, &v.logvar_head, &v.decoder],
        Fusion::Ae(a) => vec![&a.encoder, &a.decoder],
        Fusion::None => vec![],
    }
}

pub fn model_to_bytes(file: &ModelFile) -> Result<Vec<u8>> {
    if file.feature_dims.len() != file.unit_interval.len() {
        return Err(Error::config(
            "model file: feature_dims and unit_interval lengths differ",
        ));
    }
    let header = HierarchyHeader {
        spec: file.spec.clone(),
        feature_dims: file.feature_dims.clone(),
        unit_interval: file.unit_interval.clone(),
    };
    let hspc = serde_json::to_vec(&header)
        .map_err(|e| Error::data(format!("model file: cannot encode hierarchy header: {e}")))?;

    let mut faes = Vec::new();
    for net in hierarchy_ae_nets(&file.model) {
        push_net_weights(&mut faes, net);
    }
    let mut fvae = Vec::new();
    for net in hierarchy_fusion_nets(&file.model) {
        push_net_weights(&mut fvae, net);
    }

    let qcat = file.catalog.as_ref().map(|cat| {
        let mut buf = Vec::with_capacity(16 + 16 * cat.len() * cat.dim());
        buf.extend_from_slice(&(cat.len() as u64).to_le_bytes());
        buf.extend_from_slice(&(cat.dim() as u64).to_le_bytes());
        for &v in cat.mu.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        for &v in cat.sigma.iter() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf
    });

    let clsf = serde_json::to_vec(&file.classifier)
        .map_err(|e| Error::data(format!("model file: cannot encode classifier: {e}")))?;

    let mut sections: Vec<(&[u8; 4], Vec<u8>)> = vec![
        (TAG_CONF, file.config_text.as_bytes().to_vec()),
        (TAG_HSPC, hspc),
        (TAG_FAES, faes),
        (TAG_FVAE, fvae),
    ];
    if let Some(q) = qcat {
        sections.push((TAG_QCAT, q));
    }
    sections.push((TAG_CLSF, clsf));

    let table_len = 4 + sections.len() * (4 + 8 + 8);
    let header_len = 8 + 2 + 2 + table_len;
    let mut out = Vec::with_capacity(header_len + 64);
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&FORMAT_MAJOR.to_le_bytes());
    out.extend_from_slice(&FORMAT_MINOR.to_le_bytes());
    out.extend_from_slice(&(sections.len() as u32).to_le_bytes());
    let mut offset = header_len as u64;
    for (tag, payload) in &sections {
        out.extend_from_slice(*tag);
        out.extend_from_slice(&offset.to_le_bytes());
        out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
        offset += payload.len() as u64;
    }
    debug_assert_eq!(out.len(), header_len);
    for (_, payload) in &sections {
        out.extend_from_slice(payload);
    }
    let checksum = crc32(&out);
    out.extend_from_slice(&checksum.to_le_bytes());
    Ok(out)
}

/// Table-of-contents entry, exposed for `inspect-model`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectionInfo {
    pub tag: String,
    pub offset: u64,
    pub len: u64,
}

/// Parse the header and section table and verify the checksum, without
/// decoding any payload.
pub fn inspect_bytes(bytes: &[u8]) -> Result<(u16, u16, Vec<SectionInfo>)> {
    if bytes.len() < 8 + 2 + 2 + 4 + 4 {
        return Err(Error::data("model file: too short to be valid"));
    }
    if &bytes[..8] != MODEL_MAGIC {
        return Err(Error::data(format!(
            "model file: bad magic at offset 0 (got {:02x?})",
            &bytes[..8]
        )));
    }
    let body = &bytes[..bytes.len() - 4];
    let stored = u32::from_le_bytes(bytes[bytes.len() - 4..].try_into().expect("4 bytes"));
    let computed = crc32(body);
    if stored != computed {
        return Err(Error::data(format!(
            "model file: checksum mismatch (stored {stored:08x}, computed {computed:08x})"
        )));
    }
    let major = u16::from_le_bytes(bytes[8..10].try_into().expect("2 bytes"));
    let minor = u16::from_le_bytes(bytes[10..12].try_into().expect("2 bytes"));
    if (major, minor) > (FORMAT_MAJOR, FORMAT_MINOR) {
        return Err(Error::data(format!(
            "model file: format {major}.{minor} is newer than supported {FORMAT_MAJOR}.{FORMAT_MINOR}"
        )));
    }
    let count = u32::from_le_bytes(bytes[12..16].try_into().expect("4 bytes")) as usize;
    let mut sections = Vec::with_capacity(count);
    let mut pos = 16;
    for _ in 0..count {
        let entry = bytes
            .get(pos..pos + 20)
            .ok_or_else(|| Error::data("model file: section table truncated"))?;
        let tag = String::from_utf8_lossy(&entry[..4]).into_owned();
        let offset = u64::from_le_bytes(entry[4..12].try_into().expect("8 bytes"));
        let len = u64::from_le_bytes(entry[12..20].try_into().expect("8 bytes"));
        let end = offset
            .checked_add(len)
            .ok_or_else(|| Error::data("model file: section range overflow"))?;
        if end > body.len() as u64 {
            return Err(Error::data(format!(
                "model file: section {tag} [{offset}, {end}) exceeds payload"
            )));
        }
        sections.push(SectionInfo { tag, offset, len });
        pos += 20;
    }
    Ok((major, minor, sections))
}

fn section<'a>(bytes: &'a [u8], sections: &[SectionInfo], tag: &[u8; 4]) -> Result<Option<&'a [u8]>> {
    let tag_str = std::str::from_utf8(tag).expect("ascii tag");
    let mut found = None;
    for s in sections {
        if s.tag == tag_str {
            if found.is_some() {
                return Err(Error::data(format!("model file: duplicate section {tag_str}")));
            }
            found = Some(&bytes[s.offset as usize..(s.offset + s.len) as usize]);
        }
    }
    Ok(found)
}

fn required<'a>(bytes: &'a [u8], sections: &[SectionInfo], tag: &[u8; 4]) -> Result<&'a [u8]> {
    section(bytes, sections, tag)?.ok_or_else(|| {
        Error::data(format!(
            "model file: missing section {}",
            std::str::from_utf8(tag).expect("ascii tag")
        ))
    })
}

pub fn model_from_bytes(bytes: &[u8]) -> Result<ModelFile> {
    let (_major, _minor, sections) = inspect_bytes(bytes)?;

    let conf = required(bytes, &sections, TAG_CONF)?;
    let config_text = String::from_utf8(conf.to_vec())
        .map_err(|_| Error::data("model file: CONF section is not UTF-8"))?;

    let hspc = required(bytes, &sections, TAG_HSPC)?;
    let header: HierarchyHeader = serde_json::from_slice(hspc)
        .map_err(|e| Error::data(format!("model file: bad hierarchy header: {e}")))?;
    header.spec.validate()?;
    if header.feature_dims.len() != header.unit_interval.len() {
        return Err(Error::data(
            "model file: feature_dims and unit_interval lengths differ",
        ));
    }

    // Rebuild the architecture (the init RNG is irrelevant: every weight is
    // overwritten from the weight sections).
    let mut build_rng = rng::stream(0, "model-load");
    let mut aes = Vec::new();
    if header.spec.ae_enabled {
        for (&dim, &unit) in header.feature_dims.iter().zip(&header.unit_interval) {
            aes.push(FeatureAe::new(dim, &header.spec.ae, unit, &mut build_rng)?);
        }
    }
    let fusion_input: usize = if header.spec.ae_enabled {
        aes.iter().map(|ae| ae.code_dim()).sum()
    } else {
        header.feature_dims.iter().sum()
    };
    let fusion = match header.spec.fusion {
        crate::hierarchy::FusionKind::Vae => {
            Fusion::Vae(FusionVae::new(fusion_input, &header.spec.vae, &mut build_rng)?)
        }
        crate::hierarchy::FusionKind::Ae => {
            Fusion::Ae(FusionAe::new(fusion_input, &header.spec.vae, &mut build_rng)?)
        }
        crate::hierarchy::FusionKind::None => Fusion::None,
    };
    let mut model = HierarchyModel { aes, fusion };

    let faes = required(bytes, &sections, TAG_FAES)?;
    let mut pos = 0;
    for ae in &mut model.aes {
        read_net_weights(faes, &mut pos, &mut ae.encoder)?;
        read_net_weights(faes, &mut pos, &mut ae.decoder)?;
    }
    if pos != faes.len() {
        return Err(Error::data(format!(
            "model file: FAES section has {} trailing bytes",
            faes.len() - pos
        )));
    }
    let fvae = required(bytes, &sections, TAG_FVAE)?;
    let mut pos = 0;
    match &mut model.fusion {
        Fusion::Vae(v) => {
            read_net_weights(fvae, &mut pos, &mut v.trunk)?;
            read_net_weights(fvae, &mut pos, &mut v.mu_head)?;
            read_net_weights(fvae, &mut pos, &mut v.logvar_head)?;
            read_net_weights(fvae, &mut pos, &mut v.decoder)?;
        }
        Fusion::Ae(a) => {
            read_net_weights(fvae, &mut pos, &mut a.encoder)?;
            read_net_weights(fvae, &mut pos, &mut a.decoder)?;
        }
        Fusion::None => {}
    }
    if pos != fvae.len() {
        return Err(Error::data(format!(
            "model file: FVAE section has {} trailing bytes",
            fvae.len() - pos
        )));
    }

    let catalog = match section(bytes, &sections, TAG_QCAT)? {
        None => None,
        Some(q) => {
            let mut pos = 0;
            let n = read_u64(q, &mut pos)? as usize;
            let d = read_u64(q, &mut pos)? as usize;
            let expect = 16 + 16 * n * d;
            if q.len() != expect {
                return Err(Error::data(format!(
                    "model file: QCAT section is {} bytes, expected {expect}",
                    q.len()
                )));
            }
            let mut mu = Array2::zeros((n, d));
            for v in mu.iter_mut() {
                *v = read_f64(q, &mut pos)?;
            }
            let mut sigma = Array2::zeros((n, d));
            for v in sigma.iter_mut() {
                *v = read_f64(q, &mut pos)?;
            }
            Some(LatentCatalog { mu, sigma })
        }
    };

    let clsf = required(bytes, &sections, TAG_CLSF)?;
    let classifier: TrainedClassifier = serde_json::from_slice(clsf)
        .map_err(|e| Error::data(format!("model file: bad classifier section: {e}")))?;

    Ok(ModelFile {
        config_text,
        spec: header.spec,
        feature_dims: header.feature_dims,
        unit_interval: header.unit_interval,
        model,
        catalog,
        classifier,
    })
}

pub fn save_model(path: &Path, file: &ModelFile) -> Result<()> {
    let bytes = model_to_bytes(file)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    model_from_bytes(&bytes)
}
