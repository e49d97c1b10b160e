//! Network spec persistence: a JSON document describing the layers plus
//! a sidecar binary weight blob.
//!
//! Blob layout: magic `SKYB`, one version byte, then all weight tensors
//! concatenated in layer order as little-endian 32-bit floats in
//! (filter, in-channel, row, col) order. Round-trips are bit-exact.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::snn::{LayerKind, LayerSpec, NetworkSpec, WeightTensor};

const MAGIC: &[u8; 4] = b"SKYB";
const VERSION: u8 = 1;

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    kind: LayerKind,
    c: usize,
    m: usize,
    r: usize,
    h: usize,
    pad: usize,
    stride: usize,
    v_th: f32,
    bias: Vec<f32>,
}

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    name: String,
    layers: Vec<LayerDoc>,
    weights_ref: String,
}

fn blob_path(json_path: &Path, weights_ref: &str) -> PathBuf {
    json_path
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .join(weights_ref)
}

pub fn save_network(net: &NetworkSpec, json_path: &Path) -> Result<()> {
    net.validate()?;
    let stem = json_path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("network");
    let weights_ref = format!("{stem}.skyw");

    let doc = NetworkDoc {
        name: net.name.clone(),
        layers: net
            .layers
            .iter()
            .map(|l| LayerDoc {
                kind: l.kind,
                c: l.in_channels,
                m: l.out_channels,
                r: l.kernel_size,
                h: l.input_side,
                pad: l.pad,
                stride: l.stride,
                v_th: l.v_th,
                bias: l.bias.clone(),
            })
            .collect(),
        weights_ref: weights_ref.clone(),
    };

    let mut blob = Vec::with_capacity(5 + net.layers.iter().map(|l| l.weights.data.len() * 4).sum::<usize>());
    blob.extend_from_slice(MAGIC);
    blob.push(VERSION);
    for layer in &net.layers {
        for w in &layer.weights.data {
            blob.extend_from_slice(&w.to_le_bytes());
        }
    }

    let mut json = serde_json::to_vec_pretty(&doc)?;
    json.push(b'\n');
    super::atomic_write(json_path, &json)?;
    super::atomic_write(&blob_path(json_path, &weights_ref), &blob)?;
    Ok(())
}

pub fn load_network(json_path: &Path) -> Result<NetworkSpec> {
    let text = fs::read(json_path)?;
    let doc: NetworkDoc = serde_json::from_slice(&text).map_err(|e| Error::Format {
        path: json_path.to_path_buf(),
        message: e.to_string(),
    })?;

    let bpath = blob_path(json_path, &doc.weights_ref);
    let blob = fs::read(&bpath)?;
    if blob.len() < 5 || &blob[..4] != MAGIC {
        return Err(Error::Format {
            path: bpath,
            message: "missing SKYB magic".into(),
        });
    }
    if blob[4] != VERSION {
        return Err(Error::UnsupportedVersion {
            path: bpath,
            found: blob[4],
            expected: VERSION,
        });
    }
    let expected: usize = doc
        .layers
        .iter()
        .map(|l| l.m * l.c * l.r * l.r * 4)
        .sum::<usize>()
        + 5;
    if blob.len() != expected {
        return Err(Error::LengthMismatch {
            path: bpath,
            expected: expected as u64,
            actual: blob.len() as u64,
        });
    }

    let mut offset = 5;
    let mut layers = Vec::with_capacity(doc.layers.len());
    for l in &doc.layers {
        let count = l.m * l.c * l.r * l.r;
        let mut data = Vec::with_capacity(count);
        for i in 0..count {
            let at = offset + i * 4;
            data.push(f32::from_le_bytes(blob[at..at + 4].try_into().unwrap()));
        }
        offset += count * 4;
        layers.push(LayerSpec {
            kind: l.kind,
            in_channels: l.c,
            out_channels: l.m,
            kernel_size: l.r,
            input_side: l.h,
            pad: l.pad,
            stride: l.stride,
            v_th: l.v_th,
            weights: WeightTensor::new([l.m, l.c, l.r, l.r], data)?,
            bias: l.bias.clone(),
        });
    }
    let net = NetworkSpec {
        name: doc.name,
        layers,
    };
    net.validate()?;
    Ok(net)
}
