//! The binary checkpoint container.
//!
//! Layout: magic `ICKP`, a little-endian `u32` format version, a
//! little-endian `u64` metadata length, UTF-8 JSON metadata (model spec,
//! tensor directory with names/shapes/offsets, training provenance), then
//! the raw tensor payloads as little-endian IEEE-754 `f32` in directory
//! order. Offsets are byte positions inside the payload section. Round
//! trips are bit-exact.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use imbf_core::nn::{Activation, ConvSpec, HeadKind, ModelSpec, Padding, Tensor};
use imbf_core::train::{ModelCheckpoint, TaskKind, TrainProvenance, CHECKPOINT_VERSION};

use crate::error::{CheckpointError, PipelineError};

const MAGIC: &[u8; 4] = b"ICKP";

#[derive(Serialize, Deserialize)]
struct Metadata {
    spec: SpecMeta,
    tensors: Vec<TensorMeta>,
    provenance: ProvenanceMeta,
}

#[derive(Serialize, Deserialize)]
struct SpecMeta {
    input_channels: usize,
    input_height: usize,
    input_width: usize,
    convs: Vec<ConvMeta>,
    dropout_rate: f64,
    dense_out: usize,
    head: String,
}

#[derive(Serialize, Deserialize)]
struct ConvMeta {
    in_channels: usize,
    out_channels: usize,
    kernel: (usize, usize),
    stride: usize,
    padding: String,
    activation: String,
}

#[derive(Serialize, Deserialize)]
struct TensorMeta {
    name: String,
    shape: Vec<usize>,
    offset: u64,
}

#[derive(Serialize, Deserialize)]
struct ProvenanceMeta {
    task: String,
    classes: usize,
    class_names: Vec<String>,
    seed: u64,
    epoch: usize,
    final_train_loss: f64,
    final_val_accuracy: f64,
}

fn spec_to_meta(spec: &ModelSpec) -> SpecMeta {
    SpecMeta {
        input_channels: spec.input_channels,
        input_height: spec.input_height,
        input_width: spec.input_width,
        convs: spec
            .convs
            .iter()
            .map(|c| ConvMeta {
                in_channels: c.in_channels,
                out_channels: c.out_channels,
                kernel: c.kernel,
                stride: c.stride,
                padding: match c.padding {
                    Padding::Valid => "valid".into(),
                    Padding::Same => "same".into(),
                },
                activation: match c.activation {
                    Activation::ReLU => "relu".into(),
                    Activation::Linear => "linear".into(),
                },
            })
            .collect(),
        dropout_rate: spec.dropout_rate,
        dense_out: spec.dense_out,
        head: spec.head.token().to_string(),
    }
}

fn spec_from_meta(meta: &SpecMeta) -> Result<ModelSpec, CheckpointError> {
    let convs = meta
        .convs
        .iter()
        .map(|c| {
            Ok(ConvSpec {
                in_channels: c.in_channels,
                out_channels: c.out_channels,
                kernel: c.kernel,
                stride: c.stride,
                padding: match c.padding.as_str() {
                    "valid" => Padding::Valid,
                    "same" => Padding::Same,
                    other => {
                        return Err(CheckpointError::Metadata(format!(
                            "unknown padding {other:?}"
                        )))
                    }
                },
                activation: match c.activation.as_str() {
                    "relu" => Activation::ReLU,
                    "linear" => Activation::Linear,
                    other => {
                        return Err(CheckpointError::Metadata(format!(
                            "unknown activation {other:?}"
                        )))
                    }
                },
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    let head = HeadKind::from_token(&meta.head)
        .ok_or_else(|| CheckpointError::Metadata(format!("unknown head {:?}", meta.head)))?;
    Ok(ModelSpec {
        input_channels: meta.input_channels,
        input_height: meta.input_height,
        input_width: meta.input_width,
        convs,
        dropout_rate: meta.dropout_rate,
        dense_out: meta.dense_out,
        head,
    })
}

pub fn save_checkpoint(ckpt: &ModelCheckpoint, path: &Path) -> Result<(), PipelineError> {
    ckpt.validate()?;
    let mut tensors = Vec::new();
    let mut payload = Vec::new();
    for (name, tensor) in &ckpt.tensors {
        tensors.push(TensorMeta {
            name: name.clone(),
            shape: tensor.shape().to_vec(),
            offset: payload.len() as u64,
        });
        for &v in tensor.data() {
            payload.extend_from_slice(&v.to_le_bytes());
        }
    }
    let metadata = Metadata {
        spec: spec_to_meta(&ckpt.spec),
        tensors,
        provenance: ProvenanceMeta {
            task: ckpt.provenance.task.token().to_string(),
            classes: ckpt.provenance.task.class_count(),
            class_names: ckpt.provenance.class_names.clone(),
            seed: ckpt.provenance.seed,
            epoch: ckpt.provenance.epoch,
            final_train_loss: ckpt.provenance.final_train_loss,
            final_val_accuracy: ckpt.provenance.final_val_accuracy,
        },
    };
    let meta_bytes = serde_json::to_vec(&metadata)
        .map_err(|e| PipelineError::invalid("checkpoint metadata", e.to_string()))?;

    let mut out = Vec::with_capacity(16 + meta_bytes.len() + payload.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&ckpt.version.to_le_bytes());
    out.extend_from_slice(&(meta_bytes.len() as u64).to_le_bytes());
    out.extend_from_slice(&meta_bytes);
    out.extend_from_slice(&payload);
    fs::write(path, out).map_err(|e| PipelineError::io(path, e))
}

pub fn load_checkpoint(path: &Path) -> Result<ModelCheckpoint, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    parse_checkpoint(&bytes).map_err(|source| PipelineError::Checkpoint {
        path: path.to_path_buf(),
        source,
    })
}

fn parse_checkpoint(bytes: &[u8]) -> Result<ModelCheckpoint, CheckpointError> {
    if bytes.len() < 4 {
        return Err(CheckpointError::Truncated);
    }
    if &bytes[0..4] != MAGIC {
        return Err(CheckpointError::NotACheckpoint);
    }
    if bytes.len() < 16 {
        return Err(CheckpointError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CHECKPOINT_VERSION {
        return Err(CheckpointError::VersionMismatch {
            found: version,
            expected: CHECKPOINT_VERSION,
        });
    }
    let meta_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let payload_start = 16usize
        .checked_add(meta_len)
        .ok_or(CheckpointError::Truncated)?;
    if bytes.len() < payload_start {
        return Err(CheckpointError::Truncated);
    }
    let metadata: Metadata = serde_json::from_slice(&bytes[16..payload_start])
        .map_err(|e| CheckpointError::Metadata(e.to_string()))?;
    let payload = &bytes[payload_start..];

    let spec = spec_from_meta(&metadata.spec)?;
    let mut tensors = BTreeMap::new();
    let mut expected_offset = 0u64;
    for meta in &metadata.tensors {
        if meta.offset != expected_offset {
            return Err(CheckpointError::Metadata(format!(
                "tensor {:?} declares offset {}, expected {expected_offset}",
                meta.name, meta.offset
            )));
        }
        let count: usize = meta.shape.iter().product();
        let byte_len = count * 4;
        let start = meta.offset as usize;
        let end = start
            .checked_add(byte_len)
            .ok_or(CheckpointError::Truncated)?;
        if payload.len() < end {
            return Err(CheckpointError::Truncated);
        }
        let data: Vec<f32> = payload[start..end]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let tensor = Tensor::new(meta.shape.clone(), data)
            .map_err(|e| CheckpointError::Metadata(e.to_string()))?;
        tensors.insert(meta.name.clone(), tensor);
        expected_offset = end as u64;
    }
    if payload.len() as u64 != expected_offset {
        return Err(CheckpointError::Metadata(format!(
            "payload has {} bytes but the directory accounts for {expected_offset}",
            payload.len()
        )));
    }

    let task = match metadata.provenance.task.as_str() {
        "binary" => TaskKind::Binary,
        "multi" => TaskKind::MultiClass(metadata.provenance.classes),
        other => return Err(CheckpointError::Metadata(format!("unknown task {other:?}"))),
    };
    let ckpt = ModelCheckpoint {
        version,
        spec,
        tensors,
        provenance: TrainProvenance {
            task,
            class_names: metadata.provenance.class_names,
            seed: metadata.provenance.seed,
            epoch: metadata.provenance.epoch,
            final_train_loss: metadata.provenance.final_train_loss,
            final_val_accuracy: metadata.provenance.final_val_accuracy,
        },
    };
    ckpt.validate()
        .map_err(|e| CheckpointError::Metadata(e.to_string()))?;
    Ok(ckpt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use imbf_core::nn::init_params;

    fn toy_checkpoint() -> ModelCheckpoint {
        let spec = ModelSpec::reference(1, 16, 1, HeadKind::Sigmoid);
        let params = init_params::<f32>(&spec, 42);
        ModelCheckpoint {
            version: CHECKPOINT_VERSION,
            spec,
            tensors: params.tensors,
            provenance: TrainProvenance {
                task: TaskKind::Binary,
                class_names: vec!["benign".into(), "malignant".into()],
                seed: 42,
                epoch: 5,
                final_train_loss: 0.25,
                final_val_accuracy: 0.875,
            },
        }
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        let ckpt = toy_checkpoint();
        save_checkpoint(&ckpt, &path).unwrap();
        let back = load_checkpoint(&path).unwrap();
        assert_eq!(back.spec, ckpt.spec);
        assert_eq!(back.provenance, ckpt.provenance);
        for (name, tensor) in &ckpt.tensors {
            let loaded = &back.tensors[name];
            assert_eq!(loaded.shape(), tensor.shape());
            for (&a, &b) in loaded.data().iter().zip(tensor.data()) {
                assert_eq!(a.to_bits(), b.to_bits(), "{name}");
            }
        }
    }

    #[test]
    fn corrupted_magic_is_not_a_checkpoint() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&toy_checkpoint(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(PipelineError::Checkpoint {
                source: CheckpointError::NotACheckpoint,
                ..
            })
        ));
    }

    #[test]
    fn future_version_is_rejected_distinctly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&toy_checkpoint(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        let bumped = (CHECKPOINT_VERSION + 1).to_le_bytes();
        bytes[4..8].copy_from_slice(&bumped);
        std::fs::write(&path, bytes).unwrap();
        match load_checkpoint(&path) {
            Err(PipelineError::Checkpoint {
                source: CheckpointError::VersionMismatch { found, expected },
                ..
            }) => {
                assert_eq!(found, CHECKPOINT_VERSION + 1);
                assert_eq!(expected, CHECKPOINT_VERSION);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn truncated_file_is_rejected_distinctly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&toy_checkpoint(), &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(PipelineError::Checkpoint {
                source: CheckpointError::Truncated,
                ..
            })
        ));
    }

    #[test]
    fn tampered_shape_is_a_metadata_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.ckpt");
        save_checkpoint(&toy_checkpoint(), &path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        // Grow one declared bias shape inside the metadata JSON without
        // touching the payload; the replacement is length-neutral.
        let meta_len = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
        let meta = String::from_utf8(bytes[16..16 + meta_len].to_vec()).unwrap();
        let tampered = meta.replace("\"shape\":[8]", "\"shape\":[9]");
        assert_ne!(meta, tampered);
        bytes[16..16 + meta_len].copy_from_slice(tampered.as_bytes());
        std::fs::write(&path, bytes).unwrap();
        assert!(matches!(
            load_checkpoint(&path),
            Err(PipelineError::Checkpoint {
                source: CheckpointError::Metadata(_),
                ..
            })
        ));
    }
}
