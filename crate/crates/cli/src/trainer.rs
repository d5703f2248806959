//! Training and evaluation drivers: manifest in, checkpoint and report out.
//!
//! The class set is derived from the manifest: the two coarse classes for
//! the binary task, or the subclasses actually present (in canonical order)
//! for the multi-class task. Checkpoints carry their class set, and
//! evaluation maps labels through it, so indices keep their meaning across
//! runs.

use std::path::Path;

use serde::Serialize;

use imbf_core::image::Image;
use imbf_core::label::{Coarse, Subclass};
use imbf_core::manifest::{DatasetManifest, ManifestEntry, Split};
use imbf_core::metrics::{ClassificationReport, ConfusionMatrix};
use imbf_core::nn::{init_params, ModelParams, ModelSpec};
use imbf_core::train::{
    fit, predict, predicted_class, transfer_init, AdamConfig, EpochRecord, InitSource,
    ModelCheckpoint, TaskKind, TrainConfig, TrainError, TrainItem,
};

use imbf_core::augment::{StandardLevel, StandardPolicy};

use crate::error::PipelineError;
use crate::io::checkpoint_file::load_checkpoint;
use crate::io::image_io::load_image;

/// The ordered class set a model is trained over.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassSet {
    pub task: TaskKind,
    pub names: Vec<String>,
}

impl ClassSet {
    pub fn from_manifest(manifest: &DatasetManifest, binary: bool) -> Result<Self, PipelineError> {
        if binary {
            return Ok(Self {
                task: TaskKind::Binary,
                names: Coarse::ALL.iter().map(|c| c.token().to_string()).collect(),
            });
        }
        let names: Vec<String> = Subclass::ALL
            .iter()
            .filter(|s| manifest.entries.iter().any(|e| e.label.subclass() == **s))
            .map(|s| s.token().to_string())
            .collect();
        if names.len() < 2 {
            return Err(PipelineError::invalid(
                "manifest",
                format!(
                    "multi-class training needs at least two subclasses, found {}",
                    names.len()
                ),
            ));
        }
        Ok(Self {
            task: TaskKind::MultiClass(names.len()),
            names,
        })
    }

    pub fn from_checkpoint(ckpt: &ModelCheckpoint) -> Self {
        Self {
            task: ckpt.provenance.task,
            names: ckpt.provenance.class_names.clone(),
        }
    }

    pub fn index_of(&self, entry: &ManifestEntry) -> Option<usize> {
        match self.task {
            TaskKind::Binary => Some(entry.label.coarse().index()),
            TaskKind::MultiClass(_) => {
                let token = entry.label.subclass().token();
                self.names.iter().position(|n| n == token)
            }
        }
    }
}

/// Bilinear resize with clamp-to-edge sampling. Equal dimensions return the
/// input unchanged.
pub fn resize_bilinear(img: &Image, out_w: usize, out_h: usize) -> Image {
    if img.width() == out_w && img.height() == out_h {
        return img.clone();
    }
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let sx = w as f64 / out_w as f64;
    let sy = h as f64 / out_h as f64;
    let mut pixels = Vec::with_capacity(out_w * out_h * c);
    for y in 0..out_h {
        let fy = ((y as f64 + 0.5) * sy - 0.5).clamp(0.0, (h - 1) as f64);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(h - 1);
        let dy = (fy - y0 as f64) as f32;
        for x in 0..out_w {
            let fx = ((x as f64 + 0.5) * sx - 0.5).clamp(0.0, (w - 1) as f64);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(w - 1);
            let dx = (fx - x0 as f64) as f32;
            for ch in 0..c {
                let p00 = img.pixel(x0, y0, ch);
                let p10 = img.pixel(x1, y0, ch);
                let p01 = img.pixel(x0, y1, ch);
                let p11 = img.pixel(x1, y1, ch);
                let a = p00 * (1.0 - dx) + p10 * dx;
                let b = p01 * (1.0 - dx) + p11 * dx;
                pixels.push((a * (1.0 - dy) + b * dy).clamp(0.0, 1.0));
            }
        }
    }
    Image::new(out_w, out_h, c, pixels).expect("resized pixels stay in range")
}

/// Loads one split into memory at the given resolution, sorted by image id.
pub fn load_split_items(
    manifest: &DatasetManifest,
    split: Split,
    class_set: &ClassSet,
    resolution: (usize, usize),
) -> Result<Vec<TrainItem>, PipelineError> {
    let mut entries: Vec<&ManifestEntry> = manifest.in_split(split).collect();
    entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    let mut items = Vec::with_capacity(entries.len());
    let mut channels: Option<usize> = None;
    for entry in entries {
        let class = class_set.index_of(entry).ok_or_else(|| {
            PipelineError::invalid(
                "manifest",
                format!(
                    "entry {:?} has subclass {} outside the model's class set",
                    entry.image_id,
                    entry.label.subclass().token()
                ),
            )
        })?;
        let raw = load_image(Path::new(&entry.path))?;
        match channels {
            None => channels = Some(raw.channels()),
            Some(c) if c != raw.channels() => {
                return Err(PipelineError::invalid(
                    "manifest",
                    format!(
                        "entry {:?} has {} channels, expected {c} like the rest of the split",
                        entry.image_id,
                        raw.channels()
                    ),
                ));
            }
            Some(_) => {}
        }
        let image = resize_bilinear(&raw, resolution.0, resolution.1);
        items.push(TrainItem {
            id: entry.image_id.clone(),
            image,
            class,
        });
    }
    Ok(items)
}

/// Everything a training run needs beyond the manifest.
#[derive(Clone, Debug)]
pub struct TrainSettings {
    pub binary: bool,
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    pub resolution: usize,
    pub seed: u64,
    pub policy: StandardLevel,
    pub use_class_weights: bool,
    pub init: InitSource,
}

/// Resolves the initial model (fresh, resumed, or transfer-staged), loads
/// the train/val splits, and runs the training loop.
pub fn run_training(
    manifest: &DatasetManifest,
    settings: &TrainSettings,
) -> Result<(ModelCheckpoint, Vec<EpochRecord>), PipelineError> {
    let class_set = ClassSet::from_manifest(manifest, settings.binary)?;
    let task = class_set.task;

    let (spec, params): (ModelSpec, ModelParams<f32>) = match &settings.init {
        InitSource::Fresh => {
            let first = manifest
                .in_split(Split::Train)
                .min_by(|a, b| a.image_id.cmp(&b.image_id))
                .ok_or(TrainError::EmptyTrainingSet)?;
            let channels = load_image(Path::new(&first.path))?.channels();
            let spec = ModelSpec {
                dropout_rate: settings.dropout,
                ..ModelSpec::reference(
                    channels,
                    settings.resolution,
                    task.dense_out(),
                    task.head(),
                )
            };
            let params = init_params::<f32>(&spec, settings.seed);
            (spec, params)
        }
        InitSource::FromCheckpoint(path) => {
            let ckpt = load_checkpoint(Path::new(path))?;
            match (ckpt.provenance.task, task) {
                (TaskKind::Binary, TaskKind::MultiClass(k)) => {
                    log::info!("transfer staging: binary checkpoint -> {k}-way softmax");
                    let (spec, params) = transfer_init(&ckpt, k, settings.seed)?;
                    (spec, params)
                }
                (TaskKind::Binary, TaskKind::Binary) => {
                    ckpt.validate()?;
                    (ckpt.spec.clone(), ckpt.params())
                }
                (TaskKind::MultiClass(a), TaskKind::MultiClass(b)) if a == b => {
                    ckpt.validate()?;
                    if ckpt.provenance.class_names != class_set.names {
                        return Err(TrainError::IncompatibleCheckpoint(format!(
                            "checkpoint classes {:?} do not match the manifest's {:?}",
                            ckpt.provenance.class_names, class_set.names
                        ))
                        .into());
                    }
                    (ckpt.spec.clone(), ckpt.params())
                }
                (found, expected) => {
                    return Err(TrainError::TaskMismatch {
                        expected: expected.token(),
                        found: found.token(),
                    }
                    .into())
                }
            }
        }
    };

    if spec.input_height != settings.resolution {
        log::info!(
            "using the checkpoint's input resolution {} (requested {})",
            spec.input_height,
            settings.resolution
        );
    }

    let resolution = (spec.input_width, spec.input_height);
    let train_items = load_split_items(manifest, Split::Train, &class_set, resolution)?;
    let val_items = load_split_items(manifest, Split::Val, &class_set, resolution)?;
    log::info!(
        "training on {} items, validating on {}",
        train_items.len(),
        val_items.len()
    );

    let cfg = TrainConfig {
        task,
        epochs: settings.epochs,
        batch_size: settings.batch_size,
        adam: AdamConfig {
            learning_rate: settings.learning_rate,
            ..AdamConfig::default()
        },
        seed: settings.seed,
        policy: Some(StandardPolicy::level(settings.policy)),
        use_class_weights: settings.use_class_weights,
        init: settings.init.clone(),
    };
    let outcome = fit(&cfg, &spec, class_set.names, params, &train_items, &val_items)?;
    Ok((outcome.checkpoint, outcome.log))
}

/// Evaluates a checkpoint on one split of a manifest.
pub fn evaluate(
    ckpt: &ModelCheckpoint,
    manifest: &DatasetManifest,
    split: Split,
    config_fingerprint: &str,
) -> Result<ClassificationReport, PipelineError> {
    ckpt.validate()?;
    let class_set = ClassSet::from_checkpoint(ckpt);
    let resolution = (ckpt.spec.input_width, ckpt.spec.input_height);
    let items = load_split_items(manifest, split, &class_set, resolution)?;
    let params = ckpt.params();

    let mut predictions = Vec::with_capacity(items.len());
    let mut labels = Vec::with_capacity(items.len());
    for item in &items {
        let probs = predict(&ckpt.spec, &params, &item.image)?;
        predictions.push(predicted_class(&probs, ckpt.spec.head));
        labels.push(item.class);
    }
    let cm = ConfusionMatrix::from_predictions(&predictions, &labels, class_set.task.class_count())?
        .with_class_names(class_set.names.clone())?;
    Ok(ClassificationReport::from_confusion(
        class_set.task.token(),
        cm,
        config_fingerprint,
    )?)
}

/// One line of the JSONL epoch log.
#[derive(Serialize)]
struct EpochLine {
    epoch: usize,
    train_loss: f64,
    val_accuracy: f64,
}

/// Epoch log as JSON lines, one record per epoch.
pub fn epoch_log_to_jsonl(log: &[EpochRecord]) -> String {
    let mut out = String::new();
    for record in log {
        let line = EpochLine {
            epoch: record.epoch,
            train_loss: record.train_loss,
            val_accuracy: record.val_accuracy,
        };
        out.push_str(&serde_json::to_string(&line).expect("epoch records serialize"));
        out.push('\n');
    }
    out
}
