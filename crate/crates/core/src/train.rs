//! Cost-sensitive training: weighted cross-entropy, Adam, the epoch loop,
//! and binary-to-multi-class transfer staging.
//!
//! Class weights follow the balanced inverse-frequency scheme
//! `w_c = N / (K * n_c)`, which leaves uniform data at weight 1 and
//! satisfies `sum_c n_c * w_c = N` identically. The training loop is
//! deterministic end to end: epoch shuffles, per-image augmentation draws,
//! and dropout masks all come from streams derived from the run seed, and
//! gradients reduce in fixed name order.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::augment::{apply_pipeline, sample_standard, StandardPolicy};
use crate::image::{Image, ImageError};
use crate::nn::{
    init_tensor, model_backward, model_forward, ForwardMode, Gradients, HeadKind, ModelParams,
    ModelSpec, NnError, Tensor,
};
use crate::rng::{derive_stream_seed, shuffle, Rng64};

/// Classification task flavor. Binary uses a single-logit sigmoid head over
/// the coarse classes; multi-class uses a K-way softmax.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TaskKind {
    Binary,
    MultiClass(usize),
}

impl TaskKind {
    pub fn class_count(self) -> usize {
        match self {
            TaskKind::Binary => 2,
            TaskKind::MultiClass(k) => k,
        }
    }

    pub fn head(self) -> HeadKind {
        match self {
            TaskKind::Binary => HeadKind::Sigmoid,
            TaskKind::MultiClass(_) => HeadKind::Softmax,
        }
    }

    pub fn dense_out(self) -> usize {
        match self {
            TaskKind::Binary => 1,
            TaskKind::MultiClass(k) => k,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            TaskKind::Binary => "binary",
            TaskKind::MultiClass(_) => "multi",
        }
    }
}

/// Balanced inverse-frequency weights: `w_c = N / (K * n_c)`.
pub fn class_weights(counts: &[u64]) -> Result<Vec<f64>, TrainError> {
    if counts.is_empty() {
        return Err(TrainError::InvalidConfig("no classes to weight".into()));
    }
    if let Some(index) = counts.iter().position(|&c| c == 0) {
        return Err(TrainError::ZeroCountClass { class_index: index });
    }
    let total: u64 = counts.iter().sum();
    let k = counts.len() as f64;
    Ok(counts
        .iter()
        .map(|&n| total as f64 / (k * n as f64))
        .collect())
}

/// Weighted cross-entropy through the head.
///
/// Returns the loss `-w_t * ln(max(p_t, 1e-12))` and its exact gradient with
/// respect to the logits: `w_t * (p - onehot_t)` for softmax, and
/// `w_t * (p - t)` for the single sigmoid logit (the binary head is treated
/// as the two-class distribution `(1 - p, p)`).
pub fn weighted_cross_entropy<T: Float>(
    probs: &[T],
    target: usize,
    weights: &[T],
) -> Result<(T, Vec<T>), TrainError> {
    let floor = T::from(1e-12).unwrap();
    if probs.len() == 1 {
        // Sigmoid head: probability of class 1.
        if target >= 2 {
            return Err(TrainError::TargetOutOfRange { target, classes: 2 });
        }
        if weights.len() != 2 {
            return Err(TrainError::WeightCountMismatch {
                weights: weights.len(),
                classes: 2,
            });
        }
        let p = probs[0];
        let w = weights[target];
        let p_target = if target == 1 { p } else { T::one() - p };
        let loss = -w * p_target.max(floor).ln();
        let y = if target == 1 { T::one() } else { T::zero() };
        Ok((loss, alloc::vec![w * (p - y)]))
    } else {
        let k = probs.len();
        if target >= k {
            return Err(TrainError::TargetOutOfRange { target, classes: k });
        }
        if weights.len() != k {
            return Err(TrainError::WeightCountMismatch {
                weights: weights.len(),
                classes: k,
            });
        }
        let w = weights[target];
        let loss = -w * probs[target].max(floor).ln();
        let grad = probs
            .iter()
            .enumerate()
            .map(|(j, &p)| {
                let y = if j == target { T::one() } else { T::zero() };
                w * (p - y)
            })
            .collect();
        Ok((loss, grad))
    }
}

/// Adam hyperparameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First and second moment estimates, one pair per parameter tensor.
#[derive(Clone, Debug)]
pub struct AdamState<T> {
    step: u64,
    m: BTreeMap<String, Tensor<T>>,
    v: BTreeMap<String, Tensor<T>>,
}

impl<T: Float> AdamState<T> {
    pub fn new(params: &ModelParams<T>) -> Self {
        let m = params
            .tensors
            .iter()
            .map(|(name, t)| (name.clone(), Tensor::zeros(t.shape().to_vec())))
            .collect();
        let v = params
            .tensors
            .iter()
            .map(|(name, t)| (name.clone(), Tensor::zeros(t.shape().to_vec())))
            .collect();
        Self { step: 0, m, v }
    }

    pub fn step(&self) -> u64 {
        self.step
    }
}

/// One Adam update with bias correction, applied tensor by tensor in name
/// order.
pub fn adam_step<T: Float>(
    params: &mut ModelParams<T>,
    grads: &Gradients<T>,
    state: &mut AdamState<T>,
    config: &AdamConfig,
) -> Result<(), TrainError> {
    state.step += 1;
    let t = state.step as i32;
    let lr = T::from(config.learning_rate).unwrap();
    let b1 = T::from(config.beta1).unwrap();
    let b2 = T::from(config.beta2).unwrap();
    let eps = T::from(config.epsilon).unwrap();
    let m_corr = T::from(1.0 - num_traits::Float::powi(config.beta1, t)).unwrap();
    let v_corr = T::from(1.0 - num_traits::Float::powi(config.beta2, t)).unwrap();

    for (name, param) in params.tensors.iter_mut() {
        let grad = grads
            .tensors
            .get(name)
            .ok_or_else(|| NnError::MissingTensor(name.clone()))?;
        if grad.shape() != param.shape() {
            return Err(TrainError::Nn(NnError::ShapeMismatch {
                expected: param.shape().to_vec(),
                actual: grad.shape().to_vec(),
            }));
        }
        let m = state.m.get_mut(name).unwrap().data_mut();
        let v = state.v.get_mut(name).unwrap().data_mut();
        for ((p, &g), (m, v)) in param
            .data_mut()
            .iter_mut()
            .zip(grad.data())
            .zip(m.iter_mut().zip(v.iter_mut()))
        {
            *m = b1 * *m + (T::one() - b1) * g;
            *v = b2 * *v + (T::one() - b2) * g * g;
            let m_hat = *m / m_corr;
            let v_hat = *v / v_corr;
            *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
        }
    }
    Ok(())
}

/// Where initial parameters come from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InitSource {
    Fresh,
    FromCheckpoint(String),
}

/// Training-run configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub task: TaskKind,
    pub epochs: usize,
    pub batch_size: usize,
    pub adam: AdamConfig,
    pub seed: u64,
    /// Standard augmentation applied per image per epoch; `None` trains on
    /// raw pixels.
    pub policy: Option<StandardPolicy>,
    pub use_class_weights: bool,
    pub init: InitSource,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.epochs == 0 {
            return Err(TrainError::InvalidConfig("epochs must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(TrainError::InvalidConfig(
                "batch size must be at least 1".into(),
            ));
        }
        if self.adam.learning_rate <= 0.0 {
            return Err(TrainError::InvalidConfig(
                "learning rate must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// One labeled training sample held in memory.
#[derive(Clone, Debug)]
pub struct TrainItem {
    pub id: String,
    pub image: Image,
    pub class: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_accuracy: f64,
}

/// Training provenance carried inside a checkpoint.
#[derive(Clone, Debug, PartialEq)]
pub struct TrainProvenance {
    pub task: TaskKind,
    pub class_names: Vec<String>,
    pub seed: u64,
    pub epoch: usize,
    pub final_train_loss: f64,
    pub final_val_accuracy: f64,
}

pub const CHECKPOINT_VERSION: u32 = 1;

/// A trained classifier: spec, named parameter tensors, and provenance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelCheckpoint {
    pub version: u32,
    pub spec: ModelSpec,
    pub tensors: BTreeMap<String, Tensor<f32>>,
    pub provenance: TrainProvenance,
}

impl ModelCheckpoint {
    /// Every spec parameter has exactly one named tensor of matching shape.
    pub fn validate(&self) -> Result<(), TrainError> {
        let expected = self.spec.parameter_shapes();
        if expected.len() != self.tensors.len() {
            return Err(TrainError::IncompatibleCheckpoint(format!(
                "expected {} tensors, found {}",
                expected.len(),
                self.tensors.len()
            )));
        }
        for (name, shape) in expected {
            match self.tensors.get(&name) {
                None => {
                    return Err(TrainError::IncompatibleCheckpoint(format!(
                        "tensor {name:?} is missing"
                    )))
                }
                Some(t) if t.shape() != shape.as_slice() => {
                    return Err(TrainError::IncompatibleCheckpoint(format!(
                        "tensor {name:?} has shape {:?}, expected {shape:?}",
                        t.shape()
                    )))
                }
                Some(_) => {}
            }
        }
        Ok(())
    }

    pub fn params(&self) -> ModelParams<f32> {
        ModelParams {
            tensors: self.tensors.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FitOutcome {
    pub checkpoint: ModelCheckpoint,
    pub log: Vec<EpochRecord>,
}

/// Converts an interleaved `[0, 1]` image into a planar `[C, H, W]` tensor.
pub fn image_to_tensor<T: Float>(img: &Image) -> Tensor<T> {
    let (w, h, c) = (img.width(), img.height(), img.channels());
    let mut data = alloc::vec![T::zero(); w * h * c];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                data[(ch * h + y) * w + x] = T::from(img.pixel(x, y, ch)).unwrap();
            }
        }
    }
    Tensor::new(alloc::vec![c, h, w], data).unwrap()
}

/// Class index predicted from head probabilities: threshold 0.5 for the
/// sigmoid head, argmax (first maximum) for softmax.
pub fn predicted_class(probs: &[f32], head: HeadKind) -> usize {
    match head {
        HeadKind::Sigmoid => usize::from(probs[0] >= 0.5),
        HeadKind::Softmax => {
            let mut best = 0;
            for (i, &p) in probs.iter().enumerate() {
                if p > probs[best] {
                    best = i;
                }
            }
            best
        }
    }
}

/// Evaluation-mode forward pass on one image.
pub fn predict(
    spec: &ModelSpec,
    params: &ModelParams<f32>,
    image: &Image,
) -> Result<Vec<f32>, TrainError> {
    let x = image_to_tensor::<f32>(image);
    let (probs, _) = model_forward(spec, params, &x, ForwardMode::Eval)?;
    Ok(probs)
}

/// Runs the deterministic training loop.
///
/// Per epoch: a seeded shuffle, fresh standard-augmentation parameters per
/// image (stream derived from `(seed, epoch, image id)`), forward/backward,
/// and one Adam step per batch with gradients averaged in fixed name order.
/// Validation accuracy is measured on raw images after each epoch (0.0 when
/// the validation set is empty). Returns the final-epoch checkpoint and the
/// per-epoch log.
pub fn fit(
    cfg: &TrainConfig,
    spec: &ModelSpec,
    class_names: Vec<String>,
    initial: ModelParams<f32>,
    train_items: &[TrainItem],
    val_items: &[TrainItem],
) -> Result<FitOutcome, TrainError> {
    cfg.validate()?;
    spec.validate()?;
    let classes = cfg.task.class_count();
    if spec.head != cfg.task.head() || spec.dense_out != cfg.task.dense_out() {
        return Err(TrainError::InvalidConfig(format!(
            "model head does not match the {} task",
            cfg.task.token()
        )));
    }
    if class_names.len() != classes {
        return Err(TrainError::InvalidConfig(format!(
            "{} class names supplied for {classes} classes",
            class_names.len()
        )));
    }
    if train_items.is_empty() {
        return Err(TrainError::EmptyTrainingSet);
    }
    for item in train_items.iter().chain(val_items) {
        if item.class >= classes {
            return Err(TrainError::ClassOutOfRange {
                id: item.id.clone(),
                class: item.class,
                classes,
            });
        }
    }

    let weights: Vec<f32> = if cfg.use_class_weights {
        let mut counts = alloc::vec![0u64; classes];
        for item in train_items {
            counts[item.class] += 1;
        }
        class_weights(&counts)?.iter().map(|&w| w as f32).collect()
    } else {
        alloc::vec![1.0; classes]
    };

    let mut params = initial;
    let mut state = AdamState::new(&params);
    let mut log = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        let epoch_seed = derive_stream_seed(cfg.seed, "epoch", epoch as u64);
        let mut order: Vec<usize> = (0..train_items.len()).collect();
        shuffle(
            &mut order,
            &mut Rng64::from_seed(derive_stream_seed(epoch_seed, "shuffle", 0)),
        );

        let mut loss_sum = 0.0f64;
        for batch in order.chunks(cfg.batch_size) {
            let mut grad_sum: Option<Gradients<f32>> = None;
            for &idx in batch {
                let item = &train_items[idx];
                let image = match &cfg.policy {
                    Some(policy) => {
                        let stream = derive_stream_seed(epoch_seed, &item.id, 0);
                        let t = sample_standard(policy, &mut Rng64::from_seed(stream));
                        apply_pipeline(&item.image, &t)?
                    }
                    None => item.image.clone(),
                };
                let x = image_to_tensor::<f32>(&image);
                let mut dropout_rng =
                    Rng64::from_seed(derive_stream_seed(epoch_seed, &item.id, 1));
                let (probs, cache) =
                    model_forward(spec, &params, &x, ForwardMode::Train(&mut dropout_rng))?;
                // The loss floor absorbs NaN probabilities, so check them
                // directly.
                if probs.iter().any(|p| !p.is_finite()) {
                    return Err(TrainError::Divergence { epoch });
                }
                let (loss, dlogits) = weighted_cross_entropy(&probs, item.class, &weights)?;
                if !loss.is_finite() {
                    return Err(TrainError::Divergence { epoch });
                }
                loss_sum += loss as f64;
                let grads = model_backward(spec, &params, &cache.unwrap(), &dlogits)?;
                grad_sum = Some(match grad_sum {
                    None => grads,
                    Some(mut acc) => {
                        for (name, tensor) in acc.tensors.iter_mut() {
                            for (a, &g) in
                                tensor.data_mut().iter_mut().zip(grads.tensors[name].data())
                            {
                                *a += g;
                            }
                        }
                        acc
                    }
                });
            }
            let mut grads = grad_sum.unwrap();
            let inv = 1.0 / batch.len() as f32;
            for tensor in grads.tensors.values_mut() {
                for g in tensor.data_mut() {
                    *g *= inv;
                }
            }
            adam_step(&mut params, &grads, &mut state, &cfg.adam)?;
        }

        let train_loss = loss_sum / train_items.len() as f64;
        if !train_loss.is_finite() {
            return Err(TrainError::Divergence { epoch });
        }

        let val_accuracy = if val_items.is_empty() {
            0.0
        } else {
            let mut correct = 0usize;
            for item in val_items {
                let probs = predict(spec, &params, &item.image)?;
                if predicted_class(&probs, spec.head) == item.class {
                    correct += 1;
                }
            }
            correct as f64 / val_items.len() as f64
        };

        log.push(EpochRecord {
            epoch,
            train_loss,
            val_accuracy,
        });
    }

    let last = *log.last().unwrap();
    let checkpoint = ModelCheckpoint {
        version: CHECKPOINT_VERSION,
        spec: spec.clone(),
        tensors: params.tensors,
        provenance: TrainProvenance {
            task: cfg.task,
            class_names,
            seed: cfg.seed,
            epoch: last.epoch,
            final_train_loss: last.train_loss,
            final_val_accuracy: last.val_accuracy,
        },
    };
    Ok(FitOutcome { checkpoint, log })
}

/// Stages a binary checkpoint for a K-way task: every backbone tensor is
/// copied bit-exactly, the dense layer is re-initialized for `classes`
/// outputs from `seed`, and the head becomes softmax.
pub fn transfer_init(
    ckpt: &ModelCheckpoint,
    classes: usize,
    seed: u64,
) -> Result<(ModelSpec, ModelParams<f32>), TrainError> {
    if ckpt.provenance.task != TaskKind::Binary {
        return Err(TrainError::TaskMismatch {
            expected: "binary",
            found: ckpt.provenance.task.token(),
        });
    }
    if classes < 2 {
        return Err(TrainError::InvalidConfig(
            "transfer staging needs at least two target classes".into(),
        ));
    }
    ckpt.validate()?;

    let spec = ModelSpec {
        dense_out: classes,
        head: HeadKind::Softmax,
        ..ckpt.spec.clone()
    };
    spec.validate()?;

    let mut tensors = BTreeMap::new();
    for (name, shape) in spec.parameter_shapes() {
        if ModelSpec::head_tensor_names().contains(&name.as_str()) {
            tensors.insert(name.clone(), init_tensor::<f32>(&name, &shape, seed));
        } else {
            tensors.insert(name.clone(), ckpt.tensors[&name].clone());
        }
    }
    Ok((spec, ModelParams { tensors }))
}

#[derive(Clone, Debug, PartialEq)]
pub enum TrainError {
    InvalidConfig(String),
    ZeroCountClass { class_index: usize },
    TargetOutOfRange { target: usize, classes: usize },
    WeightCountMismatch { weights: usize, classes: usize },
    ClassOutOfRange { id: String, class: usize, classes: usize },
    EmptyTrainingSet,
    Divergence { epoch: usize },
    TaskMismatch { expected: &'static str, found: &'static str },
    IncompatibleCheckpoint(String),
    Nn(NnError),
    Image(ImageError),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::InvalidConfig(msg) => write!(f, "invalid training config: {msg}"),
            TrainError::ZeroCountClass { class_index } => {
                write!(f, "class {class_index} has zero training samples")
            }
            TrainError::TargetOutOfRange { target, classes } => {
                write!(f, "target class {target} is out of range for {classes} classes")
            }
            TrainError::WeightCountMismatch { weights, classes } => {
                write!(f, "{weights} class weights supplied for {classes} classes")
            }
            TrainError::ClassOutOfRange { id, class, classes } => write!(
                f,
                "sample {id:?} has class {class}, out of range for {classes} classes"
            ),
            TrainError::EmptyTrainingSet => write!(f, "training set is empty"),
            TrainError::Divergence { epoch } => {
                write!(f, "training diverged (non-finite loss) at epoch {epoch}")
            }
            TrainError::TaskMismatch { expected, found } => {
                write!(f, "checkpoint task is {found}, expected {expected}")
            }
            TrainError::IncompatibleCheckpoint(msg) => {
                write!(f, "incompatible checkpoint: {msg}")
            }
            TrainError::Nn(e) => write!(f, "{e}"),
            TrainError::Image(e) => write!(f, "{e}"),
        }
    }
}

impl core::error::Error for TrainError {}

impl From<NnError> for TrainError {
    fn from(e: NnError) -> Self {
        TrainError::Nn(e)
    }
}

impl From<ImageError> for TrainError {
    fn from(e: ImageError) -> Self {
        TrainError::Image(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::init_params;
    use alloc::string::ToString;
    use alloc::vec;

    #[test]
    fn balanced_counts_give_unit_weights() {
        let w = class_weights(&[50, 50, 50]).unwrap();
        for &v in &w {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn binary_weight_fixture() {
        // N = 6327, K = 2: w = (6327/3968, 6327/8686).
        let w = class_weights(&[1984, 4343]).unwrap();
        assert!((w[0] - 6327.0 / 3968.0).abs() < 1e-15);
        assert!((w[1] - 6327.0 / 8686.0).abs() < 1e-15);
        assert!((w[0] - 1.5945).abs() < 1e-4);
        assert!((w[1] - 0.7284).abs() < 1e-4);
    }

    #[test]
    fn small_weight_fixture_and_identity() {
        let w = class_weights(&[10, 30]).unwrap();
        assert_eq!(w[0], 2.0);
        assert!((w[1] - 2.0 / 3.0).abs() < 1e-15);

        // sum_c n_c * w_c = N, within float tolerance.
        let counts = [355u64, 811, 455, 362, 2760, 500, 633, 448];
        let w = class_weights(&counts).unwrap();
        let total: u64 = counts.iter().sum();
        let weighted: f64 = counts.iter().zip(&w).map(|(&n, &w)| n as f64 * w).sum();
        assert!((weighted - total as f64).abs() < 1e-9);
    }

    #[test]
    fn zero_count_class_is_rejected_by_name() {
        match class_weights(&[5, 0, 7]) {
            Err(TrainError::ZeroCountClass { class_index: 1 }) => {}
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn uniform_weights_equal_unweighted_loss_bitwise() {
        let probs = [0.2f64, 0.5, 0.3];
        let weights = [1.0f64; 3];
        let (weighted, grad_w) = weighted_cross_entropy(&probs, 1, &weights).unwrap();
        let unweighted = -probs[1].ln();
        assert_eq!(weighted, unweighted);
        let expected_grad = [probs[0], probs[1] - 1.0, probs[2]];
        assert_eq!(grad_w, expected_grad.to_vec());
    }

    #[test]
    fn loss_fixtures() {
        let (zero_loss, _) =
            weighted_cross_entropy(&[0.0f64, 1.0], 1, &[1.0, 1.0]).unwrap();
        assert_eq!(zero_loss, 0.0);

        let (loss, _) = weighted_cross_entropy(&[0.5f64, 0.5], 0, &[2.0, 2.0]).unwrap();
        assert!((loss - 2.0 * core::f64::consts::LN_2).abs() < 1e-15);
        assert!((loss - 1.3863).abs() < 1e-4);
    }

    #[test]
    fn loss_rejects_out_of_range_target() {
        assert!(matches!(
            weighted_cross_entropy(&[0.5f64, 0.5], 2, &[1.0, 1.0]),
            Err(TrainError::TargetOutOfRange { .. })
        ));
        assert!(matches!(
            weighted_cross_entropy(&[0.5f64], 2, &[1.0, 1.0]),
            Err(TrainError::TargetOutOfRange { .. })
        ));
    }

    #[test]
    fn sigmoid_loss_treats_head_as_two_classes() {
        let (loss0, grad0) = weighted_cross_entropy(&[0.3f64], 0, &[1.0, 1.0]).unwrap();
        assert!((loss0 - -(0.7f64).ln()).abs() < 1e-15);
        assert!((grad0[0] - 0.3).abs() < 1e-15);

        let (loss1, grad1) = weighted_cross_entropy(&[0.3f64], 1, &[1.0, 4.0]).unwrap();
        assert!((loss1 - -4.0 * (0.3f64).ln()).abs() < 1e-12);
        assert!((grad1[0] - 4.0 * (0.3 - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn loss_gradient_matches_finite_differences_through_the_head() {
        // Oracle: differentiate loss(head(logits)) numerically in the logits.
        use crate::nn::head;
        let eps = 1e-6;
        let weights = [1.7f64, 0.4, 2.2];
        let logits = [0.3f64, -1.1, 0.8];
        for target in 0..3 {
            let loss_at = |z: &[f64]| {
                let p = head(z, HeadKind::Softmax).unwrap();
                weighted_cross_entropy(&p, target, &weights).unwrap().0
            };
            let probs = head(&logits, HeadKind::Softmax).unwrap();
            let (_, grad) = weighted_cross_entropy(&probs, target, &weights).unwrap();
            for i in 0..3 {
                let mut plus = logits;
                plus[i] += eps;
                let mut minus = logits;
                minus[i] -= eps;
                let fd = (loss_at(&plus) - loss_at(&minus)) / (2.0 * eps);
                assert!(
                    (fd - grad[i]).abs() / fd.abs().max(1e-8) < 1e-4,
                    "target {target} logit {i}: fd {fd} vs {g}",
                    g = grad[i]
                );
            }
        }

        // Sigmoid head.
        let weights = [1.3f64, 0.6];
        for target in 0..2 {
            let loss_at = |z: f64| {
                let p = head(&[z], HeadKind::Sigmoid).unwrap();
                weighted_cross_entropy(&p, target, &weights).unwrap().0
            };
            let z = -0.4f64;
            let p = head(&[z], HeadKind::Sigmoid).unwrap();
            let (_, grad) = weighted_cross_entropy(&p, target, &weights).unwrap();
            let fd = (loss_at(z + eps) - loss_at(z - eps)) / (2.0 * eps);
            assert!((fd - grad[0]).abs() / fd.abs().max(1e-8) < 1e-4);
        }
    }

    fn scalar_params(value: f64) -> ModelParams<f64> {
        let mut tensors = BTreeMap::new();
        tensors.insert(
            "w".to_string(),
            Tensor::new(vec![1], vec![value]).unwrap(),
        );
        ModelParams { tensors }
    }

    #[test]
    fn adam_zero_gradients_leave_parameters_unchanged() {
        let mut params = scalar_params(0.75);
        let grads = scalar_params(0.0);
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, &AdamConfig::default()).unwrap();
        assert_eq!(params.get("w").unwrap().data(), &[0.75]);
        assert_eq!(state.step(), 1);
    }

    #[test]
    fn adam_first_step_magnitude_is_the_learning_rate() {
        // Hand-evaluated recurrences at t = 1 with g = 1: corrected moments
        // are both exactly 1, so the update is lr / (1 + eps).
        let cfg = AdamConfig::default();
        let mut params = scalar_params(0.0);
        let grads = scalar_params(1.0);
        let mut state = AdamState::new(&params);
        adam_step(&mut params, &grads, &mut state, &cfg).unwrap();
        let expected = -cfg.learning_rate / (1.0 + cfg.epsilon);
        assert!((params.get("w").unwrap().data()[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn adam_rejects_shape_mismatch() {
        let mut params = scalar_params(0.0);
        let mut grads = scalar_params(1.0);
        grads.tensors.insert(
            "w".to_string(),
            Tensor::new(vec![2], vec![1.0, 1.0]).unwrap(),
        );
        let mut state = AdamState::new(&params);
        assert!(matches!(
            adam_step(&mut params, &grads, &mut state, &AdamConfig::default()),
            Err(TrainError::Nn(NnError::ShapeMismatch { .. }))
        ));
    }

    #[test]
    fn adam_is_deterministic() {
        let cfg = AdamConfig::default();
        let run = || {
            let mut params = scalar_params(0.5);
            let mut state = AdamState::new(&params);
            for i in 1..=25 {
                let grads = scalar_params(0.1 * i as f64);
                adam_step(&mut params, &grads, &mut state, &cfg).unwrap();
            }
            params.get("w").unwrap().data()[0]
        };
        assert_eq!(run().to_bits(), run().to_bits());
    }

    fn toy_items(per_class: usize, size: usize) -> Vec<TrainItem> {
        // Two separable constant-intensity classes.
        let mut items = Vec::new();
        for class in 0..2usize {
            let base = if class == 0 { 0.2f32 } else { 0.8 };
            for i in 0..per_class {
                let wobble = (i as f32 / per_class as f32 - 0.5) * 0.1;
                let image = Image::constant(size, size, 1, base + wobble).unwrap();
                items.push(TrainItem {
                    id: format!("c{class}/{i:03}"),
                    image,
                    class,
                });
            }
        }
        items
    }

    fn toy_config(epochs: usize) -> TrainConfig {
        TrainConfig {
            task: TaskKind::Binary,
            epochs,
            batch_size: 24,
            adam: AdamConfig {
                learning_rate: 0.02,
                ..AdamConfig::default()
            },
            seed: 7,
            policy: None,
            use_class_weights: false,
            init: InitSource::Fresh,
        }
    }

    #[test]
    fn fit_solves_a_separable_toy_problem() {
        // Full-batch updates and no dropout keep the loss descent smooth.
        let spec = ModelSpec {
            dropout_rate: 0.0,
            ..ModelSpec::reference(1, 8, 1, HeadKind::Sigmoid)
        };
        let items = toy_items(12, 8);
        let cfg = toy_config(20);
        let initial = init_params::<f32>(&spec, cfg.seed);
        let outcome = fit(&cfg, &spec, vec!["lo".into(), "hi".into()], initial, &items, &[])
            .unwrap();
        assert_eq!(outcome.log.len(), 20);

        // Verified by running the fitted model over the training set.
        let params = outcome.checkpoint.params();
        let correct = items
            .iter()
            .filter(|item| {
                let probs = predict(&spec, &params, &item.image).unwrap();
                predicted_class(&probs, spec.head) == item.class
            })
            .count();
        assert_eq!(correct, items.len());

        // Epoch-mean loss decreases monotonically after the early epochs.
        for window in outcome.log[2..].windows(2) {
            assert!(
                window[1].train_loss <= window[0].train_loss,
                "loss rose: {window:?}"
            );
        }
    }

    #[test]
    fn fit_reports_divergence_with_the_epoch() {
        // An absurd learning rate overflows the parameters within an epoch.
        let spec = ModelSpec::reference(1, 8, 3, HeadKind::Softmax);
        let mut items = toy_items(4, 8);
        items[0].class = 2;
        let mut cfg = toy_config(5);
        cfg.task = TaskKind::MultiClass(3);
        cfg.adam.learning_rate = 1e25;
        let initial = init_params::<f32>(&spec, 1);
        match fit(
            &cfg,
            &spec,
            vec!["a".into(), "b".into(), "c".into()],
            initial,
            &items,
            &[],
        ) {
            Err(TrainError::Divergence { epoch }) => assert!(epoch >= 1),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn fit_rejects_zero_epochs() {
        let spec = ModelSpec::reference(1, 8, 1, HeadKind::Sigmoid);
        let items = toy_items(3, 8);
        let cfg = toy_config(0);
        let initial = init_params::<f32>(&spec, 1);
        assert!(matches!(
            fit(&cfg, &spec, vec!["a".into(), "b".into()], initial, &items, &[]),
            Err(TrainError::InvalidConfig(_))
        ));
    }

    #[test]
    fn fit_is_deterministic() {
        let spec = ModelSpec::reference(1, 8, 1, HeadKind::Sigmoid);
        let items = toy_items(6, 8);
        let val = toy_items(2, 8);
        let mut cfg = toy_config(4);
        cfg.policy = Some(StandardPolicy::default());
        cfg.use_class_weights = true;
        let run = || {
            let initial = init_params::<f32>(&spec, cfg.seed);
            fit(
                &cfg,
                &spec,
                vec!["lo".into(), "hi".into()],
                initial,
                &items,
                &val,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.log, b.log);
        assert_eq!(a.checkpoint.tensors, b.checkpoint.tensors);
    }

    fn binary_checkpoint(seed: u64) -> ModelCheckpoint {
        let spec = ModelSpec::reference(1, 8, 1, HeadKind::Sigmoid);
        let params = init_params::<f32>(&spec, seed);
        ModelCheckpoint {
            version: CHECKPOINT_VERSION,
            spec,
            tensors: params.tensors,
            provenance: TrainProvenance {
                task: TaskKind::Binary,
                class_names: vec!["benign".into(), "malignant".into()],
                seed,
                epoch: 1,
                final_train_loss: 0.5,
                final_val_accuracy: 0.9,
            },
        }
    }

    #[test]
    fn transfer_copies_backbone_bitwise_and_reinitializes_the_head() {
        let ckpt = binary_checkpoint(3);
        let (spec, params) = transfer_init(&ckpt, 8, 99).unwrap();
        assert_eq!(spec.dense_out, 8);
        assert_eq!(spec.head, HeadKind::Softmax);
        assert_eq!(params.get("dense.weight").unwrap().shape(), &[8, 16]);

        let head_names = ModelSpec::head_tensor_names();
        for (name, tensor) in &params.tensors {
            if head_names.contains(&name.as_str()) {
                continue;
            }
            let original = &ckpt.tensors[name];
            assert_eq!(tensor.shape(), original.shape());
            for (&a, &b) in tensor.data().iter().zip(original.data()) {
                assert_eq!(a.to_bits(), b.to_bits(), "{name}");
            }
        }
    }

    #[test]
    fn transfer_to_two_classes_builds_a_softmax_pair() {
        let ckpt = binary_checkpoint(5);
        let (spec, params) = transfer_init(&ckpt, 2, 1).unwrap();
        assert_eq!(spec.dense_out, 2);
        assert_eq!(spec.head, HeadKind::Softmax);
        assert_eq!(params.get("dense.weight").unwrap().shape(), &[2, 16]);
    }

    #[test]
    fn transfer_rejects_non_binary_checkpoints() {
        let mut ckpt = binary_checkpoint(2);
        ckpt.provenance.task = TaskKind::MultiClass(8);
        assert!(matches!(
            transfer_init(&ckpt, 8, 1),
            Err(TrainError::TaskMismatch { .. })
        ));
    }

    #[test]
    fn checkpoint_validation_catches_missing_and_misshapen_tensors() {
        let mut ckpt = binary_checkpoint(4);
        ckpt.validate().unwrap();
        let removed = ckpt.tensors.remove("conv1.bias").unwrap();
        assert!(ckpt.validate().is_err());
        ckpt.tensors
            .insert("conv1.bias".into(), Tensor::zeros(vec![17]));
        assert!(ckpt.validate().is_err());
        ckpt.tensors.insert("conv1.bias".into(), removed);
        ckpt.validate().unwrap();
    }
}
