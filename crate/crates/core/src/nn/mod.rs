//! A small, exactly-differentiated convolutional classifier.
//!
//! The architecture is a fixed skeleton: a stack of convolution blocks
//! (cross-correlation plus bias and activation), global average pooling,
//! inverted dropout, one dense layer, and a sigmoid or softmax head.
//! Forward passes in training mode cache enough activations for exact
//! reverse-mode gradients; every gradient here is checked against central
//! finite differences in the test suites.
//!
//! Parameters are named tensors (`conv0.weight`, `conv0.bias`, ...,
//! `dense.weight`, `dense.bias`) held in ordered maps, so iteration order --
//! and therefore every accumulation -- is deterministic.

mod scaling;
mod tensor;

pub use scaling::{compound_scale, CompoundScaling, ScalingResult, CONSTRAINT_TARGET, CONSTRAINT_TOLERANCE};
pub use tensor::Tensor;

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use num_traits::Float;

use crate::rng::{derive_stream_seed, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    ReLU,
    Linear,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Padding {
    /// No padding; output shrinks by `kernel - 1` before striding.
    Valid,
    /// Zero padding chosen so the output covers `ceil(extent / stride)`
    /// positions; with stride 1 this preserves the spatial dims.
    Same,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadKind {
    Sigmoid,
    Softmax,
}

impl HeadKind {
    pub fn token(self) -> &'static str {
        match self {
            HeadKind::Sigmoid => "sigmoid",
            HeadKind::Softmax => "softmax",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sigmoid" => Some(HeadKind::Sigmoid),
            "softmax" => Some(HeadKind::Softmax),
            _ => None,
        }
    }
}

/// One convolution block in a model description.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvSpec {
    pub in_channels: usize,
    pub out_channels: usize,
    pub kernel: (usize, usize),
    pub stride: usize,
    pub padding: Padding,
    pub activation: Activation,
}

/// The model skeleton: conv blocks, then global average pooling, dropout,
/// one dense layer, and the head.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub input_channels: usize,
    pub input_height: usize,
    pub input_width: usize,
    pub convs: Vec<ConvSpec>,
    pub dropout_rate: f64,
    pub dense_out: usize,
    pub head: HeadKind,
}

impl ModelSpec {
    /// The desk-scale reference model: two 3x3 stride-2 ReLU conv blocks with
    /// 8 and 16 channels, GAP, dropout 0.2, and a dense head.
    pub fn reference(
        input_channels: usize,
        input_resolution: usize,
        dense_out: usize,
        head: HeadKind,
    ) -> Self {
        let conv = |in_channels, out_channels| ConvSpec {
            in_channels,
            out_channels,
            kernel: (3, 3),
            stride: 2,
            padding: Padding::Same,
            activation: Activation::ReLU,
        };
        Self {
            input_channels,
            input_height: input_resolution,
            input_width: input_resolution,
            convs: alloc::vec![conv(input_channels, 8), conv(8, 16)],
            dropout_rate: 0.2,
            dense_out,
            head,
        }
    }

    pub fn validate(&self) -> Result<(), NnError> {
        if self.input_channels == 0 || self.input_height == 0 || self.input_width == 0 {
            return Err(NnError::BadSpec("input dimensions must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(NnError::BadDropoutRate(self.dropout_rate));
        }
        match self.head {
            HeadKind::Sigmoid if self.dense_out != 1 => {
                return Err(NnError::BadSpec(
                    "a sigmoid head requires a single output".into(),
                ));
            }
            HeadKind::Softmax if self.dense_out < 2 => {
                return Err(NnError::BadSpec(
                    "a softmax head requires at least two outputs".into(),
                ));
            }
            _ => {}
        }
        let mut channels = self.input_channels;
        let mut extent = (self.input_height, self.input_width);
        for (i, conv) in self.convs.iter().enumerate() {
            if conv.in_channels != channels {
                return Err(NnError::BadSpec(format!(
                    "conv{i} expects {} input channels but receives {channels}",
                    conv.in_channels
                )));
            }
            if conv.stride == 0 || conv.kernel.0 == 0 || conv.kernel.1 == 0 {
                return Err(NnError::BadSpec(format!(
                    "conv{i} has a zero stride or kernel dimension"
                )));
            }
            if conv.padding == Padding::Same && (conv.kernel.0 % 2 == 0 || conv.kernel.1 % 2 == 0) {
                return Err(NnError::BadSpec(format!(
                    "conv{i} uses same-padding with an even kernel"
                )));
            }
            extent = conv_output_extent(extent, conv).ok_or(NnError::KernelLargerThanInput {
                input: extent,
                kernel: conv.kernel,
            })?;
            channels = conv.out_channels;
        }
        Ok(())
    }

    /// Channel count feeding the dense layer (the GAP output length).
    pub fn dense_in(&self) -> usize {
        self.convs
            .last()
            .map(|c| c.out_channels)
            .unwrap_or(self.input_channels)
    }

    /// Names and shapes of every parameter tensor, in layer order.
    pub fn parameter_shapes(&self) -> Vec<(String, Vec<usize>)> {
        let mut shapes = Vec::new();
        for (i, conv) in self.convs.iter().enumerate() {
            shapes.push((
                format!("conv{i}.weight"),
                alloc::vec![
                    conv.out_channels,
                    conv.in_channels,
                    conv.kernel.0,
                    conv.kernel.1
                ],
            ));
            shapes.push((format!("conv{i}.bias"), alloc::vec![conv.out_channels]));
        }
        shapes.push((
            String::from("dense.weight"),
            alloc::vec![self.dense_out, self.dense_in()],
        ));
        shapes.push((String::from("dense.bias"), alloc::vec![self.dense_out]));
        shapes
    }

    /// Parameter names owned by the dense layer and head; everything else is
    /// backbone and survives transfer staging.
    pub fn head_tensor_names() -> [&'static str; 2] {
        ["dense.weight", "dense.bias"]
    }
}

fn conv_output_extent(input: (usize, usize), conv: &ConvSpec) -> Option<(usize, usize)> {
    let (h, w) = input;
    let (kh, kw) = conv.kernel;
    match conv.padding {
        Padding::Valid => {
            if h < kh || w < kw {
                None
            } else {
                Some(((h - kh) / conv.stride + 1, (w - kw) / conv.stride + 1))
            }
        }
        Padding::Same => Some((h.div_ceil(conv.stride), w.div_ceil(conv.stride))),
    }
}

fn same_padding_before(extent: usize, out: usize, kernel: usize, stride: usize) -> usize {
    let needed = ((out - 1) * stride + kernel).saturating_sub(extent);
    needed / 2
}

/// A convolution block with its parameters: `y = f(x * W + b)` with
/// cross-correlation semantics (no kernel flip).
#[derive(Clone, Debug)]
pub struct ConvLayer<T> {
    /// `[out_channels, in_channels, kh, kw]`
    pub weight: Tensor<T>,
    pub bias: Vec<T>,
    pub activation: Activation,
    pub stride: usize,
    pub padding: Padding,
}

/// Applies one convolution block to a `[C, H, W]` input.
pub fn conv2d_forward<T: Float>(x: &Tensor<T>, layer: &ConvLayer<T>) -> Result<Tensor<T>, NnError> {
    let pre = conv2d_preactivation(x, &layer.weight, &layer.bias, layer.stride, layer.padding)?;
    Ok(apply_activation(pre, layer.activation))
}

fn apply_activation<T: Float>(mut pre: Tensor<T>, activation: Activation) -> Tensor<T> {
    if activation == Activation::ReLU {
        for v in pre.data_mut() {
            if *v < T::zero() {
                *v = T::zero();
            }
        }
    }
    pre
}

fn conv2d_preactivation<T: Float>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    bias: &[T],
    stride: usize,
    padding: Padding,
) -> Result<Tensor<T>, NnError> {
    let [in_ch, h, w] = three_dims(x)?;
    let wshape = weight.shape();
    if wshape.len() != 4 || wshape[1] != in_ch {
        return Err(NnError::ShapeMismatch {
            expected: alloc::vec![wshape.first().copied().unwrap_or(0), in_ch],
            actual: wshape.to_vec(),
        });
    }
    let (out_ch, kh, kw) = (wshape[0], wshape[2], wshape[3]);
    if bias.len() != out_ch {
        return Err(NnError::ShapeMismatch {
            expected: alloc::vec![out_ch],
            actual: alloc::vec![bias.len()],
        });
    }
    let spec = ConvSpec {
        in_channels: in_ch,
        out_channels: out_ch,
        kernel: (kh, kw),
        stride,
        padding,
        activation: Activation::Linear,
    };
    let (out_h, out_w) =
        conv_output_extent((h, w), &spec).ok_or(NnError::KernelLargerThanInput {
            input: (h, w),
            kernel: (kh, kw),
        })?;
    let (pad_top, pad_left) = match padding {
        Padding::Valid => (0, 0),
        Padding::Same => (
            same_padding_before(h, out_h, kh, stride),
            same_padding_before(w, out_w, kw, stride),
        ),
    };

    let xd = x.data();
    let wd = weight.data();
    let mut out = Tensor::zeros(alloc::vec![out_ch, out_h, out_w]);
    let od = out.data_mut();
    for oc in 0..out_ch {
        for oy in 0..out_h {
            for ox in 0..out_w {
                let mut acc = bias[oc];
                for ic in 0..in_ch {
                    for ky in 0..kh {
                        let iy = (oy * stride + ky) as isize - pad_top as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..kw {
                            let ix = (ox * stride + kx) as isize - pad_left as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let xv = xd[(ic * h + iy as usize) * w + ix as usize];
                            let wv = wd[((oc * in_ch + ic) * kh + ky) * kw + kx];
                            acc = acc + xv * wv;
                        }
                    }
                }
                od[(oc * out_h + oy) * out_w + ox] = acc;
            }
        }
    }
    Ok(out)
}

/// Gradients of one convolution block given the gradient at its
/// pre-activation output: returns `(d input, d weight, d bias)`.
pub fn conv2d_backward<T: Float>(
    x: &Tensor<T>,
    weight: &Tensor<T>,
    stride: usize,
    padding: Padding,
    dpre: &Tensor<T>,
) -> (Tensor<T>, Tensor<T>, Vec<T>) {
    let [in_ch, h, w] = three_dims(x).expect("cached conv input is 3-d");
    let wshape = weight.shape();
    let (out_ch, kh, kw) = (wshape[0], wshape[2], wshape[3]);
    let dshape = dpre.shape();
    let (out_h, out_w) = (dshape[1], dshape[2]);
    let (pad_top, pad_left) = match padding {
        Padding::Valid => (0, 0),
        Padding::Same => (
            same_padding_before(h, out_h, kh, stride),
            same_padding_before(w, out_w, kw, stride),
        ),
    };

    let xd = x.data();
    let wd = weight.data();
    let dd = dpre.data();
    let mut dx = Tensor::zeros(alloc::vec![in_ch, h, w]);
    let mut dw = Tensor::zeros(wshape.to_vec());
    let mut db = alloc::vec![T::zero(); out_ch];
    let dxd = dx.data_mut();
    let dwd = dw.data_mut();

    for oc in 0..out_ch {
        for oy in 0..out_h {
            for ox in 0..out_w {
                let g = dd[(oc * out_h + oy) * out_w + ox];
                db[oc] = db[oc] + g;
                for ic in 0..in_ch {
                    for ky in 0..kh {
                        let iy = (oy * stride + ky) as isize - pad_top as isize;
                        if iy < 0 || iy >= h as isize {
                            continue;
                        }
                        for kx in 0..kw {
                            let ix = (ox * stride + kx) as isize - pad_left as isize;
                            if ix < 0 || ix >= w as isize {
                                continue;
                            }
                            let xi = (ic * h + iy as usize) * w + ix as usize;
                            let wi = ((oc * in_ch + ic) * kh + ky) * kw + kx;
                            dwd[wi] = dwd[wi] + g * xd[xi];
                            dxd[xi] = dxd[xi] + g * wd[wi];
                        }
                    }
                }
            }
        }
    }
    (dx, dw, db)
}

/// Per-channel mean over the spatial positions: `[C, H, W] -> [C]`.
pub fn global_avg_pool<T: Float>(x: &Tensor<T>) -> Result<Tensor<T>, NnError> {
    let [c, h, w] = three_dims(x)?;
    let denom = T::from(h * w).unwrap();
    let xd = x.data();
    let data = (0..c)
        .map(|ch| {
            let mut acc = T::zero();
            for i in 0..h * w {
                acc = acc + xd[ch * h * w + i];
            }
            acc / denom
        })
        .collect();
    Tensor::new(alloc::vec![c], data)
}

pub enum DropoutMode<'a> {
    Train(&'a mut Rng64),
    Eval,
}

/// Inverted dropout: in training, each element is zeroed with probability
/// `rate` (mask drawn in storage order) and survivors are scaled by
/// `1 / (1 - rate)`; evaluation is the identity.
pub fn dropout<T: Float>(
    x: &Tensor<T>,
    rate: f64,
    mode: DropoutMode,
) -> Result<Tensor<T>, NnError> {
    Ok(dropout_with_mask(x, rate, mode)?.0)
}

fn dropout_with_mask<T: Float>(
    x: &Tensor<T>,
    rate: f64,
    mode: DropoutMode,
) -> Result<(Tensor<T>, Option<Vec<bool>>), NnError> {
    if !(0.0..1.0).contains(&rate) {
        return Err(NnError::BadDropoutRate(rate));
    }
    match mode {
        DropoutMode::Eval => Ok((x.clone(), None)),
        DropoutMode::Train(rng) => {
            let scale = T::from(1.0 / (1.0 - rate)).unwrap();
            let mask: Vec<bool> = (0..x.len()).map(|_| !rng.bernoulli(rate)).collect();
            let data = x
                .data()
                .iter()
                .zip(&mask)
                .map(|(&v, &keep)| if keep { v * scale } else { T::zero() })
                .collect();
            Ok((
                Tensor::new(x.shape().to_vec(), data)?,
                Some(mask),
            ))
        }
    }
}

/// Turns logits into probabilities.
///
/// Sigmoid applies `1 / (1 + e^-z)` elementwise; softmax subtracts the
/// maximum logit before exponentiating and normalizes to sum 1.
pub fn head<T: Float>(logits: &[T], kind: HeadKind) -> Result<Vec<T>, NnError> {
    match kind {
        HeadKind::Sigmoid => Ok(logits
            .iter()
            .map(|&z| T::one() / (T::one() + (-z).exp()))
            .collect()),
        HeadKind::Softmax => {
            if logits.len() < 2 {
                return Err(NnError::SoftmaxNeedsTwo(logits.len()));
            }
            let max = logits.iter().copied().fold(logits[0], T::max);
            let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
            let sum = exps.iter().fold(T::zero(), |acc, &v| acc + v);
            Ok(exps.into_iter().map(|v| v / sum).collect())
        }
    }
}

/// Named parameter tensors in sorted-name order.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams<T> {
    pub tensors: BTreeMap<String, Tensor<T>>,
}

/// Gradients use the same named shapes as the parameters they belong to.
pub type Gradients<T> = ModelParams<T>;

impl<T: Float> ModelParams<T> {
    pub fn get(&self, name: &str) -> Result<&Tensor<T>, NnError> {
        self.tensors
            .get(name)
            .ok_or_else(|| NnError::MissingTensor(String::from(name)))
    }

    /// Elementwise cast through `f64`.
    pub fn cast<U: Float>(&self) -> ModelParams<U> {
        ModelParams {
            tensors: self
                .tensors
                .iter()
                .map(|(name, t)| (name.clone(), t.cast()))
                .collect(),
        }
    }
}

/// Fresh parameters: weights are fan-in-scaled uniform draws in
/// `[-sqrt(6 / fan_in), sqrt(6 / fan_in)]`, biases zero. Each tensor draws
/// from its own stream seeded by `(seed, tensor name)`, so initialization is
/// independent of evaluation order.
pub fn init_params<T: Float>(spec: &ModelSpec, seed: u64) -> ModelParams<T> {
    let tensors = spec
        .parameter_shapes()
        .into_iter()
        .map(|(name, shape)| {
            let tensor = init_tensor(&name, &shape, seed);
            (name, tensor)
        })
        .collect();
    ModelParams { tensors }
}

pub(crate) fn init_tensor<T: Float>(name: &str, shape: &[usize], seed: u64) -> Tensor<T> {
    let len: usize = shape.iter().product();
    if name.ends_with(".bias") {
        return Tensor::zeros(shape.to_vec());
    }
    let fan_in: usize = shape.iter().skip(1).product();
    let bound = num_traits::Float::sqrt(6.0 / fan_in as f64);
    let mut rng = Rng64::from_seed(derive_stream_seed(seed, name, 0));
    let data = (0..len)
        .map(|_| T::from(rng.uniform_in(-bound, bound)).unwrap())
        .collect();
    Tensor::new(shape.to_vec(), data).unwrap()
}

pub enum ForwardMode<'a> {
    Train(&'a mut Rng64),
    Eval,
}

/// Activations retained by a training-mode forward pass, sufficient for
/// exact backpropagation.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    conv_inputs: Vec<Tensor<T>>,
    conv_pre: Vec<Tensor<T>>,
    gap_input_hw: (usize, usize),
    dropout_mask: Option<Vec<bool>>,
    dropped: Vec<T>,
    logits: Vec<T>,
}

impl<T: Copy> ForwardCache<T> {
    pub fn logits(&self) -> &[T] {
        &self.logits
    }
}

/// Runs the model, returning head probabilities and, in training mode, the
/// activation cache for [`model_backward`].
pub fn model_forward<T: Float>(
    spec: &ModelSpec,
    params: &ModelParams<T>,
    x: &Tensor<T>,
    mode: ForwardMode,
) -> Result<(Vec<T>, Option<ForwardCache<T>>), NnError> {
    let [c, h, w] = three_dims(x)?;
    if c != spec.input_channels || h != spec.input_height || w != spec.input_width {
        return Err(NnError::ShapeMismatch {
            expected: alloc::vec![spec.input_channels, spec.input_height, spec.input_width],
            actual: x.shape().to_vec(),
        });
    }
    let training = matches!(mode, ForwardMode::Train(_));
    let mut conv_inputs = Vec::new();
    let mut conv_pre = Vec::new();

    let mut cur = x.clone();
    for (i, conv) in spec.convs.iter().enumerate() {
        let weight = params.get(&format!("conv{i}.weight"))?;
        let bias = params.get(&format!("conv{i}.bias"))?;
        let pre = conv2d_preactivation(&cur, weight, bias.data(), conv.stride, conv.padding)?;
        if training {
            conv_inputs.push(cur);
            conv_pre.push(pre.clone());
        }
        cur = apply_activation(pre, conv.activation);
    }

    let gap_input_hw = (cur.shape()[1], cur.shape()[2]);
    let pooled = global_avg_pool(&cur)?;

    let (dropped, dropout_mask) = match mode {
        ForwardMode::Train(rng) => {
            dropout_with_mask(&pooled, spec.dropout_rate, DropoutMode::Train(rng))?
        }
        ForwardMode::Eval => (pooled.clone(), None),
    };

    let dense_w = params.get("dense.weight")?;
    let dense_b = params.get("dense.bias")?;
    let dense_in = spec.dense_in();
    if dense_w.shape() != [spec.dense_out, dense_in] {
        return Err(NnError::ShapeMismatch {
            expected: alloc::vec![spec.dense_out, dense_in],
            actual: dense_w.shape().to_vec(),
        });
    }
    let wd = dense_w.data();
    let logits: Vec<T> = (0..spec.dense_out)
        .map(|o| {
            let mut acc = dense_b.data()[o];
            for i in 0..dense_in {
                acc = acc + wd[o * dense_in + i] * dropped.data()[i];
            }
            acc
        })
        .collect();

    let probs = head(&logits, spec.head)?;
    let cache = training.then(|| ForwardCache {
        conv_inputs,
        conv_pre,
        gap_input_hw,
        dropout_mask,
        dropped: dropped.into_data(),
        logits,
    });
    Ok((probs, cache))
}

/// Exact reverse-mode gradients for every parameter, given the loss gradient
/// with respect to the logits.
pub fn model_backward<T: Float>(
    spec: &ModelSpec,
    params: &ModelParams<T>,
    cache: &ForwardCache<T>,
    loss_grad: &[T],
) -> Result<Gradients<T>, NnError> {
    if loss_grad.len() != spec.dense_out {
        return Err(NnError::ShapeMismatch {
            expected: alloc::vec![spec.dense_out],
            actual: alloc::vec![loss_grad.len()],
        });
    }
    let mut grads: BTreeMap<String, Tensor<T>> = BTreeMap::new();
    let dense_in = spec.dense_in();
    let dense_w = params.get("dense.weight")?;
    let wd = dense_w.data();

    // Dense layer.
    let mut dw = Tensor::zeros(alloc::vec![spec.dense_out, dense_in]);
    for o in 0..spec.dense_out {
        for i in 0..dense_in {
            dw.data_mut()[o * dense_in + i] = loss_grad[o] * cache.dropped[i];
        }
    }
    grads.insert(String::from("dense.weight"), dw);
    grads.insert(
        String::from("dense.bias"),
        Tensor::new(alloc::vec![spec.dense_out], loss_grad.to_vec())?,
    );

    let mut ddropped = alloc::vec![T::zero(); dense_in];
    for (i, slot) in ddropped.iter_mut().enumerate() {
        let mut acc = T::zero();
        for o in 0..spec.dense_out {
            acc = acc + loss_grad[o] * wd[o * dense_in + i];
        }
        *slot = acc;
    }

    // Dropout.
    let dpooled: Vec<T> = match &cache.dropout_mask {
        Some(mask) => {
            let scale = T::from(1.0 / (1.0 - spec.dropout_rate)).unwrap();
            ddropped
                .iter()
                .zip(mask)
                .map(|(&g, &keep)| if keep { g * scale } else { T::zero() })
                .collect()
        }
        None => ddropped,
    };

    // Global average pooling.
    let (gh, gw) = cache.gap_input_hw;
    let denom = T::from(gh * gw).unwrap();
    let mut dcur = Tensor::zeros(alloc::vec![dense_in, gh, gw]);
    for ch in 0..dense_in {
        let g = dpooled[ch] / denom;
        for i in 0..gh * gw {
            dcur.data_mut()[ch * gh * gw + i] = g;
        }
    }

    // Conv blocks, last to first.
    for (i, conv) in spec.convs.iter().enumerate().rev() {
        let pre = &cache.conv_pre[i];
        let mut dpre = dcur;
        if conv.activation == Activation::ReLU {
            for (g, &p) in dpre.data_mut().iter_mut().zip(pre.data()) {
                if p <= T::zero() {
                    *g = T::zero();
                }
            }
        }
        let weight = params.get(&format!("conv{i}.weight"))?;
        let (dx, dw, db) =
            conv2d_backward(&cache.conv_inputs[i], weight, conv.stride, conv.padding, &dpre);
        grads.insert(format!("conv{i}.weight"), dw);
        grads.insert(
            format!("conv{i}.bias"),
            Tensor::new(alloc::vec![conv.out_channels], db)?,
        );
        dcur = dx;
    }

    Ok(ModelParams { tensors: grads })
}

fn three_dims<T: Float>(x: &Tensor<T>) -> Result<[usize; 3], NnError> {
    match x.shape() {
        [a, b, c] => Ok([*a, *b, *c]),
        other => Err(NnError::ShapeMismatch {
            expected: alloc::vec![0, 0, 0],
            actual: other.to_vec(),
        }),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NnError {
    ShapeDataMismatch { shape: Vec<usize>, len: usize },
    ShapeMismatch { expected: Vec<usize>, actual: Vec<usize> },
    KernelLargerThanInput { input: (usize, usize), kernel: (usize, usize) },
    BadDropoutRate(f64),
    SoftmaxNeedsTwo(usize),
    MissingTensor(String),
    BadSpec(String),
    BadScaling(String),
}

impl fmt::Display for NnError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NnError::ShapeDataMismatch { shape, len } => {
                write!(f, "data length {len} does not match shape {shape:?}")
            }
            NnError::ShapeMismatch { expected, actual } => {
                write!(f, "shape mismatch: expected {expected:?}, got {actual:?}")
            }
            NnError::KernelLargerThanInput { input, kernel } => write!(
                f,
                "kernel {}x{} exceeds input extent {}x{} without padding",
                kernel.0, kernel.1, input.0, input.1
            ),
            NnError::BadDropoutRate(r) => write!(f, "dropout rate must lie in [0, 1), got {r}"),
            NnError::SoftmaxNeedsTwo(k) => {
                write!(f, "softmax needs at least two logits, got {k}")
            }
            NnError::MissingTensor(name) => write!(f, "parameter tensor {name:?} is missing"),
            NnError::BadSpec(msg) => write!(f, "invalid model spec: {msg}"),
            NnError::BadScaling(msg) => write!(f, "invalid scaling: {msg}"),
        }
    }
}

impl core::error::Error for NnError {}
