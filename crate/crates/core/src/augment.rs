//! Augmentation policies and their realization as sampled transform
//! parameter sets.
//!
//! Two regimes exist. The standard regime has three fixed intensity levels
//! applied uniformly across classes at train time; the intensive regime is
//! the aggressive pipeline used to materialize extra copies of
//! underrepresented classes. Sampling draws every parameter in a documented,
//! fixed order from a seeded stream, and per-image streams come from
//! [`derive_seed`], so materialization order and parallelism cannot change
//! any output byte.

use crate::image::{
    add_gaussian_noise, adjust_brightness, affine, flip, gaussian_blur, AffineParams, FlipAxis,
    Image, ImageError,
};
use crate::rng::{derive_stream_seed, Rng64};

/// Intensity level of the standard regime.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardLevel {
    L1,
    L2,
    L3,
}

impl StandardLevel {
    pub const ALL: [StandardLevel; 3] = [StandardLevel::L1, StandardLevel::L2, StandardLevel::L3];

    pub fn token(self) -> &'static str {
        match self {
            StandardLevel::L1 => "l1",
            StandardLevel::L2 => "l2",
            StandardLevel::L3 => "l3",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l1" | "1" => Some(StandardLevel::L1),
            "l2" | "2" => Some(StandardLevel::L2),
            "l3" | "3" => Some(StandardLevel::L3),
            _ => None,
        }
    }
}

/// Standard-regime parameter ranges. Ranges are symmetric about the
/// identity: shear is drawn from `[-shear_range, shear_range]`, zoom from
/// `[1 - zoom_range, 1 + zoom_range]`, and so on.
#[derive(Clone, Debug, PartialEq)]
pub struct StandardPolicy {
    pub level: StandardLevel,
    pub shear_range: f64,
    pub zoom_range: f64,
    pub rotation_range_deg: f64,
    pub width_shift: f64,
    pub height_shift: f64,
    pub horizontal_flip: bool,
    pub brightness_range: Option<(f64, f64)>,
}

impl StandardPolicy {
    /// The three fixed intensity levels.
    pub fn level(level: StandardLevel) -> Self {
        match level {
            StandardLevel::L1 => Self {
                level,
                shear_range: 0.1,
                zoom_range: 0.1,
                rotation_range_deg: 20.0,
                width_shift: 0.1,
                height_shift: 0.1,
                horizontal_flip: true,
                brightness_range: None,
            },
            StandardLevel::L2 => Self {
                level,
                shear_range: 0.2,
                zoom_range: 0.2,
                rotation_range_deg: 30.0,
                width_shift: 0.2,
                height_shift: 0.2,
                horizontal_flip: true,
                brightness_range: Some((0.9, 1.1)),
            },
            StandardLevel::L3 => Self {
                level,
                shear_range: 0.4,
                zoom_range: 0.4,
                rotation_range_deg: 40.0,
                width_shift: 0.4,
                height_shift: 0.4,
                horizontal_flip: true,
                brightness_range: Some((0.9, 1.1)),
            },
        }
    }
}

impl Default for StandardPolicy {
    /// Level 2: the middle intensity, which validates best.
    fn default() -> Self {
        Self::level(StandardLevel::L2)
    }
}

/// Intensive-regime parameters: flip probabilities plus uniform ranges for
/// rotation, brightness, blur sigma, and additive noise scale (in `[0, 1]`
/// pixel units).
#[derive(Clone, Debug, PartialEq)]
pub struct IntensivePolicy {
    pub p_hflip: f64,
    pub p_vflip: f64,
    pub rotation_deg: (f64, f64),
    pub brightness: (f64, f64),
    pub blur_sigma: (f64, f64),
    pub noise_scale: (f64, f64),
}

impl Default for IntensivePolicy {
    fn default() -> Self {
        Self {
            p_hflip: 0.5,
            p_vflip: 0.2,
            rotation_deg: (-45.0, 45.0),
            brightness: (0.8, 1.2),
            blur_sigma: (0.0, 3.0),
            noise_scale: (0.01, 0.05),
        }
    }
}

/// One sampled augmentation, ready to apply.
#[derive(Clone, Debug, PartialEq)]
pub struct TransformParams {
    pub hflip: bool,
    pub vflip: bool,
    pub affine: AffineParams,
    pub brightness: f64,
    pub blur_sigma: f64,
    pub noise_scale: f64,
    pub noise_seed: u64,
}

impl TransformParams {
    pub fn identity() -> Self {
        Self {
            hflip: false,
            vflip: false,
            affine: AffineParams::identity(),
            brightness: 1.0,
            blur_sigma: 0.0,
            noise_scale: 0.0,
            noise_seed: 0,
        }
    }
}

/// Stable per-copy stream seed for `(global_seed, image_id, copy_index)`.
///
/// A pure function of the triple (FNV-1a over a length-prefixed encoding,
/// SplitMix64-finished; see [`crate::rng::derive_stream_seed`]), so the seed
/// an image copy gets is independent of processing or batch order.
/// `copy_index` starts at 1.
pub fn derive_seed(global_seed: u64, image_id: &str, copy_index: u32) -> u64 {
    derive_stream_seed(global_seed, image_id, copy_index as u64)
}

/// Samples one standard-regime augmentation.
///
/// Draw order is fixed: horizontal flip (p = 0.5 when enabled), rotation,
/// shear, zoom, width shift, height shift, then brightness when the policy
/// has a range (1.0 otherwise). Blur and noise stay at identity in this
/// regime.
pub fn sample_standard(policy: &StandardPolicy, rng: &mut Rng64) -> TransformParams {
    let hflip = policy.horizontal_flip && rng.bernoulli(0.5);
    let rotation_deg = rng.uniform_in(-policy.rotation_range_deg, policy.rotation_range_deg);
    let shear = rng.uniform_in(-policy.shear_range, policy.shear_range);
    let zoom = rng.uniform_in(1.0 - policy.zoom_range, 1.0 + policy.zoom_range);
    let shift_x = rng.uniform_in(-policy.width_shift, policy.width_shift);
    let shift_y = rng.uniform_in(-policy.height_shift, policy.height_shift);
    let brightness = match policy.brightness_range {
        Some((lo, hi)) => rng.uniform_in(lo, hi),
        None => 1.0,
    };
    TransformParams {
        hflip,
        vflip: false,
        affine: AffineParams {
            rotation_deg,
            shear,
            zoom,
            shift_x,
            shift_y,
        },
        brightness,
        blur_sigma: 0.0,
        noise_scale: 0.0,
        noise_seed: rng.next_u64(),
    }
}

/// Samples one intensive-regime augmentation.
///
/// Draw order is fixed: horizontal flip, vertical flip, rotation,
/// brightness, blur sigma, noise scale, noise seed. The affine, brightness,
/// blur, and noise stages are always applied with parameters from their
/// ranges; only the flips are probabilistic.
pub fn sample_intensive(policy: &IntensivePolicy, rng: &mut Rng64) -> TransformParams {
    let hflip = rng.bernoulli(policy.p_hflip);
    let vflip = rng.bernoulli(policy.p_vflip);
    let rotation_deg = rng.uniform_in(policy.rotation_deg.0, policy.rotation_deg.1);
    let brightness = rng.uniform_in(policy.brightness.0, policy.brightness.1);
    let blur_sigma = rng.uniform_in(policy.blur_sigma.0, policy.blur_sigma.1);
    let noise_scale = rng.uniform_in(policy.noise_scale.0, policy.noise_scale.1);
    TransformParams {
        hflip,
        vflip,
        affine: AffineParams {
            rotation_deg,
            shear: 0.0,
            zoom: 1.0,
            shift_x: 0.0,
            shift_y: 0.0,
        },
        brightness,
        blur_sigma,
        noise_scale,
        noise_seed: rng.next_u64(),
    }
}

/// Applies one sampled augmentation in the fixed order
/// flips -> affine -> brightness -> blur -> noise.
///
/// Identity components are skipped, so all-identity parameters reproduce the
/// input bit-exactly. Dimensions and channel count never change.
pub fn apply_pipeline(img: &Image, params: &TransformParams) -> Result<Image, ImageError> {
    let mut out = None;
    if params.hflip {
        out = Some(flip(out.as_ref().unwrap_or(img), FlipAxis::Horizontal));
    }
    if params.vflip {
        out = Some(flip(out.as_ref().unwrap_or(img), FlipAxis::Vertical));
    }
    if !params.affine.is_identity() {
        out = Some(affine(out.as_ref().unwrap_or(img), &params.affine)?);
    }
    if params.brightness != 1.0 {
        out = Some(adjust_brightness(
            out.as_ref().unwrap_or(img),
            params.brightness,
        )?);
    }
    if params.blur_sigma != 0.0 {
        out = Some(gaussian_blur(out.as_ref().unwrap_or(img), params.blur_sigma)?);
    }
    if params.noise_scale != 0.0 {
        let mut rng = Rng64::from_seed(params.noise_seed);
        out = Some(add_gaussian_noise(
            out.as_ref().unwrap_or(img),
            params.noise_scale,
            &mut rng,
        )?);
    }
    Ok(out.unwrap_or_else(|| img.clone()))
}
