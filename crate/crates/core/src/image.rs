//! Deterministic pixel-level transforms on normalized images.
//!
//! Pixels are `f32` values in `[0, 1]`, stored row-major with channels
//! interleaved (`[y][x][c]`). Every transform preserves width, height, and
//! channel count and keeps values in range. Identity parameters reproduce
//! the input bit-exactly, and a fixed summation order makes each transform a
//! pure function of `(input, params, rng stream)`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::rng::Rng64;

/// A normalized image: `f32` pixels in `[0, 1]`, row-major, channels
/// interleaved.
#[derive(Clone, Debug, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    channels: usize,
    pixels: Vec<f32>,
}

impl Image {
    /// Validates dimensions, channel count (1 or 3), buffer length, and the
    /// `[0, 1]` pixel range.
    pub fn new(
        width: usize,
        height: usize,
        channels: usize,
        pixels: Vec<f32>,
    ) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::BadDimensions { width, height });
        }
        if channels != 1 && channels != 3 {
            return Err(ImageError::BadChannelCount(channels));
        }
        let expected = width * height * channels;
        if pixels.len() != expected {
            return Err(ImageError::LengthMismatch {
                expected,
                actual: pixels.len(),
            });
        }
        for (index, &value) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(ImageError::PixelOutOfRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            channels,
            pixels,
        })
    }

    pub fn constant(
        width: usize,
        height: usize,
        channels: usize,
        value: f32,
    ) -> Result<Self, ImageError> {
        Self::new(width, height, channels, vec![value; width * height * channels])
    }

    // Caller upholds the invariants.
    fn from_parts(width: usize, height: usize, channels: usize, pixels: Vec<f32>) -> Self {
        debug_assert_eq!(pixels.len(), width * height * channels);
        Self {
            width,
            height,
            channels,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn pixels(&self) -> &[f32] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize, c: usize) -> f32 {
        self.pixels[(y * self.width + x) * self.channels + c]
    }
}

/// Parameters of one affine warp. Identity is rotation 0, shear 0, zoom 1,
/// and zero shifts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineParams {
    pub rotation_deg: f64,
    /// Off-diagonal shear entry: the source x picks up `shear * y`.
    pub shear: f64,
    /// Scale factor; values above 1 magnify.
    pub zoom: f64,
    /// Horizontal shift as a fraction of the width, in `[-1, 1]`.
    pub shift_x: f64,
    /// Vertical shift as a fraction of the height, in `[-1, 1]`.
    pub shift_y: f64,
}

impl AffineParams {
    pub fn identity() -> Self {
        Self {
            rotation_deg: 0.0,
            shear: 0.0,
            zoom: 1.0,
            shift_x: 0.0,
            shift_y: 0.0,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation_deg == 0.0
            && self.shear == 0.0
            && self.zoom == 1.0
            && self.shift_x == 0.0
            && self.shift_y == 0.0
    }
}

impl Default for AffineParams {
    fn default() -> Self {
        Self::identity()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FlipAxis {
    Horizontal,
    Vertical,
}

/// Maps 8-bit samples into the normalized domain: `v -> v / 255`.
pub fn rescale(
    bytes: &[u8],
    width: usize,
    height: usize,
    channels: usize,
) -> Result<Image, ImageError> {
    let expected = width * height * channels;
    if bytes.len() != expected {
        return Err(ImageError::LengthMismatch {
            expected,
            actual: bytes.len(),
        });
    }
    let pixels = bytes.iter().map(|&b| b as f32 / 255.0).collect();
    Image::new(width, height, channels, pixels)
}

/// Reverses column order (horizontal) or row order (vertical).
pub fn flip(img: &Image, axis: FlipAxis) -> Image {
    let (w, h, c) = (img.width, img.height, img.channels);
    let mut out = Vec::with_capacity(img.pixels.len());
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = match axis {
                FlipAxis::Horizontal => (w - 1 - x, y),
                FlipAxis::Vertical => (x, h - 1 - y),
            };
            for ch in 0..c {
                out.push(img.pixel(sx, sy, ch));
            }
        }
    }
    Image::from_parts(w, h, c, out)
}

/// Warps the image with an affine transform about its center.
///
/// Inverse mapping: each output position, in coordinates centered on the
/// image, is sent through rotate * shear * scale(1/zoom) plus the shift
/// translation to find its source sample. Samples are read bilinearly;
/// out-of-bounds indices are reflected at the borders. Identity parameters
/// hit the integer grid exactly and reproduce the input bit-for-bit.
pub fn affine(img: &Image, params: &AffineParams) -> Result<Image, ImageError> {
    if params.zoom <= 0.0 {
        return Err(ImageError::NonPositiveZoom(params.zoom));
    }
    let (w, h, c) = (img.width, img.height, img.channels);
    let cx = (w as f64 - 1.0) / 2.0;
    let cy = (h as f64 - 1.0) / 2.0;

    let theta = params.rotation_deg.to_radians();
    let (sin, cos) = theta.sin_cos();
    let inv_zoom = 1.0 / params.zoom;
    // rotate * shear * scale(1/zoom), row-major 2x2.
    let a00 = cos * inv_zoom;
    let a01 = (cos * params.shear - sin) * inv_zoom;
    let a10 = sin * inv_zoom;
    let a11 = (sin * params.shear + cos) * inv_zoom;
    let tx = params.shift_x * w as f64;
    let ty = params.shift_y * h as f64;

    let mut out = Vec::with_capacity(img.pixels.len());
    for y in 0..h {
        let v = y as f64 - cy;
        for x in 0..w {
            let u = x as f64 - cx;
            let sx = cx + a00 * u + a01 * v + tx;
            let sy = cy + a10 * u + a11 * v + ty;
            for ch in 0..c {
                out.push(sample_bilinear(img, sx, sy, ch));
            }
        }
    }
    Ok(Image::from_parts(w, h, c, out))
}

/// Scales every value by `factor` and clamps back into `[0, 1]`.
pub fn adjust_brightness(img: &Image, factor: f64) -> Result<Image, ImageError> {
    if factor <= 0.0 {
        return Err(ImageError::NonPositiveFactor(factor));
    }
    let f = factor as f32;
    let pixels = img
        .pixels
        .iter()
        .map(|&v| (v * f).clamp(0.0, 1.0))
        .collect();
    Ok(Image::from_parts(img.width, img.height, img.channels, pixels))
}

/// Separable Gaussian blur with kernel radius `ceil(3 * sigma)`.
///
/// The kernel is evaluated in double precision, normalized to sum 1, and
/// applied horizontally then vertically with reflected borders, per channel.
/// `sigma == 0` is the identity.
pub fn gaussian_blur(img: &Image, sigma: f64) -> Result<Image, ImageError> {
    if sigma < 0.0 {
        return Err(ImageError::NegativeSigma(sigma));
    }
    if sigma == 0.0 {
        return Ok(img.clone());
    }
    let kernel = gaussian_kernel(sigma);
    let radius = (kernel.len() - 1) / 2;
    let (w, h, c) = (img.width, img.height, img.channels);

    // Horizontal pass.
    let mut mid = vec![0.0f32; img.pixels.len()];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let mut acc = 0.0f32;
                for (k, &weight) in kernel.iter().enumerate() {
                    let sx = reflect_index(x as i64 + k as i64 - radius as i64, w);
                    acc += img.pixel(sx, y, ch) * weight;
                }
                mid[(y * w + x) * c + ch] = acc;
            }
        }
    }

    // Vertical pass.
    let mut out = vec![0.0f32; img.pixels.len()];
    for y in 0..h {
        for x in 0..w {
            for ch in 0..c {
                let mut acc = 0.0f32;
                for (k, &weight) in kernel.iter().enumerate() {
                    let sy = reflect_index(y as i64 + k as i64 - radius as i64, h);
                    acc += mid[(sy * w + x) * c + ch] * weight;
                }
                out[(y * w + x) * c + ch] = acc.clamp(0.0, 1.0);
            }
        }
    }
    Ok(Image::from_parts(w, h, c, out))
}

fn gaussian_kernel(sigma: f64) -> Vec<f32> {
    let radius = (3.0 * sigma).ceil() as i64;
    let denom = 2.0 * sigma * sigma;
    let weights: Vec<f64> = (-radius..=radius)
        .map(|offset| (-((offset * offset) as f64) / denom).exp())
        .collect();
    let sum: f64 = weights.iter().sum();
    weights.iter().map(|w| (w / sum) as f32).collect()
}

/// Adds `scale * z` with `z ~ Normal(0, 1)` to every stored value in
/// row-major order, clamping back into `[0, 1]`. `scale == 0` is the
/// identity.
pub fn add_gaussian_noise(img: &Image, scale: f64, rng: &mut Rng64) -> Result<Image, ImageError> {
    if scale < 0.0 {
        return Err(ImageError::NegativeNoiseScale(scale));
    }
    if scale == 0.0 {
        return Ok(img.clone());
    }
    let pixels = img
        .pixels
        .iter()
        .map(|&v| (v as f64 + scale * rng.normal()).clamp(0.0, 1.0) as f32)
        .collect();
    Ok(Image::from_parts(img.width, img.height, img.channels, pixels))
}

/// Reflects an index into `[0, n)` symmetrically about the borders
/// (`..., 1, 0 | 0, 1, ...`).
fn reflect_index(i: i64, n: usize) -> usize {
    let n = n as i64;
    if n == 1 {
        return 0;
    }
    let period = 2 * n;
    let mut k = i.rem_euclid(period);
    if k >= n {
        k = period - 1 - k;
    }
    k as usize
}

/// Bilinear read at a fractional position with reflected borders.
///
/// The lerp is written so integer positions return the underlying pixel
/// bit-exactly (weights collapse to 1 and 0).
fn sample_bilinear(img: &Image, sx: f64, sy: f64, ch: usize) -> f32 {
    let x0f = sx.floor();
    let y0f = sy.floor();
    let dx = (sx - x0f) as f32;
    let dy = (sy - y0f) as f32;
    let x0 = x0f as i64;
    let y0 = y0f as i64;

    let xa = reflect_index(x0, img.width);
    let xb = reflect_index(x0 + 1, img.width);
    let ya = reflect_index(y0, img.height);
    let yb = reflect_index(y0 + 1, img.height);

    let p00 = img.pixel(xa, ya, ch);
    let p10 = img.pixel(xb, ya, ch);
    let p01 = img.pixel(xa, yb, ch);
    let p11 = img.pixel(xb, yb, ch);

    let top = p00 * (1.0 - dx) + p10 * dx;
    let bottom = p01 * (1.0 - dx) + p11 * dx;
    (top * (1.0 - dy) + bottom * dy).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ImageError {
    BadDimensions { width: usize, height: usize },
    BadChannelCount(usize),
    LengthMismatch { expected: usize, actual: usize },
    PixelOutOfRange { index: usize, value: f32 },
    NonPositiveZoom(f64),
    NonPositiveFactor(f64),
    NegativeSigma(f64),
    NegativeNoiseScale(f64),
}

impl fmt::Display for ImageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ImageError::BadDimensions { width, height } => {
                write!(f, "image dimensions must be positive, got {width}x{height}")
            }
            ImageError::BadChannelCount(c) => {
                write!(f, "channel count must be 1 or 3, got {c}")
            }
            ImageError::LengthMismatch { expected, actual } => {
                write!(f, "pixel buffer length {actual} does not match dimensions (expected {expected})")
            }
            ImageError::PixelOutOfRange { index, value } => {
                write!(f, "pixel {index} is outside [0, 1]: {value}")
            }
            ImageError::NonPositiveZoom(z) => write!(f, "zoom must be positive, got {z}"),
            ImageError::NonPositiveFactor(v) => {
                write!(f, "brightness factor must be positive, got {v}")
            }
            ImageError::NegativeSigma(s) => write!(f, "blur sigma must be nonnegative, got {s}"),
            ImageError::NegativeNoiseScale(s) => {
                write!(f, "noise scale must be nonnegative, got {s}")
            }
        }
    }
}

impl core::error::Error for ImageError {}
