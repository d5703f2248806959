//! Image loading and saving.
//!
//! PNG (8-bit gray and RGB) is the production format; binary PPM/PGM is
//! accepted as a dependency-light alternative for tests and tooling. Images
//! are normalized to `[0, 1]` on load; written files quantize back with
//! `round(v * 255)`.

use std::fs;
use std::path::Path;

use image::DynamicImage;
use imbf_core::image::{rescale, Image};

use crate::error::PipelineError;

/// Loads a PNG, PPM, or PGM file (chosen by extension) into a normalized
/// image.
pub fn load_image(path: &Path) -> Result<Image, PipelineError> {
    match extension_of(path) {
        Some(ext) if ext == "png" => load_png(path),
        Some(ext) if ext == "ppm" || ext == "pgm" => load_pnm(path),
        _ => Err(PipelineError::invalid(
            "image path",
            format!("{}: unsupported extension (expected png, ppm, or pgm)", path.display()),
        )),
    }
}

/// Quantizes to 8 bits with `round(v * 255)` and writes the format chosen by
/// the path extension.
pub fn save_image(img: &Image, path: &Path) -> Result<(), PipelineError> {
    match extension_of(path) {
        Some(ext) if ext == "png" => save_png(img, path),
        Some(ext) if ext == "ppm" || ext == "pgm" => save_pnm(img, path),
        _ => Err(PipelineError::invalid(
            "image path",
            format!("{}: unsupported extension (expected png, ppm, or pgm)", path.display()),
        )),
    }
}

fn extension_of(path: &Path) -> Option<String> {
    path.extension().map(|e| e.to_string_lossy().to_ascii_lowercase())
}

fn load_png(path: &Path) -> Result<Image, PipelineError> {
    let decoded = image::ImageReader::open(path)
        .map_err(|e| PipelineError::io(path, e))?
        .decode()
        .map_err(|e| PipelineError::ImageCodec {
            path: path.to_path_buf(),
            source: e,
        })?;
    let (buffer, width, height, channels) = match decoded {
        DynamicImage::ImageLuma8(b) => {
            let (w, h) = (b.width() as usize, b.height() as usize);
            (b.into_raw(), w, h, 1)
        }
        DynamicImage::ImageRgb8(b) => {
            let (w, h) = (b.width() as usize, b.height() as usize);
            (b.into_raw(), w, h, 3)
        }
        other if grayscale_like(&other) => {
            let b = other.to_luma8();
            let (w, h) = (b.width() as usize, b.height() as usize);
            (b.into_raw(), w, h, 1)
        }
        other => {
            let b = other.to_rgb8();
            let (w, h) = (b.width() as usize, b.height() as usize);
            (b.into_raw(), w, h, 3)
        }
    };
    Ok(rescale(&buffer, width, height, channels)?)
}

fn grayscale_like(img: &DynamicImage) -> bool {
    use image::ColorType::*;
    matches!(img.color(), L8 | L16 | La8 | La16)
}

fn save_png(img: &Image, path: &Path) -> Result<(), PipelineError> {
    let bytes = quantize(img);
    let color = match img.channels() {
        1 => image::ExtendedColorType::L8,
        _ => image::ExtendedColorType::Rgb8,
    };
    image::save_buffer_with_format(
        path,
        &bytes,
        img.width() as u32,
        img.height() as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| PipelineError::ImageCodec {
        path: path.to_path_buf(),
        source: e,
    })
}

fn quantize(img: &Image) -> Vec<u8> {
    img.pixels()
        .iter()
        .map(|&v| (v * 255.0).round().clamp(0.0, 255.0) as u8)
        .collect()
}

/// Binary PPM (`P6`, RGB) and PGM (`P5`, gray) with maxval 255.
fn load_pnm(path: &Path) -> Result<Image, PipelineError> {
    let bytes = fs::read(path).map_err(|e| PipelineError::io(path, e))?;
    let bad = |msg: &str| PipelineError::FileFormat {
        path: path.to_path_buf(),
        msg: msg.to_string(),
    };

    let mut cursor = 0usize;
    let mut next_token = || -> Option<String> {
        // Skip whitespace and `#` comments between header tokens.
        while cursor < bytes.len() {
            let b = bytes[cursor];
            if b == b'#' {
                while cursor < bytes.len() && bytes[cursor] != b'\n' {
                    cursor += 1;
                }
            } else if b.is_ascii_whitespace() {
                cursor += 1;
            } else {
                break;
            }
        }
        let start = cursor;
        while cursor < bytes.len() && !bytes[cursor].is_ascii_whitespace() {
            cursor += 1;
        }
        if cursor > start {
            Some(String::from_utf8_lossy(&bytes[start..cursor]).into_owned())
        } else {
            None
        }
    };

    let magic = next_token().ok_or_else(|| bad("missing magic number"))?;
    let channels = match magic.as_str() {
        "P5" => 1usize,
        "P6" => 3,
        _ => return Err(bad("expected binary PGM (P5) or PPM (P6)")),
    };
    let width: usize = next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad width"))?;
    let height: usize = next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad height"))?;
    let maxval: usize = next_token()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| bad("bad maxval"))?;
    if maxval != 255 {
        return Err(bad("only maxval 255 is supported"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    let data_start = cursor + 1;
    let expected = width * height * channels;
    if bytes.len() < data_start + expected {
        return Err(bad("raster is shorter than the header promises"));
    }
    Ok(rescale(
        &bytes[data_start..data_start + expected],
        width,
        height,
        channels,
    )?)
}

fn save_pnm(img: &Image, path: &Path) -> Result<(), PipelineError> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(quantize(img));
    fs::write(path, out).map_err(|e| PipelineError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_image(channels: usize) -> Image {
        let (w, h) = (5, 4);
        let pixels = (0..w * h * channels)
            .map(|i| (i % 256) as u8)
            .collect::<Vec<_>>();
        rescale(&pixels, w, h, channels).unwrap()
    }

    #[test]
    fn png_round_trip_preserves_quantized_values() {
        let dir = tempfile::tempdir().unwrap();
        for channels in [1usize, 3] {
            let img = ramp_image(channels);
            let path = dir.path().join(format!("img{channels}.png"));
            save_image(&img, &path).unwrap();
            let back = load_image(&path).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn pnm_round_trip_preserves_quantized_values() {
        let dir = tempfile::tempdir().unwrap();
        for (channels, ext) in [(1usize, "pgm"), (3, "ppm")] {
            let img = ramp_image(channels);
            let path = dir.path().join(format!("img.{ext}"));
            save_image(&img, &path).unwrap();
            let back = load_image(&path).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn pnm_header_comments_are_skipped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.pgm");
        let mut bytes = b"P5\n# a comment\n2 1\n255\n".to_vec();
        bytes.extend([0u8, 255]);
        std::fs::write(&path, bytes).unwrap();
        let img = load_image(&path).unwrap();
        assert_eq!(img.pixels(), &[0.0, 1.0]);
    }

    #[test]
    fn unsupported_extension_is_rejected() {
        assert!(load_image(Path::new("x.bmp")).is_err());
    }

    #[test]
    fn truncated_pnm_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.pgm");
        std::fs::write(&path, b"P5\n4 4\n255\nxy").unwrap();
        assert!(matches!(
            load_image(&path),
            Err(PipelineError::FileFormat { .. })
        ));
    }
}
