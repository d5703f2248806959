//! Shared helpers for the integration suites: synthetic datasets and
//! invocations of the `imbf` binary.

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::Output;

use imbf_cli::io::image_io::save_image;
use imbf_core::image::Image;
use imbf_core::label::Subclass;
use imbf_core::rng::Rng64;

/// One synthetic class: images are `base + jitter` (one draw per image)
/// plus per-pixel Gaussian noise, clamped to `[0, 1]`.
pub struct SynthClass {
    pub subclass: Subclass,
    pub count: usize,
    pub base: f32,
    pub jitter: f32,
}

/// Writes a `root/<subclass>/<i>.png` tree of seeded synthetic images.
pub fn write_synthetic_tree(
    root: &Path,
    classes: &[SynthClass],
    size: usize,
    pixel_noise: f64,
    seed: u64,
) {
    for class in classes {
        let dir = root.join(class.subclass.token());
        std::fs::create_dir_all(&dir).unwrap();
        for i in 0..class.count {
            let mut rng = Rng64::from_seed(
                seed ^ (class.subclass.index() as u64) << 32 ^ i as u64,
            );
            let base = class.base + (rng.uniform_in(-1.0, 1.0) as f32) * class.jitter;
            let pixels: Vec<f32> = (0..size * size)
                .map(|_| (base as f64 + pixel_noise * rng.normal()).clamp(0.0, 1.0) as f32)
                .collect();
            let img = Image::new(size, size, 1, pixels).unwrap();
            save_image(&img, &dir.join(format!("{i:04}.png"))).unwrap();
        }
    }
}

/// Runs the `imbf` binary with the given arguments.
pub fn imbf(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_imbf"))
        .args(args)
        .output()
        .expect("imbf binary runs")
}

pub fn assert_success(output: &Output, context: &str) {
    assert!(
        output.status.success(),
        "{context} failed (exit {:?}):\n{}",
        output.status.code(),
        String::from_utf8_lossy(&output.stderr)
    );
}

/// All regular files under a directory, relative-path sorted, with contents.
pub fn dir_snapshot(root: &Path) -> Vec<(PathBuf, Vec<u8>)> {
    let mut files = Vec::new();
    collect_files(root, root, &mut files);
    files.sort_by(|a, b| a.0.cmp(&b.0));
    files
}

fn collect_files(root: &Path, dir: &Path, out: &mut Vec<(PathBuf, Vec<u8>)>) {
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        let path = entry.path();
        if path.is_dir() {
            collect_files(root, &path, out);
        } else {
            let rel = path.strip_prefix(root).unwrap().to_path_buf();
            out.push((rel, std::fs::read(&path).unwrap()));
        }
    }
}
