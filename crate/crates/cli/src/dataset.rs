//! Directory scanning into manifests, and full manifest validation.
//!
//! Two layouts are understood. `ClassPerDir` expects
//! `root/<coarse>/<subclass>/.../image`, e.g. `benign/adenosis/x.png`;
//! `SubclassPerDir` expects `root/<subclass>/.../image`. Directory tokens
//! accept short codes (`TA`) and full names (`tubular_adenoma`),
//! case-insensitively. A path component matching a magnification token
//! (`40X`, `100X`, `200X`, `400X`) is picked up as the entry's
//! magnification. Image ids are root-relative paths with `/` separators,
//! and entries come out sorted by id so scans are order-independent.

use std::fs::File;
use std::path::{Path, PathBuf};

use imbf_core::label::{ClassLabel, Coarse, Magnification, Subclass};
use imbf_core::manifest::{validate_structure, DatasetManifest, ManifestEntry, Provenance, Split, Violation};

use crate::error::PipelineError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layout {
    /// `root/<coarse>/<subclass>/...`
    ClassPerDir,
    /// `root/<subclass>/...`
    SubclassPerDir,
}

impl Layout {
    pub fn from_token(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "class" | "class-per-dir" => Some(Layout::ClassPerDir),
            "subclass" | "subclass-per-dir" => Some(Layout::SubclassPerDir),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Layout::ClassPerDir => "class",
            Layout::SubclassPerDir => "subclass",
        }
    }
}

const IMAGE_EXTENSIONS: [&str; 3] = ["png", "ppm", "pgm"];

fn is_image_file(path: &Path) -> bool {
    path.extension()
        .map(|e| {
            let ext = e.to_string_lossy().to_ascii_lowercase();
            IMAGE_EXTENSIONS.contains(&ext.as_str())
        })
        .unwrap_or(false)
}

/// Scans an image tree into a manifest of unassigned original entries.
pub fn scan_directory(root: &Path, layout: Layout) -> Result<DatasetManifest, PipelineError> {
    if !root.is_dir() {
        return Err(PipelineError::invalid(
            "scan root",
            format!("{} is not a directory", root.display()),
        ));
    }
    let mut entries = Vec::new();
    for walked in walkdir::WalkDir::new(root).sort_by_file_name() {
        let walked = walked.map_err(|e| {
            let path = e.path().map(Path::to_path_buf).unwrap_or_else(|| root.to_path_buf());
            match e.into_io_error() {
                Some(io) => PipelineError::io(path, io),
                None => PipelineError::invalid("scan", format!("cannot walk {}", path.display())),
            }
        })?;
        if !walked.file_type().is_file() || !is_image_file(walked.path()) {
            continue;
        }
        let path = walked.path();
        let rel = path.strip_prefix(root).expect("walked paths sit under root");
        let components: Vec<String> = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy().into_owned())
            .collect();

        let label = label_from_components(layout, &components, path)?;
        let magnification = components
            .iter()
            .take(components.len().saturating_sub(1))
            .find_map(|c| Magnification::from_token(c));

        // Readability check: open and drop.
        File::open(path).map_err(|e| PipelineError::io(path, e))?;

        let image_id = components.join("/");
        entries.push(ManifestEntry {
            image_id,
            path: path.to_string_lossy().into_owned(),
            label,
            magnification,
            split: Split::Unassigned,
            provenance: Provenance::Original,
        });
    }
    if entries.is_empty() {
        return Err(PipelineError::ZeroImages {
            root: root.to_path_buf(),
        });
    }
    entries.sort_by(|a, b| a.image_id.cmp(&b.image_id));
    Ok(DatasetManifest::new(entries))
}

fn label_from_components(
    layout: Layout,
    components: &[String],
    path: &Path,
) -> Result<ClassLabel, PipelineError> {
    let unknown = |token: &str| PipelineError::UnknownClassToken {
        token: token.to_string(),
        path: path.to_path_buf(),
    };
    match layout {
        Layout::SubclassPerDir => {
            let token = components
                .first()
                .filter(|_| components.len() >= 2)
                .ok_or_else(|| unknown("<missing subclass directory>"))?;
            let subclass = Subclass::from_token(token).ok_or_else(|| unknown(token))?;
            Ok(ClassLabel::from_subclass(subclass))
        }
        Layout::ClassPerDir => {
            if components.len() < 3 {
                return Err(unknown("<missing class/subclass directories>"));
            }
            let coarse_token = &components[0];
            let subclass_token = &components[1];
            let coarse = Coarse::from_token(coarse_token).ok_or_else(|| unknown(coarse_token))?;
            let subclass =
                Subclass::from_token(subclass_token).ok_or_else(|| unknown(subclass_token))?;
            ClassLabel::new(coarse, subclass).map_err(|e| {
                PipelineError::invalid("directory layout", format!("{}: {e}", path.display()))
            })
        }
    }
}

/// A manifest problem: either a structural invariant violation or a path
/// that no longer exists on disk.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ManifestIssue {
    Structural(Violation),
    MissingPath { image_id: String, path: PathBuf },
}

impl std::fmt::Display for ManifestIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ManifestIssue::Structural(v) => write!(f, "{v}"),
            ManifestIssue::MissingPath { image_id, path } => {
                write!(f, "entry {image_id:?} points at a missing file {}", path.display())
            }
        }
    }
}

/// Full validation: structural invariants plus path existence. An empty
/// list means the manifest is well-formed.
pub fn validate_manifest(manifest: &DatasetManifest) -> Vec<ManifestIssue> {
    let mut issues: Vec<ManifestIssue> = validate_structure(manifest)
        .into_iter()
        .map(ManifestIssue::Structural)
        .collect();
    for entry in &manifest.entries {
        let path = PathBuf::from(&entry.path);
        if !path.is_file() {
            issues.push(ManifestIssue::MissingPath {
                image_id: entry.image_id.clone(),
                path,
            });
        }
    }
    issues
}
