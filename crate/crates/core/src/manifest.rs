//! Image catalogs with label and split assignments.
//!
//! A [`DatasetManifest`] is a flat list of entries; per-class counts are
//! always recomputed from it, never stored. [`stratified_split`] assigns
//! train/val/test within each subclass so every class keeps the global
//! ratios, and the assignment is a pure function of the manifest's content
//! (entries are sorted by id before the seeded shuffle, so input order is
//! irrelevant).

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::label::{ClassLabel, Magnification, Subclass};
use crate::rng::{derive_stream_seed, shuffle, Rng64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
    Unassigned,
}

impl Split {
    pub const ASSIGNED: [Split; 3] = [Split::Train, Split::Val, Split::Test];

    pub fn token(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }

    pub fn from_token(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Some(Split::Train),
            "val" | "validation" => Some(Split::Val),
            "test" => Some(Split::Test),
            "unassigned" => Some(Split::Unassigned),
            _ => None,
        }
    }
}

/// Where an entry came from: scanned from disk, or synthesized as augmented
/// copy `copy_index` (starting at 1) of an original entry.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Provenance {
    Original,
    Augmented { copy_index: u32, parent_id: String },
}

impl Provenance {
    pub fn is_original(&self) -> bool {
        matches!(self, Provenance::Original)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ManifestEntry {
    /// Stable identifier, unique within a manifest. For scanned entries this
    /// is the path relative to the scan root with `/` separators.
    pub image_id: String,
    pub path: String,
    pub label: ClassLabel,
    pub magnification: Option<Magnification>,
    pub split: Split,
    pub provenance: Provenance,
}

/// A catalog of labeled images.
///
/// `seed` records the value used by [`stratified_split`]; it is in-memory
/// provenance only. The CSV manifest format does not persist it, so
/// structural equality compares entries alone.
#[derive(Clone, Debug, Default)]
pub struct DatasetManifest {
    pub entries: Vec<ManifestEntry>,
    pub seed: Option<u64>,
}

impl PartialEq for DatasetManifest {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

impl DatasetManifest {
    pub fn new(entries: Vec<ManifestEntry>) -> Self {
        Self {
            entries,
            seed: None,
        }
    }

    /// Entries of one split, originals and augmented copies alike.
    pub fn in_split(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }
}

/// Train/val/test fractions. Must be positive and sum to 1 within 1e-9.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitRatios {
    pub train: f64,
    pub val: f64,
    pub test: f64,
}

impl SplitRatios {
    pub fn new(train: f64, val: f64, test: f64) -> Result<Self, DatasetError> {
        let ratios = Self { train, val, test };
        ratios.validate()?;
        Ok(ratios)
    }

    pub fn validate(&self) -> Result<(), DatasetError> {
        if self.train <= 0.0 || self.val <= 0.0 || self.test <= 0.0 {
            return Err(DatasetError::BadRatios {
                train: self.train,
                val: self.val,
                test: self.test,
            });
        }
        let sum = self.train + self.val + self.test;
        if num_traits::Float::abs(sum - 1.0) > 1e-9 {
            return Err(DatasetError::BadRatios {
                train: self.train,
                val: self.val,
                test: self.test,
            });
        }
        Ok(())
    }
}

impl Default for SplitRatios {
    fn default() -> Self {
        Self {
            train: 0.8,
            val: 0.1,
            test: 0.1,
        }
    }
}

/// Largest-remainder apportionment of `total` items across the three splits.
///
/// Floors of the ideal counts are assigned first; the leftover goes to the
/// largest fractional remainders, ties broken in train/val/test order.
pub fn split_sizes(total: usize, ratios: &SplitRatios) -> (usize, usize, usize) {
    let fractions = [ratios.train, ratios.val, ratios.test];
    let ideals = fractions.map(|r| r * total as f64);
    let mut base = [0usize; 3];
    let mut remainder = [0.0f64; 3];
    for i in 0..3 {
        let floor = num_traits::Float::floor(ideals[i]);
        base[i] = floor as usize;
        remainder[i] = ideals[i] - floor;
    }
    let mut leftover = total - (base[0] + base[1] + base[2]);
    let mut order = [0usize, 1, 2];
    // Stable selection: remainder descending, then split order.
    order.sort_by(|&a, &b| remainder[b].partial_cmp(&remainder[a]).unwrap().then(a.cmp(&b)));
    for &i in &order {
        if leftover == 0 {
            break;
        }
        base[i] += 1;
        leftover -= 1;
    }
    (base[0], base[1], base[2])
}

/// Assigns every entry to train/val/test, stratified by subclass.
///
/// Within each subclass, entries are sorted by `image_id`, shuffled by a
/// stream seeded from `(seed, subclass)`, and filled into the splits in
/// train/val/test order at the largest-remainder sizes. The result is a pure
/// function of the entry set, the ratios, and the seed.
pub fn stratified_split(
    manifest: &DatasetManifest,
    ratios: &SplitRatios,
    seed: u64,
) -> Result<DatasetManifest, DatasetError> {
    ratios.validate()?;
    if let Some(entry) = manifest.entries.iter().find(|e| !e.provenance.is_original()) {
        return Err(DatasetError::NotOriginal {
            image_id: entry.image_id.clone(),
        });
    }

    let mut by_subclass: Vec<(Subclass, Vec<usize>)> = Subclass::ALL
        .iter()
        .map(|&s| (s, Vec::new()))
        .collect();
    for (idx, entry) in manifest.entries.iter().enumerate() {
        by_subclass[entry.label.subclass().index()].1.push(idx);
    }

    let mut assignment: Vec<Split> = alloc::vec![Split::Unassigned; manifest.entries.len()];
    for (subclass, mut indices) in by_subclass {
        if indices.is_empty() {
            continue;
        }
        if indices.len() < 3 {
            return Err(DatasetError::SubclassTooSmall {
                subclass,
                count: indices.len(),
            });
        }
        indices.sort_by(|&a, &b| manifest.entries[a].image_id.cmp(&manifest.entries[b].image_id));
        let mut rng = Rng64::from_seed(derive_stream_seed(seed, subclass.token(), 0));
        shuffle(&mut indices, &mut rng);

        let (n_train, n_val, _) = split_sizes(indices.len(), ratios);
        for (rank, &idx) in indices.iter().enumerate() {
            assignment[idx] = if rank < n_train {
                Split::Train
            } else if rank < n_train + n_val {
                Split::Val
            } else {
                Split::Test
            };
        }
    }

    let entries = manifest
        .entries
        .iter()
        .zip(assignment)
        .map(|(entry, split)| ManifestEntry {
            split,
            ..entry.clone()
        })
        .collect();
    Ok(DatasetManifest {
        entries,
        seed: Some(seed),
    })
}

/// A structural problem found in a manifest. Violations are data, not
/// errors: validation always returns the full list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateImageId { image_id: String },
    MissingParent { image_id: String, parent_id: String },
    ParentNotOriginal { image_id: String, parent_id: String },
    BadCopyIndex { image_id: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateImageId { image_id } => {
                write!(f, "duplicate image_id {image_id:?}")
            }
            Violation::MissingParent { image_id, parent_id } => {
                write!(f, "augmented entry {image_id:?} references missing parent {parent_id:?}")
            }
            Violation::ParentNotOriginal { image_id, parent_id } => {
                write!(f, "augmented entry {image_id:?} references non-original parent {parent_id:?}")
            }
            Violation::BadCopyIndex { image_id } => {
                write!(f, "augmented entry {image_id:?} has copy_index 0 (must start at 1)")
            }
        }
    }
}

/// Checks the structural invariants: unique ids, augmented entries pointing
/// at existing original parents, copy indices starting at 1. Path existence
/// is checked by the IO layer.
pub fn validate_structure(manifest: &DatasetManifest) -> Vec<Violation> {
    let mut violations = Vec::new();

    let mut ids: Vec<&str> = manifest.entries.iter().map(|e| e.image_id.as_str()).collect();
    ids.sort_unstable();
    for window in ids.windows(2) {
        if window[0] == window[1] {
            let duplicate = Violation::DuplicateImageId {
                image_id: String::from(window[0]),
            };
            if violations.last() != Some(&duplicate) {
                violations.push(duplicate);
            }
        }
    }

    let mut originals: Vec<&str> = manifest
        .entries
        .iter()
        .filter(|e| e.provenance.is_original())
        .map(|e| e.image_id.as_str())
        .collect();
    originals.sort_unstable();

    for entry in &manifest.entries {
        if let Provenance::Augmented { copy_index, parent_id } = &entry.provenance {
            if *copy_index == 0 {
                violations.push(Violation::BadCopyIndex {
                    image_id: entry.image_id.clone(),
                });
            }
            if originals.binary_search(&parent_id.as_str()).is_err() {
                let exists_at_all = manifest.entries.iter().any(|e| &e.image_id == parent_id);
                violations.push(if exists_at_all {
                    Violation::ParentNotOriginal {
                        image_id: entry.image_id.clone(),
                        parent_id: parent_id.clone(),
                    }
                } else {
                    Violation::MissingParent {
                        image_id: entry.image_id.clone(),
                        parent_id: parent_id.clone(),
                    }
                });
            }
        }
    }
    violations
}

#[derive(Clone, Debug, PartialEq)]
pub enum DatasetError {
    BadRatios { train: f64, val: f64, test: f64 },
    NotOriginal { image_id: String },
    SubclassTooSmall { subclass: Subclass, count: usize },
}

impl fmt::Display for DatasetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatasetError::BadRatios { train, val, test } => write!(
                f,
                "split ratios must be positive and sum to 1, got ({train}, {val}, {test})"
            ),
            DatasetError::NotOriginal { image_id } => write!(
                f,
                "cannot split a manifest containing augmented entries ({image_id:?})"
            ),
            DatasetError::SubclassTooSmall { subclass, count } => write!(
                f,
                "subclass {} has only {count} entries; at least 3 are needed to populate all splits",
                subclass.token()
            ),
        }
    }
}

impl core::error::Error for DatasetError {}
