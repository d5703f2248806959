//! Below-mean class selection and per-class augmentation targets.
//!
//! The rebalancing rule: a class is underrepresented when its training count
//! is strictly below the mean count across classes (compared exactly, as
//! integers: `count * classes < total`). The default strategy doubles every
//! selected class; explicit per-class targets are also supported. Plans
//! record, per class, how many copies each original image receives and how
//! the remainder is distributed, so materialization is fully determined.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::label::{Coarse, Subclass};
use crate::manifest::{DatasetManifest, Split};

/// Per-class counts, keyed by class name in sorted order.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ClassCounts {
    counts: BTreeMap<String, u64>,
}

impl ClassCounts {
    pub fn new(counts: BTreeMap<String, u64>) -> Self {
        Self { counts }
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, u64)>) -> Self {
        Self {
            counts: pairs
                .into_iter()
                .map(|(name, count)| (name.to_string(), count))
                .collect(),
        }
    }

    pub fn get(&self, name: &str) -> u64 {
        self.counts.get(name).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn class_count(&self) -> usize {
        self.counts.len()
    }

    /// Mean count as an exact rational `(total, classes)`.
    pub fn mean_ratio(&self) -> (u64, u64) {
        (self.total(), self.counts.len() as u64)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(name, &count)| (name.as_str(), count))
    }
}

/// Counts of original entries per subclass in one split. Every subclass
/// appears as a key, zero when absent.
pub fn class_counts(manifest: &DatasetManifest, split: Split) -> ClassCounts {
    let mut counts: BTreeMap<String, u64> = Subclass::ALL
        .iter()
        .map(|s| (s.token().to_string(), 0))
        .collect();
    for entry in manifest.in_split(split) {
        if entry.provenance.is_original() {
            *counts.get_mut(entry.label.subclass().token()).unwrap() += 1;
        }
    }
    ClassCounts::new(counts)
}

/// Counts of original entries per coarse class in one split.
pub fn coarse_counts(manifest: &DatasetManifest, split: Split) -> ClassCounts {
    let mut counts: BTreeMap<String, u64> = Coarse::ALL
        .iter()
        .map(|c| (c.token().to_string(), 0))
        .collect();
    for entry in manifest.in_split(split) {
        if entry.provenance.is_original() {
            *counts.get_mut(entry.label.coarse().token()).unwrap() += 1;
        }
    }
    ClassCounts::new(counts)
}

/// Classes strictly below the mean count, compared exactly.
pub fn select_underrepresented(counts: &ClassCounts) -> Result<Vec<String>, RebalanceError> {
    let (total, classes) = counts.mean_ratio();
    if total == 0 {
        return Err(RebalanceError::AllCountsZero);
    }
    Ok(counts
        .iter()
        .filter(|&(_, count)| count * classes < total)
        .map(|(name, _)| name.to_string())
        .collect())
}

/// How targets are chosen: double every below-mean class, or use explicit
/// per-class targets (classes not listed keep their original count).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Strategy {
    DoubleBelowMean,
    ExplicitTargets(BTreeMap<String, u64>),
}

impl Strategy {
    pub fn name(&self) -> &'static str {
        match self {
            Strategy::DoubleBelowMean => "double-below-mean",
            Strategy::ExplicitTargets(_) => "explicit-targets",
        }
    }
}

/// One class's row in a rebalancing plan.
///
/// With `extra = target - original`: `copies_per_image = extra / original`
/// and `remainder = extra % original`, so
/// `original * copies_per_image + remainder == extra` and
/// `remainder < original`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanClass {
    pub name: String,
    pub original: u64,
    pub target: u64,
    pub copies_per_image: u64,
    pub remainder: u64,
}

impl PlanClass {
    /// Copies the image ranked `rank` (by id, ascending) receives: the first
    /// `remainder` images get one extra copy.
    pub fn copies_for(&self, rank: usize) -> u64 {
        self.copies_per_image + u64::from((rank as u64) < self.remainder)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RebalancePlan {
    pub strategy: Strategy,
    pub seed: u64,
    /// Mean original count across classes.
    pub mean: f64,
    pub classes: Vec<PlanClass>,
}

impl RebalancePlan {
    pub fn total_target(&self) -> u64 {
        self.classes.iter().map(|c| c.target).sum()
    }

    pub fn class(&self, name: &str) -> Option<&PlanClass> {
        self.classes.iter().find(|c| c.name == name)
    }
}

/// Builds a rebalancing plan from per-class counts.
pub fn build_plan(
    counts: &ClassCounts,
    strategy: Strategy,
    seed: u64,
) -> Result<RebalancePlan, RebalanceError> {
    let (total, class_count) = counts.mean_ratio();
    if total == 0 {
        return Err(RebalanceError::AllCountsZero);
    }

    let targets: BTreeMap<String, u64> = match &strategy {
        Strategy::DoubleBelowMean => {
            let selected = select_underrepresented(counts)?;
            counts
                .iter()
                .map(|(name, original)| {
                    let target = if selected.iter().any(|s| s == name) {
                        2 * original
                    } else {
                        original
                    };
                    (name.to_string(), target)
                })
                .collect()
        }
        Strategy::ExplicitTargets(map) => {
            for (name, &target) in map {
                let original = counts.get(name);
                if target < original {
                    return Err(RebalanceError::TargetBelowOriginal {
                        class: name.clone(),
                        original,
                        target,
                    });
                }
            }
            counts
                .iter()
                .map(|(name, original)| {
                    (name.to_string(), map.get(name).copied().unwrap_or(original))
                })
                .collect()
        }
    };

    let classes = counts
        .iter()
        .map(|(name, original)| {
            let target = targets[name];
            let extra = target - original;
            let (copies_per_image, remainder) = if original == 0 {
                (0, 0)
            } else {
                (extra / original, extra % original)
            };
            PlanClass {
                name: name.to_string(),
                original,
                target,
                copies_per_image,
                remainder,
            }
        })
        .collect();

    Ok(RebalancePlan {
        strategy,
        seed,
        mean: total as f64 / class_count as f64,
        classes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RebalanceError {
    AllCountsZero,
    TargetBelowOriginal {
        class: String,
        original: u64,
        target: u64,
    },
}

impl fmt::Display for RebalanceError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RebalanceError::AllCountsZero => {
                write!(f, "cannot rebalance: every class count is zero")
            }
            RebalanceError::TargetBelowOriginal {
                class,
                original,
                target,
            } => write!(
                f,
                "explicit target {target} for class {class:?} is below its original count {original}"
            ),
        }
    }
}

impl core::error::Error for RebalanceError {}
