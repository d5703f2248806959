//! Materialization of a rebalancing plan: synthesizing augmented copies to
//! disk and appending them to the manifest.
//!
//! Each copy's transform parameters come from a stream seeded by
//! `(plan seed, parent id, copy index)`, so output bytes are identical for
//! any worker count and any processing order. Copies are written as
//! `<parent_id>__aug<copy_index>.png` under the output directory,
//! preserving the parent's subdirectories.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use imbf_core::augment::{apply_pipeline, derive_seed, sample_intensive, IntensivePolicy};
use imbf_core::label::{Coarse, Subclass};
use imbf_core::manifest::{DatasetManifest, ManifestEntry, Provenance, Split};
use imbf_core::rebalance::{class_counts, coarse_counts, RebalancePlan};
use imbf_core::rng::Rng64;

use crate::error::PipelineError;
use crate::io::image_io::{load_image, save_image};

/// Applies a plan to the manifest's training split.
///
/// The plan must have been built from this manifest's training counts
/// (checked class by class). Only the training split changes; augmented
/// entries are appended after all originals in deterministic order.
pub fn materialize(
    plan: &RebalancePlan,
    manifest: &DatasetManifest,
    policy: &IntensivePolicy,
    out_dir: &Path,
    jobs: usize,
) -> Result<DatasetManifest, PipelineError> {
    verify_counts(plan, manifest)?;
    fs::create_dir_all(out_dir).map_err(|e| PipelineError::io(out_dir, e))?;

    // One work unit per parent image, carrying its copy indices.
    struct Task {
        parent: ManifestEntry,
        copies: Vec<u32>,
    }
    let mut tasks: Vec<Task> = Vec::new();
    for class in &plan.classes {
        if class.target == class.original {
            continue;
        }
        let mut parents = class_members(manifest, &class.name)?;
        parents.sort_by(|a, b| a.image_id.cmp(&b.image_id));
        for (rank, parent) in parents.into_iter().enumerate() {
            let copies = class.copies_for(rank);
            if copies == 0 {
                continue;
            }
            tasks.push(Task {
                parent: parent.clone(),
                copies: (1..=copies as u32).collect(),
            });
        }
    }

    let seed = plan.seed;
    let run_task = |task: &Task| -> Result<Vec<ManifestEntry>, PipelineError> {
        let parent_path = PathBuf::from(&task.parent.path);
        let image = load_image(&parent_path)?;
        let mut produced = Vec::with_capacity(task.copies.len());
        for &copy_index in &task.copies {
            let stream = derive_seed(seed, &task.parent.image_id, copy_index);
            let params = sample_intensive(policy, &mut Rng64::from_seed(stream));
            let augmented = apply_pipeline(&image, &params)?;
            let rel_name = format!("{}__aug{}.png", task.parent.image_id, copy_index);
            let out_path = out_dir.join(&rel_name);
            if let Some(parent_dir) = out_path.parent() {
                fs::create_dir_all(parent_dir).map_err(|e| PipelineError::io(parent_dir, e))?;
            }
            save_image(&augmented, &out_path)?;
            produced.push(ManifestEntry {
                image_id: rel_name,
                path: out_path.to_string_lossy().into_owned(),
                label: task.parent.label,
                magnification: task.parent.magnification,
                split: Split::Train,
                provenance: Provenance::Augmented {
                    copy_index,
                    parent_id: task.parent.image_id.clone(),
                },
            });
        }
        Ok(produced)
    };

    let results: Vec<Result<Vec<ManifestEntry>, PipelineError>> = if jobs <= 1 {
        tasks.iter().map(run_task).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| PipelineError::invalid("jobs", e.to_string()))?;
        pool.install(|| tasks.par_iter().map(run_task).collect())
    };

    let mut entries = manifest.entries.clone();
    for produced in results {
        entries.extend(produced?);
    }
    let result = DatasetManifest {
        entries,
        seed: manifest.seed,
    };

    // Post-condition: training counts now equal the plan targets.
    for class in &plan.classes {
        let got = class_member_count(&result, &class.name)?;
        if got != class.target {
            return Err(PipelineError::invalid(
                "materialization",
                format!(
                    "class {:?} ended with {got} training entries, expected {}",
                    class.name, class.target
                ),
            ));
        }
    }
    Ok(result)
}

fn verify_counts(plan: &RebalancePlan, manifest: &DatasetManifest) -> Result<(), PipelineError> {
    // Plans are keyed either by subclass tokens or by coarse class tokens.
    let by_subclass = plan
        .classes
        .iter()
        .all(|c| Subclass::from_token(&c.name).is_some());
    let counts = if by_subclass {
        class_counts(manifest, Split::Train)
    } else {
        coarse_counts(manifest, Split::Train)
    };
    for class in &plan.classes {
        let manifest_count = counts.get(&class.name);
        if manifest_count != class.original {
            return Err(PipelineError::PlanMismatch {
                class: class.name.clone(),
                manifest_count,
                plan_count: class.original,
            });
        }
    }
    Ok(())
}

/// Training-split originals belonging to a plan class (a subclass token or
/// a coarse token).
fn class_members<'m>(
    manifest: &'m DatasetManifest,
    class: &str,
) -> Result<Vec<&'m ManifestEntry>, PipelineError> {
    let filter: Box<dyn Fn(&ManifestEntry) -> bool> =
        if let Some(subclass) = Subclass::from_token(class) {
            Box::new(move |e: &ManifestEntry| e.label.subclass() == subclass)
        } else if let Some(coarse) = Coarse::from_token(class) {
            Box::new(move |e: &ManifestEntry| e.label.coarse() == coarse)
        } else {
            return Err(PipelineError::invalid(
                "plan",
                format!("unknown class token {class:?}"),
            ));
        };
    Ok(manifest
        .in_split(Split::Train)
        .filter(|e| e.provenance.is_original() && filter(e))
        .collect())
}

fn class_member_count(manifest: &DatasetManifest, class: &str) -> Result<u64, PipelineError> {
    let filter: Box<dyn Fn(&ManifestEntry) -> bool> =
        if let Some(subclass) = Subclass::from_token(class) {
            Box::new(move |e: &ManifestEntry| e.label.subclass() == subclass)
        } else if let Some(coarse) = Coarse::from_token(class) {
            Box::new(move |e: &ManifestEntry| e.label.coarse() == coarse)
        } else {
            return Err(PipelineError::invalid(
                "plan",
                format!("unknown class token {class:?}"),
            ));
        };
    Ok(manifest.in_split(Split::Train).filter(|e| filter(e)).count() as u64)
}
