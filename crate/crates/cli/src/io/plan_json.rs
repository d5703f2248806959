//! The JSON rebalancing-plan format:
//! `{strategy, seed, mean, classes: [{name, original, target,
//! copies_per_image, remainder}]}` with stable key order and unquoted
//! integers.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use imbf_core::rebalance::{PlanClass, RebalancePlan, Strategy};

use crate::error::PipelineError;

#[derive(Serialize, Deserialize)]
struct PlanFile {
    strategy: String,
    seed: u64,
    mean: f64,
    classes: Vec<PlanClassFile>,
}

#[derive(Serialize, Deserialize)]
struct PlanClassFile {
    name: String,
    original: u64,
    target: u64,
    copies_per_image: u64,
    remainder: u64,
}

pub fn write_plan(plan: &RebalancePlan, path: &Path) -> Result<(), PipelineError> {
    let file = PlanFile {
        strategy: plan.strategy.name().to_string(),
        seed: plan.seed,
        mean: plan.mean,
        classes: plan
            .classes
            .iter()
            .map(|c| PlanClassFile {
                name: c.name.clone(),
                original: c.original,
                target: c.target,
                copies_per_image: c.copies_per_image,
                remainder: c.remainder,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| PipelineError::invalid("plan", e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

pub fn read_plan(path: &Path) -> Result<RebalancePlan, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    let file: PlanFile = serde_json::from_str(&text).map_err(|e| PipelineError::FileFormat {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let strategy = match file.strategy.as_str() {
        "double-below-mean" => Strategy::DoubleBelowMean,
        "explicit-targets" => Strategy::ExplicitTargets(
            file.classes
                .iter()
                .map(|c| (c.name.clone(), c.target))
                .collect(),
        ),
        other => {
            return Err(PipelineError::FileFormat {
                path: path.to_path_buf(),
                msg: format!("unknown strategy {other:?}"),
            })
        }
    };
    Ok(RebalancePlan {
        strategy,
        seed: file.seed,
        mean: file.mean,
        classes: file
            .classes
            .into_iter()
            .map(|c| PlanClass {
                name: c.name,
                original: c.original,
                target: c.target,
                copies_per_image: c.copies_per_image,
                remainder: c.remainder,
            })
            .collect(),
    })
}

/// Reads an explicit-targets file: a JSON object mapping class name to
/// target count.
pub fn read_targets(path: &Path) -> Result<BTreeMap<String, u64>, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| PipelineError::FileFormat {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })
}
