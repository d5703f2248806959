//! The JSON classification-report format and the CSV confusion-matrix
//! export.
//!
//! Report: `{task, accuracy, classes: [{name, precision, recall, f1,
//! support, zero_denominator_flags}], confusion_matrix: [[...]],
//! config_fingerprint}`. Metric values are serialized at full precision;
//! rounding is a display concern.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use imbf_core::metrics::{
    ClassificationReport, ClassMetrics, ConfusionMatrix, ZeroDenominators,
};

use crate::error::PipelineError;

#[derive(Serialize, Deserialize)]
struct ReportFile {
    task: String,
    accuracy: f64,
    classes: Vec<ClassFile>,
    confusion_matrix: Vec<Vec<u64>>,
    config_fingerprint: String,
}

#[derive(Serialize, Deserialize)]
struct ClassFile {
    name: String,
    precision: f64,
    recall: f64,
    f1: f64,
    support: u64,
    zero_denominator_flags: Vec<String>,
}

fn flags_to_list(flags: &ZeroDenominators) -> Vec<String> {
    let mut list = Vec::new();
    if flags.precision {
        list.push("precision".to_string());
    }
    if flags.recall {
        list.push("recall".to_string());
    }
    if flags.f1 {
        list.push("f1".to_string());
    }
    list
}

fn flags_from_list(list: &[String]) -> ZeroDenominators {
    ZeroDenominators {
        precision: list.iter().any(|f| f == "precision"),
        recall: list.iter().any(|f| f == "recall"),
        f1: list.iter().any(|f| f == "f1"),
    }
}

pub fn write_report(report: &ClassificationReport, path: &Path) -> Result<(), PipelineError> {
    let file = ReportFile {
        task: report.task.clone(),
        accuracy: report.accuracy,
        classes: report
            .classes
            .iter()
            .map(|c| ClassFile {
                name: c.name.clone(),
                precision: c.precision,
                recall: c.recall,
                f1: c.f1,
                support: c.support,
                zero_denominator_flags: flags_to_list(&c.zero_denominators),
            })
            .collect(),
        confusion_matrix: report.confusion.cells().to_vec(),
        config_fingerprint: report.config_fingerprint.clone(),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| PipelineError::invalid("report", e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

pub fn read_report(path: &Path) -> Result<ClassificationReport, PipelineError> {
    let text = fs::read_to_string(path).map_err(|e| PipelineError::io(path, e))?;
    let file: ReportFile = serde_json::from_str(&text).map_err(|e| PipelineError::FileFormat {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    let names: Vec<String> = file.classes.iter().map(|c| c.name.clone()).collect();
    let confusion = ConfusionMatrix::from_cells(file.confusion_matrix, names)
        .map_err(|e| PipelineError::FileFormat {
            path: path.to_path_buf(),
            msg: e.to_string(),
        })?;
    Ok(ClassificationReport {
        task: file.task,
        accuracy: file.accuracy,
        classes: file
            .classes
            .into_iter()
            .map(|c| ClassMetrics {
                name: c.name,
                precision: c.precision,
                recall: c.recall,
                f1: c.f1,
                support: c.support,
                zero_denominators: flags_from_list(&c.zero_denominator_flags),
            })
            .collect(),
        confusion,
        config_fingerprint: file.config_fingerprint,
    })
}

/// Confusion matrix as CSV with a header row and column of class names.
pub fn confusion_to_csv(cm: &ConfusionMatrix) -> String {
    let mut out = String::new();
    for name in cm.class_names() {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for (row, name) in cm.cells().iter().zip(cm.class_names()) {
        out.push_str(name);
        for cell in row {
            out.push(',');
            out.push_str(&cell.to_string());
        }
        out.push('\n');
    }
    out
}

/// Comparison output of `report --compare`: per-class deltas and the
/// accuracy delta, `b - a` throughout.
#[derive(Serialize, Deserialize)]
pub struct ComparisonFile {
    pub accuracy_delta: f64,
    pub classes: Vec<ComparisonClassFile>,
}

#[derive(Serialize, Deserialize)]
pub struct ComparisonClassFile {
    pub name: String,
    pub precision_delta: f64,
    pub recall_delta: f64,
    pub f1_delta: f64,
    pub support_delta: i64,
}

pub fn write_comparison(
    cmp: &imbf_core::metrics::ReportComparison,
    path: &Path,
) -> Result<(), PipelineError> {
    let file = ComparisonFile {
        accuracy_delta: cmp.accuracy_delta,
        classes: cmp
            .classes
            .iter()
            .map(|c| ComparisonClassFile {
                name: c.name.clone(),
                precision_delta: c.precision,
                recall_delta: c.recall,
                f1_delta: c.f1,
                support_delta: c.support,
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&file)
        .map_err(|e| PipelineError::invalid("comparison", e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}
