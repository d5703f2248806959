//! Confusion matrices and per-class precision/recall/F1.
//!
//! Rows are actual classes, columns predicted. Per-class metrics come from
//! the one-vs-rest reduction of the matrix; accuracy is trace over total
//! (which reduces to the familiar two-class formula at K = 2).
//! Zero-denominator metrics are defined as 0 and flagged, so reports are
//! always serializable.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

/// K x K confusion matrix: `cells[actual][predicted]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfusionMatrix {
    class_names: Vec<String>,
    cells: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    /// Counts prediction/label pairs into a K x K matrix. Class names
    /// default to the class indices.
    pub fn from_predictions(
        predictions: &[usize],
        labels: &[usize],
        k: usize,
    ) -> Result<Self, MetricsError> {
        if predictions.len() != labels.len() {
            return Err(MetricsError::LengthMismatch {
                predictions: predictions.len(),
                labels: labels.len(),
            });
        }
        if k == 0 {
            return Err(MetricsError::NoClasses);
        }
        let mut cells = alloc::vec![alloc::vec![0u64; k]; k];
        for (&pred, &actual) in predictions.iter().zip(labels) {
            if pred >= k || actual >= k {
                return Err(MetricsError::IndexOutOfRange {
                    value: pred.max(actual),
                    classes: k,
                });
            }
            cells[actual][pred] += 1;
        }
        Ok(Self {
            class_names: (0..k).map(|i| i.to_string()).collect(),
            cells,
        })
    }

    pub fn with_class_names(mut self, names: Vec<String>) -> Result<Self, MetricsError> {
        if names.len() != self.cells.len() {
            return Err(MetricsError::ClassSetMismatch);
        }
        self.class_names = names;
        Ok(self)
    }

    /// Rebuilds a matrix from raw cells (rows actual, columns predicted).
    pub fn from_cells(cells: Vec<Vec<u64>>, names: Vec<String>) -> Result<Self, MetricsError> {
        let k = cells.len();
        if k == 0 {
            return Err(MetricsError::NoClasses);
        }
        if names.len() != k || cells.iter().any(|row| row.len() != k) {
            return Err(MetricsError::ClassSetMismatch);
        }
        Ok(Self {
            class_names: names,
            cells,
        })
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn cells(&self) -> &[Vec<u64>] {
        &self.cells
    }

    pub fn num_classes(&self) -> usize {
        self.cells.len()
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().flatten().sum()
    }

    /// True instances of a class (its row sum).
    pub fn support(&self, class: usize) -> u64 {
        self.cells[class].iter().sum()
    }

    pub fn true_positives(&self, class: usize) -> u64 {
        self.cells[class][class]
    }

    pub fn false_positives(&self, class: usize) -> u64 {
        (0..self.num_classes())
            .filter(|&a| a != class)
            .map(|a| self.cells[a][class])
            .sum()
    }

    pub fn false_negatives(&self, class: usize) -> u64 {
        (0..self.num_classes())
            .filter(|&p| p != class)
            .map(|p| self.cells[class][p])
            .sum()
    }
}

/// Which of a class's metric denominators were zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ZeroDenominators {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl ZeroDenominators {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassMetrics {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: u64,
    pub zero_denominators: ZeroDenominators,
}

/// One-vs-rest precision, recall, and F1 for every class.
///
/// precision = TP / (TP + FP), recall = TP / (TP + FN),
/// F1 = 2PR / (P + R); a zero denominator yields 0 with a flag.
pub fn per_class_metrics(cm: &ConfusionMatrix) -> Vec<ClassMetrics> {
    (0..cm.num_classes())
        .map(|class| {
            let tp = cm.true_positives(class);
            let fp = cm.false_positives(class);
            let fn_ = cm.false_negatives(class);
            let mut flags = ZeroDenominators::default();

            let precision = if tp + fp == 0 {
                flags.precision = true;
                0.0
            } else {
                tp as f64 / (tp + fp) as f64
            };
            let recall = if tp + fn_ == 0 {
                flags.recall = true;
                0.0
            } else {
                tp as f64 / (tp + fn_) as f64
            };
            let f1 = if precision + recall == 0.0 {
                flags.f1 = true;
                0.0
            } else {
                2.0 * precision * recall / (precision + recall)
            };

            ClassMetrics {
                name: cm.class_names[class].clone(),
                precision,
                recall,
                f1,
                support: cm.support(class),
                zero_denominators: flags,
            }
        })
        .collect()
}

/// Fraction of correctly classified samples: trace over total.
pub fn accuracy(cm: &ConfusionMatrix) -> Result<f64, MetricsError> {
    let total = cm.total();
    if total == 0 {
        return Err(MetricsError::EmptyMatrix);
    }
    let trace: u64 = (0..cm.num_classes()).map(|i| cm.cells[i][i]).sum();
    Ok(trace as f64 / total as f64)
}

/// A full evaluation result for one model on one split.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassificationReport {
    pub task: String,
    pub accuracy: f64,
    pub classes: Vec<ClassMetrics>,
    pub confusion: ConfusionMatrix,
    pub config_fingerprint: String,
}

impl ClassificationReport {
    pub fn from_confusion(
        task: &str,
        cm: ConfusionMatrix,
        config_fingerprint: &str,
    ) -> Result<Self, MetricsError> {
        let accuracy = accuracy(&cm)?;
        let classes = per_class_metrics(&cm);
        Ok(Self {
            task: task.to_string(),
            accuracy,
            classes,
            confusion: cm,
            config_fingerprint: config_fingerprint.to_string(),
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassDelta {
    pub name: String,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: i64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportComparison {
    pub accuracy_delta: f64,
    pub classes: Vec<ClassDelta>,
}

/// Elementwise differences `b - a` for every metric. The two reports must
/// carry the same classes in the same order.
pub fn compare_reports(
    a: &ClassificationReport,
    b: &ClassificationReport,
) -> Result<ReportComparison, MetricsError> {
    let names_a: Vec<&str> = a.classes.iter().map(|c| c.name.as_str()).collect();
    let names_b: Vec<&str> = b.classes.iter().map(|c| c.name.as_str()).collect();
    if names_a != names_b {
        return Err(MetricsError::ClassSetMismatch);
    }
    let classes = a
        .classes
        .iter()
        .zip(&b.classes)
        .map(|(ca, cb)| ClassDelta {
            name: ca.name.clone(),
            precision: cb.precision - ca.precision,
            recall: cb.recall - ca.recall,
            f1: cb.f1 - ca.f1,
            support: cb.support as i64 - ca.support as i64,
        })
        .collect();
    Ok(ReportComparison {
        accuracy_delta: b.accuracy - a.accuracy,
        classes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MetricsError {
    LengthMismatch { predictions: usize, labels: usize },
    IndexOutOfRange { value: usize, classes: usize },
    NoClasses,
    EmptyMatrix,
    ClassSetMismatch,
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::LengthMismatch { predictions, labels } => write!(
                f,
                "predictions ({predictions}) and labels ({labels}) differ in length"
            ),
            MetricsError::IndexOutOfRange { value, classes } => {
                write!(f, "class index {value} is out of range for {classes} classes")
            }
            MetricsError::NoClasses => write!(f, "class count must be positive"),
            MetricsError::EmptyMatrix => write!(f, "confusion matrix has no samples"),
            MetricsError::ClassSetMismatch => write!(f, "reports carry different class sets"),
        }
    }
}

impl core::error::Error for MetricsError {}
