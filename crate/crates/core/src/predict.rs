//! Final aggregated predictions and the inclusion-weighted uncertainty estimate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bma::BmaSummary;
use crate::data::PredictionTable;
use crate::math::clamped_sigmoid;

/// Both methods label a row positive when its probability is at least this.
pub const CLASSIFICATION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PredictError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("empty prediction row")]
    EmptyRow,
    #[error("entry {index} is not a finite value in [0,1]")]
    OutOfRange { index: usize },
    #[error("accuracy {0} is outside [0,1]")]
    InvalidAccuracy(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Baytta,
    TtaMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AggregatedPrediction {
    pub probability: f64,
    pub label: bool,
    pub method: Method,
}

impl AggregatedPrediction {
    fn new(probability: f64, method: Method) -> Self {
        Self {
            probability,
            label: probability >= CLASSIFICATION_THRESHOLD,
            method,
        }
    }
}

/// Whether the averaged intercept enters the final linear predictor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictOptions {
    pub include_intercept: bool,
}

impl Default for PredictOptions {
    fn default() -> Self {
        Self {
            include_intercept: true,
        }
    }
}

/// `sigmoid(E[β_0] + Σ_i E[β_i] · row[i])`, clamped to `[1e-12, 1−1e-12]`.
pub fn predict_baytta(
    summary: &BmaSummary,
    row: &[f64],
) -> Result<AggregatedPrediction, PredictError> {
    predict_baytta_with(summary, row, PredictOptions::default())
}

pub fn predict_baytta_with(
    summary: &BmaSummary,
    row: &[f64],
    options: PredictOptions,
) -> Result<AggregatedPrediction, PredictError> {
    if row.len() != summary.n_columns() {
        return Err(PredictError::DimensionMismatch {
            expected: summary.n_columns(),
            found: row.len(),
        });
    }
    if let Some(index) = row.iter().position(|v| !v.is_finite()) {
        return Err(PredictError::OutOfRange { index });
    }
    let intercept = if options.include_intercept {
        summary.expected_intercept
    } else {
        0.0
    };
    let eta = intercept
        + summary
            .expected_coeffs
            .iter()
            .zip(row)
            .map(|(b, x)| b * x)
            .sum::<f64>();
    Ok(AggregatedPrediction::new(
        clamped_sigmoid(eta),
        Method::Baytta,
    ))
}

/// Arithmetic mean of the row: the plain TTA baseline.
pub fn predict_tta_mean(row: &[f64]) -> Result<AggregatedPrediction, PredictError> {
    if row.is_empty() {
        return Err(PredictError::EmptyRow);
    }
    if let Some(index) = row
        .iter()
        .position(|v| !(v.is_finite() && (0.0..=1.0).contains(v)))
    {
        return Err(PredictError::OutOfRange { index });
    }
    // Shifted by the first entry so a constant row returns that value exactly.
    let shift = row[0];
    let mean = shift + row.iter().map(|v| v - shift).sum::<f64>() / row.len() as f64;
    Ok(AggregatedPrediction::new(mean, Method::TtaMean))
}

pub fn predict_table_baytta(
    summary: &BmaSummary,
    table: &PredictionTable,
) -> Result<Vec<AggregatedPrediction>, PredictError> {
    (0..table.n_rows())
        .map(|i| predict_baytta(summary, &table.row(i)))
        .collect()
}

pub fn predict_table_tta_mean(
    table: &PredictionTable,
) -> Result<Vec<AggregatedPrediction>, PredictError> {
    (0..table.n_rows())
        .map(|i| predict_tta_mean(&table.row(i)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub sigma_baytta: f64,
    pub per_column_accuracy: Vec<f64>,
    pub mu_bma: f64,
}

/// Accuracy of thresholding a single column against the labels.
pub fn column_accuracy(column: &[f64], labels: &[bool]) -> f64 {
    if labels.is_empty() {
        return 0.0;
    }
    let hits = column
        .iter()
        .zip(labels)
        .filter(|(&p, &y)| (p >= CLASSIFICATION_THRESHOLD) == y)
        .count();
    hits as f64 / labels.len() as f64
}

/// `sqrt( (1/(k+1)) Σ_i ( p(x_i) · (acc_i − μ_BMA) )² )`, where `acc_i` is the
/// thresholded accuracy of column `i` on `table` and `μ_BMA` the accuracy of the
/// averaged prediction on the same rows.
pub fn uncertainty(
    summary: &BmaSummary,
    table: &PredictionTable,
    mu_bma: f64,
) -> Result<UncertaintyReport, PredictError> {
    if table.n_columns() != summary.n_columns() {
        return Err(PredictError::DimensionMismatch {
            expected: summary.n_columns(),
            found: table.n_columns(),
        });
    }
    if !(0.0..=1.0).contains(&mu_bma) {
        return Err(PredictError::InvalidAccuracy(mu_bma));
    }
    let per_column_accuracy: Vec<f64> = (0..table.n_columns())
        .map(|j| column_accuracy(table.column(j), table.labels()))
        .collect();
    let sigma_baytta = sigma_from_parts(&summary.inclusion_prob, &per_column_accuracy, mu_bma);
    Ok(UncertaintyReport {
        sigma_baytta,
        per_column_accuracy,
        mu_bma,
    })
}

/// The inclusion-weighted deviation formula on precomputed inputs.
pub fn sigma_from_parts(inclusion_prob: &[f64], accuracies: &[f64], mu_bma: f64) -> f64 {
    debug_assert_eq!(inclusion_prob.len(), accuracies.len());
    if accuracies.is_empty() {
        return 0.0;
    }
    let sum_sq: f64 = inclusion_prob
        .iter()
        .zip(accuracies)
        .map(|(p, acc)| {
            let d = p * (acc - mu_bma);
            d * d
        })
        .sum();
    (sum_sq / accuracies.len() as f64).sqrt()
}
