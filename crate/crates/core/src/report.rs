//! Machine-readable run reports and their plain-text rendering.
//!
//! Reports serialize with a fixed field order and carry `schema_version`.
//! Column indices are 0-based and match the CSV `pred_j` headers.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::bma::{PredictorSubset, SearchMode};
use crate::metrics::{ConfusionCounts, MeanStd};

pub const SCHEMA_VERSION: u32 = 1;

/// Which rows the model weights are fitted on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Fit and evaluate on every row.
    Transductive,
    /// Fit on a seeded calibration split, evaluate on the remaining rows.
    #[default]
    Split,
}

impl std::fmt::Display for Protocol {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Protocol::Transductive => "transductive",
            Protocol::Split => "split",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodResult {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub confusion: ConfusionCounts,
}

impl MethodResult {
    pub fn from_confusion(confusion: ConfusionCounts) -> Self {
        Self {
            accuracy: confusion.accuracy().value,
            precision: confusion.precision().value,
            recall: confusion.recall().value,
            f1: confusion.f1().value,
            confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcceptedModel {
    pub subset: PredictorSubset,
    pub bic: f64,
    pub log_model_likelihood: f64,
    pub posterior_weight: f64,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: u32,
    pub input: Option<String>,
    pub protocol: Protocol,
    pub mode: SearchMode,
    pub seed: u64,
    /// Calibration fraction; absent for the transductive protocol.
    pub split_fraction: Option<f64>,
    pub n_columns: usize,
    pub n_fit_rows: usize,
    pub n_eval_rows: usize,
    pub baytta: MethodResult,
    pub tta_mean: MethodResult,
    pub sigma_baytta: f64,
    pub per_column_accuracy: Vec<f64>,
    pub inclusion_prob: Vec<f64>,
    pub expected_coeffs: Vec<f64>,
    pub expected_intercept: f64,
    pub log_l_total: f64,
    pub accepted_models: Vec<AcceptedModel>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSettings {
    pub trials: usize,
    pub n_rows: usize,
    pub n_columns: usize,
    pub signal_noise: f64,
    pub adversarial_columns: Vec<usize>,
    pub label_flip_rate: f64,
    pub latent_mean: f64,
    pub latent_sd: f64,
    pub seed: u64,
    pub mode: SearchMode,
    pub protocol: Protocol,
    pub split_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub trial: usize,
    pub seed: u64,
    pub baytta_accuracy: f64,
    pub tta_mean_accuracy: f64,
    pub sigma_baytta: f64,
    pub inclusion_prob: Vec<f64>,
    pub n_accepted: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub schema_version: u32,
    pub settings: SimulationSettings,
    pub baytta_accuracy: MeanStd,
    pub tta_mean_accuracy: MeanStd,
    /// Fraction of trials with BayTTA accuracy ≥ TTA-mean accuracy.
    pub fraction_baytta_ge_tta: f64,
    pub mean_inclusion_prob: Vec<f64>,
    /// Trials where every adversarial column's inclusion probability is strictly
    /// below every clean column's. Zero when either group is empty.
    pub adversarial_below_clean_trials: usize,
    /// Trials where no adversarial column's inclusion probability exceeds the
    /// smallest clean one, so an adversarial column attains the minimum.
    /// Zero when either group is empty.
    pub adversarial_minimal_trials: usize,
    pub sigma_baytta: MeanStd,
    pub trials: Vec<TrialSummary>,
}

fn fmt_vec(values: &[f64]) -> String {
    let parts: Vec<String> = values.iter().map(|v| format!("{v:.4}")).collect();
    format!("[{}]", parts.join(", "))
}

impl RunReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "protocol {} | mode {} | seed {} | columns {} | fit rows {} | eval rows {}",
            self.protocol, self.mode, self.seed, self.n_columns, self.n_fit_rows, self.n_eval_rows
        );
        let _ = writeln!(
            out,
            "{:<10} {:>9} {:>9} {:>9} {:>9}",
            "method", "accuracy", "precision", "recall", "f1"
        );
        for (name, r) in [("baytta", &self.baytta), ("tta_mean", &self.tta_mean)] {
            let _ = writeln!(
                out,
                "{:<10} {:>9.4} {:>9.4} {:>9.4} {:>9.4}",
                name, r.accuracy, r.precision, r.recall, r.f1
            );
        }
        let _ = writeln!(out, "sigma_baytta        {:.6}", self.sigma_baytta);
        let _ = writeln!(
            out,
            "column accuracy     {}",
            fmt_vec(&self.per_column_accuracy)
        );
        let _ = writeln!(out, "inclusion prob      {}", fmt_vec(&self.inclusion_prob));
        let _ = writeln!(
            out,
            "expected coeffs     {}",
            fmt_vec(&self.expected_coeffs)
        );
        let _ = writeln!(out, "expected intercept  {:.4}", self.expected_intercept);
        let _ = writeln!(out, "accepted models ({}):", self.accepted_models.len());
        for m in &self.accepted_models {
            let _ = writeln!(
                out,
                "  {:<16} bic {:>12.4}  weight {:.6}",
                m.subset.to_string(),
                m.bic,
                m.posterior_weight
            );
        }
        out
    }
}

impl SimulationReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn render_text(&self) -> String {
        let s = &self.settings;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{} trials | {} rows | {} columns | noise {} | adversarial {:?} | protocol {} | mode {}",
            s.trials, s.n_rows, s.n_columns, s.signal_noise, s.adversarial_columns, s.protocol, s.mode
        );
        let _ = writeln!(
            out,
            "baytta accuracy    {:.4} ± {:.4}",
            self.baytta_accuracy.mean, self.baytta_accuracy.std
        );
        let _ = writeln!(
            out,
            "tta_mean accuracy  {:.4} ± {:.4}",
            self.tta_mean_accuracy.mean, self.tta_mean_accuracy.std
        );
        let _ = writeln!(
            out,
            "baytta >= tta_mean in {:.1}% of trials",
            100.0 * self.fraction_baytta_ge_tta
        );
        let _ = writeln!(
            out,
            "mean inclusion prob {}",
            fmt_vec(&self.mean_inclusion_prob)
        );
        if !s.adversarial_columns.is_empty() {
            let _ = writeln!(
                out,
                "adversarial below clean in {}/{} trials (at the minimum in {}/{})",
                self.adversarial_below_clean_trials,
                s.trials,
                self.adversarial_minimal_trials,
                s.trials
            );
        }
        let _ = writeln!(
            out,
            "sigma_baytta       {:.6} ± {:.6}",
            self.sigma_baytta.mean, self.sigma_baytta.std
        );
        out
    }
}
