//! Bayesian model averaging over subsets of prediction columns.
//!
//! Each non-empty subset `I` of columns defines a candidate logistic model
//! scored by `ℓ_I = −BIC_I / 2`, the log of its BIC-approximated marginal
//! likelihood. Under a uniform model prior the posterior weight of an accepted
//! model is `exp(ℓ_I − ln L_total)`, where `L_total` sums over accepted models.
//!
//! Two search modes:
//!
//! * [`SearchMode::Greedy`] walks the subset lattice by size. Size-1 candidates
//!   are all singletons; size-`m` candidates are the supersets of subsets
//!   accepted at size `m−1`. Candidates are scanned in lexicographic order and
//!   a model is accepted only if `ℓ_I` strictly exceeds the best `ℓ` accepted so
//!   far (the running maximum persists across sizes). Ties go to the earlier
//!   candidate.
//! * [`SearchMode::Full`] accepts every non-empty subset: plain enumeration BMA.
//!
//! All likelihood arithmetic stays in log space.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::PredictionTable;
use crate::logreg::{bic, fit_logistic, DesignMatrix, FitConfig, FitError, FittedModel};
use crate::math::log_add_exp;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BmaError {
    #[error("{found} columns exceeds the limit of {limit}")]
    TooManyColumns { found: usize, limit: usize },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("fitting subset {subset} failed: {source}")]
    Fit {
        subset: PredictorSubset,
        #[source]
        source: FitError,
    },
}

/// Sorted, distinct, non-empty set of 0-based column indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct PredictorSubset(Vec<usize>);

impl PredictorSubset {
    /// Sorts and validates; rejects empty input and duplicates.
    pub fn new(mut indices: Vec<usize>) -> Result<Self, String> {
        if indices.is_empty() {
            return Err("subset must be non-empty".into());
        }
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err("subset contains duplicate indices".into());
        }
        Ok(Self(indices))
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, column: usize) -> bool {
        self.0.binary_search(&column).is_ok()
    }

    pub fn is_superset_of(&self, other: &PredictorSubset) -> bool {
        other.0.iter().all(|&j| self.contains(j))
    }
}

impl TryFrom<Vec<usize>> for PredictorSubset {
    type Error = String;

    fn try_from(v: Vec<usize>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<PredictorSubset> for Vec<usize> {
    fn from(s: PredictorSubset) -> Self {
        s.0
    }
}

impl fmt::Display for PredictorSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (n, j) in self.0.iter().enumerate() {
            if n > 0 {
                write!(f, ",")?;
            }
            write!(f, "{j}")?;
        }
        write!(f, "}}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateModel {
    pub subset: PredictorSubset,
    pub fitted: FittedModel,
    pub bic: f64,
    /// Always `−bic / 2`.
    pub log_model_likelihood: f64,
}

impl CandidateModel {
    /// Fits the subset on `table` and scores it with `p_I = |I| + 1` parameters.
    pub fn fit(
        table: &PredictionTable,
        subset: &PredictorSubset,
        config: &FitConfig,
    ) -> Result<Self, FitError> {
        let design = DesignMatrix::from_table(table, subset.indices())?;
        let fitted = fit_logistic(&design, config)?;
        let bic = bic(fitted.max_log_likelihood, subset.len() + 1, table.n_rows());
        Ok(Self {
            subset: subset.clone(),
            fitted,
            bic,
            log_model_likelihood: -bic / 2.0,
        })
    }

    /// Coefficient of `column`, or `None` when the column is not in the subset.
    pub fn coefficient(&self, column: usize) -> Option<f64> {
        self.subset
            .0
            .binary_search(&column)
            .ok()
            .map(|pos| self.fitted.coefficients[pos])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMode {
    #[default]
    Greedy,
    Full,
}

impl fmt::Display for SearchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMode::Greedy => "greedy",
            SearchMode::Full => "full",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmaConfig {
    pub mode: SearchMode,
    pub fit: FitConfig,
    /// Upper bound on `k+1`; full mode fits `2^(k+1) − 1` models.
    pub max_columns: usize,
}

impl Default for BmaConfig {
    fn default() -> Self {
        Self {
            mode: SearchMode::Greedy,
            fit: FitConfig::default(),
            max_columns: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BmaSummary {
    pub mode: SearchMode,
    /// Accepted models in processing order.
    pub accepted: Vec<CandidateModel>,
    /// `ln Σ_accepted exp(ℓ_I)`.
    pub log_l_total: f64,
    pub inclusion_prob: Vec<f64>,
    pub expected_coeffs: Vec<f64>,
    pub expected_intercept: f64,
}

impl BmaSummary {
    pub fn n_columns(&self) -> usize {
        self.inclusion_prob.len()
    }

    /// Posterior weight of each accepted model, in the order of `accepted`.
    pub fn posterior_weights(&self) -> Vec<f64> {
        self.accepted
            .iter()
            .map(|m| posterior_weight(m, self.log_l_total))
            .collect()
    }
}

/// Candidate subsets of `size` columns out of `n_columns`, in lexicographic order.
///
/// Size 1 yields every singleton. Larger sizes yield the `size`-subsets that are
/// supersets of at least one subset in `previous_accepted`; with nothing
/// accepted the result is empty.
pub fn generate_candidates(
    size: usize,
    previous_accepted: &[PredictorSubset],
    n_columns: usize,
) -> Vec<PredictorSubset> {
    if size == 0 || size > n_columns {
        return Vec::new();
    }
    if size == 1 {
        return (0..n_columns).map(|j| PredictorSubset(vec![j])).collect();
    }
    let mut out = std::collections::BTreeSet::new();
    for base in previous_accepted.iter().filter(|b| b.len() <= size) {
        let rest: Vec<usize> = (0..n_columns).filter(|j| !base.contains(*j)).collect();
        for_each_combination(&rest, size - base.len(), &mut |extra| {
            let mut indices = base.0.clone();
            indices.extend_from_slice(extra);
            indices.sort_unstable();
            out.insert(PredictorSubset(indices));
        });
    }
    out.into_iter().collect()
}

fn for_each_combination(items: &[usize], k: usize, f: &mut impl FnMut(&[usize])) {
    fn recurse(
        items: &[usize],
        k: usize,
        start: usize,
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]),
    ) {
        if buf.len() == k {
            f(buf);
            return;
        }
        let needed = k - buf.len();
        if items.len() - start < needed {
            return;
        }
        for i in start..=items.len() - needed {
            buf.push(items[i]);
            recurse(items, k, i + 1, buf, f);
            buf.pop();
        }
    }
    let mut buf = Vec::with_capacity(k);
    recurse(items, k, 0, &mut buf, f);
}

/// All `size`-subsets of `0..n_columns` in lexicographic order.
fn all_subsets_of_size(size: usize, n_columns: usize) -> Vec<PredictorSubset> {
    let items: Vec<usize> = (0..n_columns).collect();
    let mut out = Vec::new();
    for_each_combination(&items, size, &mut |c| out.push(PredictorSubset(c.to_vec())));
    out
}

fn fit_layer(
    table: &PredictionTable,
    candidates: &[PredictorSubset],
    config: &FitConfig,
) -> Result<Vec<CandidateModel>, BmaError> {
    candidates
        .par_iter()
        .map(|subset| {
            CandidateModel::fit(table, subset, config).map_err(|source| BmaError::Fit {
                subset: subset.clone(),
                source,
            })
        })
        .collect()
}

/// Runs model averaging over the table's prediction columns.
pub fn run_bma(table: &PredictionTable, config: &BmaConfig) -> Result<BmaSummary, BmaError> {
    let n_columns = table.n_columns();
    if config.max_columns == 0 {
        return Err(BmaError::InvalidConfig(
            "max_columns must be at least 1".into(),
        ));
    }
    if n_columns > config.max_columns {
        return Err(BmaError::TooManyColumns {
            found: n_columns,
            limit: config.max_columns,
        });
    }
    if !table.has_both_classes() {
        return Err(BmaError::SingleClass);
    }
    config
        .fit
        .validate()
        .map_err(|e| BmaError::InvalidConfig(e.to_string()))?;

    let mut accepted: Vec<CandidateModel> = Vec::new();
    let mut log_l_total = f64::NEG_INFINITY;

    match config.mode {
        SearchMode::Greedy => {
            let mut log_l_max = f64::NEG_INFINITY;
            let mut previous: Vec<PredictorSubset> = Vec::new();
            for size in 1..=n_columns {
                let candidates = generate_candidates(size, &previous, n_columns);
                if candidates.is_empty() {
                    break;
                }
                // Fits may run in parallel; acceptance must follow candidate order.
                let models = fit_layer(table, &candidates, &config.fit)?;
                previous.clear();
                for model in models {
                    if model.log_model_likelihood > log_l_max {
                        log_l_max = model.log_model_likelihood;
                        log_l_total = log_add_exp(log_l_total, model.log_model_likelihood);
                        previous.push(model.subset.clone());
                        accepted.push(model);
                    }
                }
            }
        }
        SearchMode::Full => {
            for size in 1..=n_columns {
                let candidates = all_subsets_of_size(size, n_columns);
                for model in fit_layer(table, &candidates, &config.fit)? {
                    log_l_total = log_add_exp(log_l_total, model.log_model_likelihood);
                    accepted.push(model);
                }
            }
        }
    }

    let mut inclusion_prob = vec![0.0; n_columns];
    let mut expected_coeffs = vec![0.0; n_columns];
    let mut expected_intercept = 0.0;
    for model in &accepted {
        let w = posterior_weight(model, log_l_total);
        expected_intercept += w * model.fitted.intercept;
        for (&j, &beta) in model.subset.0.iter().zip(&model.fitted.coefficients) {
            inclusion_prob[j] += w;
            expected_coeffs[j] += w * beta;
        }
    }

    Ok(BmaSummary {
        mode: config.mode,
        accepted,
        log_l_total,
        inclusion_prob,
        expected_coeffs,
        expected_intercept,
    })
}

/// `exp(ℓ_I − ln L_total)`.
pub fn posterior_weight(model: &CandidateModel, log_l_total: f64) -> f64 {
    (model.log_model_likelihood - log_l_total).exp()
}

/// `exp(ℓ_A − ℓ_B)`; values above 1 favor `model_a`.
pub fn bayes_factor(model_a: &CandidateModel, model_b: &CandidateModel) -> f64 {
    (model_a.log_model_likelihood - model_b.log_model_likelihood).exp()
}
