//! Binary logistic regression fitted by iteratively reweighted least squares.
//!
//! Every model carries an unpenalized intercept. The non-intercept coefficients
//! get a small per-observation L2 penalty, so the maximized objective is
//!
//! ```text
//! Σ_n ln p(y_n | x_n, β) − ½ · ridge · N · Σ_{j≥1} β_j²
//! ```
//!
//! The penalty only keeps the solver finite on separable or collinear columns.
//! The reported `max_log_likelihood` is the unpenalized (clamped) log-likelihood
//! at the penalized optimum, and that is what BIC scores.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::PredictionTable;
use crate::math::{bernoulli_log_lik, clamped_log_lik, clamped_sigmoid, sigmoid};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error("labels contain a single class")]
    SingleClass,
    #[error("non-finite values or singular normal equations")]
    NonFinite,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid fit config: {0}")]
    InvalidConfig(String),
}

/// Row-major predictor values (without the intercept column) and labels.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    n_rows: usize,
    n_cols: usize,
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl DesignMatrix {
    pub fn new(
        n_rows: usize,
        n_cols: usize,
        values: Vec<f64>,
        labels: Vec<bool>,
    ) -> Result<Self, FitError> {
        if values.len() != n_rows * n_cols {
            return Err(FitError::DimensionMismatch {
                expected: n_rows * n_cols,
                found: values.len(),
            });
        }
        if labels.len() != n_rows {
            return Err(FitError::DimensionMismatch {
                expected: n_rows,
                found: labels.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FitError::InvalidDesign("non-finite predictor value".into()));
        }
        Ok(Self {
            n_rows,
            n_cols,
            values,
            labels,
        })
    }

    pub fn from_columns(columns: &[&[f64]], labels: &[bool]) -> Result<Self, FitError> {
        let n_rows = labels.len();
        let n_cols = columns.len();
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for col in columns {
                if col.len() != n_rows {
                    return Err(FitError::DimensionMismatch {
                        expected: n_rows,
                        found: col.len(),
                    });
                }
                values.push(col[i]);
            }
        }
        Self::new(n_rows, n_cols, values, labels.to_vec())
    }

    /// Design over the given table columns.
    pub fn from_table(table: &PredictionTable, columns: &[usize]) -> Result<Self, FitError> {
        if let Some(&j) = columns.iter().find(|&&j| j >= table.n_columns()) {
            return Err(FitError::DimensionMismatch {
                expected: table.n_columns(),
                found: j + 1,
            });
        }
        let cols: Vec<&[f64]> = columns.iter().map(|&j| table.column(j)).collect();
        Self::from_columns(&cols, table.labels())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.n_cols..(i + 1) * self.n_cols]
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub max_iterations: usize,
    /// Converged once the largest coefficient update falls below this...
    pub convergence_tol: f64,
    /// ...and the penalized gradient's infinity norm is below this.
    pub grad_tol: f64,
    /// Per-observation L2 penalty on non-intercept coefficients.
    pub ridge: f64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            convergence_tol: 1e-8,
            grad_tol: 1e-6,
            ridge: 1e-6,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<(), FitError> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iterations == 0 {
            return Err(FitError::InvalidConfig(
                "max_iterations must be positive".into(),
            ));
        }
        if !positive(self.convergence_tol) || !positive(self.grad_tol) || !positive(self.ridge) {
            return Err(FitError::InvalidConfig(
                "tolerances and ridge must be > 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    /// Unpenalized, clamped log-likelihood at the returned coefficients.
    pub max_log_likelihood: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl FittedModel {
    pub fn linear_predictor(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.coefficients.len());
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(x)
                .map(|(b, v)| b * v)
                .sum::<f64>()
    }

    /// Predicted probability, clamped to `[1e-12, 1−1e-12]`.
    pub fn probability(&self, x: &[f64]) -> f64 {
        clamped_sigmoid(self.linear_predictor(x))
    }
}

/// Σ_n [y_n ln p_n + (1−y_n) ln(1−p_n)] with `p_n` clamped to `[1e-12, 1−1e-12]`.
pub fn log_likelihood(model: &FittedModel, design: &DesignMatrix) -> Result<f64, FitError> {
    if model.coefficients.len() != design.n_cols {
        return Err(FitError::DimensionMismatch {
            expected: design.n_cols,
            found: model.coefficients.len(),
        });
    }
    Ok(clamped_ll(model.intercept, &model.coefficients, design))
}

fn clamped_ll(intercept: f64, coefficients: &[f64], design: &DesignMatrix) -> f64 {
    (0..design.n_rows)
        .map(|i| {
            let eta = intercept + dot(coefficients, design.row(i));
            clamped_log_lik(design.labels[i], sigmoid(eta))
        })
        .sum()
}

/// `n_params · ln(n_samples) − 2 · max_log_likelihood`.
pub fn bic(max_log_likelihood: f64, n_params: usize, n_samples: usize) -> f64 {
    n_params as f64 * (n_samples as f64).ln() - 2.0 * max_log_likelihood
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Parameter vector layout: `[intercept, β_1, ..., β_p]`.
struct Problem<'a> {
    design: &'a DesignMatrix,
    penalty: f64,
}

impl Problem<'_> {
    fn eta(&self, params: &[f64], i: usize) -> f64 {
        params[0] + dot(&params[1..], self.design.row(i))
    }

    fn objective(&self, params: &[f64]) -> f64 {
        let ll: f64 = (0..self.design.n_rows)
            .map(|i| bernoulli_log_lik(self.design.labels[i], self.eta(params, i)))
            .sum();
        let ss: f64 = params[1..].iter().map(|b| b * b).sum();
        ll - 0.5 * self.penalty * ss
    }

    fn gradient_and_hessian(&self, params: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let dim = params.len();
        let mut grad = DVector::zeros(dim);
        let mut hess = DMatrix::zeros(dim, dim);
        let mut xt = vec![1.0; dim];
        for i in 0..self.design.n_rows {
            xt[1..].copy_from_slice(self.design.row(i));
            let p = sigmoid(self.eta(params, i));
            let resid = if self.design.labels[i] { 1.0 - p } else { -p };
            let w = p * (1.0 - p);
            for a in 0..dim {
                grad[a] += xt[a] * resid;
                let wa = w * xt[a];
                for b in 0..=a {
                    hess[(a, b)] += wa * xt[b];
                }
            }
        }
        for a in 0..dim {
            for b in 0..a {
                hess[(b, a)] = hess[(a, b)];
            }
        }
        for j in 1..dim {
            grad[j] -= self.penalty * params[j];
            hess[(j, j)] += self.penalty;
        }
        (grad, hess)
    }
}

fn newton_direction(grad: &DVector<f64>, hess: DMatrix<f64>) -> Option<DVector<f64>> {
    if let Some(chol) = hess.clone().cholesky() {
        return Some(chol.solve(grad));
    }
    // Saturated fits can leave the intercept block numerically singular.
    let jitter = 1e-10
        * hess
            .diagonal()
            .iter()
            .map(|d| d.abs())
            .sum::<f64>()
            .max(1e-300);
    let mut jittered = hess;
    for j in 0..jittered.nrows() {
        jittered[(j, j)] += jitter;
    }
    jittered.cholesky().map(|c| c.solve(grad))
}

/// Fits by damped Newton (IRLS) on the ridge-penalized log-likelihood.
///
/// Hitting `max_iterations` is not an error: the best iterate is returned with
/// `converged == false`.
pub fn fit_logistic(design: &DesignMatrix, config: &FitConfig) -> Result<FittedModel, FitError> {
    config.validate()?;
    if design.n_rows < 2 {
        return Err(FitError::InvalidDesign(
            "at least two rows are required".into(),
        ));
    }
    let positives = design.labels.iter().filter(|&&y| y).count();
    if positives == 0 || positives == design.n_rows {
        return Err(FitError::SingleClass);
    }

    let problem = Problem {
        design,
        penalty: config.ridge * design.n_rows as f64,
    };
    let dim = design.n_cols + 1;
    let mut params = vec![0.0; dim];
    let mut objective = problem.objective(&params);
    let mut best = (params.clone(), objective);
    let mut last_step = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    loop {
        let (grad, hess) = problem.gradient_and_hessian(&params);
        if grad.iter().any(|g| !g.is_finite()) {
            return Err(FitError::NonFinite);
        }
        let grad_norm = grad.amax();
        if grad_norm <= config.grad_tol && last_step <= config.convergence_tol {
            converged = true;
            break;
        }
        if iterations == config.max_iterations {
            break;
        }
        let direction = newton_direction(&grad, hess).ok_or(FitError::NonFinite)?;
        if direction.iter().any(|d| !d.is_finite()) {
            return Err(FitError::NonFinite);
        }

        // Step halving; flat objectives within rounding are accepted.
        let slack = 1e-12 * (1.0 + objective.abs());
        let mut scale = 1.0;
        let accepted = loop {
            let trial: Vec<f64> = params
                .iter()
                .zip(direction.iter())
                .map(|(p, d)| p + scale * d)
                .collect();
            let value = problem.objective(&trial);
            if value.is_finite() && value >= objective - slack {
                break Some((trial, value));
            }
            scale *= 0.5;
            if scale < 1e-10 {
                break None;
            }
        };
        iterations += 1;
        let Some((trial, value)) = accepted else {
            converged = grad_norm <= config.grad_tol;
            break;
        };
        last_step = scale * direction.amax();
        params = trial;
        objective = value;
        if objective > best.1 {
            best = (params.clone(), objective);
        }
    }

    let params = if converged { params } else { best.0 };
    let max_log_likelihood = clamped_ll(params[0], &params[1..], design);
    if !max_log_likelihood.is_finite() {
        return Err(FitError::NonFinite);
    }
    Ok(FittedModel {
        intercept: params[0],
        coefficients: params[1..].to_vec(),
        max_log_likelihood,
        iterations,
        converged,
    })
}
