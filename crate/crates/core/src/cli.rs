//! Command-line surface: `aggregate` a prediction CSV, `simulate` synthetic trials.
//!
//! Exit codes: 0 success, 2 input error, 3 degenerate data (e.g. a single
//! label class in the fitting rows), 1 for failures writing output.

use std::collections::BTreeSet;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use crate::bma::{run_bma, BmaConfig, BmaError, SearchMode};
use crate::data::{load_csv, synthesize, DataError, PredictionTable, SyntheticConfig};
use crate::logreg::FitError;
use crate::metrics::{confusion, mean_std, MetricsError};
use crate::predict::{predict_table_baytta, predict_table_tta_mean, uncertainty, PredictError};
use crate::report::{
    AcceptedModel, MethodResult, Protocol, RunReport, SimulationReport, SimulationSettings,
    TrialSummary, SCHEMA_VERSION,
};
use crate::rng::{child_seeds, Stream};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("failed to write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Data(_) | CliError::InvalidArgument(_) => 2,
            CliError::Degenerate(_) => 3,
            CliError::Output { .. } => 1,
        }
    }
}

impl From<BmaError> for CliError {
    fn from(e: BmaError) -> Self {
        match e {
            BmaError::TooManyColumns { .. } | BmaError::InvalidConfig(_) => {
                CliError::InvalidArgument(e.to_string())
            }
            BmaError::Fit {
                source: FitError::InvalidConfig(_),
                ..
            } => CliError::InvalidArgument(e.to_string()),
            BmaError::SingleClass | BmaError::Fit { .. } => CliError::Degenerate(e.to_string()),
        }
    }
}

impl From<PredictError> for CliError {
    fn from(e: PredictError) -> Self {
        CliError::InvalidArgument(e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::InvalidArgument(e.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "baytta",
    version,
    about = "Bayesian model averaging over TTA predictions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Aggregate a prediction CSV and compare against the TTA mean.
    Aggregate(AggregateArgs),
    /// Run repeated synthetic trials.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Greedy,
    Full,
}

impl From<ModeArg> for SearchMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Greedy => SearchMode::Greedy,
            ModeArg::Full => SearchMode::Full,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Greedy)]
    pub mode: ModeArg,
    #[arg(long, value_enum, default_value_t = Protocol::Split)]
    pub protocol: Protocol,
    /// Fraction of rows used for fitting under the split protocol.
    #[arg(long, default_value_t = 0.5)]
    pub split_fraction: f64,
}

impl Default for EvalArgs {
    fn default() -> Self {
        Self {
            mode: ModeArg::Greedy,
            protocol: Protocol::Split,
            split_fraction: 0.5,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct AggregateArgs {
    /// Prediction table: `label,pred_0,...,pred_k`.
    #[arg(long)]
    pub input: PathBuf,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Seed for the calibration/evaluation split.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Rows per generated table.
    #[arg(long, default_value_t = 200)]
    pub rows: usize,
    /// Prediction columns per generated table (original plus augmentations).
    #[arg(long, default_value_t = 4)]
    pub columns: usize,
    /// Standard deviation of the per-column logit perturbation.
    #[arg(long, default_value_t = 0.5)]
    pub signal_noise: f64,
    /// Comma-separated 0-based column indices replaced by uniform noise.
    #[arg(long, value_delimiter = ',')]
    pub adversarial: Vec<usize>,
    /// Per-row probability of flipping the drawn label, in [0, 0.5).
    #[arg(long, default_value_t = 0.0)]
    pub flip_rate: f64,
    /// Latent logit mean of the positive mixture component.
    #[arg(long, default_value_t = crate::data::LATENT_LOGIT_MEAN)]
    pub latent_mean: f64,
    /// Latent logit standard deviation of each mixture component.
    #[arg(long, default_value_t = crate::data::LATENT_LOGIT_SD)]
    pub latent_sd: f64,
    /// Master seed; per-trial seeds are derived from it.
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    #[command(flatten)]
    pub eval: EvalArgs,
    /// Also write the report as JSON to this path.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

/// Everything that controls one evaluation of a table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvalOptions {
    pub bma: BmaConfig,
    pub protocol: Protocol,
    pub split_fraction: f64,
    pub seed: u64,
}

impl EvalOptions {
    pub fn from_args(eval: &EvalArgs, seed: u64) -> Self {
        Self {
            bma: BmaConfig {
                mode: eval.mode.into(),
                ..BmaConfig::default()
            },
            protocol: eval.protocol,
            split_fraction: eval.split_fraction,
            seed,
        }
    }
}

/// Seeded split into sorted (calibration, evaluation) row indices.
pub fn split_rows(
    n_rows: usize,
    fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), CliError> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(CliError::InvalidArgument(format!(
            "split fraction {fraction} must lie in (0, 1)"
        )));
    }
    let n_fit = (fraction * n_rows as f64).round() as usize;
    if n_fit == 0 {
        return Err(CliError::InvalidArgument(
            "calibration set would be empty".into(),
        ));
    }
    if n_fit >= n_rows {
        return Err(CliError::InvalidArgument(
            "evaluation set would be empty".into(),
        ));
    }
    let mut order: Vec<usize> = (0..n_rows).collect();
    Stream::new(seed).shuffle(&mut order);
    let mut fit = order[..n_fit].to_vec();
    let mut eval = order[n_fit..].to_vec();
    fit.sort_unstable();
    eval.sort_unstable();
    Ok((fit, eval))
}

/// Fits the model average and scores both methods under the chosen protocol.
pub fn evaluate_table(table: &PredictionTable, opts: &EvalOptions) -> Result<RunReport, CliError> {
    let (fit_table, eval_table, split_fraction) = match opts.protocol {
        Protocol::Transductive => (table.clone(), table.clone(), None),
        Protocol::Split => {
            let (fit, eval) = split_rows(table.n_rows(), opts.split_fraction, opts.seed)?;
            (
                table.select_rows(&fit),
                table.select_rows(&eval),
                Some(opts.split_fraction),
            )
        }
    };

    let summary = run_bma(&fit_table, &opts.bma)?;
    let labels = eval_table.labels();
    let bay_labels: Vec<bool> = predict_table_baytta(&summary, &eval_table)?
        .iter()
        .map(|p| p.label)
        .collect();
    let tta_labels: Vec<bool> = predict_table_tta_mean(&eval_table)?
        .iter()
        .map(|p| p.label)
        .collect();
    let baytta = MethodResult::from_confusion(confusion(&bay_labels, labels)?);
    let tta_mean = MethodResult::from_confusion(confusion(&tta_labels, labels)?);
    let unc = uncertainty(&summary, &eval_table, baytta.accuracy)?;

    let weights = summary.posterior_weights();
    let accepted_models = summary
        .accepted
        .iter()
        .zip(weights)
        .map(|(m, w)| AcceptedModel {
            subset: m.subset.clone(),
            bic: m.bic,
            log_model_likelihood: m.log_model_likelihood,
            posterior_weight: w,
            intercept: m.fitted.intercept,
            coefficients: m.fitted.coefficients.clone(),
            converged: m.fitted.converged,
        })
        .collect();

    Ok(RunReport {
        schema_version: SCHEMA_VERSION,
        input: None,
        protocol: opts.protocol,
        mode: summary.mode,
        seed: opts.seed,
        split_fraction,
        n_columns: table.n_columns(),
        n_fit_rows: fit_table.n_rows(),
        n_eval_rows: eval_table.n_rows(),
        baytta,
        tta_mean,
        sigma_baytta: unc.sigma_baytta,
        per_column_accuracy: unc.per_column_accuracy,
        inclusion_prob: summary.inclusion_prob,
        expected_coeffs: summary.expected_coeffs,
        expected_intercept: summary.expected_intercept,
        log_l_total: summary.log_l_total,
        accepted_models,
    })
}

fn write_output(path: &PathBuf, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Output {
        path: path.clone(),
        source,
    })
}

pub fn cmd_aggregate(args: &AggregateArgs) -> Result<RunReport, CliError> {
    let table = load_csv(&args.input)?;
    let mut report = evaluate_table(&table, &EvalOptions::from_args(&args.eval, args.seed))?;
    report.input = Some(args.input.display().to_string());
    if let Some(path) = &args.json {
        write_output(path, &report.to_json())?;
    }
    Ok(report)
}

impl SimulateArgs {
    /// Generator config for one trial.
    pub fn synthetic_config(&self, seed: u64) -> SyntheticConfig {
        SyntheticConfig {
            n_rows: self.rows,
            n_columns: self.columns,
            signal_noise: self.signal_noise,
            adversarial_columns: self.adversarial.iter().copied().collect(),
            label_flip_rate: self.flip_rate,
            seed,
            latent_mean: self.latent_mean,
            latent_sd: self.latent_sd,
        }
    }
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<SimulationReport, CliError> {
    if args.trials == 0 {
        return Err(CliError::InvalidArgument(
            "--trials must be at least 1".into(),
        ));
    }
    args.synthetic_config(args.seed).validate()?;
    let seeds = child_seeds(args.seed, args.trials);

    let runs: Vec<(u64, RunReport)> = seeds
        .par_iter()
        .map(|&seed| {
            let table = synthesize(&args.synthetic_config(seed))?;
            let report = evaluate_table(&table, &EvalOptions::from_args(&args.eval, seed))?;
            Ok((seed, report))
        })
        .collect::<Result<_, CliError>>()?;

    let adversarial: BTreeSet<usize> = args.adversarial.iter().copied().collect();
    let clean: Vec<usize> = (0..args.columns)
        .filter(|j| !adversarial.contains(j))
        .collect();

    let mut trials = Vec::with_capacity(runs.len());
    let mut below = 0;
    let mut minimal = 0;
    let mut mean_inclusion = vec![0.0; args.columns];
    for (trial, (seed, r)) in runs.iter().enumerate() {
        if !adversarial.is_empty() && !clean.is_empty() {
            let worst_adv = adversarial
                .iter()
                .map(|&j| r.inclusion_prob[j])
                .fold(f64::NEG_INFINITY, f64::max);
            let best_clean_floor = clean
                .iter()
                .map(|&j| r.inclusion_prob[j])
                .fold(f64::INFINITY, f64::min);
            if worst_adv < best_clean_floor {
                below += 1;
            }
            if worst_adv <= best_clean_floor {
                minimal += 1;
            }
        }
        for (acc, p) in mean_inclusion.iter_mut().zip(&r.inclusion_prob) {
            *acc += p / runs.len() as f64;
        }
        trials.push(TrialSummary {
            trial,
            seed: *seed,
            baytta_accuracy: r.baytta.accuracy,
            tta_mean_accuracy: r.tta_mean.accuracy,
            sigma_baytta: r.sigma_baytta,
            inclusion_prob: r.inclusion_prob.clone(),
            n_accepted: r.accepted_models.len(),
        });
    }

    let bay: Vec<f64> = trials.iter().map(|t| t.baytta_accuracy).collect();
    let tta: Vec<f64> = trials.iter().map(|t| t.tta_mean_accuracy).collect();
    let sig: Vec<f64> = trials.iter().map(|t| t.sigma_baytta).collect();
    let ge = bay.iter().zip(&tta).filter(|(b, t)| b >= t).count();

    let report = SimulationReport {
        schema_version: SCHEMA_VERSION,
        settings: SimulationSettings {
            trials: args.trials,
            n_rows: args.rows,
            n_columns: args.columns,
            signal_noise: args.signal_noise,
            adversarial_columns: adversarial.iter().copied().collect(),
            label_flip_rate: args.flip_rate,
            latent_mean: args.latent_mean,
            latent_sd: args.latent_sd,
            seed: args.seed,
            mode: args.eval.mode.into(),
            protocol: args.eval.protocol,
            split_fraction: match args.eval.protocol {
                Protocol::Split => Some(args.eval.split_fraction),
                Protocol::Transductive => None,
            },
        },
        baytta_accuracy: mean_std(&bay)?,
        tta_mean_accuracy: mean_std(&tta)?,
        fraction_baytta_ge_tta: ge as f64 / trials.len() as f64,
        mean_inclusion_prob: mean_inclusion,
        adversarial_below_clean_trials: below,
        adversarial_minimal_trials: minimal,
        sigma_baytta: mean_std(&sig)?,
        trials,
    };
    if let Some(path) = &args.json {
        write_output(path, &report.to_json())?;
    }
    Ok(report)
}

/// Runs a parsed command line, printing the text report; returns the exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Aggregate(args) => cmd_aggregate(args).map(|r| r.render_text()),
        Command::Simulate(args) => cmd_simulate(args).map(|r| r.render_text()),
    };
    match result {
        Ok(text) => {
            print!("{text}");
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
