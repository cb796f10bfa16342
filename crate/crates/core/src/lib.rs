//! Bayesian model averaging over test-time-augmentation (TTA) predictions.
//!
//! Each prediction column of a TTA run (the unaugmented input plus `k`
//! augmentations) is treated as a predictor. Logistic-regression candidate
//! models over column subsets are scored by BIC, searched greedily over the
//! subset lattice (or enumerated in full), and averaged into a single
//! posterior-weighted linear predictor. The crate also provides the plain
//! mean-of-augmentations baseline, an inclusion-weighted uncertainty estimate,
//! classification metrics, CSV ingestion and a seeded synthetic generator.
//!
//! ```no_run
//! use baytta::{bma, data, predict};
//!
//! let table = data::load_csv("predictions.csv")?;
//! let summary = bma::run_bma(&table, &bma::BmaConfig::default())?;
//! let p = predict::predict_baytta(&summary, &table.row(0))?;
//! println!("p(y=1) = {:.3}", p.probability);
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! Runnable walkthroughs live in `examples/`:
//!
//! - **`fit_candidate`** - fit one logistic candidate, its log-likelihood and BIC
//! - **`greedy_search`** - greedy lattice search with the accepted-model audit trail
//! - **`full_enumeration`** - full enumeration next to the greedy search
//! - **`aggregate_table`** - averaged vs. mean predictions, metrics and uncertainty
//! - **`csv_io`** - write and re-read a prediction table
//! - **`simulate_trials`** - repeated synthetic trials with an adversarial column
//!
//! ```bash
//! cargo run -p baytta --example greedy_search
//! ```

pub mod bma;
pub mod cli;
pub mod data;
pub mod logreg;
pub mod math;
pub mod metrics;
pub mod predict;
pub mod report;
pub mod rng;

pub use bma::{run_bma, BmaConfig, BmaSummary, CandidateModel, PredictorSubset, SearchMode};
pub use data::{load_csv, save_csv, synthesize, PredictionTable, SyntheticConfig};
pub use logreg::{fit_logistic, DesignMatrix, FitConfig, FittedModel};
pub use predict::{predict_baytta, predict_tta_mean, uncertainty};
