//! Prediction tables: validation, CSV ingestion, and a synthetic TTA generator.
//!
//! A table holds `k+1` prediction columns (column 0 is the prediction on the
//! unaugmented input, columns `1..=k` the augmented ones) and a binary label
//! per row.
//!
//! CSV layout is fixed: UTF-8, LF line endings, header `label,pred_0,...,pred_k`,
//! labels `0`/`1`, predictions written with 17 significant digits in
//! positional decimal notation so that reading back is bit-exact.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::sigmoid;
use crate::rng::Stream;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing or malformed header: expected `label,pred_0,...,pred_k`")]
    MissingHeader,
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: pred_{column} is not a number in [0,1]")]
    OutOfRange { line: u64, column: usize },
    #[error("line {line}: label must be 0 or 1")]
    NonBinaryLabel { line: u64 },
    #[error("table has no data rows")]
    EmptyTable,
    #[error("table has no prediction columns")]
    NoColumns,
    #[error("column {column} has {found} rows, expected {expected}")]
    ColumnLength {
        column: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row} has {found} predictions, expected {expected}")]
    RowWidth {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("row {row}, column {column}: value {value} is not a finite number in [0,1]")]
    ValueOutOfRange {
        row: usize,
        column: usize,
        value: f64,
    },
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error("cannot open {}: {source}", path.display())]
    Open {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

/// `k+1` prediction columns plus binary labels.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionTable {
    columns: Vec<Vec<f64>>,
    labels: Vec<bool>,
}

impl PredictionTable {
    pub fn new(columns: Vec<Vec<f64>>, labels: Vec<bool>) -> Result<Self, DataError> {
        if columns.is_empty() {
            return Err(DataError::NoColumns);
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != labels.len() {
                return Err(DataError::ColumnLength {
                    column: j,
                    expected: labels.len(),
                    found: col.len(),
                });
            }
            if let Some((row, &value)) = col.iter().enumerate().find(|(_, v)| !in_unit(**v)) {
                return Err(DataError::ValueOutOfRange {
                    row,
                    column: j,
                    value,
                });
            }
        }
        Ok(Self { columns, labels })
    }

    /// Builds a table from row-major predictions.
    pub fn from_rows(rows: &[Vec<f64>], labels: Vec<bool>) -> Result<Self, DataError> {
        let width = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::with_capacity(rows.len()); width];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(DataError::RowWidth {
                    row: i,
                    expected: width,
                    found: row.len(),
                });
            }
            for (j, &v) in row.iter().enumerate() {
                columns[j].push(v);
            }
        }
        Self::new(columns, labels)
    }

    pub fn n_rows(&self) -> usize {
        self.labels.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.columns.iter().map(|c| c[i]).collect()
    }

    pub fn has_both_classes(&self) -> bool {
        self.labels.iter().any(|&y| y) && self.labels.iter().any(|&y| !y)
    }

    /// Table restricted to the given rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&i| c[i]).collect())
                .collect(),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    /// Table whose column `j` is this table's column `order[j]`.
    pub fn select_columns(&self, order: &[usize]) -> Self {
        Self {
            columns: order.iter().map(|&j| self.columns[j].clone()).collect(),
            labels: self.labels.clone(),
        }
    }
}

fn in_unit(v: f64) -> bool {
    v.is_finite() && (0.0..=1.0).contains(&v)
}

/// Reads and validates a prediction table. Errors name the first offending line.
pub fn load_csv(path: impl AsRef<Path>) -> Result<PredictionTable, DataError> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| DataError::Open {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(file)
}

pub fn parse_csv<R: Read>(reader: R) -> Result<PredictionTable, DataError> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec?,
        None => return Err(DataError::MissingHeader),
    };
    let width = header.len();
    let header_ok = width >= 2
        && &header[0] == "label"
        && (1..width).all(|j| header[j] == format!("pred_{}", j - 1));
    if !header_ok {
        return Err(DataError::MissingHeader);
    }
    let n_pred = width - 1;

    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); n_pred];
    let mut labels = Vec::new();
    for rec in records {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != width {
            return Err(DataError::RaggedRow {
                line,
                expected: width,
                found: rec.len(),
            });
        }
        labels.push(match rec[0].trim() {
            "0" => false,
            "1" => true,
            _ => return Err(DataError::NonBinaryLabel { line }),
        });
        for j in 0..n_pred {
            match rec[j + 1].trim().parse::<f64>() {
                Ok(v) if in_unit(v) => columns[j].push(v),
                _ => return Err(DataError::OutOfRange { line, column: j }),
            }
        }
    }
    if labels.is_empty() {
        return Err(DataError::EmptyTable);
    }
    PredictionTable::new(columns, labels)
}

pub fn save_csv(table: &PredictionTable, path: impl AsRef<Path>) -> Result<(), DataError> {
    let mut out = BufWriter::new(File::create(path)?);
    write_csv(table, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(table: &PredictionTable, out: &mut W) -> Result<(), DataError> {
    let mut line = String::from("label");
    for j in 0..table.n_columns() {
        line.push_str(&format!(",pred_{j}"));
    }
    line.push('\n');
    out.write_all(line.as_bytes())?;
    for i in 0..table.n_rows() {
        line.clear();
        line.push(if table.labels[i] { '1' } else { '0' });
        for col in &table.columns {
            line.push(',');
            line.push_str(&format_decimal17(col[i]));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

/// Positional decimal with exactly 17 significant digits (round-trips any f64).
pub fn format_decimal17(v: f64) -> String {
    let sci = format!("{:.16e}", v.abs());
    let (mantissa, exp) = sci.split_once('e').expect("scientific format");
    let exp: i32 = exp.parse().expect("exponent");
    let digits: String = mantissa.chars().filter(char::is_ascii_digit).collect();
    let sign = if v.is_sign_negative() && v != 0.0 {
        "-"
    } else {
        ""
    };
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            let zeros = "0".repeat(int_len - digits.len());
            format!("{sign}{digits}{zeros}")
        } else {
            format!("{sign}{}.{}", &digits[..int_len], &digits[int_len..])
        }
    } else {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("{sign}0.{zeros}{digits}")
    }
}

/// Default mean of the latent logit for each mixture component (±).
pub const LATENT_LOGIT_MEAN: f64 = 2.0;
/// Default standard deviation of the latent logit within a component.
pub const LATENT_LOGIT_SD: f64 = 1.0;
const GENERATED_FLOOR: f64 = 1e-15;

/// Parameters of the synthetic TTA table generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub n_rows: usize,
    pub n_columns: usize,
    /// Standard deviation of the Gaussian perturbation added on the logit scale.
    pub signal_noise: f64,
    /// Columns replaced by Uniform(0,1) noise.
    pub adversarial_columns: BTreeSet<usize>,
    pub label_flip_rate: f64,
    pub seed: u64,
    /// Latent logit mean of the positive component; the negative one is mirrored.
    pub latent_mean: f64,
    pub latent_sd: f64,
}

impl SyntheticConfig {
    pub fn new(n_rows: usize, n_columns: usize, seed: u64) -> Self {
        Self {
            n_rows,
            n_columns,
            signal_noise: 0.5,
            adversarial_columns: BTreeSet::new(),
            label_flip_rate: 0.0,
            seed,
            latent_mean: LATENT_LOGIT_MEAN,
            latent_sd: LATENT_LOGIT_SD,
        }
    }

    pub fn validate(&self) -> Result<(), DataError> {
        if self.n_columns == 0 {
            return Err(DataError::InvalidConfig(
                "n_columns must be at least 1".into(),
            ));
        }
        if !(self.signal_noise.is_finite() && self.signal_noise >= 0.0) {
            return Err(DataError::InvalidConfig("signal_noise must be >= 0".into()));
        }
        if !(self.latent_mean.is_finite() && self.latent_sd.is_finite() && self.latent_sd >= 0.0) {
            return Err(DataError::InvalidConfig(
                "latent mean/sd must be finite, sd >= 0".into(),
            ));
        }
        if !(0.0..0.5).contains(&self.label_flip_rate) {
            return Err(DataError::InvalidConfig(
                "label_flip_rate must lie in [0, 0.5)".into(),
            ));
        }
        if let Some(&j) = self
            .adversarial_columns
            .iter()
            .find(|&&j| j >= self.n_columns)
        {
            return Err(DataError::InvalidConfig(format!(
                "adversarial column {j} out of range for {} columns",
                self.n_columns
            )));
        }
        Ok(())
    }
}

/// A generated table together with the latent per-row probabilities.
#[derive(Debug, Clone)]
pub struct SyntheticTable {
    pub table: PredictionTable,
    pub latent: Vec<f64>,
}

/// Generates a table fully determined by `config`.
///
/// Per row, in this draw order: the mixture component (`uniform < 0.5` picks the
/// positive one), the latent logit `z = ±latent_mean + latent_sd · N(0,1)`, the label
/// `Bernoulli(sigmoid(z))`, the flip `Bernoulli(label_flip_rate)`, then for each
/// column in order either `Uniform(0,1)` (adversarial) or
/// `sigmoid(z + signal_noise * N(0,1))`. Outputs are clamped to `[1e-15, 1 - 1e-15]`.
pub fn synthesize_with_latent(config: &SyntheticConfig) -> Result<SyntheticTable, DataError> {
    config.validate()?;
    let mut rng = Stream::new(config.seed);
    let mut columns = vec![Vec::with_capacity(config.n_rows); config.n_columns];
    let mut labels = Vec::with_capacity(config.n_rows);
    let mut latent = Vec::with_capacity(config.n_rows);
    let clamp = |p: f64| p.clamp(GENERATED_FLOOR, 1.0 - GENERATED_FLOOR);

    for _ in 0..config.n_rows {
        let center = if rng.uniform() < 0.5 {
            config.latent_mean
        } else {
            -config.latent_mean
        };
        let z = center + config.latent_sd * rng.normal();
        let p_true = clamp(sigmoid(z));
        let mut label = rng.bernoulli(p_true);
        if rng.bernoulli(config.label_flip_rate) {
            label = !label;
        }
        for (j, col) in columns.iter_mut().enumerate() {
            let v = if config.adversarial_columns.contains(&j) {
                rng.uniform()
            } else {
                clamp(sigmoid(z + config.signal_noise * rng.normal()))
            };
            col.push(v);
        }
        labels.push(label);
        latent.push(p_true);
    }
    Ok(SyntheticTable {
        table: PredictionTable::new(columns, labels)?,
        latent,
    })
}

pub fn synthesize(config: &SyntheticConfig) -> Result<PredictionTable, DataError> {
    synthesize_with_latent(config).map(|s| s.table)
}
