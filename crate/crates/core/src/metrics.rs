//! Binary classification metrics, class 1 (`true`) positive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("length mismatch: {predicted} predictions vs {truth} labels")]
    LengthMismatch { predicted: usize, truth: usize },
    #[error("no values")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
}

/// A rate whose denominator may be zero. A zero denominator yields value 0
/// and sets `degenerate`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ratio {
    pub value: f64,
    pub degenerate: bool,
}

impl Ratio {
    fn of(num: f64, den: f64) -> Self {
        if den == 0.0 {
            Self {
                value: 0.0,
                degenerate: true,
            }
        } else {
            Self {
                value: num / den,
                degenerate: false,
            }
        }
    }
}

pub fn confusion(predicted: &[bool], truth: &[bool]) -> Result<ConfusionCounts, MetricsError> {
    if predicted.len() != truth.len() {
        return Err(MetricsError::LengthMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    let mut c = ConfusionCounts::default();
    for (&p, &t) in predicted.iter().zip(truth) {
        match (p, t) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    Ok(c)
}

impl ConfusionCounts {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> Ratio {
        Ratio::of((self.tp + self.tn) as f64, self.total() as f64)
    }

    pub fn precision(&self) -> Ratio {
        Ratio::of(self.tp as f64, (self.tp + self.fp) as f64)
    }

    pub fn recall(&self) -> Ratio {
        Ratio::of(self.tp as f64, (self.tp + self.fn_) as f64)
    }

    /// Harmonic mean of precision and recall.
    pub fn f1(&self) -> Ratio {
        let (pr, re) = (self.precision(), self.recall());
        let r = Ratio::of(2.0 * pr.value * re.value, pr.value + re.value);
        Ratio {
            degenerate: r.degenerate || pr.degenerate || re.degenerate,
            ..r
        }
    }

    /// Counts after swapping which class is called positive.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            tn: self.tp,
            fp: self.fn_,
            fn_: self.fp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StdKind {
    /// Divide by `n`.
    #[default]
    Population,
    /// Divide by `n − 1` (zero for a single value).
    Sample,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
}

/// Mean and population standard deviation.
pub fn mean_std(values: &[f64]) -> Result<MeanStd, MetricsError> {
    mean_std_with(values, StdKind::Population)
}

pub fn mean_std_with(values: &[f64], kind: StdKind) -> Result<MeanStd, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::Empty);
    }
    let n = values.len() as f64;
    // Shifted by the first value: a constant list has all-zero deviations.
    let shift = values[0];
    let offset = values.iter().map(|v| v - shift).sum::<f64>() / n;
    let mean = shift + offset;
    let ss: f64 = values
        .iter()
        .map(|v| (v - shift - offset) * (v - shift - offset))
        .sum();
    let den = match kind {
        StdKind::Population => n,
        StdKind::Sample if values.len() > 1 => n - 1.0,
        StdKind::Sample => return Ok(MeanStd { mean, std: 0.0 }),
    };
    Ok(MeanStd {
        mean,
        std: (ss / den).sqrt(),
    })
}
