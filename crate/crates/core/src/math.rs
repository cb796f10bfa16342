//! Scalar helpers shared by the fitting and averaging code.

/// Probabilities are clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]` before any logarithm.
pub const PROB_FLOOR: f64 = 1e-12;

/// Logistic function, evaluated without overflow for large `|z|`.
#[inline]
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// [`sigmoid`] clamped to `[PROB_FLOOR, 1 - PROB_FLOOR]`, so reported
/// probabilities stay strictly inside the unit interval.
#[inline]
pub fn clamped_sigmoid(z: f64) -> f64 {
    sigmoid(z).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR)
}

/// `ln(1 + e^z)`.
#[inline]
pub fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Unclamped Bernoulli log-likelihood of a label under linear predictor `eta`.
#[inline]
pub fn bernoulli_log_lik(label: bool, eta: f64) -> f64 {
    if label {
        -log1p_exp(-eta)
    } else {
        -log1p_exp(eta)
    }
}

/// Clamped Bernoulli log-likelihood of a label under probability `p`.
#[inline]
pub fn clamped_log_lik(label: bool, p: f64) -> f64 {
    let p = p.clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
    if label {
        p.ln()
    } else {
        (1.0 - p).ln()
    }
}

/// `ln(e^a + e^b)`; `-inf` acts as the additive identity.
#[inline]
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`; empty input gives `-inf`.
pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    let sum: f64 = values.iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}
