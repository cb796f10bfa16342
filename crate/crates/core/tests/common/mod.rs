//! Fixtures and independent oracles shared by the integration tests.
//!
//! Nothing here calls into `baytta::bma` or the solver internals of
//! `baytta::logreg`: the oracles recompute what they check from scratch.
#![allow(dead_code)]

use baytta::data::{synthesize, PredictionTable, SyntheticConfig};
use baytta::logreg::{fit_logistic, DesignMatrix, FitConfig};

/// 50 rows, 3 columns, noise 0.5, column 2 adversarial, seed 42.
pub fn seed42_small() -> PredictionTable {
    synthesize(&seed42_config(50)).unwrap()
}

/// 200 rows, 3 columns, noise 0.5, column 2 adversarial, seed 42.
pub fn seed42_table() -> PredictionTable {
    synthesize(&seed42_config(200)).unwrap()
}

pub fn seed42_config(n_rows: usize) -> SyntheticConfig {
    let mut cfg = SyntheticConfig::new(n_rows, 3, 42);
    cfg.signal_noise = 0.5;
    cfg.adversarial_columns.insert(2);
    cfg
}

/// Small deterministic generator for test-case parameters (SplitMix64).
pub struct CaseRng(u64);

impl CaseRng {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        lo + (self.next_u64() % (hi_inclusive - lo + 1) as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }
}

/// A random synthetic table that has both label classes.
pub fn random_table(
    rng: &mut CaseRng,
    rows: (usize, usize),
    cols: (usize, usize),
) -> PredictionTable {
    loop {
        let mut cfg = SyntheticConfig::new(
            rng.range(rows.0, rows.1),
            rng.range(cols.0, cols.1),
            rng.next_u64(),
        );
        cfg.signal_noise = 0.2 + 1.3 * rng.unit();
        cfg.label_flip_rate = 0.15 * rng.unit();
        if cfg.n_columns > 1 && rng.unit() < 0.4 {
            cfg.adversarial_columns
                .insert(rng.range(0, cfg.n_columns - 1));
        }
        let t = synthesize(&cfg).unwrap();
        if t.has_both_classes() {
            return t;
        }
    }
}

pub fn subsets_lexicographic(n: usize, size: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = (1u32..(1 << n))
        .filter(|m| m.count_ones() as usize == size)
        .map(|m| (0..n).filter(|j| m & (1 << j) != 0).collect())
        .collect();
    out.sort();
    out
}

fn mask(s: &[usize]) -> u32 {
    s.iter().fold(0, |m, &j| m | (1 << j))
}

// ---------------------------------------------------------------------------
// Penalized logistic objective and a finite-difference ascent oracle.
// ---------------------------------------------------------------------------

/// Σ ln p(y|x) − ½ · ridge · N · Σ_{j≥1} β_j², params = [β_0, β_1, ...].
pub fn penalized_objective(d: &DesignMatrix, ridge: f64, params: &[f64]) -> f64 {
    let mut ll = 0.0;
    for i in 0..d.n_rows() {
        let eta: f64 = params[0]
            + d.row(i)
                .iter()
                .zip(&params[1..])
                .map(|(x, b)| x * b)
                .sum::<f64>();
        let p = 1.0 / (1.0 + (-eta).exp());
        ll += if d.labels()[i] {
            p.ln()
        } else {
            (1.0 - p).ln()
        };
    }
    let ss: f64 = params[1..].iter().map(|b| b * b).sum();
    ll - 0.5 * ridge * d.n_rows() as f64 * ss
}

/// Closed-form gradient of [`penalized_objective`].
pub fn penalized_gradient(d: &DesignMatrix, ridge: f64, params: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; params.len()];
    for i in 0..d.n_rows() {
        let x = d.row(i);
        let eta: f64 = params[0] + x.iter().zip(&params[1..]).map(|(a, b)| a * b).sum::<f64>();
        let p = 1.0 / (1.0 + (-eta).exp());
        let r = if d.labels()[i] { 1.0 } else { 0.0 } - p;
        g[0] += r;
        for (gj, xj) in g[1..].iter_mut().zip(x) {
            *gj += r * xj;
        }
    }
    for j in 1..params.len() {
        g[j] -= ridge * d.n_rows() as f64 * params[j];
    }
    g
}

fn fd_gradient(d: &DesignMatrix, ridge: f64, params: &[f64], h: f64) -> Vec<f64> {
    let mut g = vec![0.0; params.len()];
    let mut p = params.to_vec();
    for j in 0..params.len() {
        p[j] = params[j] + h;
        let up = penalized_objective(d, ridge, &p);
        p[j] = params[j] - h;
        let down = penalized_objective(d, ridge, &p);
        p[j] = params[j];
        g[j] = (up - down) / (2.0 * h);
    }
    g
}

/// Nonlinear conjugate-gradient ascent (Polak-Ribière+, Armijo backtracking) driven
/// only by central-difference gradients of [`penalized_objective`].
pub fn fd_ascent(d: &DesignMatrix, ridge: f64) -> Vec<f64> {
    const H: f64 = 1e-5;
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let mut params = vec![0.0; d.n_cols() + 1];
    let mut f = penalized_objective(d, ridge, &params);
    let mut g = fd_gradient(d, ridge, &params, H);
    let mut dir = g.clone();
    let mut stalled = 0;
    for iter in 0..50_000 {
        if g.iter().all(|v| v.abs() < 1e-7) {
            break;
        }
        if dot(&dir, &g) <= 0.0 || iter % (4 * params.len()) == 0 {
            dir = g.clone();
        }
        let slope = dot(&dir, &g);
        let mut step = 1.0 / dir.iter().fold(1e-300f64, |m, v| m.max(v.abs())).max(1.0);
        // Expand while the step keeps improving, then backtrack to Armijo.
        loop {
            let trial: Vec<f64> = params
                .iter()
                .zip(&dir)
                .map(|(p, s)| p + 2.0 * step * s)
                .collect();
            if penalized_objective(d, ridge, &trial) >= f + 1e-4 * 2.0 * step * slope {
                step *= 2.0;
                if step > 1e6 {
                    break;
                }
            } else {
                break;
            }
        }
        let mut accepted = None;
        while step > 1e-16 {
            let trial: Vec<f64> = params.iter().zip(&dir).map(|(p, s)| p + step * s).collect();
            let ft = penalized_objective(d, ridge, &trial);
            if ft >= f + 1e-4 * step * slope {
                accepted = Some((trial, ft));
                break;
            }
            step *= 0.5;
        }
        let Some((next, fnext)) = accepted else { break };
        // Stop once progress is below the resolution of the difference quotients.
        stalled = if fnext - f <= 1e-15 * f.abs().max(1.0) {
            stalled + 1
        } else {
            0
        };
        if stalled >= 10 {
            params = next;
            break;
        }
        params = next;
        f = fnext;
        let g_new = fd_gradient(d, ridge, &params, H);
        let beta = (dot(&g_new, &g_new) - dot(&g_new, &g)) / dot(&g, &g);
        dir = g_new
            .iter()
            .zip(&dir)
            .map(|(gn, dd)| gn + beta.max(0.0) * dd)
            .collect();
        g = g_new;
    }
    params
}

// ---------------------------------------------------------------------------
// Independent model-averaging oracles.
// ---------------------------------------------------------------------------

pub struct OracleFit {
    pub subset: Vec<usize>,
    pub intercept: f64,
    pub coefficients: Vec<f64>,
    pub bic: f64,
}

/// Scores one subset: the logistic fit itself is the library's, BIC is recomputed.
pub fn oracle_fit(table: &PredictionTable, subset: &[usize]) -> OracleFit {
    let d = DesignMatrix::from_table(table, subset).unwrap();
    let m = fit_logistic(&d, &FitConfig::default()).unwrap();
    let n = table.n_rows() as f64;
    let mut ll = 0.0;
    for i in 0..d.n_rows() {
        let eta: f64 = m.intercept
            + d.row(i)
                .iter()
                .zip(&m.coefficients)
                .map(|(x, b)| x * b)
                .sum::<f64>();
        let p = (1.0 / (1.0 + (-eta).exp())).clamp(1e-12, 1.0 - 1e-12);
        ll += if d.labels()[i] {
            p.ln()
        } else {
            (1.0 - p).ln()
        };
    }
    OracleFit {
        subset: subset.to_vec(),
        intercept: m.intercept,
        coefficients: m.coefficients,
        bic: (subset.len() as f64 + 1.0) * n.ln() - 2.0 * ll,
    }
}

pub struct OracleAverage {
    pub accepted: Vec<Vec<usize>>,
    pub l_total: f64,
    pub inclusion: Vec<f64>,
    pub coeffs: Vec<f64>,
    pub intercept: f64,
    pub weights: Vec<f64>,
    pub bics: Vec<f64>,
}

/// Line-by-line greedy procedure in linear space: L_max and L_total start at 0,
/// raw likelihoods are accumulated, normalization happens at the end.
pub fn greedy_linear_oracle(table: &PredictionTable) -> OracleAverage {
    let n = table.n_columns();
    let mut p_hat = vec![0.0; n];
    let mut e_hat = vec![0.0; n];
    let mut e0_hat = 0.0;
    let mut l_total = 0.0;
    let mut l_max = 0.0;
    let mut previous: Vec<u32> = Vec::new();
    let mut accepted = Vec::new();
    let mut liks = Vec::new();
    let mut bics = Vec::new();
    for size in 1..=n {
        let next = subsets_lexicographic(n, size);
        let current: Vec<Vec<usize>> = if size == 1 {
            next
        } else {
            next.into_iter()
                .filter(|s| previous.iter().any(|&p| mask(s) & p == p))
                .collect()
        };
        previous.clear();
        for s in current {
            let fit = oracle_fit(table, &s);
            let lik = (-fit.bic / 2.0).exp();
            if lik > l_max {
                l_total += lik;
                l_max = lik;
                for (pos, &j) in s.iter().enumerate() {
                    p_hat[j] += lik;
                    e_hat[j] += fit.coefficients[pos] * lik;
                }
                e0_hat += fit.intercept * lik;
                previous.push(mask(&s));
                accepted.push(s);
                liks.push(lik);
                bics.push(fit.bic);
            }
        }
    }
    OracleAverage {
        accepted,
        l_total,
        inclusion: p_hat.iter().map(|v| v / l_total).collect(),
        coeffs: e_hat.iter().map(|v| v / l_total).collect(),
        intercept: e0_hat / l_total,
        weights: liks.iter().map(|v| v / l_total).collect(),
        bics,
    }
}

/// Every non-empty subset, weights `exp(−BIC/2) / Σ exp(−BIC/2)` in log space.
pub fn full_enumeration_oracle(table: &PredictionTable) -> OracleAverage {
    let n = table.n_columns();
    let fits: Vec<OracleFit> = (1..=n)
        .flat_map(subsets_lexicographic_owned(n))
        .map(|s| oracle_fit(table, &s))
        .collect();
    let logs: Vec<f64> = fits.iter().map(|f| -f.bic / 2.0).collect();
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_total = max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    let weights: Vec<f64> = logs.iter().map(|l| (l - log_total).exp()).collect();
    let mut inclusion = vec![0.0; n];
    let mut coeffs = vec![0.0; n];
    let mut intercept = 0.0;
    for (f, w) in fits.iter().zip(&weights) {
        intercept += w * f.intercept;
        for (pos, &j) in f.subset.iter().enumerate() {
            inclusion[j] += w;
            coeffs[j] += w * f.coefficients[pos];
        }
    }
    OracleAverage {
        accepted: fits.iter().map(|f| f.subset.clone()).collect(),
        l_total: log_total.exp(),
        inclusion,
        coeffs,
        intercept,
        weights,
        bics: fits.iter().map(|f| f.bic).collect(),
    }
}

fn subsets_lexicographic_owned(n: usize) -> impl Fn(usize) -> Vec<Vec<usize>> {
    move |size| subsets_lexicographic(n, size)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}
