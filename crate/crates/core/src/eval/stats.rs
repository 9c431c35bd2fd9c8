use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::EvalError;

/// Largest sample for which the exact permutation test is used.
pub const EXACT_PERMUTATION_MAX_N: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Confidence {
    pub probabilities: Vec<f64>,
    pub uncertain: bool,
}

/// Softmax at unit temperature; uncertain when the top probability is below `tau`.
pub fn normalize_confidence(scores: &[f64], tau: f64) -> Result<Confidence, EvalError> {
    if scores.is_empty() {
        return Err(EvalError::EmptyScores);
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(EvalError::NonFiniteScore);
    }
    let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = scores.iter().map(|s| (s - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    let probabilities: Vec<f64> = exps.iter().map(|e| e / z).collect();
    let top = probabilities.iter().copied().fold(0.0, f64::max);
    Ok(Confidence {
        probabilities,
        uncertain: top < tau,
    })
}

/// 1-based ranks; tied values share the mean of the ranks they span.
pub fn mid_ranks(xs: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && xs[order[j]] == xs[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        i = j;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpearmanResult {
    pub n: usize,
    pub rho: f64,
    pub p_value: f64,
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<SpearmanResult, EvalError> {
    assert_eq!(x.len(), y.len(), "paired samples");
    let n = x.len();
    if n < 3 {
        return Err(EvalError::InsufficientData(n));
    }
    let rx = mid_ranks(x);
    let ry = mid_ranks(y);
    let rho = pearson(&rx, &ry).ok_or(EvalError::ZeroVariance)?;
    let p_value = if n <= EXACT_PERMUTATION_MAX_N {
        exact_p_value(&rx, &ry, rho)
    } else {
        t_p_value(rho, n)
    };
    Ok(SpearmanResult { n, rho, p_value })
}

/// Two-sided p-value from t = ρ √((n−2)/(1−ρ²)) with n−2 degrees of freedom.
fn t_p_value(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let denom = 1.0 - rho * rho;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = rho.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0");
    (2.0 * dist.sf(t)).min(1.0)
}

/// Share of all rank permutations whose |ρ| reaches the observed one.
///
/// With both rank vectors fixed up to order, ρ is an affine function of the
/// dot product, and each swap of Heap's algorithm changes that in O(1).
fn exact_p_value(rx: &[f64], ry: &[f64], rho: f64) -> f64 {
    let n = rx.len();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n as f64;
    let (mx, my) = (mean(rx), mean(ry));
    let sxx: f64 = rx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let syy: f64 = ry.iter().map(|b| (b - my) * (b - my)).sum();
    let norm = (sxx * syy).sqrt();
    let corr = |dot: f64| (dot - n as f64 * mx * my) / norm;

    let observed = rho.abs() - 1e-12;
    let mut perm = ry.to_vec();
    let mut dot: f64 = rx.iter().zip(&perm).map(|(a, b)| a * b).sum();
    let mut hits = u64::from(corr(dot).abs() >= observed);
    let mut total = 1u64;
    let mut c = vec![0usize; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            let j = if i % 2 == 0 { 0 } else { c[i] };
            dot += (rx[i] - rx[j]) * (perm[j] - perm[i]);
            perm.swap(i, j);
            total += 1;
            if corr(dot).abs() >= observed {
                hits += 1;
            }
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    hits as f64 / total as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quartiles {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Linear interpolation between closest ranks.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

pub fn quartiles(values: &[f64]) -> Option<Quartiles> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    Some(Quartiles {
        min: v[0],
        q1: quantile(&v, 0.25),
        median: quantile(&v, 0.5),
        q3: quantile(&v, 0.75),
        max: v[v.len() - 1],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanSe {
    pub n: usize,
    pub mean: f64,
    /// Sample standard deviation over √n; absent for a single observation.
    pub se: Option<f64>,
}

pub fn mean_se(values: &[f64]) -> Option<MeanSe> {
    let n = values.len();
    if n == 0 {
        return None;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let se = (n > 1).then(|| {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        var.sqrt() / (n as f64).sqrt()
    });
    Some(MeanSe { n, mean, se })
}
