//! Power-law tail fitting.
//!
//! Scaled intervals pooled across thresholds are fitted with
//! `f(x) = c * x^(-delta)` above a lower bound `x_min`. The bound is chosen by
//! scanning every distinct sample value in range and keeping the one whose
//! maximum-likelihood fit minimizes the Kolmogorov-Smirnov distance between
//! the empirical tail CDF and the fitted CDF; ties go to the smaller bound.
//!
//! Two amplitude conventions are reported: `c` carries the tail-mass factor
//! `n_tail / n_total` so the fitted curve overlays a density estimated from
//! *all* samples, while `c_pareto` normalizes the power law on
//! `[x_min, inf)` alone.

use crate::error::{Error, Result};
use crate::preprocess::NormalizedSeries;

/// A fitted power-law tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    /// Lower bound of the scaling region.
    pub x_min: f64,
    /// Tail exponent (> 1).
    pub delta: f64,
    /// Asymptotic standard error of `delta`.
    pub delta_se: f64,
    /// Amplitude including the tail-mass factor (overlays the all-data PDF).
    pub c: f64,
    /// Amplitude of the Pareto density normalized on the tail alone.
    pub c_pareto: f64,
    /// KS distance of the fitted tail.
    pub ks: f64,
    /// Samples at or above `x_min`.
    pub n_tail: usize,
    /// Total samples offered to the fit.
    pub n_total: usize,
}

/// Fitted tail CDF: `F(x) = 1 - (x/x_min)^(1-delta)` for `x >= x_min`.
pub fn power_law_cdf(x: f64, x_min: f64, delta: f64) -> f64 {
    if x < x_min {
        0.0
    } else {
        1.0 - (x / x_min).powf(1.0 - delta)
    }
}

/// Pool scaled intervals over several thresholds. Each threshold's intervals
/// are divided by their own mean first, so threshold-dependent scales drop out
/// before fitting.
pub fn pooled_scaled_sample(v: &NormalizedSeries, q_list: &[f64]) -> Result<Vec<f64>> {
    if q_list.is_empty() {
        return Err(Error::Stats("empty threshold list".into()));
    }
    let mut pooled = Vec::new();
    for &q in q_list {
        let ris = v
            .recurrence_intervals(q)
            .map_err(|e| Error::Stats(format!("threshold q={q}: {e}")))?;
        pooled.extend(ris.scaled());
    }
    Ok(pooled)
}

/// Continuous-Pareto maximum-likelihood estimate of the tail exponent over
/// the samples at or above `x_min`: `delta = 1 + n / sum(ln(x_i/x_min))`,
/// with standard error `(delta - 1)/sqrt(n)`.
pub fn mle_delta(x: &[f64], x_min: f64) -> Result<(f64, f64)> {
    if !(x_min > 0.0) {
        return Err(Error::Stats(format!("x_min must be positive, got {x_min}")));
    }
    let mut n = 0usize;
    let mut sum_ln = 0.0f64;
    for &xi in x {
        if xi >= x_min {
            sum_ln += (xi / x_min).ln();
            n += 1;
        }
    }
    if n < 2 {
        return Err(Error::Stats(format!(
            "need at least 2 tail samples above {x_min}, got {n}"
        )));
    }
    if sum_ln <= 0.0 {
        return Err(Error::DivergentMle { n });
    }
    let delta = 1.0 + n as f64 / sum_ln;
    let se = (delta - 1.0) / (n as f64).sqrt();
    Ok((delta, se))
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `{x_i >= x_min}`
/// and the fitted power-law CDF, evaluated at both limits of each sample step.
///
/// Returns NaN when no sample reaches `x_min`.
pub fn ks_distance(x: &[f64], x_min: f64, delta: f64) -> f64 {
    let mut tail: Vec<f64> = x.iter().copied().filter(|&v| v >= x_min).collect();
    if tail.is_empty() {
        return f64::NAN;
    }
    tail.sort_unstable_by(f64::total_cmp);
    ks_distance_sorted_tail(&tail, x_min, delta)
}

/// As [`ks_distance`], for a tail already sorted ascending.
pub(crate) fn ks_distance_sorted_tail(tail: &[f64], x_min: f64, delta: f64) -> f64 {
    let m = tail.len() as f64;
    let mut sup = 0.0f64;
    for (j, &xj) in tail.iter().enumerate() {
        let f = power_law_cdf(xj, x_min, delta);
        let lo = j as f64 / m;
        let hi = (j + 1) as f64 / m;
        sup = sup.max((f - lo).abs()).max((f - hi).abs());
    }
    sup
}

/// Fit the tail at a fixed, caller-chosen lower bound (no scan).
pub fn fit_tail_at(x: &[f64], x_min: f64) -> Result<PowerLawFit> {
    let (delta, delta_se) = mle_delta(x, x_min)?;
    let mut tail: Vec<f64> = x.iter().copied().filter(|&v| v >= x_min).collect();
    tail.sort_unstable_by(f64::total_cmp);
    let ks = ks_distance_sorted_tail(&tail, x_min, delta);
    Ok(assemble_fit(
        x_min,
        delta,
        delta_se,
        ks,
        tail.len(),
        x.len(),
    ))
}

/// Scan candidate lower bounds over the distinct sample values in
/// `[x_min_floor, x_at(n_tail = n_tail_floor)]`, fitting each by maximum
/// likelihood, and keep the candidate with the smallest KS distance. Ties
/// break toward the smaller bound.
pub fn fit_tail(x: &[f64], x_min_floor: f64, n_tail_floor: usize) -> Result<PowerLawFit> {
    let n_tail_floor = n_tail_floor.max(2);
    if let Some(&bad) = x.iter().find(|v| !v.is_finite() || **v <= 0.0) {
        return Err(Error::Stats(format!(
            "tail fitting requires positive finite samples, got {bad}"
        )));
    }
    let mut sorted = x.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len();
    if n < n_tail_floor {
        return Err(Error::NoFeasibleXmin {
            floor: x_min_floor,
            n_tail_floor,
        });
    }

    let ln_x: Vec<f64> = sorted.iter().map(|v| v.ln()).collect();
    // suffix[i] = sum of ln_x[i..]
    let mut suffix = vec![0.0f64; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] + ln_x[i];
    }

    let mut best: Option<(usize, f64, f64)> = None; // (index, delta, ks)
    let mut best_ks = f64::INFINITY;

    for i in 0..=(n - n_tail_floor) {
        if sorted[i] < x_min_floor {
            continue;
        }
        if i > 0 && sorted[i] == sorted[i - 1] {
            continue; // same candidate value as the previous index
        }
        let m = n - i;
        let sum_ln = suffix[i] - m as f64 * ln_x[i];
        if sum_ln <= 0.0 {
            continue; // all tail samples equal the candidate; MLE diverges
        }
        let lambda = m as f64 / sum_ln; // delta - 1
        let m_f = m as f64;

        // Sup over the tail's step points, abandoning the candidate as soon as
        // its running maximum cannot beat the incumbent (ties keep the
        // incumbent, which has the smaller bound).
        let mut sup = 0.0f64;
        let mut complete = true;
        for j in i..n {
            let f = 1.0 - (-lambda * (ln_x[j] - ln_x[i])).exp();
            let lo = (j - i) as f64 / m_f;
            let hi = (j - i + 1) as f64 / m_f;
            let gap = (f - lo).abs().max((f - hi).abs());
            if gap > sup {
                sup = gap;
                if sup >= best_ks {
                    complete = false;
                    break;
                }
            }
        }
        if complete && sup < best_ks {
            best_ks = sup;
            best = Some((i, 1.0 + lambda, sup));
        }
    }

    let (i, delta, ks) = best.ok_or(Error::NoFeasibleXmin {
        floor: x_min_floor,
        n_tail_floor,
    })?;
    let m = n - i;
    let delta_se = (delta - 1.0) / (m as f64).sqrt();
    Ok(assemble_fit(sorted[i], delta, delta_se, ks, m, n))
}

fn assemble_fit(
    x_min: f64,
    delta: f64,
    delta_se: f64,
    ks: f64,
    n_tail: usize,
    n_total: usize,
) -> PowerLawFit {
    let lambda = delta - 1.0;
    let c_pareto = lambda * x_min.powf(lambda);
    let p_tail = n_tail as f64 / n_total as f64;
    PowerLawFit {
        x_min,
        delta,
        delta_se,
        c: p_tail * c_pareto,
        c_pareto,
        ks,
        n_tail,
        n_total,
    }
}
