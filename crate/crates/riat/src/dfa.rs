//! Detrended fluctuation analysis and the shuffle control.
//!
//! The series is mean-centered and integrated into a profile; the profile is
//! cut into non-overlapping windows of `l` points taken from both ends (so the
//! remainder is used too), a least-squares polynomial is removed per window,
//! and `F(l)` is the root mean squared residual. On a double-logarithmic grid
//! `F(l) ~ l^alpha`: `alpha = 0.5` means no memory, `0.5 < alpha <= 1` means
//! long-range correlation.
//!
//! [`interval_memory_report`] applies this to recurrence-interval sequences
//! and re-extracts intervals from shuffled source data as a control: if the
//! interval memory stems from the memory of the underlying series, shuffling
//! the source must push `alpha` back to 0.5 while preserving the exceedance
//! count exactly.

use rand::Rng;

use crate::error::{Error, Result};
use crate::preprocess::NormalizedSeries;
use crate::rng::{stream_rng, streams};

/// Fluctuation function and fitted scaling exponent.
#[derive(Debug, Clone)]
pub struct DfaResult {
    pub scales: Vec<usize>,
    pub fluctuation: Vec<f64>,
    /// Scale range used for the exponent fit (inclusive bounds).
    pub fit_range: (usize, usize),
    /// Slope of `ln F` vs `ln l`; `None` when fewer than two scales carry a
    /// positive fluctuation (e.g. a detrend-annihilated input).
    pub alpha: Option<f64>,
    pub alpha_se: Option<f64>,
}

impl DfaResult {
    /// Refit the exponent on scales within `[lo, hi]`.
    pub fn with_fit_range(&self, lo: usize, hi: usize) -> DfaResult {
        let (alpha, alpha_se) = fit_alpha(&self.scales, &self.fluctuation, lo, hi);
        DfaResult {
            scales: self.scales.clone(),
            fluctuation: self.fluctuation.clone(),
            fit_range: (lo, hi),
            alpha,
            alpha_se,
        }
    }
}

/// Twenty log-spaced scales from 4 to `n/4` (deduplicated).
pub fn default_scales(n: usize) -> Vec<usize> {
    let hi = (n / 4).max(4);
    let (lo_ln, hi_ln) = (4f64.ln(), (hi as f64).ln());
    let mut scales: Vec<usize> = (0..20)
        .map(|i| {
            let t = i as f64 / 19.0;
            (lo_ln + t * (hi_ln - lo_ln)).exp().round() as usize
        })
        .collect();
    scales.dedup();
    scales
}

/// Detrended fluctuation function of `series` over `scales`, removing a
/// polynomial of `order` per window.
pub fn dfa(series: &[f64], scales: &[usize], order: usize) -> Result<DfaResult> {
    if scales.is_empty() {
        return Err(Error::Stats("no scales given".into()));
    }
    if order < 1 {
        return Err(Error::Stats("detrending order must be at least 1".into()));
    }
    let n = series.len();
    let mut scales = scales.to_vec();
    scales.sort_unstable();
    scales.dedup();
    let max_scale = *scales.last().unwrap();
    if n < 4 * max_scale {
        return Err(Error::SeriesTooShort {
            requested: max_scale,
            max_feasible: n / 4,
        });
    }
    for &l in &scales {
        if l < 4 || l < order + 2 {
            return Err(Error::Stats(format!(
                "scale {l} too small: need at least max(4, order + 2) = {}",
                4.max(order + 2)
            )));
        }
    }

    let mean = series.iter().sum::<f64>() / n as f64;
    let mut profile = Vec::with_capacity(n);
    let mut acc = 0.0;
    for &x in series {
        acc += x - mean;
        profile.push(acc);
    }

    let fluctuation: Vec<f64> = scales
        .iter()
        .map(|&l| {
            let k = n / l;
            let mut ss = 0.0;
            for w in 0..k {
                ss += window_residual_ss(&profile[w * l..(w + 1) * l], order);
            }
            for w in 0..k {
                let end = n - w * l;
                ss += window_residual_ss(&profile[end - l..end], order);
            }
            (ss / (2 * k * l) as f64).sqrt()
        })
        .collect();

    let fit_range = (scales[0], *scales.last().unwrap());
    let (alpha, alpha_se) = fit_alpha(&scales, &fluctuation, fit_range.0, fit_range.1);
    Ok(DfaResult {
        scales,
        fluctuation,
        fit_range,
        alpha,
        alpha_se,
    })
}

/// Least-squares slope of `ln F` vs `ln l` over scales in `[lo, hi]` with
/// positive fluctuation.
fn fit_alpha(
    scales: &[usize],
    fluctuation: &[f64],
    lo: usize,
    hi: usize,
) -> (Option<f64>, Option<f64>) {
    let points: Vec<(f64, f64)> = scales
        .iter()
        .zip(fluctuation)
        .filter(|(&l, &f)| l >= lo && l <= hi && f > 0.0)
        .map(|(&l, &f)| ((l as f64).ln(), f.ln()))
        .collect();
    let m = points.len();
    if m < 2 {
        return (None, None);
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / m as f64;
    let my = points.iter().map(|p| p.1).sum::<f64>() / m as f64;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return (None, None);
    }
    let slope = sxy / sxx;
    let se = if m > 2 {
        let ssr: f64 = points
            .iter()
            .map(|&(x, y)| {
                let r = y - my - slope * (x - mx);
                r * r
            })
            .sum();
        Some((ssr / (m - 2) as f64 / sxx).sqrt())
    } else {
        Some(0.0)
    };
    (Some(slope), se)
}

/// Residual sum of squares of `window` after removing its least-squares
/// polynomial of `order`.
fn window_residual_ss(window: &[f64], order: usize) -> f64 {
    let l = window.len();
    if order == 1 {
        // Centered closed form: sum t = 0, sum t^2 = l(l^2-1)/12.
        let lf = l as f64;
        let mid = (lf - 1.0) / 2.0;
        let mean = window.iter().sum::<f64>() / lf;
        let stt = lf * (lf * lf - 1.0) / 12.0;
        let mut sty = 0.0;
        for (j, &y) in window.iter().enumerate() {
            sty += (j as f64 - mid) * y;
        }
        let slope = sty / stt;
        let mut ss = 0.0;
        for (j, &y) in window.iter().enumerate() {
            let r = y - mean - slope * (j as f64 - mid);
            ss += r * r;
        }
        return ss;
    }

    // General order: normal equations on x scaled to [-1, 1].
    let p = order + 1;
    let xs: Vec<f64> = (0..l)
        .map(|j| 2.0 * j as f64 / (l - 1) as f64 - 1.0)
        .collect();
    let mut gram = vec![vec![0.0f64; p]; p];
    let mut rhs = vec![0.0f64; p];
    for (j, &x) in xs.iter().enumerate() {
        let mut pow = vec![1.0f64; 2 * p - 1];
        for d in 1..2 * p - 1 {
            pow[d] = pow[d - 1] * x;
        }
        for a in 0..p {
            for b in 0..p {
                gram[a][b] += pow[a + b];
            }
            rhs[a] += pow[a] * window[j];
        }
    }
    let coef = solve_linear(&mut gram, &mut rhs);
    let mut ss = 0.0;
    for (j, &x) in xs.iter().enumerate() {
        let mut fit = 0.0;
        let mut pow = 1.0;
        for &c in &coef {
            fit += c * pow;
            pow *= x;
        }
        let r = window[j] - fit;
        ss += r * r;
    }
    ss
}

/// Gaussian elimination with partial pivoting; the systems here are tiny
/// ((order+1) x (order+1)) and well-conditioned on [-1, 1].
fn solve_linear(a: &mut [Vec<f64>], b: &mut [f64]) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        b.swap(col, pivot);
        let diag = a[col][col];
        for row in col + 1..n {
            let factor = a[row][col] / diag;
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0f64; n];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in col + 1..n {
            acc -= a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    x
}

/// Uniform random permutation (Fisher-Yates) with a deterministic seed.
pub fn shuffle<T: Clone>(series: &[T], seed: u64) -> Vec<T> {
    let mut out = series.to_vec();
    let mut rng = stream_rng(seed, streams::SHUFFLE);
    for i in (1..out.len()).rev() {
        let j = rng.random_range(0..=i);
        out.swap(i, j);
    }
    out
}

/// Memory diagnostics for one threshold.
#[derive(Debug, Clone)]
pub struct QMemory {
    pub q: f64,
    pub n_intervals: usize,
    /// DFA of the interval sequence as observed.
    pub raw: DfaResult,
    /// DFA of the intervals re-extracted from the shuffled source series.
    pub shuffled: DfaResult,
}

/// DFA of the source series and of its recurrence intervals per threshold,
/// each paired with the shuffled-source control.
#[derive(Debug, Clone)]
pub struct MemoryReport {
    /// DFA of the normalized source series itself.
    pub source: DfaResult,
    pub per_q: Vec<QMemory>,
    pub warnings: Vec<String>,
}

/// Minimum interval count per threshold; sparser thresholds are skipped.
pub const MIN_INTERVALS_FOR_DFA: usize = 200;

pub fn interval_memory_report(
    v: &NormalizedSeries,
    q_list: &[f64],
    order: usize,
    seed: u64,
) -> Result<MemoryReport> {
    let source = dfa(v.values(), &default_scales(v.len()), order)?;
    let shuffled_values = shuffle(v.values(), seed);

    let mut per_q = Vec::new();
    let mut warnings = Vec::new();
    for &q in q_list {
        let ris = match v.recurrence_intervals(q) {
            Ok(r) => r,
            Err(e) => {
                warnings.push(format!("q={q}: skipped ({e})"));
                continue;
            }
        };
        if ris.len() < MIN_INTERVALS_FOR_DFA {
            warnings.push(format!(
                "q={q}: skipped ({} intervals, need {MIN_INTERVALS_FOR_DFA})",
                ris.len()
            ));
            continue;
        }
        let taus: Vec<f64> = ris.tau().iter().map(|&t| t as f64).collect();
        let raw = dfa(&taus, &default_scales(taus.len()), order)?;

        let shuffled_ris = crate::intervals::extract_intervals(&shuffled_values, q)?;
        debug_assert_eq!(shuffled_ris.len(), ris.len());
        let taus_sh: Vec<f64> = shuffled_ris.tau().iter().map(|&t| t as f64).collect();
        let shuffled = dfa(&taus_sh, &default_scales(taus_sh.len()), order)?;

        per_q.push(QMemory {
            q,
            n_intervals: ris.len(),
            raw,
            shuffled,
        });
    }
    if per_q.is_empty() {
        return Err(Error::Stats(format!(
            "no threshold yielded enough intervals: {}",
            warnings.join("; ")
        )));
    }
    Ok(MemoryReport {
        source,
        per_q,
        warnings,
    })
}
