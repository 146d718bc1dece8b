//! Recurrence-interval extraction and short-memory diagnostics.
//!
//! An *exceedance* is a minute `t` with `v[t] > q` (strictly). Recurrence
//! intervals are the gaps between successive exceedance indices on the
//! concatenated trading-minute axis; day boundaries get no special handling.
//! The conditional statistics ask whether an interval remembers its
//! predecessor: the sequence is rank-partitioned into equal-size bins of the
//! preceding interval, and the distribution of successors is compared across
//! bins.

use crate::error::{Error, Result};
use crate::pdf::{log_binned_integer_pdf, PdfEstimate, PdfPoint, DEFAULT_BINS_PER_DECADE};
use crate::preprocess::NormalizedSeries;

/// Ordered recurrence intervals for one threshold `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceIntervalSeries {
    q: f64,
    tau: Vec<u32>,
    start_index: Vec<usize>,
    mean_tau: f64,
}

impl RecurrenceIntervalSeries {
    /// Rebuild a series from stored parts, revalidating the invariants.
    pub fn from_parts(q: f64, start_index: Vec<usize>, tau: Vec<u32>) -> Result<Self> {
        if tau.is_empty() {
            return Err(Error::TooFewExceedances {
                count: start_index.len(),
            });
        }
        if start_index.len() != tau.len() {
            return Err(Error::Validation(format!(
                "{} start indices for {} intervals",
                start_index.len(),
                tau.len()
            )));
        }
        if tau.iter().any(|&t| t == 0) {
            return Err(Error::Validation(
                "intervals must be at least 1 minute".into(),
            ));
        }
        for k in 1..start_index.len() {
            if start_index[k] != start_index[k - 1] + tau[k - 1] as usize {
                return Err(Error::Validation(format!(
                    "start index {} does not follow start {} + interval {}",
                    start_index[k],
                    start_index[k - 1],
                    tau[k - 1]
                )));
            }
        }
        let mean_tau = tau.iter().map(|&t| t as f64).sum::<f64>() / tau.len() as f64;
        Ok(RecurrenceIntervalSeries {
            q,
            tau,
            start_index,
            mean_tau,
        })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// Intervals in occurrence order, in minutes.
    pub fn tau(&self) -> &[u32] {
        &self.tau
    }

    /// Concatenated-axis index of each interval's opening exceedance.
    pub fn start_index(&self) -> &[usize] {
        &self.start_index
    }

    pub fn len(&self) -> usize {
        self.tau.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tau.is_empty()
    }

    pub fn mean_tau(&self) -> f64 {
        self.mean_tau
    }

    /// Intervals divided by their mean; the output always averages to 1.
    pub fn scaled(&self) -> Vec<f64> {
        self.tau.iter().map(|&t| t as f64 / self.mean_tau).collect()
    }
}

/// Extract recurrence intervals between successive exceedances of `q`.
pub fn extract_intervals(v: &[f64], q: f64) -> Result<RecurrenceIntervalSeries> {
    if !(q > 0.0) {
        return Err(Error::Stats(format!(
            "threshold q must be positive, got {q}"
        )));
    }
    let mut prev: Option<usize> = None;
    let mut start_index = Vec::new();
    let mut tau = Vec::new();
    let mut count = 0usize;
    for (t, &x) in v.iter().enumerate() {
        if x > q {
            count += 1;
            if let Some(p) = prev {
                start_index.push(p);
                tau.push((t - p) as u32);
            }
            prev = Some(t);
        }
    }
    if count < 2 {
        return Err(Error::TooFewExceedances { count });
    }
    let mean_tau = tau.iter().map(|&t| t as f64).sum::<f64>() / tau.len() as f64;
    Ok(RecurrenceIntervalSeries {
        q,
        tau,
        start_index,
        mean_tau,
    })
}

impl NormalizedSeries {
    /// Recurrence intervals of this series above threshold `q`.
    pub fn recurrence_intervals(&self, q: f64) -> Result<RecurrenceIntervalSeries> {
        extract_intervals(self.values(), q)
    }
}

/// Free-function form of [`RecurrenceIntervalSeries::scaled`].
pub fn scaled_intervals(ris: &RecurrenceIntervalSeries) -> Vec<f64> {
    ris.scaled()
}

/// Map a lattice-binned interval density into scaled units: abscissa
/// `tau/<tau>`, density multiplied by `<tau>`. The integral is preserved.
fn scale_pdf(mut pdf: PdfEstimate, mean_tau: f64) -> PdfEstimate {
    for p in &mut pdf.points {
        p.x /= mean_tau;
        p.density *= mean_tau;
        p.width /= mean_tau;
    }
    pdf
}

/// Scaled probability density of the intervals: points
/// `(tau/<tau>, P_q(tau) * <tau>)` on logarithmic bins with the integer
/// lattice correction.
pub fn scaled_interval_pdf(ris: &RecurrenceIntervalSeries) -> Result<PdfEstimate> {
    let pdf = log_binned_integer_pdf(ris.tau(), DEFAULT_BINS_PER_DECADE)?;
    Ok(scale_pdf(pdf, ris.mean_tau()))
}

/// One preceding-interval bin of the conditional distribution.
#[derive(Debug, Clone)]
pub struct ConditionalBin {
    /// Value range of the preceding intervals in this bin.
    pub tau0_range: (u32, u32),
    /// Successor intervals observed after a predecessor in this bin.
    pub successors: Vec<u32>,
    /// Scaled conditional density: points `(tau/<tau>, P(tau|tau0) * <tau>)`.
    /// Empty when the bin has fewer than two successors.
    pub pdf: Vec<PdfPoint>,
}

/// Conditional distribution of intervals given the rank bin of the preceding
/// interval.
#[derive(Debug, Clone)]
pub struct ConditionalStats {
    pub q: f64,
    pub mean_tau: f64,
    pub bins: Vec<ConditionalBin>,
}

/// Estimate `P(tau | tau0)` with `tau0` rank-binned into `n_bins` equal-size
/// bins (ties broken by position, so bin sizes differ by at most one).
pub fn conditional_pdf(ris: &RecurrenceIntervalSeries, n_bins: usize) -> Result<ConditionalStats> {
    let n = ris.len();
    if n_bins == 0 {
        return Err(Error::Stats("need at least one bin".into()));
    }
    if n < 2 * n_bins {
        return Err(Error::Stats(format!(
            "need at least {} intervals for {n_bins} bins, got {n}",
            2 * n_bins
        )));
    }
    let bin_of = rank_bins(ris.tau(), n_bins);

    let mut successors: Vec<Vec<u32>> = vec![Vec::new(); n_bins];
    for k in 0..n - 1 {
        successors[bin_of[k]].push(ris.tau()[k + 1]);
    }

    let mut sorted = ris.tau().to_vec();
    sorted.sort_unstable();
    let mean = ris.mean_tau();

    let bins = (0..n_bins)
        .map(|b| {
            let lo = b * n / n_bins;
            let hi = (b + 1) * n / n_bins;
            let succ = std::mem::take(&mut successors[b]);
            let pdf = if succ.len() >= 2 {
                scale_pdf(
                    log_binned_integer_pdf(&succ, DEFAULT_BINS_PER_DECADE)?,
                    mean,
                )
                .points
            } else {
                Vec::new()
            };
            Ok(ConditionalBin {
                tau0_range: (sorted[lo], sorted[hi - 1]),
                successors: succ,
                pdf,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ConditionalStats {
        q: ris.q(),
        mean_tau: mean,
        bins,
    })
}

/// Binning rule for the mean conditional interval curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Binning {
    Linear,
    #[default]
    Log,
}

/// Mean successor interval as a function of the preceding interval, both
/// scaled by the global mean: points `(tau0/<tau>, <tau|tau0>/<tau>)`.
/// Empty bins are omitted.
pub fn mean_conditional_interval(
    ris: &RecurrenceIntervalSeries,
    n_bins: usize,
    binning: Binning,
) -> Result<Vec<(f64, f64)>> {
    let n = ris.len();
    if n < 2 {
        return Err(Error::Stats(format!(
            "need at least 2 intervals for the conditional mean, got {n}"
        )));
    }
    if n_bins == 0 {
        return Err(Error::Stats("need at least one bin".into()));
    }
    let tau = ris.tau();
    let lo = *tau[..n - 1].iter().min().unwrap() as f64;
    let hi = *tau[..n - 1].iter().max().unwrap() as f64;

    let mut sum_tau0 = vec![0.0f64; n_bins];
    let mut sum_succ = vec![0.0f64; n_bins];
    let mut counts = vec![0usize; n_bins];

    for k in 0..n - 1 {
        let x = tau[k] as f64;
        let b = if hi == lo {
            0
        } else {
            let raw = match binning {
                Binning::Linear => (x - lo) / (hi - lo) * n_bins as f64,
                Binning::Log => (x / lo).ln() / (hi / lo).ln() * n_bins as f64,
            };
            (raw as usize).min(n_bins - 1)
        };
        sum_tau0[b] += x;
        sum_succ[b] += tau[k + 1] as f64;
        counts[b] += 1;
    }

    let mean = ris.mean_tau();
    Ok((0..n_bins)
        .filter(|&b| counts[b] > 0)
        .map(|b| {
            let c = counts[b] as f64;
            (sum_tau0[b] / c / mean, sum_succ[b] / c / mean)
        })
        .collect())
}

/// Equal-size rank bins: position `k` goes to the bin of its rank in the
/// value-sorted order, ties resolved by position.
fn rank_bins(values: &[u32], n_bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&k| (values[k], k));
    let mut bin_of = vec![0usize; n];
    for (rank, &k) in order.iter().enumerate() {
        bin_of[k] = rank * n_bins / n;
    }
    bin_of
}
