//! Probability-density estimation on logarithmic bins.
//!
//! Heavy-tailed interval distributions span two to three decades, so densities
//! are estimated on geometric bins (default ratio `10^(1/10)` per bin) and
//! normalized by bin width and total count. With every sample assigned to
//! exactly one bin the estimate integrates to one by construction.

use crate::error::{Error, Result};

pub const DEFAULT_BINS_PER_DECADE: f64 = 10.0;

/// One occupied density bin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdfPoint {
    /// Bin abscissa: the geometric midpoint of the bin edges.
    pub x: f64,
    /// Estimated density at `x`.
    pub density: f64,
    /// Samples in the bin.
    pub count: usize,
    /// Bin width (linear units).
    pub width: f64,
}

/// Log-binned density estimate. Empty bins are omitted.
#[derive(Debug, Clone)]
pub struct PdfEstimate {
    pub points: Vec<PdfPoint>,
    pub bins_per_decade: f64,
    pub n_samples: usize,
}

impl PdfEstimate {
    /// Riemann sum of `density * width`; equals 1 up to rounding.
    pub fn integral(&self) -> f64 {
        self.points.iter().map(|p| p.density * p.width).sum()
    }
}

/// Estimate the PDF of strictly positive `samples` on logarithmic bins.
pub fn log_binned_pdf(samples: &[f64], bins_per_decade: f64) -> Result<PdfEstimate> {
    if samples.is_empty() {
        return Err(Error::Stats("cannot bin an empty sample".into()));
    }
    if !(bins_per_decade > 0.0) {
        return Err(Error::Stats(format!(
            "bins_per_decade must be positive, got {bins_per_decade}"
        )));
    }
    if let Some(&bad) = samples.iter().find(|&&x| !(x > 0.0) || !x.is_finite()) {
        return Err(Error::Stats(format!(
            "log binning requires strictly positive finite samples, got {bad}"
        )));
    }

    let ratio = 10f64.powf(1.0 / bins_per_decade);
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let n = samples.len();

    // All samples equal: a single bin centered on the value.
    if lo == hi {
        let a = lo / ratio.sqrt();
        let b = lo * ratio.sqrt();
        let width = b - a;
        return Ok(PdfEstimate {
            points: vec![PdfPoint {
                x: lo,
                density: 1.0 / width,
                count: n,
                width,
            }],
            bins_per_decade,
            n_samples: n,
        });
    }

    let log_ratio = ratio.ln();
    let n_bins = ((hi / lo).ln() / log_ratio).floor() as usize + 1;
    let mut counts = vec![0usize; n_bins];
    for &x in samples {
        // The maximum sample lands exactly on the last edge; clamp it in.
        let j = (((x / lo).ln() / log_ratio).floor() as usize).min(n_bins - 1);
        counts[j] += 1;
    }

    let points = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(j, &c)| {
            let a = lo * ratio.powi(j as i32);
            let b = a * ratio;
            PdfPoint {
                x: (a * b).sqrt(),
                density: c as f64 / (n as f64 * (b - a)),
                count: c,
                width: b - a,
            }
        })
        .collect();

    Ok(PdfEstimate {
        points,
        bins_per_decade,
        n_samples: n,
    })
}

/// Log-binned density estimate for positive integer samples.
///
/// Interval data lives on the integer lattice; naive log binning aliases
/// badly wherever a bin covers only a handful of integers. Here each bin's
/// density is its probability mass divided by the *number of integers the bin
/// covers*, which keeps even single-integer bins unbiased. The abscissa is
/// the geometric mean of the covered integer range, and `width` is the
/// covered integer count, so `density * width` sums to exactly 1.
pub fn log_binned_integer_pdf(samples: &[u32], bins_per_decade: f64) -> Result<PdfEstimate> {
    if samples.is_empty() {
        return Err(Error::Stats("cannot bin an empty sample".into()));
    }
    if !(bins_per_decade > 0.0) {
        return Err(Error::Stats(format!(
            "bins_per_decade must be positive, got {bins_per_decade}"
        )));
    }
    if samples.iter().any(|&t| t == 0) {
        return Err(Error::Stats("integer samples must be positive".into()));
    }
    let lo_int = *samples.iter().min().unwrap();
    let hi_int = *samples.iter().max().unwrap();
    let n = samples.len();
    let ratio = 10f64.powf(1.0 / bins_per_decade);

    // Integer bin boundaries: bin j covers the integers [bounds[j], bounds[j+1]).
    // Snapping each geometric edge to the next integer keeps assignment and
    // coverage counting exact; edges landing inside the same integer merge.
    let mut bounds: Vec<u32> = vec![lo_int];
    if lo_int == hi_int {
        bounds.push(lo_int + 1);
    } else {
        let lo = lo_int as f64;
        let mut j = 1i32;
        while *bounds.last().unwrap() <= hi_int {
            let edge = lo * ratio.powi(j);
            let b = (edge * (1.0 - 1e-12)).ceil() as u32;
            if b > *bounds.last().unwrap() {
                bounds.push(b);
            }
            j += 1;
        }
    }

    let n_bins = bounds.len() - 1;
    let mut counts = vec![0usize; n_bins];
    for &t in samples {
        let j = bounds.partition_point(|&b| b <= t) - 1;
        counts[j] += 1;
    }

    let points = (0..n_bins)
        .filter(|&j| counts[j] > 0)
        .map(|j| {
            let first = bounds[j] as f64;
            let last = (bounds[j + 1] - 1) as f64;
            let covered = (bounds[j + 1] - bounds[j]) as f64;
            PdfPoint {
                x: (first * last).sqrt(),
                density: counts[j] as f64 / (n as f64 * covered),
                count: counts[j],
                width: covered,
            }
        })
        .collect();

    Ok(PdfEstimate {
        points,
        bins_per_decade,
        n_samples: n,
    })
}
