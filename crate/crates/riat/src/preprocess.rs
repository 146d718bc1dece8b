//! Intraday-pattern removal and variance normalization.
//!
//! Raw minute volumes carry a strong U-shaped seasonality: the cross-day
//! average at each minute-of-session is estimated, divided out, and the
//! deseasonalized series is normalized by its (population) standard deviation.
//! The result is the dimensionless series `v(t)` on the concatenated
//! trading-minute axis on which all thresholding happens. Returns get the
//! lighter treatment: division by their global standard deviation only.

use crate::error::{Error, Result};
use crate::ingest::{MinuteBarSeries, ReturnSeries};

/// Cross-day average of a per-day grid at each minute-of-session.
#[derive(Debug, Clone, PartialEq)]
pub struct IntradayProfile {
    a: Vec<f64>,
}

impl IntradayProfile {
    pub fn values(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// What a normalized series was built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSource {
    Volume,
    AbsReturn,
    SignedReturn,
}

/// Deseasonalized, variance-normalized series on a concatenated minute axis.
///
/// The population standard deviation over all entries is 1 (within 1e-9).
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedSeries {
    values: Vec<f64>,
    day_starts: Vec<usize>,
    source: SeriesSource,
}

impl NormalizedSeries {
    /// Normalize an arbitrary series (single day) by its population standard
    /// deviation. Intended for synthetic inputs; pipeline data should come
    /// through [`normalize`] or [`normalize_returns`].
    pub fn from_values(values: Vec<f64>, source: SeriesSource) -> Result<Self> {
        let sd = population_sd(values.iter().copied())?;
        let values = values.into_iter().map(|x| x / sd).collect();
        Ok(NormalizedSeries {
            values,
            day_starts: vec![0],
            source,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn day_starts(&self) -> &[usize] {
        &self.day_starts
    }

    pub fn source(&self) -> SeriesSource {
        self.source
    }
}

/// Population standard deviation, with a relative floor guarding constant input.
fn population_sd(values: impl Iterator<Item = f64> + Clone) -> Result<f64> {
    let mut n = 0usize;
    let mut sum = 0.0;
    for x in values.clone() {
        if !x.is_finite() {
            return Err(Error::Validation(format!("non-finite value {x} in series")));
        }
        sum += x;
        n += 1;
    }
    if n < 2 {
        return Err(Error::ZeroVariance(format!(
            "need at least 2 values to normalize, got {n}"
        )));
    }
    let mean = sum / n as f64;
    let mut var = 0.0;
    let mut sq = 0.0;
    for x in values {
        var += (x - mean) * (x - mean);
        sq += x * x;
    }
    var /= n as f64;
    let rms = (sq / n as f64).sqrt();
    let sd = var.sqrt();
    if sd <= rms * 1e-12 {
        return Err(Error::ZeroVariance(
            "series is constant (or numerically indistinguishable from constant)".into(),
        ));
    }
    Ok(sd)
}

/// Per-minute cross-day average of a complete per-day grid.
pub fn intraday_profile(grid: &[Vec<f64>]) -> Result<IntradayProfile> {
    let n_days = grid.len();
    if n_days == 0 {
        return Err(Error::Validation("profile needs at least one day".into()));
    }
    let mpd = grid[0].len();
    if mpd == 0 {
        return Err(Error::Validation(
            "profile needs at least one minute".into(),
        ));
    }
    if let Some(bad) = grid.iter().position(|d| d.len() != mpd) {
        return Err(Error::Validation(format!(
            "day {bad} has {} minutes, expected {mpd}",
            grid[bad].len()
        )));
    }
    let mut a = vec![0.0f64; mpd];
    for day in grid {
        for (s, &v) in day.iter().enumerate() {
            a[s] += v;
        }
    }
    for v in &mut a {
        *v /= n_days as f64;
    }
    if let Some(s) = a.iter().position(|&v| v == 0.0) {
        return Err(Error::DegenerateProfile { minute: s });
    }
    Ok(IntradayProfile { a })
}

/// Divide each day's grid by the intraday profile, minute by minute.
pub fn deseasonalize(grid: &[Vec<f64>], profile: &IntradayProfile) -> Result<Vec<Vec<f64>>> {
    let mpd = profile.len();
    if let Some(bad) = grid.iter().position(|d| d.len() != mpd) {
        return Err(Error::Validation(format!(
            "day {bad} has {} minutes but the profile has {mpd}",
            grid[bad].len()
        )));
    }
    Ok(grid
        .iter()
        .map(|day| {
            day.iter()
                .zip(profile.values())
                .map(|(&v, &a)| v / a)
                .collect()
        })
        .collect())
}

/// Concatenate a per-day grid and divide by its population standard deviation.
///
/// No mean is subtracted: `v(t) = V'(t) / sd(V')`, so nonnegative input stays
/// nonnegative and the output standard deviation is exactly 1.
pub fn normalize(grid: &[Vec<f64>]) -> Result<NormalizedSeries> {
    let mut day_starts = Vec::with_capacity(grid.len());
    let mut values = Vec::new();
    for day in grid {
        day_starts.push(values.len());
        values.extend_from_slice(day);
    }
    let sd = population_sd(values.iter().copied())?;
    for v in &mut values {
        *v /= sd;
    }
    Ok(NormalizedSeries {
        values,
        day_starts,
        source: SeriesSource::Volume,
    })
}

/// Profile -> deseasonalize -> normalize, the full volume pipeline.
pub fn normalized_volumes(series: &MinuteBarSeries) -> Result<NormalizedSeries> {
    let profile = intraday_profile(series.volume_grid())?;
    let deseasonalized = deseasonalize(series.volume_grid(), &profile)?;
    normalize(&deseasonalized)
}

/// Normalized absolute returns on the compact return axis (one entry per
/// within-session return). Returns are divided by their global standard
/// deviation; no intraday profile is removed.
pub fn normalize_returns(returns: &ReturnSeries) -> Result<NormalizedSeries> {
    let mut day_starts = Vec::with_capacity(returns.values().len());
    let mut values = Vec::new();
    for day in returns.values() {
        day_starts.push(values.len());
        values.extend_from_slice(day);
    }
    let sd = population_sd(values.iter().copied())?;
    for v in &mut values {
        *v = (*v / sd).abs();
    }
    Ok(NormalizedSeries {
        values,
        day_starts,
        source: SeriesSource::AbsReturn,
    })
}

/// Normalized returns pinned to the concatenated minute axis of the series
/// they derive from: entry `t` is `Some(r(t)/sd)` when minute `t` closes a
/// within-session return and `None` at the first minute of each session.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedReturns {
    signed: Vec<Option<f64>>,
    day_starts: Vec<usize>,
}

impl AlignedReturns {
    /// Wrap an already-aligned signed return series (`None` = no return at
    /// that minute), normalizing by the population standard deviation of the
    /// defined entries.
    pub fn from_signed(signed: Vec<Option<f64>>) -> Result<Self> {
        let sd = population_sd(signed.iter().flatten().copied())?;
        let signed = signed.into_iter().map(|o| o.map(|x| x / sd)).collect();
        Ok(AlignedReturns {
            signed,
            day_starts: vec![0],
        })
    }

    /// Minutes on the concatenated axis.
    pub fn axis_len(&self) -> usize {
        self.signed.len()
    }

    pub fn day_starts(&self) -> &[usize] {
        &self.day_starts
    }

    /// Signed normalized return ending at minute `t`.
    pub fn signed_at(&self, t: usize) -> Option<f64> {
        self.signed.get(t).copied().flatten()
    }

    /// Magnitude of the normalized return ending at minute `t`.
    pub fn abs_at(&self, t: usize) -> Option<f64> {
        self.signed_at(t).map(f64::abs)
    }

    pub fn defined_count(&self) -> usize {
        self.signed.iter().flatten().count()
    }

    /// Iterator over defined `(minute, |r|)` pairs.
    pub fn abs_iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.signed
            .iter()
            .enumerate()
            .filter_map(|(t, o)| o.map(|x| (t, x.abs())))
    }
}

/// Align a return series to the full trading-minute axis and normalize it by
/// the same global standard deviation as [`normalize_returns`].
pub fn align_returns(returns: &ReturnSeries) -> Result<AlignedReturns> {
    let calendar = returns.calendar();
    let mpd = calendar.minutes_per_day();
    let sd = population_sd(returns.values().iter().flatten().copied())?;
    let mut signed = Vec::with_capacity(returns.values().len() * mpd);
    let mut day_starts = Vec::with_capacity(returns.values().len());
    for day in returns.values() {
        day_starts.push(signed.len());
        let mut compact = day.iter();
        for s in 0..mpd {
            if calendar.is_session_start(s) {
                signed.push(None);
            } else {
                let r = compact.next().ok_or_else(|| {
                    Error::Validation("return series shorter than its calendar implies".into())
                })?;
                signed.push(Some(r / sd));
            }
        }
        if compact.next().is_some() {
            return Err(Error::Validation(
                "return series longer than its calendar implies".into(),
            ));
        }
    }
    Ok(AlignedReturns { signed, day_starts })
}
