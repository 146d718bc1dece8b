//! Volume-return coupling measures.
//!
//! Three views of how volume recurrence intervals depend on price returns:
//! the Pearson correlation between an interval and the return magnitude at
//! its opening exceedance, the comovement probability that both interval
//! endpoints carry returns above a threshold, and the average evolution of
//! normalized volume after a large return.
//!
//! Returns are aligned to the minute they end on; the first minute of a
//! session carries no return, and intervals touching such a minute are
//! excluded from both the numerator and denominator of the comovement
//! probability.

use crate::error::{Error, Result};
use crate::intervals::RecurrenceIntervalSeries;
use crate::preprocess::{AlignedReturns, NormalizedSeries};

/// Correlation between interval lengths and their opening return magnitudes.
#[derive(Debug, Clone, Copy)]
pub struct Correlation {
    pub c: f64,
    pub n_pairs: usize,
}

/// Minimum pair count for a meaningful correlation estimate.
pub const MIN_CORRELATION_PAIRS: usize = 30;

/// Pearson correlation between `|r(t_k)|` and `tau_k`, where `t_k` is the
/// opening exceedance of interval `k`. Pairs whose opening minute has no
/// return are skipped.
pub fn interval_return_correlation(
    ris: &RecurrenceIntervalSeries,
    r: &AlignedReturns,
) -> Result<Correlation> {
    let mut xs = Vec::with_capacity(ris.len());
    let mut ys = Vec::with_capacity(ris.len());
    for (k, &start) in ris.start_index().iter().enumerate() {
        if let Some(abs_r) = r.abs_at(start) {
            xs.push(abs_r);
            ys.push(ris.tau()[k] as f64);
        }
    }
    let n = xs.len();
    if n < MIN_CORRELATION_PAIRS {
        return Err(Error::Stats(format!(
            "only {n} interval/return pairs, need at least {MIN_CORRELATION_PAIRS}"
        )));
    }
    let c = pearson(&xs, &ys)?;
    Ok(Correlation { c, n_pairs: n })
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&x, &y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::UndefinedCorrelation(
            "a margin of the correlation is constant".into(),
        ));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// One threshold of the comovement curve.
#[derive(Debug, Clone, Copy)]
pub struct ComovementPoint {
    /// Return-magnitude threshold `Q`.
    pub threshold: f64,
    /// Probability that both interval endpoints carry `|r| > Q`.
    pub p: f64,
    /// Intervals counted in the numerator at this threshold.
    pub n_exceed: usize,
}

/// Comovement probabilities over a threshold grid.
#[derive(Debug, Clone)]
pub struct Comovement {
    pub q: f64,
    pub points: Vec<ComovementPoint>,
    /// All volume recurrence intervals at `q`.
    pub n_intervals: usize,
    /// Intervals with a defined return at both endpoints (the denominator).
    pub n_used: usize,
}

/// Probability that a volume recurrence interval `(t, t + tau)` has
/// `|r(t)| > Q` and `|r(t + tau)| > Q`, per threshold in `q_grid`.
/// `Q = 0` counts every interval, so `P(0) = 1` exactly.
pub fn comovement_probability(
    v: &NormalizedSeries,
    r: &AlignedReturns,
    q: f64,
    q_grid: &[f64],
) -> Result<Comovement> {
    if v.len() != r.axis_len() {
        return Err(Error::Validation(format!(
            "volume axis has {} minutes but returns have {}",
            v.len(),
            r.axis_len()
        )));
    }
    let ris = v.recurrence_intervals(q)?;
    let endpoints: Vec<(f64, f64)> = ris
        .start_index()
        .iter()
        .zip(ris.tau())
        .filter_map(|(&t, &tau)| {
            let open = r.abs_at(t)?;
            let close = r.abs_at(t + tau as usize)?;
            Some((open, close))
        })
        .collect();
    let n_used = endpoints.len();
    if n_used == 0 {
        return Err(Error::Stats(
            "no interval has a defined return at both endpoints".into(),
        ));
    }
    let points = q_grid
        .iter()
        .map(|&thr| {
            let n_exceed = if thr == 0.0 {
                n_used
            } else {
                endpoints
                    .iter()
                    .filter(|&&(a, b)| a > thr && b > thr)
                    .count()
            };
            ComovementPoint {
                threshold: thr,
                p: n_exceed as f64 / n_used as f64,
                n_exceed,
            }
        })
        .collect();
    Ok(Comovement {
        q,
        points,
        n_intervals: ris.len(),
        n_used,
    })
}

/// Default comovement grid: `Q = 0` plus 40 log-spaced thresholds from 0.1 to
/// the 99.99th percentile of the defined return magnitudes.
pub fn default_return_threshold_grid(r: &AlignedReturns) -> Vec<f64> {
    let mut mags: Vec<f64> = r.abs_iter().map(|(_, m)| m).collect();
    let mut grid = vec![0.0];
    if mags.is_empty() {
        return grid;
    }
    mags.sort_unstable_by(f64::total_cmp);
    let idx = ((mags.len() as f64 * 0.9999) as usize).min(mags.len() - 1);
    let hi = mags[idx].max(0.2);
    let lo = 0.1f64;
    for i in 0..40 {
        let t = i as f64 / 39.0;
        grid.push(lo * (hi / lo).powf(t));
    }
    grid
}

/// How the post-trigger trace is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceMode {
    /// Average over every trigger event.
    #[default]
    Average,
    /// A single event, by index into the chronological event list.
    Single(usize),
}

/// Which return series fires the trigger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TriggerOn {
    /// Signed normalized return exceeds the trigger.
    #[default]
    Signed,
    /// Return magnitude exceeds the trigger.
    Abs,
}

/// Mean normalized volume at offsets `1..=horizon` after minutes whose return
/// exceeds `trigger`. Events too close to the end of the axis are skipped.
pub fn conditioned_volume_trace(
    v: &NormalizedSeries,
    r: &AlignedReturns,
    trigger: f64,
    horizon: usize,
    mode: TraceMode,
    trigger_on: TriggerOn,
) -> Result<Vec<(usize, f64)>> {
    if v.len() != r.axis_len() {
        return Err(Error::Validation(format!(
            "volume axis has {} minutes but returns have {}",
            v.len(),
            r.axis_len()
        )));
    }
    if horizon == 0 {
        return Err(Error::Stats("trace horizon must be at least 1".into()));
    }
    let value_at = |t: usize| match trigger_on {
        TriggerOn::Signed => r.signed_at(t),
        TriggerOn::Abs => r.abs_at(t),
    };
    let mut events = Vec::new();
    let mut max_observed = f64::NEG_INFINITY;
    for t in 0..v.len() {
        if let Some(x) = value_at(t) {
            max_observed = max_observed.max(x);
            if x > trigger && t + horizon < v.len() {
                events.push(t);
            }
        }
    }
    if events.is_empty() {
        return Err(Error::NoTriggerEvents {
            trigger,
            max_observed,
        });
    }
    let selected: &[usize] = match mode {
        TraceMode::Average => &events,
        TraceMode::Single(i) => {
            if i >= events.len() {
                return Err(Error::Stats(format!(
                    "event index {i} out of range: {} trigger events",
                    events.len()
                )));
            }
            std::slice::from_ref(&events[i])
        }
    };
    let values = v.values();
    Ok((1..=horizon)
        .map(|offset| {
            let sum: f64 = selected.iter().map(|&t| values[t + offset]).sum();
            (offset, sum / selected.len() as f64)
        })
        .collect())
}

/// Correlation plus comovement for one volume threshold.
#[derive(Debug, Clone)]
pub struct CouplingReport {
    pub q: f64,
    pub c_r_tau: f64,
    pub n_pairs: usize,
    pub comovement: Vec<ComovementPoint>,
    pub n_intervals: usize,
    pub n_used: usize,
}

pub fn coupling_report(
    v: &NormalizedSeries,
    r: &AlignedReturns,
    q: f64,
    q_grid: &[f64],
) -> Result<CouplingReport> {
    let ris = v.recurrence_intervals(q)?;
    let corr = interval_return_correlation(&ris, r)?;
    let co = comovement_probability(v, r, q, q_grid)?;
    Ok(CouplingReport {
        q,
        c_r_tau: corr.c,
        n_pairs: corr.n_pairs,
        comovement: co.points,
        n_intervals: co.n_intervals,
        n_used: co.n_used,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::preprocess::SeriesSource;

    /// Aligned returns with `signed[t]` given, plus interval series whose
    /// opening exceedances sit at the chosen minutes.
    fn aligned(signed: Vec<Option<f64>>) -> AlignedReturns {
        AlignedReturns::from_signed(signed).unwrap()
    }

    fn ris_with_taus(taus: &[u32]) -> RecurrenceIntervalSeries {
        let mut starts = Vec::with_capacity(taus.len());
        let mut pos = 0usize;
        for &t in taus {
            starts.push(pos);
            pos += t as usize;
        }
        RecurrenceIntervalSeries::from_parts(2.0, starts, taus.to_vec()).unwrap()
    }

    #[test]
    fn perfect_correlation_when_tau_tracks_return() {
        // tau_k equals the return magnitude at its opening minute.
        let taus: Vec<u32> = (1..=40).collect();
        let ris = ris_with_taus(&taus);
        let axis = ris.start_index().last().unwrap() + *ris.tau().last().unwrap() as usize + 1;
        let mut signed = vec![None; axis];
        for (k, &s) in ris.start_index().iter().enumerate() {
            signed[s] = Some(taus[k] as f64);
        }
        let corr = interval_return_correlation(&ris, &aligned(signed)).unwrap();
        assert!((corr.c - 1.0).abs() < 1e-12);
        assert_eq!(corr.n_pairs, 40);
    }

    #[test]
    fn affine_anticorrelation_is_minus_one() {
        let taus: Vec<u32> = (1..=40).collect();
        let ris = ris_with_taus(&taus);
        let axis = ris.start_index().last().unwrap() + *ris.tau().last().unwrap() as usize + 1;
        let mut signed = vec![None; axis];
        for (k, &s) in ris.start_index().iter().enumerate() {
            // |r| = -2 tau + 100 > 0, decreasing in tau.
            signed[s] = Some(100.0 - 2.0 * taus[k] as f64);
        }
        let corr = interval_return_correlation(&ris, &aligned(signed)).unwrap();
        assert!((corr.c + 1.0).abs() < 1e-12);
    }

    #[test]
    fn correlation_is_scale_invariant() {
        let taus: Vec<u32> = (0..50).map(|i| 1 + (i * 37) % 11).collect();
        let ris = ris_with_taus(&taus);
        let axis = ris.start_index().last().unwrap() + *ris.tau().last().unwrap() as usize + 1;
        let mut signed = vec![None; axis];
        for (k, &s) in ris.start_index().iter().enumerate() {
            signed[s] = Some(((k * 13) % 7) as f64 + 0.5);
        }
        let scaled: Vec<Option<f64>> = signed.iter().map(|o| o.map(|x| x * 42.0)).collect();
        let c1 = interval_return_correlation(&ris, &aligned(signed)).unwrap();
        let c2 = interval_return_correlation(&ris, &aligned(scaled)).unwrap();
        assert!((c1.c - c2.c).abs() < 1e-12);
    }

    #[test]
    fn too_few_pairs_is_an_error() {
        let taus: Vec<u32> = (1..=10).collect();
        let ris = ris_with_taus(&taus);
        let mut signed = vec![None; 100];
        for &s in ris.start_index() {
            signed[s] = Some(1.0 + s as f64);
        }
        assert!(interval_return_correlation(&ris, &aligned(signed)).is_err());
    }

    #[test]
    fn independent_margins_have_negligible_correlation() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(51, 0);
        let n = 400_000;
        let raw: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 2.0).exp()).collect();
        let v = NormalizedSeries::from_values(raw, SeriesSource::Volume).unwrap();
        let signed: Vec<Option<f64>> = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                Some(u - 0.5)
            })
            .collect();
        let r = aligned(signed);
        let ris = v.recurrence_intervals(2.0).unwrap();
        let corr = interval_return_correlation(&ris, &r).unwrap();
        let bound = 3.0 / (corr.n_pairs as f64).sqrt();
        assert!(
            corr.c.abs() < bound,
            "independent c = {} exceeds {bound} over {} pairs",
            corr.c,
            corr.n_pairs
        );
    }

    #[test]
    fn comovement_grid_properties() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(52, 0);
        let n = 200_000;
        let raw: Vec<f64> = (0..n).map(|_| (rng.random::<f64>() * 2.0).exp()).collect();
        let v = NormalizedSeries::from_values(raw, SeriesSource::Volume).unwrap();
        let signed: Vec<Option<f64>> = (0..n).map(|_| Some(rng.random::<f64>() - 0.5)).collect();
        let r = aligned(signed);

        let grid = [0.0, 0.5, 1.0, 2.0, 1e9];
        let co = comovement_probability(&v, &r, 2.0, &grid).unwrap();
        assert_eq!(co.points[0].p, 1.0);
        assert_eq!(co.points.last().unwrap().p, 0.0);
        for w in co.points.windows(2) {
            assert!(w[1].p <= w[0].p, "P must not increase with Q");
        }
        assert_eq!(co.n_used, co.n_intervals); // every minute has a return here

        // Independence: P(Q) matches the squared marginal exceedance rate.
        let marginal = |thr: f64| {
            r.abs_iter().filter(|&(_, m)| m > thr).count() as f64 / r.defined_count() as f64
        };
        for &thr in &grid[1..3] {
            let expected = marginal(thr).powi(2);
            let p = co.points.iter().find(|pt| pt.threshold == thr).unwrap().p;
            let se = (expected * (1.0 - expected) / co.n_used as f64).sqrt();
            assert!(
                (p - expected).abs() < 4.0 * se.max(1e-4),
                "P({thr}) = {p} vs independent {expected}"
            );
        }
    }

    #[test]
    fn undefined_endpoints_shrink_the_denominator() {
        // Volume exceedances at minutes 0, 2, 4; returns undefined at minute 0.
        let raw = vec![5.0, 0.1, 5.0, 0.1, 5.0, 0.1];
        let v = NormalizedSeries::from_values(raw, SeriesSource::Volume).unwrap();
        let signed = vec![None, Some(0.4), Some(0.6), Some(0.2), Some(0.9), Some(0.1)];
        let r = aligned(signed);
        let co = comovement_probability(&v, &r, 1.0, &[0.0]).unwrap();
        assert_eq!(co.n_intervals, 2);
        // The interval opening at minute 0 is dropped; (2, 4) survives.
        assert_eq!(co.n_used, 1);
        assert_eq!(co.points[0].p, 1.0);
    }

    #[test]
    fn default_grid_shape() {
        let signed: Vec<Option<f64>> = (0..10_000)
            .map(|i| Some(((i % 997) as f64 / 997.0 - 0.5) * 6.0))
            .collect();
        let r = aligned(signed);
        let grid = default_return_threshold_grid(&r);
        assert_eq!(grid.len(), 41);
        assert_eq!(grid[0], 0.0);
        assert!((grid[1] - 0.1).abs() < 1e-12);
        assert!(grid.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn trace_averages_planted_elevation() {
        use rand::Rng;
        let mut rng = crate::rng::stream_rng(53, 0);
        let n = 60_000;
        let horizon = 240;
        let plant = 120usize;
        let elevation = 2.0;
        // Base noise, then a planted post-trigger elevation of known size.
        let mut raw: Vec<f64> = (0..n).map(|_| (rng.random::<f64>()).exp()).collect();
        let mut signed: Vec<Option<f64>> = vec![Some(0.0); n];
        let mut t = 500usize;
        let mut events = 0;
        while t + horizon + 1 < n {
            signed[t] = Some(10.0);
            for k in 1..=plant {
                raw[t + k] += elevation;
            }
            events += 1;
            t += horizon + 137;
        }
        assert!(events > 100);
        let v = NormalizedSeries::from_values(raw.clone(), SeriesSource::Volume).unwrap();
        // from_values rescales by the population sd; recover it to predict the
        // planted elevation in normalized units.
        let sd = raw[0] / v.values()[0];
        let r = aligned(signed);
        let trace =
            conditioned_volume_trace(&v, &r, 5.0, horizon, TraceMode::Average, TriggerOn::Signed)
                .unwrap();
        assert_eq!(trace.len(), horizon);
        let early: f64 = trace[..plant].iter().map(|&(_, m)| m).sum::<f64>() / plant as f64;
        let late: f64 =
            trace[plant..].iter().map(|&(_, m)| m).sum::<f64>() / (horizon - plant) as f64;
        let expected = elevation / sd;
        assert!(
            ((early - late) - expected).abs() < 0.1 * expected.max(1.0),
            "elevation {} vs expected {expected}",
            early - late
        );
    }

    #[test]
    fn trace_single_event_mode() {
        let raw = vec![1.0, 2.0, 3.0, 4.0, 1.0, 2.0, 3.0, 4.0];
        let v = NormalizedSeries::from_values(raw, SeriesSource::Volume).unwrap();
        let signed = vec![
            Some(9.0),
            Some(0.0),
            Some(0.0),
            Some(0.0),
            Some(9.0),
            None,
            None,
            None,
        ];
        let r = aligned(signed);
        // After sd-normalization the 9.0 entries sit near 2, so trigger at 1.
        let avg = conditioned_volume_trace(&v, &r, 1.0, 3, TraceMode::Average, TriggerOn::Signed)
            .unwrap();
        let single =
            conditioned_volume_trace(&v, &r, 1.0, 3, TraceMode::Single(0), TriggerOn::Signed)
                .unwrap();
        // Both events see the same post-trigger pattern, so they agree.
        for (a, s) in avg.iter().zip(&single) {
            assert!((a.1 - s.1).abs() < 1e-12);
        }
        assert!(
            conditioned_volume_trace(&v, &r, 1.0, 3, TraceMode::Single(2), TriggerOn::Signed)
                .is_err()
        );
    }

    #[test]
    fn trace_without_events_reports_the_maximum() {
        let raw = vec![1.0, 2.0, 1.0, 2.0];
        let v = NormalizedSeries::from_values(raw, SeriesSource::Volume).unwrap();
        let r = aligned(vec![Some(0.1), Some(0.3), Some(0.2), Some(0.05)]);
        match conditioned_volume_trace(&v, &r, 50.0, 2, TraceMode::Average, TriggerOn::Signed)
            .unwrap_err()
        {
            Error::NoTriggerEvents {
                trigger,
                max_observed,
            } => {
                assert_eq!(trigger, 50.0);
                assert!(max_observed > 0.0 && max_observed < 50.0);
            }
            other => panic!("unexpected error {other}"),
        }
    }
}
