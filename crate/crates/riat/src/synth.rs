//! Deterministic synthetic-data generators.
//!
//! These are the ground-truth oracles behind the statistical test suite: iid
//! noise, Pareto tails with known exponent, spliced body+tail samples,
//! long-memory Gaussian noise, and a market-like minute-bar dataset that
//! exercises the whole pipeline. Every generator is a pure function of its
//! spec; the same seed reproduces the same bytes.

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use crate::calendar::{Date, SessionCalendar};
use crate::config::KeyValues;
use crate::error::{Error, Result};
use crate::ingest::MinuteBarSeries;
use crate::rng::{stream_rng, streams};

/// Standard-normal iid series.
pub fn iid_normal(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, streams::SERIES);
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Lognormal iid series: `exp(sigma_ln * z)` with standard-normal `z`.
pub fn iid_lognormal(n: usize, sigma_ln: f64, seed: u64) -> Vec<f64> {
    let mut rng = stream_rng(seed, streams::SERIES);
    (0..n)
        .map(|_| (sigma_ln * rng.sample::<f64, _>(StandardNormal)).exp())
        .collect()
}

/// Inverse CDF of the Pareto power law with density `(delta-1)/x_min * (x/x_min)^(-delta)`.
///
/// `u` is the CDF value: `u = 0` maps to `x_min`, `u -> 1` runs up the tail.
pub fn pareto_quantile(u: f64, delta: f64, x_min: f64) -> f64 {
    x_min * (1.0 - u).powf(-1.0 / (delta - 1.0))
}

/// Pareto sample with tail exponent `delta > 1` and lower bound `x_min > 0`.
pub fn pareto(n: usize, delta: f64, x_min: f64, seed: u64) -> Result<Vec<f64>> {
    if !(delta > 1.0) || !(x_min > 0.0) {
        return Err(Error::Stats(format!(
            "pareto requires delta > 1 and x_min > 0, got delta={delta}, x_min={x_min}"
        )));
    }
    let mut rng = stream_rng(seed, streams::SERIES);
    Ok((0..n)
        .map(|_| pareto_quantile(rng.random::<f64>(), delta, x_min))
        .collect())
}

/// Probability mass of the Pareto tail in a spliced sample: the exponential
/// tail mass beyond the splice point.
pub fn spliced_tail_mass(splice: f64) -> f64 {
    (-splice).exp()
}

/// Unit-exponential body with the tail beyond `splice` replaced by a Pareto
/// law with exponent `delta` and lower bound `splice`. The CDF is continuous
/// at the splice but the density is not, so a tail fit should localize the
/// splice point.
pub fn spliced(n: usize, splice: f64, delta: f64, seed: u64) -> Result<Vec<f64>> {
    if !(splice > 0.0) || !(delta > 1.0) {
        return Err(Error::Stats(format!(
            "spliced requires splice > 0 and delta > 1, got splice={splice}, delta={delta}"
        )));
    }
    let p_tail = spliced_tail_mass(splice);
    let mut rng = stream_rng(seed, streams::SERIES);
    Ok((0..n)
        .map(|_| {
            let branch: f64 = rng.random();
            let u: f64 = rng.random();
            if branch < p_tail {
                pareto_quantile(u, delta, splice)
            } else {
                // Exponential conditioned below the splice.
                -(1.0 - u * (1.0 - p_tail)).ln()
            }
        })
        .collect())
}

/// Gaussian noise with power spectrum `S(f) ~ f^(1-2H)`, i.e. an approximation
/// to fractional Gaussian noise with Hurst exponent `H`, built by filtering
/// white noise in the frequency domain. Output has zero mean and unit variance.
///
/// `H = 0.5` reduces to white Gaussian noise.
pub fn fgn(n: usize, hurst: f64, seed: u64) -> Result<Vec<f64>> {
    fgn_with_stream(n, hurst, seed, streams::SERIES)
}

/// Parameters of the market-like minute-bar generator.
#[derive(Debug, Clone)]
pub struct MarketSpec {
    pub days: usize,
    pub calendar: SessionCalendar,
    /// Hurst exponent of the latent volume noise.
    pub hurst: f64,
    /// Lognormal log-scale of the volume noise.
    pub vol_sigma: f64,
    /// Per-minute log-return standard deviation of the price walk.
    pub ret_sigma: f64,
    pub base_volume: f64,
    pub start_price: f64,
    /// Relative depth of the U-shaped intraday profile; 0 gives a flat profile.
    pub profile_amplitude: f64,
    pub start_date: Date,
    pub seed: u64,
}

impl Default for MarketSpec {
    fn default() -> Self {
        MarketSpec {
            days: 60,
            calendar: SessionCalendar::cn_two_session(),
            hurst: 0.85,
            vol_sigma: 1.2,
            ret_sigma: 1.5e-3,
            base_volume: 10_000.0,
            start_price: 100.0,
            profile_amplitude: 3.0,
            start_date: Date::new(2024, 1, 2).unwrap(),
            seed: 1,
        }
    }
}

/// Minute-bar dataset with a U-shaped intraday volume profile, lognormal
/// volume noise driven by a long-memory latent, and a random-walk price.
pub fn market_like(spec: &MarketSpec) -> Result<MinuteBarSeries> {
    if spec.days == 0 {
        return Err(Error::Stats("market_like requires at least one day".into()));
    }
    if !(spec.base_volume > 0.0) || !(spec.start_price > 0.0) || spec.profile_amplitude < 0.0 {
        return Err(Error::Stats(
            "market_like spec has non-positive scales".into(),
        ));
    }
    let mpd = spec.calendar.minutes_per_day();
    let total = spec.days * mpd;
    let latent = fgn_with_stream(total, spec.hurst, spec.seed, streams::MARKET_FGN)?;

    // Mean-one lognormal multiplier on top of the deterministic profile.
    let drift = spec.vol_sigma * spec.vol_sigma / 2.0;
    let mid = (mpd as f64 - 1.0) / 2.0;
    let profile: Vec<f64> = (0..mpd)
        .map(|s| {
            let u = (s as f64 - mid) / mid;
            spec.base_volume * (1.0 + spec.profile_amplitude * u * u)
        })
        .collect();

    let mut price_rng = stream_rng(spec.seed, streams::MARKET_PRICE);
    let mut log_price = spec.start_price.ln();

    let mut dates = Vec::with_capacity(spec.days);
    let mut date = spec.start_date;
    while date.is_weekend() {
        date = date.succ();
    }
    for _ in 0..spec.days {
        dates.push(date);
        date = date.succ();
        while date.is_weekend() {
            date = date.succ();
        }
    }

    let mut volume = Vec::with_capacity(spec.days);
    let mut price = Vec::with_capacity(spec.days);
    for d in 0..spec.days {
        let mut vol_day = Vec::with_capacity(mpd);
        let mut price_day = Vec::with_capacity(mpd);
        for s in 0..mpd {
            let t = d * mpd + s;
            vol_day.push(profile[s] * (spec.vol_sigma * latent[t] - drift).exp());
            let eps: f64 = price_rng.sample(StandardNormal);
            log_price += spec.ret_sigma * eps;
            price_day.push(log_price.exp());
        }
        volume.push(vol_day);
        price.push(price_day);
    }

    MinuteBarSeries::new(dates, price, volume, spec.calendar.clone())
}

// The stream argument keeps the market generator's noise sources independent
// of standalone series generation under the same seed.
fn fgn_with_stream(n: usize, hurst: f64, seed: u64, stream: u64) -> Result<Vec<f64>> {
    if !(0.0 < hurst && hurst < 1.0) {
        return Err(Error::Stats(format!(
            "hurst exponent must lie in (0, 1), got {hurst}"
        )));
    }
    if n < 8 {
        return Err(Error::Stats(format!("fgn length {n} too short")));
    }
    let beta = 2.0 * hurst - 1.0;
    let mut rng = stream_rng(seed, stream);
    let mut spectrum = vec![Complex::new(0.0, 0.0); n];
    let half = n / 2;
    for k in 1..half {
        let amp = (k as f64).powf(-beta / 2.0);
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        let c = Complex::new(re, im) * (amp / std::f64::consts::SQRT_2);
        spectrum[k] = c;
        spectrum[n - k] = c.conj();
    }
    if n % 2 == 0 && half >= 1 {
        let amp = (half as f64).powf(-beta / 2.0);
        let re: f64 = rng.sample(StandardNormal);
        spectrum[half] = Complex::new(amp * re, 0.0);
    }
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut spectrum);
    let mut series: Vec<f64> = spectrum.iter().map(|c| c.re).collect();
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if var == 0.0 {
        return Err(Error::ZeroVariance(
            "fgn synthesis produced a flat series".into(),
        ));
    }
    let sd = var.sqrt();
    for x in &mut series {
        *x = (*x - mean) / sd;
    }
    Ok(series)
}

/// A parsed generator spec, as read from a key-value spec file.
#[derive(Debug, Clone)]
pub enum GeneratorSpec {
    IidNormal {
        n: usize,
        seed: u64,
    },
    IidLognormal {
        n: usize,
        sigma_ln: f64,
        seed: u64,
    },
    Pareto {
        n: usize,
        delta: f64,
        x_min: f64,
        seed: u64,
    },
    Spliced {
        n: usize,
        splice: f64,
        delta: f64,
        seed: u64,
    },
    Fgn {
        n: usize,
        hurst: f64,
        seed: u64,
    },
    MarketLike(MarketSpec),
}

/// Output of [`generate`]: either a scalar series or a minute-bar dataset.
#[derive(Debug, Clone)]
pub enum Generated {
    Series(Vec<f64>),
    Bars(MinuteBarSeries),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    Ok(match spec {
        GeneratorSpec::IidNormal { n, seed } => Generated::Series(iid_normal(*n, *seed)),
        GeneratorSpec::IidLognormal { n, sigma_ln, seed } => {
            Generated::Series(iid_lognormal(*n, *sigma_ln, *seed))
        }
        GeneratorSpec::Pareto {
            n,
            delta,
            x_min,
            seed,
        } => Generated::Series(pareto(*n, *delta, *x_min, *seed)?),
        GeneratorSpec::Spliced {
            n,
            splice,
            delta,
            seed,
        } => Generated::Series(spliced(*n, *splice, *delta, *seed)?),
        GeneratorSpec::Fgn { n, hurst, seed } => Generated::Series(fgn(*n, *hurst, *seed)?),
        GeneratorSpec::MarketLike(m) => Generated::Bars(market_like(m)?),
    })
}

impl GeneratorSpec {
    /// Parse a spec from a key-value file body. `kind` selects the generator;
    /// the remaining keys are kind-specific with sensible defaults.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let kind = kv
            .get("kind")
            .ok_or_else(|| Error::Config("generator spec missing `kind`".into()))?;
        let seed = kv.parse_or("seed", 1u64)?;
        let n = kv.parse_or("n", 65_536usize)?;
        match kind {
            "iid-normal" => Ok(GeneratorSpec::IidNormal { n, seed }),
            "iid-lognormal" => Ok(GeneratorSpec::IidLognormal {
                n,
                sigma_ln: kv.parse_or("sigma_ln", 1.0f64)?,
                seed,
            }),
            "pareto" => Ok(GeneratorSpec::Pareto {
                n,
                delta: kv.parse_or("delta", 2.5f64)?,
                x_min: kv.parse_or("x_min", 1.0f64)?,
                seed,
            }),
            "spliced" => Ok(GeneratorSpec::Spliced {
                n,
                splice: kv.parse_or("splice", 3.0f64)?,
                delta: kv.parse_or("delta", 2.5f64)?,
                seed,
            }),
            "fgn" => Ok(GeneratorSpec::Fgn {
                n,
                hurst: kv.parse_or("hurst", 0.8f64)?,
                seed,
            }),
            "market-like" => {
                let mut spec = MarketSpec {
                    seed,
                    ..MarketSpec::default()
                };
                spec.days = kv.parse_or("days", spec.days)?;
                spec.hurst = kv.parse_or("hurst", spec.hurst)?;
                spec.vol_sigma = kv.parse_or("vol_sigma", spec.vol_sigma)?;
                spec.ret_sigma = kv.parse_or("ret_sigma", spec.ret_sigma)?;
                spec.base_volume = kv.parse_or("base_volume", spec.base_volume)?;
                spec.start_price = kv.parse_or("start_price", spec.start_price)?;
                spec.profile_amplitude =
                    kv.parse_or("profile_amplitude", spec.profile_amplitude)?;
                if let Some(d) = kv.get("start_date") {
                    spec.start_date = d.parse()?;
                }
                let sessions = kv.sessions()?;
                if let Some(cal) = sessions {
                    spec.calendar = cal;
                }
                Ok(GeneratorSpec::MarketLike(spec))
            }
            other => Err(Error::Config(format!("unknown generator kind {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pareto_quantile_closed_form() {
        // delta = 2, x_min = 1: x = 1/(1-u)
        assert!((pareto_quantile(0.75, 2.0, 1.0) - 4.0).abs() < 1e-12);
        assert!((pareto_quantile(0.0, 2.0, 1.0) - 1.0).abs() < 1e-12);
        // delta = 3, x_min = 2: x = 2/sqrt(1-u)
        assert!((pareto_quantile(0.75, 3.0, 2.0) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn generators_are_reproducible() {
        assert_eq!(iid_normal(100, 9), iid_normal(100, 9));
        assert_eq!(
            pareto(100, 2.5, 1.0, 9).unwrap(),
            pareto(100, 2.5, 1.0, 9).unwrap()
        );
        assert_eq!(fgn(256, 0.8, 9).unwrap(), fgn(256, 0.8, 9).unwrap());
        let m = MarketSpec {
            days: 2,
            ..MarketSpec::default()
        };
        let a = market_like(&m).unwrap();
        let b = market_like(&m).unwrap();
        assert_eq!(a.volume_grid(), b.volume_grid());
        assert_eq!(a.price_grid(), b.price_grid());
    }

    #[test]
    fn seeds_change_output() {
        assert_ne!(iid_normal(64, 1), iid_normal(64, 2));
    }

    #[test]
    fn white_noise_limit_of_fgn() {
        // H = 0.5 must be serially uncorrelated.
        let n = 1 << 15;
        let x = fgn(n, 0.5, 3).unwrap();
        let mean = x.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 1e-9);
        let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        assert!((var - 1.0).abs() < 1e-9);
        let lag1: f64 = x.windows(2).map(|w| w[0] * w[1]).sum::<f64>() / (n - 1) as f64;
        assert!(
            lag1.abs() < 3.0 / (n as f64).sqrt(),
            "lag-1 autocorrelation {lag1} too large for white noise"
        );
    }

    #[test]
    fn pareto_sample_stays_above_x_min() {
        let xs = pareto(10_000, 2.5, 1.5, 11).unwrap();
        assert!(xs.iter().all(|&x| x >= 1.5));
        assert!(xs.iter().all(|&x| x.is_finite()));
    }

    #[test]
    fn spliced_tail_is_pareto_above_splice() {
        let xs = spliced(50_000, 3.0, 2.5, 13).unwrap();
        assert!(xs.iter().all(|&x| x >= 0.0 && x.is_finite()));
        let tail_frac = xs.iter().filter(|&&x| x >= 3.0).count() as f64 / xs.len() as f64;
        let expected = spliced_tail_mass(3.0);
        assert!(
            (tail_frac - expected).abs() < 0.005,
            "tail mass {tail_frac} vs expected {expected}"
        );
        // The tail beyond the splice recovers the Pareto exponent.
        let tail: Vec<f64> = xs.iter().copied().filter(|&x| x >= 3.0).collect();
        let (delta, se) = crate::tailfit::mle_delta(&tail, 3.0).unwrap();
        assert!(
            (delta - 2.5).abs() < 3.0 * se,
            "tail exponent {delta} +- {se} vs 2.5"
        );
    }

    #[test]
    fn flat_profile_option_recovers_constant_pattern() {
        // With the U-shape switched off and mild noise, the estimated
        // intraday profile is constant to within a couple percent.
        let spec = MarketSpec {
            days: 200,
            vol_sigma: 0.05,
            profile_amplitude: 0.0,
            seed: 14,
            ..MarketSpec::default()
        };
        let bars = market_like(&spec).unwrap();
        let profile = crate::preprocess::intraday_profile(bars.volume_grid()).unwrap();
        let mean = profile.values().iter().sum::<f64>() / profile.len() as f64;
        for (s, &a) in profile.values().iter().enumerate() {
            assert!(
                (a / mean - 1.0).abs() < 0.02,
                "profile at minute {s} deviates: {a} vs mean {mean}"
            );
        }
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(pareto(10, 1.0, 1.0, 0).is_err());
        assert!(pareto(10, 2.0, 0.0, 0).is_err());
        assert!(fgn(100, 1.0, 0).is_err());
        assert!(fgn(100, 0.0, 0).is_err());
        assert!(spliced(10, -1.0, 2.0, 0).is_err());
    }
}
