//! Recurrence-interval analysis of threshold-exceeding events in
//! minute-sampled market data.
//!
//! The pipeline: parse minute bars on an explicit session calendar
//! ([`ingest`]), remove the intraday pattern and normalize ([`preprocess`]),
//! extract recurrence intervals between threshold exceedances and probe their
//! short-term memory ([`intervals`]), fit the pooled scaled-interval tail with
//! a KS-minimized power law ([`tailfit`]), test the fit with bootstrap KS /
//! weighted-KS p-values and the Cramér-von Mises statistic ([`gof`]), measure
//! long-term memory by detrended fluctuation analysis with a shuffle control
//! ([`dfa`]), and relate volume intervals to price returns ([`coupling`]).
//! [`synth`] provides the deterministic generators the statistical tests are
//! calibrated against, and [`report`] assembles everything into a
//! reproducible file bundle.
//!
//! Every capability has a runnable example under `examples/`; the `riat`
//! binary exposes the same operations as subcommands.

pub mod calendar;
pub mod config;
pub mod coupling;
pub mod dfa;
pub mod error;
pub mod gof;
pub mod ingest;
pub mod intervals;
pub mod pdf;
pub mod preprocess;
pub mod report;
pub mod rng;
pub mod synth;
pub mod tailfit;

pub use calendar::{Date, Session, SessionCalendar, TimeOfDay};
pub use config::{KeyValues, RunConfig};
pub use coupling::{
    comovement_probability, conditioned_volume_trace, coupling_report, interval_return_correlation,
};
pub use dfa::{default_scales, dfa, interval_memory_report, shuffle, DfaResult};
pub use error::{Error, Result};
pub use gof::{
    bootstrap_pvalue, cvm_statistic, gof_report, ksw_distance, GofReport, TailStatistic,
};
pub use ingest::{load_minute_bars, to_returns, IngestConfig, MinuteBarSeries, ReturnSeries};
pub use intervals::{
    conditional_pdf, extract_intervals, mean_conditional_interval, RecurrenceIntervalSeries,
};
pub use preprocess::{
    align_returns, deseasonalize, intraday_profile, normalize, normalize_returns,
    normalized_volumes, AlignedReturns, IntradayProfile, NormalizedSeries, SeriesSource,
};
pub use report::{run_full_report, ReportBundle, TableRow};
pub use synth::{market_like, GeneratorSpec, MarketSpec};
pub use tailfit::{
    fit_tail, fit_tail_at, ks_distance, mle_delta, pooled_scaled_sample, PowerLawFit,
};
