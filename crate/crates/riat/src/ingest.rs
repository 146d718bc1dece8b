//! Minute-bar ingestion.
//!
//! Parses delimiter-separated minute data (`date,time,price,volume` by
//! default) into a [`MinuteBarSeries`] indexed by trading-minute slots of an
//! explicit [`SessionCalendar`]. Rows outside the declared sessions are
//! skipped with a warning; days with missing minutes are handled per
//! [`MissingMinutePolicy`] (default: drop the day and record a warning, since
//! the intraday profile needs a complete grid).

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::calendar::{Date, SessionCalendar, TimeOfDay};
use crate::error::{Error, Result};

/// Column names as they appear in the input header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnNames {
    pub date: String,
    pub time: String,
    pub price: String,
    pub volume: String,
}

impl Default for ColumnNames {
    fn default() -> Self {
        ColumnNames {
            date: "date".into(),
            time: "time".into(),
            price: "price".into(),
            volume: "volume".into(),
        }
    }
}

/// What to do with a day whose minute grid is incomplete.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingMinutePolicy {
    /// Drop the whole day and record a warning.
    #[default]
    Drop,
    /// Forward-fill the price, set volume to zero.
    ForwardFill,
    /// Fail with a validation error.
    Strict,
}

#[derive(Debug, Clone)]
pub struct IngestConfig {
    pub delimiter: char,
    pub columns: ColumnNames,
    pub calendar: SessionCalendar,
    pub missing_policy: MissingMinutePolicy,
}

impl Default for IngestConfig {
    fn default() -> Self {
        IngestConfig {
            delimiter: ',',
            columns: ColumnNames::default(),
            calendar: SessionCalendar::cn_two_session(),
            missing_policy: MissingMinutePolicy::default(),
        }
    }
}

/// Per-day, per-minute prices and volumes on a complete session grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MinuteBarSeries {
    days: Vec<Date>,
    price: Vec<Vec<f64>>,
    volume: Vec<Vec<f64>>,
    calendar: SessionCalendar,
}

impl MinuteBarSeries {
    pub fn new(
        days: Vec<Date>,
        price: Vec<Vec<f64>>,
        volume: Vec<Vec<f64>>,
        calendar: SessionCalendar,
    ) -> Result<Self> {
        if days.is_empty() {
            return Err(Error::Validation("series has no days".into()));
        }
        if days.len() != price.len() || days.len() != volume.len() {
            return Err(Error::Validation(format!(
                "day count mismatch: {} dates, {} price days, {} volume days",
                days.len(),
                price.len(),
                volume.len()
            )));
        }
        let mpd = calendar.minutes_per_day();
        for (i, day) in days.iter().enumerate() {
            if price[i].len() != mpd || volume[i].len() != mpd {
                return Err(Error::Validation(format!(
                    "day {day} has {} price / {} volume minutes, expected {mpd}",
                    price[i].len(),
                    volume[i].len()
                )));
            }
            if let Some(s) = price[i].iter().position(|p| !(p.is_finite() && *p > 0.0)) {
                return Err(Error::Validation(format!(
                    "day {day} minute {s}: price {} is not strictly positive",
                    price[i][s]
                )));
            }
            if let Some(s) = volume[i].iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::Validation(format!(
                    "day {day} minute {s}: volume {} is negative or non-finite",
                    volume[i][s]
                )));
            }
        }
        for pair in days.windows(2) {
            if pair[0] >= pair[1] {
                return Err(Error::Validation(format!(
                    "days out of order: {} then {}",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(MinuteBarSeries {
            days,
            price,
            volume,
            calendar,
        })
    }

    pub fn days(&self) -> &[Date] {
        &self.days
    }

    pub fn n_days(&self) -> usize {
        self.days.len()
    }

    pub fn minutes_per_day(&self) -> usize {
        self.calendar.minutes_per_day()
    }

    pub fn calendar(&self) -> &SessionCalendar {
        &self.calendar
    }

    pub fn price_grid(&self) -> &[Vec<f64>] {
        &self.price
    }

    pub fn volume_grid(&self) -> &[Vec<f64>] {
        &self.volume
    }

    /// Serialize to the canonical CSV layout (`date,time,price,volume` header,
    /// one row per minute, day-major order). Reloading the output with the
    /// same calendar reproduces the series exactly.
    pub fn write_csv(&self, path: &Path, delimiter: char) -> Result<()> {
        let mut out = String::new();
        let d = delimiter;
        let _ = writeln!(out, "date{d}time{d}price{d}volume");
        for (i, day) in self.days.iter().enumerate() {
            for s in 0..self.minutes_per_day() {
                let t = self.calendar.time_of_slot(s);
                let _ = writeln!(
                    out,
                    "{day}{d}{t}{d}{}{d}{}",
                    self.price[i][s], self.volume[i][s]
                );
            }
        }
        std::fs::write(path, out).map_err(|e| Error::io(format!("writing {}", path.display()), e))
    }
}

/// A loaded series plus any non-fatal findings from ingestion.
#[derive(Debug)]
pub struct LoadedBars {
    pub series: MinuteBarSeries,
    pub warnings: Vec<String>,
}

/// Parse a minute-bar file into a validated series.
pub fn load_minute_bars(path: &Path, config: &IngestConfig) -> Result<LoadedBars> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
    load_minute_bars_str(&text, config, &path.display().to_string())
}

fn load_minute_bars_str(text: &str, config: &IngestConfig, origin: &str) -> Result<LoadedBars> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Validation(format!("{origin}: empty file")))?;

    let cols: Vec<&str> = header.split(config.delimiter).map(str::trim).collect();
    let find = |name: &str| -> Result<usize> {
        cols.iter().position(|c| *c == name).ok_or_else(|| {
            Error::Config(format!(
                "{origin}: header {header:?} has no column {name:?}"
            ))
        })
    };
    let c_date = find(&config.columns.date)?;
    let c_time = find(&config.columns.time)?;
    let c_price = find(&config.columns.price)?;
    let c_volume = find(&config.columns.volume)?;

    let mpd = config.calendar.minutes_per_day();
    let mut warnings = Vec::new();
    let mut by_day: BTreeMap<Date, Vec<Option<(f64, f64)>>> = BTreeMap::new();

    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(config.delimiter).map(str::trim).collect();
        let max_col = [c_date, c_time, c_price, c_volume]
            .into_iter()
            .max()
            .unwrap();
        if fields.len() <= max_col {
            return Err(Error::Parse {
                path: origin.into(),
                line: lineno,
                message: format!(
                    "expected at least {} fields, got {}",
                    max_col + 1,
                    fields.len()
                ),
            });
        }
        let parse_err = |message: String| Error::Parse {
            path: origin.into(),
            line: lineno,
            message,
        };
        let date: Date = fields[c_date]
            .parse()
            .map_err(|e| parse_err(format!("{e}")))?;
        let time: TimeOfDay = fields[c_time]
            .parse()
            .map_err(|e| parse_err(format!("{e}")))?;
        let price: f64 = fields[c_price]
            .parse()
            .map_err(|_| parse_err(format!("bad price {:?}", fields[c_price])))?;
        let volume: f64 = fields[c_volume]
            .parse()
            .map_err(|_| parse_err(format!("bad volume {:?}", fields[c_volume])))?;
        if !(price.is_finite() && price > 0.0) {
            return Err(parse_err(format!("price {price} is not strictly positive")));
        }
        if !(volume.is_finite() && volume >= 0.0) {
            return Err(parse_err(format!(
                "volume {volume} is negative or non-finite"
            )));
        }
        let Some(slot) = config.calendar.slot_of(time) else {
            warnings.push(format!(
                "{origin}:{lineno}: row at {date} {time} is outside the declared sessions; skipped"
            ));
            continue;
        };
        let day = by_day.entry(date).or_insert_with(|| vec![None; mpd]);
        if day[slot].is_some() {
            return Err(parse_err(format!("duplicate bar for {date} {time}")));
        }
        day[slot] = Some((price, volume));
    }

    if by_day.is_empty() {
        return Err(Error::Validation(format!("{origin}: no data rows")));
    }

    let mut days = Vec::new();
    let mut price = Vec::new();
    let mut volume = Vec::new();
    for (date, slots) in by_day {
        let missing = slots.iter().filter(|s| s.is_none()).count();
        if missing > 0 {
            match config.missing_policy {
                MissingMinutePolicy::Drop => {
                    warnings.push(format!(
                        "{origin}: day {date} dropped: {missing} missing minutes"
                    ));
                    continue;
                }
                MissingMinutePolicy::Strict => {
                    return Err(Error::Validation(format!(
                        "{origin}: day {date} has {missing} missing minutes"
                    )));
                }
                MissingMinutePolicy::ForwardFill => {
                    warnings.push(format!(
                        "{origin}: day {date}: {missing} missing minutes forward-filled"
                    ));
                }
            }
        }
        let mut p_day = Vec::with_capacity(mpd);
        let mut v_day = Vec::with_capacity(mpd);
        // Leading gaps borrow the first available price.
        let first_price = slots.iter().flatten().next().map(|(p, _)| *p);
        let mut last_price = first_price.ok_or_else(|| {
            Error::Validation(format!("{origin}: day {date} has no in-session rows"))
        })?;
        for slot in &slots {
            match slot {
                Some((p, v)) => {
                    last_price = *p;
                    p_day.push(*p);
                    v_day.push(*v);
                }
                None => {
                    p_day.push(last_price);
                    v_day.push(0.0);
                }
            }
        }
        days.push(date);
        price.push(p_day);
        volume.push(v_day);
    }

    if days.is_empty() {
        return Err(Error::Validation(format!(
            "{origin}: every day was dropped for missing minutes"
        )));
    }

    let series = MinuteBarSeries::new(days, price, volume, config.calendar.clone())?;
    Ok(LoadedBars { series, warnings })
}

/// Within-session log returns, compactly stored: each day carries
/// `minutes_per_day - session_count` values, one per minute that has a
/// preceding minute in the same session.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    days: Vec<Date>,
    values: Vec<Vec<f64>>,
    calendar: SessionCalendar,
}

impl ReturnSeries {
    pub fn days(&self) -> &[Date] {
        &self.days
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn calendar(&self) -> &SessionCalendar {
        &self.calendar
    }

    pub fn returns_per_day(&self) -> usize {
        self.calendar.minutes_per_day() - self.calendar.session_count()
    }

    /// Total number of returns across all days.
    pub fn len(&self) -> usize {
        self.values.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Log returns `ln p(t) - ln p(t-1)`, computed only within a session: no
/// return spans the midday break or an overnight gap.
pub fn to_returns(series: &MinuteBarSeries) -> Result<ReturnSeries> {
    let calendar = series.calendar().clone();
    let mpd = calendar.minutes_per_day();
    let mut values = Vec::with_capacity(series.n_days());
    for (i, day) in series.days().iter().enumerate() {
        let prices = &series.price_grid()[i];
        let mut day_returns = Vec::with_capacity(mpd - calendar.session_count());
        for s in 0..mpd {
            if calendar.is_session_start(s) {
                continue;
            }
            let (prev, cur) = (prices[s - 1], prices[s]);
            if !(prev > 0.0 && cur > 0.0) {
                return Err(Error::Validation(format!(
                    "day {day} minute {s}: non-positive price in return computation"
                )));
            }
            day_returns.push(cur.ln() - prev.ln());
        }
        values.push(day_returns);
    }
    Ok(ReturnSeries {
        days: series.days().to_vec(),
        values,
        calendar,
    })
}
