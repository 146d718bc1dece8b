//! Trading-session calendar and the small date/time types it needs.
//!
//! All downstream analysis indexes by *trading minute*: minute slot `s` of a
//! session day, concatenated across days. The calendar owns the mapping
//! between wall-clock times and slot indices. A session `[open, close)`
//! contributes `close - open` one-minute slots, so the default Chinese
//! two-session day (09:30-11:30, 13:00-15:00) has 240 slots.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Calendar date, ordered, parsed from `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

impl Date {
    pub fn new(year: i32, month: u8, day: u8) -> Result<Self> {
        if !(1..=12).contains(&month) || !(1..=31).contains(&day) {
            return Err(Error::Validation(format!(
                "invalid date {year:04}-{month:02}-{day:02}"
            )));
        }
        Ok(Date { year, month, day })
    }

    /// Days since 1970-01-01 (civil calendar, Howard Hinnant's algorithm).
    pub fn to_ordinal(self) -> i64 {
        let y = if self.month <= 2 {
            self.year as i64 - 1
        } else {
            self.year as i64
        };
        let era = if y >= 0 { y } else { y - 399 } / 400;
        let yoe = y - era * 400;
        let m = self.month as i64;
        let d = self.day as i64;
        let doy = (153 * (if m > 2 { m - 3 } else { m + 9 }) + 2) / 5 + d - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }

    pub fn from_ordinal(ordinal: i64) -> Self {
        let z = ordinal + 719_468;
        let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
        let doe = z - era * 146_097;
        let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146_096) / 365;
        let y = yoe + era * 400;
        let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
        let mp = (5 * doy + 2) / 153;
        let d = (doy - (153 * mp + 2) / 5 + 1) as u8;
        let m = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
        let y = if m <= 2 { y + 1 } else { y };
        Date {
            year: y as i32,
            month: m,
            day: d,
        }
    }

    /// 0 = Monday ... 6 = Sunday.
    pub fn weekday(self) -> u8 {
        // 1970-01-01 was a Thursday.
        ((self.to_ordinal() + 3).rem_euclid(7)) as u8
    }

    pub fn is_weekend(self) -> bool {
        self.weekday() >= 5
    }

    pub fn succ(self) -> Self {
        Date::from_ordinal(self.to_ordinal() + 1)
    }
}

impl FromStr for Date {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, '-');
        let bad = || Error::Validation(format!("invalid date {s:?}, expected YYYY-MM-DD"));
        let year = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let month = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let day = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        Date::new(year, month, day)
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

/// Wall-clock minute of day, parsed from `HH:MM` (seconds tolerated and ignored).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TimeOfDay {
    minutes: u16,
}

impl TimeOfDay {
    pub fn new(hour: u8, minute: u8) -> Result<Self> {
        if hour >= 24 || minute >= 60 {
            return Err(Error::Validation(format!(
                "invalid time {hour:02}:{minute:02}"
            )));
        }
        Ok(TimeOfDay {
            minutes: hour as u16 * 60 + minute as u16,
        })
    }

    pub fn minutes_since_midnight(self) -> u16 {
        self.minutes
    }

    pub fn plus_minutes(self, n: u16) -> Self {
        TimeOfDay {
            minutes: self.minutes + n,
        }
    }
}

impl FromStr for TimeOfDay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Validation(format!("invalid time {s:?}, expected HH:MM"));
        let mut parts = s.splitn(3, ':');
        let hour = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let minute = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        TimeOfDay::new(hour, minute)
    }
}

impl fmt::Display for TimeOfDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:02}:{:02}", self.minutes / 60, self.minutes % 60)
    }
}

/// One trading session; a minute bar stamped `t` belongs to it iff `open <= t < close`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Session {
    pub open: TimeOfDay,
    pub close: TimeOfDay,
}

impl Session {
    pub fn slot_count(&self) -> usize {
        (self.close.minutes - self.open.minutes) as usize
    }

    pub fn contains(&self, t: TimeOfDay) -> bool {
        self.open <= t && t < self.close
    }
}

/// Ordered, non-overlapping intraday sessions shared by every day of a dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SessionCalendar {
    sessions: Vec<Session>,
    minutes_per_day: usize,
}

impl SessionCalendar {
    pub fn new(sessions: Vec<Session>) -> Result<Self> {
        if sessions.is_empty() {
            return Err(Error::Validation("calendar has no sessions".into()));
        }
        for s in &sessions {
            if s.open >= s.close {
                return Err(Error::Validation(format!(
                    "session {}-{} is empty or reversed",
                    s.open, s.close
                )));
            }
        }
        for pair in sessions.windows(2) {
            if pair[0].close > pair[1].open {
                return Err(Error::Validation(format!(
                    "sessions {}-{} and {}-{} overlap or are out of order",
                    pair[0].open, pair[0].close, pair[1].open, pair[1].close
                )));
            }
        }
        let minutes_per_day = sessions.iter().map(Session::slot_count).sum();
        Ok(SessionCalendar {
            sessions,
            minutes_per_day,
        })
    }

    /// The Shanghai/Shenzhen two-session day: 09:30-11:30 and 13:00-15:00.
    pub fn cn_two_session() -> Self {
        let s1 = Session {
            open: "09:30".parse().unwrap(),
            close: "11:30".parse().unwrap(),
        };
        let s2 = Session {
            open: "13:00".parse().unwrap(),
            close: "15:00".parse().unwrap(),
        };
        SessionCalendar::new(vec![s1, s2]).unwrap()
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn session_count(&self) -> usize {
        self.sessions.len()
    }

    pub fn minutes_per_day(&self) -> usize {
        self.minutes_per_day
    }

    /// Slot index of a wall-clock minute, or `None` if it falls outside every session.
    pub fn slot_of(&self, t: TimeOfDay) -> Option<usize> {
        let mut base = 0usize;
        for s in &self.sessions {
            if s.contains(t) {
                return Some(base + (t.minutes - s.open.minutes) as usize);
            }
            base += s.slot_count();
        }
        None
    }

    /// Wall-clock minute of a slot index. Panics if `slot >= minutes_per_day`.
    pub fn time_of_slot(&self, slot: usize) -> TimeOfDay {
        let mut remaining = slot;
        for s in &self.sessions {
            if remaining < s.slot_count() {
                return s.open.plus_minutes(remaining as u16);
            }
            remaining -= s.slot_count();
        }
        panic!(
            "slot {slot} out of range for a {}-minute day",
            self.minutes_per_day
        );
    }

    /// True when `slot` is the first minute of one of the day's sessions.
    pub fn is_session_start(&self, slot: usize) -> bool {
        let mut base = 0usize;
        for s in &self.sessions {
            if slot == base {
                return true;
            }
            base += s.slot_count();
        }
        false
    }
}
