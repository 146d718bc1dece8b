//! Key-value configuration files.
//!
//! Ingest configs, run configs and generator specs all share one plain-text
//! format: `key = value` lines, `#` comments, blank lines ignored. Keys may
//! repeat (`session = 09:30-11:30` twice declares two sessions); order is
//! preserved.

use std::fmt::Debug;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::calendar::{Session, SessionCalendar};
use crate::error::{Error, Result};
use crate::ingest::{ColumnNames, IngestConfig, MissingMinutePolicy};

/// An ordered multimap of `key = value` entries.
#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    entries: Vec<(String, String)>,
    /// Raw file bytes, kept for config hashing.
    raw: String,
}

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got {line:?}",
                    i + 1
                ))
            })?;
            entries.push((key.trim().to_string(), value.trim().to_string()));
        }
        Ok(KeyValues {
            entries,
            raw: text.to_string(),
        })
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading config {}", path.display()), e))?;
        Self::parse(&text)
    }

    /// Last value for `key`, if any.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    /// All values for `key`, in file order.
    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
            .collect()
    }

    pub fn parse_or<T>(&self, key: &str, default: T) -> Result<T>
    where
        T: FromStr,
        T::Err: Debug,
    {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|e| Error::Config(format!("key {key} = {v:?}: {e:?}"))),
        }
    }

    /// Comma-separated list value.
    pub fn parse_list<T>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T: FromStr,
        T::Err: Debug,
    {
        match self.get(key) {
            None => Ok(None),
            Some(v) => parse_comma_list(v)
                .map(Some)
                .map_err(|e| Error::Config(format!("key {key} = {v:?}: {e}"))),
        }
    }

    /// Collect repeated `session = HH:MM-HH:MM` entries into a calendar.
    pub fn sessions(&self) -> Result<Option<SessionCalendar>> {
        let specs = self.get_all("session");
        if specs.is_empty() {
            return Ok(None);
        }
        let mut sessions = Vec::with_capacity(specs.len());
        for s in specs {
            let (open, close) = s
                .split_once('-')
                .ok_or_else(|| Error::Config(format!("session {s:?}: expected HH:MM-HH:MM")))?;
            sessions.push(Session {
                open: open.trim().parse()?,
                close: close.trim().parse()?,
            });
        }
        Ok(Some(SessionCalendar::new(sessions)?))
    }

    pub fn raw_text(&self) -> &str {
        &self.raw
    }
}

pub fn parse_comma_list<T>(text: &str) -> std::result::Result<Vec<T>, String>
where
    T: FromStr,
    T::Err: Debug,
{
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse().map_err(|e| format!("bad element {s:?}: {e:?}")))
        .collect()
}

impl IngestConfig {
    /// Build an ingest config from key-value entries. Recognized keys:
    /// `delimiter`, `col_date`, `col_time`, `col_price`, `col_volume`,
    /// `session` (repeated), `missing_minutes` (drop | fill | strict).
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let mut cfg = IngestConfig::default();
        if let Some(d) = kv.get("delimiter") {
            let mut chars = d.chars();
            let c = chars
                .next()
                .ok_or_else(|| Error::Config("empty delimiter".into()))?;
            if chars.next().is_some() {
                return Err(Error::Config(format!(
                    "delimiter must be a single character, got {d:?}"
                )));
            }
            cfg.delimiter = c;
        }
        let mut cols = ColumnNames::default();
        if let Some(v) = kv.get("col_date") {
            cols.date = v.to_string();
        }
        if let Some(v) = kv.get("col_time") {
            cols.time = v.to_string();
        }
        if let Some(v) = kv.get("col_price") {
            cols.price = v.to_string();
        }
        if let Some(v) = kv.get("col_volume") {
            cols.volume = v.to_string();
        }
        cfg.columns = cols;
        if let Some(cal) = kv.sessions()? {
            cfg.calendar = cal;
        }
        if let Some(p) = kv.get("missing_minutes") {
            cfg.missing_policy = match p {
                "drop" => MissingMinutePolicy::Drop,
                "fill" => MissingMinutePolicy::ForwardFill,
                "strict" => MissingMinutePolicy::Strict,
                other => {
                    return Err(Error::Config(format!(
                        "missing_minutes must be drop|fill|strict, got {other:?}"
                    )))
                }
            };
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::from_file(path)?)
    }
}

/// Full-pipeline run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// `(instrument id, input path)` pairs.
    pub inputs: Vec<(String, PathBuf)>,
    pub q_list: Vec<f64>,
    /// Return-magnitude thresholds for comovement curves; `None` derives a
    /// grid from the data.
    pub q_grid: Option<Vec<f64>>,
    pub n_boot: usize,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub x_min_floor: f64,
    pub n_tail_floor: usize,
    pub dfa_order: usize,
    pub trace_trigger: f64,
    pub trace_horizon: usize,
    pub threads: Option<usize>,
    pub ingest: IngestConfig,
    /// Raw config text for the manifest hash.
    pub raw_text: String,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            inputs: Vec::new(),
            q_list: vec![2.0, 3.0, 4.0, 5.0],
            q_grid: None,
            n_boot: 1000,
            seed: 1,
            out_dir: PathBuf::from("out"),
            x_min_floor: 0.1,
            n_tail_floor: 50,
            dfa_order: 1,
            trace_trigger: 5.0,
            trace_horizon: 240,
            threads: None,
            ingest: IngestConfig::default(),
            raw_text: String::new(),
        }
    }
}

impl RunConfig {
    /// Recognized keys: `input` (repeated, `path` or `id:path`), `q`,
    /// `q_grid`, `n_boot`, `seed`, `out`, `x_min_floor`, `n_tail_floor`,
    /// `dfa_order`, `trace_trigger`, `trace_horizon`, `threads`, plus every
    /// ingest key.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        let mut cfg = RunConfig {
            ingest: IngestConfig::from_key_values(kv)?,
            raw_text: kv.raw_text().to_string(),
            ..RunConfig::default()
        };
        for spec in kv.get_all("input") {
            cfg.inputs.push(parse_input_spec(spec));
        }
        if let Some(q) = kv.parse_list::<f64>("q")? {
            cfg.q_list = q;
        }
        cfg.q_grid = kv.parse_list::<f64>("q_grid")?;
        cfg.n_boot = kv.parse_or("n_boot", cfg.n_boot)?;
        cfg.seed = kv.parse_or("seed", cfg.seed)?;
        if let Some(out) = kv.get("out") {
            cfg.out_dir = PathBuf::from(out);
        }
        cfg.x_min_floor = kv.parse_or("x_min_floor", cfg.x_min_floor)?;
        cfg.n_tail_floor = kv.parse_or("n_tail_floor", cfg.n_tail_floor)?;
        cfg.dfa_order = kv.parse_or("dfa_order", cfg.dfa_order)?;
        cfg.trace_trigger = kv.parse_or("trace_trigger", cfg.trace_trigger)?;
        cfg.trace_horizon = kv.parse_or("trace_horizon", cfg.trace_horizon)?;
        if let Some(t) = kv.get("threads") {
            cfg.threads = Some(
                t.parse()
                    .map_err(|e| Error::Config(format!("threads = {t:?}: {e}")))?,
            );
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::from_key_values(&KeyValues::from_file(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.inputs.is_empty() {
            return Err(Error::Config("no `input` declared".into()));
        }
        if self.q_list.is_empty() {
            return Err(Error::Config("q list is empty".into()));
        }
        if self.q_list.iter().any(|&q| !(q > 0.0)) {
            return Err(Error::Config("q thresholds must be positive".into()));
        }
        if self.n_boot == 0 {
            return Err(Error::Config("n_boot must be at least 1".into()));
        }
        if self.trace_horizon == 0 {
            return Err(Error::Config("trace_horizon must be at least 1".into()));
        }
        Ok(())
    }
}

fn parse_input_spec(spec: &str) -> (String, PathBuf) {
    // `id:path` when an explicit id is given; otherwise the file stem.
    if let Some((id, path)) = spec.split_once(':') {
        if !id.is_empty() && !path.is_empty() && !id.contains(std::path::MAIN_SEPARATOR) {
            return (id.to_string(), PathBuf::from(path.trim()));
        }
    }
    let path = PathBuf::from(spec);
    let id = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| spec.to_string());
    (id, path)
}
