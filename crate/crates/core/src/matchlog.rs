//! Line-delimited match logs.
//!
//! One JSON object per line: `{"id": "...", "ts": 1700000000000, "a": "...",
//! "b": "...", "score": 1}`. `score` is the first player's result in `[0, 1]`.
//! Blank lines and lines starting with `#` are ignored.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchEvent {
    #[serde(rename = "id")]
    pub match_id: String,
    #[serde(rename = "ts")]
    pub timestamp: i64,
    #[serde(rename = "a")]
    pub player_a: String,
    #[serde(rename = "b")]
    pub player_b: String,
    pub score: f64,
}

impl MatchEvent {
    pub fn validate(&self) -> Result<()> {
        if self.player_a == self.player_b {
            return Err(Error::SelfMatch(self.player_a.clone()));
        }
        if !(0.0..=1.0).contains(&self.score) {
            return Err(Error::param(format!("score {} outside [0, 1]", self.score)));
        }
        Ok(())
    }

    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("match events always serialize")
    }
}

/// Result of reading a log. `skipped` lists malformed lines in lenient mode.
#[derive(Debug, Default)]
pub struct MatchLog {
    pub events: Vec<MatchEvent>,
    pub skipped: Vec<(usize, String)>,
}

pub fn parse_line(line: &str, line_no: usize) -> Result<Option<MatchEvent>> {
    let trimmed = line.trim();
    if trimmed.is_empty() || trimmed.starts_with('#') {
        return Ok(None);
    }
    let event: MatchEvent =
        serde_json::from_str(trimmed).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
    event.validate().map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
    Ok(Some(event))
}

/// Reads a whole log. In strict mode the first bad line aborts with its line number.
pub fn read_log(reader: impl BufRead, strict: bool) -> Result<MatchLog> {
    let mut log = MatchLog::default();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        match parse_line(&line, idx + 1) {
            Ok(Some(ev)) => log.events.push(ev),
            Ok(None) => {}
            Err(e) if !strict => log.skipped.push((idx + 1, e.to_string())),
            Err(e) => return Err(e),
        }
    }
    Ok(log)
}

pub fn write_log<'a>(mut writer: impl Write, events: impl IntoIterator<Item = &'a MatchEvent>) -> Result<()> {
    for ev in events {
        writeln!(writer, "{}", ev.to_line())?;
    }
    Ok(())
}
