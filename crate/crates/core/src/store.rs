//! Player state and the sequential match pipeline.
//!
//! Snapshot format, one JSON object per line:
//!
//! ```text
//! {"schema":1,"n":1000,"m":7,"beta":0.8,"sigma0":0.7,"sigma_kappa":0.03}
//! {"id":"alice","matches":12,"last":1700000000000,"w":[1.2345678901234567e-5, ...]}
//! ```
//!
//! Weights are written with 17 significant digits, so reloading reproduces
//! every `f64` exactly. Records are sorted by id.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Deserialize;

use crate::config::SystemConfig;
use crate::engine::Engine;
use crate::error::{Error, Result};
use crate::grid::{default_prior, Belief, Grid, GridDistribution};
use crate::matchlog::MatchEvent;
use crate::naive::MatchScore;

pub const SCHEMA_VERSION: u32 = 1;

/// Weight sums further than this from 1 are rejected on load.
pub const LOAD_SUM_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct PlayerRecord {
    pub player_id: String,
    pub belief: GridDistribution,
    pub matches_played: u64,
    /// Timestamp of the last processed match, ms since epoch.
    pub last_update: i64,
}

impl PlayerRecord {
    pub fn schema_version(&self) -> u32 {
        SCHEMA_VERSION
    }
}

#[derive(Debug, Deserialize)]
struct Header {
    schema: u32,
    n: usize,
    m: f64,
}

#[derive(Debug, Deserialize)]
struct RecordLine {
    id: String,
    matches: u64,
    last: i64,
    w: Vec<f64>,
}

fn write_f64_17(out: &mut String, x: f64) {
    use std::fmt::Write as _;
    write!(out, "{x:.16e}").expect("writing to a String cannot fail");
}

#[derive(Debug, Clone)]
pub struct RatingStore {
    config: SystemConfig,
    grid: Grid,
    prior: GridDistribution,
    engine: Engine,
    players: BTreeMap<String, PlayerRecord>,
}

impl RatingStore {
    pub fn new(config: SystemConfig) -> Result<Self> {
        config.validate()?;
        let grid = config.grid()?;
        let prior = default_prior(grid, config.sigma0)?;
        let engine = Engine::from_config(&config)?;
        Ok(Self { config, grid, prior, engine, players: BTreeMap::new() })
    }

    pub fn config(&self) -> &SystemConfig {
        &self.config
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn len(&self) -> usize {
        self.players.len()
    }

    pub fn is_empty(&self) -> bool {
        self.players.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&PlayerRecord> {
        self.players.get(id)
    }

    pub fn players(&self) -> impl Iterator<Item = &PlayerRecord> {
        self.players.values()
    }

    /// Record for `id`, or a fresh one carrying the default prior (not inserted).
    pub fn get_or_default(&self, id: &str) -> Result<PlayerRecord> {
        match self.players.get(id) {
            Some(rec) => {
                check_record(rec)?;
                Ok(rec.clone())
            }
            None => Ok(PlayerRecord {
                player_id: id.to_string(),
                belief: self.prior.clone(),
                matches_played: 0,
                last_update: 0,
            }),
        }
    }

    pub fn get_or_create(&mut self, id: &str) -> Result<&PlayerRecord> {
        if id.is_empty() {
            return Err(Error::param("player id must not be empty"));
        }
        if !self.players.contains_key(id) {
            let rec = self.get_or_default(id)?;
            self.players.insert(id.to_string(), rec);
        }
        let rec = &self.players[id];
        check_record(rec)?;
        Ok(rec)
    }

    /// Replaces or adds a record after checking grid and normalization.
    pub fn insert(&mut self, record: PlayerRecord) -> Result<()> {
        self.grid.ensure_compatible(record.belief.grid())?;
        check_record(&record)?;
        self.players.insert(record.player_id.clone(), record);
        Ok(())
    }

    /// Win probability of `a` against `b` under the current beliefs.
    pub fn predict(&self, a: &str, b: &str) -> Result<f64> {
        let ra = self.players.get(a).ok_or_else(|| Error::UnknownPlayer(a.to_string()))?;
        let rb = self.players.get(b).ok_or_else(|| Error::UnknownPlayer(b.to_string()))?;
        if a == b {
            return Ok(0.5);
        }
        self.engine.expected_score(&ra.belief, &rb.belief)
    }

    /// Applies one match. Both posteriors use the pre-match beliefs; the
    /// kernel step follows. Nothing is committed unless both players succeed.
    pub fn process_match(&mut self, ev: &MatchEvent) -> Result<(PlayerRecord, PlayerRecord)> {
        ev.validate()?;
        let score = MatchScore::new(ev.score)?;
        let a = self.get_or_default(&ev.player_a)?;
        let b = self.get_or_default(&ev.player_b)?;
        let (belief_a, belief_b) = self.engine.update_pair(&a.belief, &b.belief, score)?;
        let new_a = PlayerRecord {
            player_id: a.player_id,
            belief: belief_a,
            matches_played: a.matches_played + 1,
            last_update: ev.timestamp,
        };
        let new_b = PlayerRecord {
            player_id: b.player_id,
            belief: belief_b,
            matches_played: b.matches_played + 1,
            last_update: ev.timestamp,
        };
        self.players.insert(new_a.player_id.clone(), new_a.clone());
        self.players.insert(new_b.player_id.clone(), new_b.clone());
        Ok((new_a, new_b))
    }

    /// Processes events in the given order, stopping at the first error.
    pub fn process_all<'a>(&mut self, events: impl IntoIterator<Item = &'a MatchEvent>) -> Result<usize> {
        let mut count = 0;
        for ev in events {
            self.process_match(ev)?;
            count += 1;
        }
        Ok(count)
    }

    fn header_line(&self) -> String {
        format!(
            "{{\"schema\":{},\"n\":{},\"m\":{:?},\"beta\":{:?},\"sigma0\":{:?},\"sigma_kappa\":{:?}}}",
            SCHEMA_VERSION,
            self.grid.intervals(),
            self.grid.half_width(),
            self.config.beta,
            self.config.sigma0,
            self.config.sigma_kappa
        )
    }

    pub fn write_snapshot(&self, mut out: impl Write) -> Result<()> {
        writeln!(out, "{}", self.header_line())?;
        let mut line = String::new();
        for rec in self.players.values() {
            line.clear();
            line.push_str("{\"id\":");
            line.push_str(&serde_json::to_string(&rec.player_id).expect("strings serialize"));
            line.push_str(&format!(",\"matches\":{},\"last\":{},\"w\":[", rec.matches_played, rec.last_update));
            for (i, w) in rec.belief.weights().iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                write_f64_17(&mut line, *w);
            }
            line.push_str("]}");
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    /// Writes to a sibling temp file and renames over `path`.
    pub fn snapshot_save(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut w = BufWriter::new(fs::File::create(&tmp)?);
            self.write_snapshot(&mut w)?;
            w.flush()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }

    /// Replaces the players with those read from `reader`.
    pub fn read_snapshot(&mut self, reader: impl BufRead) -> Result<()> {
        let mut lines = reader.lines();
        let header = lines.next().ok_or_else(|| Error::Integrity("snapshot is empty".into()))??;
        let header: Header =
            serde_json::from_str(&header).map_err(|e| Error::Parse { line: 1, message: format!("bad header: {e}") })?;
        if header.schema != SCHEMA_VERSION {
            return Err(Error::IntegrityAt {
                line: 1,
                message: format!("schema version {} (expected {SCHEMA_VERSION})", header.schema),
            });
        }
        let grid = Grid::new(header.n, header.m).map_err(|e| Error::IntegrityAt { line: 1, message: e.to_string() })?;
        if !grid.is_compatible(&self.grid) {
            return Err(Error::IntegrityAt {
                line: 1,
                message: format!(
                    "store grid (n={}, M={}) does not match configuration (n={}, M={})",
                    header.n,
                    header.m,
                    self.grid.intervals(),
                    self.grid.half_width()
                ),
            });
        }
        let mut players = BTreeMap::new();
        for (idx, line) in lines.enumerate() {
            let line_no = idx + 2;
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: RecordLine =
                serde_json::from_str(&line).map_err(|e| Error::Parse { line: line_no, message: e.to_string() })?;
            let belief = load_weights(self.grid, rec.w)
                .map_err(|e| Error::IntegrityAt { line: line_no, message: format!("player {:?}: {e}", rec.id) })?;
            let record =
                PlayerRecord { player_id: rec.id.clone(), belief, matches_played: rec.matches, last_update: rec.last };
            if players.insert(rec.id.clone(), record).is_some() {
                return Err(Error::IntegrityAt { line: line_no, message: format!("duplicate player {:?}", rec.id) });
            }
        }
        self.players = players;
        Ok(())
    }

    pub fn snapshot_load(&mut self, path: &Path) -> Result<()> {
        self.read_snapshot(BufReader::new(fs::File::open(path)?))
    }

    /// Opens `path` if it exists, otherwise starts empty.
    pub fn open(config: SystemConfig, path: &Path) -> Result<Self> {
        let mut store = Self::new(config)?;
        if path.exists() {
            store.snapshot_load(path)?;
        }
        Ok(store)
    }
}

/// Keeps weights bit-exact when already normalized to 1e-12, renormalizes
/// small drift, rejects anything beyond [`LOAD_SUM_TOLERANCE`].
fn load_weights(grid: Grid, w: Vec<f64>) -> Result<GridDistribution> {
    let exact = GridDistribution::from_normalized(grid, w.clone(), 1e-12);
    match exact {
        Ok(d) => Ok(d),
        Err(Error::Integrity(_)) => {
            GridDistribution::from_normalized(grid, w.clone(), LOAD_SUM_TOLERANCE)?;
            GridDistribution::new(grid, w)
        }
        Err(e) => Err(e),
    }
}

fn check_record(rec: &PlayerRecord) -> Result<()> {
    let total: f64 = rec.belief.weights().iter().sum();
    if (total - 1.0).abs() > LOAD_SUM_TOLERANCE {
        return Err(Error::Integrity(format!("player {:?} weights sum to {total}", rec.player_id)));
    }
    Ok(())
}
