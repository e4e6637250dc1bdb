//! Observer responses: the on-disk study layout, the append-only response
//! log, and per-lineup detection summaries.
//!
//! A study directory holds `lineups/<id>.json` (served in id order) and
//! `responses.jsonl`, one JSON object per line.

use std::collections::{HashMap, HashSet};
use std::fs::{File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::dataset::{read_to_string, Lineup};
use crate::error::{Error, Result};
use crate::inference::{lineup_difficulty, DifficultyReport};
use crate::metrics::MetricKind;

pub const LINEUP_DIR: &str = "lineups";
pub const RESPONSES_FILE: &str = "responses.jsonl";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObserverResponse {
    pub lineup_id: String,
    /// 1-based panel number.
    pub picked_position: usize,
    #[serde(default)]
    pub reason: String,
    pub response_time_ms: u64,
    pub observer_id: String,
    /// Milliseconds since the Unix epoch; filled in on receipt when absent.
    #[serde(default)]
    pub timestamp: u64,
}

#[derive(Clone, Debug)]
pub struct StoredLineup {
    pub id: String,
    pub lineup: Lineup,
}

fn lineup_id_ok(id: &str) -> bool {
    !id.is_empty() && id.chars().all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
}

pub fn load_lineups(study_dir: &Path) -> Result<Vec<StoredLineup>> {
    let dir = study_dir.join(LINEUP_DIR);
    let entries = std::fs::read_dir(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or_default().to_string();
            Ok(StoredLineup {
                lineup: Lineup::load(&p)?,
                id,
            })
        })
        .collect()
}

pub fn add_lineup(study_dir: &Path, id: &str, lineup: &Lineup) -> Result<PathBuf> {
    if !lineup_id_ok(id) {
        return Err(Error::Precondition(format!("invalid lineup id `{id}`")));
    }
    let dir = study_dir.join(LINEUP_DIR);
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let path = dir.join(format!("{id}.json"));
    lineup.save(&path)?;
    Ok(path)
}

#[derive(Debug, thiserror::Error)]
pub enum AppendError {
    #[error("observer `{observer_id}` already answered lineup `{lineup_id}`")]
    Duplicate { observer_id: String, lineup_id: String },
    #[error(transparent)]
    Store(#[from] Error),
}

/// Append-only JSON-lines log with a single serialized writer. Readers see
/// a consistent prefix of the log.
pub struct ResponseStore {
    path: PathBuf,
    writer: Mutex<File>,
    records: RwLock<Vec<ObserverResponse>>,
}

impl ResponseStore {
    pub fn open(path: &Path) -> Result<Self> {
        let records = read_responses(path)?;
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(ResponseStore {
            path: path.to_path_buf(),
            writer: Mutex::new(file),
            records: RwLock::new(records),
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(&self, response: ObserverResponse) -> std::result::Result<(), AppendError> {
        let mut file = self.writer.lock().expect("writer lock poisoned");
        let duplicate = self
            .records
            .read()
            .expect("records lock poisoned")
            .iter()
            .any(|r| r.observer_id == response.observer_id && r.lineup_id == response.lineup_id);
        if duplicate {
            return Err(AppendError::Duplicate {
                observer_id: response.observer_id,
                lineup_id: response.lineup_id,
            });
        }
        let mut line = serde_json::to_string(&response).map_err(Error::from)?;
        line.push('\n');
        file.write_all(line.as_bytes())
            .and_then(|_| file.sync_data())
            .map_err(|e| Error::io(&self.path, e))?;
        self.records.write().expect("records lock poisoned").push(response);
        Ok(())
    }

    pub fn snapshot(&self) -> Vec<ObserverResponse> {
        self.records.read().expect("records lock poisoned").clone()
    }

    pub fn answered(&self, observer_id: &str, lineup_id: &str) -> bool {
        self.records
            .read()
            .expect("records lock poisoned")
            .iter()
            .any(|r| r.observer_id == observer_id && r.lineup_id == lineup_id)
    }
}

pub fn read_responses(path: &Path) -> Result<Vec<ObserverResponse>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    read_to_string(path)?
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| Error::Parse(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineupSummary {
    pub lineup_id: String,
    pub m: usize,
    pub n_responses: usize,
    pub n_correct: usize,
    /// `None` until the lineup has a response.
    pub detection_rate: Option<f64>,
    pub mean_time_ms: Option<f64>,
    pub delta: Option<f64>,
    pub gamma: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub metric: Option<MetricKind>,
    pub lineups: Vec<LineupSummary>,
}

/// Difficulty of every lineup under `metric`; lineups the metric cannot
/// score are left out.
pub fn score_lineups(lineups: &[StoredLineup], metric: &MetricKind) -> HashMap<String, DifficultyReport> {
    lineups
        .iter()
        .filter_map(|s| lineup_difficulty(&s.lineup, metric).ok().map(|r| (s.id.clone(), r)))
        .collect()
}

/// Joins responses with lineups. Only the first response of each
/// (observer, lineup) pair counts.
pub fn summarize(
    lineups: &[StoredLineup],
    responses: &[ObserverResponse],
    metric: Option<MetricKind>,
    scores: &HashMap<String, DifficultyReport>,
) -> StudySummary {
    let mut seen = HashSet::new();
    let mut per: HashMap<&str, Vec<&ObserverResponse>> = HashMap::new();
    for r in responses {
        if seen.insert((r.observer_id.as_str(), r.lineup_id.as_str())) {
            per.entry(r.lineup_id.as_str()).or_default().push(r);
        }
    }
    let rows = lineups
        .iter()
        .map(|s| {
            let rs = per.get(s.id.as_str()).map(Vec::as_slice).unwrap_or(&[]);
            let n = rs.len();
            let correct = rs
                .iter()
                .filter(|r| r.picked_position == s.lineup.true_position())
                .count();
            let total_time: u64 = rs.iter().map(|r| r.response_time_ms).sum();
            let score = scores.get(&s.id);
            LineupSummary {
                lineup_id: s.id.clone(),
                m: s.lineup.m(),
                n_responses: n,
                n_correct: correct,
                detection_rate: (n > 0).then(|| correct as f64 / n as f64),
                mean_time_ms: (n > 0).then(|| total_time as f64 / n as f64),
                delta: score.map(|r| r.delta),
                gamma: score.map(|r| r.gamma),
            }
        })
        .collect();
    StudySummary {
        metric,
        lineups: rows,
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl StudySummary {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lineup_id,m,n_responses,n_correct,detection_rate,mean_time_ms,delta,gamma\n");
        for r in &self.lineups {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.lineup_id,
                r.m,
                r.n_responses,
                r.n_correct,
                opt(r.detection_rate),
                opt(r.mean_time_ms),
                opt(r.delta),
                opt(r.gamma)
            ));
        }
        out
    }
}

/// Raw response times (mean times hide the long tail).
pub fn response_times_csv(lineups: &[StoredLineup], responses: &[ObserverResponse]) -> String {
    let truth: HashMap<&str, usize> = lineups
        .iter()
        .map(|s| (s.id.as_str(), s.lineup.true_position()))
        .collect();
    let mut out = String::from("lineup_id,observer_id,picked_position,correct,response_time_ms\n");
    for r in responses {
        let Some(&t) = truth.get(r.lineup_id.as_str()) else {
            continue;
        };
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.lineup_id,
            csv_field(&r.observer_id),
            r.picked_position,
            r.picked_position == t,
            r.response_time_ms
        ));
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
