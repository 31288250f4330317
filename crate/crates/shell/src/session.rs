//! Walkthrough sessions: a map, a mode and the answers given so far.

use std::collections::{BTreeSet, HashMap};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use lawmap_core::traverse::{apply_answer, batch_route_withheld, retract_answer, TraverseError};
use lawmap_core::{Assignment, Mode, Route};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::catalog::{Catalog, MapEntry};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct Session {
    pub id: String,
    pub map_id: String,
    pub mode: Mode,
    pub answers: Assignment,
    #[serde(default, skip_serializing_if = "BTreeSet::is_empty")]
    pub withheld: BTreeSet<String>,
    /// Seconds since the Unix epoch.
    pub created: u64,
    pub updated: u64,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

impl Session {
    /// The route, recomputed from the answers.
    pub fn route(&self, map: &MapEntry) -> Result<Route, TraverseError> {
        batch_route_withheld(&map.set, &self.answers, self.mode, &self.withheld)
    }

    /// Entity tag for anything derived from this session's answers.
    pub fn etag(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.map_id.as_bytes());
        h.update([0]);
        h.update(serde_json::to_vec(&self.mode).unwrap_or_default());
        h.update([0]);
        h.update(serde_json::to_vec(&self.answers).unwrap_or_default());
        h.update([0]);
        h.update(serde_json::to_vec(&self.withheld).unwrap_or_default());
        format!("\"{:x}\"", h.finalize())
    }
}

/// Live sessions, each behind its own lock so that mutations of one
/// session are serialized while others proceed.
#[derive(Debug, Default)]
pub struct SessionStore {
    sessions: RwLock<HashMap<String, Arc<Mutex<Session>>>>,
    state_dir: Option<PathBuf>,
}

impl SessionStore {
    pub fn new(state_dir: Option<PathBuf>) -> Self {
        SessionStore {
            sessions: RwLock::default(),
            state_dir,
        }
    }

    /// Reloads snapshots from the state directory, skipping any whose map
    /// is no longer served. Returns how many were restored.
    pub fn restore(&self, catalog: &Catalog) -> std::io::Result<usize> {
        let Some(dir) = &self.state_dir else {
            return Ok(0);
        };
        std::fs::create_dir_all(dir)?;
        let mut restored = 0;
        for entry in std::fs::read_dir(dir)? {
            let path = entry?.path();
            if path.extension().is_none_or(|x| x != "json") {
                continue;
            }
            let text = std::fs::read_to_string(&path)?;
            let Ok(session) = serde_json::from_str::<Session>(&text) else {
                tracing::warn!(file = %path.display(), "ignoring unreadable session snapshot");
                continue;
            };
            let usable = catalog.get(&session.map_id).is_some_and(|m| session.route(&m).is_ok());
            if !usable {
                tracing::warn!(session = %session.id, map = %session.map_id, "dropping stale session snapshot");
                continue;
            }
            self.sessions.write().unwrap().insert(session.id.clone(), Arc::new(Mutex::new(session)));
            restored += 1;
        }
        Ok(restored)
    }

    pub fn open(&self, map: &MapEntry, mode: Mode, withheld: BTreeSet<String>) -> Result<(Session, Route), TraverseError> {
        let t = now();
        let session = Session {
            id: uuid::Uuid::new_v4().simple().to_string(),
            map_id: map.id.clone(),
            mode,
            answers: Assignment::new(),
            withheld,
            created: t,
            updated: t,
        };
        let route = session.route(map)?;
        self.persist(&session);
        self.sessions.write().unwrap().insert(session.id.clone(), Arc::new(Mutex::new(session.clone())));
        Ok((session, route))
    }

    pub fn get(&self, id: &str) -> Option<Arc<Mutex<Session>>> {
        self.sessions.read().unwrap().get(id).cloned()
    }

    pub fn snapshot(&self, id: &str) -> Option<Session> {
        self.get(id).map(|s| s.lock().unwrap().clone())
    }

    /// Records an answer to a pending decision.
    pub fn answer(&self, id: &str, map: &MapEntry, decision: &str, label: &str) -> Option<Result<(Session, Route), TraverseError>> {
        self.mutate(id, |s| {
            let route = apply_answer(&s.route(map)?, &map.set, decision, label)?;
            s.answers = route.answers.clone();
            Ok(route)
        })
    }

    /// Withdraws an answer.
    pub fn retract(&self, id: &str, map: &MapEntry, decision: &str) -> Option<Result<(Session, Route), TraverseError>> {
        self.mutate(id, |s| {
            let route = retract_answer(&s.route(map)?, &map.set, decision)?;
            s.answers = route.answers.clone();
            Ok(route)
        })
    }

    fn mutate(
        &self,
        id: &str,
        f: impl FnOnce(&mut Session) -> Result<Route, TraverseError>,
    ) -> Option<Result<(Session, Route), TraverseError>> {
        let cell = self.get(id)?;
        let mut s = cell.lock().unwrap();
        let before = s.answers.clone();
        Some(f(&mut s).map(|route| {
            if s.answers != before {
                s.updated = now();
                self.persist(&s);
            }
            (s.clone(), route)
        }))
    }

    fn persist(&self, s: &Session) {
        let Some(dir) = &self.state_dir else {
            return;
        };
        if let Err(e) = write_snapshot(dir, s) {
            tracing::error!(session = %s.id, error = %e, "could not write session snapshot");
        }
    }
}

fn write_snapshot(dir: &Path, s: &Session) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let tmp = dir.join(format!("{}.json.tmp", s.id));
    std::fs::write(&tmp, serde_json::to_vec_pretty(s)?)?;
    std::fs::rename(tmp, dir.join(format!("{}.json", s.id)))
}
