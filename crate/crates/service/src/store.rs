//! One JSON file per session under a data directory.
//!
//! Writes go to a temporary file that is renamed over the old one, so a
//! crash leaves either the previous or the new state on disk. Readers take
//! an `Arc` snapshot and never wait for writers; writers to one session are
//! serialized and must name the revision they started from.

use std::collections::HashMap;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use crate::error::ServiceError;
use crate::session::{now_ms, Session, SessionState};

struct Slot {
    write: tokio::sync::Mutex<()>,
    current: RwLock<Arc<Session>>,
}

impl Slot {
    fn new(session: Session) -> Self {
        Slot {
            write: tokio::sync::Mutex::new(()),
            current: RwLock::new(Arc::new(session)),
        }
    }

    fn snapshot(&self) -> Arc<Session> {
        self.current.read().unwrap().clone()
    }
}

pub struct SessionStore {
    dir: PathBuf,
    slots: RwLock<HashMap<String, Arc<Slot>>>,
}

impl SessionStore {
    /// Opens (creating if needed) `dir` and loads every stored session.
    /// Files that fail to parse or validate are skipped with a warning.
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let mut slots = HashMap::new();
        for entry in fs::read_dir(&dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) != Some("json") {
                continue;
            }
            match load(&path) {
                Ok(session) => {
                    slots.insert(session.id.clone(), Arc::new(Slot::new(session)));
                }
                Err(e) => log::warn!("skipping {}: {e}", path.display()),
            }
        }
        log::info!("loaded {} sessions from {}", slots.len(), dir.display());
        Ok(SessionStore {
            dir,
            slots: RwLock::new(slots),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn len(&self) -> usize {
        self.slots.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        self.slot(id).map(|s| s.snapshot())
    }

    fn slot(&self, id: &str) -> Result<Arc<Slot>, ServiceError> {
        self.slots
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| ServiceError::NotFound(id.to_string()))
    }

    pub fn insert(&self, session: Session) -> Result<Arc<Session>, ServiceError> {
        self.persist(&session)?;
        let slot = Arc::new(Slot::new(session));
        let snapshot = slot.snapshot();
        self.slots
            .write()
            .unwrap()
            .insert(snapshot.id.clone(), slot);
        Ok(snapshot)
    }

    /// Replaces the state of session `id` if it is still at `revision`,
    /// bumping the revision. Of several writers starting from the same
    /// revision exactly one succeeds; the rest get
    /// [`ServiceError::Conflict`] and leave the session untouched.
    pub async fn update(
        &self,
        id: &str,
        revision: u64,
        change: impl FnOnce(&Session) -> Result<SessionState, ServiceError>,
    ) -> Result<Arc<Session>, ServiceError> {
        let slot = self.slot(id)?;
        let _guard = slot.write.lock().await;
        let current = slot.snapshot();
        if current.revision != revision {
            return Err(ServiceError::Conflict {
                current: current.revision,
                submitted: revision,
            });
        }
        let next = Session {
            state: change(&current)?,
            revision: current.revision + 1,
            updated_ms: now_ms().max(current.updated_ms),
            ..(*current).clone()
        };
        self.persist(&next)?;
        let next = Arc::new(next);
        *slot.current.write().unwrap() = next.clone();
        Ok(next)
    }

    fn path(&self, id: &str) -> PathBuf {
        self.dir.join(format!("{id}.json"))
    }

    fn persist(&self, session: &Session) -> io::Result<()> {
        let target = self.path(&session.id);
        let tmp = self.dir.join(format!(".{}.json.tmp", session.id));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(&serde_json::to_vec_pretty(session)?)?;
        file.sync_all()?;
        fs::rename(&tmp, &target)
    }
}

fn load(path: &Path) -> Result<Session, ServiceError> {
    let bytes = fs::read(path)?;
    let session: Session =
        serde_json::from_slice(&bytes).map_err(|e| ServiceError::Invalid(e.to_string()))?;
    session.validate()?;
    if path.file_stem().and_then(|s| s.to_str()) != Some(session.id.as_str()) {
        return Err(ServiceError::Invalid(format!(
            "file name does not match id {}",
            session.id
        )));
    }
    Ok(session)
}
