//! One JSON snapshot file per session token, replaced atomically.
//!
//! A snapshot is first written to a temporary file in the data directory and
//! then renamed over `<token>.json`, so readers see either the previous or
//! the new snapshot, never a torn write.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use tempfile::NamedTempFile;
use thiserror::Error;

use crate::session::Session;
use crate::token::{is_token_text, Token};

#[derive(Debug, Error)]
pub enum StoreError {
    /// Same error whether the token never existed, was deleted or is malformed.
    #[error("unknown session token")]
    UnknownToken,
    #[error("storage I/O failure: {0}")]
    Io(#[from] io::Error),
    #[error("corrupt snapshot: {0}")]
    Corrupt(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredSession {
    pub session: Session,
    pub last_modified: DateTime<Utc>,
}

#[derive(Debug, Clone)]
pub struct SessionStore {
    dir: PathBuf,
}

/// A snapshot written to a temporary file but not yet visible to readers.
pub struct StagedSnapshot {
    temp: NamedTempFile,
    target: PathBuf,
}

impl StagedSnapshot {
    /// Atomically replaces the live snapshot.
    pub fn commit(self) -> Result<(), StoreError> {
        self.temp.persist(&self.target).map_err(|e| e.error)?;
        Ok(())
    }

    /// Leaves the temporary file behind without committing, as a crash
    /// between write and rename would.
    pub fn abandon(self) -> io::Result<PathBuf> {
        self.temp.into_temp_path().keep().map_err(|e| e.error)
    }
}

impl SessionStore {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self, StoreError> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path_for(&self, token: &Token) -> PathBuf {
        self.dir.join(format!("{token}.json"))
    }

    pub fn save(&self, session: &Session) -> Result<(), StoreError> {
        self.stage(session)?.commit()
    }

    pub fn stage(&self, session: &Session) -> Result<StagedSnapshot, StoreError> {
        let stored = StoredSession {
            session: session.clone(),
            last_modified: Utc::now(),
        };
        // round-trip through Value so object keys come out sorted
        let mut bytes = serde_json::to_vec(&serde_json::to_value(&stored)?)?;
        bytes.push(b'\n');
        let mut temp = tempfile::Builder::new()
            .prefix(".snapshot-")
            .suffix(".tmp")
            .tempfile_in(&self.dir)?;
        temp.write_all(&bytes)?;
        temp.as_file().sync_all()?;
        Ok(StagedSnapshot {
            temp,
            target: self.path_for(&session.token),
        })
    }

    pub fn load(&self, token: &str) -> Result<Session, StoreError> {
        Ok(self.load_stored(token)?.session)
    }

    pub fn load_stored(&self, token: &str) -> Result<StoredSession, StoreError> {
        let token = parse_known(token)?;
        let bytes = match fs::read(self.path_for(&token)) {
            Ok(b) => b,
            Err(e) if e.kind() == io::ErrorKind::NotFound => return Err(StoreError::UnknownToken),
            Err(e) => return Err(e.into()),
        };
        Ok(serde_json::from_slice(&bytes)?)
    }

    pub fn delete(&self, token: &str) -> Result<(), StoreError> {
        let token = parse_known(token)?;
        match fs::remove_file(self.path_for(&token)) {
            Ok(()) => Ok(()),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Err(StoreError::UnknownToken),
            Err(e) => Err(e.into()),
        }
    }
}

fn parse_known(token: &str) -> Result<Token, StoreError> {
    if !is_token_text(token) {
        return Err(StoreError::UnknownToken);
    }
    Token::parse(token).map_err(|_| StoreError::UnknownToken)
}
