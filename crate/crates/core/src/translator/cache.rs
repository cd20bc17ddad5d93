use std::collections::HashMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use super::TranslationRecord;
use crate::error::{Error, Result};

type Key = (String, String, String, String);

fn key(backend_id: &str, source: &str, target: &str, input: &str) -> Key {
    (
        backend_id.to_string(),
        source.to_string(),
        target.to_string(),
        input.to_string(),
    )
}

/// Translation records keyed by backend, language pair and exact input,
/// optionally persisted as append-only JSONL.
#[derive(Debug, Default)]
pub struct TranslationCache {
    path: Option<PathBuf>,
    records: RwLock<HashMap<Key, TranslationRecord>>,
    file: Mutex<Option<File>>,
}

impl TranslationCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    /// Loads `path` if it exists and appends new records to it. Unparseable
    /// lines are skipped with a warning; later records win.
    pub fn open(path: &Path) -> Result<Self> {
        let mut records = HashMap::new();
        if path.exists() {
            let f = File::open(path).map_err(|e| Error::io(path, e))?;
            for (i, line) in BufReader::new(f).lines().enumerate() {
                let line = line.map_err(|e| Error::io(path, e))?;
                if line.trim().is_empty() {
                    continue;
                }
                match serde_json::from_str::<TranslationRecord>(&line) {
                    Ok(r) => {
                        records.insert(key(&r.backend_id, &r.source, &r.target, &r.input), r);
                    }
                    Err(e) => log::warn!("{}:{}: skipping cache line: {e}", path.display(), i + 1),
                }
            }
        }
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(|e| Error::io(path, e))?;
        Ok(TranslationCache {
            path: Some(path.to_path_buf()),
            records: RwLock::new(records),
            file: Mutex::new(Some(file)),
        })
    }

    pub fn path(&self) -> Option<&Path> {
        self.path.as_deref()
    }

    pub fn len(&self) -> usize {
        self.records.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, backend_id: &str, source: &str, target: &str, input: &str) -> Option<TranslationRecord> {
        self.records
            .read()
            .unwrap()
            .get(&key(backend_id, source, target, input))
            .cloned()
    }

    /// Stores `record` unless an entry for its key already exists; returns
    /// the record now held by the cache.
    pub fn insert(&self, record: TranslationRecord) -> Result<TranslationRecord> {
        let k = key(&record.backend_id, &record.source, &record.target, &record.input);
        let mut records = self.records.write().unwrap();
        if let Some(existing) = records.get(&k) {
            return Ok(existing.clone());
        }
        if let Some(f) = self.file.lock().unwrap().as_mut() {
            let mut line = serde_json::to_string(&record)?;
            line.push('\n');
            let path = self.path.as_deref().unwrap_or(Path::new("<cache>"));
            f.write_all(line.as_bytes()).map_err(|e| Error::io(path, e))?;
            f.flush().map_err(|e| Error::io(path, e))?;
        }
        records.insert(k, record.clone());
        Ok(record)
    }
}
