//! Memo table for computed correlators, optionally mirrored to disk.
//!
//! Disk layout: one JSON file per entry, `<dir>/<curve-id>-g<g>-n<n>.json`.
//! The curve id hashes only the curve coefficients that the entry depends
//! on, and the file records that truncation order.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CorrelatorPoly, PolyJson};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MemoKey {
    pub curve_id: String,
    pub g: u32,
    pub n: usize,
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    curve_id: String,
    truncation: usize,
    poly: PolyJson,
}

#[derive(Default)]
pub struct MemoTable {
    entries: RwLock<HashMap<MemoKey, Arc<CorrelatorPoly>>>,
    dir: Option<PathBuf>,
}

impl MemoTable {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn with_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
        Ok(Self {
            entries: RwLock::default(),
            dir: Some(dir),
        })
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn path_for(dir: &Path, key: &MemoKey) -> PathBuf {
        dir.join(format!("{}-g{}-n{}.json", key.curve_id, key.g, key.n))
    }

    /// Memory first, then disk. A disk file that does not parse or does not
    /// match the key and truncation is a miss.
    pub fn get(&self, key: &MemoKey, truncation: usize) -> Option<Arc<CorrelatorPoly>> {
        if let Some(p) = self.entries.read().unwrap().get(key) {
            return Some(p.clone());
        }
        let dir = self.dir.as_ref()?;
        let text = fs::read_to_string(Self::path_for(dir, key)).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.curve_id != key.curve_id
            || file.truncation != truncation
            || file.poly.g != key.g
            || file.poly.n != key.n
        {
            return None;
        }
        let poly = Arc::new(CorrelatorPoly::try_from(&file.poly).ok()?);
        let mut w = self.entries.write().unwrap();
        Some(w.entry(key.clone()).or_insert(poly).clone())
    }

    /// Inserts once; a second insert must carry the identical value.
    pub fn insert(
        &self,
        key: MemoKey,
        truncation: usize,
        poly: CorrelatorPoly,
    ) -> Result<Arc<CorrelatorPoly>> {
        let stored = {
            let mut w = self.entries.write().unwrap();
            if let Some(existing) = w.get(&key) {
                if **existing != poly {
                    return Err(Error::Internal(format!(
                        "memo entry (g={}, n={}) reinserted with a different value",
                        key.g, key.n
                    )));
                }
                return Ok(existing.clone());
            }
            let p = Arc::new(poly);
            w.insert(key.clone(), p.clone());
            p
        };
        if let Some(dir) = &self.dir {
            let file = CacheFile {
                curve_id: key.curve_id.clone(),
                truncation,
                poly: PolyJson::from(stored.as_ref()),
            };
            let path = Self::path_for(dir, &key);
            let tmp = path.with_extension(format!("tmp{}", std::process::id()));
            let text = serde_json::to_string_pretty(&file)?;
            fs::write(&tmp, text)
                .and_then(|_| fs::rename(&tmp, &path))
                .map_err(|source| Error::Io { path, source })?;
        }
        Ok(stored)
    }
}
