//! Content-addressed disk cache for expensive results.
//!
//! An entry lives in `<dir>/<key>.json` where `key = sha256(op, params, tag)`.
//! The stored payload carries its own sha256; entries whose hash, key or tag
//! do not match are misses.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Bumped whenever the meaning of a cached payload changes.
pub const VERSION_TAG: &str = concat!("bfun-", env!("CARGO_PKG_VERSION"), "/1");

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CacheEntry {
    pub key: String,
    pub op: String,
    pub params: String,
    pub version: String,
    pub created_at: u64,
    pub payload: String,
    pub payload_sha256: String,
}

#[derive(Debug, Clone)]
pub struct Cache {
    dir: Option<PathBuf>,
    tag: String,
}

fn sha256_hex(parts: &[&str]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

impl Cache {
    pub fn disabled() -> Self {
        Cache {
            dir: None,
            tag: VERSION_TAG.to_string(),
        }
    }

    pub fn open(dir: Option<&Path>) -> Self {
        Self::with_tag(dir, VERSION_TAG)
    }

    /// Opens `dir` under an explicit version tag. An unusable directory
    /// prints a warning and yields a disabled cache.
    pub fn with_tag(dir: Option<&Path>, tag: &str) -> Self {
        let dir = dir.and_then(|d| match probe(d) {
            Ok(()) => Some(d.to_path_buf()),
            Err(e) => {
                eprintln!(
                    "warning: cache directory {} is not writable ({e}); cache disabled",
                    d.display()
                );
                None
            }
        });
        Cache {
            dir,
            tag: tag.to_string(),
        }
    }

    pub fn enabled(&self) -> bool {
        self.dir.is_some()
    }

    pub fn key(&self, op: &str, params: &str) -> String {
        sha256_hex(&[op, params, &self.tag])
    }

    fn path(&self, key: &str) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(format!("{key}.json")))
    }

    pub fn get(&self, op: &str, params: &str) -> Option<String> {
        let key = self.key(op, params);
        let text = fs::read_to_string(self.path(&key)?).ok()?;
        let e: CacheEntry = serde_json::from_str(&text).ok()?;
        let valid = e.key == key
            && e.op == op
            && e.params == params
            && e.version == self.tag
            && e.payload_sha256 == sha256_hex(&[&e.payload]);
        valid.then_some(e.payload)
    }

    /// Stores `payload`; failures are reported and otherwise ignored.
    pub fn put(&self, op: &str, params: &str, payload: &str) {
        let key = self.key(op, params);
        let Some(path) = self.path(&key) else { return };
        let entry = CacheEntry {
            key,
            op: op.to_string(),
            params: params.to_string(),
            version: self.tag.clone(),
            created_at: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            payload: payload.to_string(),
            payload_sha256: sha256_hex(&[payload]),
        };
        let tmp = path.with_extension("json.tmp");
        let res = serde_json::to_string(&entry)
            .map_err(std::io::Error::other)
            .and_then(|s| fs::write(&tmp, s))
            .and_then(|()| fs::rename(&tmp, &path));
        if let Err(e) = res {
            eprintln!(
                "warning: could not write cache entry {}: {e}",
                path.display()
            );
        }
    }

    /// Cached value of `compute`, keyed by `(op, params)`. Payloads that fail
    /// to decode are recomputed.
    pub fn get_or<T, E>(
        &self,
        op: &str,
        params: &str,
        encode: impl Fn(&T) -> String,
        decode: impl Fn(&str) -> Option<T>,
        compute: impl FnOnce() -> Result<T, E>,
    ) -> Result<T, E> {
        if let Some(v) = self.get(op, params).as_deref().and_then(&decode) {
            return Ok(v);
        }
        let v = compute()?;
        self.put(op, params, &encode(&v));
        Ok(v)
    }
}

fn probe(dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let p = dir.join(format!(".probe-{}", std::process::id()));
    fs::write(&p, b"")?;
    fs::remove_file(&p)
}
