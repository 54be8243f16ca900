//! On-disk cache of enumerations and certificates.
//!
//! Each entry is one text file:
//!
//! ```text
//! key=<sha256 of version and parameters>
//! body=<sha256 of the body>
//! <body>
//! ```
//!
//! A file whose key or body hash does not match is ignored and rewritten.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use sha2::{Digest, Sha256};

pub const CACHE_ENV: &str = "MAXCOMPLEX_CACHE";
pub const DEFAULT_DIR: &str = ".maxcomplex-cache";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

pub fn sha256_hex(data: &[u8]) -> String {
    hex::encode(Sha256::digest(data))
}

/// Hash of the crate version, the entry kind and its parameters.
pub fn key_hash(kind: &str, params: &str) -> String {
    sha256_hex(format!("maxcomplex {}\n{kind}\n{params}", env!("CARGO_PKG_VERSION")).as_bytes())
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// `$MAXCOMPLEX_CACHE`, else `./.maxcomplex-cache`.
    pub fn from_env() -> Self {
        Self::new(
            std::env::var_os(CACHE_ENV)
                .map(PathBuf::from)
                .unwrap_or_else(|| PathBuf::from(DEFAULT_DIR)),
        )
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path(&self, kind: &str, params: &str) -> PathBuf {
        let slug: String = params
            .chars()
            .map(|ch| if ch.is_ascii_alphanumeric() { ch } else { '-' })
            .collect();
        self.dir.join(format!("{kind}-{slug}.txt"))
    }

    /// The cached body, if present and both hashes check out.
    pub fn load(&self, kind: &str, params: &str) -> Option<String> {
        let text = fs::read_to_string(self.path(kind, params)).ok()?;
        let (key_line, rest) = text.split_once('\n')?;
        let (body_line, body) = rest.split_once('\n')?;
        let fresh = key_line.strip_prefix("key=")? == key_hash(kind, params)
            && body_line.strip_prefix("body=")? == sha256_hex(body.as_bytes());
        fresh.then(|| body.to_string())
    }

    pub fn store(&self, kind: &str, params: &str, body: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.dir)
            .with_context(|| format!("creating cache directory {}", self.dir.display()))?;
        let path = self.path(kind, params);
        let text = format!(
            "key={}\nbody={}\n{body}",
            key_hash(kind, params),
            sha256_hex(body.as_bytes())
        );
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    /// Loads the entry or computes, stores and returns it.
    pub fn get_or_insert(
        &self,
        kind: &str,
        params: &str,
        compute: impl FnOnce() -> Result<String>,
    ) -> Result<(String, bool)> {
        if let Some(body) = self.load(kind, params) {
            return Ok((body, true));
        }
        let body = compute()?;
        self.store(kind, params, &body)?;
        Ok((body, false))
    }
}
