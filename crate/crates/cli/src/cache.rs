//! Disk cache for spectral mode tables.
//!
//! One file per basis key, named by the hash of the key alone. The header carries the hash of
//! key and library version, so a version bump lands on the same file, fails the header check and
//! is recomputed and republished. Files are immutable once renamed into place: writers publish by
//! write-temp-then-rename, readers never see a partial table.
//!
//! Layout: magic (8 bytes) | key hash (32) | count (u64 LE) | count × f64 LE | sha256 of payload (32).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use extlap::transforms::basis::{BasisKey, BasisStore};
use serde::Serialize;
use sha2::{Digest, Sha256};

const MAGIC: &[u8; 8] = b"EXLPBAS1";
const HEADER: usize = 8 + 32 + 8;

/// Environment variable that overrides the cache directory.
pub const CACHE_ENV: &str = "EXTLAP_CACHE_DIR";

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CacheStats {
    pub hits: usize,
    pub misses: usize,
    pub rejected: usize,
    pub published: usize,
}

#[derive(Debug)]
pub struct DiskCache {
    dir: PathBuf,
    version: String,
    hits: AtomicUsize,
    misses: AtomicUsize,
    rejected: AtomicUsize,
    published: AtomicUsize,
}

/// Why a cache file was not used.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    Missing,
    /// Written for another key or library version.
    KeyMismatch,
    Corrupt(String),
}

fn sha256(bytes: &[u8]) -> [u8; 32] {
    Sha256::digest(bytes).into()
}

impl DiskCache {
    /// Opens (creating if needed) a cache directory and checks that it is writable.
    pub fn open(dir: impl Into<PathBuf>, version: impl Into<String>) -> std::io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        let probe = dir.join(format!(".probe-{}", std::process::id()));
        fs::write(&probe, b"")?;
        fs::remove_file(&probe)?;
        Ok(Self {
            dir,
            version: version.into(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
            rejected: AtomicUsize::new(0),
            published: AtomicUsize::new(0),
        })
    }

    /// `$EXTLAP_CACHE_DIR`, else `$XDG_CACHE_HOME/extlap`, else `~/.cache/extlap`, else a
    /// directory under the system temp dir.
    pub fn default_dir() -> PathBuf {
        let env = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
        if let Some(d) = env(CACHE_ENV) {
            return d;
        }
        if let Some(d) = env("XDG_CACHE_HOME") {
            return d.join("extlap");
        }
        if let Some(h) = env("HOME") {
            return h.join(".cache").join("extlap");
        }
        std::env::temp_dir().join("extlap-cache")
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            rejected: self.rejected.load(Ordering::Relaxed),
            published: self.published.load(Ordering::Relaxed),
        }
    }

    fn key_hash(&self, fingerprint: &str) -> [u8; 32] {
        sha256(format!("{fingerprint}|version={}", self.version).as_bytes())
    }

    pub fn path_for(&self, fingerprint: &str) -> PathBuf {
        self.dir.join(format!("{}.basis", hex::encode(sha256(fingerprint.as_bytes()))))
    }

    /// Reads a table; any mismatch or damage yields a rejection and never a wrong table.
    pub fn read(&self, fingerprint: &str, expected_len: usize) -> Result<Vec<f64>, Rejection> {
        let bytes = match fs::read(self.path_for(fingerprint)) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(Rejection::Missing),
            Err(e) => return Err(Rejection::Corrupt(e.to_string())),
        };
        if bytes.len() < HEADER + 32 || &bytes[..8] != MAGIC {
            return Err(Rejection::Corrupt("bad header".into()));
        }
        if bytes[8..40] != self.key_hash(fingerprint) {
            return Err(Rejection::KeyMismatch);
        }
        let count = u64::from_le_bytes(bytes[40..48].try_into().expect("eight bytes")) as usize;
        if count != expected_len || bytes.len() != HEADER + 8 * count + 32 {
            return Err(Rejection::Corrupt(format!("length {} does not match {expected_len} entries", bytes.len())));
        }
        let (payload, check) = bytes[HEADER..].split_at(8 * count);
        if sha256(payload) != check {
            return Err(Rejection::Corrupt("checksum mismatch".into()));
        }
        Ok(payload.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("eight bytes"))).collect())
    }

    /// Publishes a table atomically.
    pub fn write(&self, fingerprint: &str, values: &[f64]) -> std::io::Result<()> {
        let mut buf = Vec::with_capacity(HEADER + 8 * values.len() + 32);
        buf.extend_from_slice(MAGIC);
        buf.extend_from_slice(&self.key_hash(fingerprint));
        buf.extend_from_slice(&(values.len() as u64).to_le_bytes());
        for v in values {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        let check = sha256(&buf[HEADER..]);
        buf.extend_from_slice(&check);

        static SEQ: AtomicUsize = AtomicUsize::new(0);
        let target = self.path_for(fingerprint);
        let tmp = self.dir.join(format!(
            ".tmp-{}-{}-{}",
            std::process::id(),
            SEQ.fetch_add(1, Ordering::Relaxed),
            target.file_name().and_then(|n| n.to_str()).unwrap_or("table")
        ));
        let result = (|| {
            let mut f = fs::File::create(&tmp)?;
            f.write_all(&buf)?;
            f.sync_all()?;
            fs::rename(&tmp, &target)
        })();
        if result.is_err() {
            let _ = fs::remove_file(&tmp);
        }
        result
    }
}

impl BasisStore for DiskCache {
    fn load(&self, key: &BasisKey, expected_len: usize) -> Option<Vec<f64>> {
        let fp = key.fingerprint();
        match self.read(&fp, expected_len) {
            Ok(v) => {
                self.hits.fetch_add(1, Ordering::Relaxed);
                Some(v)
            }
            Err(Rejection::Missing) => {
                self.misses.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(Rejection::KeyMismatch) => {
                self.rejected.fetch_add(1, Ordering::Relaxed);
                None
            }
            Err(Rejection::Corrupt(why)) => {
                self.rejected.fetch_add(1, Ordering::Relaxed);
                eprintln!("warning: cache file {} is unusable ({why}); recomputing", self.path_for(&fp).display());
                None
            }
        }
    }

    fn store(&self, key: &BasisKey, modes: &[f64]) {
        match self.write(&key.fingerprint(), modes) {
            Ok(()) => {
                self.published.fetch_add(1, Ordering::Relaxed);
            }
            Err(e) => eprintln!("warning: could not write cache table in {}: {e}", self.dir.display()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cache(dir: &Path, version: &str) -> DiskCache {
        DiskCache::open(dir, version).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let c = cache(dir.path(), "1.0.0");
        let v = vec![0.1, -2.5e-300, f64::MIN_POSITIVE, 1.0 / 3.0];
        c.write("k", &v).unwrap();
        let back = c.read("k", v.len()).unwrap();
        assert!(back.iter().zip(&v).all(|(a, b)| a.to_bits() == b.to_bits()));
        assert_eq!(c.read("other", v.len()), Err(Rejection::Missing));
        assert!(matches!(c.read("k", 3), Err(Rejection::Corrupt(_))));
        let leftovers = fs::read_dir(dir.path()).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with(".tmp")).count();
        assert_eq!(leftovers, 0);
    }

    #[test]
    fn version_bump_invalidates() {
        let dir = tempfile::tempdir().unwrap();
        cache(dir.path(), "1.0.0").write("k", &[1.0, 2.0]).unwrap();
        let newer = cache(dir.path(), "1.1.0");
        assert_eq!(newer.read("k", 2), Err(Rejection::KeyMismatch));
        newer.write("k", &[3.0, 4.0]).unwrap();
        assert_eq!(newer.read("k", 2).unwrap(), vec![3.0, 4.0]);
        assert_eq!(cache(dir.path(), "1.0.0").read("k", 2), Err(Rejection::KeyMismatch));
    }

    #[test]
    fn corruption_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let c = cache(dir.path(), "1.0.0");
        c.write("k", &[1.0, 2.0, 3.0]).unwrap();
        let path = c.path_for("k");
        let mut bytes = fs::read(&path).unwrap();
        bytes[HEADER + 3] ^= 0x10;
        fs::write(&path, &bytes).unwrap();
        assert_eq!(c.read("k", 3), Err(Rejection::Corrupt("checksum mismatch".into())));
        fs::write(&path, &bytes[..20]).unwrap();
        assert!(matches!(c.read("k", 3), Err(Rejection::Corrupt(_))));
    }

    #[test]
    fn concurrent_readers_and_writers() {
        let dir = tempfile::tempdir().unwrap();
        let c = std::sync::Arc::new(cache(dir.path(), "1.0.0"));
        let v: Vec<f64> = (0..4096).map(|i| i as f64).collect();
        c.write("k", &v).unwrap();
        let handles: Vec<_> = (0..8)
            .map(|i| {
                let (c, v) = (c.clone(), v.clone());
                std::thread::spawn(move || {
                    for _ in 0..20 {
                        if i % 2 == 0 {
                            c.write("k", &v).unwrap();
                        } else {
                            assert_eq!(c.read("k", v.len()).unwrap(), v);
                        }
                    }
                })
            })
            .collect();
        for h in handles {
            h.join().unwrap();
        }
    }
}
