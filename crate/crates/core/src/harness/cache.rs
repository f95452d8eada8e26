//! On-disk store of Vinogradov counts.
//!
//! File layout (little-endian): `b"CSLJ"`, `u32` format version, `u32`
//! entry count, then per entry `r`, `d`, `V` as `u32` and the count as `u64`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::mean_values::vinogradov_count;

pub const MAGIC: &[u8; 4] = b"CSLJ";
pub const FORMAT_VERSION: u32 = 1;
pub const FILE_NAME: &str = "jcounts.bin";
pub const DIR_ENV: &str = "CSL_CACHE_DIR";

pub type JKey = (u32, u32, u32);

/// `$CSL_CACHE_DIR`, else the platform cache directory plus `charsum-lab`.
pub fn default_dir() -> PathBuf {
    match std::env::var_os(DIR_ENV) {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => dirs::cache_dir()
            .unwrap_or_else(std::env::temp_dir)
            .join("charsum-lab"),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JCache {
    entries: BTreeMap<JKey, u64>,
}

impl JCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, r: u32, d: u32, v: u32) -> Option<u64> {
        self.entries.get(&(r, d, v)).copied()
    }

    pub fn insert(&mut self, r: u32, d: u32, v: u32, count: u64) {
        self.entries.insert((r, d, v), count);
    }

    pub fn entries(&self) -> impl Iterator<Item = (JKey, u64)> + '_ {
        self.entries.iter().map(|(k, v)| (*k, *v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + 20 * self.entries.len());
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for (&(r, d, v), &c) in &self.entries {
            for x in [r, d, v] {
                out.extend_from_slice(&x.to_le_bytes());
            }
            out.extend_from_slice(&c.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 12 || &bytes[..4] != MAGIC {
            return Err(Error::CacheVersionMismatch("bad magic".into()));
        }
        let u32_at = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
        let version = u32_at(4);
        if version != FORMAT_VERSION {
            return Err(Error::CacheVersionMismatch(format!(
                "found version {version}, expected {FORMAT_VERSION}"
            )));
        }
        let count = u32_at(8) as usize;
        if bytes.len() != 12 + 20 * count {
            return Err(Error::CacheVersionMismatch(format!(
                "{} bytes for {count} entries",
                bytes.len()
            )));
        }
        let mut entries = BTreeMap::new();
        for k in 0..count {
            let at = 12 + 20 * k;
            let c = u64::from_le_bytes(bytes[at + 12..at + 20].try_into().unwrap());
            entries.insert((u32_at(at), u32_at(at + 4), u32_at(at + 8)), c);
        }
        Ok(JCache { entries })
    }

    /// Loads `dir/jcounts.bin`; a missing file gives an empty cache.
    pub fn load(dir: &Path) -> Result<Self> {
        match fs::read(dir.join(FILE_NAME)) {
            Ok(b) => Self::from_bytes(&b),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::new()),
            Err(e) => Err(e.into()),
        }
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join(FILE_NAME), self.to_bytes())?;
        Ok(())
    }

    /// Cached `J_{r,d}(V)`, computing and storing it on a miss.
    pub fn count(&mut self, r: u32, d: u32, v: u32, budget: u128) -> Result<(u64, bool)> {
        if let Some(c) = self.get(r, d, v) {
            return Ok((c, true));
        }
        let c = vinogradov_count(r, d, v as u64, budget)?;
        self.insert(r, d, v, c);
        Ok((c, false))
    }
}

pub fn clear(dir: &Path) -> Result<bool> {
    match fs::remove_file(dir.join(FILE_NAME)) {
        Ok(()) => Ok(true),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(false),
        Err(e) => Err(e.into()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_hit() {
        let dir = tempfile::tempdir().unwrap();
        let mut c = JCache::new();
        let (j, hit) = c.count(2, 2, 10, 1 << 30).unwrap();
        assert!(!hit);
        assert_eq!(j, 190);
        c.save(dir.path()).unwrap();
        let mut back = JCache::load(dir.path()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.count(2, 2, 10, 1 << 30).unwrap(), (190, true));
        assert!(clear(dir.path()).unwrap());
        assert!(JCache::load(dir.path()).unwrap().is_empty());
    }

    #[test]
    fn corrupt_header() {
        let mut b = JCache::new().to_bytes();
        b[4] = 9;
        assert!(matches!(JCache::from_bytes(&b), Err(Error::CacheVersionMismatch(_))));
        assert!(matches!(JCache::from_bytes(b"XXXX\x01\0\0\0\0\0\0\0"), Err(Error::CacheVersionMismatch(_))));
        let mut c = JCache::new();
        c.insert(1, 1, 1, 1);
        let b = c.to_bytes();
        assert!(JCache::from_bytes(&b[..b.len() - 1]).is_err());
    }
}
