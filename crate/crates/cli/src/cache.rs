//! On-disk cache of `L(1, chi)` tables and run records.
//!
//! Layout: `<dir>/lvals-p<p>.json` and `<dir>/runs/<command>-<hash>.json`.
//! Writes go to a temporary file in the target directory and are renamed
//! into place, so a reader never sees a partial file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use kummerlab_core::lfun::{bulk_l_one, LValueTable};
use kummerlab_core::PrimeContext;
use sha2::{Digest, Sha256};

use crate::record::RunRecord;

pub const CACHE_ENV: &str = "KUMMERLAB_CACHE";
pub const DEFAULT_DIR: &str = ".kummerlab";

#[derive(Debug, Clone)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    /// Flag first, then the environment variable, then `./.kummerlab`.
    pub fn resolve(flag: Option<PathBuf>) -> Self {
        let dir = flag
            .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_DIR));
        Self { dir }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn l_table_path(&self, p: u64) -> PathBuf {
        self.dir.join(format!("lvals-p{p}.json"))
    }

    /// The table for `ctx.p()`, loaded if a valid cached copy exists and
    /// computed (then stored) otherwise. A cache that cannot be written is
    /// reported on stderr and otherwise ignored.
    pub fn l_table(&self, ctx: &PrimeContext) -> LValueTable {
        let path = self.l_table_path(ctx.p());
        if let Some(t) = fs::read(&path)
            .ok()
            .and_then(|b| serde_json::from_slice::<LValueTable>(&b).ok())
            .filter(|t| t.p == ctx.p() && t.validate().is_ok())
        {
            return t;
        }
        let table = bulk_l_one(ctx);
        let bytes = serde_json::to_vec(&table).expect("L-value tables serialize");
        if let Err(e) = write_atomic(&path, &bytes) {
            eprintln!("warning: could not cache {}: {e}", path.display());
        }
        table
    }

    pub fn store_run(&self, record: &RunRecord) -> std::io::Result<PathBuf> {
        let hash = params_hash(record);
        let path = self.dir.join("runs").join(format!("{}-{hash}.json", record.command));
        let bytes = serde_json::to_vec_pretty(record).expect("run records serialize");
        write_atomic(&path, &bytes)?;
        Ok(path)
    }
}

/// First 16 hex digits of SHA-256 over the canonical parameter JSON.
pub fn params_hash(record: &RunRecord) -> String {
    let canonical = serde_json::to_string(&record.params).expect("params serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(parent)?;
    let mut tmp = tempfile::NamedTempFile::new_in(parent)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reload_matches_recomputation() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::resolve(Some(dir.path().to_path_buf()));
        let ctx = PrimeContext::new(1009).unwrap();
        let first = cache.l_table(&ctx);
        assert!(cache.l_table_path(1009).exists());
        let again = cache.l_table(&ctx);
        let fresh = bulk_l_one(&ctx);
        // JSON floats must reload bit for bit, or warm and cold runs diverge
        assert_eq!(first, again);
        for ((a, b), c) in first.values.iter().zip(&again.values).zip(&fresh.values) {
            assert!((a - b).norm() <= 1e-12 && (b - c).norm() <= 1e-12);
        }
    }

    #[test]
    fn corrupt_cache_is_recomputed() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::resolve(Some(dir.path().to_path_buf()));
        fs::write(cache.l_table_path(13), b"{not json").unwrap();
        let ctx = PrimeContext::new(13).unwrap();
        assert_eq!(cache.l_table(&ctx), bulk_l_one(&ctx));
        // a table for the wrong prime is not trusted either
        let wrong = serde_json::to_vec(&bulk_l_one(&PrimeContext::new(7).unwrap())).unwrap();
        fs::write(cache.l_table_path(13), wrong).unwrap();
        assert_eq!(cache.l_table(&ctx).p, 13);
    }
}
