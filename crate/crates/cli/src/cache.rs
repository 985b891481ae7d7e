//! On-disk spectrum cache keyed by symmetry class and coefficients.
//!
//! One file per form. A cached spectrum whose cutoff covers the request is
//! truncated; a shorter one is replaced by a fresh enumeration. Unreadable
//! files are reported as warnings and recomputed.

use std::path::{Path, PathBuf};
use std::sync::Mutex;

use serde_json::{json, Value};
use torusgaps::cache::{read_cache, write_cache};
use torusgaps::spectrum::SpectrumError;
use torusgaps::{enumerate, ReducedForm, Spectrum};

pub const ENV_VAR: &str = "TORUSGAPS_CACHE";

#[derive(Debug, Default)]
struct Stats {
    hits: u64,
    misses: u64,
    warnings: Vec<String>,
}

#[derive(Debug)]
pub struct SpectrumCache {
    dir: Option<PathBuf>,
    stats: Mutex<Stats>,
}

impl SpectrumCache {
    /// The flag wins over the environment; neither means no caching.
    pub fn new(flag: Option<&Path>) -> Self {
        let dir = flag
            .map(Path::to_path_buf)
            .or_else(|| std::env::var_os(ENV_VAR).filter(|v| !v.is_empty()).map(PathBuf::from));
        SpectrumCache {
            dir,
            stats: Mutex::new(Stats::default()),
        }
    }

    /// File name with every coefficient at 17 significant digits.
    pub fn file_name(form: &ReducedForm) -> String {
        let (a1, a2, a3) = form.coefficients();
        format!("{}_{a1:.16e}_{a2:.16e}_{a3:.16e}.tgsp", form.class())
    }

    pub fn spectrum(&self, form: &ReducedForm, n: f64) -> Result<Spectrum, SpectrumError> {
        let Some(dir) = &self.dir else {
            return enumerate(form, n);
        };
        let path = dir.join(Self::file_name(form));
        if path.exists() {
            match read_cache(&path) {
                Ok(s) if s.form() == form && s.cutoff() >= n => {
                    self.stats.lock().unwrap().hits += 1;
                    return s.truncated(n);
                }
                Ok(_) => {}
                Err(e) => self.warn(format!(
                    "cache file {} unreadable ({e}); recomputing",
                    path.display()
                )),
            }
        }
        self.stats.lock().unwrap().misses += 1;
        let s = enumerate(form, n)?;
        let stored = std::fs::create_dir_all(dir)
            .map_err(|e| e.to_string())
            .and_then(|_| write_cache(&s, &path).map_err(|e| e.to_string()));
        if let Err(e) = stored {
            self.warn(format!("could not write {}: {e}", path.display()));
        }
        Ok(s)
    }

    fn warn(&self, msg: String) {
        eprintln!("warning: {msg}");
        self.stats.lock().unwrap().warnings.push(msg);
    }

    /// Warnings in a thread-count independent order.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = self.stats.lock().unwrap().warnings.clone();
        w.sort();
        w
    }

    pub fn summary(&self) -> Value {
        let s = self.stats.lock().unwrap();
        json!({
            "dir": self.dir.as_ref().map(|d| d.display().to_string()),
            "hits": s.hits,
            "misses": s.misses,
        })
    }
}
