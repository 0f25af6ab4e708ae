use std::path::Path;

use crate::error::{Error, Result};

/// Round-trip float formatting used in every CSV.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.17e}")
}

pub fn create_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}
